#include "quenchxy/models.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include "quenchxy/bessel.hpp"
#include "quenchxy/error.hpp"
#include "quenchxy/rng.hpp"

namespace quenchxy {

namespace {

// Neumaier compensated accumulator.
class CompensatedSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0, comp_ = 0;
};

void check_spins(const WeightedGraph& graph, std::size_t n, const PercolationSample* disorder, const GaugeDisorder* gauge) {
    require(n == static_cast<std::size_t>(graph.vertex_count()), ErrorKind::Shape, "state length does not match the graph");
    if (disorder) {
        std::size_t expected = static_cast<std::size_t>(disorder->kind == PercolationKind::Site ? graph.vertex_count() : graph.edge_count());
        require(disorder->occupation.size() == expected, ErrorKind::Shape, "disorder does not match the graph");
    }
    if (gauge)
        require(gauge->omega.size() == static_cast<std::size_t>(graph.edge_count()), ErrorKind::Shape,
                "gauge disorder does not match the graph");
}

}  // namespace

double wrap_angle(double a) {
    if (a >= 0 && a < kTwoPi) return a;
    if (a >= -kTwoPi && a < 0) {
        const double r = a + kTwoPi;
        return r < kTwoPi ? r : 0.0;
    }
    if (a >= kTwoPi && a < 2 * kTwoPi) return a - kTwoPi;
    double r = std::fmod(a, kTwoPi);
    if (r < 0) r += kTwoPi;
    if (r >= kTwoPi) r = 0;
    return r;
}

SingleSiteMeasure SingleSiteMeasure::dirac(double a) {
    SingleSiteMeasure m;
    m.kind = Kind::Dirac;
    m.a = a;
    m.validate();
    return m;
}

SingleSiteMeasure SingleSiteMeasure::bernoulli_mix(double pbar) {
    SingleSiteMeasure m;
    m.kind = Kind::BernoulliMix;
    m.pbar = pbar;
    m.validate();
    return m;
}

SingleSiteMeasure SingleSiteMeasure::phi4_radial(double g, double h) {
    SingleSiteMeasure m;
    m.kind = Kind::Phi4Radial;
    m.g = g;
    m.h = h;
    m.validate();
    return m;
}

void SingleSiteMeasure::validate() const {
    switch (kind) {
        case Kind::Dirac: require(a >= 0, ErrorKind::Domain, "Dirac location must be >= 0"); break;
        case Kind::BernoulliMix: require(pbar >= 0 && pbar <= 1, ErrorKind::Domain, "pbar must lie in [0,1]"); break;
        case Kind::Phi4Radial:
            require(g > 0 && std::isfinite(g) && std::isfinite(h), ErrorKind::Domain, "Phi4 radial measure needs g > 0");
            break;
    }
}

double GaugeDisorder::directed(const WeightedGraph& graph, int edge, int from) const {
    double w = omega[static_cast<std::size_t>(edge)];
    return graph.edge(edge).u == from ? w : -w;
}

double xy_energy(const WeightedGraph& graph, const SpinState& spins, const PercolationSample* disorder,
                 const GaugeDisorder* gauge) {
    check_spins(graph, spins.angles.size(), disorder, gauge);
    CompensatedSum sum;
    for (int e = 0; e < graph.edge_count(); ++e) {
        const auto& ed = graph.edge(e);
        const double occ = occupancy(graph, disorder, e);
        if (occ == 0 || ed.coupling == 0) continue;
        const double w = gauge ? gauge->omega[static_cast<std::size_t>(e)] : 0.0;
        sum.add(-ed.coupling * occ *
                std::cos(spins.angles[static_cast<std::size_t>(ed.u)] - spins.angles[static_cast<std::size_t>(ed.v)] - w));
    }
    return sum.value();
}

LocalField local_field(const WeightedGraph& graph, const SpinState& spins, int x, const PercolationSample* disorder,
                       const GaugeDisorder* gauge) {
    check_spins(graph, spins.angles.size(), disorder, gauge);
    require(x >= 0 && x < graph.vertex_count(), ErrorKind::Shape, "vertex out of range");
    double re = 0, im = 0;
    for (const auto& inc : graph.neighbours(x)) {
        const double j = graph.edge(inc.edge).coupling * occupancy(graph, disorder, inc.edge);
        if (j == 0) continue;
        const double phase = spins.angles[static_cast<std::size_t>(inc.vertex)] + (gauge ? gauge->directed(graph, inc.edge, x) : 0.0);
        re += j * std::cos(phase);
        im += j * std::sin(phase);
    }
    const double mag = std::hypot(re, im);
    return {mag, mag > 0 ? wrap_angle(std::atan2(im, re)) : 0.0};
}

double phi4_energy(const WeightedGraph& graph, const Phi4State& state, double beta, double g, double h) {
    require(g > 0, ErrorKind::Domain, "Phi4 energy needs g > 0");
    check_spins(graph, state.radii.size(), nullptr, nullptr);
    check_spins(graph, state.angles.size(), nullptr, nullptr);
    CompensatedSum sum;
    for (double r : state.radii) {
        require(r >= 0, ErrorKind::Domain, "radii must be >= 0");
        if (r == 0) return std::numeric_limits<double>::infinity();
        const double r2 = r * r;
        sum.add(g * r2 * r2);
        sum.add(h * r2);
        sum.add(-std::log(r));
    }
    for (const auto& e : graph.edges()) {
        sum.add(-beta * e.coupling * state.radii[static_cast<std::size_t>(e.u)] * state.radii[static_cast<std::size_t>(e.v)] *
                std::cos(state.angles[static_cast<std::size_t>(e.u)] - state.angles[static_cast<std::size_t>(e.v)]));
    }
    return sum.value();
}

double sample_von_mises(double kappa, Rng& rng) {
    constexpr double pi = kTwoPi / 2;
    if (kappa < 1e-12) return pi * (2 * rng.uniform() - 1);
    const double tau = 1 + std::sqrt(1 + 4 * kappa * kappa);
    const double rho = (tau - std::sqrt(2 * tau)) / (2 * kappa);
    const double r = (1 + rho * rho) / (2 * rho);
    while (true) {
        const double z = std::cos(pi * rng.uniform());
        const double f = (1 + r * z) / (r + z);
        const double c = kappa * (r - f);
        const double u2 = rng.uniform_positive();
        if (c * (2 - c) - u2 > 0 || std::log(c / u2) + 1 - c >= 0) {
            const double t = std::acos(std::max(-1.0, std::min(1.0, f)));
            return rng.uniform() < 0.5 ? -t : t;
        }
    }
}

GaugeDisorder sample_gauge(const WeightedGraph& graph, double beta1, double beta2, std::uint64_t seed) {
    require(beta1 >= 0 && beta2 >= 0, ErrorKind::Domain, "gauge temperatures must be >= 0");
    Rng rng(seed);
    GaugeDisorder out;
    out.omega.resize(static_cast<std::size_t>(graph.edge_count()));
    for (int e = 0; e < graph.edge_count(); ++e) {
        const double beta = graph.edge(e).cls == EdgeClass::Beta2 ? beta2 : beta1;
        out.omega[static_cast<std::size_t>(e)] = wrap_angle(sample_von_mises(beta, rng));
    }
    return out;
}

double lambda_n(double beta1, double beta2, int n) {
    require(beta1 > 0 && beta2 > 0, ErrorKind::Domain, "lambda_n needs positive temperatures");
    require(n >= 1, ErrorKind::Domain, "lambda_n needs n >= 1");
    const double r1 = bessel_ratio_I1_I0(beta1);
    const double r2 = bessel_ratio_I1_I0(beta2);
    return r1 * r1 * std::pow(r2, n - 1);
}

}  // namespace quenchxy
