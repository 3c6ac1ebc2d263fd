#include "quenchxy/dual_height.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "quenchxy/bessel.hpp"
#include "quenchxy/error.hpp"
#include "quenchxy/parallel.hpp"
#include "quenchxy/rng.hpp"

namespace quenchxy {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

std::pair<double, double> multiplicities(DualEdgeType type, int n) {
    return type == DualEdgeType::Type1 ? std::pair{2.0, n - 1.0} : std::pair{4.0, 2.0 * n - 2.0};
}

void check_parameters(int n, double beta1, double beta2) {
    require(n >= 1, ErrorKind::Domain, "n must be >= 1");
    require(beta1 > 0 && beta1 <= 50 && beta2 > 0 && beta2 <= 50, ErrorKind::Domain,
            "beta1 and beta2 must lie in (0, 50]");
}

double potential_unchecked(DualEdgeType type, int n, double beta1, double beta2, std::int64_t k) {
    const auto [m1, m2] = multiplicities(type, n);
    const int a = static_cast<int>(k < 0 ? -k : k);
    double v = -m1 * log_bessel_I(a, 2 * beta1);
    if (m2 > 0) v -= m2 * log_bessel_I(a, 2 * beta2);
    return v;
}

double ratio_I0_I1(double beta) { return 1.0 / bessel_ratio_I1_I0(2 * beta); }

// Root of I0/I1(2 beta) = target; the ratio decreases from infinity to 1.
double solve_ratio(double target) {
    double lo = 1e-8, hi = 1e6;
    require(ratio_I0_I1(lo) > target && ratio_I0_I1(hi) < target, ErrorKind::Numeric, "threshold bracket failed");
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ratio_I0_I1(mid) > target ? lo : hi) = mid;
    }
    const double root = 0.5 * (lo + hi);
    require(std::abs(ratio_I0_I1(root) - target) <= 1e-8, ErrorKind::Numeric, "threshold bisection did not converge");
    return root;
}

}  // namespace

double potential_V(DualEdgeType type, int n, double beta1, double beta2, std::int64_t k) {
    check_parameters(n, beta1, beta2);
    require(k >= -50 && k <= 50, ErrorKind::Domain, "|k| must be <= 50");
    return potential_unchecked(type, n, beta1, beta2, k);
}

DualPotential DualPotential::build(DualEdgeType type, int n, double beta1, double beta2, int k_max) {
    check_parameters(n, beta1, beta2);
    require(k_max >= 1, ErrorKind::Domain, "k_max must be >= 1");
    DualPotential p{type, n, beta1, beta2, {}};
    p.values.reserve(static_cast<std::size_t>(k_max) + 1);
    for (int k = 0; k <= k_max; ++k) p.values.push_back(potential_unchecked(type, n, beta1, beta2, k));
    return p;
}

double DualPotential::operator()(std::int64_t k) const {
    const std::uint64_t a = static_cast<std::uint64_t>(k < 0 ? -k : k);
    if (a < values.size()) return values[a];
    return potential_unchecked(type, n, beta1, beta2, static_cast<std::int64_t>(a));
}

double DualPotential::convexity_margin() const {
    double m = std::numeric_limits<double>::infinity();
    const std::int64_t K = static_cast<std::int64_t>(values.size()) - 1;
    for (std::int64_t k = 0; k < K; ++k) m = std::min(m, (*this)(k - 1) + (*this)(k + 1) - 2 * (*this)(k));
    return m;
}

LammersRecord lammers_check(int n, double beta1, double beta2) {
    check_parameters(n, beta1, beta2);
    LammersRecord r;
    r.n = n;
    r.beta1 = beta1;
    r.beta2 = beta2;
    r.ratio1 = ratio_I0_I1(beta1);
    r.ratio2 = ratio_I0_I1(beta2);
    // V(1) - V(0) = m1 ln(I0/I1)(2 beta1) + m2 ln(I0/I1)(2 beta2)
    const double l1 = std::log(r.ratio1), l2 = std::log(r.ratio2);
    r.type1_margin = kLn2 - (2 * l1 + (n - 1) * l2);
    r.type2_margin = kLn2 - (4 * l1 + (2.0 * n - 2) * l2);
    r.type1_ok = r.type1_margin >= 0;
    r.type2_ok = r.type2_margin >= 0;
    const bool first = r.ratio1 <= std::pow(2.0, 0.125);
    const bool second = n == 1 || r.ratio2 <= std::exp(1.0 / (4.0 * (n - 1)));
    r.surrogate_ok = first && second;
    const double beta2_part = n == 1 ? 0.0 : 0.25;
    r.surrogate_type1_margin = kLn2 - (kLn2 / 4 + beta2_part);
    r.surrogate_type2_margin = kLn2 - (kLn2 / 2 + 2 * beta2_part);
    return r;
}

double threshold_beta1() { return solve_ratio(std::pow(2.0, 0.125)); }

double threshold_beta2(int n) {
    require(n >= 2, ErrorKind::Domain, "threshold_beta2 needs n >= 2");
    return solve_ratio(std::exp(1.0 / (4.0 * (n - 1))));
}

void write_lammers_csv(std::ostream& out, const std::vector<LammersRecord>& rows) {
    out << "n,beta1,beta2,type1_margin,type2_margin,type1_ok,type2_ok,ratio1,ratio2,surrogate_ok,"
           "surrogate_type1_margin,surrogate_type2_margin\n";
    out.precision(17);
    for (const auto& r : rows)
        out << r.n << ',' << r.beta1 << ',' << r.beta2 << ',' << r.type1_margin << ',' << r.type2_margin << ','
            << r.type1_ok << ',' << r.type2_ok << ',' << r.ratio1 << ',' << r.ratio2 << ',' << r.surrogate_ok << ','
            << r.surrogate_type1_margin << ',' << r.surrogate_type2_margin << '\n';
}

HeightModel::HeightModel(DualGraph dual, int n, double beta1, double beta2)
    : dual_(std::move(dual)),
      type1_(DualPotential::build(DualEdgeType::Type1, n, beta1, beta2)),
      type2_(DualPotential::build(DualEdgeType::Type2, n, beta1, beta2)),
      adjacency_(dual_.adjacency()) {
    for (const auto& f : dual_.faces)
        if (!f.touches_outer) free_.push_back(f.id);
}

HeightState HeightModel::initial_state() const {
    HeightState s;
    s.h.assign(dual_.faces.size(), 0);
    s.pinned.resize(dual_.faces.size());
    for (const auto& f : dual_.faces) s.pinned[static_cast<std::size_t>(f.id)] = f.touches_outer;
    return s;
}

double HeightModel::energy(const HeightState& s) const {
    double e = 0;
    for (const auto& de : dual_.dual_edges)
        e += potential(de.type)(s.h[static_cast<std::size_t>(de.u)] - s.h[static_cast<std::size_t>(de.v)]);
    return e;
}

std::vector<double> HeightModel::conditional_law(const HeightState& s, int face, std::int64_t& k0) const {
    const auto& nb = adjacency_[static_cast<std::size_t>(face)];
    auto local = [&](std::int64_t k) {
        double e = 0;
        for (const auto& inc : nb)
            e += potential(dual_.dual_edges[static_cast<std::size_t>(inc.edge)].type)(
                k - s.h[static_cast<std::size_t>(inc.vertex)]);
        return e;
    };
    if (nb.empty()) fail(ErrorKind::Topology, "face without neighbours has no normalizable law");
    // A sum of convex even functions of k - h_y is minimized between the neighbour extremes.
    std::int64_t lo = std::numeric_limits<std::int64_t>::max(), hi = std::numeric_limits<std::int64_t>::min();
    for (const auto& inc : nb) {
        lo = std::min(lo, s.h[static_cast<std::size_t>(inc.vertex)]);
        hi = std::max(hi, s.h[static_cast<std::size_t>(inc.vertex)]);
    }
    constexpr std::int64_t kMaxWindow = 1000000;
    require(hi - lo <= kMaxWindow, ErrorKind::Precision, "height window overflow");
    std::vector<double> e;
    for (std::int64_t k = lo; k <= hi; ++k) e.push_back(local(k));
    const double emin = *std::min_element(e.begin(), e.end());
    const double cut = -std::log(1e-12);
    // Past the window edge the log-weights drop at least linearly with slope d, so
    // the remaining tail is at most w e^{-d} / (1 - e^{-d}).
    auto tail_small = [&](double last, double slope) {
        if (slope <= 0) return false;
        const double w = std::exp(-(last - emin));
        return w * std::exp(-slope) / -std::expm1(-slope) < 1e-12 || last - emin > cut + 50;
    };
    std::vector<double> left;
    for (std::int64_t k = lo - 1;; --k) {
        const double prev = left.empty() ? e.front() : left.back();
        const double cur = local(k);
        left.push_back(cur);
        if (tail_small(cur, cur - prev)) break;
        require(static_cast<std::int64_t>(left.size() + e.size()) <= kMaxWindow, ErrorKind::Precision,
                "height window overflow");
    }
    for (std::int64_t k = hi + 1;; ++k) {
        const double prev = e.back();
        const double cur = local(k);
        e.push_back(cur);
        if (tail_small(cur, cur - prev)) break;
        require(static_cast<std::int64_t>(left.size() + e.size()) <= kMaxWindow, ErrorKind::Precision,
                "height window overflow");
    }
    std::vector<double> w;
    w.reserve(left.size() + e.size());
    for (auto it = left.rbegin(); it != left.rend(); ++it) w.push_back(std::exp(-(*it - emin)));
    for (double v : e) w.push_back(std::exp(-(v - emin)));
    k0 = lo - static_cast<std::int64_t>(left.size());
    return w;
}

void HeightModel::sweep(HeightState& s, Rng& rng) const {
    for (int f : free_) {
        std::int64_t k0 = 0;
        const auto w = conditional_law(s, f, k0);
        double total = 0;
        for (double x : w) total += x;
        double u = rng.uniform() * total;
        std::size_t i = 0;
        for (; i + 1 < w.size(); ++i) {
            u -= w[i];
            if (u < 0) break;
        }
        s.h[static_cast<std::size_t>(f)] = k0 + static_cast<std::int64_t>(i);
    }
}

DelocalizationResult delocalization_experiment(int n, double beta1, double beta2, const std::vector<std::int64_t>& sizes,
                                               const ChainSchedule& schedule, unsigned workers) {
    schedule.validate();
    require(!sizes.empty(), ErrorKind::Domain, "no sizes given");
    for (auto L : sizes) require(L >= 1, ErrorKind::Shape, "sizes must be >= 1");
    const auto lam = lammers_check(n, beta1, beta2);
    DelocalizationResult out;
    out.exploratory = !(lam.type1_ok && lam.type2_ok);
    out.rows.resize(sizes.size());
    parallel_for(sizes.size(), workers, [&](std::size_t i) {
        const std::int64_t L = sizes[i];
        HeightModel model(build_dual_graph(build_extended_triangulation(L, n, beta1, beta2)), n, beta1, beta2);
        const int origin = model.dual().origin_face;
        require(origin >= 0, ErrorKind::Topology, "origin face missing");
        Rng rng(derive_seed(schedule.seed, "height", static_cast<std::uint64_t>(L)));
        HeightState s = model.initial_state();
        for (std::int64_t t = 0; t < schedule.thermalization; ++t) model.sweep(s, rng);
        std::vector<double> series;
        for (std::int64_t t = 0; t < schedule.measurement; ++t) {
            model.sweep(s, rng);
            if ((t + 1) % schedule.measure_every == 0)
                series.push_back(static_cast<double>(std::abs(s.h[static_cast<std::size_t>(origin)])));
        }
        auto& row = out.rows[i];
        row.L = L;
        row.faces = model.dual().face_count();
        row.free_faces = static_cast<int>(model.free_faces().size());
        row.abs_height = estimate_series(series);
        row.abs_height.tau_int *= static_cast<double>(schedule.measure_every);
    });

    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& r : out.rows) {
        const double sigma = std::max(r.abs_height.std_error, 1e-12);
        const double w = 1 / (sigma * sigma), x = std::log(static_cast<double>(r.L)), y = r.abs_height.mean;
        sw += w;
        sx += w * x;
        sy += w * y;
        sxx += w * x * x;
        sxy += w * x * y;
    }
    const double det = sw * sxx - sx * sx;
    if (out.rows.size() >= 2 && det > 0) {
        out.trend_slope = (sw * sxy - sx * sy) / det;
        out.trend_z = out.trend_slope / std::sqrt(sw / det);
    }
    for (std::size_t i = 1; i < out.rows.size(); ++i) {
        const auto& a = out.rows[i - 1].abs_height;
        const auto& b = out.rows[i].abs_height;
        if (b.mean < a.mean - 3 * std::hypot(a.std_error, b.std_error)) out.nondecreasing = false;
    }
    return out;
}

void write_delocalization_csv(std::ostream& out, const DelocalizationResult& result) {
    out << "L,faces,free_faces,mean_abs_height,std_error,tau_int,n_samples,exploratory,trend_slope,trend_z,"
           "nondecreasing\n";
    out.precision(17);
    for (const auto& r : result.rows)
        out << r.L << ',' << r.faces << ',' << r.free_faces << ',' << r.abs_height.mean << ','
            << r.abs_height.std_error << ',' << r.abs_height.tau_int << ',' << r.abs_height.n_samples << ','
            << result.exploratory << ',' << result.trend_slope << ',' << result.trend_z << ','
            << result.nondecreasing << '\n';
}

}  // namespace quenchxy
