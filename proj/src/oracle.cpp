#include "quenchxy/oracle.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "quenchxy/error.hpp"
#include "quenchxy/parallel.hpp"

namespace quenchxy {

void QuadratureSpec::validate() const {
    require(grid >= 16, ErrorKind::Domain, "quadrature grid must have at least 16 points");
    require(max_free_spins >= 1 && max_free_spins <= 5, ErrorKind::Domain, "max free spins must lie in [1,5]");
    require(radial_nodes >= 8, ErrorKind::Domain, "radial nodes must be >= 8");
}

namespace {

using cplx = std::complex<double>;

struct Factor {
    std::vector<int> vars;  // sorted
    std::vector<cplx> table;  // row-major over vars, each of size G
};

int find_root(std::vector<int>& parent, int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    return x;
}

// Eliminates every free variable; returns the product of the remaining scalars.
cplx eliminate_all(std::vector<Factor> factors, int n, const std::vector<bool>& free_var, int G, int max_width) {
    std::vector<bool> alive = free_var;
    const double inv_g = 1.0 / G;
    int remaining = static_cast<int>(std::count(alive.begin(), alive.end(), true));
    while (remaining > 0) {
        int best = -1;
        std::vector<int> best_nbrs;
        for (int v = 0; v < n; ++v) {
            if (!alive[static_cast<std::size_t>(v)]) continue;
            std::vector<int> nb;
            for (const auto& f : factors)
                if (std::binary_search(f.vars.begin(), f.vars.end(), v))
                    for (int w : f.vars)
                        if (w != v) nb.push_back(w);
            std::sort(nb.begin(), nb.end());
            nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
            if (best < 0 || nb.size() < best_nbrs.size()) {
                best = v;
                best_nbrs = std::move(nb);
            }
        }
        const int w = static_cast<int>(best_nbrs.size());
        if (w > max_width)
            fail(ErrorKind::Size, "quadrature needs a table over " + std::to_string(w) + " free spins (limit " +
                                      std::to_string(max_width) + ")");
        std::vector<Factor> involved, rest;
        for (auto& f : factors)
            (std::binary_search(f.vars.begin(), f.vars.end(), best) ? involved : rest).push_back(std::move(f));

        // Union order: neighbours (row-major), then the eliminated variable innermost.
        std::vector<int> uni = best_nbrs;
        uni.push_back(best);
        const std::size_t k = involved.size();
        std::vector<std::vector<std::size_t>> strides(k, std::vector<std::size_t>(uni.size(), 0));
        for (std::size_t fi = 0; fi < k; ++fi) {
            const auto& vars = involved[fi].vars;
            std::size_t s = 1;
            for (int j = static_cast<int>(vars.size()) - 1; j >= 0; --j) {
                auto pos = std::find(uni.begin(), uni.end(), vars[static_cast<std::size_t>(j)]) - uni.begin();
                strides[fi][static_cast<std::size_t>(pos)] = s;
                s *= static_cast<std::size_t>(G);
            }
        }
        Factor out;
        out.vars = best_nbrs;
        std::size_t out_size = 1;
        for (int j = 0; j < w; ++j) out_size *= static_cast<std::size_t>(G);
        out.table.assign(out_size, cplx(0, 0));
        std::vector<int> idx(static_cast<std::size_t>(w), 0);
        std::vector<std::size_t> base(k, 0);
        std::vector<const cplx*> ptr(k);
        std::vector<std::size_t> inner(k);
        for (std::size_t fi = 0; fi < k; ++fi) inner[fi] = strides[fi][static_cast<std::size_t>(w)];
        for (std::size_t o = 0; o < out_size; ++o) {
            for (std::size_t fi = 0; fi < k; ++fi) ptr[fi] = involved[fi].table.data() + base[fi];
            cplx acc(0, 0);
            for (int t = 0; t < G; ++t) {
                cplx prod = *ptr[0];
                ptr[0] += inner[0];
                for (std::size_t fi = 1; fi < k; ++fi) {
                    prod *= *ptr[fi];
                    ptr[fi] += inner[fi];
                }
                acc += prod;
            }
            out.table[o] = acc * inv_g;
            for (int j = w - 1; j >= 0; --j) {
                for (std::size_t fi = 0; fi < k; ++fi) base[fi] += strides[fi][static_cast<std::size_t>(j)];
                if (++idx[static_cast<std::size_t>(j)] < G) break;
                for (std::size_t fi = 0; fi < k; ++fi) base[fi] -= strides[fi][static_cast<std::size_t>(j)] * static_cast<std::size_t>(G);
                idx[static_cast<std::size_t>(j)] = 0;
            }
        }
        rest.push_back(std::move(out));
        factors = std::move(rest);
        alive[static_cast<std::size_t>(best)] = false;
        --remaining;
    }
    cplx result(1, 0);
    for (const auto& f : factors) result *= f.table.at(0);
    return result;
}

}  // namespace

AngleQuadrature angle_model_quadrature(int n, const std::vector<AngleBond>& bonds, const std::vector<int>& m,
                                       const QuadratureSpec& spec) {
    spec.validate();
    require(n >= 1, ErrorKind::Shape, "need at least one angle");
    require(m.size() == static_cast<std::size_t>(n), ErrorKind::Shape, "observable length mismatch");
    const int G = spec.grid;
    std::vector<int> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    double offset = 0;
    for (const auto& b : bonds) {
        require(b.u >= 0 && b.u < n && b.v >= 0 && b.v < n && b.u != b.v, ErrorKind::Shape, "bad bond");
        require(b.J >= 0 && std::isfinite(b.J), ErrorKind::Domain, "bond couplings must be finite and >= 0");
        if (b.J == 0) continue;
        offset += b.J;
        int a = find_root(parent, b.u), c = find_root(parent, b.v);
        if (a != c) parent[static_cast<std::size_t>(std::max(a, c))] = std::min(a, c);
    }
    std::vector<bool> free_var(static_cast<std::size_t>(n), true);
    std::vector<long long> charge(static_cast<std::size_t>(n), 0);
    for (int v = 0; v < n; ++v) {
        int r = find_root(parent, v);
        if (r == v) free_var[static_cast<std::size_t>(v)] = false;  // smallest id of its component
        charge[static_cast<std::size_t>(r)] += m[static_cast<std::size_t>(v)];
    }
    const bool neutral = std::all_of(charge.begin(), charge.end(), [](long long c) { return c == 0; });

    std::vector<double> cos_grid(static_cast<std::size_t>(G)), sin_grid(static_cast<std::size_t>(G));
    for (int t = 0; t < G; ++t) {
        cos_grid[static_cast<std::size_t>(t)] = std::cos(kTwoPi * t / G);
        sin_grid[static_cast<std::size_t>(t)] = std::sin(kTwoPi * t / G);
    }
    auto angle = [&](int t) { return kTwoPi * t / G; };

    std::vector<Factor> base;
    for (const auto& b : bonds) {
        if (b.J == 0) continue;
        const bool fu = free_var[static_cast<std::size_t>(b.u)], fv = free_var[static_cast<std::size_t>(b.v)];
        Factor f;
        if (fu && fv) {
            f.vars = {std::min(b.u, b.v), std::max(b.u, b.v)};
            f.table.resize(static_cast<std::size_t>(G) * static_cast<std::size_t>(G));
            for (int i = 0; i < G; ++i)
                for (int j = 0; j < G; ++j) {
                    // i indexes the smaller id
                    double tu = angle(b.u < b.v ? i : j), tv = angle(b.u < b.v ? j : i);
                    f.table[static_cast<std::size_t>(i) * static_cast<std::size_t>(G) + static_cast<std::size_t>(j)] =
                        std::exp(b.J * (std::cos(tu - tv - b.omega) - 1));
                }
        } else if (fu || fv) {
            const int var = fu ? b.u : b.v;
            f.vars = {var};
            f.table.resize(static_cast<std::size_t>(G));
            for (int i = 0; i < G; ++i) {
                double tu = fu ? angle(i) : 0.0, tv = fv ? angle(i) : 0.0;
                f.table[static_cast<std::size_t>(i)] = std::exp(b.J * (std::cos(tu - tv - b.omega) - 1));
            }
        } else {
            f.table = {std::exp(b.J * (std::cos(-b.omega) - 1))};
        }
        base.push_back(std::move(f));
    }

    const cplx z = eliminate_all(base, n, free_var, G, spec.max_free_spins);
    require(z.real() > 0 && std::isfinite(z.real()), ErrorKind::Precision, "partition function underflowed");
    AngleQuadrature out{cplx(0, 0), std::log(z.real()) + offset};
    if (!neutral) return out;
    bool trivial = true;
    for (int v = 0; v < n; ++v)
        if (m[static_cast<std::size_t>(v)] != 0 && free_var[static_cast<std::size_t>(v)]) trivial = false;
    if (trivial) {
        out.expectation = cplx(1, 0);
        return out;
    }
    auto with_obs = base;
    for (int v = 0; v < n; ++v) {
        const int mv = m[static_cast<std::size_t>(v)];
        if (mv == 0 || !free_var[static_cast<std::size_t>(v)]) continue;
        Factor f;
        f.vars = {v};
        f.table.resize(static_cast<std::size_t>(G));
        for (int i = 0; i < G; ++i) {
            long long k = ((static_cast<long long>(mv) * i) % G + G) % G;
            f.table[static_cast<std::size_t>(i)] = cplx(cos_grid[static_cast<std::size_t>(k)], sin_grid[static_cast<std::size_t>(k)]);
        }
        with_obs.push_back(std::move(f));
    }
    out.expectation = eliminate_all(std::move(with_obs), n, free_var, G, spec.max_free_spins) / z.real();
    return out;
}

std::vector<AngleBond> xy_bonds(const WeightedGraph& graph, const PercolationSample* disorder,
                                const GaugeDisorder* gauge) {
    if (gauge)
        require(gauge->omega.size() == static_cast<std::size_t>(graph.edge_count()), ErrorKind::Shape,
                "gauge disorder does not match the graph");
    std::vector<AngleBond> bonds;
    for (int e = 0; e < graph.edge_count(); ++e) {
        const auto& ed = graph.edge(e);
        const double j = ed.coupling * occupancy(graph, disorder, e);
        bonds.push_back({ed.u, ed.v, j, gauge ? gauge->omega[static_cast<std::size_t>(e)] : 0.0});
    }
    return bonds;
}

double xy_expectation_quadrature(const WeightedGraph& graph, const std::vector<int>& m,
                                 const PercolationSample* disorder, const GaugeDisorder* gauge,
                                 const QuadratureSpec& spec) {
    return angle_model_quadrature(graph.vertex_count(), xy_bonds(graph, disorder, gauge), m, spec).expectation.real();
}

double xy_two_point_quadrature(const WeightedGraph& graph, int x, int y, const PercolationSample* disorder,
                               const GaugeDisorder* gauge, const QuadratureSpec& spec) {
    std::vector<int> m(static_cast<std::size_t>(graph.vertex_count()), 0);
    if (x == y) return 1.0;
    m.at(static_cast<std::size_t>(x)) = 1;
    m.at(static_cast<std::size_t>(y)) = -1;
    return xy_expectation_quadrature(graph, m, disorder, gauge, spec);
}

double xy_log_partition(const WeightedGraph& graph, const PercolationSample* disorder, const GaugeDisorder* gauge,
                        const QuadratureSpec& spec) {
    std::vector<int> m(static_cast<std::size_t>(graph.vertex_count()), 0);
    return angle_model_quadrature(graph.vertex_count(), xy_bonds(graph, disorder, gauge), m, spec).log_partition;
}

double p_zero(double pbar, double beta, int d) {
    require(pbar > 0 && pbar < 1, ErrorKind::Domain, "pbar must lie in (0,1)");
    require(beta >= 0 && d >= 1, ErrorKind::Domain, "need beta >= 0 and d >= 1");
    return pbar / (pbar + (1 - pbar) * std::exp(-2.0 * d * beta));
}

namespace {

// Radius beyond which r^k e^{-g r^4 - h r^2} is negligible for k <= 100.
double radial_cutoff(double g, double h) {
    double r = 1.0;
    while (g * r * r * r * r + h * r * r - 101 * std::log(r + 1) < 120) r += 0.05;
    return r;
}

double gk_integrate(const std::function<double(double)>& f, double a, double b, double* l1) {
    double err = 0;
    double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-14, &err, l1);
    require(err <= 1e-9 * std::max(*l1, 1e-300), ErrorKind::Precision, "radial quadrature did not converge");
    return value;
}

}  // namespace

namespace {

RadialIntegral radial_integral_from(double g, double h, double lower, const std::function<double(double)>& f) {
    require(g > 0, ErrorKind::Domain, "Phi4 radial measure needs g > 0");
    const double cut = radial_cutoff(g, h);
    // shift the exponent by its minimum so the density stays O(1)
    double shift = 0;
    if (h < 0) shift = h * h / (4 * g);
    auto density = [&](double r) { return r * std::exp(-g * r * r * r * r - h * r * r - shift); };
    double l1 = 0, l1_norm = 0;
    const double norm = gk_integrate(density, 0, cut, &l1_norm);
    if (lower >= cut) return {0.0, 0.0};
    const double value = gk_integrate([&](double r) { return density(r) * f(r); }, lower, cut, &l1);
    return {value / norm, l1 / norm};
}

}  // namespace

RadialIntegral phi4_radial_integral(double g, double h, const std::function<double(double)>& f) {
    return radial_integral_from(g, h, 0.0, f);
}

WellsConditionResult wells_condition_check(const SingleSiteMeasure& kappa, double a, int m_max, int n_max,
                                           int total_max) {
    kappa.validate();
    require(a >= 0, ErrorKind::Domain, "a must be >= 0");
    require(m_max >= 0 && n_max >= 0, ErrorKind::Domain, "moment orders must be >= 0");
    WellsConditionResult res;
    res.min_margin = std::numeric_limits<double>::infinity();
    for (int m = 0; m <= m_max; ++m)
        for (int n = 0; n <= n_max; ++n) {
            if (total_max >= 0 && m + n > total_max) continue;
            double value = 0, tolerance_scale = 1;
            switch (kappa.kind) {
                case SingleSiteMeasure::Kind::BernoulliMix: {
                    const double pb = kappa.pbar;
                    value = (n % 2 ? -1.0 : 1.0) * (1 - pb) * std::pow(a, m + n) + pb * std::pow(1 + a, m) * std::pow(1 - a, n);
                    break;
                }
                case SingleSiteMeasure::Kind::Dirac:
                    value = std::pow(kappa.a + a, m) * std::pow(kappa.a - a, n);
                    break;
                case SingleSiteMeasure::Kind::Phi4Radial: {
                    auto r = phi4_radial_integral(kappa.g, kappa.h,
                                                  [&](double x) { return std::pow(x + a, m) * std::pow(x - a, n); });
                    tolerance_scale = r.abs_value;
                    value = r.value / std::max(r.abs_value, 1e-300);
                    break;
                }
            }
            (void)tolerance_scale;
            if (value < res.min_margin) {
                res.min_margin = value;
                res.worst_m = m;
                res.worst_n = n;
            }
            if (value < -1e-12) res.holds = false;
        }
    return res;
}

double wells_a(const SingleSiteMeasure& kappa) {
    kappa.validate();
    switch (kappa.kind) {
        case SingleSiteMeasure::Kind::BernoulliMix:
            require(kappa.pbar > 0, ErrorKind::Domain, "kappa is the Dirac mass at 0");
            return std::min(kappa.pbar, 0.5);
        case SingleSiteMeasure::Kind::Dirac:
            require(kappa.a > 0, ErrorKind::Domain, "kappa is the Dirac mass at 0");
            return kappa.a;
        case SingleSiteMeasure::Kind::Phi4Radial: break;
    }
    // a = eps*delta/(eps+1) with eps just below kappa([delta, inf)), delta, eps in (0,1).
    std::vector<std::pair<double, double>> candidates;  // (a, delta)
    for (int k = 1; k < 200; ++k) {
        const double delta = k / 200.0;
        const double tail = radial_integral_from(kappa.g, kappa.h, delta, [](double) { return 1.0; }).value;
        const double eps = std::min(tail, 1.0) * (1 - 1e-9);
        if (eps <= 0) continue;
        candidates.emplace_back(eps * delta / (eps + 1), delta);
    }
    std::sort(candidates.begin(), candidates.end(), [](auto& x, auto& y) { return x.first > y.first; });
    for (const auto& [a, delta] : candidates)
        if (wells_condition_check(kappa, a, 40, 40, 40).holds) return a;
    fail(ErrorKind::Numeric, "no grid value of a passed the moment condition");
}

namespace {

struct ConfigQuadrature {
    double log_z;
    double expectation;
};

std::vector<ConfigQuadrature> enumerate_configs(const WeightedGraph& graph, const std::vector<int>& m,
                                                const QuadratureSpec& spec, unsigned workers) {
    const int n = graph.vertex_count();
    require(n <= 9, ErrorKind::Size, "enumeration is limited to 9 sites");
    std::vector<ConfigQuadrature> out(std::size_t{1} << n);
    parallel_for(out.size(), workers, [&](std::size_t mask) {
        PercolationSample r;
        r.kind = PercolationKind::Site;
        r.occupation.resize(static_cast<std::size_t>(n));
        for (int x = 0; x < n; ++x) r.occupation[static_cast<std::size_t>(x)] = (mask >> x) & 1u;
        auto q = angle_model_quadrature(n, xy_bonds(graph, &r, nullptr), m, spec);
        out[mask] = {q.log_partition, q.expectation.real()};
    });
    return out;
}

NuPrimeDistribution build_nu(const WeightedGraph& graph, double beta, double pbar,
                             const std::vector<ConfigQuadrature>& configs) {
    require(pbar > 0 && pbar < 1, ErrorKind::Domain, "pbar must lie in (0,1)");
    const int n = graph.vertex_count();
    NuPrimeDistribution nu;
    nu.sites = n;
    nu.beta = beta;
    nu.pbar = pbar;
    nu.log_z.resize(configs.size());
    std::vector<double> logw(configs.size());
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t mask = 0; mask < configs.size(); ++mask) {
        const int open = std::popcount(mask);
        nu.log_z[mask] = configs[mask].log_z;
        logw[mask] = open * std::log(pbar) + (n - open) * std::log1p(-pbar) + configs[mask].log_z;
        mx = std::max(mx, logw[mask]);
    }
    double total = 0;
    nu.weights.resize(configs.size());
    for (std::size_t mask = 0; mask < configs.size(); ++mask) total += nu.weights[mask] = std::exp(logw[mask] - mx);
    for (auto& w : nu.weights) w /= total;
    return nu;
}

}  // namespace

NuPrimeDistribution nu_prime_enumerate(const SiteRect& box, double beta, double pbar, const QuadratureSpec& spec,
                                       unsigned workers) {
    require(beta >= 0, ErrorKind::Domain, "beta must be >= 0");
    const auto graph = build_rect_lattice(box, beta);
    std::vector<int> zero(static_cast<std::size_t>(graph.vertex_count()), 0);
    return build_nu(graph, beta, pbar, enumerate_configs(graph, zero, spec, workers));
}

DominationResult domination_check(const NuPrimeDistribution& nu, double p0) {
    require(nu.sites >= 1 && nu.weights.size() == (std::size_t{1} << nu.sites), ErrorKind::Shape, "malformed distribution");
    DominationResult res;
    for (int x = 0; x < nu.sites; ++x) {
        const std::uint32_t bit = 1u << x;
        for (std::uint32_t mask = 0; mask < nu.weights.size(); ++mask) {
            if (mask & bit) continue;
            const double w0 = nu.weights[mask], w1 = nu.weights[mask | bit];
            require(w0 > 0 && w1 > 0, ErrorKind::Domain, "distribution must be strictly positive");
            const double c = w1 / (w0 + w1);
            if (c > res.max_conditional || res.argmax_site < 0) {
                res.max_conditional = c;
                res.argmax_site = x;
                res.argmax_config = mask;
            }
        }
    }
    res.holds = res.max_conditional <= p0 + 1e-12;
    return res;
}

WellsInequalityRecord verify_wells_inequality(const SiteRect& box, double beta, double pbar, const std::vector<int>& m,
                                              const QuadratureSpec& spec, unsigned workers) {
    require(beta >= 0, ErrorKind::Domain, "beta must be >= 0");
    const auto graph = build_rect_lattice(box, beta);
    const int n = graph.vertex_count();
    require(m.size() == static_cast<std::size_t>(n), ErrorKind::Shape, "observable must be supported in the box");
    WellsInequalityRecord rec;
    rec.a = wells_a(SingleSiteMeasure::bernoulli_mix(pbar));
    const auto scaled = build_rect_lattice(box, rec.a * rec.a * beta);
    rec.lhs = xy_expectation_quadrature(scaled, m, nullptr, nullptr, spec);
    int support = 0;
    for (int v : m) support += v != 0;
    rec.lhs_weighted = std::pow(rec.a, support) * rec.lhs;
    const auto configs = enumerate_configs(graph, m, spec, workers);
    const auto nu = build_nu(graph, beta, pbar, configs);
    double rhs = 0;
    for (std::size_t mask = 0; mask < configs.size(); ++mask) rhs += nu.weights[mask] * configs[mask].expectation;
    rec.rhs = rhs;
    rec.holds = rec.lhs <= rec.rhs + 1e-10;
    return rec;
}

double phi4_expectation_quadrature(const WeightedGraph& graph, double beta, double g, double h, Phi4Observable obs,
                                   int x, int y, const QuadratureSpec& spec) {
    spec.validate();
    require(g > 0, ErrorKind::Domain, "Phi4 needs g > 0");
    require(beta >= 0, ErrorKind::Domain, "beta must be >= 0");
    const int n = graph.vertex_count();
    require(n >= 1 && n <= 3, ErrorKind::Size, "Phi4 quadrature handles at most 3 sites");
    require(x >= 0 && x < n, ErrorKind::Shape, "vertex out of range");
    if (obs == Phi4Observable::Dot) require(y >= 0 && y < n, ErrorKind::Shape, "vertex out of range");
    const int G = spec.grid;
    const int R = spec.radial_nodes;

    double jmax = 0;
    std::vector<int> deg(static_cast<std::size_t>(n), 0);
    for (const auto& e : graph.edges()) {
        jmax = std::max(jmax, beta * e.coupling);
        ++deg[static_cast<std::size_t>(e.u)];
        ++deg[static_cast<std::size_t>(e.v)];
    }
    const double heff = h - jmax * *std::max_element(deg.begin(), deg.end());
    double rmax = 1.0;
    while (g * std::pow(rmax, 4) + heff * rmax * rmax - 3 * std::log(rmax + 1) < 80) rmax += 0.05;

    // Gauss-Legendre on [0, rmax] via the Legendre zeros.
    std::vector<double> nodes, logw;
    {
        auto zeros = boost::math::legendre_p_zeros<double>(R);
        std::vector<double> xs;
        for (double z : zeros) {
            xs.push_back(z);
            if (z != 0) xs.push_back(-z);
        }
        std::sort(xs.begin(), xs.end());
        for (double z : xs) {
            const double dp = boost::math::legendre_p_prime<double>(R, z);
            const double w = 2.0 / ((1 - z * z) * dp * dp);
            const double r = 0.5 * rmax * (z + 1);
            nodes.push_back(r);
            logw.push_back(std::log(0.5 * rmax * w) + std::log(r) - g * r * r * r * r - h * r * r);
        }
    }
    const int K = static_cast<int>(nodes.size());

    std::vector<double> cosg(static_cast<std::size_t>(G));
    for (int t = 0; t < G; ++t) cosg[static_cast<std::size_t>(t)] = std::cos(kTwoPi * t / G);

    struct E {
        int u, v;
        double c;
    };
    std::vector<E> edges;
    for (const auto& e : graph.edges())
        if (beta * e.coupling > 0) edges.push_back({e.u, e.v, beta * e.coupling});

    // Tuple loop; angles: vertex 0 pinned, others on the grid.
    std::vector<int> ri(static_cast<std::size_t>(n), 0);
    std::size_t tuples = 1;
    for (int i = 0; i < n; ++i) tuples *= static_cast<std::size_t>(K);

    auto tuple_log = [&](std::size_t t, std::vector<double>& rad) {
        double lw = 0;
        for (int i = n - 1; i >= 0; --i) {
            std::size_t k = t % static_cast<std::size_t>(K);
            t /= static_cast<std::size_t>(K);
            rad[static_cast<std::size_t>(i)] = nodes[k];
            lw += logw[k];
        }
        for (const auto& e : edges) lw += e.c * rad[static_cast<std::size_t>(e.u)] * rad[static_cast<std::size_t>(e.v)];
        return lw;
    };
    std::vector<double> rad(static_cast<std::size_t>(n));
    double shift = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < tuples; ++t) shift = std::max(shift, tuple_log(t, rad));

    // On a forest the angle integral factorizes over edges, and <cos(theta_x - theta_y)>
    // is the product of per-edge ratios along the path from x to y.
    std::vector<int> parent(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
    auto root = [&](int v) {
        while (parent[static_cast<std::size_t>(v)] != v) v = parent[static_cast<std::size_t>(v)];
        return v;
    };
    bool forest = true;
    for (const auto& e : edges) {
        const int a = root(e.u), b = root(e.v);
        if (a == b) forest = false;
        parent[static_cast<std::size_t>(a)] = b;
    }
    double num = 0, den = 0;
    if (forest) {
        std::vector<int> on_path;  // edge indices between x and y, empty if x == y or disconnected
        bool connected = obs != Phi4Observable::Dot || x == y;
        if (obs == Phi4Observable::Dot && x != y) {
            // at most three vertices: x-y directly or through the remaining vertex
            for (std::size_t k = 0; k < edges.size(); ++k)
                if ((edges[k].u == x && edges[k].v == y) || (edges[k].u == y && edges[k].v == x)) {
                    on_path = {static_cast<int>(k)};
                    connected = true;
                }
            if (!connected)
                for (int z = 0; z < n; ++z) {
                    int kx = -1, ky = -1;
                    for (std::size_t k = 0; k < edges.size(); ++k) {
                        const auto& e = edges[k];
                        if ((e.u == x && e.v == z) || (e.u == z && e.v == x)) kx = static_cast<int>(k);
                        if ((e.u == y && e.v == z) || (e.u == z && e.v == y)) ky = static_cast<int>(k);
                    }
                    if (kx >= 0 && ky >= 0) {
                        on_path = {kx, ky};
                        connected = true;
                    }
                }
        }
        if (!connected) return 0.0;
        // per edge and radius pair: ln mean_s e^{c(cos s - 1)} and the cosine ratio
        const std::size_t KK = static_cast<std::size_t>(K) * static_cast<std::size_t>(K);
        std::vector<std::vector<double>> logz(edges.size(), std::vector<double>(KK)), ratio(edges.size(), std::vector<double>(KK));
        for (std::size_t k = 0; k < edges.size(); ++k)
            for (std::size_t a = 0; a < static_cast<std::size_t>(K); ++a)
                for (std::size_t b = 0; b < static_cast<std::size_t>(K); ++b) {
                    const double c = edges[k].c * nodes[a] * nodes[b];
                    double z = 0, zc = 0;
                    for (int s = 0; s < G; ++s) {
                        const double w = std::exp(c * (cosg[static_cast<std::size_t>(s)] - 1));
                        z += w;
                        zc += w * cosg[static_cast<std::size_t>(s)];
                    }
                    logz[k][a * static_cast<std::size_t>(K) + b] = std::log(z / G);
                    ratio[k][a * static_cast<std::size_t>(K) + b] = zc / z;
                }
        std::vector<std::size_t> idx(static_cast<std::size_t>(n));
        for (std::size_t t = 0; t < tuples; ++t) {
            double lw = tuple_log(t, rad) - shift;
            std::size_t rest = t;
            for (int i = n - 1; i >= 0; --i) {
                idx[static_cast<std::size_t>(i)] = rest % static_cast<std::size_t>(K);
                rest /= static_cast<std::size_t>(K);
            }
            auto pair_index = [&](std::size_t k) {
                return idx[static_cast<std::size_t>(edges[k].u)] * static_cast<std::size_t>(K) + idx[static_cast<std::size_t>(edges[k].v)];
            };
            for (std::size_t k = 0; k < edges.size(); ++k) lw += logz[k][pair_index(k)];
            if (lw < -745) continue;
            const double weight = std::exp(lw);
            den += weight;
            if (obs == Phi4Observable::Dot) {
                double r = rad[static_cast<std::size_t>(x)] * rad[static_cast<std::size_t>(y)];
                for (int k : on_path) r *= ratio[static_cast<std::size_t>(k)][pair_index(static_cast<std::size_t>(k))];
                num += weight * r;
            } else {
                num += weight * rad[static_cast<std::size_t>(x)] * rad[static_cast<std::size_t>(x)];
            }
        }
        require(den > 0, ErrorKind::Precision, "Phi4 partition function underflowed");
        return num / den;
    }

    std::vector<std::vector<double>> table(edges.size(), std::vector<double>(static_cast<std::size_t>(G)));
    const int mask = G;  // indices reduced modulo G
    for (std::size_t t = 0; t < tuples; ++t) {
        const double lw = tuple_log(t, rad) - shift;
        if (lw < -745) continue;
        for (std::size_t k = 0; k < edges.size(); ++k) {
            const double c = edges[k].c * rad[static_cast<std::size_t>(edges[k].u)] * rad[static_cast<std::size_t>(edges[k].v)];
            for (int s = 0; s < G; ++s) table[k][static_cast<std::size_t>(s)] = std::exp(c * (cosg[static_cast<std::size_t>(s)] - 1));
        }
        // angle index of each vertex: a[0] = 0, a[1] = i, a[2] = j
        double zsum = 0, osum = 0;
        const int imax = n >= 2 ? G : 1, jmax_i = n >= 3 ? G : 1;
        int a[3] = {0, 0, 0};
        for (int i = 0; i < imax; ++i)
            for (int j = 0; j < jmax_i; ++j) {
                a[1] = i;
                a[2] = j;
                double w = 1;
                for (std::size_t k = 0; k < edges.size(); ++k)
                    w *= table[k][static_cast<std::size_t>(((a[edges[k].u] - a[edges[k].v]) % mask + mask) % mask)];
                zsum += w;
                if (obs == Phi4Observable::Dot)
                    osum += w * cosg[static_cast<std::size_t>(((a[x] - a[y]) % mask + mask) % mask)];
            }
        const double weight = std::exp(lw);
        den += weight * zsum;
        if (obs == Phi4Observable::Dot)
            num += weight * osum * rad[static_cast<std::size_t>(x)] * rad[static_cast<std::size_t>(y)];
        else
            num += weight * zsum * rad[static_cast<std::size_t>(x)] * rad[static_cast<std::size_t>(x)];
    }
    require(den > 0, ErrorKind::Precision, "Phi4 partition function underflowed");
    return num / den;
}

}  // namespace quenchxy
