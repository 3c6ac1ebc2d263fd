// Acceptance run: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "quenchxy/bessel.hpp"
#include "quenchxy/dual_height.hpp"
#include "quenchxy/error.hpp"
#include "quenchxy/graph.hpp"
#include "quenchxy/models.hpp"
#include "quenchxy/nishimori.hpp"
#include "quenchxy/oracle.hpp"
#include "quenchxy/percolation.hpp"
#include "quenchxy/rng.hpp"
#include "quenchxy/sampler.hpp"
#include "quenchxy/voronoi.hpp"

using namespace quenchxy;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            note("FAILED " + what);
        }
    }
    void note(const std::string& s) {
        if (!detail.empty()) detail += "; ";
        detail += s;
    }
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double combined_sigma(double a, double b) { return std::sqrt(a * a + b * b); }

// (1/pi) int_0^pi e^{x cos t} cos(k t) dt by the trapezoid rule on a periodic integrand.
double bessel_quadrature(int k, double x, int nodes = 400) {
    double sum = 0;
    for (int j = 0; j < nodes; ++j) {
        const double t = std::numbers::pi * (j + 0.5) / nodes;
        sum += std::exp(x * std::cos(t)) * std::cos(k * t);
    }
    return sum / nodes;
}

WeightedGraph two_site(double beta) { return WeightedGraph::from_edges(2, {{0, 1, beta, EdgeClass::Generic}}); }

int site(const WeightedGraph& g, std::vector<std::int64_t> p) { return *g.find_integer_point(p); }

// ---------------------------------------------------------------- 1
Outcome criterion_exact_oracle(std::uint64_t seed) {
    Outcome o;
    for (double beta : {0.5, 1.0, 2.0}) {
        const auto g = two_site(beta);
        ChainModel model;
        model.graph = &g;
        ChainSchedule s;
        s.thermalization = 1000;
        s.measurement = 200000;
        s.algorithm = Algorithm::HeatBath;
        s.seed = derive_seed(seed, "c1", static_cast<std::uint64_t>(beta * 10));
        const auto r = run_chain(model, s, {{"cos", {{0, 1}}, false, PairEstimator::Plain}}).results[0];
        const double exact = bessel_ratio_I1_I0(beta);
        const double z = (r.mean - exact) / r.std_error;
        o.note(fmt("beta=%g mc=%.5f+-%.5f exact=%.5f z=%.2f", beta, r.mean, r.std_error, exact, z));
        o.check(std::abs(z) <= 3, fmt("heat-bath beta=%g", beta));
    }
    double worst = 0;
    for (int k = 0; k <= 3; ++k)
        for (double x : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0}) {
            const double q = bessel_quadrature(k, x);
            worst = std::max(worst, std::abs(bessel_I(k, x) - q) / q);
        }
    for (double x : {0.1, 1.0, 5.0, 20.0, 45.0})
        worst = std::max(worst, std::abs(bessel_ratio_I1_I0(x) - bessel_quadrature(1, x) / bessel_quadrature(0, x)) /
                                    bessel_ratio_I1_I0(x));
    o.note(fmt("bessel worst rel %.2e", worst));
    o.check(worst <= 1e-10, "bessel vs quadrature");
    return o;
}

// ---------------------------------------------------------------- 2
Outcome criterion_wells() {
    Outcome o;
    const SiteRect pair{{0, 0}, {0, 1}};
    const auto r = verify_wells_inequality(pair, 2.0, 0.5, {1, -1});
    const double margin = r.rhs - r.lhs;
    o.note(fmt("2-site lhs=%.5f rhs=%.5f margin=%.3e", r.lhs, r.rhs, margin));
    o.check(std::abs(r.lhs - 0.24250) < 5e-6 && std::abs(r.rhs - 0.30128) < 5e-6, "2-site reference values");
    o.check(r.holds && margin > 1e-10, "2-site margin");
    const SiteRect box{{0, 0}, {1, 1}};
    const std::vector<std::pair<int, int>> pairs{{0, 1}, {2, 3}, {0, 2}, {1, 3}};  // row-major ids of the 2x2 box
    double worst = std::numeric_limits<double>::infinity();
    for (double beta : {1.0, 2.0, 4.0})
        for (double pbar : {0.3, 0.5})
            for (auto [x, y] : pairs) {
                std::vector<int> m(4, 0);
                m[static_cast<std::size_t>(x)] = 1;
                m[static_cast<std::size_t>(y)] = -1;
                const auto w = verify_wells_inequality(box, beta, pbar, m);
                worst = std::min(worst, w.rhs - w.lhs);
                o.check(w.holds && w.rhs - w.lhs > 1e-10, fmt("2x2 beta=%g pbar=%g pair %d-%d", beta, pbar, x, y));
            }
    o.note(fmt("2x2 min margin %.3e over 24 cases", worst));
    return o;
}

// ---------------------------------------------------------------- 3
Outcome criterion_domination() {
    Outcome o;
    double worst = -1;
    for (const SiteRect& box : {SiteRect{{0, 0}, {1, 1}}, SiteRect{{0, 0}, {0, 3}}})
        for (double beta : {0.0, 1.0, 2.0})
            for (double pbar : {0.3, 0.5}) {
                const double p0 = p_zero(pbar, beta, 2);
                const auto r = domination_check(nu_prime_enumerate(box, beta, pbar), p0);
                worst = std::max(worst, r.max_conditional - p0);
                o.check(r.max_conditional <= p0 + 1e-12, fmt("beta=%g pbar=%g", beta, pbar));
                if (beta == 0)
                    o.check(std::abs(r.max_conditional - p0) <= 1e-12, fmt("equality at beta=0, pbar=%g", pbar));
            }
    o.note(fmt("max(conditional - p0) = %.3e", worst));
    return o;
}

// ---------------------------------------------------------------- 4
Outcome criterion_correlation_inequalities(std::uint64_t seed) {
    Outcome o;
    const SiteRect rect{{-1, -1}, {1, 1}};
    const auto base = build_rect_lattice(rect, 1.0);
    Rng rng(derive_seed(seed, "c4", 0));
    std::vector<double> J(static_cast<std::size_t>(base.edge_count()));
    for (auto& j : J) j = 0.5 + rng.uniform();
    const int x = site(base, {-1, -1}), y = site(base, {1, 1});
    double prev = xy_two_point_quadrature(base.with_couplings(J), x, y);
    double worst = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 50; ++t) {
        J[rng.below(J.size())] += 0.5;
        const double next = xy_two_point_quadrature(base.with_couplings(J), x, y);
        worst = std::min(worst, next - prev);
        prev = next;
    }
    o.note(fmt("ginibre min increment %.3e", worst));
    o.check(worst >= -1e-12, "ginibre monotonicity");

    double lr_worst = std::numeric_limits<double>::infinity();
    for (double beta : {0.5, 1.0, 2.0}) {
        const auto chain = build_rect_lattice({{0, 0}, {0, 3}}, beta);
        const auto H = build_rect_lattice({{0, 0}, {0, 1}}, beta);
        // H = sites 0, 1 of the chain; its boundary inside the chain is site 1
        for (int yy : {2, 3}) {
            const double lhs = xy_two_point_quadrature(chain, 0, yy);
            const double rhs = xy_two_point_quadrature(H, 0, 1) * xy_two_point_quadrature(chain, 1, yy);
            lr_worst = std::min(lr_worst, rhs - lhs);
        }
    }
    o.note(fmt("lieb-rivasseau min margin %.3e", lr_worst));
    o.check(lr_worst >= -1e-10, "lieb-rivasseau");

    double mms_worst = std::numeric_limits<double>::infinity();
    for (double beta : {0.5, 1.0, 2.0}) {
        const auto g = build_rect_lattice(rect, beta);
        for (int axis = 0; axis < 2; ++axis)
            for (int a = 0; a < g.vertex_count(); ++a)
                for (int b = 0; b < g.vertex_count(); ++b) {
                    const auto pa = g.numerators(a), pb = g.numerators(b);
                    if (pa[static_cast<std::size_t>(axis)] > 0 || pb[static_cast<std::size_t>(axis)] > 0 || a == b) continue;
                    std::vector<std::int64_t> refl(pb.begin(), pb.end());
                    refl[static_cast<std::size_t>(axis)] = -refl[static_cast<std::size_t>(axis)];
                    const double same = xy_two_point_quadrature(g, a, b);
                    const double across = xy_two_point_quadrature(g, a, site(g, refl));
                    mms_worst = std::min(mms_worst, same - across);
                }
    }
    o.note(fmt("mms min margin %.3e", mms_worst));
    o.check(mms_worst >= -1e-10, "mms reflection");
    return o;
}

// ---------------------------------------------------------------- 5
Outcome criterion_thresholds() {
    Outcome o;
    const double t1 = threshold_beta1();
    const auto ratio = [](double b) {
        return boost::math::cyl_bessel_i(0, 2 * b) / boost::math::cyl_bessel_i(1, 2 * b);
    };
    const double r1 = std::abs(ratio(t1) - std::pow(2.0, 0.125));
    o.note(fmt("beta1*=%.10f residual %.1e", t1, r1));
    o.check(r1 <= 1e-8, "beta1 threshold");
    for (int n : {2, 4, 8, 16}) {
        const double t2 = threshold_beta2(n);
        const double r2 = std::abs(ratio(t2) - std::exp(1.0 / (4.0 * (n - 1))));
        const auto rec = lammers_check(n, t1 + 0.1, t2 + 0.1);
        o.note(fmt("n=%d beta2*=%.10f residual %.1e type1 margin %.4f type2 margin %.4f", n, t2, r2, rec.type1_margin,
                   rec.type2_margin));
        o.check(r2 <= 1e-8, fmt("beta2 threshold n=%d", n));
        o.check(rec.type1_margin > 0, fmt("type1 margin n=%d", n));
        if (!rec.type2_ok)
            o.note(fmt("type2 discrepancy n=%d: surrogate holds=%d but type2 margin %.4f < 0 (surrogate bound %.4f)", n,
                       rec.surrogate_ok, rec.type2_margin, rec.surrogate_type2_margin));
    }
    return o;
}

// ---------------------------------------------------------------- 6
Outcome criterion_good_boxes(std::uint64_t seed) {
    Outcome o;
    GoodBoxScanOptions opt;
    opt.trials = 2000;
    const auto rows = goodbox_scan(2, 0.75, {8, 16, 32}, opt, derive_seed(seed, "c6", 0));
    std::int64_t pairs = 0, failures = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        o.note(fmt("L=%lld preGood=%.4f [%.4f,%.4f] good=%.4f pairs=%lld", static_cast<long long>(r.L),
                   r.pre_good.estimate, r.pre_good.lower, r.pre_good.upper, r.good.estimate,
                   static_cast<long long>(r.adjacent_good_pairs)));
        pairs += r.adjacent_good_pairs;
        failures += r.connection_failures;
        if (i > 0)
            o.check(r.pre_good.upper >= rows[i - 1].pre_good.lower,
                    fmt("preGood nondecreasing L=%lld", static_cast<long long>(r.L)));
    }
    o.check(failures == 0, fmt("connect_centers failed %lld of %lld", static_cast<long long>(failures),
                               static_cast<long long>(pairs)));
    return o;
}

// ---------------------------------------------------------------- 7, 13
struct DecayRun {
    QuenchedResult quenched;
    QuenchedResult full;
};

QuenchedOptions decay_options(double beta, double p, int disorders, std::int64_t measurement, std::uint64_t seed) {
    QuenchedOptions q;
    q.d = 2;
    q.L = 64;
    q.p = p;
    q.beta = beta;
    q.distances = {2, 4, 8, 16, 24};
    q.n_disorder = disorders;
    q.all_pairs = true;
    q.window_m = 4;
    q.schedule.thermalization = beta < 1 ? 300 : 500;
    q.schedule.measurement = measurement;
    q.schedule.algorithm = beta < 1 ? Algorithm::Metropolis : Algorithm::Mixed;
    q.schedule.seed = seed;
    return q;
}

void check_decay(Outcome& o, double beta, const DecayRun& run, bool want_exponential) {
    std::vector<double> xs{2, 4, 8, 16, 24}, v, e;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        v.push_back(run.quenched.combined[i].mean);
        e.push_back(run.quenched.combined[i].std_error);
    }
    std::string series;
    for (std::size_t i = 0; i < xs.size(); ++i) series += fmt(" %.3e(%.1e)", v[i], e[i]);
    const auto c = decay_classifier(xs, v, e);
    o.note(fmt("beta=%g G:%s -> %s (exp rms %.2f, power rms %.2f)", beta, series.c_str(), to_string(c.verdict),
               c.exponential.rms_residual, c.power_law.rms_residual));
    if (want_exponential)
        o.check(c.verdict == DecayVerdict::Exponential, fmt("beta=%g exponential", beta));
    else
        o.check(c.verdict != DecayVerdict::Exponential, fmt("beta=%g not exponential", beta));
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& pd : run.quenched.per_disorder)
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const auto& f = run.full.combined[i];
            worst = std::max(worst, (pd[i].mean - f.mean) / combined_sigma(pd[i].std_error, f.std_error));
        }
    o.note(fmt("beta=%g max (disorder - full)/sigma %.2f", beta, worst));
    o.check(worst <= 3, fmt("beta=%g quenched upper bound", beta));
}

DecayRun run_decay(double beta, int disorders, std::int64_t measurement, std::int64_t full_measurement,
                   std::uint64_t seed) {
    DecayRun r;
    r.quenched = quenched_two_point(decay_options(beta, 0.95, disorders, measurement, derive_seed(seed, "c7", 0)));
    r.full = quenched_two_point(decay_options(beta, 1.0, 1, full_measurement, derive_seed(seed, "c7-full", 0)));
    return r;
}

Outcome criterion_spatial_average(const DecayRun& high_beta, std::uint64_t seed) {
    Outcome o;
    ChainSchedule s;
    s.thermalization = 500;
    s.measurement = 2000;
    s.algorithm = Algorithm::Mixed;
    s.seed = derive_seed(seed, "c13-chain", 0);
    const auto sa = spatial_average(2, 64, 4, 0.95, 2.0, PercolationKind::Site, derive_seed(seed, "c13", 0), s);
    const auto& ens = high_beta.quenched.combined.back();
    const double sig = combined_sigma(sa.std_error, ens.std_error);
    o.note(fmt("spatial %.5f+-%.5f ensemble %.5f+-%.5f diff %.2f sigma", sa.mean, sa.std_error, ens.mean,
               ens.std_error, (sa.mean - ens.mean) / sig));
    o.check(std::abs(sa.mean - ens.mean) <= 3 * sig, "spatial vs ensemble");
    return o;
}

// ---------------------------------------------------------------- 8
Outcome criterion_gauge(std::uint64_t seed) {
    Outcome o;
    QuadratureSpec spec;
    spec.grid = 32;
    const auto one = WeightedGraph::from_edges(2, {{0, 1, 1.0, EdgeClass::Beta1}});
    const auto cycle = WeightedGraph::from_edges(
        3, {{0, 1, 1.0, EdgeClass::Beta1}, {1, 2, 1.0, EdgeClass::Beta2}, {2, 0, 1.0, EdgeClass::Beta1}});
    double worst = 0;
    for (auto [b1, b2] : {std::pair{1.0, 1.0}, std::pair{0.7, 1.6}}) {
        worst = std::max(worst, gauge_identity_check(one, {EdgeFactor::Phase}, b1, b2, spec).difference);
        for (const auto& f : {std::vector{EdgeFactor::Phase, EdgeFactor::Phase, EdgeFactor::Phase},
                              std::vector{EdgeFactor::Phase, EdgeFactor::One, EdgeFactor::Phase}})
            worst = std::max(worst, gauge_identity_check(cycle, f, b1, b2, spec).difference);
    }
    o.note(fmt("gauge identity max |lhs-rhs| %.2e", worst));
    o.check(worst <= 1e-8, "gauge identity");
    for (int n : {1, 3}) {
        const auto ext = build_extended_lattice(3, 2, n, 10.0, 10.0);
        Rng rng(derive_seed(seed, "c8-path", static_cast<std::uint64_t>(n)));
        const auto path = sample_increasing_path(3, 2, rng);
        const auto r = omega_path_estimate(ext, path, 10.0, 10.0, 200000, derive_seed(seed, "c8", static_cast<std::uint64_t>(n)));
        const double target = std::pow(lambda_n(10.0, 10.0, n), 6);
        const double z = (r.mean - target) / r.std_error;
        o.note(fmt("n=%d omega path %.5f+-%.5f lambda^6 %.5f z=%.2f", n, r.mean, r.std_error, target, z));
        o.check(std::abs(z) <= 3, fmt("omega path n=%d", n));
    }
    return o;
}

// ---------------------------------------------------------------- 9
Outcome criterion_lambda_expansion() {
    Outcome o;
    for (int n : {2, 5}) {
        std::vector<double> q;
        for (double b : {20.0, 40.0, 80.0})
            q.push_back(b * b * std::abs(lambda_n(b, b, n) - (1 - 1 / b - (n - 1) / (2 * b))));
        const double r1 = q[1] / q[0], r2 = q[2] / q[1];
        o.note(fmt("n=%d scaled remainders %.4f %.4f %.4f ratios %.3f %.3f", n, q[0], q[1], q[2], r1, r2));
        o.check(r1 >= 0.2 && r1 <= 5 && r2 >= 0.2 && r2 <= 5, fmt("n=%d ratios", n));
    }
    return o;
}

// ---------------------------------------------------------------- 10
Outcome criterion_path_tails(std::uint64_t seed) {
    Outcome o;
    const std::int64_t trials = 100000;
    const auto law = exact_intersection_law(3, 1);
    const auto tail = intersection_tail(3, 1, trials, derive_seed(seed, "c10", 0));
    double worst = 0;
    for (std::size_t j = 0; j < law.size(); ++j) {
        const double p = j + 1 < law.size() ? tail[j].estimate - tail[j + 1].estimate : tail[j].estimate;
        const double sd = std::sqrt(std::max(law[j] * (1 - law[j]), 1e-300) / static_cast<double>(trials));
        const double z = law[j] > 0 ? std::abs(p - law[j]) / sd : (p == 0 ? 0.0 : 1e9);
        worst = std::max(worst, z);
    }
    o.note(fmt("d=3 k=1 max |z| %.2f", worst));
    o.check(worst <= 4, "d=3 k=1 law");
    const auto slope = log_tail_slope(intersection_tail(4, 8, trials, derive_seed(seed, "c10", 1)));
    o.note(fmt("d=4 k=8 slope %.4f+-%.4f over %d points", slope.slope, slope.std_error, slope.points));
    o.check(slope.slope < 0 && std::abs(slope.slope) >= 0.1, "d=4 k=8 slope");
    return o;
}

// ---------------------------------------------------------------- 11
Outcome criterion_phi4() {
    Outcome o;
    const auto pair = WeightedGraph::from_edges(2, {{0, 1, 1.0, EdgeClass::Generic}});
    const auto path3 = WeightedGraph::from_edges(3, {{0, 1, 1.0, EdgeClass::Generic}, {1, 2, 1.0, EdgeClass::Generic}});
    double worst = std::numeric_limits<double>::infinity(), worst_sq = worst;
    for (double h : {-1.0, 0.0, 1.0}) {
        const double a = wells_a(SingleSiteMeasure::phi4_radial(1.0, h));
        for (double beta : {1.0, 2.0})
            for (const auto* g : {&pair, &path3})
                for (int y = 1; y < g->vertex_count(); ++y) {
                    const double dot = phi4_expectation_quadrature(*g, beta, 1.0, h, Phi4Observable::Dot, 0, y);
                    std::vector<double> Ja(static_cast<std::size_t>(g->edge_count()), a * beta);
                    std::vector<double> Ja2(Ja.size(), a * a * beta);
                    const double xy = xy_two_point_quadrature(g->with_couplings(Ja), 0, y);
                    const double xy2 = xy_two_point_quadrature(g->with_couplings(Ja2), 0, y);
                    worst = std::min(worst, dot - a * a * xy);
                    worst_sq = std::min(worst_sq, dot - a * a * xy2);
                }
    }
    o.note(fmt("min margin at coupling a*beta %.3e, at a^2*beta %.3e", worst, worst_sq));
    o.check(worst >= -1e-8, "phi4 >= a^2 xy(a beta)");
    return o;
}

// ---------------------------------------------------------------- 12
// Nearest-site lookups through a uniform bucket grid.
class NearestIndex {
public:
    NearestIndex(const std::vector<Point2>& pts, double cell) : pts_(pts), cell_(cell) {
        x0_ = y0_ = std::numeric_limits<double>::infinity();
        double x1 = -x0_, y1 = -y0_;
        for (const auto& p : pts) {
            x0_ = std::min(x0_, p.x);
            y0_ = std::min(y0_, p.y);
            x1 = std::max(x1, p.x);
            y1 = std::max(y1, p.y);
        }
        nx_ = static_cast<int>((x1 - x0_) / cell_) + 1;
        ny_ = static_cast<int>((y1 - y0_) / cell_) + 1;
        buckets_.resize(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_));
        for (std::size_t i = 0; i < pts.size(); ++i) buckets_[bucket(pts[i])].push_back(static_cast<int>(i));
    }

    // Index and distance of the nearest site; ties go to the lower index.
    std::pair<int, double> nearest(const Point2& q) const {
        const int cx = std::clamp(static_cast<int>(std::floor((q.x - x0_) / cell_)), 0, nx_ - 1);
        const int cy = std::clamp(static_cast<int>(std::floor((q.y - y0_) / cell_)), 0, ny_ - 1);
        int best = -1;
        double bd = std::numeric_limits<double>::infinity();
        for (int ring = 0; ring <= std::max(nx_, ny_); ++ring) {
            // points outside the ring are at least this far from q
            const double reach = (ring - 1) * cell_;
            if (best >= 0 && reach > bd) break;
            for (int i = cx - ring; i <= cx + ring; ++i)
                for (int j = cy - ring; j <= cy + ring; ++j) {
                    if (std::max(std::abs(i - cx), std::abs(j - cy)) != ring) continue;
                    if (i < 0 || j < 0 || i >= nx_ || j >= ny_) continue;
                    for (int k : buckets_[static_cast<std::size_t>(i) * static_cast<std::size_t>(ny_) + static_cast<std::size_t>(j)]) {
                        const double d = std::hypot(pts_[static_cast<std::size_t>(k)].x - q.x, pts_[static_cast<std::size_t>(k)].y - q.y);
                        if (d < bd || (d == bd && k < best)) {
                            bd = d;
                            best = k;
                        }
                    }
                }
        }
        return {best, bd};
    }

    // Sites within distance r of q.
    void within(const Point2& q, double r, std::vector<int>& out) const {
        out.clear();
        const int i0 = std::max(0, static_cast<int>(std::floor((q.x - r - x0_) / cell_)));
        const int i1 = std::min(nx_ - 1, static_cast<int>(std::floor((q.x + r - x0_) / cell_)));
        const int j0 = std::max(0, static_cast<int>(std::floor((q.y - r - y0_) / cell_)));
        const int j1 = std::min(ny_ - 1, static_cast<int>(std::floor((q.y + r - y0_) / cell_)));
        for (int i = i0; i <= i1; ++i)
            for (int j = j0; j <= j1; ++j)
                for (int k : buckets_[static_cast<std::size_t>(i) * static_cast<std::size_t>(ny_) + static_cast<std::size_t>(j)])
                    if (std::hypot(pts_[static_cast<std::size_t>(k)].x - q.x, pts_[static_cast<std::size_t>(k)].y - q.y) <= r)
                        out.push_back(k);
    }

private:
    std::size_t bucket(const Point2& p) const {
        const int i = std::clamp(static_cast<int>((p.x - x0_) / cell_), 0, nx_ - 1);
        const int j = std::clamp(static_cast<int>((p.y - y0_) / cell_), 0, ny_ - 1);
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(ny_) + static_cast<std::size_t>(j);
    }

    const std::vector<Point2>& pts_;
    double cell_;
    double x0_, y0_;
    int nx_, ny_;
    std::vector<std::vector<int>> buckets_;
};

// Adjacencies seen by probing: a quadtree over the window, refined down to
// side 1e-3 wherever a square's probes see two owners or the square holds a
// site, and further wherever they see three; owner changes along leaf edges
// are located by bisection.
std::set<std::pair<int, int>> probe_adjacency(const std::vector<Point2>& pts, const Window& w) {
    const NearestIndex index(pts, 1.0);
    std::set<std::pair<int, int>> out;
    auto owner = [&](double x, double y) { return index.nearest({x, y}).first; };
    std::function<void(Point2, int, Point2, int)> bisect = [&](Point2 a, int oa, Point2 b, int ob) {
        if (oa == ob) return;
        if (std::hypot(b.x - a.x, b.y - a.y) < 1e-11) {
            out.insert({std::min(oa, ob), std::max(oa, ob)});
            return;
        }
        const Point2 m{(a.x + b.x) / 2, (a.y + b.y) / 2};
        const int om = owner(m.x, m.y);
        bisect(a, oa, m, om);
        bisect(m, om, b, ob);
    };
    std::function<void(double, double, double, int)> visit = [&](double x, double y, double s, int depth) {
        const Point2 c[4] = {{x, y}, {x + s, y}, {x + s, y + s}, {x, y + s}};
        int o[4];
        for (int k = 0; k < 4; ++k) o[k] = owner(c[k].x, c[k].y);
        std::set<int> seen(o, o + 4);
        for (double fx : {0.25, 0.5, 0.75})
            for (double fy : {0.25, 0.5, 0.75}) seen.insert(owner(x + fx * s, y + fy * s));
        bool holds_site = false;
        for (const auto& p : pts)
            if (p.x >= x && p.x <= x + s && p.y >= y && p.y <= y + s) holds_site = true;
        if ((seen.size() >= 3 && depth < 40) || ((seen.size() >= 2 || holds_site) && s > 1e-3)) {
            const double h = s / 2;
            visit(x, y, h, depth + 1);
            visit(x + h, y, h, depth + 1);
            visit(x, y + h, h, depth + 1);
            visit(x + h, y + h, h, depth + 1);
            return;
        }
        for (int k = 0; k < 4; ++k) bisect(c[k], o[k], c[(k + 1) % 4], o[(k + 1) % 4]);
    };
    const int n = 64;
    const double s = (w.x1 - w.x0) / n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) visit(w.x0 + i * s, w.y0 + j * s, s, 0);
    return out;
}

// Cell of site i clipped against the window and bisectors; polygon edge k is
// tagged with the site whose bisector produced it (-1 for the window).
struct ClippedCell {
    std::vector<Point2> poly;
    std::vector<int> owner;
};

ClippedCell clip_cell(const std::vector<Point2>& pts, int i, const Window& w, const std::vector<int>& candidates) {
    ClippedCell c;
    c.poly = {{w.x0, w.y0}, {w.x1, w.y0}, {w.x1, w.y1}, {w.x0, w.y1}};
    c.owner = {-1, -1, -1, -1};
    const Point2 p = pts[static_cast<std::size_t>(i)];
    for (int j : candidates) {
        if (j == i) continue;
        const Point2 q = pts[static_cast<std::size_t>(j)];
        // keep points z with (z - m) . (q - p) <= 0
        const double nx = q.x - p.x, ny = q.y - p.y, mx = (p.x + q.x) / 2, my = (p.y + q.y) / 2;
        auto side = [&](const Point2& z) { return (z.x - mx) * nx + (z.y - my) * ny; };
        ClippedCell next;
        const std::size_t m = c.poly.size();
        for (std::size_t k = 0; k < m; ++k) {
            const Point2 a = c.poly[k], b = c.poly[(k + 1) % m];
            const double sa = side(a), sb = side(b);
            if (sa <= 0) {
                next.poly.push_back(a);
                next.owner.push_back(c.owner[k]);
            }
            if ((sa <= 0) != (sb <= 0)) {
                const double t = sa / (sa - sb);
                next.poly.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
                next.owner.push_back(sa <= 0 ? j : c.owner[k]);
            }
        }
        c = std::move(next);
    }
    return c;
}

double polygon_area(const std::vector<Point2>& poly) {
    double a = 0;
    for (std::size_t k = 0; k < poly.size(); ++k) {
        const auto& p = poly[k];
        const auto& q = poly[(k + 1) % poly.size()];
        a += p.x * q.y - q.x * p.y;
    }
    return a / 2;
}

// Is some probe of the lattice z + pitch Z^2 inside z + [-5R, 5R]^2 at
// distance >= target from every site? Branch and bound over index blocks.
bool probe_gap_exists(const NearestIndex& index, const Point2& z, double R, std::int64_t per_side, double target) {
    const double h = 10 * R / static_cast<double>(per_side);
    std::function<bool(std::int64_t, std::int64_t, std::int64_t, std::int64_t)> search =
        [&](std::int64_t i0, std::int64_t i1, std::int64_t j0, std::int64_t j1) {
            const double ci = static_cast<double>(i0 + i1) / 2, cj = static_cast<double>(j0 + j1) / 2;
            const Point2 c{z.x - 5 * R + ci * h, z.y - 5 * R + cj * h};
            const double dc = index.nearest(c).second;
            const double half = h * std::hypot(static_cast<double>(i1 - i0), static_cast<double>(j1 - j0)) / 2;
            if (dc + half < target) return false;
            if (i0 == i1 && j0 == j1) return dc >= target;
            if (i1 - i0 >= j1 - j0) {
                const std::int64_t m = (i0 + i1) / 2;
                return search(i0, m, j0, j1) || search(m + 1, i1, j0, j1);
            }
            const std::int64_t m = (j0 + j1) / 2;
            return search(i0, i1, j0, m) || search(i0, i1, m + 1, j1);
        };
    return search(0, per_side, 0, per_side);
}

// E_R by probing at pitch R/1000. When the answer is within the lattice's
// resolution (every location lies within pitch/sqrt(2) of a probe) the pitch
// is divided by ten, down to R/10^7; returns nullopt if still unresolved.
std::optional<bool> probe_covering(const NearestIndex& index, const Point2& z, double R) {
    for (std::int64_t per_side = 10000; per_side <= 100000000; per_side *= 10) {
        const double h = 10 * R / static_cast<double>(per_side);
        if (probe_gap_exists(index, z, R, per_side, R / 10)) return false;
        if (!probe_gap_exists(index, z, R, per_side, R / 10 - h / std::sqrt(2.0))) return true;
    }
    return std::nullopt;
}

Outcome criterion_voronoi(std::uint64_t seed) {
    Outcome o;
    {
        const Window w{0, 0, 15, 15};
        Rng rng(derive_seed(seed, "c12-points", 0));
        std::vector<Point2> pts(200);
        for (auto& p : pts) p = {15 * rng.uniform(), 15 * rng.uniform()};
        const auto g = build_voronoi_graph(pts, w, VoronoiStrength::F3);
        std::set<std::pair<int, int>> got;
        for (const auto& a : g.adjacency) got.insert({a.i, a.j});
        const auto probe = probe_adjacency(pts, w);
        std::size_t missing = 0, extra = 0;
        for (const auto& pr : probe) missing += got.count(pr) == 0;
        for (const auto& a : g.adjacency)
            if (!probe.count({a.i, a.j})) {
                ++extra;
                o.note(fmt("unprobed %d-%d facet %.3e", a.i, a.j, a.facet_length));
            }
        o.note(fmt("200 points: %zu adjacencies, probe %zu, missing %zu extra %zu", got.size(), probe.size(), missing,
                   extra));
        o.check(got == probe, "200-point adjacency");
        double area = 0;
        for (const auto& c : g.cells) area += c.area;
        const double rel = std::abs(area - w.area()) / w.area();
        o.note(fmt("area rel error %.1e", rel));
        o.check(rel <= 1e-9, "clipped areas");
    }
    int er_true = 0, fr_true = 0, mismatches = 0;
    double k_worst = 0;
    for (int inst = 0; inst < 50; ++inst) {
        Rng rng(derive_seed(seed, "c12-inst", static_cast<std::uint64_t>(inst)));
        const double R = 1.0;
        const double intensity = 300 + 300 * rng.uniform();
        const double H = 4 * intensity * (0.95 + 0.1 * rng.uniform());
        const Point2 z{0, 0};
        const Window win = Window::square(z, 6 * R);
        const auto pts = sample_poisson_points(win, intensity, derive_seed(seed, "c12-sample", static_cast<std::uint64_t>(inst)));
        const auto rec = check_voronoi_events(pts, win, z, R, H);
        const NearestIndex index(pts, 1 / std::sqrt(intensity));
        const auto covering = probe_covering(index, z, R);
        if (!covering) {
            o.note(fmt("instance %d unresolved by probing", inst));
            ++mismatches;
            continue;
        }
        const bool e_oracle = *covering;
        std::int64_t count = 0;
        for (const auto& p : pts) count += Window::square(z, R).contains(p);
        const bool f_oracle = static_cast<double>(count) <= H * R * R;
        bool ok = e_oracle == rec.e_r && f_oracle == rec.f_rh && rec.k.has_value() == e_oracle;
        if (ok && e_oracle) {
            // K from cells built by half-plane clipping against nearby sites
            const Window five = Window::square(z, 5 * R), four = Window::square(z, 4 * R);
            const double reach = 2 * R / 10 + 1e-9;  // bisectors that cut a cell of radius < R/10
            std::vector<int> local;
            for (int i = 0; i < static_cast<int>(pts.size()); ++i)
                if (four.contains(pts[static_cast<std::size_t>(i)])) local.push_back(i);
            std::map<int, double> areas;
            std::map<std::pair<int, int>, double> facets;
            std::vector<int> cand;
            for (int i : local) {
                index.within(pts[static_cast<std::size_t>(i)], reach, cand);
                const auto cell = clip_cell(pts, i, five, cand);
                areas[i] = polygon_area(cell.poly);
                for (std::size_t k = 0; k < cell.poly.size(); ++k) {
                    const int j = cell.owner[k];
                    if (j < 0) continue;
                    const auto& a = cell.poly[k];
                    const auto& b = cell.poly[(k + 1) % cell.poly.size()];
                    const double len = std::hypot(b.x - a.x, b.y - a.y);
                    if (len > 1e-12 * five.diagonal()) facets[{std::min(i, j), std::max(i, j)}] = len;
                }
            }
            double k = std::numeric_limits<double>::infinity();
            for (const auto& [pr, len] : facets) {
                if (!areas.count(pr.first) || !areas.count(pr.second)) continue;
                k = std::min(k, std::min(default_f2(areas[pr.first]) * default_f2(areas[pr.second]), len));
            }
            // tiny facets carry absolute rounding from the vertex coordinates
            const double rel = std::abs(k - *rec.k) / std::max(k, 1e-3);
            k_worst = std::max(k_worst, rel);
            ok = rel <= 1e-9;
        }
        if (!ok)
            o.note(fmt("instance %d: E_R %d/%d (gap %.6f, R/10 %.6f) F %d/%d K %d", inst, rec.e_r, e_oracle, rec.max_gap,
                       R / 10, rec.f_rh, f_oracle, rec.k.has_value()));
        er_true += rec.e_r;
        fr_true += rec.f_rh;
        mismatches += !ok;
    }
    o.note(fmt("50 instances: E_R true %d, F true %d, mismatches %d, K worst rel %.1e", er_true, fr_true, mismatches,
               k_worst));
    o.check(mismatches == 0, "event decisions");
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quenchxy acceptance criteria"};
    std::uint64_t seed = 20240601;
    std::vector<int> only, expect_fail;
    app.add_option("--seed", seed, "master seed");
    app.add_option("--only", only, "run only these criteria");
    app.add_option("--expect-fail", expect_fail, "criteria whose failure does not change the exit code");
    CLI11_PARSE(app, argc, argv);

    auto wanted = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };
    int unexpected = 0;
    auto run = [&](int id, const char* name, const std::function<Outcome()>& body) {
        if (!wanted(id)) return;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = body();
        } catch (const std::exception& e) {
            o.pass = false;
            o.note(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool expected = std::find(expect_fail.begin(), expect_fail.end(), id) != expect_fail.end();
        if (!o.pass && !expected) ++unexpected;
        std::printf("criterion %2d %s %s (%.1fs): %s\n", id, o.pass ? "PASS" : "FAIL", name, secs, o.detail.c_str());
        std::fflush(stdout);
    };

    run(1, "exact-oracle fidelity", [&] { return criterion_exact_oracle(seed); });
    run(2, "wells inequality", [] { return criterion_wells(); });
    run(3, "domination criterion", [] { return criterion_domination(); });
    run(4, "correlation inequalities", [&] { return criterion_correlation_inequalities(seed); });
    run(5, "bessel thresholds and lammers scan", [] { return criterion_thresholds(); });
    run(6, "good-box scan", [&] { return criterion_good_boxes(seed); });

    DecayRun high;
    bool have_high = false;
    if (wanted(7) || wanted(13)) {
        high = run_decay(2.0, 8, 1500, 3000, derive_seed(seed, "beta2", 0));
        have_high = true;
    }
    run(7, "quenched decay regimes", [&] {
        Outcome o;
        check_decay(o, 0.3, run_decay(0.3, 8, 20000, 20000, derive_seed(seed, "beta03", 0)), true);
        check_decay(o, 2.0, high, false);
        return o;
    });
    run(8, "gauge identity and omega paths", [&] { return criterion_gauge(seed); });
    run(9, "lambda expansion", [] { return criterion_lambda_expansion(); });
    run(10, "path tails", [&] { return criterion_path_tails(seed); });
    run(11, "phi4 wells reduction", [] { return criterion_phi4(); });
    run(12, "voronoi correctness", [&] { return criterion_voronoi(seed); });
    run(13, "spatial ergodic average", [&] {
        if (!have_high) return Outcome{false, "no ensemble data"};
        return criterion_spatial_average(high, seed);
    });
    return unexpected == 0 ? 0 : 1;
}
