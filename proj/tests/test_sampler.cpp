#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "quenchxy/bessel.hpp"
#include "quenchxy/error.hpp"
#include "quenchxy/graph.hpp"
#include "quenchxy/models.hpp"
#include "quenchxy/oracle.hpp"
#include "quenchxy/percolation.hpp"
#include "quenchxy/rng.hpp"
#include "quenchxy/sampler.hpp"

using namespace quenchxy;

namespace {

constexpr double kPi = kTwoPi / 2;

WeightedGraph two_site(double beta) { return WeightedGraph::from_edges(2, {{0, 1, beta, EdgeClass::Generic}}); }

int vertex(const WeightedGraph& g, std::vector<std::int64_t> x) { return *g.find_integer_point(x); }

ChainSchedule schedule(std::int64_t therm, std::int64_t meas, std::uint64_t seed, Algorithm alg) {
    ChainSchedule s;
    s.thermalization = therm;
    s.measurement = meas;
    s.seed = seed;
    s.algorithm = alg;
    return s;
}

double z_score(const EstimatorResult& r, double ref) { return (r.mean - ref) / r.std_error; }

// Probability that the bin pair (i, i + k) of 36 bins holds a two-site
// configuration with density e^{beta cos(a - b)}.
std::vector<double> binned_pair_law(double beta, int bins) {
    const int sub = 60;
    const double w = kTwoPi / bins;
    std::vector<double> by_offset(static_cast<std::size_t>(bins));
    for (int k = 0; k < bins; ++k) {
        long double acc = 0;
        for (int s = 0; s < sub; ++s) {
            for (int t = 0; t < sub; ++t) {
                const double a = (s + 0.5) * w / sub;
                const double b = k * w + (t + 0.5) * w / sub;
                acc += std::exp(beta * std::cos(a - b));
            }
        }
        by_offset[static_cast<std::size_t>(k)] = static_cast<double>(acc);
    }
    double total = 0;
    for (double v : by_offset) total += v * bins;
    for (auto& v : by_offset) v /= total;
    return by_offset;
}

int bin_of(double a, int bins) { return std::min(bins - 1, static_cast<int>(wrap_angle(a) / (kTwoPi / bins))); }

}  // namespace

TEST_CASE("estimate_series") {
    Rng rng(1);
    std::vector<double> iid(20000);
    for (auto& v : iid) v = rng.uniform();
    const auto r = estimate_series(iid);
    CHECK(r.tau_int == doctest::Approx(0.5).epsilon(0.2));
    CHECK(std::abs(r.mean - 0.5) < 4 * r.std_error);
    CHECK(r.n_samples == 20000);

    // AR(1): tau_int = (1 + rho) / (2 (1 - rho))
    const double rho = 0.8;
    std::vector<double> ar(200000);
    double x = 0;
    for (auto& v : ar) {
        x = rho * x + std::sqrt(1 - rho * rho) * (rng.uniform() - 0.5) * std::sqrt(12.0);
        v = x;
    }
    const auto a = estimate_series(ar);
    CHECK(a.tau_int == doctest::Approx((1 + rho) / (2 * (1 - rho))).epsilon(0.15));
    CHECK(std::abs(a.mean) < 4 * a.std_error);
}

TEST_CASE("combine_disorder") {
    std::vector<EstimatorResult> parts;
    for (double m : {1.0, 2.0, 3.0}) parts.push_back({m, 0.01, 0.5, 100});
    const auto c = combine_disorder(parts);
    CHECK(c.mean == doctest::Approx(2.0));
    CHECK(c.std_error == doctest::Approx(1.0 / std::sqrt(3.0)));
    CHECK(c.n_samples == 300);
}

TEST_CASE("heat-bath on an isolated vertex is uniform") {
    const auto g = WeightedGraph::from_edges(1, {});
    SpinState s{{0.0}};
    Rng rng(3);
    const int n = 100000;
    std::vector<double> draws(n);
    for (auto& d : draws) {
        heatbath_sweep(g, s, nullptr, nullptr, rng);
        d = s.angles[0] / kTwoPi;
    }
    std::sort(draws.begin(), draws.end());
    double dmax = 0;
    for (int i = 0; i < n; ++i) dmax = std::max({dmax, (i + 1.0) / n - draws[static_cast<std::size_t>(i)], draws[static_cast<std::size_t>(i)] - static_cast<double>(i) / n});
    CHECK(dmax < 1.628 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("detailed balance on two sites") {
    const double beta = 1.0;
    const int bins = 36;
    const auto law = binned_pair_law(beta, bins);
    const auto g = two_site(beta);
    const XYKernel kernel(g);
    const std::int64_t sweeps = 10'000'000;
    auto tv_for = [&](auto&& step) {
        Rng rng(11);
        SpinState s{{0.0, 0.0}};
        std::vector<std::int64_t> counts(static_cast<std::size_t>(bins * bins));
        for (std::int64_t t = 0; t < sweeps; ++t) {
            step(s, rng);
            ++counts[static_cast<std::size_t>(bin_of(s.angles[0], bins) * bins + bin_of(s.angles[1], bins))];
        }
        double tv = 0;
        for (int i = 0; i < bins; ++i) {
            for (int j = 0; j < bins; ++j) {
                const double p = law[static_cast<std::size_t>(((j - i) % bins + bins) % bins)];
                tv += std::abs(static_cast<double>(counts[static_cast<std::size_t>(i * bins + j)]) / sweeps - p);
            }
        }
        return tv / 2;
    };
    CHECK(tv_for([&](SpinState& s, Rng& r) { kernel.heatbath_sweep(s, r); }) < 0.01);
    CHECK(tv_for([&](SpinState& s, Rng& r) { kernel.metropolis_sweep(s, 2.5, r); }) < 0.01);
    CHECK(tv_for([&](SpinState& s, Rng& r) {
              kernel.embedded_cluster_update(s, r);
              kernel.embedded_cluster_update(s, r);
          }) < 0.01);
}

TEST_CASE("two-site chains reproduce the Bessel ratio") {
    for (auto alg : {Algorithm::HeatBath, Algorithm::Metropolis, Algorithm::EmbeddedCluster, Algorithm::Mixed}) {
        for (double beta : {1.0, 2.0}) {
            const auto g = two_site(beta);
            ChainModel m;
            m.graph = &g;
            const auto r = run_chain(m, schedule(500, 40000, 5, alg), {{"c", {{0, 1}}, false, PairEstimator::Plain}}).results[0];
            CHECK_MESSAGE(std::abs(z_score(r, bessel_ratio_I1_I0(beta))) < 3.5, to_string(alg) << " beta=" << beta);
        }
    }
}

TEST_CASE("3x3 box at beta 0.7 matches quadrature") {
    const auto g = build_box_lattice(2, 1, 0.7);
    ChainModel m;
    m.graph = &g;
    const int o = vertex(g, {0, 0});
    std::vector<ChainObservable> obs;
    std::vector<double> ref;
    for (auto y : std::vector<std::vector<std::int64_t>>{{1, 0}, {1, 1}, {-1, 1}}) {
        obs.push_back({"c", {{o, vertex(g, y)}}, false, PairEstimator::Conditional});
        ref.push_back(xy_two_point_quadrature(g, o, vertex(g, y)));
    }
    for (auto alg : {Algorithm::HeatBath, Algorithm::Mixed}) {
        const auto out = run_chain(m, schedule(500, 20000, 6, alg), obs);
        for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(z_score(out.results[i], ref[i])) < 3.5);
    }
}

TEST_CASE("beta zero gives vanishing two-points") {
    const auto g = build_box_lattice(2, 2, 0.0);
    ChainModel m;
    m.graph = &g;
    const auto out = run_chain(m, schedule(10, 4000, 7, Algorithm::Mixed),
                               {{"a", {{0, 1}}, false, PairEstimator::Plain}, {"b", {{0, 24}}, false, PairEstimator::Plain}});
    for (const auto& r : out.results) CHECK(std::abs(r.mean) < 3.5 * r.std_error);

    // a single-site cluster at beta 0
    SpinState s{std::vector<double>(25, 0.0)};
    Rng rng(1);
    for (int i = 0; i < 50; ++i) CHECK(embedded_cluster_update(g, s, nullptr, rng) == 1);
}

TEST_CASE("fixed seed is bitwise reproducible") {
    const auto g = build_box_lattice(2, 3, 1.1);
    ChainModel m;
    m.graph = &g;
    const std::vector<ChainObservable> obs{{"c", {{0, 5}, {3, 40}}, false, PairEstimator::Conditional}};
    const auto a = run_chain(m, schedule(50, 500, 42, Algorithm::Mixed), obs).results[0];
    const auto b = run_chain(m, schedule(50, 500, 42, Algorithm::Mixed), obs).results[0];
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    CHECK(a.tau_int == b.tau_int);
    const auto c = run_chain(m, schedule(50, 500, 43, Algorithm::Mixed), obs).results[0];
    CHECK(a.mean != c.mean);
}

TEST_CASE("mixed and heat-bath agree on an 8x8 box") {
    const auto g = build_rect_lattice({{0, 0}, {7, 7}}, 1.2);
    ChainModel m;
    m.graph = &g;
    const std::vector<ChainObservable> obs{{"c", {{0, 36}}, false, PairEstimator::Conditional}};
    const auto a = run_chain(m, schedule(1000, 15000, 8, Algorithm::Mixed), obs).results[0];
    const auto b = run_chain(m, schedule(1000, 15000, 9, Algorithm::HeatBath), obs).results[0];
    CHECK(std::abs(a.mean - b.mean) / std::hypot(a.std_error, b.std_error) < 3);
}

TEST_CASE("cluster updates reject gauge disorder") {
    const auto g = build_box_lattice(2, 1, 1.0);
    const auto gauge = sample_gauge(g, 1.0, 1.0, 1);
    SpinState s{std::vector<double>(9, 0.0)};
    Rng rng(1);
    CHECK_THROWS_AS(embedded_cluster_update(g, s, nullptr, rng, &gauge), Error);
}

TEST_CASE("ginibre ordering holds for chain estimates") {
    const auto lo = build_box_lattice(2, 1, 0.8);
    std::vector<double> c(static_cast<std::size_t>(lo.edge_count()), 0.8);
    c[3] += 0.5;
    const auto hi = lo.with_couplings(c);
    CHECK(xy_two_point_quadrature(hi, 0, 8) >= xy_two_point_quadrature(lo, 0, 8));
    ChainModel a, b;
    a.graph = &lo;
    b.graph = &hi;
    const std::vector<ChainObservable> obs{{"c", {{0, 8}}, false, PairEstimator::Conditional}};
    const auto ra = run_chain(a, schedule(500, 20000, 10, Algorithm::Mixed), obs).results[0];
    const auto rb = run_chain(b, schedule(500, 20000, 11, Algorithm::Mixed), obs).results[0];
    CHECK(rb.mean - ra.mean > -3 * std::hypot(ra.std_error, rb.std_error));
}

TEST_CASE("oracle two-point grows with the domain") {
    for (double beta : {0.5, 1.0}) {
        const auto small = build_rect_lattice({{0, 0}, {2, 2}}, beta);
        const auto big = build_rect_lattice({{0, 0}, {2, 3}}, beta);
        const double a = xy_two_point_quadrature(small, vertex(small, {0, 0}), vertex(small, {2, 2}));
        const double b = xy_two_point_quadrature(big, vertex(big, {0, 0}), vertex(big, {2, 2}));
        CHECK(b >= a - 1e-12);
    }
}

TEST_CASE("phi4 sweeps") {
    SUBCASE("beta zero single site") {
        const auto g = WeightedGraph::from_edges(1, {});
        Phi4State st{{1.0}, {0.0}};
        Rng rng(12);
        std::vector<double> series;
        for (int t = 0; t < 60000; ++t) {
            phi4_sweep(g, st, 0.0, 1.0, 0.0, rng);
            if (t >= 1000) series.push_back(st.radii[0] * st.radii[0]);
        }
        const auto r = estimate_series(series);
        CHECK(std::abs(z_score(r, 1 / std::sqrt(kPi))) < 3.5);
    }
    SUBCASE("beta zero pair is uncorrelated") {
        const auto g = two_site(1.0);
        ChainModel m;
        m.kind = ChainModel::Kind::Phi4;
        m.graph = &g;
        m.beta = 0.0;
        const auto r = run_chain(m, schedule(200, 20000, 13, Algorithm::HeatBath), {{"d", {{0, 1}}, false}}).results[0];
        CHECK(std::abs(r.mean) < 3.5 * r.std_error);
    }
    SUBCASE("two sites at beta 1") {
        const auto g = two_site(1.0);
        ChainModel m;
        m.kind = ChainModel::Kind::Phi4;
        m.graph = &g;
        m.beta = 1.0;
        const double ref = phi4_expectation_quadrature(g, 1.0, 1.0, 0.0, Phi4Observable::Dot, 0, 1);
        const auto r = run_chain(m, schedule(500, 40000, 14, Algorithm::HeatBath), {{"d", {{0, 1}}, false}}).results[0];
        CHECK(std::abs(z_score(r, ref)) < 3.5);
    }
}

TEST_CASE("quenched two-point") {
    const ChainSchedule s = schedule(300, 3000, 15, Algorithm::Mixed);
    SUBCASE("p = 0 vanishes") {
        const std::vector<std::int64_t> x{1, 0};
        const auto r = quenched_two_point(2, 2, 0.0, 1.0, x, PercolationKind::Site, 4, s);
        CHECK(std::abs(r.mean) <= 3 * r.std_error + 1e-15);
    }
    SUBCASE("p = 1 is the pure model") {
        const std::vector<std::int64_t> x{2, 0};
        const auto q = quenched_two_point(2, 2, 1.0, 1.0, x, PercolationKind::Site, 4, s);
        const auto g = build_box_lattice(2, 2, 1.0);
        ChainModel m;
        m.graph = &g;
        const auto r = run_chain(m, schedule(300, 12000, 16, Algorithm::Mixed),
                                 {{"c", {{vertex(g, {0, 0}), vertex(g, {2, 0})}}, false}}).results[0];
        CHECK(std::abs(q.mean - r.mean) / std::hypot(q.std_error, r.std_error) < 3);
    }
    SUBCASE("disorder average on the 3x3 box matches enumeration") {
        const double p = 0.95, beta = 2.0;
        const auto g = build_box_lattice(2, 1, beta);
        const int o = vertex(g, {0, 0}), y = vertex(g, {1, 1});
        double exact = 0;
        for (std::uint32_t cfg = 0; cfg < 512; ++cfg) {
            PercolationSample r;
            r.kind = PercolationKind::Site;
            r.occupation.resize(9);
            int open = 0;
            for (int v = 0; v < 9; ++v) open += r.occupation[static_cast<std::size_t>(v)] = (cfg >> v) & 1;
            exact += std::pow(p, open) * std::pow(1 - p, 9 - open) * xy_two_point_quadrature(g, o, y, &r);
        }
        const std::vector<std::int64_t> x{1, 1};
        const auto q = quenched_two_point(2, 1, p, beta, x, PercolationKind::Site, 200, schedule(100, 1000, 17, Algorithm::Mixed));
        CHECK(std::abs(z_score(q, exact)) < 3.5);
    }
}

TEST_CASE("quenched values stay below the pure model") {
    QuenchedOptions o;
    o.L = 3;
    o.p = 0.8;
    o.beta = 1.5;
    o.distances = {1, 2};
    o.n_disorder = 6;
    o.schedule = schedule(300, 3000, 18, Algorithm::Mixed);
    const auto q = quenched_two_point(o);
    o.p = 1;
    o.n_disorder = 1;
    o.schedule.measurement = 12000;
    const auto pure = quenched_two_point(o);
    for (const auto& per : q.per_disorder) {
        for (std::size_t i = 0; i < per.size(); ++i) {
            CHECK(per[i].mean <= pure.combined[i].mean + 3 * std::hypot(per[i].std_error, pure.combined[i].std_error));
        }
    }
}

TEST_CASE("phi_R estimator") {
    const ChainSchedule s = schedule(300, 6000, 19, Algorithm::Mixed);
    const auto zero = phi_R_estimator(2, 0, 0.0, 0.0, 1, s);
    CHECK(std::abs(zero.mean) <= 3.5 * zero.std_error);

    const auto g = build_box_lattice(2, 1, 0.5);
    double ref = 0;
    const int o = vertex(g, {0, 0});
    for (int v = 0; v < 9; ++v)
        if (v != o) ref += xy_two_point_quadrature(g, o, v);
    const auto r = phi_R_estimator(2, 0, 0.5, 0.5, 1, s);
    CHECK(std::abs(z_score(r, ref)) < 3.5);

    const auto cold = phi_R_estimator(2, 1, 40.0, 40.0, 1, s);
    CHECK(cold.mean < 8.0 * 2);
    CHECK(cold.mean > 0.9 * 16);
}

TEST_CASE("decay classifier on synthetic data") {
    const std::vector<double> x{2, 4, 6, 8, 12, 16, 24, 32};
    Rng rng(20);
    auto noisy = [&](auto f) {
        std::vector<double> v, e;
        for (double t : x) {
            const double base = f(t);
            e.push_back(0.01 * base);
            v.push_back(base * (1 + 0.01 * (2 * rng.uniform() - 1) * std::sqrt(3.0)));
        }
        return std::pair{v, e};
    };
    {
        auto [v, e] = noisy([](double t) { return std::exp(-t / 5); });
        const auto c = decay_classifier(x, v, e);
        CHECK(c.verdict == DecayVerdict::Exponential);
        CHECK(c.exponential.parameter == doctest::Approx(0.2).epsilon(0.05));
    }
    {
        auto [v, e] = noisy([](double t) { return std::pow(t, -0.25); });
        const auto c = decay_classifier(x, v, e);
        CHECK(c.verdict == DecayVerdict::PowerLaw);
        CHECK(c.power_law.parameter == doctest::Approx(0.25).epsilon(0.05));
    }
    {
        std::vector<double> v, e;
        for (std::size_t i = 0; i < x.size(); ++i) {
            v.push_back(0.5 + 0.05 * (2 * rng.uniform() - 1));
            e.push_back(0.05);
        }
        CHECK(decay_classifier(x, v, e).verdict == DecayVerdict::Inconclusive);
    }
}
