#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "quenchxy/error.hpp"
#include "quenchxy/graph.hpp"
#include "quenchxy/models.hpp"
#include "quenchxy/percolation.hpp"
#include "quenchxy/rng.hpp"

using namespace quenchxy;

namespace {

SpinState random_spins(const WeightedGraph& g, std::uint64_t seed) {
    Rng rng(seed);
    SpinState s;
    for (int v = 0; v < g.vertex_count(); ++v) s.angles.push_back(kTwoPi * rng.uniform());
    return s;
}

WeightedGraph random_couplings(const WeightedGraph& g, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> c;
    for (int e = 0; e < g.edge_count(); ++e) c.push_back(0.2 + 2 * rng.uniform());
    return g.with_couplings(c);
}

long double energy_oracle(const WeightedGraph& g, const SpinState& s, const PercolationSample* dis,
                          const GaugeDisorder* gauge) {
    long double sum = 0;
    for (int e = 0; e < g.edge_count(); ++e) {
        const auto& ed = g.edge(e);
        long double occ = 1;
        if (dis && dis->kind == PercolationKind::Site) occ = dis->open(ed.u) * dis->open(ed.v);
        if (dis && dis->kind == PercolationKind::Edge) occ = dis->open(e);
        const long double w = gauge ? gauge->omega[static_cast<std::size_t>(e)] : 0.0L;
        sum -= ed.coupling * occ *
               std::cos(static_cast<long double>(s.angles[static_cast<std::size_t>(ed.u)]) - s.angles[static_cast<std::size_t>(ed.v)] - w);
    }
    return sum;
}

// E[cos w] under density e^{beta cos w}, trapezoid on the circle.
double bessel_ratio_expect(double beta, int nodes = 4000) {
    long double num = 0, den = 0;
    for (int j = 0; j < nodes; ++j) {
        const long double t = kTwoPi * j / nodes;
        const long double w = std::exp(beta * (std::cos(t) - 1));
        num += w * std::cos(t);
        den += w;
    }
    return static_cast<double>(num / den);
}

}  // namespace

TEST_CASE("wrap_angle") {
    CHECK(wrap_angle(0.0) == 0.0);
    CHECK(wrap_angle(-1.0) == doctest::Approx(kTwoPi - 1.0));
    CHECK(wrap_angle(3 * kTwoPi + 0.5) == doctest::Approx(0.5));
    for (double a : {-100.0, -kTwoPi, 1e-300, kTwoPi, 1e6}) {
        const double w = wrap_angle(a);
        CHECK(w >= 0.0);
        CHECK(w < kTwoPi);
    }
}

TEST_CASE("xy energy trivial cases") {
    const auto g = build_box_lattice(2, 1, 1.5);
    SpinState s{std::vector<double>(9, 0.7)};
    CHECK(xy_energy(g, s) == doctest::Approx(-1.5 * 12));

    const auto one = WeightedGraph::from_edges(2, {{0, 1, 2.5, EdgeClass::Generic}});
    CHECK(xy_energy(one, SpinState{{0.0, kTwoPi / 2}}) == doctest::Approx(2.5));
}

TEST_CASE("xy energy matches long double summation") {
    const auto g = random_couplings(build_box_lattice(2, 1, 1.0), 3);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = random_spins(g, seed);
        const auto site = sample_percolation(g, PercolationKind::Site, 0.6, seed + 100);
        const auto edge = sample_percolation(g, PercolationKind::Edge, 0.6, seed + 200);
        const auto gauge = sample_gauge(g, 1.0, 1.0, seed + 300);
        CHECK(std::abs(xy_energy(g, s) - static_cast<double>(energy_oracle(g, s, nullptr, nullptr))) < 1e-13);
        CHECK(std::abs(xy_energy(g, s, &site) - static_cast<double>(energy_oracle(g, s, &site, nullptr))) < 1e-13);
        CHECK(std::abs(xy_energy(g, s, &edge, &gauge) - static_cast<double>(energy_oracle(g, s, &edge, &gauge))) < 1e-13);
    }
}

TEST_CASE("global rotation invariance") {
    const auto g = random_couplings(build_box_lattice(2, 3, 1.0), 5);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto s = random_spins(g, seed);
        const double e0 = xy_energy(g, s);
        Rng rng(seed + 50);
        const double c = kTwoPi * rng.uniform();
        for (auto& a : s.angles) a = wrap_angle(a + c);
        CHECK(std::abs(xy_energy(g, s) - e0) < 1e-12);
    }
}

TEST_CASE("gauge covariance") {
    const auto g = build_extended_lattice(2, 2, 2, 1.3, 0.8);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto s = random_spins(g, seed);
        const auto gauge = sample_gauge(g, 1.3, 0.8, seed);
        const double e0 = xy_energy(g, s, nullptr, &gauge);
        const auto alpha = random_spins(g, seed + 1000).angles;
        GaugeDisorder shifted = gauge;
        for (int e = 0; e < g.edge_count(); ++e) {
            const auto& ed = g.edge(e);
            shifted.omega[static_cast<std::size_t>(e)] =
                wrap_angle(gauge.omega[static_cast<std::size_t>(e)] + alpha[static_cast<std::size_t>(ed.u)] -
                           alpha[static_cast<std::size_t>(ed.v)]);
        }
        for (std::size_t v = 0; v < s.angles.size(); ++v) s.angles[v] = wrap_angle(s.angles[v] + alpha[v]);
        CHECK(std::abs(xy_energy(g, s, nullptr, &shifted) - e0) < 1e-12);
    }
}

TEST_CASE("gauge antisymmetry") {
    const auto g = build_box_lattice(2, 2, 1.0);
    const auto gauge = sample_gauge(g, 2.0, 2.0, 9);
    for (int e = 0; e < g.edge_count(); ++e) {
        const double fwd = gauge.directed(g, e, g.edge(e).u);
        const double rev = gauge.directed(g, e, g.edge(e).v);
        CHECK(fwd + rev == 0.0);
        CHECK(gauge.omega[static_cast<std::size_t>(e)] >= 0.0);
        CHECK(gauge.omega[static_cast<std::size_t>(e)] < kTwoPi);
    }
}

TEST_CASE("shape mismatch is rejected") {
    const auto g = build_box_lattice(2, 1, 1.0);
    CHECK_THROWS_AS(xy_energy(g, SpinState{{0.0, 1.0}}), Error);
    const auto other = build_box_lattice(2, 2, 1.0);
    const auto dis = sample_percolation(other, PercolationKind::Site, 0.5, 1);
    CHECK_THROWS_AS(xy_energy(g, SpinState{std::vector<double>(9, 0.0)}, &dis), Error);
    CHECK_THROWS_AS(local_field(g, SpinState{std::vector<double>(9, 0.0)}, 9), Error);
}

TEST_CASE("local field") {
    const auto iso = WeightedGraph::from_edges(3, {{0, 1, 1.0, EdgeClass::Generic}});
    CHECK(local_field(iso, SpinState{{0.0, 0.0, 0.0}}, 2).magnitude == 0.0);

    const auto one = WeightedGraph::from_edges(2, {{0, 1, 1.7, EdgeClass::Generic}});
    const auto f = local_field(one, SpinState{{0.0, 2.1}}, 0);
    CHECK(f.magnitude == doctest::Approx(1.7));
    CHECK(f.direction == doctest::Approx(2.1));

    const auto g = random_couplings(build_box_lattice(2, 1, 1.0), 11);
    const int centre = 4;
    REQUIRE(g.degree(centre) == 4);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = random_spins(g, seed);
        const auto gauge = sample_gauge(g, 0.5, 0.5, seed);
        std::complex<long double> acc = 0;
        for (const auto& inc : g.neighbours(centre)) {
            const auto& ed = g.edge(inc.edge);
            long double w = gauge.omega[static_cast<std::size_t>(inc.edge)];
            if (ed.u != centre) w = -w;
            acc += static_cast<long double>(ed.coupling) *
                   std::polar(1.0L, static_cast<long double>(s.angles[static_cast<std::size_t>(inc.vertex)]) + w);
        }
        const auto lf = local_field(g, s, centre, nullptr, &gauge);
        const auto got = std::polar(static_cast<long double>(lf.magnitude), static_cast<long double>(lf.direction));
        CHECK(static_cast<double>(std::abs(got - acc)) < 1e-14);
    }
}

TEST_CASE("local field gives the conditional energy") {
    // E(theta_x) = const - |h| cos(theta_x - dir)
    const auto g = random_couplings(build_box_lattice(2, 1, 1.0), 13);
    auto s = random_spins(g, 4);
    const auto gauge = sample_gauge(g, 1.0, 1.0, 4);
    const auto lf = local_field(g, s, 4, nullptr, &gauge);
    s.angles[4] = lf.direction;
    const double e0 = xy_energy(g, s, nullptr, &gauge);
    for (double t : {0.3, 1.9, 4.4}) {
        s.angles[4] = wrap_angle(lf.direction + t);
        CHECK(xy_energy(g, s, nullptr, &gauge) - e0 == doctest::Approx(lf.magnitude * (1 - std::cos(t))).epsilon(1e-12));
    }
}

TEST_CASE("phi4 energy") {
    const auto single = WeightedGraph::from_edges(1, {});
    CHECK(phi4_energy(single, Phi4State{{1.0}, {0.0}}, 0.0, 2.0, 0.5) == doctest::Approx(2.5));
    CHECK(phi4_energy(single, Phi4State{{0.0}, {0.0}}, 1.0, 1.0, 0.0) == std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(phi4_energy(single, Phi4State{{1.0}, {0.0}}, 1.0, 0.0, 0.0), Error);
    CHECK_THROWS_AS(phi4_energy(single, Phi4State{{-1.0}, {0.0}}, 1.0, 1.0, 0.0), Error);

    const auto g = build_box_lattice(2, 1, 1.0);
    Rng rng(21);
    Phi4State st;
    for (int v = 0; v < 9; ++v) {
        st.radii.push_back(0.1 + 2 * rng.uniform());
        st.angles.push_back(kTwoPi * rng.uniform());
    }
    const double beta = 0.8, gq = 1.2, h = -0.4;
    long double ref = 0, r2 = 0;
    for (int v = 0; v < 9; ++v) {
        const long double r = st.radii[static_cast<std::size_t>(v)];
        ref += gq * r * r * r * r + h * r * r - std::log(r);
        r2 += r * r;
    }
    for (const auto& e : g.edges()) {
        ref -= beta * static_cast<long double>(st.radii[static_cast<std::size_t>(e.u)]) * st.radii[static_cast<std::size_t>(e.v)] *
               std::cos(static_cast<long double>(st.angles[static_cast<std::size_t>(e.u)]) - st.angles[static_cast<std::size_t>(e.v)]);
    }
    const double e = phi4_energy(g, st, beta, gq, h);
    CHECK(std::abs(e - static_cast<double>(ref)) < 1e-12);
    CHECK(phi4_energy(g, st, beta, gq, h + 0.3) - e == doctest::Approx(0.3 * static_cast<double>(r2)).epsilon(1e-12));
}

TEST_CASE("single-site measure validation") {
    CHECK_NOTHROW(SingleSiteMeasure::dirac(0.0).validate());
    CHECK_THROWS_AS(SingleSiteMeasure::dirac(-1.0).validate(), Error);
    CHECK_THROWS_AS(SingleSiteMeasure::bernoulli_mix(1.1).validate(), Error);
    CHECK_NOTHROW(SingleSiteMeasure::bernoulli_mix(1.0).validate());
    CHECK_THROWS_AS(SingleSiteMeasure::phi4_radial(0.0, 1.0).validate(), Error);
    CHECK_NOTHROW(SingleSiteMeasure::phi4_radial(0.5, -2.0).validate());
}

TEST_CASE("gauge sampling moments") {
    // 4000 edges per draw
    const auto g = WeightedGraph::from_edges(4001, [] {
        std::vector<Edge> e;
        for (int i = 0; i < 4000; ++i) e.push_back({i, i + 1, 1.0, EdgeClass::Beta1});
        return e;
    }());
    for (double beta : {0.0, 2.0, 50.0}) {
        double s = 0, s2 = 0;
        const int draws = 10;
        for (int r = 0; r < draws; ++r) {
            for (double w : sample_gauge(g, beta, beta, 500 + static_cast<std::uint64_t>(r)).omega) {
                s += std::cos(w);
                s2 += std::cos(w) * std::cos(w);
            }
        }
        const double n = 4000.0 * draws;
        const double mean = s / n;
        const double sigma = std::sqrt((s2 / n - mean * mean) / n);
        const double expect = beta == 0 ? 0.0 : bessel_ratio_expect(beta);
        CHECK_MESSAGE(std::abs(mean - expect) < 4 * sigma + 1e-12, "beta=" << beta << " mean=" << mean);
    }
}

TEST_CASE("gauge sampling follows the edge class") {
    std::vector<Edge> edges;
    for (int i = 0; i < 6000; ++i) edges.push_back({i, i + 1, 1.0, i % 2 ? EdgeClass::Beta2 : EdgeClass::Beta1});
    const auto g = WeightedGraph::from_edges(6001, edges);
    const auto gauge = sample_gauge(g, 30.0, 0.5, 77);
    double c1 = 0, c2 = 0;
    for (int e = 0; e < g.edge_count(); ++e) (e % 2 ? c2 : c1) += std::cos(gauge.omega[static_cast<std::size_t>(e)]);
    CHECK(c1 / 3000 == doctest::Approx(bessel_ratio_expect(30.0)).epsilon(0.01));
    CHECK(std::abs(c2 / 3000 - bessel_ratio_expect(0.5)) < 4 * std::sqrt(0.5 / 3000));
}

TEST_CASE("lambda_n") {
    CHECK(lambda_n(1e4, 1e4, 3) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(lambda_n(2.0, 0.7, 1) == doctest::Approx(std::pow(bessel_ratio_expect(2.0), 2)).epsilon(1e-12));
    CHECK(lambda_n(1e-6, 5.0, 1) < 1e-12);
    const double quad = std::pow(bessel_ratio_expect(10.0), 2) * bessel_ratio_expect(10.0);
    CHECK(std::abs(lambda_n(10.0, 10.0, 2) - quad) < 1e-8);
    CHECK_THROWS_AS(lambda_n(0.0, 1.0, 1), Error);
    CHECK_THROWS_AS(lambda_n(1.0, -1.0, 1), Error);
    CHECK_THROWS_AS(lambda_n(1.0, 1.0, 0), Error);
}

TEST_CASE("lambda_n expansion remainder stays bounded") {
    for (int n : {1, 2, 5}) {
        double prev = -1;
        for (double beta : {20.0, 40.0, 80.0}) {
            const double rem = std::abs(lambda_n(beta, beta, n) - (1 - 1 / beta - (n - 1) / (2 * beta))) * beta * beta;
            CHECK(rem < 10.0 * n);
            if (prev > 0) CHECK(rem <= 1.25 * prev);
            prev = rem;
        }
    }
}
