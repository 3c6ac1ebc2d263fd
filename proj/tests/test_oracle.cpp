#include <doctest.h>

#include <cmath>
#include <vector>

#include "quenchxy/bessel.hpp"
#include "quenchxy/error.hpp"
#include "quenchxy/graph.hpp"
#include "quenchxy/models.hpp"
#include "quenchxy/oracle.hpp"
#include "quenchxy/rng.hpp"

using namespace quenchxy;

namespace {

WeightedGraph two_site(double beta) { return build_rect_lattice({{0, 0}, {0, 1}}, beta); }

WeightedGraph random_couplings(const WeightedGraph& g, std::uint64_t seed, double lo, double hi) {
    Rng rng(seed);
    std::vector<double> c;
    for (int e = 0; e < g.edge_count(); ++e) c.push_back(lo + (hi - lo) * rng.uniform());
    return g.with_couplings(c);
}

}  // namespace

TEST_CASE("single edge two-point is the Bessel ratio") {
    for (double beta : {0.3, 1.0, 2.0, 5.0}) {
        const double ref = bessel_I(1, beta) / bessel_I(0, beta);
        CHECK(std::abs(xy_two_point_quadrature(two_site(beta), 0, 1) - ref) < 1e-12);
    }
    CHECK(xy_two_point_quadrature(two_site(2.0), 0, 1) == doctest::Approx(0.69777).epsilon(1e-5));
    CHECK(std::abs(xy_log_partition(two_site(1.5)) - std::log(bessel_I(0, 1.5))) < 1e-12);
}

TEST_CASE("trivial expectations") {
    const auto g = build_box_lattice(2, 1, 0.0);
    CHECK(std::abs(xy_expectation_quadrature(g, {1, 0, 0, 0, -1, 0, 0, 0, 0})) < 1e-14);
    CHECK(std::abs(xy_expectation_quadrature(g, {2, 0, 0, 1, 0, 0, 0, 0, 0})) < 1e-14);
    const auto h = build_box_lattice(2, 1, 1.3);
    CHECK(xy_expectation_quadrature(h, std::vector<int>(9, 0)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("disconnected vertices decorrelate") {
    const auto g = WeightedGraph::from_edges(4, {{0, 1, 1.0, EdgeClass::Generic}, {2, 3, 1.0, EdgeClass::Generic}});
    CHECK(std::abs(xy_two_point_quadrature(g, 0, 3)) < 1e-14);
    const double r = bessel_ratio_I1_I0(1.0);
    CHECK(std::abs(xy_expectation_quadrature(g, {1, -1, 1, -1}) - r * r) < 1e-12);
}

TEST_CASE("grid doubling stability") {
    QuadratureSpec fine;
    fine.grid = 128;
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const auto g = random_couplings(build_box_lattice(2, 1, 1.0), seed, 0.3, 2.0);
        const auto gauge = sample_gauge(g, 1.0, 1.0, seed);
        for (int y : {1, 4, 8}) {
            const double coarse = xy_two_point_quadrature(g, 0, y, nullptr, &gauge);
            const double dense = xy_two_point_quadrature(g, 0, y, nullptr, &gauge, fine);
            CHECK(std::abs(coarse - dense) < 1e-10);
        }
        CHECK(std::abs(xy_log_partition(g) - xy_log_partition(g, nullptr, nullptr, fine)) < 1e-10);
    }
}

TEST_CASE("ginibre positivity over random instances") {
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const auto g = random_couplings(build_box_lattice(2, 1, 1.0), 100 + static_cast<std::uint64_t>(trial), 0.0, 3.0);
        std::vector<int> m(9);
        for (auto& v : m) v = static_cast<int>(rng.below(5)) - 2;
        CHECK(xy_expectation_quadrature(g, m) >= -1e-12);
    }
}

TEST_CASE("lieb-rivasseau on a four-site chain") {
    for (double beta : {0.5, 1.0, 2.0}) {
        const auto chain = build_rect_lattice({{0, 0}, {0, 3}}, beta);
        const auto H = build_rect_lattice({{0, 0}, {0, 1}}, beta);
        for (int y : {2, 3}) {
            const double lhs = xy_two_point_quadrature(chain, 0, y);
            const double rhs = xy_two_point_quadrature(H, 0, 1) * xy_two_point_quadrature(chain, 1, y);
            CHECK(lhs <= rhs + 1e-10);
        }
    }
}

TEST_CASE("quadrature spec validation") {
    QuadratureSpec s;
    s.grid = 2;
    CHECK_THROWS_AS(s.validate(), Error);
    const auto big = build_box_lattice(2, 3, 1.0);
    QuadratureSpec narrow;
    narrow.max_free_spins = 2;
    CHECK_THROWS_AS(xy_two_point_quadrature(big, 0, 48, nullptr, nullptr, narrow), Error);
}

TEST_CASE("p_zero") {
    CHECK(p_zero(0.3, 0.0, 2) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(p_zero(1 - 1e-12, 1.0, 2) == doctest::Approx(1.0).epsilon(1e-11));
    CHECK(p_zero(0.5, 1.0, 2) == doctest::Approx(1 / (1 + std::exp(-4.0))).epsilon(1e-15));
    CHECK(p_zero(0.5, 1.0, 2) == doctest::Approx(0.982014).epsilon(1e-6));
}

TEST_CASE("wells_a and the moment condition") {
    CHECK(wells_a(SingleSiteMeasure::bernoulli_mix(0.5)) == 0.5);
    CHECK(wells_a(SingleSiteMeasure::bernoulli_mix(0.3)) == 0.3);
    CHECK(wells_a(SingleSiteMeasure::bernoulli_mix(0.8)) == 0.5);

    const auto half = SingleSiteMeasure::bernoulli_mix(0.5);
    const auto base = wells_condition_check(half, 0.5, 0, 1);
    CHECK(base.holds);
    CHECK(std::abs(base.min_margin) < 1e-15);
    CHECK(wells_condition_check(half, 0.5, 12, 12).holds);
    CHECK_FALSE(wells_condition_check(SingleSiteMeasure::bernoulli_mix(0.3), 0.6, 15, 15).holds);

    const auto phi = SingleSiteMeasure::phi4_radial(1.0, 0.0);
    const double a = wells_a(phi);
    CHECK(a > 0);
    CHECK(wells_condition_check(phi, a, 20, 20, 20).holds);
}

TEST_CASE("phi4 radial integral") {
    // <R^2> for density r e^{-r^4} is 1/sqrt(pi)
    const auto r2 = phi4_radial_integral(1.0, 0.0, [](double r) { return r * r; });
    CHECK(std::abs(r2.value - 1 / std::sqrt(3.141592653589793)) < 1e-10);
    CHECK(phi4_radial_integral(2.0, -1.0, [](double) { return 1.0; }).value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("nu prime enumeration") {
    const auto zero = nu_prime_enumerate({{0, 0}, {1, 1}}, 0.0, 0.3);
    for (std::uint32_t cfg = 0; cfg < 16; ++cfg) {
        const int k = __builtin_popcount(cfg);
        CHECK(zero.weights[cfg] == doctest::Approx(std::pow(0.3, k) * std::pow(0.7, 4 - k)).epsilon(1e-12));
    }

    const auto two = nu_prime_enumerate({{0, 0}, {0, 1}}, 2.0, 0.5);
    const double i0 = bessel_I(0, 2.0);
    CHECK(std::abs(two.weights[3] - i0 / (i0 + 3)) < 1e-12);
    CHECK(two.weights[3] == doctest::Approx(0.43178).epsilon(1e-4));

    const auto box = nu_prime_enumerate({{0, 0}, {1, 1}}, 2.0, 0.5);
    double total = 0;
    for (double w : box.weights) total += w;
    CHECK(std::abs(total - 1) < 1e-12);
}

TEST_CASE("domination") {
    const SiteRect box{{0, 0}, {1, 1}};
    const auto flat = nu_prime_enumerate(box, 0.0, 0.4);
    const auto eq = domination_check(flat, p_zero(0.4, 0.0, 2));
    CHECK(eq.holds);
    CHECK(eq.max_conditional == doctest::Approx(0.4).epsilon(1e-12));

    const auto hot = nu_prime_enumerate(box, 2.0, 0.5);
    CHECK(domination_check(hot, p_zero(0.5, 2.0, 2)).holds);
    CHECK_FALSE(domination_check(hot, 0.5).holds);
}

TEST_CASE("wells inequality records") {
    const SiteRect pair{{0, 0}, {0, 1}};
    const auto cold = verify_wells_inequality(pair, 0.0, 0.5, {1, -1});
    CHECK(std::abs(cold.lhs) < 1e-14);
    CHECK(std::abs(cold.rhs) < 1e-14);
    CHECK(cold.holds);

    const auto rec = verify_wells_inequality(pair, 2.0, 0.5, {1, -1});
    CHECK(std::abs(rec.lhs - bessel_I(1, 0.5) / bessel_I(0, 0.5)) < 1e-12);
    CHECK(std::abs(rec.rhs - bessel_I(1, 2.0) / (bessel_I(0, 2.0) + 3)) < 1e-12);
    CHECK(rec.lhs == doctest::Approx(0.24250).epsilon(1e-4));
    CHECK(rec.rhs == doctest::Approx(0.30128).epsilon(1e-4));
    CHECK(rec.holds);

    const auto box = verify_wells_inequality({{0, 0}, {1, 1}}, 2.0, 0.5, {1, -1, 0, 0});
    CHECK(box.holds);
    CHECK(box.rhs - box.lhs > 0);
}

TEST_CASE("phi4 expectations") {
    const auto single = WeightedGraph::from_edges(1, {});
    const double r2 = phi4_expectation_quadrature(single, 1.0, 1.0, 0.0, Phi4Observable::SquaredNorm, 0);
    CHECK(std::abs(r2 - 1 / std::sqrt(3.141592653589793)) < 1e-8);

    const auto pair = WeightedGraph::from_edges(2, {{0, 1, 1.0, EdgeClass::Generic}});
    CHECK(std::abs(phi4_expectation_quadrature(pair, 0.0, 1.0, 0.0, Phi4Observable::Dot, 0, 1)) < 1e-12);

    const double a = wells_a(SingleSiteMeasure::phi4_radial(1.0, 0.0));
    const double dot = phi4_expectation_quadrature(pair, 1.0, 1.0, 0.0, Phi4Observable::Dot, 0, 1);
    CHECK(dot >= a * a * bessel_ratio_I1_I0(a * 1.0) - 1e-8);
}

TEST_CASE("phi4 forest path agrees with the cyclic route") {
    // A path and the same path closed by a zero-coupling edge.
    const auto path = WeightedGraph::from_edges(3, {{0, 1, 1.0, EdgeClass::Generic}, {1, 2, 0.7, EdgeClass::Generic}});
    const auto cycle = WeightedGraph::from_edges(
        3, {{0, 1, 1.0, EdgeClass::Generic}, {1, 2, 0.7, EdgeClass::Generic}, {0, 2, 0.0, EdgeClass::Generic}});
    QuadratureSpec spec;
    spec.grid = 32;
    spec.radial_nodes = 40;
    const double a = phi4_expectation_quadrature(path, 1.2, 1.0, -0.5, Phi4Observable::Dot, 0, 2, spec);
    const double b = phi4_expectation_quadrature(cycle, 1.2, 1.0, -0.5, Phi4Observable::Dot, 0, 2, spec);
    CHECK(a > 0);
    CHECK(std::abs(a - b) < 1e-10);
}
