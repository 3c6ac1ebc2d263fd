#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <vector>

#include "quenchxy/bessel.hpp"
#include "quenchxy/dual_height.hpp"
#include "quenchxy/error.hpp"
#include "quenchxy/graph.hpp"
#include "quenchxy/rng.hpp"

using namespace quenchxy;

namespace {

// I_k(x) / I_0(x) ratios from (1/pi) int_0^pi e^{x (cos t - 1)} cos(k t) dt.
double quad_ratio(int k, double x) {
    const int nodes = 4000;
    const double pi = kTwoPi / 2;
    long double num = 0, den = 0;
    for (int j = 0; j <= nodes; ++j) {
        const double t = pi * j / nodes;
        const long double w = (j == 0 || j == nodes ? 0.5L : 1.0L) * std::exp(x * (std::cos(t) - 1));
        num += w * std::cos(k * t);
        den += w;
    }
    return static_cast<double>(num / den);
}

HeightModel small_model(int n, double b1, double b2, std::int64_t L = 1) {
    return HeightModel(build_dual_graph(build_extended_triangulation(L, n, b1, b2)), n, b1, b2);
}

}  // namespace

TEST_CASE("potential closed forms") {
    for (int n : {1, 2, 5}) {
        for (double beta : {0.4, 1.0, 3.0}) {
            CHECK(potential_V(DualEdgeType::Type1, n, beta, beta, 0) ==
                  doctest::Approx(-(n + 1) * std::log(bessel_I(0, 2 * beta))).epsilon(1e-13));
            for (std::int64_t k : {1, 2, 7, 30}) {
                CHECK(potential_V(DualEdgeType::Type1, n, beta, 0.7 * beta, k) == potential_V(DualEdgeType::Type1, n, beta, 0.7 * beta, -k));
                CHECK(potential_V(DualEdgeType::Type2, n, beta, 0.7 * beta, k) == potential_V(DualEdgeType::Type2, n, beta, 0.7 * beta, -k));
            }
        }
    }
    const double step = potential_V(DualEdgeType::Type2, 2, 3.0, 3.0, 1) - potential_V(DualEdgeType::Type2, 2, 3.0, 3.0, 0);
    const double ref = -6 * std::log(quad_ratio(1, 6.0));
    CHECK(std::abs(step - ref) < 1e-10);
}

TEST_CASE("potential differences decompose into Bessel ratios") {
    for (int n : {1, 3}) {
        const double b1 = 1.3, b2 = 0.6;
        for (int k : {1, 2, 5}) {
            const double direct = potential_V(DualEdgeType::Type1, n, b1, b2, k) - potential_V(DualEdgeType::Type1, n, b1, b2, 0);
            const double ratio = -2 * std::log(quad_ratio(k, 2 * b1)) - (n - 1) * std::log(quad_ratio(k, 2 * b2));
            CHECK(std::abs(direct - ratio) < 1e-10);
        }
        for (int k : {9, 20}) {
            const double direct = potential_V(DualEdgeType::Type2, n, b1, b2, k) - potential_V(DualEdgeType::Type2, n, b1, b2, 0);
            const double ratio = 4 * std::log(bessel_I(0, 2 * b1) / bessel_I(k, 2 * b1)) +
                                 (2 * n - 2) * std::log(bessel_I(0, 2 * b2) / bessel_I(k, 2 * b2));
            CHECK(std::abs(direct - ratio) < 1e-10 * std::max(1.0, std::abs(direct)));
        }
    }
}

TEST_CASE("potential convexity") {
    for (int n : {1, 2, 4, 8}) {
        for (double b1 : {0.2, 1.0, 5.0, 20.0}) {
            for (double b2 : {0.3, 2.0, 30.0}) {
                for (auto t : {DualEdgeType::Type1, DualEdgeType::Type2}) {
                    const auto p = DualPotential::build(t, n, b1, b2, 31);
                    CHECK(p.convexity_margin() >= -1e-10);
                    CHECK(p(40) == doctest::Approx(potential_V(t, n, b1, b2, 40)).epsilon(1e-13));
                }
            }
        }
    }
}

TEST_CASE("potential domain") {
    CHECK_THROWS_AS(potential_V(DualEdgeType::Type1, 0, 1.0, 1.0, 0), Error);
    CHECK_THROWS_AS(potential_V(DualEdgeType::Type1, 1, 0.0, 1.0, 0), Error);
    CHECK_THROWS_AS(potential_V(DualEdgeType::Type1, 1, 1.0, 51.0, 0), Error);
}

TEST_CASE("thresholds") {
    const double t1 = threshold_beta1();
    CHECK(bessel_I(0, 2 * t1) / bessel_I(1, 2 * t1) == doctest::Approx(std::pow(2.0, 0.125)).epsilon(1e-8));
    // independent bisection on the quadrature ratio
    double lo = 0.1, hi = 50;
    for (int i = 0; i < 80; ++i) {
        const double mid = (lo + hi) / 2;
        (1 / quad_ratio(1, 2 * mid) > std::pow(2.0, 0.125) ? lo : hi) = mid;
    }
    CHECK(std::abs(t1 - lo) < 1e-8);
    CHECK(t1 == doctest::Approx(3.157940562645).epsilon(1e-10));
    CHECK(threshold_beta2(2) == doctest::Approx(1.316904329083).epsilon(1e-10));
    CHECK(threshold_beta2(2) < threshold_beta2(8));
    CHECK(threshold_beta2(8) < threshold_beta2(32));
    CHECK_THROWS_AS(threshold_beta2(1), Error);
}

TEST_CASE("lammers check limits") {
    const auto cold = lammers_check(3, 0.01, 0.01);
    CHECK_FALSE(cold.type1_ok);
    CHECK_FALSE(cold.type2_ok);
    const auto hot = lammers_check(3, 50.0, 50.0);
    CHECK(hot.type1_ok);
    CHECK(hot.type2_ok);
    CHECK(hot.type1_margin == doctest::Approx(std::log(2.0) + potential_V(DualEdgeType::Type1, 3, 50, 50, 0) -
                                              potential_V(DualEdgeType::Type1, 3, 50, 50, 1)));
}

TEST_CASE("type1 margin is positive above the thresholds") {
    for (int n : {2, 4, 8, 16}) {
        const auto r = lammers_check(n, threshold_beta1() + 0.1, threshold_beta2(n) + 0.1);
        CHECK(r.type1_ok);
        CHECK(r.type1_margin > 0);
        CHECK(r.surrogate_ok);
        CHECK(r.type1_margin >= r.surrogate_type1_margin - 1e-12);
    }
}

TEST_CASE("lammers csv") {
    std::ostringstream out;
    write_lammers_csv(out, {lammers_check(2, 4.0, 2.0)});
    const auto text = out.str();
    CHECK(text.find("n,beta1,beta2") == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
}

TEST_CASE("height model fixture") {
    const auto m = small_model(1, 1.0, 1.0);
    CHECK(m.dual().face_count() == 8);
    CHECK(m.free_faces().size() == 2);
    const auto s = m.initial_state();
    for (int f = 0; f < 8; ++f) CHECK(s.h[static_cast<std::size_t>(f)] == 0);
    for (int f : m.free_faces()) CHECK_FALSE(s.pinned[static_cast<std::size_t>(f)]);
}

TEST_CASE("conditional law matches the truncated sum") {
    const auto m = small_model(2, 0.8, 0.5);
    auto s = m.initial_state();
    const int f = m.free_faces()[0];
    s.h[static_cast<std::size_t>(m.free_faces()[1])] = 3;
    std::int64_t k0 = 0;
    const auto law = m.conditional_law(s, f, k0);
    std::map<std::int64_t, double> ref;
    double total = 0;
    for (std::int64_t h = -20; h <= 20; ++h) {
        s.h[static_cast<std::size_t>(f)] = h;
        ref[h] = std::exp(-m.energy(s));
        total += ref[h];
    }
    double law_total = 0;
    for (double w : law) law_total += w;
    for (std::int64_t h = -20; h <= 20; ++h) {
        const std::int64_t i = h - k0;
        const double got = (i >= 0 && i < static_cast<std::int64_t>(law.size())) ? law[static_cast<std::size_t>(i)] / law_total : 0.0;
        CHECK(std::abs(got - ref[h] / total) < 1e-11);
    }
}

TEST_CASE("two free faces follow the enumerated joint law") {
    const auto m = small_model(1, 0.9, 0.9);
    const int a = m.free_faces()[0], b = m.free_faces()[1];
    auto s = m.initial_state();
    std::map<std::pair<int, int>, double> ref;
    double total = 0;
    for (int x = -10; x <= 10; ++x) {
        for (int y = -10; y <= 10; ++y) {
            s.h[static_cast<std::size_t>(a)] = x;
            s.h[static_cast<std::size_t>(b)] = y;
            total += ref[{x, y}] = std::exp(-m.energy(s));
        }
    }
    s = m.initial_state();
    Rng rng(5);
    std::map<std::pair<int, int>, double> counts;
    const int sweeps = 200000;
    for (int t = 0; t < sweeps; ++t) {
        m.sweep(s, rng);
        counts[{static_cast<int>(s.h[static_cast<std::size_t>(a)]), static_cast<int>(s.h[static_cast<std::size_t>(b)])}] += 1;
    }
    double tv = 0;
    for (const auto& [k, w] : ref) tv += std::abs(counts[k] / sweeps - w / total);
    CHECK(tv / 2 < 0.01);
}

TEST_CASE("steep potentials pin the heights") {
    const auto m = small_model(1, 0.001, 0.001, 2);
    auto s = m.initial_state();
    Rng rng(6);
    for (int t = 0; t < 100; ++t) m.sweep(s, rng);
    for (auto h : s.h) CHECK(h == 0);
}

TEST_CASE("delocalization experiment") {
    ChainSchedule sch;
    sch.thermalization = 200;
    sch.measurement = 4000;
    sch.seed = 7;

    SUBCASE("smallest domain matches enumeration") {
        const double b = 0.9;
        const auto m = small_model(1, b, b);
        const int origin = m.dual().origin_face;
        auto s = m.initial_state();
        double total = 0, abs_h = 0;
        for (int x = -15; x <= 15; ++x) {
            for (int y = -15; y <= 15; ++y) {
                s.h[static_cast<std::size_t>(m.free_faces()[0])] = x;
                s.h[static_cast<std::size_t>(m.free_faces()[1])] = y;
                const double w = std::exp(-m.energy(s));
                total += w;
                abs_h += w * static_cast<double>(std::abs(s.h[static_cast<std::size_t>(origin)]));
            }
        }
        const auto r = delocalization_experiment(1, b, b, {1}, sch);
        REQUIRE(r.rows.size() == 1);
        CHECK(r.rows[0].faces == 8);
        CHECK(std::abs(r.rows[0].abs_height.mean - abs_h / total) < 3.5 * r.rows[0].abs_height.std_error + 1e-12);
    }
    SUBCASE("localized parameters stay at zero") {
        const auto r = delocalization_experiment(1, 0.001, 0.001, {1, 2, 4}, sch);
        CHECK(r.exploratory);
        for (const auto& row : r.rows) CHECK(row.abs_height.mean == 0.0);
    }
    SUBCASE("passing parameters grow") {
        const auto r = delocalization_experiment(2, 6.0, 6.0, {1, 2, 4}, sch);
        CHECK_FALSE(r.exploratory);
        CHECK(r.nondecreasing);
        CHECK(r.trend_slope > 0);
        std::ostringstream out;
        write_delocalization_csv(out, r);
        const auto text = out.str();
        CHECK(std::count(text.begin(), text.end(), '\n') == 4);
    }
}
