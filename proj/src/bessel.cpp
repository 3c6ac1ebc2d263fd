#include "quenchxy/bessel.hpp"

#include <cmath>
#include <limits>

#include "quenchxy/error.hpp"

namespace quenchxy {

namespace {

constexpr int kMaxTerms = 500;

void check_argument(int k, double x) {
    require(k >= 0, ErrorKind::Domain, "Bessel order must be >= 0");
    require(x >= 0 && !std::isnan(x), ErrorKind::Domain, "Bessel argument must be >= 0");
    require(x <= 100, ErrorKind::Range, "Bessel argument above 100 is outside the series regime");
}

// Sum of t_i / t_0 with t_{i+1} = t_i (x/2)^2 / ((i+1)(i+1+k)).
double relative_series(int k, double x) {
    const double q = 0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int i = 0; i < kMaxTerms; ++i) {
        term *= q / ((i + 1.0) * (i + 1.0 + k));
        sum += term;
        if (term < 1e-16 * sum) return sum;
    }
    fail(ErrorKind::Precision, "Bessel series did not converge");
}

// 1 / ((i+1)(i+1+k)) for k = 0, 1.
struct InverseTables {
    double k0[kMaxTerms];
    double k1[kMaxTerms];
    InverseTables() {
        for (int i = 0; i < kMaxTerms; ++i) {
            k0[i] = 1.0 / ((i + 1.0) * (i + 1.0));
            k1[i] = 1.0 / ((i + 1.0) * (i + 2.0));
        }
    }
};

const InverseTables kInverse;

}  // namespace

double log_bessel_I(int k, double x) {
    check_argument(k, x);
    if (x == 0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return k * std::log(0.5 * x) - std::lgamma(k + 1.0) + std::log(relative_series(k, x));
}

double bessel_I(int k, double x) {
    check_argument(k, x);
    if (x == 0) return k == 0 ? 1.0 : 0.0;
    const double log_t0 = k * std::log(0.5 * x) - std::lgamma(k + 1.0);
    if (log_t0 < -745) return 0.0;
    return std::exp(log_t0) * relative_series(k, x);
}

double bessel_ratio_I1_I0(double x) {
    require(x >= 0 && !std::isnan(x), ErrorKind::Domain, "Bessel argument must be >= 0");
    if (x == 0) return 0.0;
    if (x <= 50) {
        // both series at once; the k = 0 terms dominate the k = 1 terms
        const double q = 0.25 * x * x;
        double t0 = 1, t1 = 1, s0 = 1, s1 = 1;
        for (int i = 0; i < kMaxTerms; ++i) {
            t0 *= q * kInverse.k0[i];
            t1 *= q * kInverse.k1[i];
            s0 += t0;
            s1 += t1;
            if (t0 < 1e-17 * s0 && t1 < 1e-17 * s1) return 0.5 * x * s1 / s0;
        }
        fail(ErrorKind::Precision, "Bessel series did not converge");
    }
    // I_nu(x) ~ e^x / sqrt(2 pi x) * sum_j (-1)^j a_j(nu) / x^j,
    // a_j(nu) = prod_{i=1..j} (4 nu^2 - (2i-1)^2) / (j! 8^j).
    double s0 = 1, s1 = 1, t0 = 1, t1 = 1;
    for (int j = 1; j <= 14; ++j) {
        const double odd = (2.0 * j - 1) * (2.0 * j - 1);
        t0 *= -(0.0 - odd) / (j * 8.0 * x);
        t1 *= -(4.0 - odd) / (j * 8.0 * x);
        s0 += t0;
        s1 += t1;
    }
    return s1 / s0;
}

}  // namespace quenchxy
