#pragma once

namespace quenchxy {

// Modified Bessel function of the first kind by its power series.
// Valid for 0 <= x <= 100; larger arguments raise a range error.
double bessel_I(int k, double x);

// ln I_k(x) from the same series, without forming I_k itself.
double log_bessel_I(int k, double x);

// I_1(x)/I_0(x) for any x >= 0 (series below 50, asymptotic expansion above).
double bessel_ratio_I1_I0(double x);

}  // namespace quenchxy
