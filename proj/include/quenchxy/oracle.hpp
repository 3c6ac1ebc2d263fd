#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "quenchxy/graph.hpp"
#include "quenchxy/models.hpp"
#include "quenchxy/percolation.hpp"

namespace quenchxy {

struct QuadratureSpec {
    int grid = 64;            // points per angle
    int max_free_spins = 4;   // widest intermediate table during variable elimination
    int radial_nodes = 200;   // Gauss-Legendre nodes for Phi^4 radii

    void validate() const;
};

// Weight exp(J cos(theta_u - theta_v - omega)).
struct AngleBond {
    int u;
    int v;
    double J;
    double omega;
};

struct AngleQuadrature {
    std::complex<double> expectation;  // <exp(i sum_x m_x theta_x)>
    double log_partition;              // ln of the angle-averaged partition function
};

// Exact evaluation on a periodic grid by variable elimination. One angle per
// connected component is pinned to 0.
AngleQuadrature angle_model_quadrature(int n, const std::vector<AngleBond>& bonds, const std::vector<int>& m,
                                       const QuadratureSpec& spec = {});

std::vector<AngleBond> xy_bonds(const WeightedGraph& graph, const PercolationSample* disorder,
                                const GaugeDisorder* gauge);

// <cos(sum_x m_x theta_x)>.
double xy_expectation_quadrature(const WeightedGraph& graph, const std::vector<int>& m,
                                 const PercolationSample* disorder = nullptr, const GaugeDisorder* gauge = nullptr,
                                 const QuadratureSpec& spec = {});

double xy_two_point_quadrature(const WeightedGraph& graph, int x, int y, const PercolationSample* disorder = nullptr,
                               const GaugeDisorder* gauge = nullptr, const QuadratureSpec& spec = {});

// ln of Z = integral over uniform angles of exp(sum_e J_e occ(e) cos(...)).
double xy_log_partition(const WeightedGraph& graph, const PercolationSample* disorder = nullptr,
                        const GaugeDisorder* gauge = nullptr, const QuadratureSpec& spec = {});

double p_zero(double pbar, double beta, int d);

// Normalized integral of f against a Phi^4 radial measure (adaptive Gauss-Kronrod).
struct RadialIntegral {
    double value;
    double abs_value;  // integral of |f|
};
RadialIntegral phi4_radial_integral(double g, double h, const std::function<double(double)>& f);

struct WellsConditionResult {
    bool holds = true;
    double min_margin = 0;  // smallest value; relative to the integral of |integrand| for quadrature measures
    int worst_m = 0;
    int worst_n = 0;
};

// Checks the moment condition for all m <= m_max, n <= n_max (and m + n <= total_max when >= 0).
WellsConditionResult wells_condition_check(const SingleSiteMeasure& kappa, double a, int m_max, int n_max,
                                           int total_max = -1);

double wells_a(const SingleSiteMeasure& kappa);

struct NuPrimeDistribution {
    int sites = 0;
    double beta = 0;
    double pbar = 0;
    std::vector<double> weights;  // indexed by bitmask, bit x = r_x
    std::vector<double> log_z;    // ln Z_{Lambda,beta,r}
};

NuPrimeDistribution nu_prime_enumerate(const SiteRect& box, double beta, double pbar, const QuadratureSpec& spec = {},
                                       unsigned workers = 1);

struct DominationResult {
    bool holds = false;
    double max_conditional = 0;
    int argmax_site = -1;
    std::uint32_t argmax_config = 0;
};

DominationResult domination_check(const NuPrimeDistribution& nu, double p0);

struct WellsInequalityRecord {
    double a = 0;
    double lhs = 0;           // <cos(m theta)> at couplings a^2 beta
    double lhs_weighted = 0;  // a^{|supp m|} * lhs, the Dirac-measure side of Wells' inequality
    double rhs = 0;           // sum_r nu'(r) <cos(m theta)>_{beta, r}
    bool holds = false;       // lhs <= rhs + 1e-10
};

WellsInequalityRecord verify_wells_inequality(const SiteRect& box, double beta, double pbar, const std::vector<int>& m,
                                              const QuadratureSpec& spec = {}, unsigned workers = 1);

enum class Phi4Observable { Dot, SquaredNorm };

// Graph couplings multiply beta. Dot needs x, y; SquaredNorm uses x.
double phi4_expectation_quadrature(const WeightedGraph& graph, double beta, double g, double h, Phi4Observable obs,
                                   int x, int y = -1, const QuadratureSpec& spec = {});

}  // namespace quenchxy
