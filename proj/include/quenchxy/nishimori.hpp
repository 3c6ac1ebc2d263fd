#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "quenchxy/graph.hpp"
#include "quenchxy/oracle.hpp"
#include "quenchxy/percolation.hpp"
#include "quenchxy/sampler.hpp"

namespace quenchxy {

class Rng;

// Lattice path from the origin to k(1,...,1) using unit steps e_axis.
struct IncreasingPath {
    int d = 0;
    int k = 0;
    std::vector<int> steps;  // axis of each step, d*k entries

    bool valid() const;
};

// Uniform over the orderings of the step multiset.
IncreasingPath sample_increasing_path(int d, int k, Rng& rng);

// Number of directed edges traversed by both paths.
int shared_edges(const IncreasingPath& a, const IncreasingPath& b);

// All distinct paths in lexicographic step order; Size error above `limit`.
std::vector<IncreasingPath> enumerate_increasing_paths(int d, int k, std::size_t limit = 5000);

// Exact law of shared_edges for two independent uniform paths: entry j is P[= j], j = 0..dk.
std::vector<double> exact_intersection_law(int d, int k);

// Entry j estimates P[shared_edges >= j], j = 0..dk, with Wilson intervals.
// Trials run in fixed chunks with their own seed streams, so worker count does not matter.
std::vector<ProportionEstimate> intersection_tail(int d, int k, std::int64_t trials, std::uint64_t seed,
                                                  unsigned workers = 1);

struct TailSlope {
    double slope = 0;
    double std_error = 0;
    int points = 0;
};

// Weighted least-squares fit of ln P[>= j] against j over j >= 1 with at least
// `min_successes` hits.
TailSlope log_tail_slope(const std::vector<ProportionEstimate>& tail, std::int64_t min_successes = 10);

void write_tail_csv(std::ostream& out, const std::vector<ProportionEstimate>& tail);

enum class EdgeFactor : std::uint8_t { Phase, One };

struct GaugeIdentityRecord {
    std::complex<double> lhs;
    std::complex<double> rhs;
    double difference = 0;
};

// Each edge e carries inverse temperature beta_e (beta2 on Beta2 edges, beta1
// otherwise) for both its phase density e^{beta_e cos w} and its spin coupling
// beta_e cos(theta_u - theta_v + w). lhs averages <prod_e f_e(theta_u - theta_v + w_e)>
// over the phases by an outer periodic grid; rhs = prod_e E[f_e(w)].
// At most three edges.
GaugeIdentityRecord gauge_identity_check(const WeightedGraph& graph, const std::vector<EdgeFactor>& factors,
                                         double beta1, double beta2, const QuadratureSpec& spec = {});

// Extended-lattice vertices visited by the path, starting at the origin.
std::vector<int> path_vertices(const WeightedGraph& extended, const IncreasingPath& path);

// Monte Carlo of E[cos(sum of directed phases along the path)] with only the
// path's phases sampled.
EstimatorResult omega_path_estimate(const WeightedGraph& extended, const IncreasingPath& path, double beta1,
                                    double beta2, std::int64_t samples, std::uint64_t seed);

struct NishimoriOptions {
    int d = 3;
    std::int64_t L = 3;
    int n = 1;
    double beta1 = 1;
    double beta2 = 1;
    int k = 1;  // target k(1,...,1)
    int n_disorder = 4;
    ChainSchedule schedule;
    std::int64_t omega_samples = 100000;
    unsigned workers = 1;
};

struct NishimoriRecord {
    EstimatorResult correlation;  // E[<cos(theta_0 - theta_k)>]
    std::vector<EstimatorResult> per_disorder;
    double lambda_power = 0;  // lambda_n^{dk}
    EstimatorResult omega_path;
};

NishimoriRecord nishimori_correlation_experiment(const NishimoriOptions& options);

void write_nishimori_csv(std::ostream& out, const NishimoriOptions& options, const NishimoriRecord& record);

}  // namespace quenchxy
