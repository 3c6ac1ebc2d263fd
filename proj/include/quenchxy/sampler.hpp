#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "quenchxy/graph.hpp"
#include "quenchxy/models.hpp"
#include "quenchxy/percolation.hpp"
#include "quenchxy/rng.hpp"

namespace quenchxy {

enum class Algorithm : std::uint8_t { Metropolis, HeatBath, EmbeddedCluster, Mixed };

const char* to_string(Algorithm a);

struct ChainSchedule {
    std::int64_t thermalization = 1000;
    std::int64_t measurement = 10000;
    std::int64_t measure_every = 1;
    std::uint64_t seed = 0;
    Algorithm algorithm = Algorithm::Mixed;
    bool cold_start = false;  // XY chains: all angles 0 instead of uniform

    void validate() const;
};

struct EstimatorResult {
    double mean = 0;
    double std_error = 0;
    double tau_int = 0.5;  // in sweeps
    std::int64_t n_samples = 0;
};

// Mean and error of a correlated series; tau_int by automatic windowing
// (smallest W with W >= c * tau(W)). tau_int is in units of the series step.
EstimatorResult estimate_series(std::span<const double> series, double c = 6.0);

// Average over independent disorder samples; the error is the larger of the
// between-sample spread and the pooled chain errors.
EstimatorResult combine_disorder(const std::vector<EstimatorResult>& parts);

// Effective couplings of an XY system laid out per vertex. Each link stands
// for the term J cos(theta_x - theta_y - phase).
class XYKernel {
public:
    struct Link {
        int y;
        double J;
        double phase;
        double jc;  // J cos(phase)
        double js;  // J sin(phase)
    };

    XYKernel(const WeightedGraph& graph, const PercolationSample* disorder = nullptr,
             const GaugeDisorder* gauge = nullptr);

    int size() const { return static_cast<int>(offsets_.size()) - 1; }
    bool has_gauge() const { return has_gauge_; }
    std::span<const Link> links(int x) const {
        return {links_.data() + offsets_[static_cast<std::size_t>(x)], links_.data() + offsets_[static_cast<std::size_t>(x) + 1]};
    }

    // sum_y J e^{i(theta_y + phase)}.
    std::complex<double> field(const SpinState& s, int x) const;
    // E[e^{i theta_x} | all other spins].
    std::complex<double> conditional_spin(const SpinState& s, int x) const;
    void conditional_spins(const SpinState& s, std::vector<std::complex<double>>& out) const;
    bool linked(int x, int y) const;

    void heatbath_sweep(SpinState& s, Rng& rng) const;
    double metropolis_sweep(SpinState& s, double eps, Rng& rng) const;
    // Reflection cluster about a random axis; returns the cluster size.
    int embedded_cluster_update(SpinState& s, Rng& rng) const;

private:
    std::vector<std::size_t> offsets_;
    std::vector<Link> links_;
    bool has_gauge_ = false;
};

void heatbath_sweep(const WeightedGraph& graph, SpinState& spins, const PercolationSample* disorder,
                    const GaugeDisorder* gauge, Rng& rng);
double metropolis_sweep(const WeightedGraph& graph, SpinState& spins, const PercolationSample* disorder,
                        const GaugeDisorder* gauge, double eps, Rng& rng);
// Unsupported error when gauge disorder is given.
int embedded_cluster_update(const WeightedGraph& graph, SpinState& spins, const PercolationSample* disorder, Rng& rng,
                            const GaugeDisorder* gauge = nullptr);

// Angle heat-bath given the radii, then a log-space Metropolis move per radius.
// Graph couplings multiply beta. Returns the radial acceptance rate.
double phi4_sweep(const WeightedGraph& graph, Phi4State& state, double beta, double g, double h, Rng& rng,
                  double log_step = 0.5);

struct ChainModel {
    enum class Kind : std::uint8_t { XY, Phi4 };
    Kind kind = Kind::XY;
    const WeightedGraph* graph = nullptr;
    const PercolationSample* disorder = nullptr;
    const GaugeDisorder* gauge = nullptr;
    double beta = 1;  // Phi4 only; XY couplings live on the graph
    double g = 1;
    double h = 0;
};

enum class PairEstimator : std::uint8_t {
    Conditional,  // each spin replaced by its mean given its neighbours
    Plain,
};

// Averages (or sums) cos(theta_x - theta_y) over its pairs; for Phi4, S_x . S_y.
struct ChainObservable {
    std::string name;
    std::vector<std::pair<int, int>> pairs;
    bool sum = false;
    PairEstimator estimator = PairEstimator::Conditional;
};

struct ChainOutput {
    std::vector<EstimatorResult> results;  // per observable
    double acceptance = 1;                 // Metropolis / radial moves
    double metropolis_eps = 0;
};

// Conditional XY estimators are unbiased for the same Gibbs measure; Phi4
// observables are always plain.
ChainOutput run_chain(const ChainModel& model, const ChainSchedule& schedule,
                      const std::vector<ChainObservable>& observables);

struct QuenchedOptions {
    int d = 2;
    std::int64_t L = 8;
    double p = 1;
    double beta = 1;
    PercolationKind kind = PercolationKind::Site;
    std::vector<std::int64_t> distances;  // along the coordinate axes
    int n_disorder = 8;
    ChainSchedule schedule;
    unsigned workers = 1;
    // Base points range over Lambda_base_radius and all 2d axis directions;
    // 0 keeps only the origin and +e_1.
    std::int64_t base_radius = 0;
    // Instead of base points, every pair {x, x + r e_a} inside Lambda_L.
    bool all_pairs = false;
    // When > 0, also the window average (1/|Lambda_m|) sum_{y in Lambda_m} cos(theta_0 - theta_y).
    std::int64_t window_m = 0;
};

struct QuenchedResult {
    std::vector<EstimatorResult> combined;                  // per distance, then the window average if requested
    std::vector<std::vector<EstimatorResult>> per_disorder;  // [disorder][observable]
};

QuenchedResult quenched_two_point(const QuenchedOptions& options);

// Single-vertex form: E_p[<cos(theta_0 - theta_x)>] on Lambda_L for a vertex x.
EstimatorResult quenched_two_point(int d, std::int64_t L, double p, double beta, std::span<const std::int64_t> x,
                                   PercolationKind kind, int n_disorder, const ChainSchedule& schedule,
                                   unsigned workers = 1);

// (1/|Lambda_R|) sum_{x in Lambda_R} (1/|Lambda_m|) sum_{y in x+Lambda_m} <cos(theta_x - theta_y)>
// for one disorder sample on Lambda_{R+m}.
EstimatorResult spatial_average(int d, std::int64_t R, std::int64_t m, double p, double beta, PercolationKind kind,
                                std::uint64_t disorder_seed, const ChainSchedule& schedule);

// sum over the boundary of the extended box Lambda_R^n of <cos(theta_0 - theta_y)>.
EstimatorResult phi_R_estimator(int d, int n, double beta1, double beta2, std::int64_t R, const ChainSchedule& schedule);

enum class DecayVerdict : std::uint8_t { Exponential, PowerLaw, Inconclusive };

const char* to_string(DecayVerdict v);

struct DecayFit {
    double amplitude = 0;
    double parameter = 0;  // rate or exponent
    double parameter_error = 0;
    double rms_residual = 0;  // normalized residuals over all points
};

struct DecayClassification {
    DecayVerdict verdict = DecayVerdict::Inconclusive;
    DecayFit exponential;
    DecayFit power_law;
    int significant_points = 0;
};

// Fits log v against x and against log x by weighted least squares on the
// points with v > 2 sigma; points below are kept as censored values when
// scoring. A model wins when the other model's RMS residual is at least 3
// times its own (floored at 1), it fits (RMS <= 3) and its parameter is
// positive at 3 sigma.
DecayClassification decay_classifier(std::span<const double> distances, std::span<const double> values,
                                     std::span<const double> errors);

}  // namespace quenchxy
