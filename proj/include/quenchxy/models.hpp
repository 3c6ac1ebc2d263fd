#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "quenchxy/graph.hpp"
#include "quenchxy/percolation.hpp"

namespace quenchxy {

class Rng;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Reduce an angle to [0, 2pi).
double wrap_angle(double a);

struct SpinState {
    std::vector<double> angles;
};

struct SingleSiteMeasure {
    enum class Kind : std::uint8_t { Dirac, BernoulliMix, Phi4Radial };
    Kind kind = Kind::BernoulliMix;
    double a = 1.0;     // Dirac location
    double pbar = 0.5;  // (1 - pbar) delta_0 + pbar delta_1
    double g = 1.0;     // radial density r exp(-g r^4 - h r^2)
    double h = 0.0;

    static SingleSiteMeasure dirac(double a);
    static SingleSiteMeasure bernoulli_mix(double pbar);
    static SingleSiteMeasure phi4_radial(double g, double h);
    void validate() const;
};

// Phases on directed edges: omega[e] is for edge(e).u -> edge(e).v, the
// reverse direction carries -omega[e].
struct GaugeDisorder {
    std::vector<double> omega;

    double directed(const WeightedGraph& graph, int edge, int from) const;
};

struct Phi4State {
    std::vector<double> radii;
    std::vector<double> angles;
};

// -sum_e J_e occ(e) cos(theta_u - theta_v - omega_uv), compensated summation.
double xy_energy(const WeightedGraph& graph, const SpinState& spins, const PercolationSample* disorder = nullptr,
                 const GaugeDisorder* gauge = nullptr);

struct LocalField {
    double magnitude;
    double direction;
};

// Sum over neighbours y of J_xy occ e^{i(theta_y + omega_xy)}.
LocalField local_field(const WeightedGraph& graph, const SpinState& spins, int x,
                       const PercolationSample* disorder = nullptr, const GaugeDisorder* gauge = nullptr);

// Graph couplings act as multipliers of beta (build Phi^4 graphs with unit couplings).
// Returns +infinity when some radius is 0 (log-Jacobian diverges).
double phi4_energy(const WeightedGraph& graph, const Phi4State& state, double beta, double g, double h);

GaugeDisorder sample_gauge(const WeightedGraph& graph, double beta1, double beta2, std::uint64_t seed);

// (I1/I0(beta1))^2 (I1/I0(beta2))^(n-1).
double lambda_n(double beta1, double beta2, int n);

// Angle with density proportional to exp(kappa cos t) on (-pi, pi]
// (Best-Fisher rejection; uniform when kappa is negligible).
double sample_von_mises(double kappa, Rng& rng);

}  // namespace quenchxy
