#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "quenchxy/graph.hpp"
#include "quenchxy/sampler.hpp"

namespace quenchxy {

class Rng;

// Type1: -2 ln I_k(2 beta1) - (n-1) ln I_k(2 beta2).
// Type2: -4 ln I_k(2 beta1) - (2n-2) ln I_k(2 beta2).
// beta1, beta2 in (0, 50], |k| <= 50, n >= 1.
double potential_V(DualEdgeType type, int n, double beta1, double beta2, std::int64_t k);

// Tabulated for |k| <= k_max; values beyond are computed on demand.
struct DualPotential {
    DualEdgeType type = DualEdgeType::Type1;
    int n = 1;
    double beta1 = 1;
    double beta2 = 1;
    std::vector<double> values;  // V(0..k_max)

    static DualPotential build(DualEdgeType type, int n, double beta1, double beta2, int k_max = 50);
    double operator()(std::int64_t k) const;
    // min over 0 < |k| < k_max of V(k-1) + V(k+1) - 2 V(k).
    double convexity_margin() const;
};

struct LammersRecord {
    int n = 1;
    double beta1 = 0;
    double beta2 = 0;
    double type1_margin = 0;  // V(0) + ln 2 - V(1)
    double type2_margin = 0;
    bool type1_ok = false;
    bool type2_ok = false;
    // Ratio surrogate: I0/I1(2 beta1) <= 2^(1/8) and I0/I1(2 beta2) <= e^(1/(4(n-1))).
    double ratio1 = 0;
    double ratio2 = 0;
    bool surrogate_ok = false;
    // ln 2 minus the Type1 / Type2 increments that the surrogate guarantees at most.
    double surrogate_type1_margin = 0;
    double surrogate_type2_margin = 0;
};

LammersRecord lammers_check(int n, double beta1, double beta2);

double threshold_beta1();
double threshold_beta2(int n);  // n >= 2

void write_lammers_csv(std::ostream& out, const std::vector<LammersRecord>& rows);

struct HeightState {
    std::vector<std::int64_t> h;  // per dual face
    std::vector<char> pinned;     // faces touching the outer face, held at 0
};

// Integer heights on the faces of the extended triangulation with weight
// exp(-sum over dual edges V_type(h_u - h_v)).
class HeightModel {
public:
    HeightModel(DualGraph dual, int n, double beta1, double beta2);

    const DualGraph& dual() const { return dual_; }
    const DualPotential& potential(DualEdgeType t) const { return t == DualEdgeType::Type1 ? type1_ : type2_; }
    const std::vector<int>& free_faces() const { return free_; }

    HeightState initial_state() const;
    double energy(const HeightState& s) const;
    // Weights of the conditional law of h_f given its neighbours: values k0, k0+1, ...
    // with relative tail mass below 1e-12 dropped. Precision error if the window
    // grows beyond a million values.
    std::vector<double> conditional_law(const HeightState& s, int face, std::int64_t& k0) const;
    // Sequential exact heat-bath over the free faces.
    void sweep(HeightState& s, Rng& rng) const;

private:
    DualGraph dual_;
    DualPotential type1_;
    DualPotential type2_;
    std::vector<std::vector<Incidence>> adjacency_;
    std::vector<int> free_;
};

struct DelocalizationRow {
    std::int64_t L = 0;
    int faces = 0;
    int free_faces = 0;
    EstimatorResult abs_height;  // E|h(0)| at the origin face
};

struct DelocalizationResult {
    std::vector<DelocalizationRow> rows;
    bool exploratory = false;  // Lammers check fails for some edge type
    // Weighted least-squares slope of E|h(0)| against ln L and its z-score.
    double trend_slope = 0;
    double trend_z = 0;
    // Every consecutive pair satisfies next >= previous - 3 sigma_combined.
    bool nondecreasing = true;
};

// Heights on the dual of the extended triangulation of [-L, L]^2 for each L.
DelocalizationResult delocalization_experiment(int n, double beta1, double beta2, const std::vector<std::int64_t>& sizes,
                                               const ChainSchedule& schedule, unsigned workers = 1);

void write_delocalization_csv(std::ostream& out, const DelocalizationResult& result);

}  // namespace quenchxy
