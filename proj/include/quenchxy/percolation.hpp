#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "quenchxy/graph.hpp"

namespace quenchxy {

enum class PercolationKind : std::uint8_t { Site, Edge };

const char* to_string(PercolationKind k);

struct PercolationSample {
    PercolationKind kind = PercolationKind::Site;
    std::vector<std::uint8_t> occupation;  // by vertex id (Site) or edge index (Edge)
    double p = 1.0;
    std::uint64_t seed = 0;

    bool open(int i) const { return occupation[static_cast<std::size_t>(i)] != 0; }
};

// i.i.d. Bernoulli(p). On extended lattices only Z^d vertices are randomized;
// subdivision vertices are always open.
PercolationSample sample_percolation(const WeightedGraph& graph, PercolationKind kind, double p, std::uint64_t seed);
PercolationSample all_open(const WeightedGraph& graph, PercolationKind kind);

struct CoupledSamples {
    PercolationSample edges;
    PercolationSample sites;
};

// omega_xy = Z_xy Z_yx, r_x = prod over the 2d lattice directions of Z_x,.;
// directions leaving the box still draw their Z so that r_x ~ Bernoulli(u^{2d}).
CoupledSamples edge_from_site_coupling(const WeightedGraph& graph, double u, std::uint64_t seed);

// r_u r_v for site samples, omega_e for edge samples, 1 without disorder.
double occupancy(const WeightedGraph& graph, const PercolationSample* disorder, int edge);

struct ClusterLabeling {
    std::vector<int> label;                   // -1 for closed sites
    std::vector<int> size;                    // per cluster
    std::vector<std::int64_t> diameter;       // L-infinity, in coordinate numerator units
    int count() const { return static_cast<int>(size.size()); }
};

ClusterLabeling label_clusters(const WeightedGraph& graph, const PercolationSample& sample);

struct GoodBoxReport {
    LatticeBox box;
    bool pre_good = false;
    bool good = false;
    std::optional<int> crossing_cluster;      // label among clusters of the sample restricted to the box
    std::int64_t max_other_diameter = 0;
    std::optional<int> center_vertex;         // crossing-cluster vertex nearest the box center
};

// Sub-boxes of the good-box event are y + Lambda_s with ceil(L/10) <= s <= floor(L/2)
// meeting the box. Requires a box-lattice graph covering 2*box.
GoodBoxReport classify_box(const WeightedGraph& graph, const PercolationSample& sample, const LatticeBox& box);

// Shortest open path inside boxA u boxB, lexicographically smallest among shortest.
std::optional<std::vector<int>> connect_centers(const WeightedGraph& graph, const PercolationSample& sample,
                                                const LatticeBox& boxA, const LatticeBox& boxB, int centerA,
                                                int centerB);

struct ProportionEstimate {
    std::int64_t successes = 0;
    std::int64_t trials = 0;
    double estimate = 0;
    double lower = 0;
    double upper = 0;
};

ProportionEstimate wilson_interval(std::int64_t successes, std::int64_t trials, double z = 1.959963984540054);

struct GoodBoxScanRow {
    std::int64_t L = 0;
    ProportionEstimate pre_good;
    ProportionEstimate good;
    std::int64_t adjacent_good_pairs = 0;
    std::int64_t connection_failures = 0;
};

struct GoodBoxScanOptions {
    std::int64_t trials = 2000;
    std::int64_t good_trials = -1;  // trials that also evaluate `good`; -1 means all
    unsigned workers = 1;
};

// Each trial samples percolation around two adjacent boxes Lambda_L and
// Lambda_L + (2L+1)e_1; P[preGood] and P[good] refer to the first box, and
// pairs where both are good are fed to connect_centers.
std::vector<GoodBoxScanRow> goodbox_scan(int d, double p, const std::vector<std::int64_t>& L_list,
                                         const GoodBoxScanOptions& options, std::uint64_t seed);

}  // namespace quenchxy
