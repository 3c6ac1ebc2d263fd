#include "quenchxy/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "quenchxy/bessel.hpp"
#include "quenchxy/error.hpp"
#include "quenchxy/parallel.hpp"

namespace quenchxy {

const char* to_string(Algorithm a) {
    switch (a) {
        case Algorithm::Metropolis: return "Metropolis";
        case Algorithm::HeatBath: return "HeatBath";
        case Algorithm::EmbeddedCluster: return "EmbeddedCluster";
        case Algorithm::Mixed: return "Mixed";
    }
    return "?";
}

void ChainSchedule::validate() const {
    require(thermalization >= 0, ErrorKind::Domain, "thermalization sweeps must be >= 0");
    require(measurement > 0, ErrorKind::Domain, "measurement sweeps must be > 0");
    require(measure_every >= 1, ErrorKind::Domain, "measure_every must be >= 1");
    require(measurement >= measure_every, ErrorKind::Domain, "no measurement would be taken");
}

EstimatorResult estimate_series(std::span<const double> x, double c) {
    const std::size_t n = x.size();
    require(n > 0, ErrorKind::Data, "empty series");
    EstimatorResult r;
    r.n_samples = static_cast<std::int64_t>(n);
    double mean = 0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    r.mean = mean;
    if (n < 2) return r;
    double c0 = 0;
    for (double v : x) c0 += (v - mean) * (v - mean);
    c0 /= static_cast<double>(n);
    // rounding-level spread counts as a constant series
    if (c0 <= 1e-28 * std::max(1.0, mean * mean)) return r;
    double tau = 0.5;
    for (std::size_t t = 1; t < n; ++t) {
        double ct = 0;
        for (std::size_t i = 0; i + t < n; ++i) ct += (x[i] - mean) * (x[i + t] - mean);
        ct /= static_cast<double>(n - t);
        tau += ct / c0;
        if (static_cast<double>(t) >= c * tau) break;
    }
    tau = std::max(tau, 0.5);
    r.tau_int = tau;
    r.std_error = std::sqrt(2.0 * tau * c0 / static_cast<double>(n));
    return r;
}

XYKernel::XYKernel(const WeightedGraph& graph, const PercolationSample* disorder, const GaugeDisorder* gauge) {
    if (gauge)
        require(gauge->omega.size() == static_cast<std::size_t>(graph.edge_count()), ErrorKind::Shape,
                "gauge disorder does not match the graph");
    has_gauge_ = gauge != nullptr;
    const int n = graph.vertex_count();
    offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (int x = 0; x < n; ++x) {
        for (const auto& inc : graph.neighbours(x)) {
            const auto& e = graph.edge(inc.edge);
            require(e.coupling >= 0, ErrorKind::Domain, "couplings must be >= 0");
            const double J = e.coupling * occupancy(graph, disorder, inc.edge);
            const double phase = gauge ? gauge->directed(graph, inc.edge, x) : 0.0;
            links_.push_back({inc.vertex, J, phase, J * std::cos(phase), J * std::sin(phase)});
        }
        offsets_[static_cast<std::size_t>(x) + 1] = links_.size();
    }
}

std::complex<double> XYKernel::field(const SpinState& s, int x) const {
    double re = 0, im = 0;
    for (const auto& l : links(x)) {
        if (l.J == 0) continue;
        const double a = s.angles[static_cast<std::size_t>(l.y)] + l.phase;
        re += l.J * std::cos(a);
        im += l.J * std::sin(a);
    }
    return {re, im};
}

std::complex<double> XYKernel::conditional_spin(const SpinState& s, int x) const {
    const auto h = field(s, x);
    const double mag = std::abs(h);
    if (mag == 0) return {0, 0};
    return h * (bessel_ratio_I1_I0(mag) / mag);
}

void XYKernel::conditional_spins(const SpinState& s, std::vector<std::complex<double>>& out) const {
    const std::size_t n = static_cast<std::size_t>(size());
    std::vector<double> c(n), sn(n);
    for (std::size_t x = 0; x < n; ++x) {
        c[x] = std::cos(s.angles[x]);
        sn[x] = std::sin(s.angles[x]);
    }
    out.resize(n);
    for (std::size_t x = 0; x < n; ++x) {
        double hr = 0, hi = 0;
        for (const auto& l : links(static_cast<int>(x))) {
            const std::size_t y = static_cast<std::size_t>(l.y);
            hr += l.jc * c[y] - l.js * sn[y];
            hi += l.jc * sn[y] + l.js * c[y];
        }
        const double mag = std::hypot(hr, hi);
        out[x] = mag > 0 ? std::complex<double>(hr, hi) * (bessel_ratio_I1_I0(mag) / mag) : std::complex<double>(0, 0);
    }
}

bool XYKernel::linked(int x, int y) const {
    for (const auto& l : links(x))
        if (l.y == y && l.J != 0) return true;
    return false;
}

void XYKernel::heatbath_sweep(SpinState& s, Rng& rng) const {
    const std::size_t n = static_cast<std::size_t>(size());
    std::vector<double> c(n), sn(n);
    for (std::size_t x = 0; x < n; ++x) {
        c[x] = std::cos(s.angles[x]);
        sn[x] = std::sin(s.angles[x]);
    }
    for (std::size_t x = 0; x < n; ++x) {
        double hr = 0, hi = 0;
        for (const auto& l : links(static_cast<int>(x))) {
            const std::size_t y = static_cast<std::size_t>(l.y);
            hr += l.jc * c[y] - l.js * sn[y];
            hi += l.jc * sn[y] + l.js * c[y];
        }
        const double mag = std::hypot(hr, hi);
        const double dir = mag > 0 ? std::atan2(hi, hr) : 0.0;
        const double a = wrap_angle(dir + sample_von_mises(mag, rng));
        s.angles[x] = a;
        c[x] = std::cos(a);
        sn[x] = std::sin(a);
    }
}

double XYKernel::metropolis_sweep(SpinState& s, double eps, Rng& rng) const {
    const std::size_t n = static_cast<std::size_t>(size());
    std::vector<double> c(n), sn(n);
    for (std::size_t x = 0; x < n; ++x) {
        c[x] = std::cos(s.angles[x]);
        sn[x] = std::sin(s.angles[x]);
    }
    std::size_t accepted = 0;
    for (std::size_t x = 0; x < n; ++x) {
        double hr = 0, hi = 0;
        for (const auto& l : links(static_cast<int>(x))) {
            const std::size_t y = static_cast<std::size_t>(l.y);
            hr += l.jc * c[y] - l.js * sn[y];
            hi += l.jc * sn[y] + l.js * c[y];
        }
        const double proposal = s.angles[x] + eps * (2 * rng.uniform() - 1);
        const double pc = std::cos(proposal), ps = std::sin(proposal);
        const double dE = -(hr * pc + hi * ps) + (hr * c[x] + hi * sn[x]);
        if (dE <= 0 || rng.uniform() < std::exp(-dE)) {
            s.angles[x] = wrap_angle(proposal);
            c[x] = pc;
            sn[x] = ps;
            ++accepted;
        }
    }
    return n > 0 ? static_cast<double>(accepted) / static_cast<double>(n) : 1.0;
}

int XYKernel::embedded_cluster_update(SpinState& s, Rng& rng) const {
    require(!has_gauge_, ErrorKind::Unsupported, "cluster updates need gauge-free couplings");
    const int n = size();
    if (n == 0) return 0;
    const double alpha = kTwoPi * rng.uniform();
    const int seed = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    std::vector<char> in(static_cast<std::size_t>(n), 0);
    std::vector<int> stack{seed};
    in[static_cast<std::size_t>(seed)] = 1;
    int count = 0;
    while (!stack.empty()) {
        const int x = stack.back();
        stack.pop_back();
        ++count;
        const double px = std::cos(s.angles[static_cast<std::size_t>(x)] - alpha);
        s.angles[static_cast<std::size_t>(x)] = wrap_angle(2 * alpha + kTwoPi / 2 - s.angles[static_cast<std::size_t>(x)]);
        for (const auto& l : links(x)) {
            if (l.J == 0 || in[static_cast<std::size_t>(l.y)]) continue;
            const double py = std::cos(s.angles[static_cast<std::size_t>(l.y)] - alpha);
            const double arg = 2 * l.J * px * py;
            if (arg <= 0) continue;
            if (rng.uniform() < -std::expm1(-arg)) {
                in[static_cast<std::size_t>(l.y)] = 1;
                stack.push_back(l.y);
            }
        }
    }
    return count;
}

namespace {

void check_spins(const WeightedGraph& graph, const SpinState& spins) {
    require(spins.angles.size() == static_cast<std::size_t>(graph.vertex_count()), ErrorKind::Shape,
            "spin state does not match the graph");
}

}  // namespace

void heatbath_sweep(const WeightedGraph& graph, SpinState& spins, const PercolationSample* disorder,
                    const GaugeDisorder* gauge, Rng& rng) {
    check_spins(graph, spins);
    XYKernel(graph, disorder, gauge).heatbath_sweep(spins, rng);
}

double metropolis_sweep(const WeightedGraph& graph, SpinState& spins, const PercolationSample* disorder,
                        const GaugeDisorder* gauge, double eps, Rng& rng) {
    check_spins(graph, spins);
    return XYKernel(graph, disorder, gauge).metropolis_sweep(spins, eps, rng);
}

int embedded_cluster_update(const WeightedGraph& graph, SpinState& spins, const PercolationSample* disorder, Rng& rng,
                            const GaugeDisorder* gauge) {
    require(gauge == nullptr, ErrorKind::Unsupported, "cluster updates need gauge-free couplings");
    check_spins(graph, spins);
    return XYKernel(graph, disorder, nullptr).embedded_cluster_update(spins, rng);
}

double phi4_sweep(const WeightedGraph& graph, Phi4State& state, double beta, double g, double h, Rng& rng,
                  double log_step) {
    require(g > 0, ErrorKind::Domain, "Phi4 needs g > 0");
    const int n = graph.vertex_count();
    require(state.radii.size() == static_cast<std::size_t>(n) && state.angles.size() == static_cast<std::size_t>(n),
            ErrorKind::Shape, "Phi4 state does not match the graph");
    auto neighbour_sum = [&](int x) {
        double re = 0, im = 0;
        for (const auto& inc : graph.neighbours(x)) {
            const double w = beta * graph.edge(inc.edge).coupling * state.radii[static_cast<std::size_t>(inc.vertex)];
            re += w * std::cos(state.angles[static_cast<std::size_t>(inc.vertex)]);
            im += w * std::sin(state.angles[static_cast<std::size_t>(inc.vertex)]);
        }
        return std::complex<double>(re, im);
    };
    for (int x = 0; x < n; ++x) {
        const auto f = neighbour_sum(x) * state.radii[static_cast<std::size_t>(x)];
        const double mag = std::abs(f);
        const double dir = mag > 0 ? std::atan2(f.imag(), f.real()) : 0.0;
        state.angles[static_cast<std::size_t>(x)] = wrap_angle(dir + sample_von_mises(mag, rng));
    }
    int accepted = 0;
    for (int x = 0; x < n; ++x) {
        const auto f = neighbour_sum(x);
        const double th = state.angles[static_cast<std::size_t>(x)];
        const double proj = f.real() * std::cos(th) + f.imag() * std::sin(th);
        const double r = state.radii[static_cast<std::size_t>(x)];
        const double r2 = r * std::exp(log_step * (2 * rng.uniform() - 1));
        // log target in ln R: -E(R) + ln R with E including -ln R
        auto log_target = [&](double R) { return proj * R - g * R * R * R * R - h * R * R + 2 * std::log(R); };
        const double diff = log_target(r2) - log_target(r);
        if (diff >= 0 || rng.uniform() < std::exp(diff)) {
            state.radii[static_cast<std::size_t>(x)] = r2;
            ++accepted;
        }
    }
    return n > 0 ? static_cast<double>(accepted) / n : 1.0;
}

namespace {

struct PreparedObservable {
    std::vector<std::pair<int, int>> pairs;
    std::vector<char> linked;
    double scale;
    PairEstimator estimator;
};

}  // namespace

ChainOutput run_chain(const ChainModel& model, const ChainSchedule& schedule,
                      const std::vector<ChainObservable>& observables) {
    schedule.validate();
    require(model.graph != nullptr, ErrorKind::Shape, "chain model needs a graph");
    const WeightedGraph& graph = *model.graph;
    const int n = graph.vertex_count();
    std::vector<PreparedObservable> prepared;
    for (const auto& o : observables) {
        require(!o.pairs.empty(), ErrorKind::Shape, "observable '" + o.name + "' has no pairs");
        for (const auto& [x, y] : o.pairs)
            require(x >= 0 && x < n && y >= 0 && y < n, ErrorKind::Shape, "observable '" + o.name + "' leaves the graph");
        prepared.push_back({o.pairs, {}, o.sum ? 1.0 : 1.0 / static_cast<double>(o.pairs.size()), o.estimator});
    }
    Rng rng(schedule.seed);
    ChainOutput out;
    std::vector<std::vector<double>> series(observables.size());
    const std::int64_t total = schedule.thermalization + schedule.measurement;

    if (model.kind == ChainModel::Kind::Phi4) {
        require(model.g > 0 && model.beta >= 0, ErrorKind::Domain, "Phi4 needs g > 0 and beta >= 0");
        Phi4State st;
        st.radii.assign(static_cast<std::size_t>(n), 1.0);
        st.angles.resize(static_cast<std::size_t>(n));
        for (auto& a : st.angles) a = kTwoPi * rng.uniform();
        std::int64_t acc_n = 0;
        double acc = 0;
        for (std::int64_t sweep = 0; sweep < total; ++sweep) {
            const double a = phi4_sweep(graph, st, model.beta, model.g, model.h, rng);
            if (sweep < schedule.thermalization) continue;
            acc += a;
            ++acc_n;
            if ((sweep - schedule.thermalization + 1) % schedule.measure_every) continue;
            for (std::size_t k = 0; k < prepared.size(); ++k) {
                double s = 0;
                for (const auto& [x, y] : prepared[k].pairs)
                    s += st.radii[static_cast<std::size_t>(x)] * st.radii[static_cast<std::size_t>(y)] *
                         std::cos(st.angles[static_cast<std::size_t>(x)] - st.angles[static_cast<std::size_t>(y)]);
                series[k].push_back(s * prepared[k].scale);
            }
        }
        out.acceptance = acc_n ? acc / static_cast<double>(acc_n) : 1.0;
    } else {
        const XYKernel kernel(graph, model.disorder, model.gauge);
        for (auto& p : prepared) {
            p.linked.resize(p.pairs.size());
            for (std::size_t i = 0; i < p.pairs.size(); ++i)
                p.linked[i] = kernel.linked(p.pairs[i].first, p.pairs[i].second);
        }
        SpinState s;
        s.angles.resize(static_cast<std::size_t>(n));
        if (schedule.cold_start)
            std::fill(s.angles.begin(), s.angles.end(), 0.0);
        else
            for (auto& a : s.angles) a = kTwoPi * rng.uniform();
        const bool cluster_ok = !kernel.has_gauge();
        Algorithm algo = schedule.algorithm;
        if (!cluster_ok && (algo == Algorithm::EmbeddedCluster || algo == Algorithm::Mixed)) {
            require(algo != Algorithm::EmbeddedCluster, ErrorKind::Unsupported,
                    "cluster updates need gauge-free couplings");
            algo = Algorithm::HeatBath;
        }
        double eps = 1.0;
        std::int64_t cluster_updates = 0, cluster_flips = 0, updates_per_sweep = 1;
        std::int64_t acc_n = 0;
        double acc_sum = 0, window_acc = 0;
        int window = 0;
        std::vector<std::complex<double>> cond(static_cast<std::size_t>(n));
        const bool need_cond = std::any_of(prepared.begin(), prepared.end(),
                                           [](const PreparedObservable& p) { return p.estimator == PairEstimator::Conditional; });
        for (std::int64_t sweep = 0; sweep < total; ++sweep) {
            switch (algo) {
                case Algorithm::HeatBath: kernel.heatbath_sweep(s, rng); break;
                case Algorithm::Mixed:
                    kernel.heatbath_sweep(s, rng);
                    kernel.embedded_cluster_update(s, rng);
                    break;
                case Algorithm::EmbeddedCluster: {
                    // about n flips per sweep during thermalization; the count is
                    // then frozen, since a state-dependent stopping rule would bias
                    if (sweep < schedule.thermalization) {
                        std::int64_t flipped = 0;
                        while (flipped < n) {
                            flipped += kernel.embedded_cluster_update(s, rng);
                            ++cluster_updates;
                        }
                        cluster_flips += flipped;
                        updates_per_sweep = std::max<std::int64_t>(
                            1, std::llround(static_cast<double>(n) * static_cast<double>(cluster_updates) /
                                            static_cast<double>(cluster_flips)));
                    } else {
                        for (std::int64_t u = 0; u < updates_per_sweep; ++u) kernel.embedded_cluster_update(s, rng);
                    }
                    break;
                }
                case Algorithm::Metropolis: {
                    const double a = kernel.metropolis_sweep(s, eps, rng);
                    if (sweep < schedule.thermalization) {
                        window_acc += a;
                        if (++window == 10) {
                            // step toward 50% acceptance, frozen once measuring starts
                            eps = std::clamp(eps * std::exp(window_acc / window - 0.5), 1e-3, kTwoPi / 2);
                            window = 0;
                            window_acc = 0;
                        }
                    } else {
                        acc_sum += a;
                        ++acc_n;
                    }
                    break;
                }
            }
            if (sweep < schedule.thermalization) continue;
            if ((sweep - schedule.thermalization + 1) % schedule.measure_every) continue;
            if (need_cond) kernel.conditional_spins(s, cond);
            for (std::size_t k = 0; k < prepared.size(); ++k) {
                double sum = 0;
                const auto& p = prepared[k];
                for (std::size_t i = 0; i < p.pairs.size(); ++i) {
                    const auto [x, y] = p.pairs[i];
                    if (p.estimator == PairEstimator::Plain) {
                        sum += std::cos(s.angles[static_cast<std::size_t>(x)] - s.angles[static_cast<std::size_t>(y)]);
                    } else if (x == y) {
                        sum += 1;
                    } else if (p.linked[i]) {
                        sum += std::real(cond[static_cast<std::size_t>(x)] *
                                         std::polar(1.0, -s.angles[static_cast<std::size_t>(y)]));
                    } else {
                        sum += std::real(cond[static_cast<std::size_t>(x)] * std::conj(cond[static_cast<std::size_t>(y)]));
                    }
                }
                series[k].push_back(sum * p.scale);
            }
        }
        out.acceptance = acc_n ? acc_sum / static_cast<double>(acc_n) : 1.0;
        out.metropolis_eps = algo == Algorithm::Metropolis ? eps : 0.0;
    }
    for (const auto& sr : series) {
        auto r = estimate_series(sr);
        r.tau_int *= static_cast<double>(schedule.measure_every);
        out.results.push_back(r);
    }
    return out;
}

EstimatorResult combine_disorder(const std::vector<EstimatorResult>& parts) {
    EstimatorResult r;
    const double n = static_cast<double>(parts.size());
    double within = 0;
    for (const auto& p : parts) {
        r.mean += p.mean;
        r.n_samples += p.n_samples;
        r.tau_int += p.tau_int;
        within += p.std_error * p.std_error;
    }
    r.mean /= n;
    r.tau_int /= n;
    within = std::sqrt(within) / n;
    double between = 0;
    if (parts.size() >= 2) {
        double ss = 0;
        for (const auto& p : parts) ss += (p.mean - r.mean) * (p.mean - r.mean);
        between = std::sqrt(ss / (n - 1) / n);
    }
    // the spread of per-disorder means already contains the chain noise; the
    // within term is a floor for small disorder counts
    r.std_error = std::max(between, within);
    return r;
}

namespace {

std::vector<std::int64_t> origin(int d) { return std::vector<std::int64_t>(static_cast<std::size_t>(d), 0); }

// All integer points of center + Lambda_r in row-major order.
std::vector<std::vector<std::int64_t>> box_points(const std::vector<std::int64_t>& center, std::int64_t r) {
    const int d = static_cast<int>(center.size());
    std::vector<std::vector<std::int64_t>> pts;
    std::vector<std::int64_t> off(static_cast<std::size_t>(d), -r);
    while (true) {
        std::vector<std::int64_t> p(center);
        for (int a = 0; a < d; ++a) p[static_cast<std::size_t>(a)] += off[static_cast<std::size_t>(a)];
        pts.push_back(std::move(p));
        int a = d - 1;
        while (a >= 0 && off[static_cast<std::size_t>(a)] == r) off[static_cast<std::size_t>(a--)] = -r;
        if (a < 0) break;
        ++off[static_cast<std::size_t>(a)];
    }
    return pts;
}

int vertex_at(const WeightedGraph& g, const std::vector<std::int64_t>& p) {
    auto v = g.find_integer_point(p);
    require(v.has_value(), ErrorKind::Shape, "point outside the box");
    return *v;
}

}  // namespace

QuenchedResult quenched_two_point(const QuenchedOptions& o) {
    require(o.d >= 1 && o.L >= 1, ErrorKind::Domain, "need d >= 1 and L >= 1");
    require(o.p >= 0 && o.p <= 1, ErrorKind::Domain, "p must lie in [0,1]");
    require(o.n_disorder >= 1, ErrorKind::Domain, "need at least one disorder sample");
    require(o.base_radius >= 0 && o.window_m >= 0, ErrorKind::Domain, "radii must be >= 0");
    o.schedule.validate();
    const auto graph = build_box_lattice(o.d, o.L, o.beta);
    std::vector<ChainObservable> obs;
    for (auto r : o.distances) {
        require(r >= 1, ErrorKind::Domain, "distances must be >= 1");
        require(r <= 2 * o.L && (o.all_pairs || o.base_radius + r <= o.L), ErrorKind::Shape, "distance leaves the box");
        ChainObservable c{"r=" + std::to_string(r), {}, false};
        if (o.all_pairs) {
            for (const auto& x : box_points(origin(o.d), o.L)) {
                const int vx = vertex_at(graph, x);
                for (int a = 0; a < o.d; ++a) {
                    auto y = x;
                    y[static_cast<std::size_t>(a)] += r;
                    if (y[static_cast<std::size_t>(a)] <= o.L) c.pairs.emplace_back(vx, vertex_at(graph, y));
                }
            }
        } else if (o.base_radius == 0) {
            auto y = origin(o.d);
            y[0] = r;
            c.pairs.emplace_back(vertex_at(graph, origin(o.d)), vertex_at(graph, y));
        } else {
            for (const auto& x : box_points(origin(o.d), o.base_radius)) {
                const int vx = vertex_at(graph, x);
                for (int a = 0; a < o.d; ++a)
                    for (int sgn : {1, -1}) {
                        auto y = x;
                        y[static_cast<std::size_t>(a)] += sgn * r;
                        c.pairs.emplace_back(vx, vertex_at(graph, y));
                    }
            }
        }
        obs.push_back(std::move(c));
    }
    if (o.window_m > 0) {
        require(o.window_m <= o.L, ErrorKind::Shape, "window leaves the box");
        ChainObservable c{"window", {}, false};
        const int v0 = vertex_at(graph, origin(o.d));
        for (const auto& y : box_points(origin(o.d), o.window_m)) c.pairs.emplace_back(v0, vertex_at(graph, y));
        obs.push_back(std::move(c));
    }
    require(!obs.empty(), ErrorKind::Shape, "no observables requested");

    QuenchedResult res;
    res.per_disorder.resize(static_cast<std::size_t>(o.n_disorder));
    parallel_for(static_cast<std::size_t>(o.n_disorder), o.workers, [&](std::size_t i) {
        const auto r = sample_percolation(graph, o.kind, o.p, derive_seed(o.schedule.seed, "disorder", i));
        ChainModel m;
        m.graph = &graph;
        m.disorder = &r;
        ChainSchedule s = o.schedule;
        s.seed = derive_seed(o.schedule.seed, "chain", i);
        res.per_disorder[i] = run_chain(m, s, obs).results;
    });
    for (std::size_t k = 0; k < obs.size(); ++k) {
        std::vector<EstimatorResult> parts;
        for (const auto& pd : res.per_disorder) parts.push_back(pd[k]);
        res.combined.push_back(combine_disorder(parts));
    }
    return res;
}

EstimatorResult quenched_two_point(int d, std::int64_t L, double p, double beta, std::span<const std::int64_t> x,
                                   PercolationKind kind, int n_disorder, const ChainSchedule& schedule,
                                   unsigned workers) {
    require(p >= 0 && p <= 1, ErrorKind::Domain, "p must lie in [0,1]");
    require(n_disorder >= 1, ErrorKind::Domain, "need at least one disorder sample");
    schedule.validate();
    const auto graph = build_box_lattice(d, L, beta);
    const int v0 = vertex_at(graph, origin(d));
    const int vx = vertex_at(graph, std::vector<std::int64_t>(x.begin(), x.end()));
    const std::vector<ChainObservable> obs{{"two_point", {{v0, vx}}, false}};
    std::vector<EstimatorResult> parts(static_cast<std::size_t>(n_disorder));
    parallel_for(parts.size(), workers, [&](std::size_t i) {
        const auto r = sample_percolation(graph, kind, p, derive_seed(schedule.seed, "disorder", i));
        ChainModel m;
        m.graph = &graph;
        m.disorder = &r;
        ChainSchedule s = schedule;
        s.seed = derive_seed(schedule.seed, "chain", i);
        parts[i] = run_chain(m, s, obs).results[0];
    });
    return combine_disorder(parts);
}

EstimatorResult spatial_average(int d, std::int64_t R, std::int64_t m, double p, double beta, PercolationKind kind,
                                std::uint64_t disorder_seed, const ChainSchedule& schedule) {
    require(R >= 0 && m >= 0, ErrorKind::Domain, "radii must be >= 0");
    const auto graph = build_box_lattice(d, R + m, beta);
    const auto r = sample_percolation(graph, kind, p, disorder_seed);
    ChainObservable c{"spatial_average", {}, false};
    const auto window = box_points(origin(d), m);
    for (const auto& x : box_points(origin(d), R)) {
        const int vx = vertex_at(graph, x);
        for (const auto& off : window) {
            auto y = x;
            for (std::size_t a = 0; a < y.size(); ++a) y[a] += off[a];
            c.pairs.emplace_back(vx, vertex_at(graph, y));
        }
    }
    ChainModel model;
    model.graph = &graph;
    model.disorder = &r;
    return run_chain(model, schedule, {c}).results[0];
}

EstimatorResult phi_R_estimator(int d, int n, double beta1, double beta2, std::int64_t R, const ChainSchedule& schedule) {
    require(R >= 1, ErrorKind::Domain, "R must be >= 1");
    const auto graph = build_extended_lattice(d, R, n, beta1, beta2);
    const int v0 = vertex_at(graph, origin(d));
    ChainObservable c{"phi_R", {}, true};
    const std::int64_t edge = R * graph.denominator();
    for (int v = 0; v < graph.vertex_count(); ++v) {
        const auto num = graph.numerators(v);
        const bool on_boundary = std::any_of(num.begin(), num.end(), [&](std::int64_t t) { return t == edge || t == -edge; });
        if (on_boundary) c.pairs.emplace_back(v0, v);
    }
    ChainModel model;
    model.graph = &graph;
    return run_chain(model, schedule, {c}).results[0];
}

const char* to_string(DecayVerdict v) {
    switch (v) {
        case DecayVerdict::Exponential: return "Exponential";
        case DecayVerdict::PowerLaw: return "PowerLaw";
        case DecayVerdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

namespace {

struct LineFit {
    double intercept, slope, slope_error;
    bool ok;
};

LineFit weighted_line(const std::vector<double>& t, const std::vector<double>& y, const std::vector<double>& w) {
    double sw = 0, st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        sw += w[i];
        st += w[i] * t[i];
        sy += w[i] * y[i];
        stt += w[i] * t[i] * t[i];
        sty += w[i] * t[i] * y[i];
    }
    const double det = sw * stt - st * st;
    if (!(det > 0)) return {0, 0, 0, false};
    const double slope = (sw * sty - st * sy) / det;
    return {(sy - slope * st) / sw, slope, std::sqrt(sw / det), true};
}

}  // namespace

DecayClassification decay_classifier(std::span<const double> distances, std::span<const double> values,
                                     std::span<const double> errors) {
    require(distances.size() == values.size() && values.size() == errors.size(), ErrorKind::Shape,
            "distance, value and error lengths differ");
    std::vector<double> distinct(distances.begin(), distances.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    require(distinct.size() >= 4, ErrorKind::Data, "need at least 4 distinct distances");
    for (std::size_t i = 0; i < values.size(); ++i) {
        require(distances[i] > 0 && std::isfinite(distances[i]), ErrorKind::Data, "distances must be positive");
        require(errors[i] > 0 && std::isfinite(errors[i]) && std::isfinite(values[i]), ErrorKind::Data,
                "errors must be positive and finite");
        if (values[i] <= 0 && values[i] + 5 * errors[i] <= 0)
            fail(ErrorKind::Data, "value at distance " + std::to_string(distances[i]) + " is significantly negative");
    }
    std::vector<double> xs, lx, ly, w;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] <= 2 * errors[i]) continue;
        xs.push_back(distances[i]);
        lx.push_back(std::log(distances[i]));
        ly.push_back(std::log(values[i]));
        const double s = errors[i] / values[i];
        w.push_back(1 / (s * s));
    }
    DecayClassification out;
    out.significant_points = static_cast<int>(xs.size());
    const LineFit fe = weighted_line(xs, ly, w);
    const LineFit fp = weighted_line(lx, ly, w);
    if (!fe.ok || !fp.ok) return out;
    auto score = [&](const LineFit& f, bool log_x) {
        DecayFit d;
        d.amplitude = std::exp(f.intercept);
        d.parameter = -f.slope;
        d.parameter_error = f.slope_error;
        double ss = 0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double t = log_x ? std::log(distances[i]) : distances[i];
            const double pred = std::exp(f.intercept + f.slope * t);
            const double r = (values[i] - pred) / errors[i];
            ss += r * r;
        }
        d.rms_residual = std::sqrt(ss / static_cast<double>(values.size()));
        return d;
    };
    out.exponential = score(fe, false);
    out.power_law = score(fp, true);
    auto wins = [](const DecayFit& self, const DecayFit& other) {
        return other.rms_residual >= 3 * std::max(self.rms_residual, 1.0) && self.rms_residual <= 3 &&
               self.parameter > 0 && self.parameter >= 3 * self.parameter_error;
    };
    if (wins(out.exponential, out.power_law))
        out.verdict = DecayVerdict::Exponential;
    else if (wins(out.power_law, out.exponential))
        out.verdict = DecayVerdict::PowerLaw;
    return out;
}

}  // namespace quenchxy
