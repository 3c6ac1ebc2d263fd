#include "quenchxy/experiments.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "quenchxy/bessel.hpp"
#include "quenchxy/dual_height.hpp"
#include "quenchxy/error.hpp"
#include "quenchxy/nishimori.hpp"
#include "quenchxy/oracle.hpp"
#include "quenchxy/parallel.hpp"
#include "quenchxy/rng.hpp"
#include "quenchxy/voronoi.hpp"

#ifndef QUENCHXY_VERSION
#define QUENCHXY_VERSION "unknown"
#endif

namespace quenchxy {

namespace {

using Files = std::vector<std::pair<std::string, std::string>>;  // name, contents

std::ostringstream csv() {
    std::ostringstream s;
    s.precision(17);
    return s;
}

PercolationKind kind_from(const std::string& s) { return s == "edge" ? PercolationKind::Edge : PercolationKind::Site; }

Algorithm algorithm_from(const std::string& s) {
    if (s == "metropolis") return Algorithm::Metropolis;
    if (s == "heat-bath") return Algorithm::HeatBath;
    if (s == "embedded-cluster") return Algorithm::EmbeddedCluster;
    return Algorithm::Mixed;
}

VoronoiStrength strength_from(const std::string& s) {
    if (s == "F2") return VoronoiStrength::F2;
    if (s == "F3") return VoronoiStrength::F3;
    return VoronoiStrength::F1;
}

void write_estimate(std::ostream& out, const EstimatorResult& r) {
    out << r.mean << ',' << r.std_error << ',' << r.tau_int << ',' << r.n_samples;
}

constexpr const char* kEstimateColumns = "mean,std_error,tau_int,n_samples";

// Path graph 0 - 1 - ... - (sites-1) or the box Lambda_L, with couplings `coupling`.
WeightedGraph small_graph(const ExperimentConfig& cfg, double coupling) {
    if (cfg.get_text("lattice.shape") == "path") {
        const int n = static_cast<int>(cfg.get_int("lattice.sites"));
        std::vector<Edge> edges;
        for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, coupling, EdgeClass::Generic});
        return WeightedGraph::from_edges(n, std::move(edges));
    }
    return build_box_lattice(static_cast<int>(cfg.get_int("lattice.d")), cfg.get_int("lattice.L"), coupling);
}

// Vertex at distance r from the reference vertex: along the path, or along +e_1 in the box.
std::pair<int, int> reference_pair(const ExperimentConfig& cfg, const WeightedGraph& g, std::int64_t r) {
    if (cfg.get_text("lattice.shape") == "path") {
        require(r < g.vertex_count(), ErrorKind::Shape, "distance exceeds the path length");
        return {0, static_cast<int>(r)};
    }
    const int d = g.dimension();
    std::vector<std::int64_t> o(static_cast<std::size_t>(d), 0), y = o;
    y[0] = r;
    const auto a = g.find_integer_point(o), b = g.find_integer_point(y);
    require(a && b, ErrorKind::Shape, "distance leaves the box");
    return {*a, *b};
}

Files two_point(const ExperimentConfig& cfg) {
    const double beta = cfg.get_real("model.beta");
    const auto g = small_graph(cfg, beta);
    QuadratureSpec spec;
    spec.grid = static_cast<int>(cfg.get_int("oracle.grid"));
    spec.max_free_spins = static_cast<int>(cfg.get_int("oracle.max_free_spins"));
    std::vector<ChainObservable> obs;
    std::vector<std::pair<int, int>> pairs;
    for (auto r : cfg.get_int_list("observable.distances")) {
        pairs.push_back(reference_pair(cfg, g, r));
        obs.push_back({"r=" + std::to_string(r), {pairs.back()}, false, PairEstimator::Plain});
    }
    ChainModel model;
    model.graph = &g;
    const auto out = run_chain(model, schedule_from(cfg, "two-point"), obs);
    const bool exact = g.vertex_count() <= 16;
    auto s = csv();
    s << "distance,vertex_count," << kEstimateColumns << (exact ? ",quadrature,z_score" : "") << '\n';
    const auto dist = cfg.get_int_list("observable.distances");
    for (std::size_t i = 0; i < dist.size(); ++i) {
        s << dist[i] << ',' << g.vertex_count() << ',';
        write_estimate(s, out.results[i]);
        if (exact) {
            const double q = xy_two_point_quadrature(g, pairs[i].first, pairs[i].second, nullptr, nullptr, spec);
            const double err = out.results[i].std_error;
            s << ',' << q << ',' << (err > 0 ? (out.results[i].mean - q) / err : 0.0);
        }
        s << '\n';
    }
    return {{"two-point.csv", s.str()}};
}

QuenchedOptions quenched_options(const ExperimentConfig& cfg, const char* tag) {
    QuenchedOptions o;
    o.d = static_cast<int>(cfg.get_int("lattice.d"));
    o.L = cfg.get_int("lattice.L");
    o.p = cfg.get_real("disorder.p");
    o.kind = kind_from(cfg.get_text("disorder.kind"));
    o.n_disorder = static_cast<int>(cfg.get_int("disorder.samples"));
    o.beta = cfg.get_real("model.beta");
    o.distances = cfg.get_int_list("observable.distances");
    o.base_radius = cfg.get_int("observable.base_radius");
    o.window_m = cfg.get_int("observable.window_m");
    o.schedule = schedule_from(cfg, tag);
    o.workers = cfg.workers();
    return o;
}

std::string quenched_rows(const QuenchedOptions& o, const QuenchedResult& r) {
    auto s = csv();
    s << "observable,distance," << kEstimateColumns << '\n';
    for (std::size_t i = 0; i < r.combined.size(); ++i) {
        const bool window = i >= o.distances.size();
        s << (window ? "window" : "two_point") << ',' << (window ? o.window_m : o.distances[i]) << ',';
        write_estimate(s, r.combined[i]);
        s << '\n';
    }
    return s.str();
}

std::string per_disorder_rows(const QuenchedOptions& o, const QuenchedResult& r) {
    auto s = csv();
    s << "disorder,observable,distance," << kEstimateColumns << '\n';
    for (std::size_t k = 0; k < r.per_disorder.size(); ++k)
        for (std::size_t i = 0; i < r.per_disorder[k].size(); ++i) {
            const bool window = i >= o.distances.size();
            s << k << ',' << (window ? "window" : "two_point") << ',' << (window ? o.window_m : o.distances[i]) << ',';
            write_estimate(s, r.per_disorder[k][i]);
            s << '\n';
        }
    return s.str();
}

Files quenched(const ExperimentConfig& cfg) {
    const auto o = quenched_options(cfg, "quenched-two-point");
    const auto r = quenched_two_point(o);
    return {{"quenched-two-point.csv", quenched_rows(o, r)}, {"quenched-two-point-per-disorder.csv", per_disorder_rows(o, r)}};
}

Files decay_scan(const ExperimentConfig& cfg) {
    const auto o = quenched_options(cfg, "decay-scan");
    const auto r = quenched_two_point(o);
    std::vector<double> x, v, e;
    for (std::size_t i = 0; i < o.distances.size(); ++i) {
        x.push_back(static_cast<double>(o.distances[i]));
        v.push_back(r.combined[i].mean);
        e.push_back(r.combined[i].std_error);
    }
    const auto c = decay_classifier(x, v, e);
    auto s = csv();
    s << "verdict,significant_points,exp_amplitude,exp_rate,exp_rate_error,exp_rms,pow_amplitude,pow_exponent,"
         "pow_exponent_error,pow_rms\n";
    s << to_string(c.verdict) << ',' << c.significant_points << ',' << c.exponential.amplitude << ','
      << c.exponential.parameter << ',' << c.exponential.parameter_error << ',' << c.exponential.rms_residual << ','
      << c.power_law.amplitude << ',' << c.power_law.parameter << ',' << c.power_law.parameter_error << ','
      << c.power_law.rms_residual << '\n';
    return {{"decay-scan.csv", s.str()}, {"decay-scan-points.csv", quenched_rows(o, r)}};
}

Files good_box(const ExperimentConfig& cfg) {
    GoodBoxScanOptions opt;
    opt.trials = cfg.get_int("scan.trials");
    opt.good_trials = cfg.get_int("scan.good_trials");
    opt.workers = cfg.workers();
    const auto rows = goodbox_scan(static_cast<int>(cfg.get_int("lattice.d")), cfg.get_real("disorder.p"),
                                   cfg.get_int_list("scan.sizes"), opt, derive_seed(cfg.seed(), "good-box-scan", 0));
    auto s = csv();
    s << "L,trials,pre_good,pre_good_lower,pre_good_upper,good_trials,good,good_lower,good_upper,adjacent_good_pairs,"
         "connection_failures\n";
    for (const auto& r : rows)
        s << r.L << ',' << r.pre_good.trials << ',' << r.pre_good.estimate << ',' << r.pre_good.lower << ','
          << r.pre_good.upper << ',' << r.good.trials << ',' << r.good.estimate << ',' << r.good.lower << ','
          << r.good.upper << ',' << r.adjacent_good_pairs << ',' << r.connection_failures << '\n';
    return {{"good-box-scan.csv", s.str()}};
}

SiteRect rect_from(const ExperimentConfig& cfg) {
    SiteRect r{cfg.get_int_list("box.lo"), cfg.get_int_list("box.hi")};
    require(r.lo.size() == r.hi.size() && !r.lo.empty(), ErrorKind::Parse, "key 'box.hi': length differs from box.lo");
    return r;
}

Files wells(const ExperimentConfig& cfg) {
    QuadratureSpec spec;
    spec.grid = static_cast<int>(cfg.get_int("oracle.grid"));
    const auto m64 = cfg.get_int_list("observable.m");
    const std::vector<int> m(m64.begin(), m64.end());
    const auto r = verify_wells_inequality(rect_from(cfg), cfg.get_real("model.beta"), cfg.get_real("model.pbar"), m,
                                           spec, cfg.workers());
    auto s = csv();
    s << "a,lhs,lhs_weighted,rhs,margin,holds\n";
    s << r.a << ',' << r.lhs << ',' << r.lhs_weighted << ',' << r.rhs << ',' << r.rhs - r.lhs << ','
      << (r.holds ? "true" : "false") << '\n';
    return {{"wells-verify.csv", s.str()}};
}

Files domination(const ExperimentConfig& cfg) {
    QuadratureSpec spec;
    spec.grid = static_cast<int>(cfg.get_int("oracle.grid"));
    const auto box = rect_from(cfg);
    const double beta = cfg.get_real("model.beta"), pbar = cfg.get_real("model.pbar");
    const auto nu = nu_prime_enumerate(box, beta, pbar, spec, cfg.workers());
    const double p0 = p_zero(pbar, beta, box.dimension());
    const auto r = domination_check(nu, p0);
    auto s = csv();
    s << "sites,max_conditional,p_zero,margin,holds,argmax_site,argmax_config\n";
    s << nu.sites << ',' << r.max_conditional << ',' << p0 << ',' << p0 - r.max_conditional << ','
      << (r.holds ? "true" : "false") << ',' << r.argmax_site << ',' << r.argmax_config << '\n';
    return {{"domination-check.csv", s.str()}};
}

Files thresholds(const ExperimentConfig& cfg) {
    auto s = csv();
    s << "equation,n,beta,ratio,target,residual\n";
    const double b1 = threshold_beta1();
    const double t1 = std::pow(2.0, 0.125);
    const double r1 = 1 / bessel_ratio_I1_I0(2 * b1);
    s << "beta1,0," << b1 << ',' << r1 << ',' << t1 << ',' << r1 - t1 << '\n';
    for (auto n : cfg.get_int_list("thresholds.n")) {
        const double b2 = threshold_beta2(static_cast<int>(n));
        const double t2 = std::exp(1.0 / (4.0 * static_cast<double>(n - 1)));
        const double r2 = 1 / bessel_ratio_I1_I0(2 * b2);
        s << "beta2," << n << ',' << b2 << ',' << r2 << ',' << t2 << ',' << r2 - t2 << '\n';
    }
    return {{"bessel-thresholds.csv", s.str()}};
}

Files lammers(const ExperimentConfig& cfg) {
    const auto ns = cfg.get_int_list("lammers.n");
    const auto b1s = cfg.get_real_list("lammers.beta1");
    const auto b2s = cfg.get_real_list("lammers.beta2");
    std::vector<LammersRecord> rows;
    if (b1s.empty() && b2s.empty()) {
        const double off = cfg.get_real("lammers.offset");
        for (auto n : ns) {
            const double b2 = n >= 2 ? threshold_beta2(static_cast<int>(n)) : threshold_beta1();
            rows.push_back(lammers_check(static_cast<int>(n), threshold_beta1() + off, b2 + off));
        }
    } else {
        require(!b1s.empty() && !b2s.empty(), ErrorKind::Parse, "key 'lammers.beta2': give both beta lists or neither");
        for (auto n : ns)
            for (double b1 : b1s)
                for (double b2 : b2s) rows.push_back(lammers_check(static_cast<int>(n), b1, b2));
    }
    std::ostringstream s;
    write_lammers_csv(s, rows);
    return {{"lammers-scan.csv", s.str()}};
}

Files delocalization(const ExperimentConfig& cfg) {
    const auto r = delocalization_experiment(static_cast<int>(cfg.get_int("height.n")), cfg.get_real("model.beta1"),
                                             cfg.get_real("model.beta2"), cfg.get_int_list("height.sizes"),
                                             schedule_from(cfg, "delocalization"), cfg.workers());
    std::ostringstream s;
    write_delocalization_csv(s, r);
    return {{"delocalization.csv", s.str()}};
}

Files nishimori(const ExperimentConfig& cfg) {
    NishimoriOptions o;
    o.d = static_cast<int>(cfg.get_int("lattice.d"));
    o.L = cfg.get_int("lattice.L");
    o.n = static_cast<int>(cfg.get_int("nishimori.n"));
    o.k = static_cast<int>(cfg.get_int("nishimori.k"));
    o.omega_samples = cfg.get_int("nishimori.omega_samples");
    o.n_disorder = static_cast<int>(cfg.get_int("disorder.samples"));
    o.beta1 = cfg.get_real("model.beta1");
    o.beta2 = cfg.get_real("model.beta2");
    o.schedule = schedule_from(cfg, "nishimori-correlation");
    o.workers = cfg.workers();
    const auto r = nishimori_correlation_experiment(o);
    std::ostringstream s;
    write_nishimori_csv(s, o, r);
    return {{"nishimori-correlation.csv", s.str()}};
}

Files path_tails(const ExperimentConfig& cfg) {
    const int d = static_cast<int>(cfg.get_int("paths.d")), k = static_cast<int>(cfg.get_int("paths.k"));
    const auto tail = intersection_tail(d, k, cfg.get_int("paths.trials"), derive_seed(cfg.seed(), "path-tails", 0),
                                        cfg.workers());
    std::ostringstream t;
    write_tail_csv(t, tail);
    Files files{{"path-tails.csv", t.str()}};
    auto s = csv();
    s << "slope,std_error,points\n";
    try {
        const auto f = log_tail_slope(tail, cfg.get_int("paths.min_successes"));
        s << f.slope << ',' << f.std_error << ',' << f.points << '\n';
        files.emplace_back("path-tails-fit.csv", s.str());
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Data) throw;
    }
    return files;
}

Files voronoi(const ExperimentConfig& cfg) {
    const double R = cfg.get_real("voronoi.radius"), beta = cfg.get_real("model.beta");
    const auto strength = strength_from(cfg.get_text("voronoi.strength"));
    const auto targets = cfg.get_real_list("observable.distances");
    const int samples = static_cast<int>(cfg.get_int("disorder.samples"));
    const auto base = schedule_from(cfg, "voronoi-two-point");
    const Window window = Window::square({0, 0}, R);
    std::vector<std::vector<EstimatorResult>> parts(static_cast<std::size_t>(samples));
    std::vector<std::vector<double>> actual(static_cast<std::size_t>(samples));
    parallel_for(static_cast<std::size_t>(samples), cfg.workers(), [&](std::size_t i) {
        const auto pts = sample_poisson_points(window, cfg.get_real("voronoi.intensity"), derive_seed(base.seed, "points", i));
        require(pts.size() >= 2, ErrorKind::Data, "fewer than two Poisson points in the window");
        const auto vg = build_voronoi_graph(pts, window, strength);
        const auto g = vg.to_graph(beta);
        auto nearest = [&](double x, double y) {
            int best = 0;
            for (int j = 1; j < static_cast<int>(pts.size()); ++j)
                if (std::hypot(pts[j].x - x, pts[j].y - y) < std::hypot(pts[best].x - x, pts[best].y - y)) best = j;
            return best;
        };
        const int o = nearest(0, 0);
        std::vector<ChainObservable> obs;
        for (double t : targets) {
            const int y = nearest(t, 0);
            actual[i].push_back(std::hypot(pts[y].x - pts[o].x, pts[y].y - pts[o].y));
            obs.push_back({"r", {{o, y}}, false});
        }
        ChainModel m;
        m.graph = &g;
        ChainSchedule s = base;
        s.seed = derive_seed(base.seed, "chain", i);
        parts[i] = run_chain(m, s, obs).results;
    });
    auto s = csv();
    s << "target_distance,mean_point_distance," << kEstimateColumns << '\n';
    for (std::size_t k = 0; k < targets.size(); ++k) {
        std::vector<EstimatorResult> col;
        double dist = 0;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            col.push_back(parts[i][k]);
            dist += actual[i][k];
        }
        s << targets[k] << ',' << dist / static_cast<double>(parts.size()) << ',';
        write_estimate(s, combine_disorder(col));
        s << '\n';
    }
    return {{"voronoi-two-point.csv", s.str()}};
}

Files phi4(const ExperimentConfig& cfg) {
    const double beta = cfg.get_real("model.beta"), g4 = cfg.get_real("model.g"), h = cfg.get_real("model.h");
    const auto g = small_graph(cfg, 1.0);
    QuadratureSpec spec;
    spec.grid = static_cast<int>(cfg.get_int("oracle.grid"));
    spec.radial_nodes = static_cast<int>(cfg.get_int("oracle.radial_nodes"));
    const auto dist = cfg.get_int_list("observable.distances");
    std::vector<ChainObservable> obs;
    std::vector<std::pair<int, int>> pairs;
    for (auto r : dist) {
        pairs.push_back(reference_pair(cfg, g, r));
        obs.push_back({"r", {pairs.back()}, false, PairEstimator::Plain});
    }
    ChainModel model;
    model.kind = ChainModel::Kind::Phi4;
    model.graph = &g;
    model.beta = beta;
    model.g = g4;
    model.h = h;
    const auto out = run_chain(model, schedule_from(cfg, "phi4-two-point"), obs);
    const bool exact = g.vertex_count() <= 3;
    const double a = wells_a(SingleSiteMeasure::phi4_radial(g4, h));
    const auto xy = g.with_couplings(std::vector<double>(static_cast<std::size_t>(g.edge_count()), a * beta));
    auto s = csv();
    s << "distance," << kEstimateColumns << ",wells_a,xy_bound" << (exact ? ",quadrature" : "") << '\n';
    for (std::size_t i = 0; i < dist.size(); ++i) {
        s << dist[i] << ',';
        write_estimate(s, out.results[i]);
        const double bound = a * a * xy_two_point_quadrature(xy, pairs[i].first, pairs[i].second, nullptr, nullptr, spec);
        s << ',' << a << ',' << bound;
        if (exact)
            s << ',' << phi4_expectation_quadrature(g, beta, g4, h, Phi4Observable::Dot, pairs[i].first, pairs[i].second, spec);
        s << '\n';
    }
    return {{"phi4-two-point.csv", s.str()}};
}

Files spatial(const ExperimentConfig& cfg) {
    const auto r = spatial_average(static_cast<int>(cfg.get_int("lattice.d")), cfg.get_int("spatial.R"),
                                   cfg.get_int("spatial.m"), cfg.get_real("disorder.p"), cfg.get_real("model.beta"),
                                   kind_from(cfg.get_text("disorder.kind")),
                                   derive_seed(cfg.seed(), "spatial-average-disorder", 0),
                                   schedule_from(cfg, "spatial-average"));
    auto s = csv();
    s << "R,m," << kEstimateColumns << '\n';
    s << cfg.get_int("spatial.R") << ',' << cfg.get_int("spatial.m") << ',';
    write_estimate(s, r);
    s << '\n';
    return {{"spatial-average.csv", s.str()}};
}

Files phi_r(const ExperimentConfig& cfg) {
    const auto Rs = cfg.get_int_list("phi.R");
    std::vector<EstimatorResult> res(Rs.size());
    const auto base = schedule_from(cfg, "phi-r");
    parallel_for(Rs.size(), cfg.workers(), [&](std::size_t i) {
        ChainSchedule s = base;
        s.seed = derive_seed(base.seed, "R", static_cast<std::uint64_t>(Rs[i]));
        res[i] = phi_R_estimator(static_cast<int>(cfg.get_int("lattice.d")), static_cast<int>(cfg.get_int("phi.n")),
                                 cfg.get_real("model.beta1"), cfg.get_real("model.beta2"), Rs[i], s);
    });
    auto s = csv();
    s << "R," << kEstimateColumns << '\n';
    for (std::size_t i = 0; i < Rs.size(); ++i) {
        s << Rs[i] << ',';
        write_estimate(s, res[i]);
        s << '\n';
    }
    return {{"phi-r.csv", s.str()}};
}

Files dispatch(const ExperimentConfig& cfg) {
    switch (cfg.experiment) {
        case Experiment::TwoPoint: return two_point(cfg);
        case Experiment::QuenchedTwoPoint: return quenched(cfg);
        case Experiment::GoodBoxScan: return good_box(cfg);
        case Experiment::WellsVerify: return wells(cfg);
        case Experiment::DominationCheck: return domination(cfg);
        case Experiment::BesselThresholds: return thresholds(cfg);
        case Experiment::LammersScan: return lammers(cfg);
        case Experiment::Delocalization: return delocalization(cfg);
        case Experiment::NishimoriCorrelation: return nishimori(cfg);
        case Experiment::PathTails: return path_tails(cfg);
        case Experiment::VoronoiTwoPoint: return voronoi(cfg);
        case Experiment::Phi4TwoPoint: return phi4(cfg);
        case Experiment::SpatialAverage: return spatial(cfg);
        case Experiment::PhiR: return phi_r(cfg);
        case Experiment::DecayScan: return decay_scan(cfg);
    }
    fail(ErrorKind::Unsupported, "unknown experiment");
}

// Every field after the header must parse as a finite number or be a word.
void check_finite(const std::string& name, const std::string& body) {
    std::istringstream in(body);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        std::string f;
        while (std::getline(fields, f, ',')) {
            const bool bad = f == "nan" || f == "-nan" || f == "inf" || f == "-inf";
            require(!bad, ErrorKind::Numeric, name + " would contain a non-finite value");
        }
    }
}

}  // namespace

const char* code_version() { return QUENCHXY_VERSION; }

ChainSchedule schedule_from(const ExperimentConfig& cfg, const char* tag) {
    ChainSchedule s;
    s.thermalization = cfg.get_int("chain.thermalization");
    s.measurement = cfg.get_int("chain.measurement");
    s.measure_every = cfg.get_int("chain.measure_every");
    s.algorithm = algorithm_from(cfg.get_text("chain.algorithm"));
    s.seed = derive_seed(cfg.seed(), tag, 0);
    s.validate();
    return s;
}

RunSummary run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    const auto start = std::chrono::steady_clock::now();
    const Files files = dispatch(cfg);
    for (const auto& [name, body] : files) check_finite(name, body);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    require(!ec, ErrorKind::Io, "cannot create " + out_dir.string());
    auto write = [&](const std::string& name, const std::string& body) {
        std::ofstream f(out_dir / name, std::ios::binary);
        require(static_cast<bool>(f), ErrorKind::Io, "cannot write " + (out_dir / name).string());
        f << body;
    };
    RunSummary summary;
    for (const auto& [name, body] : files) {
        write(name, body);
        summary.files.push_back(name);
    }
    write("config.ini", cfg.normalized());
    summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::ostringstream hash;
    hash << std::hex << std::setw(16) << std::setfill('0') << cfg.hash();
    nlohmann::json manifest{
        {"experiment", to_string(cfg.experiment)},
        {"config_hash", hash.str()},
        {"code_version", code_version()},
        {"seed", cfg.seed()},
        {"workers", cfg.workers()},
        {"wall_time_seconds", summary.wall_seconds},
        {"files", summary.files},
    };
    write("manifest.json", manifest.dump(2) + "\n");
    return summary;
}

}  // namespace quenchxy
