#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "quenchxy/config.hpp"
#include "quenchxy/error.hpp"
#include "quenchxy/experiments.hpp"

namespace {

const char* describe(quenchxy::Experiment e) {
    using quenchxy::Experiment;
    switch (e) {
        case Experiment::TwoPoint: return "XY two-point function on a box or path, with quadrature on small graphs";
        case Experiment::QuenchedTwoPoint: return "quenched two-point function on diluted boxes";
        case Experiment::GoodBoxScan: return "pre-good and good box frequencies";
        case Experiment::WellsVerify: return "Wells inequality on a small box";
        case Experiment::DominationCheck: return "p0 domination of the nu' measure";
        case Experiment::BesselThresholds: return "beta thresholds from Bessel ratios";
        case Experiment::LammersScan: return "Lammers condition margins for the dual heights";
        case Experiment::Delocalization: return "mean absolute height against system size";
        case Experiment::NishimoriCorrelation: return "gauge-disordered correlation and lambda bound";
        case Experiment::PathTails: return "intersection tail of two increasing paths";
        case Experiment::VoronoiTwoPoint: return "XY two-point function on Poisson-Voronoi graphs";
        case Experiment::Phi4TwoPoint: return "phi^4 two-point function";
        case Experiment::SpatialAverage: return "spatially averaged window correlation in one disorder";
        case Experiment::PhiR: return "phi_R estimator on the extended lattice";
        case Experiment::DecayScan: return "quenched two-point function with a decay verdict";
    }
    return "";
}

int run(quenchxy::Experiment e, const std::string& config_path, const std::map<std::string, std::string>& overrides) {
    std::string text;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw quenchxy::Error(quenchxy::ErrorKind::Io, "cannot read " + config_path);
        std::ostringstream s;
        s << in.rdbuf();
        text = s.str();
    }
    const auto cfg = quenchxy::parse_config(text, e, overrides);
    std::cout << cfg.normalized();
    const auto summary = quenchxy::run_experiment(cfg, cfg.get_text("run.out"));
    for (const auto& f : summary.files) std::cerr << "wrote " << f << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quenched XY model experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", quenchxy::code_version());
    std::string config_path, seed, workers, out;
    for (auto e : quenchxy::all_experiments()) {
        auto* sub = app.add_subcommand(quenchxy::to_string(e), describe(e));
        sub->add_option("--config", config_path, "key-value config file");
        sub->add_option("--seed", seed, "master seed (overrides run.seed)");
        sub->add_option("--workers", workers, "worker threads (overrides run.workers)");
        sub->add_option("--out", out, "output directory (overrides run.out)");
        sub->callback([&, e] {
            std::map<std::string, std::string> overrides;
            if (!seed.empty()) overrides["run.seed"] = seed;
            if (!workers.empty()) overrides["run.workers"] = workers;
            if (!out.empty()) overrides["run.out"] = out;
            run(e, config_path, overrides);
        });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const quenchxy::Error& e) {
        std::cerr << "quenchxy: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "quenchxy: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
