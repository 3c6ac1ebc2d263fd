#include "quenchxy/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "quenchxy/error.hpp"
#include "quenchxy/rng.hpp"

namespace quenchxy {

namespace {

struct Named {
    Experiment e;
    const char* name;
};

constexpr Named kNames[] = {
    {Experiment::TwoPoint, "two-point"},
    {Experiment::QuenchedTwoPoint, "quenched-two-point"},
    {Experiment::GoodBoxScan, "good-box-scan"},
    {Experiment::WellsVerify, "wells-verify"},
    {Experiment::DominationCheck, "domination-check"},
    {Experiment::BesselThresholds, "bessel-thresholds"},
    {Experiment::LammersScan, "lammers-scan"},
    {Experiment::Delocalization, "delocalization"},
    {Experiment::NishimoriCorrelation, "nishimori-correlation"},
    {Experiment::PathTails, "path-tails"},
    {Experiment::VoronoiTwoPoint, "voronoi-two-point"},
    {Experiment::Phi4TwoPoint, "phi4-two-point"},
    {Experiment::SpatialAverage, "spatial-average"},
    {Experiment::PhiR, "phi-r"},
    {Experiment::DecayScan, "decay-scan"},
};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    if (trim(s).empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        out.push_back(trim(std::string_view(s).substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

[[noreturn]] void bad(const std::string& key, const std::string& why) { fail(ErrorKind::Parse, "key '" + key + "': " + why); }

std::int64_t to_int(const std::string& key, const std::string& s) {
    std::int64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size()) bad(key, "expected an integer, got '" + s + "'");
    return v;
}

double to_real(const std::string& key, const std::string& s) {
    double v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v))
        bad(key, "expected a finite number, got '" + s + "'");
    return v;
}

std::string shortest(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

void check_range(const KeySpec& spec, double v) {
    if (v < spec.min || v > spec.max)
        bad(spec.key, "value " + shortest(v) + " outside [" + shortest(spec.min) + ", " + shortest(spec.max) + "]");
}

std::string normalize_value(const KeySpec& spec, const std::string& raw) {
    switch (spec.type) {
        case ValueType::Int: {
            if (spec.key == "run.seed") {
                std::uint64_t v = 0;
                const auto r = std::from_chars(raw.data(), raw.data() + raw.size(), v);
                if (raw.empty() || r.ec != std::errc() || r.ptr != raw.data() + raw.size())
                    bad(spec.key, "expected an unsigned 64-bit integer, got '" + raw + "'");
                return std::to_string(v);
            }
            const auto v = to_int(spec.key, raw);
            check_range(spec, static_cast<double>(v));
            return std::to_string(v);
        }
        case ValueType::Real: {
            const double v = to_real(spec.key, raw);
            check_range(spec, v);
            return shortest(v);
        }
        case ValueType::Text:
            if (!spec.choices.empty() && std::find(spec.choices.begin(), spec.choices.end(), raw) == spec.choices.end()) {
                std::string all;
                for (const auto& c : spec.choices) all += (all.empty() ? "" : ", ") + c;
                bad(spec.key, "expected one of {" + all + "}, got '" + raw + "'");
            }
            return raw;
        case ValueType::IntList:
        case ValueType::RealList: {
            std::string out;
            for (const auto& item : split_list(raw)) {
                std::string norm;
                if (spec.type == ValueType::IntList) {
                    const auto v = to_int(spec.key, item);
                    check_range(spec, static_cast<double>(v));
                    norm = std::to_string(v);
                } else {
                    const double v = to_real(spec.key, item);
                    check_range(spec, v);
                    norm = shortest(v);
                }
                out += (out.empty() ? "" : ",") + norm;
            }
            return out;
        }
    }
    return raw;
}

KeySpec key(std::string name, ValueType type, std::optional<std::string> def, double min = -1e300, double max = 1e300,
            std::vector<std::string> choices = {}) {
    return {std::move(name), type, std::move(def), min, max, std::move(choices)};
}

void add_chain(std::vector<KeySpec>& s, const char* algorithm = "mixed") {
    s.push_back(key("chain.thermalization", ValueType::Int, "1000", 0, 1e9));
    s.push_back(key("chain.measurement", ValueType::Int, "10000", 1, 1e10));
    s.push_back(key("chain.measure_every", ValueType::Int, "1", 1, 1e6));
    s.push_back(key("chain.algorithm", ValueType::Text, algorithm, 0, 0,
                    {"metropolis", "heat-bath", "embedded-cluster", "mixed"}));
}

void add_quenched(std::vector<KeySpec>& s) {
    s.push_back(key("lattice.d", ValueType::Int, "2", 1, 4));
    s.push_back(key("lattice.L", ValueType::Int, "16", 1, 1000));
    s.push_back(key("disorder.p", ValueType::Real, "0.95", 0, 1));
    s.push_back(key("disorder.kind", ValueType::Text, "site", 0, 0, {"site", "edge"}));
    s.push_back(key("disorder.samples", ValueType::Int, "8", 1, 100000));
    s.push_back(key("model.beta", ValueType::Real, std::nullopt, 0, 50));
    s.push_back(key("observable.distances", ValueType::IntList, "2,4,8", 1, 1000));
    s.push_back(key("observable.base_radius", ValueType::Int, "0", 0, 1000));
    s.push_back(key("observable.window_m", ValueType::Int, "0", 0, 1000));
    add_chain(s);
}

}  // namespace

const std::vector<Experiment>& all_experiments() {
    static const std::vector<Experiment> all = [] {
        std::vector<Experiment> v;
        for (const auto& n : kNames) v.push_back(n.e);
        return v;
    }();
    return all;
}

const char* to_string(Experiment e) {
    for (const auto& n : kNames)
        if (n.e == e) return n.name;
    return "unknown";
}

std::optional<Experiment> experiment_from_string(std::string_view name) {
    for (const auto& n : kNames)
        if (name == n.name) return n.e;
    return std::nullopt;
}

std::vector<KeySpec> config_schema(Experiment e) {
    std::vector<KeySpec> s;
    std::vector<std::string> names;
    for (const auto& n : kNames) names.emplace_back(n.name);
    s.push_back(key("run.experiment", ValueType::Text, std::string(to_string(e)), 0, 0, names));
    s.push_back(key("run.seed", ValueType::Int, std::nullopt));
    s.push_back(key("run.workers", ValueType::Int, "1", 1, 1024));
    s.push_back(key("run.out", ValueType::Text, "."));
    switch (e) {
        case Experiment::TwoPoint:
            s.push_back(key("lattice.shape", ValueType::Text, "box", 0, 0, {"box", "path"}));
            s.push_back(key("lattice.d", ValueType::Int, "2", 1, 4));
            s.push_back(key("lattice.L", ValueType::Int, "4", 0, 1000));
            s.push_back(key("lattice.sites", ValueType::Int, "2", 2, 1000000));
            s.push_back(key("model.beta", ValueType::Real, std::nullopt, 0, 50));
            s.push_back(key("observable.distances", ValueType::IntList, "1", 1, 1000));
            s.push_back(key("oracle.grid", ValueType::Int, "64", 16, 4096));
            s.push_back(key("oracle.max_free_spins", ValueType::Int, "4", 1, 5));
            add_chain(s, "heat-bath");
            break;
        case Experiment::QuenchedTwoPoint:
        case Experiment::DecayScan:
            add_quenched(s);
            break;
        case Experiment::GoodBoxScan:
            s.push_back(key("lattice.d", ValueType::Int, "2", 2, 3));
            s.push_back(key("disorder.p", ValueType::Real, "0.75", 0, 1));
            s.push_back(key("scan.sizes", ValueType::IntList, "8,16,32", 1, 10000));
            s.push_back(key("scan.trials", ValueType::Int, "2000", 1, 1e9));
            s.push_back(key("scan.good_trials", ValueType::Int, "-1", -1, 1e9));
            break;
        case Experiment::WellsVerify:
        case Experiment::DominationCheck:
            s.push_back(key("box.lo", ValueType::IntList, "0,0", -1000, 1000));
            s.push_back(key("box.hi", ValueType::IntList, "0,1", -1000, 1000));
            s.push_back(key("model.beta", ValueType::Real, std::nullopt, 0, 50));
            s.push_back(key("model.pbar", ValueType::Real, "0.5", 0, 1));
            s.push_back(key("oracle.grid", ValueType::Int, "64", 16, 4096));
            if (e == Experiment::WellsVerify) s.push_back(key("observable.m", ValueType::IntList, "1,-1", -8, 8));
            break;
        case Experiment::BesselThresholds:
            s.push_back(key("thresholds.n", ValueType::IntList, "2,4,8,16", 2, 10000));
            break;
        case Experiment::LammersScan:
            s.push_back(key("lammers.n", ValueType::IntList, "2,4,8,16", 1, 10000));
            s.push_back(key("lammers.beta1", ValueType::RealList, "", 1e-12, 50));
            s.push_back(key("lammers.beta2", ValueType::RealList, "", 1e-12, 50));
            s.push_back(key("lammers.offset", ValueType::Real, "0.1", -1, 10));
            break;
        case Experiment::Delocalization:
            s.push_back(key("height.n", ValueType::Int, "2", 1, 1000));
            s.push_back(key("height.sizes", ValueType::IntList, "1,2,4,8", 1, 1000));
            s.push_back(key("model.beta1", ValueType::Real, std::nullopt, 1e-12, 50));
            s.push_back(key("model.beta2", ValueType::Real, std::nullopt, 1e-12, 50));
            add_chain(s, "heat-bath");
            break;
        case Experiment::NishimoriCorrelation:
            s.push_back(key("lattice.d", ValueType::Int, "3", 2, 4));
            s.push_back(key("lattice.L", ValueType::Int, "3", 1, 1000));
            s.push_back(key("nishimori.n", ValueType::Int, "1", 1, 1000));
            s.push_back(key("nishimori.k", ValueType::Int, "1", 1, 1000));
            s.push_back(key("nishimori.omega_samples", ValueType::Int, "100000", 2, 1e10));
            s.push_back(key("disorder.samples", ValueType::Int, "4", 1, 100000));
            s.push_back(key("model.beta1", ValueType::Real, std::nullopt, 1e-12, 1e4));
            s.push_back(key("model.beta2", ValueType::Real, std::nullopt, 1e-12, 1e4));
            add_chain(s, "heat-bath");
            break;
        case Experiment::PathTails:
            s.push_back(key("paths.d", ValueType::Int, "3", 2, 64));
            s.push_back(key("paths.k", ValueType::Int, "1", 1, 10000));
            s.push_back(key("paths.trials", ValueType::Int, "100000", 1, 1e12));
            s.push_back(key("paths.min_successes", ValueType::Int, "10", 1, 1e9));
            break;
        case Experiment::VoronoiTwoPoint:
            s.push_back(key("voronoi.radius", ValueType::Real, "10", 1e-6, 1e4));
            s.push_back(key("voronoi.intensity", ValueType::Real, "1", 1e-6, 1e4));
            s.push_back(key("voronoi.strength", ValueType::Text, "F1", 0, 0, {"F1", "F2", "F3"}));
            s.push_back(key("disorder.samples", ValueType::Int, "4", 1, 100000));
            s.push_back(key("model.beta", ValueType::Real, std::nullopt, 0, 50));
            s.push_back(key("observable.distances", ValueType::RealList, "1,2,4", 0, 1e4));
            add_chain(s, "heat-bath");
            break;
        case Experiment::Phi4TwoPoint:
            s.push_back(key("lattice.shape", ValueType::Text, "path", 0, 0, {"box", "path"}));
            s.push_back(key("lattice.d", ValueType::Int, "2", 1, 4));
            s.push_back(key("lattice.L", ValueType::Int, "1", 0, 1000));
            s.push_back(key("lattice.sites", ValueType::Int, "2", 2, 1000000));
            s.push_back(key("model.beta", ValueType::Real, std::nullopt, 0, 50));
            s.push_back(key("model.g", ValueType::Real, "1", 1e-6, 1e6));
            s.push_back(key("model.h", ValueType::Real, "0", -1e6, 1e6));
            s.push_back(key("observable.distances", ValueType::IntList, "1", 1, 1000));
            s.push_back(key("oracle.grid", ValueType::Int, "64", 16, 4096));
            s.push_back(key("oracle.radial_nodes", ValueType::Int, "200", 8, 100000));
            add_chain(s, "heat-bath");
            break;
        case Experiment::SpatialAverage:
            s.push_back(key("lattice.d", ValueType::Int, "2", 1, 4));
            s.push_back(key("spatial.R", ValueType::Int, "16", 0, 1000));
            s.push_back(key("spatial.m", ValueType::Int, "4", 0, 1000));
            s.push_back(key("disorder.p", ValueType::Real, "0.95", 0, 1));
            s.push_back(key("disorder.kind", ValueType::Text, "site", 0, 0, {"site", "edge"}));
            s.push_back(key("model.beta", ValueType::Real, std::nullopt, 0, 50));
            add_chain(s);
            break;
        case Experiment::PhiR:
            s.push_back(key("lattice.d", ValueType::Int, "2", 1, 4));
            s.push_back(key("phi.n", ValueType::Int, "1", 0, 1000));
            s.push_back(key("phi.R", ValueType::IntList, "1,2,4", 1, 1000));
            s.push_back(key("model.beta1", ValueType::Real, std::nullopt, 0, 50));
            s.push_back(key("model.beta2", ValueType::Real, std::nullopt, 0, 50));
            add_chain(s, "heat-bath");
            break;
    }
    return s;
}

std::int64_t ExperimentConfig::get_int(const std::string& k) const { return to_int(k, values.at(k)); }

std::uint64_t ExperimentConfig::get_u64(const std::string& k) const {
    const auto& s = values.at(k);
    std::uint64_t v = 0;
    std::from_chars(s.data(), s.data() + s.size(), v);
    return v;
}

double ExperimentConfig::get_real(const std::string& k) const { return to_real(k, values.at(k)); }

const std::string& ExperimentConfig::get_text(const std::string& k) const { return values.at(k); }

std::vector<std::int64_t> ExperimentConfig::get_int_list(const std::string& k) const {
    std::vector<std::int64_t> out;
    for (const auto& item : split_list(values.at(k))) out.push_back(to_int(k, item));
    return out;
}

std::vector<double> ExperimentConfig::get_real_list(const std::string& k) const {
    std::vector<double> out;
    for (const auto& item : split_list(values.at(k))) out.push_back(to_real(k, item));
    return out;
}

std::string ExperimentConfig::normalized() const {
    std::map<std::string, std::map<std::string, std::string>> sections;
    for (const auto& [k, v] : values) {
        const auto dot = k.find('.');
        sections[k.substr(0, dot)][k.substr(dot + 1)] = v;
    }
    std::ostringstream out;
    bool first = true;
    for (const auto& [section, entries] : sections) {
        if (!first) out << '\n';
        first = false;
        out << '[' << section << "]\n";
        for (const auto& [k, v] : entries) out << k << " = " << v << '\n';
    }
    return out.str();
}

std::uint64_t ExperimentConfig::hash() const {
    ExperimentConfig c = *this;
    c.values.erase("run.workers");
    c.values.erase("run.out");
    return tag_hash(c.normalized());
}

ExperimentConfig parse_config(std::string_view text, std::optional<Experiment> experiment,
                              const std::map<std::string, std::string>& overrides) {
    std::map<std::string, std::string> raw;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        const std::string body = trim(std::string_view(line).substr(0, hash));
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']' || body.size() < 3)
                fail(ErrorKind::Parse, "line " + std::to_string(line_no) + ": malformed section header");
            section = trim(std::string_view(body).substr(1, body.size() - 2));
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) fail(ErrorKind::Parse, "line " + std::to_string(line_no) + ": expected key = value");
        const std::string name = trim(std::string_view(body).substr(0, eq));
        if (name.empty()) fail(ErrorKind::Parse, "line " + std::to_string(line_no) + ": empty key");
        if (section.empty()) fail(ErrorKind::Parse, "key '" + name + "' appears before any section header");
        const std::string full = section + "." + name;
        if (raw.count(full)) bad(full, "given twice");
        raw[full] = trim(std::string_view(body).substr(eq + 1));
    }
    for (const auto& [k, v] : overrides) raw[k] = v;

    Experiment e;
    if (auto it = raw.find("run.experiment"); it != raw.end()) {
        auto named = experiment_from_string(it->second);
        if (!named) bad("run.experiment", "unknown experiment '" + it->second + "'");
        if (experiment && *experiment != *named)
            bad("run.experiment", "config names '" + it->second + "' but the subcommand is '" + to_string(*experiment) + "'");
        e = *named;
    } else if (experiment) {
        e = *experiment;
    } else {
        bad("run.experiment", "missing");
    }

    const auto schema = config_schema(e);
    std::set<std::string> known;
    for (const auto& s : schema) known.insert(s.key);
    for (const auto& [k, v] : raw)
        if (!known.count(k)) bad(k, std::string("unknown key for experiment ") + to_string(e));

    ExperimentConfig cfg;
    cfg.experiment = e;
    for (const auto& s : schema) {
        auto it = raw.find(s.key);
        if (it == raw.end()) {
            if (!s.default_value) bad(s.key, "required");
            cfg.values[s.key] = normalize_value(s, *s.default_value);
        } else {
            cfg.values[s.key] = normalize_value(s, it->second);
        }
    }
    return cfg;
}

}  // namespace quenchxy
