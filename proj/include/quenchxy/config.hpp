#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace quenchxy {

enum class Experiment : std::uint8_t {
    TwoPoint,
    QuenchedTwoPoint,
    GoodBoxScan,
    WellsVerify,
    DominationCheck,
    BesselThresholds,
    LammersScan,
    Delocalization,
    NishimoriCorrelation,
    PathTails,
    VoronoiTwoPoint,
    Phi4TwoPoint,
    SpatialAverage,
    PhiR,
    DecayScan,
};

const std::vector<Experiment>& all_experiments();
// Kebab-case subcommand name, e.g. "quenched-two-point".
const char* to_string(Experiment e);
std::optional<Experiment> experiment_from_string(std::string_view name);

enum class ValueType : std::uint8_t { Int, Real, Text, IntList, RealList };

struct KeySpec {
    std::string key;            // "section.name"
    ValueType type = ValueType::Int;
    std::optional<std::string> default_value;  // absent: required
    double min = -1e300;        // numeric bounds, inclusive, applied to every list entry
    double max = 1e300;
    std::vector<std::string> choices;  // Text only; empty accepts anything
};

// Keys accepted for an experiment, including the [run] section.
std::vector<KeySpec> config_schema(Experiment e);

struct ExperimentConfig {
    Experiment experiment = Experiment::TwoPoint;
    std::map<std::string, std::string> values;  // every schema key, normalized

    std::int64_t get_int(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;
    double get_real(const std::string& key) const;
    const std::string& get_text(const std::string& key) const;
    std::vector<std::int64_t> get_int_list(const std::string& key) const;
    std::vector<double> get_real_list(const std::string& key) const;

    std::uint64_t seed() const { return get_u64("run.seed"); }
    unsigned workers() const { return static_cast<unsigned>(get_int("run.workers")); }

    // Sections in alphabetical order, keys sorted within each; parse_config of
    // this text yields the same config.
    std::string normalized() const;
    // FNV-1a of normalized() without the [run] workers and out keys, which do not affect results.
    std::uint64_t hash() const;
};

// Format: "[section]" headers, "key = value" lines, '#' comments. Values in
// `overrides` ("section.key" -> value) replace or add entries before
// validation. The experiment comes from run.experiment or `experiment`; if
// both are given they must agree. Parse errors name the offending key.
ExperimentConfig parse_config(std::string_view text, std::optional<Experiment> experiment = {},
                              const std::map<std::string, std::string>& overrides = {});

}  // namespace quenchxy
