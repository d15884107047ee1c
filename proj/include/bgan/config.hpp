#pragma once

// Experiment configuration: a flat text file with [section] headers and
// `key = value` lines. Parsing collects every problem before failing.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "bgan/datasets.hpp"
#include "bgan/training.hpp"

namespace bgan::config {

struct GraphConfig {
    std::string kind = "ring";  // ring | string | complete | edgeless | file
    std::size_t agents = 10;
    std::size_t neighbors = 1;  // ring only
    std::string path;           // file only

    bool operator==(const GraphConfig&) const = default;
};

struct WeightsConfig {
    std::string strategy = "uniform";  // uniform | proportional | explicit
    std::string path;                  // explicit only

    bool operator==(const WeightsConfig&) const = default;
};

struct DatasetConfig {
    std::string kind = "ring";  // ring | csv
    double alpha = 9.0;
    double beta = 2.0;
    std::size_t samples_per_agent = 100;
    std::string partition = "equal";  // equal | angular
    std::string cuts = "equal";       // angular: "equal" or "lo:hi, ..." in radians, "pi" suffix allowed
    std::size_t reference_samples = 10000;
    std::string path;  // csv only

    bool operator==(const DatasetConfig&) const = default;
};

struct MetricsConfig {
    std::size_t bins = 50;
    double min = -1.0;
    double max = 1.0;

    bool operator==(const MetricsConfig&) const = default;
};

struct ExperimentConfig {
    GraphConfig graph;
    WeightsConfig weights;
    DatasetConfig dataset;
    training::AgentArch agent_defaults;
    std::map<std::size_t, training::AgentArch> agent_overrides;
    training::TrainParams train;
    training::Architecture arch = training::Architecture::bgan;
    MetricsConfig metrics;
    std::string output_dir = "run";

    training::AgentArch arch_for(std::size_t agent) const;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Throws E_CONFIG listing every malformed line, unknown key and bad value.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

/// Cross-field checks (graph size vs cuts, agent ids in range, ...).
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

/// Fully resolved echo; parsing it back yields an equal config.
void write_config(const ExperimentConfig& cfg, std::ostream& out);

struct BuiltExperiment {
    training::Experiment experiment;
    datasets::AffineTransform transform;  // raw data -> normalised coordinates
};

/// Samples or loads data, normalises it on the pooled shards and builds the
/// graph and weights. Relative file paths resolve against `base_dir`.
BuiltExperiment build_experiment(const ExperimentConfig& cfg, const std::string& base_dir = ".");

topology::CommGraph build_graph(const ExperimentConfig& cfg, const std::string& base_dir = ".");

std::vector<datasets::AngleInterval> parse_cuts(const std::string& text, std::size_t agents);

}  // namespace bgan::config
