#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bgan/config.hpp"
#include "bgan/error.hpp"
#include "support.hpp"

using namespace bgan;
using namespace bgan::config;

namespace {

ExperimentConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

std::string error_text(const std::string& text) {
    try {
        parse(text);
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("defaults are used when sections are absent") {
    const auto cfg = parse("");
    CHECK(cfg == ExperimentConfig{});
    CHECK(cfg.graph.agents == 10);
    CHECK(cfg.train.rounds == 5000);
    CHECK(cfg.arch_for(3).generator_hidden == std::vector<std::size_t>{64, 64});
}

TEST_CASE("parsing and echo round-trip") {
    const auto cfg = parse(R"(
# ring of four
[graph]
kind = ring
agents = 4
neighbors = 2

[dataset]
alpha = 100
beta = 20
samples_per_agent = 30
partition = angular
cuts = 0:0.5pi, 0.5pi:pi, pi:1.5pi, 1.5pi:2pi

[agents]
generator_hidden = 16,16
activation = tanh

[agents.2]
discriminator_hidden = none

[train]
arch = mdgan
lr = 0.00025
rounds = 12
loss = saturating
optimizer = sgd
deterministic = false
threads = 3
)");
    CHECK(cfg.graph.agents == 4);
    CHECK(cfg.dataset.alpha == 100.0);
    CHECK(cfg.arch == training::Architecture::mdgan);
    CHECK(cfg.train.learning_rate == 0.00025);
    CHECK(cfg.arch_for(0).generator_hidden == std::vector<std::size_t>{16, 16});
    CHECK(cfg.arch_for(2).discriminator_hidden.empty());
    CHECK(cfg.arch_for(2).hidden_activation == nn::Activation::tanh);
    CHECK(validate_config(cfg).empty());

    std::stringstream echo;
    write_config(cfg, echo);
    CHECK(parse_config(echo) == cfg);
}

TEST_CASE("every problem is listed at once") {
    const auto msg = error_text(R"(
[graph]
agents = ten
colour = blue
[train]
batch = -3
rounds = 5
rounds = 6
this line is broken
[nonsense]
x = 1
)");
    CHECK(contains(msg, "E_CONFIG"));
    CHECK(contains(msg, "graph.agents"));
    CHECK(contains(msg, "unknown key 'graph.colour'"));
    CHECK(contains(msg, "train.batch"));
    CHECK(contains(msg, "duplicate"));
    CHECK(contains(msg, "line 9"));
    CHECK(contains(msg, "nonsense"));
}

TEST_CASE("cross-field validation") {
    ExperimentConfig cfg;
    cfg.graph.kind = "ring";
    cfg.graph.agents = 3;
    cfg.graph.neighbors = 3;
    cfg.dataset.partition = "angular";
    cfg.dataset.cuts = "0:pi";
    cfg.agent_overrides[7] = training::AgentArch{};
    cfg.metrics.bins = 1;
    const auto v = validate_config(cfg);
    CHECK(v.size() >= 4);
    CHECK_ERROR_CODE(build_experiment(cfg), ErrorCode::config);

    ExperimentConfig fl;
    fl.graph.agents = 2;
    fl.arch = training::Architecture::flgan;
    fl.agent_overrides[1].discriminator_hidden = {8};
    CHECK_FALSE(validate_config(fl).empty());
}

TEST_CASE("cuts") {
    const auto equal = parse_cuts("equal", 4);
    REQUIRE(equal.size() == 4);
    CHECK(equal[1].lo == doctest::Approx(std::numbers::pi / 2));
    const auto custom = parse_cuts("0:1.2, 1.2:2pi", 2);
    CHECK(custom[1].hi == doctest::Approx(2 * std::numbers::pi));
    CHECK_ERROR_CODE(parse_cuts("0:pi", 2), ErrorCode::config);
    CHECK_ERROR_CODE(parse_cuts("0-pi, pi-2pi", 2), ErrorCode::config);
}

TEST_CASE("built experiments are normalised on the pooled shards") {
    ExperimentConfig cfg;
    cfg.graph.agents = 3;
    cfg.dataset.samples_per_agent = 40;
    cfg.dataset.reference_samples = 500;
    const auto built = build_experiment(cfg);
    const auto& e = built.experiment;
    REQUIRE(e.shards.size() == 3);
    double lo = 0.0, hi = 0.0;
    for (const auto& s : e.shards)
        for (double v : s.samples().values()) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    CHECK(lo == doctest::Approx(-1.0));
    CHECK(hi == doctest::Approx(1.0));
    CHECK(e.reference.size() == 500);
    CHECK(e.grid.bin_count() == 2500);
    CHECK(training::validate_experiment(e, training::Architecture::bgan).empty());
    // Same seed, same experiment.
    CHECK(build_experiment(cfg).experiment.shards == e.shards);
}

TEST_CASE("explicit weights with no self weight are rejected") {
    const auto dir = std::filesystem::temp_directory_path() / "bgan_config_test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream w(dir / "weights.txt");
        w << "0, 1:1\n0.5, 0:0.5\n";
    }
    ExperimentConfig cfg;
    cfg.graph.agents = 2;
    cfg.weights.strategy = "explicit";
    cfg.weights.path = "weights.txt";
    cfg.dataset.samples_per_agent = 10;
    cfg.dataset.reference_samples = 50;
    const auto built = build_experiment(cfg, dir.string());
    const auto v = training::validate_experiment(built.experiment, training::Architecture::bgan);
    bool dominance = false;
    for (const auto& s : v) dominance |= contains(s, "diagonally dominant");
    CHECK(dominance);
    CHECK_ERROR_CODE(training::run_bgan(built.experiment), ErrorCode::config);
    std::filesystem::remove_all(dir);
}
