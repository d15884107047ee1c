#pragma once

// Round loops for brainstorming GANs and the baselines they are compared
// against (standalone, MDGAN, FLGAN, F2U), with communication counters.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bgan/agent.hpp"
#include "bgan/datasets.hpp"
#include "bgan/metrics.hpp"
#include "bgan/nn.hpp"
#include "bgan/topology.hpp"

namespace bgan::training {

enum class Architecture { bgan, standalone, mdgan, flgan, f2u };

std::string_view to_string(Architecture a) noexcept;
Architecture parse_architecture(std::string_view name);

struct AgentArch {
    std::vector<std::size_t> generator_hidden{64, 64};
    std::vector<std::size_t> discriminator_hidden{64, 64};
    nn::Activation hidden_activation = nn::Activation::relu;
    nn::Activation generator_output = nn::Activation::identity;

    bool operator==(const AgentArch&) const = default;
};

struct TrainParams {
    std::size_t batch = 64;
    std::size_t rounds = 5000;
    std::size_t log_every = 100;
    double learning_rate = 1e-3;
    nn::OptimizerKind optimizer = nn::OptimizerKind::adam;
    nn::GeneratorLoss loss = nn::GeneratorLoss::non_saturating;
    std::uint64_t seed = 1;
    std::size_t noise_dim = 8;
    std::size_t local_steps = 1;  // FLGAN local steps between averaging
    bool early_stop = false;
    std::size_t early_stop_window = 500;
    double early_stop_delta = 1e-3;
    std::size_t eval_samples = 10000;
    bool deterministic = true;
    std::size_t threads = 1;

    bool operator==(const TrainParams&) const = default;
};

/// Everything a run needs. Shards and reference are already in the
/// normalised coordinates the evaluation grid covers.
struct Experiment {
    topology::CommGraph graph;
    topology::MixingWeights weights;
    std::vector<datasets::Dataset> shards;
    std::vector<AgentArch> archs;
    TrainParams train;
    datasets::Dataset reference;
    metrics::HistogramGrid grid = metrics::default_grid();
};

/// Lists every problem with the experiment for the given architecture.
std::vector<std::string> validate_experiment(const Experiment& exp, Architecture arch);

std::vector<AgentState> make_agents(const Experiment& exp);

/// Largest-remainder split of b into integer counts; first entry is the
/// receiver's own share.
std::vector<std::size_t> allocate_batch(double own_weight, std::span<const double> neighbor_weights,
                                        std::size_t b);

struct Allocation {
    std::size_t own = 0;
    std::vector<std::pair<topology::AgentId, std::size_t>> ideas;  // (sender, count)
};

struct RoundPlan {
    std::size_t batch = 0;
    std::vector<Allocation> allocations;  // per receiver
};

RoundPlan plan_round(const topology::CommGraph& g, const topology::MixingWeights& w, std::size_t b);

struct RoundMetrics {
    std::vector<double> d_objective;
    std::vector<double> g_objective;
    std::vector<std::size_t> positive_rows;
    std::vector<std::size_t> negative_rows;
    std::vector<std::uint64_t> units_sent;  // per agent, this round
    std::uint64_t total_units = 0;
};

struct StepOptions {
    nn::GeneratorLoss loss = nn::GeneratorLoss::non_saturating;
    bool deterministic = true;
    std::size_t threads = 1;
};

/// One synchronous round: every generator produces b ideas from its
/// start-of-round parameters, ideas are exchanged, then every agent performs
/// one discriminator ascent and one generator descent.
RoundMetrics bgan_round(std::vector<AgentState>& agents, const topology::CommGraph& g,
                        const RoundPlan& plan, const StepOptions& opts);

/// Local GAN step on the agent's own shard.
RoundMetrics standalone_round(std::vector<AgentState>& agents, std::size_t b, const StepOptions& opts);

/// Central generator shared by MDGAN and F2U.
struct CentralGenerator {
    nn::Mlp generator;
    nn::OptimizerState opt;
    datasets::Rng noise_stream;
    std::size_t noise_dim = 8;
    std::uint64_t eval_seed = 0;
};

CentralGenerator make_central_generator(const Experiment& exp);

RoundMetrics central_round(CentralGenerator& central, std::vector<AgentState>& agents, std::size_t b,
                           nn::DiscriminatorMix mix, const StepOptions& opts);

RoundMetrics flgan_round(std::vector<AgentState>& agents, std::size_t b, std::size_t local_steps,
                         const StepOptions& opts);

/// Units per round predicted for each architecture (one unit = one scalar).
std::uint64_t comm_cost(Architecture arch, std::uint64_t n, std::uint64_t b, std::uint64_t x_size,
                        std::uint64_t theta_d_size, std::uint64_t theta_g_size);

struct ReportRow {
    std::size_t round = 0;
    std::size_t agent = 0;
    double jsd = 0.0;
    double d_real_mean = 0.0;
    double d_fake_mean = 0.0;
    std::uint64_t comm_units = 0;  // cumulative for this agent

    bool operator==(const ReportRow&) const = default;
};

struct TrainingReport {
    Architecture arch = Architecture::bgan;
    std::uint64_t seed = 0;
    std::size_t rounds_run = 0;
    std::vector<ReportRow> rows;
    std::vector<double> final_jsd;  // per agent
    std::uint64_t total_comm_units = 0;
    std::uint64_t last_round_units = 0;
    double wall_seconds = 0.0;
};

double mean_final_jsd(const TrainingReport& report);

/// Called after every round with the current generators and discriminators;
/// central architectures pass their single generator.
using RoundObserver =
    std::function<void(std::size_t round, std::span<const nn::Mlp> generators,
                       std::span<const nn::Mlp> discriminators)>;

struct TrainingResult {
    TrainingReport report;
    std::vector<nn::Mlp> generators;  // one, shared, for MDGAN and F2U
    std::vector<nn::Mlp> discriminators;
    std::vector<std::size_t> noise_dims;
};

TrainingResult run(Architecture arch, const Experiment& exp, const RoundObserver& observer = {});

inline TrainingResult run_bgan(const Experiment& e) { return run(Architecture::bgan, e); }
inline TrainingResult run_standalone(const Experiment& e) { return run(Architecture::standalone, e); }
inline TrainingResult run_mdgan(const Experiment& e) { return run(Architecture::mdgan, e); }
inline TrainingResult run_flgan(const Experiment& e) { return run(Architecture::flgan, e); }
inline TrainingResult run_f2u(const Experiment& e) { return run(Architecture::f2u, e); }

/// report.csv: round,agent,jsd,d_real_mean,d_fake_mean,comm_units
void write_report_csv(const TrainingReport& report, std::ostream& out);
std::vector<ReportRow> read_report_csv(std::istream& in);

}  // namespace bgan::training
