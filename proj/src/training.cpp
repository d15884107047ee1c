#include "bgan/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "bgan/error.hpp"

namespace bgan::training {

std::string_view to_string(Architecture a) noexcept {
    switch (a) {
        case Architecture::bgan: return "bgan";
        case Architecture::standalone: return "standalone";
        case Architecture::mdgan: return "mdgan";
        case Architecture::flgan: return "flgan";
        case Architecture::f2u: return "f2u";
    }
    return "bgan";
}

Architecture parse_architecture(std::string_view name) {
    if (name == "bgan") return Architecture::bgan;
    if (name == "standalone") return Architecture::standalone;
    if (name == "mdgan") return Architecture::mdgan;
    if (name == "flgan") return Architecture::flgan;
    if (name == "f2u") return Architecture::f2u;
    throw Error(ErrorCode::config, "unknown architecture '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Setup

namespace {

nn::MlpSpec generator_spec(const AgentArch& a, std::size_t noise_dim, std::size_t data_dim) {
    return nn::make_spec(noise_dim, a.generator_hidden, data_dim, a.hidden_activation,
                         a.generator_output);
}

nn::MlpSpec discriminator_spec(const AgentArch& a, std::size_t data_dim) {
    return nn::make_spec(data_dim, a.discriminator_hidden, 1, a.hidden_activation,
                         nn::Activation::sigmoid);
}

nn::OptimizerState make_optimizer(const TrainParams& p, const nn::Mlp& net) {
    return nn::OptimizerState(p.optimizer, net, p.learning_rate);
}

}  // namespace

std::vector<std::string> validate_experiment(const Experiment& exp, Architecture arch) {
    std::vector<std::string> v;
    const std::size_t n = exp.shards.size();
    const auto& p = exp.train;
    if (n == 0) v.push_back("experiment has no agents");
    if (exp.archs.size() != n) {
        v.push_back("expected " + std::to_string(n) + " agent architectures, got " +
                    std::to_string(exp.archs.size()));
    }
    if (exp.graph.size() != n) {
        v.push_back("graph has " + std::to_string(exp.graph.size()) + " agents but there are " +
                    std::to_string(n) + " shards");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (exp.shards[i].empty()) v.push_back("agent " + std::to_string(i) + " has an empty shard");
        if (exp.shards[i].dim() != exp.shards.front().dim()) {
            v.push_back("agent " + std::to_string(i) + " shard dimension differs from agent 0");
        }
    }
    for (std::size_t i = 0; i < exp.archs.size(); ++i) {
        for (std::size_t h : exp.archs[i].generator_hidden)
            if (h == 0) v.push_back("agent " + std::to_string(i) + " generator has a zero-width layer");
        for (std::size_t h : exp.archs[i].discriminator_hidden)
            if (h == 0)
                v.push_back("agent " + std::to_string(i) + " discriminator has a zero-width layer");
    }
    if (p.batch == 0) v.push_back("train.batch must be >= 1");
    if (p.rounds == 0) v.push_back("train.rounds must be >= 1");
    if (p.log_every == 0) v.push_back("train.log_every must be >= 1");
    if (p.noise_dim == 0) v.push_back("train.noise_dim must be >= 1");
    if (p.eval_samples == 0) v.push_back("train.eval_samples must be >= 1");
    if (p.local_steps == 0) v.push_back("train.local_steps must be >= 1");
    if (!(p.learning_rate >= 0.0) || !std::isfinite(p.learning_rate)) {
        v.push_back("train.lr must be finite and non-negative");
    }
    if (exp.reference.empty()) v.push_back("experiment needs a reference sample for evaluation");
    if (!exp.shards.empty() && !exp.reference.empty() && exp.reference.dim() != exp.shards.front().dim()) {
        v.push_back("reference dimension differs from shard dimension");
    }
    if (!exp.shards.empty() && exp.grid.dims() != exp.shards.front().dim()) {
        v.push_back("evaluation grid has " + std::to_string(exp.grid.dims()) +
                    " dims, data has " + std::to_string(exp.shards.front().dim()));
    }
    if (arch == Architecture::bgan && exp.graph.size() == n) {
        for (auto& s : topology::violations(exp.weights, exp.graph)) v.push_back(std::move(s));
    }
    if (arch == Architecture::flgan) {
        for (std::size_t i = 1; i < exp.archs.size(); ++i) {
            if (!(exp.archs[i] == exp.archs[0])) {
                v.push_back("flgan averages parameters and needs identical architectures; agent " +
                            std::to_string(i) + " differs from agent 0");
            }
        }
    }
    return v;
}

std::vector<AgentState> make_agents(const Experiment& exp) {
    using datasets::StreamPurpose;
    const auto& p = exp.train;
    std::vector<AgentState> agents;
    agents.reserve(exp.shards.size());
    for (std::size_t i = 0; i < exp.shards.size(); ++i) {
        const std::size_t dim = exp.shards[i].dim();
        AgentState a;
        a.id = i;
        a.generator = nn::mlp_init(generator_spec(exp.archs[i], p.noise_dim, dim),
                                   datasets::stream_seed(p.seed, i, StreamPurpose::generator_init));
        a.discriminator =
            nn::mlp_init(discriminator_spec(exp.archs[i], dim),
                         datasets::stream_seed(p.seed, i, StreamPurpose::discriminator_init));
        a.generator_opt = make_optimizer(p, a.generator);
        a.discriminator_opt = make_optimizer(p, a.discriminator);
        a.data = exp.shards[i];
        a.noise_dim = p.noise_dim;
        a.noise_stream = datasets::make_stream(p.seed, i, StreamPurpose::noise);
        a.real_stream = datasets::make_stream(p.seed, i, StreamPurpose::real_draw);
        a.eval_seed = datasets::stream_seed(p.seed, i, StreamPurpose::evaluation);
        agents.push_back(std::move(a));
    }
    return agents;
}

CentralGenerator make_central_generator(const Experiment& exp) {
    using datasets::StreamPurpose;
    const auto& p = exp.train;
    // Seeded like agent 0 so a one-agent central run matches a standalone run.
    CentralGenerator c;
    c.generator = nn::mlp_init(generator_spec(exp.archs.at(0), p.noise_dim, exp.shards.at(0).dim()),
                               datasets::stream_seed(p.seed, 0, StreamPurpose::generator_init));
    c.opt = make_optimizer(p, c.generator);
    c.noise_stream = datasets::make_stream(p.seed, 0, StreamPurpose::noise);
    c.noise_dim = p.noise_dim;
    c.eval_seed = datasets::stream_seed(p.seed, 0, StreamPurpose::evaluation);
    return c;
}

// ---------------------------------------------------------------------------
// Batch allocation

std::vector<std::size_t> allocate_batch(double own_weight, std::span<const double> neighbor_weights,
                                        std::size_t b) {
    std::vector<double> w;
    w.reserve(neighbor_weights.size() + 1);
    w.push_back(own_weight);
    w.insert(w.end(), neighbor_weights.begin(), neighbor_weights.end());
    double total = 0.0;
    for (double x : w) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            throw Error(ErrorCode::validation, "batch allocation weights must be non-negative");
        }
        total += x;
    }
    if (!(total > 0.0)) throw Error(ErrorCode::validation, "batch allocation weights sum to zero");

    std::vector<std::size_t> counts(w.size());
    std::vector<double> remainder(w.size());
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        const double quota = w[k] / total * static_cast<double>(b);
        // Guard against quotas like 31.999999999999996.
        const double fl = std::floor(quota + 1e-9);
        counts[k] = static_cast<std::size_t>(fl);
        remainder[k] = quota - fl;
        assigned += counts[k];
    }
    while (assigned > b) {
        const auto k = static_cast<std::size_t>(
            std::min_element(remainder.begin(), remainder.end()) - remainder.begin());
        if (counts[k] > 0) {
            --counts[k];
            --assigned;
        }
        remainder[k] += 1.0;
    }
    std::vector<std::size_t> order(w.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t c) { return remainder[a] > remainder[c]; });
    for (std::size_t i = 0; assigned < b; i = (i + 1) % order.size()) {
        ++counts[order[i]];
        ++assigned;
    }
    return counts;
}

RoundPlan plan_round(const topology::CommGraph& g, const topology::MixingWeights& w, std::size_t b) {
    RoundPlan plan;
    plan.batch = b;
    for (topology::AgentId i = 0; i < g.size(); ++i) {
        const auto& in = g.in_neighbors(i);
        std::vector<double> nw;
        for (auto j : in) nw.push_back(w.B[i][j]);
        const auto counts = allocate_batch(w.C[i], nw, b);
        Allocation a;
        a.own = counts[0];
        for (std::size_t k = 0; k < in.size(); ++k) a.ideas.emplace_back(in[k], counts[k + 1]);
        plan.allocations.push_back(std::move(a));
    }
    return plan;
}

// ---------------------------------------------------------------------------
// Rounds

namespace {

template <typename Fn>
void for_each_agent(std::size_t n, const StepOptions& opts, Fn&& fn) {
    const std::size_t threads = std::min<std::size_t>(opts.threads, n);
    if (opts.deterministic || threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += threads) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

RoundMetrics empty_metrics(std::size_t n) {
    RoundMetrics m;
    m.d_objective.assign(n, 0.0);
    m.g_objective.assign(n, 0.0);
    m.positive_rows.assign(n, 0);
    m.negative_rows.assign(n, 0);
    m.units_sent.assign(n, 0);
    return m;
}

[[noreturn]] void rethrow_for_agent(std::size_t id, const Error& e) {
    throw Error(e.code(), "agent " + std::to_string(id) + ": " + e.what());
}

// Discriminator ascent then generator descent for one agent.
void local_update(AgentState& a, const Matrix& positives, const Matrix& fakes, std::size_t b,
                  nn::GeneratorLoss loss, RoundMetrics& m) {
    try {
        m.d_objective[a.id] = nn::discriminator_step(a.discriminator, a.discriminator_opt, positives, fakes);
        m.positive_rows[a.id] = positives.rows();
        m.negative_rows[a.id] = fakes.rows();
        const Matrix z = datasets::noise_batch(a.noise_dim, b, a.noise_stream);
        m.g_objective[a.id] = nn::generator_step(a.generator, a.discriminator, a.generator_opt, z, loss);
    } catch (const Error& e) {
        rethrow_for_agent(a.id, e);
    }
}

}  // namespace

RoundMetrics bgan_round(std::vector<AgentState>& agents, const topology::CommGraph& g,
                        const RoundPlan& plan, const StepOptions& opts) {
    const std::size_t n = agents.size();
    const std::size_t b = plan.batch;
    if (g.size() != n || plan.allocations.size() != n) {
        throw Error(ErrorCode::dimension, "bgan_round: graph, plan and agents disagree on size");
    }
    RoundMetrics m = empty_metrics(n);

    // Phase 1: every agent generates b ideas from its start-of-round generator.
    std::vector<Matrix> fakes(n);
    for_each_agent(n, opts, [&](std::size_t i) {
        auto& a = agents[i];
        fakes[i] = generate(a.generator, b, a.noise_dim, a.noise_stream);
    });
    // Ideas go out as one broadcast of the b-sample batch per sender.
    for (std::size_t i = 0; i < n; ++i) {
        if (!g.out_neighbors(i).empty()) {
            m.units_sent[i] = static_cast<std::uint64_t>(b) * fakes[i].cols();
            m.total_units += m.units_sent[i];
        }
    }

    // Phase 2: assemble positives (own real + received ideas) and update.
    for_each_agent(n, opts, [&](std::size_t i) {
        auto& a = agents[i];
        const auto& alloc = plan.allocations[i];
        Matrix positives = draw_with_replacement(a.data, alloc.own, a.real_stream);
        for (const auto& [sender, count] : alloc.ideas) {
            if (count > 0) positives.append_rows(fakes[sender].slice_rows(0, count));
        }
        if (positives.rows() != b) {
            throw Error(ErrorCode::internal, "agent " + std::to_string(i) + " positive batch has " +
                                                 std::to_string(positives.rows()) + " rows");
        }
        local_update(a, positives, fakes[i], b, opts.loss, m);
    });
    return m;
}

RoundMetrics standalone_round(std::vector<AgentState>& agents, std::size_t b, const StepOptions& opts) {
    RoundMetrics m = empty_metrics(agents.size());
    for_each_agent(agents.size(), opts, [&](std::size_t i) {
        auto& a = agents[i];
        const Matrix fakes = generate(a.generator, b, a.noise_dim, a.noise_stream);
        const Matrix real = draw_with_replacement(a.data, b, a.real_stream);
        local_update(a, real, fakes, b, opts.loss, m);
    });
    return m;
}

RoundMetrics central_round(CentralGenerator& central, std::vector<AgentState>& agents, std::size_t b,
                           nn::DiscriminatorMix mix, const StepOptions& opts) {
    const std::size_t n = agents.size();
    RoundMetrics m = empty_metrics(n);
    // Server -> agent k: a fresh fake batch for each discriminator.
    std::vector<Matrix> fakes(n);
    for (std::size_t k = 0; k < n; ++k) {
        fakes[k] = generate(central.generator, b, central.noise_dim, central.noise_stream);
    }
    for_each_agent(n, opts, [&](std::size_t k) {
        auto& a = agents[k];
        try {
            const Matrix real = draw_with_replacement(a.data, b, a.real_stream);
            m.d_objective[k] = nn::discriminator_step(a.discriminator, a.discriminator_opt, real, fakes[k]);
            m.positive_rows[k] = real.rows();
            m.negative_rows[k] = fakes[k].rows();
        } catch (const Error& e) {
            rethrow_for_agent(k, e);
        }
    });
    for (std::size_t k = 0; k < n; ++k) {
        // MDGAN ships the discriminator to the server; F2U returns one score.
        const std::uint64_t uplink = mix == nn::DiscriminatorMix::mean
                                         ? agents[k].discriminator.parameter_count()
                                         : 1;
        m.units_sent[k] = static_cast<std::uint64_t>(b) * fakes[k].cols() + uplink;
        m.total_units += m.units_sent[k];
    }

    std::vector<nn::Mlp> ds;
    ds.reserve(n);
    for (const auto& a : agents) ds.push_back(a.discriminator);
    const Matrix z = datasets::noise_batch(central.noise_dim, b, central.noise_stream);
    const double obj = nn::generator_step(central.generator, ds, central.opt, z, opts.loss, mix);
    std::fill(m.g_objective.begin(), m.g_objective.end(), obj);
    return m;
}

RoundMetrics flgan_round(std::vector<AgentState>& agents, std::size_t b, std::size_t local_steps,
                         const StepOptions& opts) {
    const std::size_t n = agents.size();
    RoundMetrics m = empty_metrics(n);
    for (std::size_t s = 0; s < local_steps; ++s) {
        const RoundMetrics step = standalone_round(agents, b, opts);
        m.d_objective = step.d_objective;
        m.g_objective = step.g_objective;
        m.positive_rows = step.positive_rows;
        m.negative_rows = step.negative_rows;
    }
    // Equal-weight averaging at the server, broadcast back to every agent.
    auto average = [&](auto member) {
        std::vector<double> acc = (agents[0].*member).flatten();
        for (std::size_t k = 1; k < n; ++k) {
            const auto theta = (agents[k].*member).flatten();
            if (theta.size() != acc.size()) {
                throw Error(ErrorCode::config, "flgan needs identical architectures");
            }
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += theta[i];
        }
        const double denom = static_cast<double>(n);
        for (double& v : acc) v /= denom;
        for (auto& a : agents) (a.*member).assign(acc);
    };
    average(&AgentState::generator);
    average(&AgentState::discriminator);
    for (std::size_t k = 0; k < n; ++k) {
        m.units_sent[k] = agents[k].generator.parameter_count() + agents[k].discriminator.parameter_count();
        m.total_units += m.units_sent[k];
    }
    return m;
}

std::uint64_t comm_cost(Architecture arch, std::uint64_t n, std::uint64_t b, std::uint64_t x_size,
                        std::uint64_t theta_d_size, std::uint64_t theta_g_size) {
    switch (arch) {
        case Architecture::bgan: return n * b * x_size;
        case Architecture::standalone: return 0;
        case Architecture::mdgan: return n * (b * x_size + theta_d_size);
        case Architecture::flgan: return n * (theta_g_size + theta_d_size);
        case Architecture::f2u: return n * (b * x_size + 1);
    }
    throw Error(ErrorCode::config, "unknown architecture");
}

// ---------------------------------------------------------------------------
// Run loop

double mean_final_jsd(const TrainingReport& report) {
    if (report.final_jsd.empty()) return 0.0;
    return std::accumulate(report.final_jsd.begin(), report.final_jsd.end(), 0.0) /
           static_cast<double>(report.final_jsd.size());
}

namespace {

struct Evaluation {
    double jsd = 0.0;
    metrics::Balance balance;
};

Evaluation evaluate(const nn::Mlp& generator, std::size_t noise_dim, std::uint64_t eval_seed,
                    const nn::Mlp& discriminator, const datasets::Dataset& shard, const Experiment& exp) {
    datasets::Rng rng(eval_seed);
    const Matrix fake = generate(generator, exp.train.eval_samples, noise_dim, rng);
    Evaluation ev;
    ev.jsd = metrics::empirical_jsd(fake, exp.reference.samples(), exp.grid);
    const std::size_t n_bal = std::min<std::size_t>(exp.train.eval_samples, 2000);
    const Matrix real = draw_with_replacement(shard, n_bal, rng);
    ev.balance = metrics::discriminator_balance(discriminator, real, fake.slice_rows(0, n_bal));
    return ev;
}

}  // namespace

TrainingResult run(Architecture arch, const Experiment& exp, const RoundObserver& observer) {
    const auto problems = validate_experiment(exp, arch);
    if (!problems.empty()) {
        std::string msg = "invalid experiment for " + std::string(to_string(arch)) + ":";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw Error(ErrorCode::config, msg);
    }
    const auto start = std::chrono::steady_clock::now();
    const auto& p = exp.train;
    const std::size_t n = exp.shards.size();
    const StepOptions opts{p.loss, p.deterministic, std::max<std::size_t>(p.threads, 1)};
    const bool central = arch == Architecture::mdgan || arch == Architecture::f2u;

    std::vector<AgentState> agents = make_agents(exp);
    CentralGenerator hub;
    if (central) hub = make_central_generator(exp);
    RoundPlan plan;
    if (arch == Architecture::bgan) plan = plan_round(exp.graph, exp.weights, p.batch);

    TrainingResult result;
    auto& report = result.report;
    report.arch = arch;
    report.seed = p.seed;
    std::vector<std::uint64_t> cumulative(n, 0);
    std::vector<std::pair<std::size_t, double>> history;  // (round, mean jsd)

    for (std::size_t round = 1; round <= p.rounds; ++round) {
        RoundMetrics m;
        switch (arch) {
            case Architecture::bgan: m = bgan_round(agents, exp.graph, plan, opts); break;
            case Architecture::standalone: m = standalone_round(agents, p.batch, opts); break;
            case Architecture::mdgan:
                m = central_round(hub, agents, p.batch, nn::DiscriminatorMix::mean, opts);
                break;
            case Architecture::f2u:
                m = central_round(hub, agents, p.batch, nn::DiscriminatorMix::most_forgiving, opts);
                break;
            case Architecture::flgan: m = flgan_round(agents, p.batch, p.local_steps, opts); break;
        }
        for (std::size_t i = 0; i < n; ++i) cumulative[i] += m.units_sent[i];
        report.total_comm_units += m.total_units;
        report.last_round_units = m.total_units;
        report.rounds_run = round;

        if (observer) {
            std::vector<nn::Mlp> gs;
            std::vector<nn::Mlp> ds;
            if (central) gs.push_back(hub.generator);
            for (const auto& a : agents) {
                if (!central) gs.push_back(a.generator);
                ds.push_back(a.discriminator);
            }
            observer(round, gs, ds);
        }

        const bool last = round == p.rounds;
        if (round % p.log_every != 0 && !last) continue;

        std::vector<double> jsds(n);
        Evaluation shared;
        if (central) {
            shared = evaluate(hub.generator, hub.noise_dim, hub.eval_seed, agents[0].discriminator,
                              agents[0].data, exp);
        }
        for (std::size_t i = 0; i < n; ++i) {
            const auto& a = agents[i];
            Evaluation ev;
            if (central) {
                datasets::Rng rng(a.eval_seed);
                const std::size_t n_bal = std::min<std::size_t>(p.eval_samples, 2000);
                const Matrix fake = generate(hub.generator, n_bal, hub.noise_dim, rng);
                const Matrix real = draw_with_replacement(a.data, n_bal, rng);
                ev.jsd = shared.jsd;
                ev.balance = metrics::discriminator_balance(a.discriminator, real, fake);
            } else {
                ev = evaluate(a.generator, a.noise_dim, a.eval_seed, a.discriminator, a.data, exp);
            }
            jsds[i] = ev.jsd;
            report.rows.push_back(
                {round, i, ev.jsd, ev.balance.real_mean, ev.balance.fake_mean, cumulative[i]});
        }
        report.final_jsd = jsds;
        const double mean = std::accumulate(jsds.begin(), jsds.end(), 0.0) / static_cast<double>(n);
        history.emplace_back(round, mean);

        if (p.early_stop && round >= 2 * p.early_stop_window) {
            auto window_mean = [&](std::size_t lo, std::size_t hi) {
                double s = 0.0;
                std::size_t c = 0;
                for (const auto& [r, v] : history)
                    if (r > lo && r <= hi) {
                        s += v;
                        ++c;
                    }
                return c ? s / static_cast<double>(c) : std::nan("");
            };
            const double recent = window_mean(round - p.early_stop_window, round);
            const double before = window_mean(round - 2 * p.early_stop_window, round - p.early_stop_window);
            if (std::isfinite(recent) && std::isfinite(before) && before - recent < p.early_stop_delta) break;
        }
    }

    if (central) result.generators.push_back(hub.generator);
    for (const auto& a : agents) {
        if (!central) result.generators.push_back(a.generator);
        result.discriminators.push_back(a.discriminator);
        if (!central) result.noise_dims.push_back(a.noise_dim);
    }
    if (central) result.noise_dims.push_back(hub.noise_dim);
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

// ---------------------------------------------------------------------------
// report.csv

void write_report_csv(const TrainingReport& report, std::ostream& out) {
    out << "round,agent,jsd,d_real_mean,d_fake_mean,comm_units\n";
    out << std::setprecision(10);
    for (const auto& r : report.rows) {
        out << r.round << ',' << r.agent << ',' << r.jsd << ',' << r.d_real_mean << ','
            << r.d_fake_mean << ',' << r.comm_units << '\n';
    }
}

std::vector<ReportRow> read_report_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("round,agent,jsd", 0) != 0) {
        throw Error(ErrorCode::io, "report.csv: missing header");
    }
    std::vector<ReportRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        ReportRow r;
        char c1 = 0, c2 = 0, c3 = 0, c4 = 0, c5 = 0;
        if (!(ls >> r.round >> c1 >> r.agent >> c2 >> r.jsd >> c3 >> r.d_real_mean >> c4 >>
              r.d_fake_mean >> c5 >> r.comm_units) ||
            c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',' || c5 != ',') {
            throw Error(ErrorCode::io, "report.csv: malformed line " + std::to_string(line_no));
        }
        rows.push_back(r);
    }
    return rows;
}

}  // namespace bgan::training
