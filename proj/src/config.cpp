#include "bgan/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "bgan/error.hpp"

namespace bgan::config {

namespace fs = std::filesystem;
using training::AgentArch;
using training::Architecture;

AgentArch ExperimentConfig::arch_for(std::size_t agent) const {
    auto it = agent_overrides.find(agent);
    return it == agent_overrides.end() ? agent_defaults : it->second;
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

struct Entry {
    std::string value;
    std::size_t line = 0;
};

using Section = std::map<std::string, Entry>;

// Pulls typed values out of one section and remembers what was consumed so
// leftovers can be reported as unknown keys.
class Reader {
public:
    Reader(std::string name, Section& section, std::vector<std::string>& errors)
        : name_(std::move(name)), section_(section), errors_(errors) {}

    ~Reader() {
        for (const auto& [key, e] : section_) {
            if (!used_.count(key)) {
                errors_.push_back("line " + std::to_string(e.line) + ": unknown key '" + name_ +
                                  "." + key + "'");
            }
        }
    }

    void text(const char* key, std::string& out) {
        if (auto* e = find(key)) out = e->value;
    }

    void size(const char* key, std::size_t& out) {
        auto* e = find(key);
        if (!e) return;
        std::size_t v = 0;
        const auto* end = e->value.data() + e->value.size();
        auto [p, ec] = std::from_chars(e->value.data(), end, v);
        if (ec != std::errc() || p != end) return bad(key, *e, "a non-negative integer");
        out = v;
    }

    void u64(const char* key, std::uint64_t& out) {
        auto* e = find(key);
        if (!e) return;
        std::uint64_t v = 0;
        const auto* end = e->value.data() + e->value.size();
        auto [p, ec] = std::from_chars(e->value.data(), end, v);
        if (ec != std::errc() || p != end) return bad(key, *e, "a non-negative integer");
        out = v;
    }

    void real(const char* key, double& out) {
        auto* e = find(key);
        if (!e) return;
        try {
            std::size_t pos = 0;
            const double v = std::stod(e->value, &pos);
            if (pos != e->value.size() || !std::isfinite(v)) return bad(key, *e, "a finite number");
            out = v;
        } catch (const std::logic_error&) {
            bad(key, *e, "a finite number");
        }
    }

    void flag(const char* key, bool& out) {
        auto* e = find(key);
        if (!e) return;
        if (e->value == "true" || e->value == "1" || e->value == "yes") {
            out = true;
        } else if (e->value == "false" || e->value == "0" || e->value == "no") {
            out = false;
        } else {
            bad(key, *e, "true or false");
        }
    }

    void widths(const char* key, std::vector<std::size_t>& out) {
        auto* e = find(key);
        if (!e) return;
        std::vector<std::size_t> v;
        if (e->value != "none") {
            std::stringstream ss(e->value);
            std::string item;
            while (std::getline(ss, item, ',')) {
                item = trim(item);
                std::size_t w = 0;
                const auto* end = item.data() + item.size();
                auto [p, ec] = std::from_chars(item.data(), end, w);
                if (item.empty() || ec != std::errc() || p != end) {
                    return bad(key, *e, "a comma-separated list of layer widths or 'none'");
                }
                v.push_back(w);
            }
        }
        out = std::move(v);
    }

    template <typename T, typename Parse>
    void parsed(const char* key, T& out, Parse parse) {
        auto* e = find(key);
        if (!e) return;
        try {
            out = parse(e->value);
        } catch (const Error& err) {
            errors_.push_back("line " + std::to_string(e->line) + ": " + name_ + "." + key + ": " +
                              err.what());
        }
    }

private:
    Entry* find(const char* key) {
        used_.insert(key);
        auto it = section_.find(key);
        return it == section_.end() ? nullptr : &it->second;
    }

    void bad(const char* key, const Entry& e, const char* expected) {
        errors_.push_back("line " + std::to_string(e.line) + ": " + name_ + "." + key + " = '" +
                          e.value + "' is not " + expected);
    }

    std::string name_;
    Section& section_;
    std::vector<std::string>& errors_;
    std::set<std::string> used_;
};

void read_agent(Reader& r, AgentArch& a) {
    r.widths("generator_hidden", a.generator_hidden);
    r.widths("discriminator_hidden", a.discriminator_hidden);
    r.parsed("activation", a.hidden_activation, nn::parse_activation);
    r.parsed("generator_output", a.generator_output, nn::parse_activation);
}

[[noreturn]] void fail(const std::string& what, const std::vector<std::string>& errors) {
    std::string msg = what;
    for (const auto& e : errors) msg += "\n  - " + e;
    throw Error(ErrorCode::config, msg);
}

nn::OptimizerKind parse_optimizer(std::string_view s) {
    if (s == "adam") return nn::OptimizerKind::adam;
    if (s == "sgd") return nn::OptimizerKind::sgd;
    throw Error(ErrorCode::config, "unknown optimizer '" + std::string(s) + "'");
}

std::string_view optimizer_name(nn::OptimizerKind k) {
    return k == nn::OptimizerKind::adam ? "adam" : "sgd";
}

double parse_angle(std::string s) {
    s = trim(s);
    double factor = 1.0;
    if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
        factor = std::numbers::pi;
        s = trim(s.substr(0, s.size() - 2));
        if (s.empty()) return factor;
    }
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::logic_error&) {
        pos = std::string::npos;
    }
    if (pos != s.size()) throw Error(ErrorCode::config, "bad angle '" + s + "'");
    return v * factor;
}

}  // namespace

std::vector<datasets::AngleInterval> parse_cuts(const std::string& text, std::size_t agents) {
    std::vector<datasets::AngleInterval> cuts;
    if (trim(text) == "equal") {
        const double step = 2.0 * std::numbers::pi / static_cast<double>(agents);
        for (std::size_t a = 0; a < agents; ++a) {
            const double hi = a + 1 == agents ? 2.0 * std::numbers::pi : step * static_cast<double>(a + 1);
            cuts.push_back({step * static_cast<double>(a), hi});
        }
        return cuts;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw Error(ErrorCode::config, "cut '" + trim(item) + "' is not lo:hi");
        cuts.push_back({parse_angle(item.substr(0, colon)), parse_angle(item.substr(colon + 1))});
    }
    if (cuts.size() != agents) {
        throw Error(ErrorCode::config, "dataset.cuts has " + std::to_string(cuts.size()) +
                                           " intervals for " + std::to_string(agents) + " agents");
    }
    return cuts;
}

ExperimentConfig parse_config(std::istream& in) {
    std::map<std::string, Section> sections;
    std::vector<std::string> errors;
    std::string current;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                errors.push_back("line " + std::to_string(line_no) + ": malformed section header");
                continue;
            }
            current = trim(line.substr(1, line.size() - 2));
            sections[current];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(line_no) + ": expected 'key = value'");
            continue;
        }
        if (current.empty()) {
            errors.push_back("line " + std::to_string(line_no) + ": key outside any section");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        auto& sec = sections[current];
        if (sec.count(key)) {
            errors.push_back("line " + std::to_string(line_no) + ": duplicate key '" + current + "." +
                             key + "'");
            continue;
        }
        sec[key] = {trim(line.substr(eq + 1)), line_no};
    }

    ExperimentConfig cfg;
    for (auto& [name, sec] : sections) {
        // Overrides are applied after defaults, below.
        if (name.rfind("agents.", 0) == 0) continue;
        Reader r(name, sec, errors);
        if (name == "graph") {
            r.text("kind", cfg.graph.kind);
            r.size("agents", cfg.graph.agents);
            r.size("neighbors", cfg.graph.neighbors);
            r.text("path", cfg.graph.path);
        } else if (name == "weights") {
            r.text("strategy", cfg.weights.strategy);
            r.text("path", cfg.weights.path);
        } else if (name == "dataset") {
            auto& d = cfg.dataset;
            r.text("kind", d.kind);
            r.real("alpha", d.alpha);
            r.real("beta", d.beta);
            r.size("samples_per_agent", d.samples_per_agent);
            r.text("partition", d.partition);
            r.text("cuts", d.cuts);
            r.size("reference_samples", d.reference_samples);
            r.text("path", d.path);
        } else if (name == "agents") {
            read_agent(r, cfg.agent_defaults);
        } else if (name == "train") {
            auto& t = cfg.train;
            r.parsed("arch", cfg.arch, training::parse_architecture);
            r.size("batch", t.batch);
            r.size("rounds", t.rounds);
            r.size("log_every", t.log_every);
            r.real("lr", t.learning_rate);
            r.parsed("optimizer", t.optimizer, parse_optimizer);
            r.parsed("loss", t.loss, nn::parse_generator_loss);
            r.u64("seed", t.seed);
            r.size("noise_dim", t.noise_dim);
            r.size("local_steps", t.local_steps);
            r.flag("early_stop", t.early_stop);
            r.size("early_stop_window", t.early_stop_window);
            r.real("early_stop_delta", t.early_stop_delta);
            r.size("eval_samples", t.eval_samples);
            r.flag("deterministic", t.deterministic);
            r.size("threads", t.threads);
        } else if (name == "metrics") {
            r.size("bins", cfg.metrics.bins);
            r.real("min", cfg.metrics.min);
            r.real("max", cfg.metrics.max);
        } else if (name == "output") {
            r.text("dir", cfg.output_dir);
        } else {
            errors.push_back("unknown section [" + name + "]");
            sec.clear();
        }
    }
    for (auto& [name, sec] : sections) {
        if (name.rfind("agents.", 0) != 0) continue;
        const std::string id_text = name.substr(7);
        std::size_t id = 0;
        const auto* end = id_text.data() + id_text.size();
        auto [p, ec] = std::from_chars(id_text.data(), end, id);
        if (id_text.empty() || ec != std::errc() || p != end) {
            errors.push_back("section [" + name + "] needs a numeric agent id");
            continue;
        }
        AgentArch a = cfg.agent_defaults;
        {
            Reader r(name, sec, errors);
            read_agent(r, a);
        }
        cfg.agent_overrides[id] = a;
    }
    if (!errors.empty()) fail("invalid config:", errors);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io, "cannot read config " + path);
    return parse_config(in);
}

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
    std::vector<std::string> v;
    const auto& g = cfg.graph;
    const std::size_t n = g.agents;
    static const std::set<std::string> graph_kinds{"ring", "string", "complete", "edgeless", "file"};
    if (!graph_kinds.count(g.kind)) v.push_back("graph.kind '" + g.kind + "' is not one of ring|string|complete|edgeless|file");
    if (n == 0) v.push_back("graph.agents must be >= 1");
    if (g.kind == "ring" && (n < 2 || g.neighbors < 1 || g.neighbors >= n)) {
        v.push_back("graph.neighbors must be in [1, agents - 1] for a ring");
    }
    if (g.kind == "string" && n < 2) v.push_back("a string graph needs at least 2 agents");
    if (g.kind == "file" && g.path.empty()) v.push_back("graph.path is required for graph.kind = file");

    static const std::set<std::string> strategies{"uniform", "proportional", "explicit"};
    if (!strategies.count(cfg.weights.strategy)) {
        v.push_back("weights.strategy '" + cfg.weights.strategy + "' is not one of uniform|proportional|explicit");
    }
    if (cfg.weights.strategy == "explicit" && cfg.weights.path.empty()) {
        v.push_back("weights.path is required for weights.strategy = explicit");
    }

    const auto& d = cfg.dataset;
    if (d.kind != "ring" && d.kind != "csv") v.push_back("dataset.kind '" + d.kind + "' is not one of ring|csv");
    if (d.kind == "ring") {
        if (!(d.alpha > 0.0)) v.push_back("dataset.alpha must be > 0");
        if (!(d.beta > 0.0)) v.push_back("dataset.beta must be > 0");
        if (d.samples_per_agent == 0) v.push_back("dataset.samples_per_agent must be >= 1");
        if (d.reference_samples == 0) v.push_back("dataset.reference_samples must be >= 1");
    }
    if (d.kind == "csv" && d.path.empty()) v.push_back("dataset.path is required for dataset.kind = csv");
    if (d.partition != "equal" && d.partition != "angular") {
        v.push_back("dataset.partition '" + d.partition + "' is not one of equal|angular");
    }
    if (d.partition == "angular") {
        if (d.kind != "ring") v.push_back("angular partitions need dataset.kind = ring");
        if (n > 0) {
            try {
                const auto cuts = parse_cuts(d.cuts, n);
                datasets::RingParams probe{d.alpha > 0 ? d.alpha : 1.0, d.beta > 0 ? d.beta : 1.0, 1, 0};
                (void)datasets::partition_angular(probe, cuts);
            } catch (const Error& e) {
                v.push_back(std::string("dataset.cuts: ") + e.what());
            }
        }
    }

    for (const auto& [id, a] : cfg.agent_overrides) {
        if (id >= n) v.push_back("[agents." + std::to_string(id) + "] refers to a missing agent");
    }
    if (cfg.arch == Architecture::flgan) {
        for (const auto& [id, a] : cfg.agent_overrides) {
            if (!(a == cfg.agent_defaults)) {
                v.push_back("flgan averages parameters and needs identical architectures; agent " +
                            std::to_string(id) + " overrides the defaults");
            }
        }
    }

    if (cfg.metrics.bins < 2) v.push_back("metrics.bins must be >= 2");
    if (!(cfg.metrics.min < cfg.metrics.max)) v.push_back("metrics.min must be < metrics.max");

    const auto& t = cfg.train;
    if (t.batch == 0) v.push_back("train.batch must be >= 1");
    if (t.rounds == 0) v.push_back("train.rounds must be >= 1");
    if (t.log_every == 0) v.push_back("train.log_every must be >= 1");
    if (!(t.learning_rate >= 0.0)) v.push_back("train.lr must be >= 0");
    if (t.noise_dim == 0) v.push_back("train.noise_dim must be >= 1");
    if (t.local_steps == 0) v.push_back("train.local_steps must be >= 1");
    if (t.eval_samples == 0) v.push_back("train.eval_samples must be >= 1");
    if (t.threads == 0) v.push_back("train.threads must be >= 1");
    if (t.early_stop_window == 0) v.push_back("train.early_stop_window must be >= 1");
    return v;
}

namespace {

std::string join_widths(const std::vector<std::size_t>& w) {
    if (w.empty()) return "none";
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + std::to_string(w[i]);
    return s;
}

void write_agent(const AgentArch& a, std::ostream& out) {
    out << "generator_hidden = " << join_widths(a.generator_hidden) << '\n'
        << "discriminator_hidden = " << join_widths(a.discriminator_hidden) << '\n'
        << "activation = " << nn::to_string(a.hidden_activation) << '\n'
        << "generator_output = " << nn::to_string(a.generator_output) << '\n';
}

}  // namespace

void write_config(const ExperimentConfig& cfg, std::ostream& out) {
    const auto old_precision = out.precision(17);
    out << "[graph]\nkind = " << cfg.graph.kind << "\nagents = " << cfg.graph.agents
        << "\nneighbors = " << cfg.graph.neighbors << '\n';
    if (!cfg.graph.path.empty()) out << "path = " << cfg.graph.path << '\n';

    out << "\n[weights]\nstrategy = " << cfg.weights.strategy << '\n';
    if (!cfg.weights.path.empty()) out << "path = " << cfg.weights.path << '\n';

    const auto& d = cfg.dataset;
    out << "\n[dataset]\nkind = " << d.kind << "\nalpha = " << d.alpha << "\nbeta = " << d.beta
        << "\nsamples_per_agent = " << d.samples_per_agent << "\npartition = " << d.partition
        << "\ncuts = " << d.cuts << "\nreference_samples = " << d.reference_samples << '\n';
    if (!d.path.empty()) out << "path = " << d.path << '\n';

    out << "\n[agents]\n";
    write_agent(cfg.agent_defaults, out);
    for (const auto& [id, a] : cfg.agent_overrides) {
        out << "\n[agents." << id << "]\n";
        write_agent(a, out);
    }

    const auto& t = cfg.train;
    out << "\n[train]\narch = " << training::to_string(cfg.arch) << "\nbatch = " << t.batch
        << "\nrounds = " << t.rounds << "\nlog_every = " << t.log_every << "\nlr = " << t.learning_rate
        << "\noptimizer = " << optimizer_name(t.optimizer) << "\nloss = " << nn::to_string(t.loss)
        << "\nseed = " << t.seed << "\nnoise_dim = " << t.noise_dim
        << "\nlocal_steps = " << t.local_steps << "\nearly_stop = " << (t.early_stop ? "true" : "false")
        << "\nearly_stop_window = " << t.early_stop_window
        << "\nearly_stop_delta = " << t.early_stop_delta << "\neval_samples = " << t.eval_samples
        << "\ndeterministic = " << (t.deterministic ? "true" : "false") << "\nthreads = " << t.threads
        << '\n';

    out << "\n[metrics]\nbins = " << cfg.metrics.bins << "\nmin = " << cfg.metrics.min
        << "\nmax = " << cfg.metrics.max << '\n';
    out << "\n[output]\ndir = " << cfg.output_dir << '\n';
    out.precision(old_precision);
}

namespace {

std::string resolve(const std::string& base_dir, const std::string& path) {
    const fs::path p(path);
    return p.is_absolute() ? path : (fs::path(base_dir) / p).string();
}

}  // namespace

topology::CommGraph build_graph(const ExperimentConfig& cfg, const std::string& base_dir) {
    const auto& g = cfg.graph;
    if (g.kind == "ring") return topology::ring_graph(g.agents, g.neighbors);
    if (g.kind == "string") return topology::string_graph(g.agents);
    if (g.kind == "complete") return topology::complete_graph(g.agents);
    if (g.kind == "edgeless") return topology::CommGraph(g.agents);
    if (g.kind == "file") {
        auto graph = topology::read_graph_file(resolve(base_dir, g.path));
        if (graph.size() != g.agents) {
            throw Error(ErrorCode::config, "graph file has " + std::to_string(graph.size()) +
                                               " agents but graph.agents = " + std::to_string(g.agents));
        }
        return graph;
    }
    throw Error(ErrorCode::config, "unknown graph.kind '" + g.kind + "'");
}

BuiltExperiment build_experiment(const ExperimentConfig& cfg, const std::string& base_dir) {
    if (const auto problems = validate_config(cfg); !problems.empty()) fail("invalid config:", problems);
    using datasets::StreamPurpose;
    const std::size_t n = cfg.graph.agents;
    const std::uint64_t seed = cfg.train.seed;
    const auto& d = cfg.dataset;

    BuiltExperiment built;
    auto& exp = built.experiment;
    exp.graph = build_graph(cfg, base_dir);

    std::vector<datasets::Dataset> raw;
    datasets::Dataset reference;
    if (d.kind == "ring") {
        datasets::RingParams p{d.alpha, d.beta, d.samples_per_agent, seed};
        if (d.partition == "angular") {
            raw = datasets::partition_angular(p, parse_cuts(d.cuts, n));
        } else {
            p.n = d.samples_per_agent * n;
            raw = datasets::partition_equal(datasets::sample_ring(p), n, seed);
        }
        datasets::RingParams rp{d.alpha, d.beta, d.reference_samples, seed};
        auto rng = datasets::make_stream(seed, 0, StreamPurpose::reference);
        reference = datasets::sample_ring_sector(rp, 0.0, 2.0 * std::numbers::pi, rng);
    } else {
        const auto all = datasets::read_csv_file(resolve(base_dir, d.path));
        raw = datasets::partition_equal(all, n, seed);
        reference = all;
    }

    built.transform = datasets::fit_normalization(datasets::concatenate(raw));
    for (const auto& s : raw) exp.shards.push_back(datasets::apply_transform(s, built.transform));
    exp.reference = datasets::apply_transform(reference, built.transform);

    if (cfg.weights.strategy == "uniform") {
        exp.weights = topology::uniform_weights(exp.graph);
    } else if (cfg.weights.strategy == "proportional") {
        std::vector<long long> counts;
        for (const auto& s : exp.shards) counts.push_back(static_cast<long long>(s.size()));
        exp.weights = topology::proportional_weights(exp.graph, counts);
    } else {
        exp.weights = topology::read_weights_file(resolve(base_dir, cfg.weights.path), n);
    }

    for (std::size_t i = 0; i < n; ++i) exp.archs.push_back(cfg.arch_for(i));
    exp.train = cfg.train;
    const std::size_t dim = exp.shards.front().dim();
    exp.grid = equilibrium::Grid::square(cfg.metrics.bins, cfg.metrics.min, cfg.metrics.max, dim);
    return built;
}

}  // namespace bgan::config
