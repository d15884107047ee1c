// bgan: run experiments, analyse equilibria and summarise finished runs.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include "bgan/config.hpp"
#include "bgan/equilibrium.hpp"
#include "bgan/error.hpp"
#include "bgan/topology.hpp"
#include "bgan/training.hpp"

namespace fs = std::filesystem;
using namespace bgan;

namespace {

std::size_t env_thread_cap() {
    const char* v = std::getenv("BGAN_THREADS");
    if (v == nullptr || *v == '\0') return 0;
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (*end != '\0' || n < 1) throw Error(ErrorCode::config, "BGAN_THREADS must be a positive integer");
    return static_cast<std::size_t>(n);
}

std::string absolute_or_empty(const std::string& base, const std::string& path) {
    if (path.empty()) return path;
    const fs::path p(path);
    return p.is_absolute() ? path : fs::absolute(fs::path(base) / p).lexically_normal().string();
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream out(p);
    if (!out) throw Error(ErrorCode::io, "cannot write " + p.string());
    return out;
}

// ---------------------------------------------------------------------------
// run

struct RunOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    bool deterministic = false;
    std::optional<std::string> arch;
    std::optional<std::string> out;
};

int cmd_run(const RunOptions& o) {
    auto cfg = config::load_config(o.config);
    const std::string base = fs::path(o.config).parent_path().string();
    if (o.seed) cfg.train.seed = *o.seed;
    if (o.arch) cfg.arch = training::parse_architecture(*o.arch);
    if (o.deterministic) cfg.train.deterministic = true;
    if (o.out) cfg.output_dir = *o.out;
    if (!cfg.train.deterministic) {
        std::size_t cap = env_thread_cap();
        if (cap == 0) cap = std::max(1u, std::thread::hardware_concurrency());
        cfg.train.threads = std::min(cfg.train.threads, cap);
    }
    // The echo must stay valid from the output directory.
    cfg.graph.path = absolute_or_empty(base, cfg.graph.path);
    cfg.weights.path = absolute_or_empty(base, cfg.weights.path);
    cfg.dataset.path = absolute_or_empty(base, cfg.dataset.path);

    const auto built = config::build_experiment(cfg, base);
    if (const auto problems = training::validate_experiment(built.experiment, cfg.arch); !problems.empty()) {
        std::string msg = "invalid experiment:";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw Error(ErrorCode::config, msg);
    }

    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    {
        auto out = open_out(dir / "resolved.cfg");
        config::write_config(cfg, out);
    }

    std::cerr << "running " << training::to_string(cfg.arch) << " with " << cfg.graph.agents
              << " agents for " << cfg.train.rounds << " rounds (seed " << cfg.train.seed << ")\n";
    const auto result = training::run(cfg.arch, built.experiment);
    const auto& report = result.report;

    {
        auto out = open_out(dir / "report.csv");
        training::write_report_csv(report, out);
    }
    const bool central = cfg.arch == training::Architecture::mdgan || cfg.arch == training::Architecture::f2u;
    if (central) {
        nn::save_checkpoint(result.generators.front(), (dir / "central_generator.mlp").string());
    } else {
        for (std::size_t i = 0; i < result.generators.size(); ++i) {
            nn::save_checkpoint(result.generators[i], (dir / ("agent_" + std::to_string(i) + "_generator.mlp")).string());
        }
    }
    for (std::size_t i = 0; i < result.discriminators.size(); ++i) {
        nn::save_checkpoint(result.discriminators[i],
                            (dir / ("agent_" + std::to_string(i) + "_discriminator.mlp")).string());
    }
    {
        auto out = open_out(dir / "summary.txt");
        out << std::setprecision(10) << "arch = " << training::to_string(report.arch)
            << "\nseed = " << report.seed << "\nrounds_run = " << report.rounds_run
            << "\nmean_final_jsd = " << training::mean_final_jsd(report)
            << "\ntotal_comm_units = " << report.total_comm_units
            << "\nlast_round_units = " << report.last_round_units
            << "\nwall_seconds = " << report.wall_seconds << '\n';
    }

    std::cout << std::fixed << std::setprecision(4);
    for (std::size_t i = 0; i < report.final_jsd.size(); ++i) {
        std::cout << "agent " << i << "  jsd " << report.final_jsd[i] << '\n';
    }
    std::cout << "mean jsd " << training::mean_final_jsd(report) << "  comm units "
              << report.total_comm_units << "  wall " << std::setprecision(1) << report.wall_seconds
              << " s  -> " << dir.string() << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeOptions {
    std::string config;
    std::optional<std::string> out;
};

topology::MixingWeights analysis_weights(const config::ExperimentConfig& cfg, const topology::CommGraph& g,
                                         const std::string& base) {
    const auto& s = cfg.weights.strategy;
    if (s == "uniform") return topology::uniform_weights(g);
    if (s == "explicit") return topology::read_weights_file(absolute_or_empty(base, cfg.weights.path), g.size());
    if (s == "proportional") {
        const auto built = config::build_experiment(cfg, base);
        return built.experiment.weights;
    }
    throw Error(ErrorCode::config, "unknown weights.strategy '" + s + "'");
}

int cmd_analyze(const AnalyzeOptions& o) {
    auto cfg = config::load_config(o.config);
    const std::string base = fs::path(o.config).parent_path().string();
    if (const auto problems = config::validate_config(cfg); !problems.empty()) {
        std::string msg = "invalid config:";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw Error(ErrorCode::config, msg);
    }
    const fs::path dir(o.out ? *o.out : cfg.output_dir);
    const auto graph = config::build_graph(cfg, base);
    const auto weights = analysis_weights(cfg, graph, base);
    topology::validate(weights, graph);
    const std::size_t n = graph.size();

    const auto lambda = equilibrium::lambda_matrix(weights);
    // Synthetic data: agent i owns a point mass on bin i of an n-bin line.
    const auto grid = equilibrium::Grid::line(n);
    std::vector<equilibrium::DistVector> p_data;
    for (std::size_t i = 0; i < n; ++i) p_data.push_back(equilibrium::DistVector::point_mass(grid, i));
    const auto direct = equilibrium::solve_equilibrium_direct(weights, p_data);
    const auto jacobi = equilibrium::solve_equilibrium_jacobi(weights, p_data, 1e-12, 1000000);
    const auto p_b = equilibrium::brainstorm_mixtures(weights, p_data, direct.p_g_star);
    const double value = equilibrium::game_value(p_b, direct.p_g_star);
    const double target = -static_cast<double>(n) * std::log(4.0);
    double d_dev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (double d : equilibrium::optimal_discriminator(p_b[i], direct.p_g_star[i])) {
            d_dev = std::max(d_dev, std::abs(d - 0.5));
        }
    }

    fs::create_directories(dir);
    {
        auto out = open_out(dir / "lambda.csv");
        out << std::setprecision(17);
        for (const auto& row : lambda) {
            for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
            out << '\n';
        }
    }

    const auto scc = topology::strongly_connected_components(graph);
    const std::size_t components = scc.empty() ? 0 : *std::max_element(scc.begin(), scc.end()) + 1;
    std::ostringstream text;
    text << "agents " << n << ", edges " << graph.edge_count() << '\n';
    text << "connectivity: " << (topology::is_strongly_connected(graph) ? "strongly connected" : "not strongly connected")
         << " (" << components << " strongly connected component" << (components == 1 ? "" : "s") << ")\n";
    text << "jacobi iterations: " << jacobi.iterations << " (tol 1e-12)\n";
    text << std::scientific << std::setprecision(3);
    text << "jacobi vs direct max difference: ";
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < grid.bin_count(); ++k)
            diff = std::max(diff, std::abs(direct.p_g_star[i][k] - jacobi.p_g_star[i][k]));
    text << diff << '\n';
    text << std::fixed << std::setprecision(10);
    text << "game value at equilibrium: " << value << " (target -n ln 4 = " << target << ", |diff| "
         << std::scientific << std::setprecision(3) << std::abs(value - target) << ")\n";
    text << "max |D* - 1/2|: " << d_dev << '\n';

    text << "\nhop  lambda(mean)  min        max\n" << std::fixed << std::setprecision(4);
    for (std::size_t h = 0; h < n; ++h) {
        double sum = 0.0, lo = 1.0, hi = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = lambda[i][(i + n - h) % n];
            sum += v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        text << std::setw(3) << h << "  " << std::setw(10) << sum / static_cast<double>(n) << "  "
             << std::setw(9) << lo << "  " << std::setw(9) << hi << '\n';
    }
    text << "\nlambda row 0:";
    for (double v : lambda.front()) text << ' ' << v;
    text << "\nreachable-from counts:";
    for (std::size_t i = 0; i < n; ++i) text << ' ' << topology::reachable_set(graph, i).size();
    text << '\n';

    std::cout << text.str();
    auto out = open_out(dir / "analysis.txt");
    out << text.str();
    {
        auto pg = open_out(dir / "p_g_star.csv");
        pg << std::setprecision(17);
        for (const auto& p : direct.p_g_star) {
            for (std::size_t k = 0; k < p.size(); ++k) pg << (k ? "," : "") << p[k];
            pg << '\n';
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------
// report

std::map<std::size_t, training::ReportRow> final_rows(const fs::path& dir) {
    const fs::path p = dir / "report.csv";
    if (!fs::exists(p)) throw Error(ErrorCode::io, "no report.csv in " + dir.string());
    std::ifstream in(p);
    if (!in) throw Error(ErrorCode::io, "cannot read " + p.string());
    const auto rows = training::read_report_csv(in);
    if (rows.empty()) throw Error(ErrorCode::io, p.string() + " has no rows");
    std::map<std::size_t, training::ReportRow> last;
    for (const auto& r : rows) {
        auto it = last.find(r.agent);
        if (it == last.end() || r.round >= it->second.round) last[r.agent] = r;
    }
    return last;
}

void write_scatter(const fs::path& dir) {
    std::vector<std::pair<std::string, fs::path>> gens;
    if (fs::exists(dir / "central_generator.mlp")) gens.emplace_back("central", dir / "central_generator.mlp");
    for (std::size_t i = 0;; ++i) {
        const auto p = dir / ("agent_" + std::to_string(i) + "_generator.mlp");
        if (!fs::exists(p)) break;
        gens.emplace_back("agent_" + std::to_string(i), p);
    }
    for (const auto& [name, path] : gens) {
        const auto g = nn::load_checkpoint(path.string());
        datasets::Rng rng(datasets::stream_seed(0, 0, datasets::StreamPurpose::evaluation));
        const auto pts = generate(g, 2000, g.input_dim(), rng);
        datasets::write_csv_file(datasets::Dataset(pts), (dir / ("samples_" + name + ".csv")).string());
    }
    if (!gens.empty()) std::cout << "wrote " << gens.size() << " scatter file(s) to " << dir.string() << '\n';
}

int cmd_report(const std::string& dir_text, const std::optional<std::string>& compare) {
    const fs::path dir(dir_text);
    if (!fs::is_directory(dir)) throw Error(ErrorCode::io, dir_text + " is not a directory");
    const auto a = final_rows(dir);
    std::cout << std::fixed;
    if (!compare) {
        std::cout << "agent  round     jsd    d_real  d_fake  comm_units\n";
        double sum = 0.0;
        std::uint64_t comm = 0;
        for (const auto& [agent, r] : a) {
            std::cout << std::setw(5) << agent << std::setw(7) << r.round << std::setprecision(4)
                      << std::setw(9) << r.jsd << std::setw(8) << r.d_real_mean << std::setw(8)
                      << r.d_fake_mean << std::setw(12) << r.comm_units << '\n';
            sum += r.jsd;
            comm += r.comm_units;
        }
        std::cout << "mean jsd " << std::setprecision(4) << sum / static_cast<double>(a.size())
                  << ", total comm units " << comm << '\n';
        write_scatter(dir);
        return 0;
    }
    const auto b = final_rows(fs::path(*compare));
    std::cout << "agent   jsd(a)   jsd(b)   b - a\n";
    double sa = 0.0, sb = 0.0;
    std::size_t count = 0;
    for (const auto& [agent, ra] : a) {
        auto it = b.find(agent);
        if (it == b.end()) {
            std::cout << std::setw(5) << agent << std::setprecision(4) << std::setw(9) << ra.jsd << "        -       -\n";
            continue;
        }
        const double jb = it->second.jsd;
        std::cout << std::setw(5) << agent << std::setprecision(4) << std::setw(9) << ra.jsd << std::setw(9)
                  << jb << std::showpos << std::setw(9) << jb - ra.jsd << std::noshowpos << '\n';
        sa += ra.jsd;
        sb += jb;
        ++count;
    }
    if (count > 0) {
        std::cout << " mean" << std::setw(9) << sa / static_cast<double>(count) << std::setw(9)
                  << sb / static_cast<double>(count) << std::showpos << std::setw(9)
                  << (sb - sa) / static_cast<double>(count) << std::noshowpos << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Brainstorming GAN experiments"};
    app.require_subcommand(1);

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "train agents from a config file");
    run_cmd->add_option("--config", run.config, "experiment config")->required();
    run_cmd->add_option("--seed", run.seed, "override train.seed");
    run_cmd->add_flag("--deterministic", run.deterministic, "sequential agent updates");
    run_cmd->add_option("--arch", run.arch, "bgan|standalone|mdgan|flgan|f2u");
    run_cmd->add_option("--out", run.out, "output directory");

    AnalyzeOptions analyze;
    auto* analyze_cmd = app.add_subcommand("analyze", "solve the equilibrium of a graph and weights");
    analyze_cmd->add_option("--config", analyze.config, "experiment config")->required();
    analyze_cmd->add_option("--out", analyze.out, "output directory");

    std::string report_dir;
    std::optional<std::string> compare;
    auto* report_cmd = app.add_subcommand("report", "summarise a finished run");
    report_cmd->add_option("dir", report_dir, "run directory")->required();
    report_cmd->add_option("--compare", compare, "second run directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "E_CONFIG: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*run_cmd) return cmd_run(run);
        if (*analyze_cmd) return cmd_analyze(analyze);
        if (*report_cmd) return cmd_report(report_dir, compare);
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return e.code() == ErrorCode::config || e.code() == ErrorCode::validation ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "E_INTERNAL: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
