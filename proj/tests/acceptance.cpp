// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any selected criterion fails.
//
//   bgan_acceptance --cli path/to/bgan [criterion ids...]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bgan/config.hpp"
#include "bgan/equilibrium.hpp"
#include "bgan/training.hpp"
#include "oracles.hpp"

using namespace bgan;
namespace fs = std::filesystem;
using training::Architecture;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string cli_path;

// ---------------------------------------------------------------------------
// 1. lambda values on rings, through the analyze command

std::vector<std::vector<double>> read_matrix_csv(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::vector<double>> m;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        m.push_back(row);
    }
    return m;
}

Outcome ring_lambda() {
    const fs::path dir = fs::temp_directory_path() / "bgan_acceptance_lambda";
    fs::create_directories(dir);
    struct Case {
        std::size_t k;
        std::vector<std::pair<std::size_t, double>> hops;
    };
    const Case cases[] = {{1, {{0, 0.5005}, {1, 0.2502}, {2, 0.1251}, {9, 0.0010}}},
                          {9, {{0, 0.1818}, {1, 0.0909}, {5, 0.0909}}}};
    double worst = 0.0, slowest = 0.0;
    bool ok = true;
    for (const auto& c : cases) {
        const fs::path cfg = dir / ("ring" + std::to_string(c.k) + ".cfg");
        std::ofstream(cfg) << "[graph]\nkind = ring\nagents = 10\nneighbors = " << c.k
                           << "\n[weights]\nstrategy = uniform\n";
        const fs::path out = dir / ("out" + std::to_string(c.k));
        const std::string cmd = "\"" + cli_path + "\" analyze --config \"" + cfg.string() + "\" --out \"" +
                                out.string() + "\" > /dev/null";
        const auto t0 = std::chrono::steady_clock::now();
        const int rc = std::system(cmd.c_str());
        slowest = std::max(slowest, seconds_since(t0));
        if (rc != 0) return {false, "analyze exited with " + std::to_string(rc)};
        const auto lambda = read_matrix_csv(out / "lambda.csv");
        if (lambda.size() != 10) return {false, "lambda.csv has " + std::to_string(lambda.size()) + " rows"};
        for (std::size_t i = 0; i < 10; ++i)
            for (const auto& [h, want] : c.hops) {
                const double err = std::abs(lambda[i][(i + 10 - h) % 10] - want);
                worst = std::max(worst, err);
                ok &= err <= 5e-5;
            }
    }
    fs::remove_all(dir);
    ok &= slowest < 1.0;
    return {ok, fmt("max error %.2e (tol 5e-5), slowest analyze %.3f s (limit 1 s)", worst, slowest)};
}

// ---------------------------------------------------------------------------
// 2-4. equilibrium solver properties

std::vector<equilibrium::DistVector> random_dists(const equilibrium::Grid& grid, std::size_t n,
                                                  std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<equilibrium::DistVector> out;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> bins(grid.bin_count());
        double sum = 0.0;
        for (double& b : bins) sum += (b = u(rng) < 0.3 ? 0.0 : u(rng));
        if (sum == 0.0) sum = bins[0] = 1.0;
        for (double& b : bins) b /= sum;
        out.emplace_back(grid, std::move(bins));
    }
    return out;
}

// sum_i sum_k p_b log D + p_g log(1 - D), straight from the definition.
double value_from_definition(std::span<const equilibrium::DistVector> pb,
                             std::span<const equilibrium::DistVector> pg) {
    double v = 0.0;
    for (std::size_t i = 0; i < pb.size(); ++i)
        for (std::size_t k = 0; k < pb[i].size(); ++k) {
            const double a = pb[i][k], b = pg[i][k];
            if (a + b == 0.0) continue;
            const double d = a / (a + b);
            if (a > 0.0) v += a * std::log(d);
            if (b > 0.0) v += b * std::log(1.0 - d);
        }
    return v;
}

Outcome game_value_at_equilibrium() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2024);
    double worst_value = 0.0, worst_d = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + rng() % 10;
        const std::size_t side = 1 + rng() % 50;  // up to 2500 bins
        const auto g = oracle::random_graph(n, 0.35, rng);
        const auto w = oracle::random_weights(g, rng);
        const auto p = random_dists(equilibrium::Grid::square(side, -1.0, 1.0, 2), n, rng);
        const auto s = equilibrium::solve_equilibrium_direct(w, p);
        const auto pb = equilibrium::brainstorm_mixtures(w, p, s.p_g_star);
        const double target = -static_cast<double>(n) * std::log(4.0);
        worst_value = std::max({worst_value, std::abs(equilibrium::game_value(pb, s.p_g_star) - target),
                                std::abs(value_from_definition(pb, s.p_g_star) - target)});
        for (std::size_t i = 0; i < n; ++i) {
            const auto d = equilibrium::optimal_discriminator(pb[i], s.p_g_star[i]);
            for (std::size_t k = 0; k < d.size(); ++k)
                if (pb[i][k] > 0.0 || s.p_g_star[i][k] > 0.0) worst_d = std::max(worst_d, std::abs(d[k] - 0.5));
        }
    }
    const double t = seconds_since(t0);
    return {worst_value <= 1e-8 && worst_d <= 1e-8 && t < 10.0,
            fmt("max |V + n ln 4| %.2e, max |D* - 1/2| %.2e (tol 1e-8), %.2f s (limit 10 s)", worst_value,
                worst_d, t)};
}

Outcome jacobi_matches_direct() {
    std::mt19937_64 rng(77);
    double worst = 0.0, worst_series = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng() % 10;
        const auto g = oracle::random_graph(n, 0.4, rng);
        const auto w = oracle::random_weights(g, rng);
        const auto p = random_dists(equilibrium::Grid::line(1 + rng() % 40), n, rng);
        const auto d = equilibrium::solve_equilibrium_direct(w, p);
        const auto j = equilibrium::solve_equilibrium_jacobi(w, p, 1e-14, 1000000);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < p[i].size(); ++k)
                worst = std::max(worst, std::abs(d.p_g_star[i][k] - j.p_g_star[i][k]));

        oracle::Dense rows;
        for (const auto& x : p) rows.emplace_back(x.bins().begin(), x.bins().end());
        const std::size_t k = rng() % 15;
        const auto got = equilibrium::jacobi_iterate(w, p, k + 1);
        const auto want = oracle::neumann_partial(w, rows, k);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t b = 0; b < rows[i].size(); ++b)
                worst_series = std::max(worst_series, std::abs(got[i][b] - want[i][b]));
    }
    return {worst <= 1e-8 && worst_series <= 1e-10,
            fmt("max |jacobi - direct| %.2e (tol 1e-8), max |truncation - partial sum| %.2e (tol 1e-10)", worst,
                worst_series)};
}

Outcome lambda_support_is_reachability() {
    std::mt19937_64 rng(99);
    std::size_t mismatches = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 12;
        std::uniform_real_distribution<double> dens(0.05, 0.5);
        const auto g = oracle::random_graph(n, dens(rng), rng);
        const auto lambda = equilibrium::lambda_matrix(oracle::random_weights(g, rng));
        const auto reach = oracle::closure(g);
        for (std::size_t i = 0; i < n; ++i) {
            auto expected = topology::reachable_set(g, i);
            expected.insert(i);
            for (std::size_t j = 0; j < n; ++j) {
                const bool positive = lambda[i][j] > 1e-12;
                const bool independent = j == i || reach[j][i];
                if (positive != expected.count(j) > 0 || positive != independent) ++mismatches;
            }
        }
    }
    return {mismatches == 0, fmt("%zu mismatches over 200 digraphs", mismatches)};
}

// ---------------------------------------------------------------------------
// 5. gradients

Outcome gradients_match_finite_differences() {
    std::mt19937_64 rng(5);
    const nn::Activation acts[] = {nn::Activation::tanh, nn::Activation::sigmoid, nn::Activation::relu};
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t dim = 1 + rng() % 3, nz = 1 + rng() % 4;
        const std::size_t depth = 1 + rng() % 2;
        std::vector<std::size_t> hg(depth), hd(depth);
        for (auto& h : hg) h = 2 + rng() % 6;
        for (auto& h : hd) h = 2 + rng() % 6;
        const auto act = acts[rng() % 3];
        auto g = nn::mlp_init(nn::make_spec(nz, hg, dim, act, nn::Activation::identity), rng());
        auto d = nn::mlp_init(nn::make_spec(dim, hd, 1, act, nn::Activation::sigmoid), rng());
        // Random biases too: zero biases put dead-unit rows exactly on the relu kink.
        std::normal_distribution<double> nb(0.0, 0.2);
        for (auto* net : {&g, &d})
            for (auto& l : net->layers())
                for (double& v : l.bias) v = nb(rng);
        const std::size_t b = 2 + rng() % 8;
        const Matrix pos = oracle::random_matrix(b, dim, rng), fake = oracle::random_matrix(b, dim, rng);
        const Matrix z = oracle::random_matrix(b, nz, rng);

        nn::Mlp probe = d;
        const auto dn = oracle::fd_gradient(
            [&](const std::vector<double>& th) {
                probe.assign(th);
                return -oracle::d_objective(probe, pos, fake);
            },
            d.flatten());
        worst = std::max(worst, oracle::max_relative_error(
                                    oracle::flatten(nn::discriminator_gradient(d, pos, fake).grads), dn));

        for (auto mode : {nn::GeneratorLoss::saturating, nn::GeneratorLoss::non_saturating}) {
            const double sign = mode == nn::GeneratorLoss::saturating ? 1.0 : -1.0;
            nn::Mlp gp = g;
            const auto gn = oracle::fd_gradient(
                [&](const std::vector<double>& th) {
                    gp.assign(th);
                    return sign * oracle::g_objective(gp, d, z, mode);
                },
                g.flatten());
            worst = std::max(worst, oracle::max_relative_error(
                                        oracle::flatten(nn::generator_gradient(g, d, z, mode).grads), gn));
        }
    }
    return {worst <= 1e-4, fmt("max relative error %.2e over 50 networks (tol 1e-4)", worst)};
}

// ---------------------------------------------------------------------------
// 6-8. training behaviour on ring data

// Training settings shared by the three ring-data experiments.
struct RingTraining {
    std::vector<std::size_t> generator_hidden{32, 32};
    std::vector<std::size_t> discriminator_hidden{32, 32, 32};
    std::size_t rounds = 3000;
    std::size_t batch = 64;
    double lr = 1e-3;
    double alpha = 9.0;
    double beta = 2.0;
};

RingTraining ring_training;

config::ExperimentConfig ring_config(std::size_t agents, std::uint64_t seed, const RingTraining& rt) {
    config::ExperimentConfig cfg;
    cfg.graph.agents = agents;
    cfg.dataset.alpha = rt.alpha;
    cfg.dataset.beta = rt.beta;
    cfg.dataset.samples_per_agent = 100;
    cfg.dataset.reference_samples = 10000;
    cfg.agent_defaults.generator_hidden = rt.generator_hidden;
    cfg.agent_defaults.discriminator_hidden = rt.discriminator_hidden;
    cfg.train.rounds = rt.rounds;
    cfg.train.log_every = rt.rounds;
    cfg.train.batch = rt.batch;
    cfg.train.learning_rate = rt.lr;
    cfg.train.seed = seed;
    return cfg;
}

Outcome brainstorming_benefit() {
    const auto t0 = std::chrono::steady_clock::now();
    int wins = 0;
    bool bounded = true;
    std::string per_seed;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto cfg = ring_config(10, seed, ring_training);
        const auto exp = config::build_experiment(cfg).experiment;
        const double b = training::mean_final_jsd(training::run_bgan(exp).report);
        const double s = training::mean_final_jsd(training::run_standalone(exp).report);
        training::Experiment pooled = exp;
        pooled.graph = topology::CommGraph(1);
        pooled.weights = topology::uniform_weights(pooled.graph);
        pooled.shards = {datasets::concatenate(exp.shards)};
        pooled.archs = {exp.archs[0]};
        const double all = training::mean_final_jsd(training::run_standalone(pooled).report);
        wins += b < s;
        bounded &= b > all;
        per_seed += fmt(" [seed %d: bgan %.3f, standalone %.3f, pooled %.3f]", int(seed), b, s, all);
    }
    const double t = seconds_since(t0);
    return {wins >= 4 && bounded,
            fmt("bgan below standalone in %d/5 seeds (need 4), above pooled in every seed: %s, %.0f s;", wins,
                bounded ? "yes" : "no", t) +
                per_seed};
}

Outcome ideas_cross_half_planes() {
    int passing = 0;
    std::string per_seed;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        auto cfg = ring_config(2, seed, ring_training);
        cfg.dataset.partition = "angular";
        cfg.dataset.samples_per_agent = 500;
        cfg.train.eval_samples = 10000;
        const auto built = config::build_experiment(cfg);
        const auto& exp = built.experiment;
        // y = 0 in raw coordinates; agent 0 owns the upper half.
        const double cy = built.transform.apply(std::vector<double>{0.0, 0.0})[1];
        auto unowned = [&](const training::TrainingResult& r, std::size_t i) {
            datasets::Rng rng(datasets::stream_seed(seed, i, datasets::StreamPurpose::evaluation));
            const Matrix x = generate(r.generators[i], 10000, r.noise_dims[i], rng);
            return metrics::coverage(x, [&](std::span<const double> p) { return i == 0 ? p[1] < cy : p[1] >= cy; });
        };
        const auto b = training::run_bgan(exp);
        const auto s = training::run_standalone(exp);
        const double b0 = unowned(b, 0), b1 = unowned(b, 1), s0 = unowned(s, 0), s1 = unowned(s, 1);
        const bool ok = b0 >= 0.2 && b1 >= 0.2 && s0 < 0.05 && s1 < 0.05;
        passing += ok;
        per_seed += fmt(" [seed %d: bgan %.2f/%.2f, standalone %.3f/%.3f]", int(seed), b0, b1, s0, s1);
    }
    return {passing >= 2, fmt("%d/3 seeds pass (need 2); unowned-half mass:", passing) + per_seed};
}

Outcome string_degradation() {
    int passing = 0;
    std::string per_seed;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        auto cfg = ring_config(10, seed, ring_training);
        cfg.graph.kind = "string";
        const auto exp = config::build_experiment(cfg).experiment;
        const auto r = training::run_bgan(exp).report;
        std::vector<double> index(10);
        for (std::size_t i = 0; i < 10; ++i) index[i] = static_cast<double>(i);
        const double rho = oracle::spearman(index, r.final_jsd);
        passing += rho > 0.0;
        per_seed += fmt(" [seed %d: rho %.2f]", int(seed), rho);
    }
    return {passing >= 2, fmt("spearman(index, jsd) > 0 in %d/3 seeds (need 2):", passing) + per_seed};
}

// ---------------------------------------------------------------------------
// 9. communication counters

training::Experiment gaussian_experiment(std::size_t n, std::size_t dim, std::size_t b, std::mt19937_64& rng) {
    training::Experiment e;
    e.graph = topology::ring_graph(n, 1 + rng() % (n - 1));
    e.weights = topology::uniform_weights(e.graph);
    for (std::size_t i = 0; i < n; ++i) e.shards.emplace_back(oracle::random_matrix(10, dim, rng, 0.5));
    training::AgentArch a;
    a.generator_hidden.assign(1 + rng() % 2, 1 + rng() % 12);
    a.discriminator_hidden.assign(1 + rng() % 2, 1 + rng() % 12);
    e.archs.assign(n, a);
    e.train.batch = b;
    e.train.noise_dim = 1 + rng() % 4;
    e.reference = e.shards[0];
    e.grid = equilibrium::Grid::square(3, -1.0, 1.0, dim);
    return e;
}

Outcome communication_counters() {
    std::mt19937_64 rng(31);
    std::size_t checked = 0, wrong = 0, ordering_cases = 0, ordering_wrong = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 2 + rng() % 7, dim = 1 + rng() % 3, b = 1 + rng() % 40;
        const auto e = gaussian_experiment(n, dim, b, rng);
        auto agents = training::make_agents(e);
        const std::uint64_t tg = agents[0].generator.parameter_count();
        const std::uint64_t td = agents[0].discriminator.parameter_count();
        const training::StepOptions opts{};
        const auto plan = training::plan_round(e.graph, e.weights, b);
        auto central = training::make_central_generator(e);
        auto central_f2 = central;
        auto a_md = agents, a_f2 = agents, a_fl = agents, a_sa = agents;
        std::uint64_t bgan_units = 0, flgan_units = 0;
        for (int round = 0; round < 3; ++round) {
            const auto check = [&](Architecture arch, const training::RoundMetrics& m) {
                ++checked;
                if (m.total_units != training::comm_cost(arch, n, b, dim, td, tg)) ++wrong;
                std::uint64_t sum = 0;
                for (auto u : m.units_sent) sum += u;
                if (sum != m.total_units) ++wrong;
            };
            const auto mb = training::bgan_round(agents, e.graph, plan, opts);
            check(Architecture::bgan, mb);
            check(Architecture::standalone, training::standalone_round(a_sa, b, opts));
            check(Architecture::mdgan, training::central_round(central, a_md, b, nn::DiscriminatorMix::mean, opts));
            check(Architecture::f2u,
                  training::central_round(central_f2, a_f2, b, nn::DiscriminatorMix::most_forgiving, opts));
            const auto mf = training::flgan_round(a_fl, b, 1, opts);
            check(Architecture::flgan, mf);
            bgan_units = mb.total_units;
            flgan_units = mf.total_units;
        }
        if (b * dim < tg + td) {
            ++ordering_cases;
            if (!(bgan_units < flgan_units)) ++ordering_wrong;
        }
    }
    return {wrong == 0 && ordering_wrong == 0 && ordering_cases > 0,
            fmt("%zu/%zu round counters off the formula; bgan < flgan in %zu/%zu cases with b|x| < |theta_g|+|theta_d|",
                wrong, checked, ordering_cases - ordering_wrong, ordering_cases)};
}

// ---------------------------------------------------------------------------
// 10. reduction identities

using Trajectory = std::vector<std::vector<double>>;

Trajectory trajectory(Architecture arch, const training::Experiment& e) {
    Trajectory t;
    training::run(arch, e, [&](std::size_t, std::span<const nn::Mlp> gs, std::span<const nn::Mlp> ds) {
        std::vector<double> all;
        for (const auto& g : gs) {
            const auto th = g.flatten();
            all.insert(all.end(), th.begin(), th.end());
        }
        for (const auto& d : ds) {
            const auto th = d.flatten();
            all.insert(all.end(), th.begin(), th.end());
        }
        t.push_back(std::move(all));
    });
    return t;
}

Outcome reduction_identities() {
    auto cfg = ring_config(4, 3, ring_training);
    cfg.graph.kind = "edgeless";
    cfg.train.rounds = 100;
    cfg.train.log_every = 100;
    cfg.train.eval_samples = 500;
    const auto edgeless = config::build_experiment(cfg).experiment;
    const bool edgeless_ok = trajectory(Architecture::bgan, edgeless) == trajectory(Architecture::standalone, edgeless);

    cfg.graph.agents = 1;
    const auto single = config::build_experiment(cfg).experiment;
    const auto sa = trajectory(Architecture::standalone, single);
    const bool md_ok = trajectory(Architecture::mdgan, single) == sa;
    const bool f2_ok = trajectory(Architecture::f2u, single) == sa;
    return {edgeless_ok && md_ok && f2_ok && sa.size() == 100,
            fmt("100 rounds bit-identical: edgeless bgan %s, single-agent mdgan %s, single-agent f2u %s",
                edgeless_ok ? "yes" : "no", md_ok ? "yes" : "no", f2_ok ? "yes" : "no")};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--cli" && i + 1 < argc) {
            cli_path = argv[++i];
        } else {
            selected.insert(std::stoi(a));
        }
    }
    if (cli_path.empty()) cli_path = (fs::path(argv[0]).parent_path() / "bgan").string();

    const std::vector<Criterion> all = {
        {1, "ring lambda values from analyze", ring_lambda},
        {2, "game value and D* at the equilibrium", game_value_at_equilibrium},
        {3, "Jacobi agrees with the direct solve", jacobi_matches_direct},
        {4, "lambda support equals reachability", lambda_support_is_reachability},
        {5, "gradients match finite differences", gradients_match_finite_differences},
        {6, "brainstorming beats standalone on 100-sample shards", brainstorming_benefit},
        {7, "ideas carry the unowned half-ring", ideas_cross_half_planes},
        {8, "JSD grows along a string graph", string_degradation},
        {9, "communication counters equal the formulas", communication_counters},
        {10, "reduction identities", reduction_identities},
    };
    int failed = 0;
    for (const auto& c : all) {
        if (!selected.empty() && !selected.count(c.id)) continue;
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.name << " -- " << o.detail
                  << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
