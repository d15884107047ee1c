#include "bgan/metrics.hpp"

#include <cmath>

#include "bgan/error.hpp"

namespace bgan::metrics {

void validate_grid(const HistogramGrid& grid) {
    if (grid.axes.empty()) throw Error(ErrorCode::config, "histogram grid has no axes");
    for (const auto& a : grid.axes) {
        if (a.bins < 2) throw Error(ErrorCode::config, "histogram grid needs at least 2 bins per axis");
        if (!std::isfinite(a.min) || !std::isfinite(a.max) || !(a.min < a.max)) {
            throw Error(ErrorCode::config, "histogram grid range must be finite with min < max");
        }
    }
}

HistogramGrid default_grid() { return equilibrium::Grid::square(50, -1.0, 1.0, 2); }

equilibrium::DistVector histogram(const Matrix& samples, const HistogramGrid& grid) {
    validate_grid(grid);
    if (samples.rows() == 0) throw Error(ErrorCode::validation, "cannot histogram an empty sample set");
    std::vector<double> counts(grid.bin_count(), 0.0);
    for (std::size_t r = 0; r < samples.rows(); ++r) counts[grid.bin_of(samples.row(r))] += 1.0;
    const double inv = 1.0 / static_cast<double>(samples.rows());
    for (double& c : counts) c *= inv;
    return equilibrium::DistVector(grid, std::move(counts));
}

double empirical_jsd(const Matrix& a, const Matrix& b, const HistogramGrid& grid) {
    return equilibrium::jsd(histogram(a, grid), histogram(b, grid));
}

double coverage(const Matrix& samples, const Region& region) {
    if (samples.rows() == 0) throw Error(ErrorCode::validation, "coverage of an empty sample set");
    std::size_t inside = 0;
    for (std::size_t r = 0; r < samples.rows(); ++r)
        if (region(samples.row(r))) ++inside;
    return static_cast<double>(inside) / static_cast<double>(samples.rows());
}

Balance discriminator_balance(const nn::Mlp& discriminator, const Matrix& real, const Matrix& fake) {
    auto mean_output = [&](const Matrix& x) {
        const Matrix out = discriminator.forward(x);
        double s = 0.0;
        for (double v : out.values()) s += v;
        return s / static_cast<double>(out.rows());
    };
    return {mean_output(real), mean_output(fake)};
}

Balance discriminator_balance(const AgentState& agent, std::size_t n_eval) {
    if (n_eval == 0) throw Error(ErrorCode::config, "discriminator balance needs n_eval >= 1");
    datasets::Rng rng(agent.eval_seed);
    const Matrix fake = generate(agent.generator, n_eval, agent.noise_dim, rng);
    const Matrix real = draw_with_replacement(agent.data, n_eval, rng);
    return discriminator_balance(agent.discriminator, real, fake);
}

}  // namespace bgan::metrics
