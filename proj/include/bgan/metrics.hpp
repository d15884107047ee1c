#pragma once

#include <functional>
#include <span>

#include "bgan/agent.hpp"
#include "bgan/equilibrium.hpp"
#include "bgan/matrix.hpp"

namespace bgan::metrics {

/// Evaluation binning; each axis needs >= 2 bins and a finite min < max.
using HistogramGrid = equilibrium::Grid;

void validate_grid(const HistogramGrid& grid);
/// 50 x 50 bins over [-1, 1]^2.
HistogramGrid default_grid();

/// Normalised histogram; out-of-range samples land in the boundary bins.
equilibrium::DistVector histogram(const Matrix& samples, const HistogramGrid& grid);

/// JSD (nats) between the histograms of two sample sets.
double empirical_jsd(const Matrix& a, const Matrix& b, const HistogramGrid& grid);

using Region = std::function<bool(std::span<const double>)>;

/// Fraction of samples inside `region`.
double coverage(const Matrix& samples, const Region& region);

struct Balance {
    double real_mean = 0.5;
    double fake_mean = 0.5;
};

/// Mean D output on real shard draws and on fresh generator samples; no
/// parameters or training streams are touched.
Balance discriminator_balance(const AgentState& agent, std::size_t n_eval);
Balance discriminator_balance(const nn::Mlp& discriminator, const Matrix& real, const Matrix& fake);

}  // namespace bgan::metrics
