#pragma once

// Analytical Nash-equilibrium engine on discretised distributions.
//
// With generator densities stacked per agent, the equilibrium solves
// (I - B) p_g = C P_data independently in every bin. The solution is a
// row-stochastic mixture p_g* = Lambda P_data with Lambda = (I - B)^-1 C.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "bgan/topology.hpp"

namespace bgan::equilibrium {

/// Regular rectangular binning: one (min, max, bins) triple per dimension.
struct Axis {
    double min = -1.0;
    double max = 1.0;
    std::size_t bins = 1;

    bool operator==(const Axis&) const = default;
};

struct Grid {
    std::vector<Axis> axes;

    static Grid line(std::size_t bins);
    static Grid square(std::size_t bins_per_dim, double min, double max, std::size_t dims = 2);

    std::size_t dims() const noexcept { return axes.size(); }
    std::size_t bin_count() const noexcept;
    /// Flat bin index of a point, clipping out-of-range coordinates to the edge bins.
    std::size_t bin_of(std::span<const double> point) const;

    bool operator==(const Grid&) const = default;
};

/// Probability mass over a grid: nonnegative, sums to one within 1e-9.
class DistVector {
public:
    DistVector() = default;
    DistVector(Grid grid, std::vector<double> bins);

    static DistVector point_mass(const Grid& grid, std::size_t bin);
    static DistVector uniform(const Grid& grid);

    const Grid& grid() const noexcept { return grid_; }
    std::span<const double> bins() const noexcept { return bins_; }
    std::size_t size() const noexcept { return bins_.size(); }
    double operator[](std::size_t k) const noexcept { return bins_[k]; }

private:
    Grid grid_;
    std::vector<double> bins_;
};

struct Idea {
    const DistVector* dist;
    double weight;
};

/// pi_i * p_data_i + sum_j pi_ij * p_g_j, bin-wise.
DistVector mixture(const DistVector& own, std::span<const Idea> ideas, double own_weight);

struct EquilibriumSolution {
    std::vector<DistVector> p_g_star;
    std::vector<std::vector<double>> lambda;
    std::size_t iterations = 0;  // 0 for the direct solve
    double residual = 0.0;       // max |(I - B) p_g - C P_data|
};

/// Gaussian elimination with partial pivoting, shared across bins.
EquilibriumSolution solve_equilibrium_direct(const topology::MixingWeights& w,
                                             std::span<const DistVector> p_data);

/// Jacobi sweeps p <- C P + B p from p = 0 until the residual drops below tol.
EquilibriumSolution solve_equilibrium_jacobi(const topology::MixingWeights& w,
                                             std::span<const DistVector> p_data, double tol,
                                             std::size_t max_iter);

/// Exactly `steps` Jacobi sweeps from zero, unnormalised, one row per agent.
std::vector<std::vector<double>> jacobi_iterate(const topology::MixingWeights& w,
                                                std::span<const DistVector> p_data,
                                                std::size_t steps);

/// (I - B)^-1 C as a dense n x n matrix.
std::vector<std::vector<double>> lambda_matrix(const topology::MixingWeights& w);

/// Max-norm of (I - B) p_g - C P_data.
double equilibrium_residual(const topology::MixingWeights& w, std::span<const DistVector> p_g,
                            std::span<const DistVector> p_data);

/// Jensen-Shannon divergence in nats, with 0 log 0 = 0.
double jsd(std::span<const double> p, std::span<const double> q);
double jsd(const DistVector& p, const DistVector& q);

/// -n ln 4 + sum_i JSD(p_b_i || p_g_i).
double game_value(std::span<const DistVector> p_b, std::span<const DistVector> p_g);

/// p_b / (p_b + p_g) per bin, 0.5 where both vanish.
std::vector<double> optimal_discriminator(const DistVector& p_b, const DistVector& p_g);

/// The brainstorming mixture p_b_i for every agent given generator distributions.
std::vector<DistVector> brainstorm_mixtures(const topology::MixingWeights& w,
                                            std::span<const DistVector> p_data,
                                            std::span<const DistVector> p_g);

}  // namespace bgan::equilibrium
