#include "bgan/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bgan/error.hpp"

namespace bgan::equilibrium {

Grid Grid::line(std::size_t bins) { return Grid{{Axis{0.0, 1.0, bins}}}; }

Grid Grid::square(std::size_t bins_per_dim, double min, double max, std::size_t dims) {
    return Grid{std::vector<Axis>(dims, Axis{min, max, bins_per_dim})};
}

std::size_t Grid::bin_count() const noexcept {
    if (axes.empty()) return 0;
    std::size_t k = 1;
    for (const auto& a : axes) k *= a.bins;
    return k;
}

std::size_t Grid::bin_of(std::span<const double> point) const {
    if (point.size() != axes.size()) {
        throw Error(ErrorCode::dimension, "point has " + std::to_string(point.size()) +
                                              " coordinates, grid has " + std::to_string(axes.size()));
    }
    std::size_t flat = 0;
    for (std::size_t d = 0; d < axes.size(); ++d) {
        const auto& a = axes[d];
        const double t = (point[d] - a.min) / (a.max - a.min) * static_cast<double>(a.bins);
        std::size_t idx = 0;
        if (t >= static_cast<double>(a.bins)) {
            idx = a.bins - 1;
        } else if (t > 0.0) {
            idx = static_cast<std::size_t>(t);
        }
        flat = flat * a.bins + idx;
    }
    return flat;
}

DistVector::DistVector(Grid grid, std::vector<double> bins) : grid_(std::move(grid)), bins_(std::move(bins)) {
    if (bins_.empty() || bins_.size() != grid_.bin_count()) {
        throw Error(ErrorCode::dimension, "distribution has " + std::to_string(bins_.size()) +
                                              " bins, grid has " + std::to_string(grid_.bin_count()));
    }
    double sum = 0.0;
    for (double v : bins_) {
        if (!std::isfinite(v) || v < -1e-12) {
            throw Error(ErrorCode::validation, "distribution has a negative or non-finite bin");
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg << "distribution sums to " << sum << ", expected 1";
        throw Error(ErrorCode::validation, msg.str());
    }
}

DistVector DistVector::point_mass(const Grid& grid, std::size_t bin) {
    std::vector<double> bins(grid.bin_count(), 0.0);
    if (bin >= bins.size()) throw Error(ErrorCode::dimension, "point mass bin out of range");
    bins[bin] = 1.0;
    return DistVector(grid, std::move(bins));
}

DistVector DistVector::uniform(const Grid& grid) {
    const std::size_t k = grid.bin_count();
    return DistVector(grid, std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

namespace {

void require_same_grid(const DistVector& a, const DistVector& b) {
    if (!(a.grid() == b.grid())) throw Error(ErrorCode::dimension, "distributions use different grids");
}

void require_agents(const topology::MixingWeights& w, std::size_t count) {
    if (w.size() != count || w.B.size() != count) {
        throw Error(ErrorCode::dimension, "weights describe " + std::to_string(w.size()) +
                                              " agents, got " + std::to_string(count) +
                                              " distributions");
    }
    if (count == 0) throw Error(ErrorCode::dimension, "need at least one agent");
}

void require_common_grid(std::span<const DistVector> ds) {
    for (const auto& d : ds) require_same_grid(ds.front(), d);
}

// LU decomposition with partial pivoting of the dense matrix I - B.
class LuFactor {
public:
    explicit LuFactor(const topology::MixingWeights& w) : n_(w.size()), a_(n_ * n_), perm_(n_) {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) a_[i * n_ + j] = (i == j ? 1.0 : 0.0) - w.B[i][j];
        std::iota(perm_.begin(), perm_.end(), std::size_t{0});
        for (std::size_t k = 0; k < n_; ++k) {
            std::size_t piv = k;
            for (std::size_t r = k + 1; r < n_; ++r)
                if (std::abs(a_[r * n_ + k]) > std::abs(a_[piv * n_ + k])) piv = r;
            if (std::abs(a_[piv * n_ + k]) < 1e-300) {
                throw Error(ErrorCode::internal, "I - B is singular; weights were not validated");
            }
            if (piv != k) {
                for (std::size_t c = 0; c < n_; ++c) std::swap(a_[k * n_ + c], a_[piv * n_ + c]);
                std::swap(perm_[k], perm_[piv]);
            }
            for (std::size_t r = k + 1; r < n_; ++r) {
                const double f = a_[r * n_ + k] / a_[k * n_ + k];
                a_[r * n_ + k] = f;
                for (std::size_t c = k + 1; c < n_; ++c) a_[r * n_ + c] -= f * a_[k * n_ + c];
            }
        }
    }

    // Solves in place: rhs has n entries.
    void solve(std::vector<double>& rhs) const {
        std::vector<double> y(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            double s = rhs[perm_[i]];
            for (std::size_t c = 0; c < i; ++c) s -= a_[i * n_ + c] * y[c];
            y[i] = s;
        }
        for (std::size_t i = n_; i-- > 0;) {
            double s = y[i];
            for (std::size_t c = i + 1; c < n_; ++c) s -= a_[i * n_ + c] * rhs[c];
            rhs[i] = s / a_[i * n_ + i];
        }
    }

private:
    std::size_t n_;
    std::vector<double> a_;
    std::vector<std::size_t> perm_;
};

double residual_rows(const topology::MixingWeights& w, const std::vector<std::vector<double>>& p_g,
                     std::span<const DistVector> p_data) {
    const std::size_t n = w.size();
    const std::size_t k_bins = p_data.front().size();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < k_bins; ++k) {
            double r = p_g[i][k] - w.C[i] * p_data[i][k];
            for (std::size_t j = 0; j < n; ++j)
                if (w.B[i][j] != 0.0) r -= w.B[i][j] * p_g[j][k];
            worst = std::max(worst, std::abs(r));
        }
    }
    return worst;
}

std::vector<DistVector> to_dists(const Grid& grid, std::vector<std::vector<double>> rows) {
    std::vector<DistVector> out;
    out.reserve(rows.size());
    for (auto& r : rows) out.emplace_back(grid, std::move(r));
    return out;
}

}  // namespace

DistVector mixture(const DistVector& own, std::span<const Idea> ideas, double own_weight) {
    double total = own_weight;
    for (const auto& idea : ideas) {
        require_same_grid(own, *idea.dist);
        if (idea.weight < 0.0) throw Error(ErrorCode::validation, "negative mixture weight");
        total += idea.weight;
    }
    if (own_weight < 0.0 || std::abs(total - 1.0) > 1e-9) {
        throw Error(ErrorCode::validation, "mixture weights must be nonnegative and sum to 1");
    }
    std::vector<double> bins(own.size());
    for (std::size_t k = 0; k < bins.size(); ++k) {
        double v = own_weight * own[k];
        for (const auto& idea : ideas) v += idea.weight * (*idea.dist)[k];
        bins[k] = v;
    }
    return DistVector(own.grid(), std::move(bins));
}

std::vector<std::vector<double>> lambda_matrix(const topology::MixingWeights& w) {
    const std::size_t n = w.size();
    const LuFactor lu(w);
    std::vector<std::vector<double>> lambda(n, std::vector<double>(n, 0.0));
    std::vector<double> col(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::fill(col.begin(), col.end(), 0.0);
        col[j] = w.C[j];
        lu.solve(col);
        for (std::size_t i = 0; i < n; ++i) lambda[i][j] = col[i];
    }
    return lambda;
}

EquilibriumSolution solve_equilibrium_direct(const topology::MixingWeights& w,
                                             std::span<const DistVector> p_data) {
    require_agents(w, p_data.size());
    require_common_grid(p_data);
    const std::size_t n = w.size();
    const std::size_t k_bins = p_data.front().size();
    const LuFactor lu(w);

    std::vector<std::vector<double>> rows(n, std::vector<double>(k_bins));
    std::vector<double> rhs(n);
    for (std::size_t k = 0; k < k_bins; ++k) {
        for (std::size_t i = 0; i < n; ++i) rhs[i] = w.C[i] * p_data[i][k];
        lu.solve(rhs);
        for (std::size_t i = 0; i < n; ++i) rows[i][k] = rhs[i];
    }
    EquilibriumSolution sol;
    sol.residual = residual_rows(w, rows, p_data);
    sol.lambda = lambda_matrix(w);
    sol.iterations = 0;
    sol.p_g_star = to_dists(p_data.front().grid(), std::move(rows));
    return sol;
}

std::vector<std::vector<double>> jacobi_iterate(const topology::MixingWeights& w,
                                                std::span<const DistVector> p_data,
                                                std::size_t steps) {
    require_agents(w, p_data.size());
    require_common_grid(p_data);
    const std::size_t n = w.size();
    const std::size_t k_bins = p_data.front().size();
    std::vector<std::vector<double>> p(n, std::vector<double>(k_bins, 0.0));
    std::vector<std::vector<double>> next = p;
    for (std::size_t s = 0; s < steps; ++s) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < k_bins; ++k) {
                double v = w.C[i] * p_data[i][k];
                for (std::size_t j = 0; j < n; ++j)
                    if (w.B[i][j] != 0.0) v += w.B[i][j] * p[j][k];
                next[i][k] = v;
            }
        }
        std::swap(p, next);
    }
    return p;
}

EquilibriumSolution solve_equilibrium_jacobi(const topology::MixingWeights& w,
                                             std::span<const DistVector> p_data, double tol,
                                             std::size_t max_iter) {
    if (!(tol > 0.0)) throw Error(ErrorCode::config, "Jacobi tolerance must be positive");
    require_agents(w, p_data.size());
    require_common_grid(p_data);
    const std::size_t n = w.size();
    const std::size_t k_bins = p_data.front().size();
    std::vector<std::vector<double>> p(n, std::vector<double>(k_bins, 0.0));
    std::vector<std::vector<double>> next = p;
    double residual = 0.0;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < k_bins; ++k) {
                double v = w.C[i] * p_data[i][k];
                for (std::size_t j = 0; j < n; ++j)
                    if (w.B[i][j] != 0.0) v += w.B[i][j] * p[j][k];
                next[i][k] = v;
            }
        }
        std::swap(p, next);
        // The residual of iterate k equals the size of the next Jacobi update.
        residual = residual_rows(w, p, p_data);
        if (residual < tol) {
            EquilibriumSolution sol;
            sol.residual = residual;
            sol.iterations = it;
            sol.lambda = lambda_matrix(w);
            sol.p_g_star = to_dists(p_data.front().grid(), std::move(p));
            return sol;
        }
    }
    std::ostringstream msg;
    msg << "Jacobi did not converge in " << max_iter << " iterations (residual " << residual << ")";
    throw Error(ErrorCode::convergence, msg.str());
}

double equilibrium_residual(const topology::MixingWeights& w, std::span<const DistVector> p_g,
                            std::span<const DistVector> p_data) {
    require_agents(w, p_data.size());
    if (p_g.size() != p_data.size()) throw Error(ErrorCode::dimension, "p_g and p_data sizes differ");
    std::vector<std::vector<double>> rows;
    for (const auto& d : p_g) {
        require_same_grid(d, p_data.front());
        rows.emplace_back(d.bins().begin(), d.bins().end());
    }
    return residual_rows(w, rows, p_data);
}

double jsd(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw Error(ErrorCode::dimension, "jsd: length mismatch");
    double sum = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double m = 0.5 * (p[k] + q[k]);
        if (p[k] > 0.0) sum += 0.5 * p[k] * std::log(p[k] / m);
        if (q[k] > 0.0) sum += 0.5 * q[k] * std::log(q[k] / m);
    }
    return std::clamp(sum, 0.0, std::log(2.0));
}

double jsd(const DistVector& p, const DistVector& q) {
    require_same_grid(p, q);
    return jsd(p.bins(), q.bins());
}

double game_value(std::span<const DistVector> p_b, std::span<const DistVector> p_g) {
    if (p_b.size() != p_g.size()) throw Error(ErrorCode::dimension, "game_value: agent count mismatch");
    double value = -static_cast<double>(p_b.size()) * std::log(4.0);
    for (std::size_t i = 0; i < p_b.size(); ++i) value += jsd(p_b[i], p_g[i]);
    return value;
}

std::vector<double> optimal_discriminator(const DistVector& p_b, const DistVector& p_g) {
    require_same_grid(p_b, p_g);
    std::vector<double> d(p_b.size());
    for (std::size_t k = 0; k < d.size(); ++k) {
        const double denom = p_b[k] + p_g[k];
        d[k] = denom > 0.0 ? p_b[k] / denom : 0.5;
    }
    return d;
}

std::vector<DistVector> brainstorm_mixtures(const topology::MixingWeights& w,
                                            std::span<const DistVector> p_data,
                                            std::span<const DistVector> p_g) {
    require_agents(w, p_data.size());
    if (p_g.size() != p_data.size()) throw Error(ErrorCode::dimension, "p_g and p_data sizes differ");
    std::vector<DistVector> out;
    out.reserve(p_data.size());
    for (std::size_t i = 0; i < p_data.size(); ++i) {
        std::vector<Idea> ideas;
        for (std::size_t j = 0; j < p_g.size(); ++j)
            if (w.B[i][j] != 0.0) ideas.push_back({&p_g[j], w.B[i][j]});
        out.push_back(mixture(p_data[i], ideas, w.C[i]));
    }
    return out;
}

}  // namespace bgan::equilibrium
