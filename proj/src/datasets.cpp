#include "bgan/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

#include "bgan/error.hpp"

namespace bgan::datasets {

Dataset::Dataset(Matrix samples) : samples_(std::move(samples)) {
    for (double v : samples_.values()) {
        if (!std::isfinite(v)) throw Error(ErrorCode::validation, "dataset contains a non-finite value");
    }
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t agent, StreamPurpose purpose) noexcept {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ (agent + 0x51ed2701ULL));
    h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
    return h;
}

Rng make_stream(std::uint64_t seed, std::uint64_t agent, StreamPurpose purpose) {
    return Rng(stream_seed(seed, agent, purpose));
}

double sample_gamma(Rng& rng, double shape) {
    if (!(shape > 0.0) || !std::isfinite(shape)) {
        throw Error(ErrorCode::config, "gamma shape must be positive");
    }
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    if (shape < 1.0) {
        // Gamma(a) = Gamma(a + 1) * U^(1/a)
        double u = 0.0;
        do { u = unif(rng); } while (u <= 0.0);
        return sample_gamma(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = 0.0;
        double v = 0.0;
        do {
            x = normal(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = unif(rng);
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

namespace {

void check_ring(const RingParams& p) {
    if (!(p.alpha > 0.0) || !(p.beta > 0.0) || !std::isfinite(p.alpha) || !std::isfinite(p.beta)) {
        throw Error(ErrorCode::config, "ring dataset needs alpha > 0 and beta > 0");
    }
    if (p.n == 0) throw Error(ErrorCode::config, "ring dataset needs at least one sample");
}

}  // namespace

Dataset sample_ring_sector(const RingParams& params, double theta_lo, double theta_hi, Rng& rng) {
    check_ring(params);
    if (!(theta_hi > theta_lo)) throw Error(ErrorCode::config, "empty angle interval");
    std::uniform_real_distribution<double> angle(theta_lo, theta_hi);
    Matrix m(params.n, 2);
    for (std::size_t i = 0; i < params.n; ++i) {
        const double r = sample_gamma(rng, params.alpha) / params.beta;
        const double t = angle(rng);
        m(i, 0) = r * std::cos(t);
        m(i, 1) = r * std::sin(t);
    }
    return Dataset(std::move(m));
}

Dataset sample_ring(const RingParams& params) {
    Rng rng = make_stream(params.seed, 0, StreamPurpose::dataset);
    return sample_ring_sector(params, 0.0, 2.0 * std::numbers::pi, rng);
}

std::vector<Dataset> partition_equal(const Dataset& data, std::size_t n_agents, std::uint64_t seed) {
    if (n_agents == 0) throw Error(ErrorCode::config, "partition needs at least one agent");
    if (n_agents > data.size()) {
        throw Error(ErrorCode::config, "cannot split " + std::to_string(data.size()) +
                                           " samples among " + std::to_string(n_agents) + " agents");
    }
    std::vector<std::size_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng = make_stream(seed, 0, StreamPurpose::partition);
    std::shuffle(idx.begin(), idx.end(), rng);

    const std::size_t base = data.size() / n_agents;
    const std::size_t extra = data.size() % n_agents;
    std::vector<Dataset> parts;
    std::size_t pos = 0;
    for (std::size_t a = 0; a < n_agents; ++a) {
        const std::size_t count = base + (a >= n_agents - extra ? 1 : 0);
        Matrix m(count, data.dim());
        for (std::size_t r = 0; r < count; ++r) {
            const auto src = data.samples().row(idx[pos++]);
            std::copy(src.begin(), src.end(), m.row(r).begin());
        }
        parts.emplace_back(std::move(m));
    }
    return parts;
}

std::vector<Dataset> partition_angular(const RingParams& params, std::span<const AngleInterval> cuts) {
    check_ring(params);
    if (cuts.empty()) throw Error(ErrorCode::config, "angular partition needs at least one interval");
    std::vector<AngleInterval> sorted(cuts.begin(), cuts.end());
    std::sort(sorted.begin(), sorted.end(), [](auto a, auto b) { return a.lo < b.lo; });
    constexpr double tol = 1e-9;
    const double two_pi = 2.0 * std::numbers::pi;
    double cursor = 0.0;
    for (const auto& c : sorted) {
        if (!(c.hi > c.lo)) throw Error(ErrorCode::config, "angular interval with hi <= lo");
        if (c.lo < cursor - tol) throw Error(ErrorCode::config, "angular intervals overlap");
        if (c.lo > cursor + tol) throw Error(ErrorCode::config, "angular intervals leave a gap");
        cursor = c.hi;
    }
    if (std::abs(sorted.front().lo) > tol || std::abs(cursor - two_pi) > tol) {
        throw Error(ErrorCode::config, "angular intervals must cover [0, 2 pi)");
    }
    std::vector<Dataset> parts;
    for (std::size_t a = 0; a < cuts.size(); ++a) {
        Rng rng = make_stream(params.seed, a, StreamPurpose::dataset);
        parts.push_back(sample_ring_sector(params, cuts[a].lo, cuts[a].hi, rng));
    }
    return parts;
}

std::vector<double> AffineTransform::apply(std::span<const double> x) const {
    std::vector<double> y(x.size());
    for (std::size_t d = 0; d < x.size(); ++d) y[d] = (x[d] - center[d]) * scale[d];
    return y;
}

std::vector<double> AffineTransform::inverse(std::span<const double> y) const {
    std::vector<double> x(y.size());
    for (std::size_t d = 0; d < y.size(); ++d)
        x[d] = scale[d] != 0.0 ? y[d] / scale[d] + center[d] : center[d];
    return x;
}

Matrix AffineTransform::apply(const Matrix& x) const {
    if (x.cols() != center.size()) throw Error(ErrorCode::dimension, "transform dimension mismatch");
    Matrix y(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r)
        for (std::size_t d = 0; d < x.cols(); ++d) y(r, d) = (x(r, d) - center[d]) * scale[d];
    return y;
}

Matrix AffineTransform::inverse(const Matrix& y) const {
    if (y.cols() != center.size()) throw Error(ErrorCode::dimension, "transform dimension mismatch");
    Matrix x(y.rows(), y.cols());
    for (std::size_t r = 0; r < y.rows(); ++r) {
        const auto v = inverse(y.row(r));
        std::copy(v.begin(), v.end(), x.row(r).begin());
    }
    return x;
}

AffineTransform fit_normalization(const Dataset& data) {
    if (data.empty()) throw Error(ErrorCode::validation, "cannot normalize an empty dataset");
    AffineTransform t{std::vector<double>(data.dim()), std::vector<double>(data.dim())};
    for (std::size_t d = 0; d < data.dim(); ++d) {
        double lo = data.samples()(0, d);
        double hi = lo;
        for (std::size_t r = 1; r < data.size(); ++r) {
            lo = std::min(lo, data.samples()(r, d));
            hi = std::max(hi, data.samples()(r, d));
        }
        t.center[d] = 0.5 * (lo + hi);
        t.scale[d] = hi > lo ? 2.0 / (hi - lo) : 0.0;
    }
    return t;
}

Dataset apply_transform(const Dataset& data, const AffineTransform& t) {
    return Dataset(t.apply(data.samples()));
}

Normalized normalize(const Dataset& data) {
    auto t = fit_normalization(data);
    return {apply_transform(data, t), std::move(t)};
}

Matrix noise_batch(std::size_t dim, std::size_t b, Rng& stream) {
    if (dim == 0 || b == 0) throw Error(ErrorCode::config, "noise batch needs dim >= 1 and b >= 1");
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix z(b, dim);
    for (double& v : z.values()) v = normal(stream);
    return z;
}

void write_csv(const Dataset& data, std::ostream& out) {
    out << std::setprecision(17);
    for (std::size_t r = 0; r < data.size(); ++r) {
        const auto row = data.samples().row(r);
        for (std::size_t d = 0; d < row.size(); ++d) out << (d ? "," : "") << row[d];
        out << '\n';
    }
}

Dataset read_csv(std::istream& in) {
    std::vector<double> values;
    std::size_t cols = 0;
    std::size_t rows = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        std::string cell;
        std::size_t c = 0;
        while (std::getline(ls, cell, ',')) {
            try {
                values.push_back(std::stod(cell));
            } catch (const std::logic_error&) {
                throw Error(ErrorCode::io, "dataset csv: bad number '" + cell + "' on row " +
                                               std::to_string(rows + 1));
            }
            ++c;
        }
        if (rows == 0) cols = c;
        if (c != cols || c == 0) {
            throw Error(ErrorCode::io, "dataset csv: row " + std::to_string(rows + 1) +
                                           " has " + std::to_string(c) + " columns");
        }
        ++rows;
    }
    Matrix m(rows, cols);
    std::copy(values.begin(), values.end(), m.values().begin());
    return Dataset(std::move(m));
}

void write_csv_file(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io, "cannot write " + path);
    write_csv(data, out);
}

Dataset read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io, "cannot read " + path);
    return read_csv(in);
}

Dataset concatenate(std::span<const Dataset> parts) {
    Matrix all;
    for (const auto& p : parts) all.append_rows(p.samples());
    return Dataset(std::move(all));
}

}  // namespace bgan::datasets
