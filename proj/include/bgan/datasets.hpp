#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "bgan/matrix.hpp"

namespace bgan::datasets {

/// Samples as rows; every entry finite.
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(Matrix samples);

    std::size_t size() const noexcept { return samples_.rows(); }
    std::size_t dim() const noexcept { return samples_.cols(); }
    bool empty() const noexcept { return samples_.rows() == 0; }
    const Matrix& samples() const noexcept { return samples_; }

    bool operator==(const Dataset&) const = default;

private:
    Matrix samples_;
};

/// What a random stream is used for; every (seed, agent, purpose) triple
/// yields an independent generator.
enum class StreamPurpose : std::uint64_t {
    dataset = 1,
    partition = 2,
    generator_init = 3,
    discriminator_init = 4,
    noise = 5,
    real_draw = 6,
    evaluation = 7,
    reference = 8,
};

using Rng = std::mt19937_64;

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t agent, StreamPurpose purpose) noexcept;
Rng make_stream(std::uint64_t seed, std::uint64_t agent, StreamPurpose purpose);

/// Gamma(shape, 1) via Marsaglia-Tsang, boosted for shape < 1.
double sample_gamma(Rng& rng, double shape);

/// Ring points (r cos t, r sin t) with r ~ Gamma(alpha, rate beta), t ~ U(0, 2 pi).
struct RingParams {
    double alpha = 9.0;
    double beta = 2.0;
    std::size_t n = 1000;
    std::uint64_t seed = 1;
};

Dataset sample_ring(const RingParams& params);
/// Same law with the angle restricted to [theta_lo, theta_hi).
Dataset sample_ring_sector(const RingParams& params, double theta_lo, double theta_hi, Rng& rng);

/// Random shuffle followed by a contiguous split; sizes differ by at most one
/// and the larger parts go to the last agents.
std::vector<Dataset> partition_equal(const Dataset& data, std::size_t n_agents, std::uint64_t seed);

struct AngleInterval {
    double lo;
    double hi;
};

/// One shard of params.n points per interval; intervals must tile [0, 2 pi).
std::vector<Dataset> partition_angular(const RingParams& params, std::span<const AngleInterval> cuts);

/// Per-dimension affine map x -> (x - center) * scale onto [-1, 1].
struct AffineTransform {
    std::vector<double> center;
    std::vector<double> scale;  // 0 for zero-range dimensions

    std::vector<double> apply(std::span<const double> x) const;
    std::vector<double> inverse(std::span<const double> y) const;
    Matrix apply(const Matrix& x) const;
    Matrix inverse(const Matrix& y) const;
};

struct Normalized {
    Dataset data;
    AffineTransform transform;
};

AffineTransform fit_normalization(const Dataset& data);
Normalized normalize(const Dataset& data);
Dataset apply_transform(const Dataset& data, const AffineTransform& t);

/// b x dim i.i.d. standard normal entries.
Matrix noise_batch(std::size_t dim, std::size_t b, Rng& stream);

/// Headerless CSV, one sample per row.
void write_csv(const Dataset& data, std::ostream& out);
Dataset read_csv(std::istream& in);
void write_csv_file(const Dataset& data, const std::string& path);
Dataset read_csv_file(const std::string& path);

/// Union of several datasets (rows concatenated in order).
Dataset concatenate(std::span<const Dataset> parts);

}  // namespace bgan::datasets
