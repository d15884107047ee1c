#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bgan/datasets.hpp"
#include "support.hpp"

using namespace bgan;
using namespace bgan::datasets;

namespace {

std::vector<std::pair<double, double>> sorted_rows(const Matrix& m) {
    std::vector<std::pair<double, double>> r;
    for (std::size_t i = 0; i < m.rows(); ++i) r.emplace_back(m(i, 0), m(i, 1));
    std::sort(r.begin(), r.end());
    return r;
}

}  // namespace

TEST_CASE("ring radius moments match the gamma law") {
    const RingParams p{9.0, 2.0, 100000, 3};
    const auto d = sample_ring(p);
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double r = std::hypot(d.samples()(i, 0), d.samples()(i, 1));
        s += r;
        s2 += r * r;
    }
    const double mean = s / static_cast<double>(d.size());
    const double var = s2 / static_cast<double>(d.size()) - mean * mean;
    CHECK(mean == doctest::Approx(9.0 / 2.0).epsilon(0.02));
    CHECK(var == doctest::Approx(9.0 / 4.0).epsilon(0.02));
}

TEST_CASE("gamma sampler for shapes below one") {
    Rng rng(5);
    double s = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) s += sample_gamma(rng, 0.4);
    CHECK(s / n == doctest::Approx(0.4).epsilon(0.02));
    CHECK_ERROR_CODE(sample_gamma(rng, 0.0), ErrorCode::config);
}

TEST_CASE("ring angles are uniform") {
    const auto d = sample_ring({9.0, 2.0, 100000, 8});
    std::vector<double> counts(36, 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) {
        double t = std::atan2(d.samples()(i, 1), d.samples()(i, 0));
        if (t < 0) t += 2.0 * std::numbers::pi;
        counts[std::min<std::size_t>(35, static_cast<std::size_t>(t / (2.0 * std::numbers::pi) * 36))] += 1.0;
    }
    const double e = static_cast<double>(d.size()) / 36.0;
    double chi2 = 0.0;
    for (double c : counts) chi2 += (c - e) * (c - e) / e;
    CHECK(chi2 < 57.34);  // chi-square 0.99 quantile, 35 degrees of freedom
}

TEST_CASE("ring sampling is deterministic per seed") {
    CHECK(sample_ring({9.0, 2.0, 50, 1}) == sample_ring({9.0, 2.0, 50, 1}));
    CHECK_FALSE(sample_ring({9.0, 2.0, 50, 1}) == sample_ring({9.0, 2.0, 50, 2}));
    CHECK_ERROR_CODE(sample_ring({-1.0, 2.0, 50, 1}), ErrorCode::config);
}

TEST_CASE("equal partition") {
    const auto d = sample_ring({9.0, 2.0, 1000, 4});
    const auto parts = partition_equal(d, 10, 4);
    CHECK(parts.size() == 10);
    for (const auto& p : parts) CHECK(p.size() == 100);
    CHECK(sorted_rows(concatenate(parts).samples()) == sorted_rows(d.samples()));

    const auto tiny = partition_equal(sample_ring({9.0, 2.0, 10, 4}), 10, 1);
    for (const auto& p : tiny) CHECK(p.size() == 1);

    const auto uneven = partition_equal(sample_ring({9.0, 2.0, 23, 4}), 5, 1);
    CHECK(uneven[0].size() == 4);
    CHECK(uneven[4].size() == 5);
    CHECK_ERROR_CODE(partition_equal(sample_ring({9.0, 2.0, 3, 4}), 5, 1), ErrorCode::config);
}

TEST_CASE("angular partition") {
    const double pi = std::numbers::pi;
    SUBCASE("half planes") {
        const AngleInterval cuts[] = {{0.0, pi}, {pi, 2 * pi}};
        const auto parts = partition_angular({9.0, 2.0, 500, 2}, cuts);
        for (std::size_t i = 0; i < 500; ++i) {
            CHECK(parts[0].samples()(i, 1) >= 0.0);
            CHECK(parts[1].samples()(i, 1) <= 0.0);
        }
    }
    SUBCASE("quadrants") {
        const AngleInterval cuts[] = {{0, pi / 2}, {pi / 2, pi}, {pi, 1.5 * pi}, {1.5 * pi, 2 * pi}};
        const auto parts = partition_angular({9.0, 2.0, 200, 2}, cuts);
        const int sx[] = {1, -1, -1, 1}, sy[] = {1, 1, -1, -1};
        for (std::size_t a = 0; a < 4; ++a)
            for (std::size_t i = 0; i < 200; ++i) {
                CHECK(parts[a].samples()(i, 0) * sx[a] >= -1e-12);
                CHECK(parts[a].samples()(i, 1) * sy[a] >= -1e-12);
            }
    }
    SUBCASE("bad covers") {
        const AngleInterval overlap[] = {{0, pi}, {pi / 2, 2 * pi}};
        const AngleInterval gap[] = {{0, pi}, {1.1 * pi, 2 * pi}};
        const AngleInterval short_cover[] = {{0, pi}};
        CHECK_ERROR_CODE(partition_angular({9.0, 2.0, 10, 1}, overlap), ErrorCode::config);
        CHECK_ERROR_CODE(partition_angular({9.0, 2.0, 10, 1}, gap), ErrorCode::config);
        CHECK_ERROR_CODE(partition_angular({9.0, 2.0, 10, 1}, short_cover), ErrorCode::config);
    }
}

TEST_CASE("normalisation") {
    SUBCASE("unit box data is unchanged") {
        Matrix m(3, 2);
        m(0, 0) = -1.0, m(0, 1) = 1.0;
        m(1, 0) = 1.0, m(1, 1) = -1.0;
        m(2, 0) = 0.25, m(2, 1) = 0.5;
        const auto n = normalize(Dataset(m));
        CHECK(n.data.samples() == m);
    }
    SUBCASE("single point maps to the origin") {
        const auto n = normalize(Dataset(Matrix(1, 2, 7.0)));
        CHECK(n.data.samples()(0, 0) == 0.0);
        CHECK(n.data.samples()(0, 1) == 0.0);
    }
    SUBCASE("round trip") {
        const auto d = sample_ring({9.0, 2.0, 500, 6});
        const auto n = normalize(d);
        const auto back = n.transform.inverse(n.data.samples());
        double worst = 0.0, lo = 0.0, hi = 0.0;
        for (std::size_t i = 0; i < back.size(); ++i) {
            worst = std::max(worst, std::abs(back.values()[i] - d.samples().values()[i]));
            lo = std::min(lo, n.data.samples().values()[i]);
            hi = std::max(hi, n.data.samples().values()[i]);
        }
        CHECK(worst <= 1e-12);
        CHECK(lo == doctest::Approx(-1.0));
        CHECK(hi == doctest::Approx(1.0));
    }
}

TEST_CASE("noise batches") {
    Rng a = make_stream(1, 0, StreamPurpose::noise);
    Rng b = make_stream(1, 0, StreamPurpose::noise);
    CHECK(noise_batch(8, 4, a) == noise_batch(8, 4, b));
    Rng big(3);
    const auto z = noise_batch(1000, 1000, big);
    double s = 0.0, s2 = 0.0;
    for (double v : z.values()) {
        s += v;
        s2 += v * v;
    }
    const double n = static_cast<double>(z.size());
    CHECK(std::abs(s / n) < 0.01);
    CHECK((s2 / n - (s / n) * (s / n)) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("streams differ by agent and purpose") {
    CHECK(stream_seed(1, 0, StreamPurpose::noise) != stream_seed(1, 1, StreamPurpose::noise));
    CHECK(stream_seed(1, 0, StreamPurpose::noise) != stream_seed(1, 0, StreamPurpose::real_draw));
    CHECK(stream_seed(1, 0, StreamPurpose::noise) != stream_seed(2, 0, StreamPurpose::noise));
}

TEST_CASE("csv round trip") {
    const auto d = sample_ring({9.0, 2.0, 20, 1});
    std::stringstream ss;
    write_csv(d, ss);
    CHECK(read_csv(ss) == d);
    std::stringstream ragged("1,2\n3\n");
    CHECK_ERROR_CODE(read_csv(ragged), ErrorCode::io);
    std::stringstream word("1,x\n");
    CHECK_ERROR_CODE(read_csv(word), ErrorCode::io);
    CHECK_ERROR_CODE(Dataset(Matrix(1, 1, std::nan(""))), ErrorCode::validation);
}
