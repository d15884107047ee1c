#include "bgan/agent.hpp"

#include <algorithm>

#include "bgan/error.hpp"

namespace bgan {

Matrix generate(const nn::Mlp& generator, std::size_t count, std::size_t noise_dim,
                datasets::Rng& rng) {
    return generator.forward(datasets::noise_batch(noise_dim, count, rng));
}

Matrix draw_with_replacement(const datasets::Dataset& data, std::size_t count, datasets::Rng& rng) {
    Matrix out(count, data.dim());
    if (count == 0) return out;
    if (data.empty()) throw Error(ErrorCode::training, "cannot draw from an empty shard");
    std::uniform_int_distribution<std::size_t> pick(0, data.size() - 1);
    for (std::size_t r = 0; r < count; ++r) {
        const auto src = data.samples().row(pick(rng));
        std::copy(src.begin(), src.end(), out.row(r).begin());
    }
    return out;
}

}  // namespace bgan
