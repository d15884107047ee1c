#pragma once

#include <cstdint>

#include "bgan/datasets.hpp"
#include "bgan/nn.hpp"

namespace bgan {

/// One participant: private shard, its own generator/discriminator pair and
/// the random streams that drive them.
struct AgentState {
    std::size_t id = 0;
    nn::Mlp generator;
    nn::Mlp discriminator;
    nn::OptimizerState generator_opt;
    nn::OptimizerState discriminator_opt;
    datasets::Dataset data;
    std::size_t noise_dim = 8;
    datasets::Rng noise_stream;
    datasets::Rng real_stream;
    std::uint64_t eval_seed = 0;
};

/// `count` generator samples from z ~ N(0, I).
Matrix generate(const nn::Mlp& generator, std::size_t count, std::size_t noise_dim,
                datasets::Rng& rng);

/// `count` rows drawn uniformly with replacement.
Matrix draw_with_replacement(const datasets::Dataset& data, std::size_t count, datasets::Rng& rng);

}  // namespace bgan
