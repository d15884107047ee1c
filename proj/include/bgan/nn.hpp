#pragma once

// Dense feed-forward networks with exact backpropagation, used for every
// agent's generator and discriminator.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bgan/matrix.hpp"

namespace bgan::nn {

enum class Activation { relu, tanh, sigmoid, identity };

std::string_view to_string(Activation a) noexcept;
Activation parse_activation(std::string_view name);

/// Layer topology: dims = {in, h1, ..., out}, one activation per layer.
struct MlpSpec {
    std::vector<std::size_t> dims;
    std::vector<Activation> activations;

    std::size_t layer_count() const noexcept { return activations.size(); }
};

/// Hidden layers share one activation; the head gets its own.
MlpSpec make_spec(std::size_t input_dim, std::span<const std::size_t> hidden, std::size_t output_dim,
                  Activation hidden_activation, Activation output_activation);

struct DenseLayer {
    Matrix weights;  // out x in
    std::vector<double> bias;
    Activation activation = Activation::identity;

    std::size_t in_dim() const noexcept { return weights.cols(); }
    std::size_t out_dim() const noexcept { return weights.rows(); }

    bool operator==(const DenseLayer&) const = default;
};

/// Per-parameter gradients, laid out like the network's layers.
struct Gradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> bias;

    void scale(double factor);
    void add(const Gradients& other);
    bool all_finite() const;
};

/// Activations retained by a forward pass for the backward pass.
struct ForwardCache {
    std::vector<Matrix> inputs;       // input of layer k
    std::vector<Matrix> activations;  // post-activation output of layer k
};

class Mlp {
public:
    Mlp() = default;
    explicit Mlp(std::vector<DenseLayer> layers);

    std::size_t input_dim() const noexcept;
    std::size_t output_dim() const noexcept;
    std::size_t parameter_count() const noexcept;
    const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
    std::vector<DenseLayer>& layers() noexcept { return layers_; }

    Matrix forward(const Matrix& batch) const;
    Matrix forward(const Matrix& batch, ForwardCache& cache) const;

    /// Backpropagates dL/d(output). Fills parameter gradients when `grads`
    /// is non-null and returns dL/d(input).
    Matrix backward(const ForwardCache& cache, const Matrix& grad_output, Gradients* grads) const;

    Gradients zero_gradients() const;
    bool all_finite() const;

    /// Flattened parameters in layer order (weights row-major, then bias).
    std::vector<double> flatten() const;
    void assign(std::span<const double> flat);

    bool operator==(const Mlp&) const = default;

private:
    std::vector<DenseLayer> layers_;
};

/// Uniform Glorot init, deterministic in `seed`.
Mlp mlp_init(const MlpSpec& spec, std::uint64_t seed);

void save_checkpoint(const Mlp& net, std::ostream& out);
Mlp load_checkpoint(std::istream& in);
void save_checkpoint(const Mlp& net, const std::string& path);
Mlp load_checkpoint(const std::string& path);

enum class OptimizerKind { sgd, adam };

class OptimizerState {
public:
    OptimizerState() = default;
    OptimizerState(OptimizerKind kind, const Mlp& net, double learning_rate, double beta1 = 0.5,
                   double beta2 = 0.999, double epsilon = 1e-8);

    static OptimizerState adam(const Mlp& net, double learning_rate = 1e-3);
    static OptimizerState sgd(const Mlp& net, double learning_rate);

    OptimizerKind kind() const noexcept { return kind_; }
    double learning_rate() const noexcept { return learning_rate_; }
    std::uint64_t step_count() const noexcept { return step_; }

    /// One descent step along `grads` (callers negate for ascent).
    void apply(Mlp& net, const Gradients& grads);

    bool operator==(const OptimizerState&) const = default;

private:
    OptimizerKind kind_ = OptimizerKind::adam;
    double learning_rate_ = 1e-3;
    double beta1_ = 0.5;
    double beta2_ = 0.999;
    double epsilon_ = 1e-8;
    std::uint64_t step_ = 0;
    Gradients first_moment_;
    Gradients second_moment_;
};

/// D outputs are clamped to [kClamp, 1 - kClamp] before any log.
inline constexpr double kClamp = 1e-7;

enum class GeneratorLoss { saturating, non_saturating };

std::string_view to_string(GeneratorLoss loss) noexcept;
GeneratorLoss parse_generator_loss(std::string_view name);

struct ObjectiveGradient {
    double objective = 0.0;
    Gradients grads;  // gradient of the loss being minimised
};

/// J = (1/b)[sum log D(positives) + sum log(1 - D(fakes))], b = fakes.rows().
/// Returned grads are of -J so OptimizerState::apply ascends J.
ObjectiveGradient discriminator_gradient(const Mlp& d, const Matrix& positives, const Matrix& fakes);

/// Saturating: objective (1/b) sum log(1 - D(G(z))), grads of that objective.
/// Non-saturating: objective (1/b) sum log D(G(z)), grads of its negation.
ObjectiveGradient generator_gradient(const Mlp& g, const Mlp& d, const Matrix& noise,
                                     GeneratorLoss mode);

/// How several discriminators' verdicts reach one generator.
enum class DiscriminatorMix {
    mean,            // average of per-discriminator generator gradients
    most_forgiving,  // per sample, the discriminator with the largest D(x)
};

ObjectiveGradient generator_gradient(const Mlp& g, std::span<const Mlp> ds, const Matrix& noise,
                                     GeneratorLoss mode, DiscriminatorMix mix);

/// Returns the objective evaluated before the update.
double discriminator_step(Mlp& d, OptimizerState& opt, const Matrix& positives, const Matrix& fakes);
double generator_step(Mlp& g, const Mlp& d, OptimizerState& opt, const Matrix& noise,
                      GeneratorLoss mode);
double generator_step(Mlp& g, std::span<const Mlp> ds, OptimizerState& opt, const Matrix& noise,
                      GeneratorLoss mode, DiscriminatorMix mix);

}  // namespace bgan::nn
