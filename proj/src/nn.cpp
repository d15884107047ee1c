#include "bgan/nn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "bgan/error.hpp"

namespace bgan::nn {

std::string_view to_string(Activation a) noexcept {
    switch (a) {
        case Activation::relu: return "relu";
        case Activation::tanh: return "tanh";
        case Activation::sigmoid: return "sigmoid";
        case Activation::identity: return "identity";
    }
    return "identity";
}

Activation parse_activation(std::string_view name) {
    if (name == "relu") return Activation::relu;
    if (name == "tanh") return Activation::tanh;
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "identity" || name == "linear") return Activation::identity;
    throw Error(ErrorCode::config, "unknown activation '" + std::string(name) + "'");
}

std::string_view to_string(GeneratorLoss loss) noexcept {
    return loss == GeneratorLoss::saturating ? "saturating" : "non_saturating";
}

GeneratorLoss parse_generator_loss(std::string_view name) {
    if (name == "saturating") return GeneratorLoss::saturating;
    if (name == "non_saturating") return GeneratorLoss::non_saturating;
    throw Error(ErrorCode::config, "unknown generator loss '" + std::string(name) + "'");
}

MlpSpec make_spec(std::size_t input_dim, std::span<const std::size_t> hidden, std::size_t output_dim,
                  Activation hidden_activation, Activation output_activation) {
    MlpSpec spec;
    spec.dims.push_back(input_dim);
    for (std::size_t h : hidden) {
        spec.dims.push_back(h);
        spec.activations.push_back(hidden_activation);
    }
    spec.dims.push_back(output_dim);
    spec.activations.push_back(output_activation);
    return spec;
}

// ---------------------------------------------------------------------------
// Gradients

void Gradients::scale(double factor) {
    for (auto& w : weights)
        for (double& v : w.values()) v *= factor;
    for (auto& b : bias)
        for (double& v : b) v *= factor;
}

void Gradients::add(const Gradients& other) {
    for (std::size_t k = 0; k < weights.size(); ++k) {
        auto dst = weights[k].values();
        auto src = other.weights[k].values();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
        for (std::size_t i = 0; i < bias[k].size(); ++i) bias[k][i] += other.bias[k][i];
    }
}

bool Gradients::all_finite() const {
    for (const auto& w : weights)
        for (double v : w.values())
            if (!std::isfinite(v)) return false;
    for (const auto& b : bias)
        for (double v : b)
            if (!std::isfinite(v)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Mlp

namespace {

double activate(Activation a, double z) {
    switch (a) {
        case Activation::relu: return z > 0.0 ? z : 0.0;
        case Activation::tanh: return std::tanh(z);
        case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-z));
        case Activation::identity: return z;
    }
    return z;
}

// Derivative expressed through the post-activation value.
double activation_slope(Activation a, double y) {
    switch (a) {
        case Activation::relu: return y > 0.0 ? 1.0 : 0.0;
        case Activation::tanh: return 1.0 - y * y;
        case Activation::sigmoid: return y * (1.0 - y);
        case Activation::identity: return 1.0;
    }
    return 1.0;
}

Matrix dense_forward(const DenseLayer& layer, const Matrix& x) {
    const std::size_t b = x.rows();
    const std::size_t in = layer.in_dim();
    const std::size_t out = layer.out_dim();
    Matrix y(b, out);
    for (std::size_t r = 0; r < b; ++r) {
        const double* xr = x.row(r).data();
        double* yr = y.row(r).data();
        for (std::size_t o = 0; o < out; ++o) {
            const double* wo = layer.weights.row(o).data();
            double acc = layer.bias[o];
            for (std::size_t i = 0; i < in; ++i) acc += wo[i] * xr[i];
            yr[o] = activate(layer.activation, acc);
        }
    }
    return y;
}

}  // namespace

Mlp::Mlp(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
    if (layers_.empty()) throw Error(ErrorCode::config, "mlp needs at least one layer");
    for (std::size_t k = 0; k < layers_.size(); ++k) {
        const auto& l = layers_[k];
        if (l.in_dim() == 0 || l.out_dim() == 0 || l.bias.size() != l.out_dim()) {
            throw Error(ErrorCode::config, "layer " + std::to_string(k) + " has inconsistent shape");
        }
        if (k > 0 && layers_[k - 1].out_dim() != l.in_dim()) {
            throw Error(ErrorCode::config, "layer " + std::to_string(k) + " input dim " +
                                               std::to_string(l.in_dim()) + " does not chain with " +
                                               std::to_string(layers_[k - 1].out_dim()));
        }
    }
}

std::size_t Mlp::input_dim() const noexcept { return layers_.empty() ? 0 : layers_.front().in_dim(); }
std::size_t Mlp::output_dim() const noexcept { return layers_.empty() ? 0 : layers_.back().out_dim(); }

std::size_t Mlp::parameter_count() const noexcept {
    std::size_t n = 0;
    for (const auto& l : layers_) n += l.weights.size() + l.bias.size();
    return n;
}

Matrix Mlp::forward(const Matrix& batch) const {
    if (batch.cols() != input_dim()) {
        throw Error(ErrorCode::dimension, "forward: batch has " + std::to_string(batch.cols()) +
                                              " columns, network expects " +
                                              std::to_string(input_dim()));
    }
    Matrix x = batch;
    for (const auto& l : layers_) x = dense_forward(l, x);
    return x;
}

Matrix Mlp::forward(const Matrix& batch, ForwardCache& cache) const {
    if (batch.cols() != input_dim()) {
        throw Error(ErrorCode::dimension, "forward: batch has " + std::to_string(batch.cols()) +
                                              " columns, network expects " +
                                              std::to_string(input_dim()));
    }
    cache.inputs.clear();
    cache.activations.clear();
    cache.inputs.reserve(layers_.size());
    cache.activations.reserve(layers_.size());
    const Matrix* x = &batch;
    for (const auto& l : layers_) {
        cache.inputs.push_back(*x);
        cache.activations.push_back(dense_forward(l, *x));
        x = &cache.activations.back();
    }
    return cache.activations.back();
}

Matrix Mlp::backward(const ForwardCache& cache, const Matrix& grad_output, Gradients* grads) const {
    if (cache.activations.size() != layers_.size()) {
        throw Error(ErrorCode::internal, "backward: cache does not match network");
    }
    Matrix upstream = grad_output;
    for (std::size_t k = layers_.size(); k-- > 0;) {
        const auto& l = layers_[k];
        const Matrix& x = cache.inputs[k];
        const Matrix& y = cache.activations[k];
        const std::size_t b = x.rows();
        const std::size_t in = l.in_dim();
        const std::size_t out = l.out_dim();

        Matrix delta(b, out);
        for (std::size_t r = 0; r < b; ++r)
            for (std::size_t o = 0; o < out; ++o)
                delta(r, o) = upstream(r, o) * activation_slope(l.activation, y(r, o));

        if (grads != nullptr) {
            Matrix& dw = grads->weights[k];
            std::vector<double>& db = grads->bias[k];
            for (std::size_t r = 0; r < b; ++r) {
                const double* xr = x.row(r).data();
                for (std::size_t o = 0; o < out; ++o) {
                    const double d = delta(r, o);
                    db[o] += d;
                    double* dwo = dw.row(o).data();
                    for (std::size_t i = 0; i < in; ++i) dwo[i] += d * xr[i];
                }
            }
        }

        Matrix next(b, in);
        for (std::size_t r = 0; r < b; ++r) {
            double* nr = next.row(r).data();
            for (std::size_t o = 0; o < out; ++o) {
                const double d = delta(r, o);
                const double* wo = l.weights.row(o).data();
                for (std::size_t i = 0; i < in; ++i) nr[i] += d * wo[i];
            }
        }
        upstream = std::move(next);
    }
    return upstream;
}

Gradients Mlp::zero_gradients() const {
    Gradients g;
    for (const auto& l : layers_) {
        g.weights.emplace_back(l.out_dim(), l.in_dim());
        g.bias.emplace_back(l.out_dim(), 0.0);
    }
    return g;
}

bool Mlp::all_finite() const {
    for (const auto& l : layers_) {
        for (double v : l.weights.values())
            if (!std::isfinite(v)) return false;
        for (double v : l.bias)
            if (!std::isfinite(v)) return false;
    }
    return true;
}

std::vector<double> Mlp::flatten() const {
    std::vector<double> flat;
    flat.reserve(parameter_count());
    for (const auto& l : layers_) {
        flat.insert(flat.end(), l.weights.values().begin(), l.weights.values().end());
        flat.insert(flat.end(), l.bias.begin(), l.bias.end());
    }
    return flat;
}

void Mlp::assign(std::span<const double> flat) {
    if (flat.size() != parameter_count()) {
        throw Error(ErrorCode::dimension, "assign: expected " + std::to_string(parameter_count()) +
                                              " parameters, got " + std::to_string(flat.size()));
    }
    std::size_t pos = 0;
    for (auto& l : layers_) {
        for (double& v : l.weights.values()) v = flat[pos++];
        for (double& v : l.bias) v = flat[pos++];
    }
}

Mlp mlp_init(const MlpSpec& spec, std::uint64_t seed) {
    if (spec.activations.empty() || spec.dims.size() != spec.activations.size() + 1) {
        throw Error(ErrorCode::config, "mlp spec needs at least one layer and dims = layers + 1");
    }
    for (std::size_t d : spec.dims) {
        if (d == 0) throw Error(ErrorCode::config, "mlp spec has a zero dimension");
    }
    std::mt19937_64 rng(seed);
    std::vector<DenseLayer> layers;
    for (std::size_t k = 0; k < spec.layer_count(); ++k) {
        const std::size_t in = spec.dims[k];
        const std::size_t out = spec.dims[k + 1];
        const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
        std::uniform_real_distribution<double> dist(-limit, limit);
        DenseLayer layer{Matrix(out, in), std::vector<double>(out, 0.0), spec.activations[k]};
        for (double& w : layer.weights.values()) w = dist(rng);
        layers.push_back(std::move(layer));
    }
    return Mlp(std::move(layers));
}

// ---------------------------------------------------------------------------
// Checkpoints

void save_checkpoint(const Mlp& net, std::ostream& out) {
    out << "mlp " << net.layers().size() << '\n';
    out << std::setprecision(17);
    for (const auto& l : net.layers()) {
        out << "dense " << l.in_dim() << ' ' << l.out_dim() << ' ' << to_string(l.activation) << '\n';
        const auto w = l.weights.values();
        for (std::size_t i = 0; i < w.size(); ++i) out << (i ? " " : "") << w[i];
        out << '\n';
        for (std::size_t i = 0; i < l.bias.size(); ++i) out << (i ? " " : "") << l.bias[i];
        out << '\n';
    }
}

Mlp load_checkpoint(std::istream& in) {
    std::string tag;
    std::size_t n_layers = 0;
    if (!(in >> tag >> n_layers) || tag != "mlp" || n_layers == 0) {
        throw Error(ErrorCode::io, "checkpoint: missing 'mlp <n_layers>' header");
    }
    std::vector<DenseLayer> layers;
    for (std::size_t k = 0; k < n_layers; ++k) {
        std::size_t d_in = 0;
        std::size_t d_out = 0;
        std::string act;
        if (!(in >> tag >> d_in >> d_out >> act) || tag != "dense" || d_in == 0 || d_out == 0) {
            throw Error(ErrorCode::io, "checkpoint: bad layer header at layer " + std::to_string(k));
        }
        DenseLayer layer{Matrix(d_out, d_in), std::vector<double>(d_out), parse_activation(act)};
        for (double& v : layer.weights.values()) {
            if (!(in >> v)) throw Error(ErrorCode::io, "checkpoint: truncated weights");
        }
        for (double& v : layer.bias) {
            if (!(in >> v)) throw Error(ErrorCode::io, "checkpoint: truncated bias");
        }
        layers.push_back(std::move(layer));
    }
    return Mlp(std::move(layers));
}

void save_checkpoint(const Mlp& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io, "cannot write checkpoint " + path);
    save_checkpoint(net, out);
}

Mlp load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io, "cannot read checkpoint " + path);
    return load_checkpoint(in);
}

// ---------------------------------------------------------------------------
// Optimizer

OptimizerState::OptimizerState(OptimizerKind kind, const Mlp& net, double learning_rate,
                               double beta1, double beta2, double epsilon)
    : kind_(kind),
      learning_rate_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      epsilon_(epsilon) {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw Error(ErrorCode::config, "learning rate must be finite and non-negative");
    }
    if (kind_ == OptimizerKind::adam) {
        first_moment_ = net.zero_gradients();
        second_moment_ = net.zero_gradients();
    }
}

OptimizerState OptimizerState::adam(const Mlp& net, double learning_rate) {
    return OptimizerState(OptimizerKind::adam, net, learning_rate);
}

OptimizerState OptimizerState::sgd(const Mlp& net, double learning_rate) {
    return OptimizerState(OptimizerKind::sgd, net, learning_rate);
}

void OptimizerState::apply(Mlp& net, const Gradients& grads) {
    auto& layers = net.layers();
    if (grads.weights.size() != layers.size()) {
        throw Error(ErrorCode::dimension, "optimizer: gradient layout does not match network");
    }
    ++step_;
    if (kind_ == OptimizerKind::sgd) {
        for (std::size_t k = 0; k < layers.size(); ++k) {
            auto w = layers[k].weights.values();
            auto gw = grads.weights[k].values();
            for (std::size_t i = 0; i < w.size(); ++i) w[i] -= learning_rate_ * gw[i];
            for (std::size_t i = 0; i < layers[k].bias.size(); ++i)
                layers[k].bias[i] -= learning_rate_ * grads.bias[k][i];
        }
        return;
    }
    if (first_moment_.weights.size() != layers.size()) {
        throw Error(ErrorCode::dimension, "optimizer: moment buffers do not match network");
    }
    const double t = static_cast<double>(step_);
    const double c1 = 1.0 - std::pow(beta1_, t);
    const double c2 = 1.0 - std::pow(beta2_, t);
    auto update = [&](double& param, double& m, double& v, double g) {
        m = beta1_ * m + (1.0 - beta1_) * g;
        v = beta2_ * v + (1.0 - beta2_) * g * g;
        param -= learning_rate_ * (m / c1) / (std::sqrt(v / c2) + epsilon_);
    };
    for (std::size_t k = 0; k < layers.size(); ++k) {
        auto w = layers[k].weights.values();
        auto gw = grads.weights[k].values();
        auto mw = first_moment_.weights[k].values();
        auto vw = second_moment_.weights[k].values();
        for (std::size_t i = 0; i < w.size(); ++i) update(w[i], mw[i], vw[i], gw[i]);
        auto& b = layers[k].bias;
        for (std::size_t i = 0; i < b.size(); ++i)
            update(b[i], first_moment_.bias[k][i], second_moment_.bias[k][i], grads.bias[k][i]);
    }
}

// ---------------------------------------------------------------------------
// GAN objectives

namespace {

double clamp_prob(double p) { return std::clamp(p, kClamp, 1.0 - kClamp); }
bool inside_clamp(double p) { return p > kClamp && p < 1.0 - kClamp; }

void check_discriminator(const Mlp& d) {
    if (d.output_dim() != 1 || d.layers().back().activation != Activation::sigmoid) {
        throw Error(ErrorCode::config, "discriminator must end in a single sigmoid unit");
    }
}

// Accumulates the contribution of sum_r coeff * log(D(x_r)) (or log(1 - D)) into
// grads (as a gradient of the loss `sign * objective`), returning sum_r log(.)
double accumulate_log_term(const Mlp& d, const Matrix& x, bool log_one_minus, double coeff,
                           Gradients& grads) {
    ForwardCache cache;
    const Matrix out = d.forward(x, cache);
    Matrix grad_out(out.rows(), 1);
    double sum = 0.0;
    for (std::size_t r = 0; r < out.rows(); ++r) {
        const double p = out(r, 0);
        if (log_one_minus) {
            sum += std::log(1.0 - clamp_prob(p));
            grad_out(r, 0) = inside_clamp(p) ? -coeff / (1.0 - p) : 0.0;
        } else {
            sum += std::log(clamp_prob(p));
            grad_out(r, 0) = inside_clamp(p) ? coeff / p : 0.0;
        }
    }
    d.backward(cache, grad_out, &grads);
    return sum;
}

}  // namespace

ObjectiveGradient discriminator_gradient(const Mlp& d, const Matrix& positives, const Matrix& fakes) {
    check_discriminator(d);
    if (positives.rows() == 0 || fakes.rows() == 0) {
        throw Error(ErrorCode::training, "discriminator step needs non-empty batches");
    }
    const double b = static_cast<double>(fakes.rows());
    ObjectiveGradient result{0.0, d.zero_gradients()};
    // loss = -J, so each log term enters with coefficient -1/b
    const double pos = accumulate_log_term(d, positives, false, -1.0 / b, result.grads);
    const double neg = accumulate_log_term(d, fakes, true, -1.0 / b, result.grads);
    result.objective = (pos + neg) / b;
    return result;
}

ObjectiveGradient generator_gradient(const Mlp& g, const Mlp& d, const Matrix& noise,
                                     GeneratorLoss mode) {
    return generator_gradient(g, std::span<const Mlp>(&d, 1), noise, mode, DiscriminatorMix::mean);
}

ObjectiveGradient generator_gradient(const Mlp& g, std::span<const Mlp> ds, const Matrix& noise,
                                     GeneratorLoss mode, DiscriminatorMix mix) {
    if (ds.empty()) throw Error(ErrorCode::config, "generator step needs a discriminator");
    if (noise.rows() == 0) throw Error(ErrorCode::training, "generator step needs a non-empty batch");
    for (const auto& d : ds) {
        check_discriminator(d);
        if (d.input_dim() != g.output_dim()) {
            throw Error(ErrorCode::dimension, "generator output dim does not match discriminator input");
        }
    }
    const std::size_t b = noise.rows();
    const std::size_t n = ds.size();
    const bool saturating = mode == GeneratorLoss::saturating;

    ForwardCache g_cache;
    const Matrix fakes = g.forward(noise, g_cache);

    std::vector<ForwardCache> d_caches(n);
    std::vector<Matrix> outs;
    outs.reserve(n);
    for (std::size_t k = 0; k < n; ++k) outs.push_back(ds[k].forward(fakes, d_caches[k]));

    // Weight of each (discriminator, sample) pair in the objective.
    std::vector<std::vector<double>> weight(n, std::vector<double>(b, 0.0));
    if (mix == DiscriminatorMix::mean) {
        const double c = 1.0 / static_cast<double>(b * n);
        for (auto& w : weight) std::fill(w.begin(), w.end(), c);
    } else {
        const double c = 1.0 / static_cast<double>(b);
        for (std::size_t r = 0; r < b; ++r) {
            std::size_t best = 0;
            for (std::size_t k = 1; k < n; ++k)
                if (outs[k](r, 0) > outs[best](r, 0)) best = k;
            weight[best][r] = c;
        }
    }

    // Saturating descends J directly; non-saturating descends -J.
    const double sign = saturating ? 1.0 : -1.0;
    double objective = 0.0;
    Matrix grad_fakes(b, g.output_dim());
    for (std::size_t k = 0; k < n; ++k) {
        Matrix grad_out(b, 1);
        bool any = false;
        for (std::size_t r = 0; r < b; ++r) {
            const double w = weight[k][r];
            if (w == 0.0) continue;
            any = true;
            const double p = outs[k](r, 0);
            if (saturating) {
                objective += w * std::log(1.0 - clamp_prob(p));
                grad_out(r, 0) = inside_clamp(p) ? sign * -w / (1.0 - p) : 0.0;
            } else {
                objective += w * std::log(clamp_prob(p));
                grad_out(r, 0) = inside_clamp(p) ? sign * w / p : 0.0;
            }
        }
        if (!any) continue;
        const Matrix gx = ds[k].backward(d_caches[k], grad_out, nullptr);
        auto dst = grad_fakes.values();
        auto src = gx.values();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    }

    ObjectiveGradient result{objective, g.zero_gradients()};
    g.backward(g_cache, grad_fakes, &result.grads);
    return result;
}

namespace {

void checked_apply(Mlp& net, OptimizerState& opt, const ObjectiveGradient& og, const char* what) {
    if (!std::isfinite(og.objective) || !og.grads.all_finite()) {
        std::ostringstream msg;
        msg << what << ": non-finite objective or gradient (objective = " << og.objective << ")";
        throw Error(ErrorCode::training, msg.str());
    }
    opt.apply(net, og.grads);
    if (!net.all_finite()) {
        throw Error(ErrorCode::training, std::string(what) + ": parameters became non-finite");
    }
}

}  // namespace

double discriminator_step(Mlp& d, OptimizerState& opt, const Matrix& positives, const Matrix& fakes) {
    const auto og = discriminator_gradient(d, positives, fakes);
    checked_apply(d, opt, og, "discriminator step");
    return og.objective;
}

double generator_step(Mlp& g, const Mlp& d, OptimizerState& opt, const Matrix& noise,
                      GeneratorLoss mode) {
    const auto og = generator_gradient(g, d, noise, mode);
    checked_apply(g, opt, og, "generator step");
    return og.objective;
}

double generator_step(Mlp& g, std::span<const Mlp> ds, OptimizerState& opt, const Matrix& noise,
                      GeneratorLoss mode, DiscriminatorMix mix) {
    const auto og = generator_gradient(g, ds, noise, mode, mix);
    checked_apply(g, opt, og, "generator step");
    return og.objective;
}

}  // namespace bgan::nn
