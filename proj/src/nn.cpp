#include "actisiamese/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace actisiamese::nn {

void NetworkSpec::validate() const {
    if (input_dim <= 0) {
        throw ConfigError("network input_dim must be positive");
    }
    if (hidden_dims.empty()) {
        throw ConfigError("network needs at least one hidden layer");
    }
    for (int width : hidden_dims) {
        if (width <= 0) {
            throw ConfigError("hidden layer widths must be positive");
        }
    }
    if (!(slope > 0.0 && slope < 1.0)) {
        throw ConfigError("leaky-ReLU slope must lie in (0, 1)");
    }
    if (output == OutputKind::softmax && num_classes < 2) {
        throw ConfigError("softmax output needs at least two classes");
    }
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("learning rate must be positive");
    }
}

int NetworkSpec::output_dim() const {
    switch (output) {
    case OutputKind::softmax:
        return num_classes;
    case OutputKind::sigmoid:
        return 1;
    case OutputKind::embedding:
        return hidden_dims.back();
    }
    return 0;
}

bool Gradient::all_finite() const {
    return std::all_of(layers.begin(), layers.end(), [](const DenseLayer& l) {
        return l.weights.allFinite() && l.bias.allFinite();
    });
}

double Gradient::squared_norm() const {
    double total = 0.0;
    for (const auto& l : layers) {
        total += l.weights.squaredNorm() + l.bias.squaredNorm();
    }
    return total;
}

LayerMoments LayerMoments::zeros_like(const DenseLayer& layer) {
    return LayerMoments{Matrix::Zero(layer.weights.rows(), layer.weights.cols()),
                        Matrix::Zero(layer.weights.rows(), layer.weights.cols()),
                        Vector::Zero(layer.bias.size()), Vector::Zero(layer.bias.size())};
}

namespace {

template <typename Param>
void adam_block(Param& param, Param& m, Param& v, const Param& g, const AdamConfig& c,
                double correction1, double correction2) {
    m = c.beta1 * m + (1.0 - c.beta1) * g;
    v = c.beta2 * v + (1.0 - c.beta2) * g.cwiseProduct(g);
    param.array() -= c.learning_rate * (m.array() / correction1) /
                     ((v.array() / correction2).sqrt() + c.epsilon);
}

} // namespace

void adam_update(DenseLayer& layer, LayerMoments& moments, const DenseLayer& grad,
                 const AdamConfig& config, long step) {
    const double correction1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
    const double correction2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
    adam_block(layer.weights, moments.m_weights, moments.v_weights, grad.weights, config,
               correction1, correction2);
    adam_block(layer.bias, moments.m_bias, moments.v_bias, grad.bias, config, correction1,
               correction2);
}

double leaky_relu(double z, double slope) { return z >= 0.0 ? z : slope * z; }

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

Matrix softmax_rows(const Matrix& logits) {
    Matrix out(logits.rows(), logits.cols());
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        const double peak = logits.row(r).maxCoeff();
        out.row(r) = (logits.row(r).array() - peak).exp();
        out.row(r) /= out.row(r).sum();
    }
    return out;
}

double loss(LossKind kind, const Matrix& predictions, const Matrix& targets) {
    if (predictions.rows() != targets.rows() || predictions.cols() != targets.cols()) {
        throw ShapeError("loss: predictions and targets differ in shape");
    }
    if (predictions.rows() == 0) {
        throw ShapeError("loss: empty batch");
    }
    const Eigen::ArrayXXd p =
        predictions.array().max(kProbabilityEpsilon).min(1.0 - kProbabilityEpsilon);
    const Eigen::ArrayXXd y = targets.array();
    double total = 0.0;
    if (kind == LossKind::binary_cross_entropy) {
        total = -(y * p.log() + (1.0 - y) * (1.0 - p).log()).sum();
    } else {
        total = -(y * p.log()).sum();
    }
    return total / static_cast<double>(predictions.rows());
}

DenseLayer he_normal_layer(int fan_in, int fan_out, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / fan_in));
    DenseLayer layer{Matrix(fan_in, fan_out), Vector::Zero(fan_out)};
    for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
        for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
            layer.weights(r, c) = normal(rng);
        }
    }
    return layer;
}

Matrix gather_rows(const Matrix& source, std::span<const std::size_t> rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), source.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = source.row(static_cast<Eigen::Index>(rows[i]));
    }
    return out;
}

DenseNetwork::DenseNetwork(const NetworkSpec& spec) : spec_(spec) {
    spec_.validate();
    adam_.learning_rate = spec_.learning_rate;
    std::mt19937_64 rng(spec_.seed);

    int fan_in = spec_.input_dim;
    for (int width : spec_.hidden_dims) {
        layers_.push_back(he_normal_layer(fan_in, width, rng));
        fan_in = width;
    }
    if (spec_.output != OutputKind::embedding) {
        layers_.push_back(he_normal_layer(fan_in, spec_.output_dim(), rng));
    }
    for (const auto& l : layers_) {
        moments_.push_back(LayerMoments::zeros_like(l));
    }
}

Activations DenseNetwork::forward(const Matrix& batch) const {
    if (batch.cols() != spec_.input_dim) {
        throw ShapeError("forward: batch has " + std::to_string(batch.cols()) +
                         " columns, network expects " + std::to_string(spec_.input_dim));
    }
    Activations acts;
    acts.inputs.reserve(layers_.size());
    acts.pre.reserve(layers_.size());

    Matrix current = batch;
    const std::size_t hidden_count = spec_.hidden_dims.size();
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        Matrix z = current * layers_[l].weights;
        z.rowwise() += layers_[l].bias.transpose();
        acts.inputs.push_back(std::move(current));
        if (l < hidden_count) {
            const double slope = spec_.slope;
            current = z.unaryExpr([slope](double v) { return leaky_relu(v, slope); });
        } else if (spec_.output == OutputKind::softmax) {
            current = softmax_rows(z);
        } else {
            current = z.unaryExpr([](double v) { return sigmoid(v); });
        }
        acts.pre.push_back(std::move(z));
    }
    acts.output = std::move(current);
    return acts;
}

Gradient DenseNetwork::backward(const Activations& acts, const Matrix& targets,
                                LossKind kind) const {
    if (spec_.output == OutputKind::embedding) {
        throw PreconditionError("backward with a loss needs a softmax or sigmoid output");
    }
    if (targets.rows() != acts.output.rows() || targets.cols() != acts.output.cols()) {
        throw ShapeError("backward: targets do not match the network output");
    }
    // Softmax + categorical CE and sigmoid + binary CE share the same output delta.
    (void)kind;
    Matrix delta = (acts.output - targets) / static_cast<double>(targets.rows());
    return backward_delta(acts, std::move(delta));
}

Gradient DenseNetwork::backward_from_output(const Activations& acts,
                                            const Matrix& output_grad) const {
    if (output_grad.rows() != acts.output.rows() || output_grad.cols() != acts.output.cols()) {
        throw ShapeError("backward: output gradient does not match the network output");
    }
    if (spec_.output != OutputKind::embedding) {
        throw PreconditionError("backward_from_output is defined for embedding outputs only");
    }
    const double slope = spec_.slope;
    const Matrix& z = acts.pre.back();
    Matrix delta = output_grad.binaryExpr(
        z, [slope](double g, double zv) { return zv >= 0.0 ? g : slope * g; });
    return backward_delta(acts, std::move(delta));
}

// `delta` is dLoss/dPre for the last layer.
Gradient DenseNetwork::backward_delta(const Activations& acts, Matrix delta) const {
    if (acts.inputs.size() != layers_.size()) {
        throw ShapeError("backward: activations come from a different network");
    }
    Gradient grad;
    grad.layers.resize(layers_.size());
    const double slope = spec_.slope;
    for (std::size_t i = layers_.size(); i-- > 0;) {
        grad.layers[i].weights = acts.inputs[i].transpose() * delta;
        grad.layers[i].bias = delta.colwise().sum().transpose();
        if (i == 0) {
            break;
        }
        Matrix upstream = delta * layers_[i].weights.transpose();
        delta = upstream.binaryExpr(acts.pre[i - 1], [slope](double g, double zv) {
            return zv >= 0.0 ? g : slope * g;
        });
    }
    return grad;
}

void DenseNetwork::adam_step(const Gradient& grad) {
    if (grad.layers.size() != layers_.size()) {
        throw ShapeError("adam_step: gradient layer count mismatch");
    }
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        if (grad.layers[i].weights.rows() != layers_[i].weights.rows() ||
            grad.layers[i].weights.cols() != layers_[i].weights.cols() ||
            grad.layers[i].bias.size() != layers_[i].bias.size()) {
            throw ShapeError("adam_step: gradient shape mismatch at layer " + std::to_string(i));
        }
    }
    if (!grad.all_finite()) {
        throw NumericError("adam_step: non-finite gradient");
    }
    ++step_;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        adam_update(layers_[i], moments_[i], grad.layers[i], adam_, step_);
    }
}

double DenseNetwork::train_epoch(const Matrix& inputs, const Matrix& targets, LossKind kind,
                                 int minibatch_size, std::mt19937_64& rng) {
    if (inputs.rows() == 0) {
        throw PreconditionError("train_epoch: empty training set");
    }
    if (inputs.rows() != targets.rows()) {
        throw ShapeError("train_epoch: inputs and targets differ in row count");
    }
    if (minibatch_size <= 0) {
        throw ConfigError("train_epoch: mini-batch size must be positive");
    }
    std::vector<std::size_t> order(static_cast<std::size_t>(inputs.rows()));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    double weighted_cost = 0.0;
    const auto batch = static_cast<std::size_t>(minibatch_size);
    for (std::size_t start = 0; start < order.size(); start += batch) {
        const std::size_t count = std::min(batch, order.size() - start);
        const std::span<const std::size_t> rows(order.data() + start, count);
        const Matrix x = gather_rows(inputs, rows);
        const Matrix y = gather_rows(targets, rows);
        const Activations acts = forward(x);
        weighted_cost += loss(kind, acts.output, y) * static_cast<double>(count);
        adam_step(backward(acts, y, kind));
    }
    return weighted_cost / static_cast<double>(order.size());
}

double DenseNetwork::train_epoch(const Matrix& inputs, const Matrix& targets, LossKind kind,
                                 int minibatch_size, std::uint64_t shuffle_seed) {
    std::mt19937_64 rng(shuffle_seed);
    return train_epoch(inputs, targets, kind, minibatch_size, rng);
}

bool DenseNetwork::all_finite() const {
    return std::all_of(layers_.begin(), layers_.end(), [](const DenseLayer& l) {
        return l.weights.allFinite() && l.bias.allFinite();
    });
}

void DenseNetwork::write_snapshot(std::ostream& out) const {
    const auto old_precision = out.precision(17);
    out << "dense-network-snapshot v1\n";
    out << "layers " << layers_.size() << " step " << step_ << '\n';
    for (const auto& l : layers_) {
        out << "weights " << l.weights.rows() << ' ' << l.weights.cols() << '\n';
        for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
            for (Eigen::Index c = 0; c < l.weights.cols(); ++c) {
                out << (c ? " " : "") << l.weights(r, c);
            }
            out << '\n';
        }
        out << "bias " << l.bias.size() << '\n';
        for (Eigen::Index c = 0; c < l.bias.size(); ++c) {
            out << (c ? " " : "") << l.bias(c);
        }
        out << '\n';
    }
    out.precision(old_precision);
}

} // namespace actisiamese::nn
