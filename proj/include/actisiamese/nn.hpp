#ifndef ACTISIAMESE_NN_HPP
#define ACTISIAMESE_NN_HPP

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "actisiamese/common.hpp"

namespace actisiamese::nn {

enum class OutputKind {
    softmax,    ///< dense layer to K units with softmax
    sigmoid,    ///< dense layer to one unit with logistic sigmoid
    embedding,  ///< no output layer; the last hidden activation is the output
};

enum class LossKind { binary_cross_entropy, categorical_cross_entropy };

/// Predictions are clamped to [kProbabilityEpsilon, 1 - kProbabilityEpsilon] before taking logs.
inline constexpr double kProbabilityEpsilon = 1e-7;

struct NetworkSpec {
    int input_dim = 0;
    std::vector<int> hidden_dims;
    double slope = 0.01;  // leaky-ReLU negative slope
    OutputKind output = OutputKind::softmax;
    int num_classes = 2;  // softmax width; ignored otherwise
    double learning_rate = 0.01;
    std::uint64_t seed = 0;

    /// Throws ConfigError when the spec cannot describe a network.
    void validate() const;
    int output_dim() const;
};

struct DenseLayer {
    Matrix weights;  // fan_in x fan_out
    Vector bias;     // fan_out
};

/// Per-parameter gradient with the same layout as DenseNetwork::layers().
struct Gradient {
    std::vector<DenseLayer> layers;

    bool all_finite() const;
    double squared_norm() const;
};

/// Adam moments for one dense layer.
struct LayerMoments {
    Matrix m_weights, v_weights;
    Vector m_bias, v_bias;

    static LayerMoments zeros_like(const DenseLayer& layer);
};

/// Adam with bias correction. Constants follow the optimizer's published defaults.
struct AdamConfig {
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Applies one Adam update to a single layer; `step` is the 1-based step index.
void adam_update(DenseLayer& layer, LayerMoments& moments, const DenseLayer& grad,
                 const AdamConfig& config, long step);

/// Cached values from a forward pass. inputs[l] feeds layer l; pre[l] is its pre-activation.
struct Activations {
    std::vector<Matrix> inputs;
    std::vector<Matrix> pre;
    Matrix output;
};

double leaky_relu(double z, double slope);
double sigmoid(double z);
Matrix softmax_rows(const Matrix& logits);

/// Mean cross-entropy over the rows of a batch.
double loss(LossKind kind, const Matrix& predictions, const Matrix& targets);

class DenseNetwork {
public:
    /// He-normal weights (sd = sqrt(2 / fan_in)), zero biases, zeroed optimizer state.
    explicit DenseNetwork(const NetworkSpec& spec);

    const NetworkSpec& spec() const { return spec_; }
    std::span<const DenseLayer> layers() const { return layers_; }
    std::span<DenseLayer> mutable_layers() { return layers_; }
    std::span<const LayerMoments> moments() const { return moments_; }
    long step_count() const { return step_; }

    Activations forward(const Matrix& batch) const;
    Matrix predict(const Matrix& batch) const { return forward(batch).output; }

    /// Exact gradient of the mean loss; requires a softmax or sigmoid output.
    Gradient backward(const Activations& acts, const Matrix& targets, LossKind kind) const;

    /// Back-propagates a caller-supplied dLoss/dOutput (already including any batch averaging).
    Gradient backward_from_output(const Activations& acts, const Matrix& output_grad) const;

    /// Throws NumericError, leaving the network untouched, if the gradient is not finite.
    void adam_step(const Gradient& grad);

    /// One shuffled pass in mini-batches; returns the row-weighted mean of pre-update batch costs.
    double train_epoch(const Matrix& inputs, const Matrix& targets, LossKind kind,
                       int minibatch_size, std::mt19937_64& rng);
    double train_epoch(const Matrix& inputs, const Matrix& targets, LossKind kind,
                       int minibatch_size, std::uint64_t shuffle_seed);

    bool all_finite() const;

    /// Text dump of every parameter, prefixed by a format version line.
    void write_snapshot(std::ostream& out) const;

private:
    Gradient backward_delta(const Activations& acts, Matrix delta) const;

    NetworkSpec spec_;
    std::vector<DenseLayer> layers_;
    std::vector<LayerMoments> moments_;
    AdamConfig adam_;
    long step_ = 0;
};

/// He-normal draw used for every dense layer in this library.
DenseLayer he_normal_layer(int fan_in, int fan_out, std::mt19937_64& rng);

/// Rows of `source` selected by `rows`, in order.
Matrix gather_rows(const Matrix& source, std::span<const std::size_t> rows);

} // namespace actisiamese::nn

#endif // ACTISIAMESE_NN_HPP
