#pragma once

// Small dense/convolutional network engine with hand-written backpropagation.
// Tensors are flat, channels-last (height, width, channels) row-major vectors;
// all arithmetic is double precision.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "loraadv/io.hpp"
#include "loraadv/random.hpp"
#include "loraadv/signal.hpp"

namespace loraadv {

enum class Arch { CNN, FNN, Custom };
enum class Activation { None, ReLU, SoftMax };
enum class Mode { Train, Infer };

std::string_view arch_name(Arch arch);
Arch parse_arch(std::string_view text);

struct Shape {
    std::size_t height = 1;
    std::size_t width = 1;
    std::size_t channels = 1;

    std::size_t size() const { return height * width * channels; }
    bool operator==(const Shape&) const = default;
};

inline constexpr Shape kIqInputShape{2, kWindowLength, 1};

/// Stride 1, no padding. Weights are laid out (kernel_h, kernel_w, in_channels, filters).
struct Conv2D {
    std::size_t filters = 0;
    std::size_t kernel_h = 1;
    std::size_t kernel_w = 1;
    Activation activation = Activation::None;
    std::vector<double> weights;
    std::vector<double> bias;
};

struct Flatten {};

/// Weights are laid out (inputs, units).
struct Dense {
    std::size_t inputs = 0;
    std::size_t units = 0;
    Activation activation = Activation::None;
    std::vector<double> weights;
    std::vector<double> bias;
};

/// Inverted dropout: survivors are scaled by 1/(1-rate) in Train mode.
struct Dropout {
    double rate = 0.0;
};

using Layer = std::variant<Conv2D, Flatten, Dense, Dropout>;

class Model {
public:
    /// Checks the shape chain, parameter sizes, and that the network ends in a
    /// 2-unit SoftMax Dense layer (the only place SoftMax may appear).
    static Model from_layers(Shape input, std::vector<Layer> layers, Arch arch = Arch::Custom,
                             std::uint64_t seed = 0);

    Arch arch() const { return arch_; }
    std::uint64_t seed() const { return seed_; }
    const Shape& input_shape() const { return input_; }
    std::size_t input_size() const { return input_.size(); }
    const std::vector<Layer>& layers() const { return layers_; }
    /// Output shape of every layer, in order.
    const std::vector<Shape>& shapes() const { return shapes_; }

    /// Weight then bias tensor of each parameterized layer, in layer order.
    std::vector<std::span<double>> parameters();
    std::vector<std::span<const double>> parameters() const;

private:
    Arch arch_ = Arch::Custom;
    std::uint64_t seed_ = 0;
    Shape input_;
    std::vector<Layer> layers_;
    std::vector<Shape> shapes_;
};

/// Conv/FNN classifiers for 2x32 I/Q input, Glorot-uniform weights, zero biases.
Model build_model(Arch arch, std::uint64_t seed);

std::size_t count_parameters(const Model& model);

using Probabilities = std::array<double, 2>;

/// Class probabilities for one flat input. Train mode requires `rng` for dropout.
Probabilities forward_one(const Model& model, std::span<const double> input, Mode mode = Mode::Infer,
                          Rng* rng = nullptr);
std::vector<Probabilities> forward(const Model& model, std::span<const IqSample> batch, Mode mode,
                                   Rng* rng = nullptr);

/// argmax with ties resolved toward label 0.
int predicted_label(const Probabilities& p);
int predict(const Model& model, const IqSample& x);

/// Categorical cross-entropy of the inference-mode output.
double loss(const Model& model, std::span<const double> input, int label);

/// Gradient tensors matching Model::parameters().
using ParamGradients = std::vector<std::vector<double>>;
ParamGradients zero_gradients(const Model& model);

/// Cross-entropy at (input, label). Accumulates dL/dtheta into `param_grads`
/// and writes dL/dinput into `input_grad` when those are non-null.
double loss_and_gradients(const Model& model, std::span<const double> input, int label, Mode mode, Rng* rng,
                          ParamGradients* param_grads, std::vector<double>* input_grad);

/// Exact dL/dx of the inference-mode cross-entropy (dropout inactive).
std::vector<double> input_gradient(const Model& model, std::span<const double> input, int label);
IqMatrix input_gradient(const Model& model, const IqSample& x, int label);

/// Smallest |z| over all ReLU pre-activations at `input` (inference mode).
double min_relu_preactivation(const Model& model, std::span<const double> input);

struct TrainConfig {
    double learning_rate = 1e-3;
    std::size_t batch_size = 32;
    std::size_t epochs = 50;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    std::uint64_t seed = 0;

    void validate() const;
};

struct TrainResult {
    /// Mean train-mode cross-entropy over each epoch's mini-batches.
    std::vector<double> epoch_loss;
};

/// Mini-batch Adam on mean cross-entropy. Rows of `inputs` are consecutive
/// input_size() blocks; order and dropout masks derive from cfg.seed.
TrainResult train(Model& model, std::span<const double> inputs, std::span<const int> labels, const TrainConfig& cfg);
TrainResult train(Model& model, const LabeledDataset& dataset, const TrainConfig& cfg);

/// Adam with bias-corrected moments over a fixed set of parameter tensors.
class AdamOptimizer {
public:
    AdamOptimizer(const Model& model, const TrainConfig& cfg);
    void step(Model& model, const ParamGradients& grads);
    std::size_t steps() const { return t_; }

private:
    double lr_, beta1_, beta2_, eps_;
    std::size_t t_ = 0;
    ParamGradients m_, v_;
};

Json model_to_json(const Model& model);
Model model_from_json(const Json& doc);

}  // namespace loraadv
