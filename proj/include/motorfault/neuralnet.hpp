#pragma once

#include "motorfault/dataset.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace motorfault {

struct NetworkConfig {
    int input_dim = kInputDim;
    std::vector<int> hidden_layers = {10};
    int output_dim = kNumClasses;
    double learning_rate = 0.1;
    int max_epochs = 2000;
    double target_loss = 1e-3;
    std::uint64_t seed = 0;
    bool shuffle_each_epoch = true;
};

// Contract for configs used to build or train a network: positive dims and
// learning rate, max_epochs >= 1, target_loss >= 0, at least one hidden
// layer, every hidden width >= 1. Throws UsageError.
void validate(const NetworkConfig& config);

struct Layer {
    Matrix weights;  // out x in
    Vector bias;     // out
};

// Immutable after training or loading; safe for concurrent forward passes.
struct Network {
    NetworkConfig config;
    std::vector<Layer> layers;
};

struct TrainReport {
    int epochs_run = 0;
    double final_loss = 0.0;
    std::vector<double> loss_history;  // one mean loss per epoch
    bool stopped_early = false;
};

struct TrainingSample {
    Vector input;
    Vector target;
};
using TrainingSet = std::vector<TrainingSample>;

// Logistic function, evaluated without overflow for any finite x. The result
// is clamped into [DBL_MIN, 1 - 2^-53] so it stays strictly inside (0,1)
// even where the exact value would round to 0.0 or 1.0.
double sigmoid(double x);

// Activations of every layer in order; back() is the network output. Each
// entry lies strictly in (0,1). Throws DimensionError naming the layer on a
// shape mismatch.
std::vector<Vector> forward(const Network& net, const Vector& input);

// Mean of squared componentwise differences. Throws DimensionError on length
// mismatch.
double loss_mse(const Vector& output, const Vector& target);

struct Gradients {
    std::vector<Matrix> weights;
    std::vector<Vector> biases;
};

// Exact gradients of loss_mse(forward(net, input).back(), target) with
// respect to every weight and bias.
Gradients backprop_gradients(const Network& net, const Vector& input,
                             const Vector& target);

// Weights uniform on [-r, r] with r = sqrt(6 / (fan_in + fan_out)) per layer,
// biases zero, drawn from Rng(config.seed) row by row. Same config gives a
// bit-identical network.
Network init_weights(const NetworkConfig& config);

// Per-sample stochastic gradient descent: one update after every sample, one
// pass per epoch, optional reshuffle each epoch from a seed derived from
// config.seed. Stops when the epoch mean loss reaches config.target_loss or
// after max_epochs. Throws UsageError on empty data, DimensionError on shape
// mismatch, DivergenceError naming the epoch when the mean loss goes
// non-finite.
std::pair<Network, TrainReport> train(const NetworkConfig& config,
                                      const TrainingSet& data);
std::pair<Network, TrainReport> train(const NetworkConfig& config,
                                      const Dataset& data);

// Dataset rows as (input vector, one-hot target) pairs.
TrainingSet to_training_set(const Dataset& data);

// Versioned text serialization. Numbers are written as shortest round-trip
// decimals, so save -> load -> forward reproduces the original outputs bit
// for bit. The grammar is documented in the README; nothing else parses it.
std::string save_model(const Network& net);
void save_model(std::ostream& out, const Network& net);

// Throws ParseError with a 1-based line number on malformed or truncated
// input or an unsupported schema version.
Network load_model(std::string_view text);
Network load_model(std::istream& in);

// File variants; throw IoError when the file cannot be opened or written.
void save_model_file(const std::string& path, const Network& net);
Network load_model_file(const std::string& path);

}  // namespace motorfault
