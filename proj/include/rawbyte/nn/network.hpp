#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rawbyte/nn/layers.hpp"

namespace rawbyte::nn {

/// Layer stack: conv(K, stride) + ReLU -> max-pool -> conv(K, stride) + ReLU
/// -> dropout -> dense -> head.
struct NetworkConfig {
    std::size_t input_len = 1024;
    std::size_t conv1_filters = 24;
    std::size_t conv2_filters = 32;
    std::size_t kernel = 64;
    std::size_t stride = 3;
    std::size_t pool = 5;
    double dropout_rate = 0.5;
    std::size_t n_classes = 2;
    Head head = Head::Softmax;
    Padding padding = Padding::Same;

    friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

/// Derived tensor sizes for a config.
struct Shapes {
    std::size_t conv1_out = 0;
    std::size_t pool_out = 0;
    std::size_t conv2_out = 0;
    std::size_t flat = 0;

    std::size_t conv1_weights = 0;
    std::size_t conv2_weights = 0;
    std::size_t dense_weights = 0;
    std::size_t total_params = 0;
};

/// Throws InvalidArgument for configs whose layer lengths collapse to zero.
Shapes derive_shapes(const NetworkConfig& cfg);
void validate(const NetworkConfig& cfg);

/// Offsets of each tensor in the flat parameter vector, in declaration order.
struct ParamLayout {
    std::size_t conv1_w = 0, conv1_b = 0;
    std::size_t conv2_w = 0, conv2_b = 0;
    std::size_t dense_w = 0, dense_b = 0;
    std::size_t total = 0;
};

struct Example {
    std::span<const double> input;
    std::size_t label = 0;
};

class Network;

/// Per-sample intermediates retained for backward().
struct SampleCache {
    std::vector<double> patches1;  // im2col of the input
    std::vector<double> act1;      // ReLU(conv1)
    std::vector<std::size_t> argmax;
    std::vector<double> pooled;
    std::vector<double> patches2;
    std::vector<double> act2;      // ReLU(conv2)
    std::vector<double> mask;      // dropout multipliers
    std::vector<double> dropped;   // act2 * mask, the dense input
    std::vector<double> scores;
    LossGrad loss;
};

struct BatchCache {
    const Network* owner = nullptr;
    std::uint64_t param_version = 0;
    std::vector<SampleCache> samples;
    double mean_loss = 0.0;
    std::size_t correct = 0;
};

class Network {
public:
    Network() = default;
    /// Glorot-uniform weights and zero biases drawn from `seed`.
    Network(const NetworkConfig& cfg, std::uint64_t seed);

    const NetworkConfig& config() const noexcept { return cfg_; }
    const Shapes& shapes() const noexcept { return shapes_; }
    const ParamLayout& layout() const noexcept { return layout_; }
    std::size_t param_count() const noexcept { return params_.size(); }

    std::span<const double> params() const noexcept { return params_; }
    /// Mutable access invalidates outstanding forward caches.
    std::span<double> mutable_params() noexcept {
        version_ = next_version();
        return params_;
    }
    std::uint64_t version() const noexcept { return version_; }

    std::mt19937_64& dropout_rng() noexcept { return rng_; }

    /// Runs the batch, caching what backward() needs. Train mode draws fresh
    /// dropout masks from the network's generator, in batch order.
    BatchCache forward(std::span<const Example> batch, Mode mode, unsigned threads = 0);

    /// Eval-mode raw class scores.
    std::vector<double> scores(std::span<const double> input) const;
    /// Eval-mode probabilities; sums to 1 under the softmax head.
    std::vector<double> predict(std::span<const double> input) const;
    std::size_t predict_class(std::span<const double> input) const;
    /// Eval-mode scores for many inputs, spread over `threads`.
    std::vector<std::vector<double>> scores_batch(std::span<const std::span<const double>> inputs,
                                                  unsigned threads = 0) const;

private:
    // Versions are unique process-wide, so equal versions imply equal parameters
    // even across copies.
    static std::uint64_t next_version() noexcept;
    void forward_sample(std::span<const double> input, SampleCache& c) const;

    NetworkConfig cfg_;
    Shapes shapes_;
    ParamLayout layout_;
    std::vector<double> params_;
    std::mt19937_64 rng_;
    std::uint64_t version_ = 0;
};

/// Mean gradient over the batch, laid out like Network::params().
/// Throws StaleCache if the cache is not from `net` at its current parameters.
std::vector<double> backward(const Network& net, const BatchCache& cache, unsigned threads = 0);

/// Same, with caller-supplied score gradients (one vector per sample).
std::vector<double> backward(const Network& net, const BatchCache& cache,
                             std::span<const std::vector<double>> score_grads,
                             unsigned threads = 0);

unsigned default_threads() noexcept;

}  // namespace rawbyte::nn
