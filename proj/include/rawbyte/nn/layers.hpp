#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace rawbyte::nn {

enum class Padding : std::uint8_t { Same, Valid };
enum class Head : std::uint8_t { Softmax, Sigmoid };
enum class Mode : std::uint8_t { Train, Eval };

std::string_view to_string(Padding p) noexcept;
std::string_view to_string(Head h) noexcept;

/// Channels-major activations: element (c, i) lives at data[c * length + i].
struct Signal {
    std::size_t channels = 0;
    std::size_t length = 0;
    std::vector<double> data;

    Signal() = default;
    Signal(std::size_t c, std::size_t l, double fill = 0.0)
        : channels(c), length(l), data(c * l, fill) {}

    double& at(std::size_t c, std::size_t i) { return data[c * length + i]; }
    double at(std::size_t c, std::size_t i) const { return data[c * length + i]; }
};

/**
 * Shape of a strided 1D convolution. Weights are laid out
 * [filters][in_channels][kernel], bias is [filters].
 *
 * Valid padding: out = floor((in - kernel) / stride) + 1.
 * Same padding:  out = ceil(in / stride); the zero padding needed to reach it
 * is split with the smaller half on the left.
 */
struct ConvGeometry {
    std::size_t in_channels = 1;
    std::size_t in_len = 0;
    std::size_t filters = 1;
    std::size_t kernel = 1;
    std::size_t stride = 1;
    Padding padding = Padding::Valid;

    std::size_t out_len() const noexcept;
    std::size_t pad_left() const noexcept;
    std::size_t patch_size() const noexcept { return in_channels * kernel; }
    std::size_t weight_count() const noexcept { return filters * in_channels * kernel; }
};

std::size_t conv_out_len(std::size_t in_len, std::size_t kernel, std::size_t stride,
                         Padding padding) noexcept;

/// Unfold the input into out_len rows of patch_size() values; padded taps are 0.
void im2col(const ConvGeometry& g, std::span<const double> input, std::span<double> patches);

/// Pre-activation cross-correlation plus bias. `patches` must come from im2col.
void conv1d_preact_patches(const ConvGeometry& g, std::span<const double> patches,
                           std::span<const double> weights, std::span<const double> bias,
                           std::span<double> out);

/// Accumulates dW and db from `grad_out` (pre-activation gradient). When
/// `grad_input` is non-empty it is overwritten with dL/dinput.
void conv1d_backward_patches(const ConvGeometry& g, std::span<const double> patches,
                             std::span<const double> weights, std::span<const double> grad_out,
                             std::span<double> grad_weights, std::span<double> grad_bias,
                             std::span<double> grad_input);

Signal conv1d_preact(const Signal& input, std::span<const double> weights,
                     std::span<const double> bias, std::size_t filters, std::size_t kernel,
                     std::size_t stride, Padding padding);

/// conv1d_preact followed by ReLU.
Signal conv1d_forward(const Signal& input, std::span<const double> weights,
                      std::span<const double> bias, std::size_t filters, std::size_t kernel,
                      std::size_t stride, Padding padding);

void relu_inplace(std::span<double> v) noexcept;

struct Pooled {
    Signal output;
    std::vector<std::size_t> argmax;  // flat input index per output element
};

/// Non-overlapping max pooling; a trailing partial window is pooled as-is and
/// ties resolve to the first index.
std::size_t pool_out_len(std::size_t in_len, std::size_t pool) noexcept;
void maxpool_forward(std::size_t channels, std::size_t in_len, std::size_t pool,
                     std::span<const double> input, std::span<double> out,
                     std::span<std::size_t> argmax);
Pooled maxpool_forward(const Signal& input, std::size_t pool);
void maxpool_backward(std::span<const std::size_t> argmax, std::span<const double> grad_out,
                      std::span<double> grad_in);

/// Inverted dropout. In Train mode each element survives with probability
/// 1 - rate and is scaled by 1 / (1 - rate); Eval mode is the identity.
/// `mask` receives the per-element multiplier (0 or the survivor scale).
void make_dropout_mask(double rate, std::mt19937_64& rng, std::span<double> mask);
std::vector<double> dropout(std::span<const double> input, double rate, Mode mode,
                            std::mt19937_64& rng, std::vector<double>* mask_out = nullptr);

/// scores = W x + b with W laid out [out][in].
void dense_forward(std::span<const double> input, std::span<const double> weights,
                   std::span<const double> bias, std::span<double> scores);
std::vector<double> dense_forward(std::span<const double> input, std::span<const double> weights,
                                  std::span<const double> bias);
void dense_backward(std::span<const double> input, std::span<const double> weights,
                    std::span<const double> grad_scores, std::span<double> grad_weights,
                    std::span<double> grad_bias, std::span<double> grad_input);

struct LossGrad {
    double loss = 0.0;
    std::vector<double> grad;
};

/// Softmax head: cross-entropy of the softmax. Sigmoid head: per-class binary
/// cross-entropy against the one-hot target, summed over classes.
LossGrad loss_and_grad(std::span<const double> scores, std::size_t label, Head head);

/// Class probabilities for a score vector (softmax, or per-class sigmoid).
std::vector<double> activate(std::span<const double> scores, Head head);

}  // namespace rawbyte::nn
