#include "rawbyte/nn/layers.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <string>

#include "rawbyte/error.hpp"

namespace rawbyte::nn {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstRowMap = Eigen::Map<const RowMat>;
using RowMap = Eigen::Map<RowMat>;

void require(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorKind::ShapeMismatch, what);
}

}  // namespace

std::string_view to_string(Padding p) noexcept {
    return p == Padding::Same ? "same" : "valid";
}

std::string_view to_string(Head h) noexcept {
    return h == Head::Softmax ? "softmax" : "sigmoid";
}

std::size_t conv_out_len(std::size_t in_len, std::size_t kernel, std::size_t stride,
                         Padding padding) noexcept {
    if (stride == 0 || kernel == 0 || in_len == 0) return 0;
    if (padding == Padding::Same) {
        return (in_len + stride - 1) / stride;
    }
    return in_len < kernel ? 0 : (in_len - kernel) / stride + 1;
}

std::size_t ConvGeometry::out_len() const noexcept {
    return conv_out_len(in_len, kernel, stride, padding);
}

std::size_t ConvGeometry::pad_left() const noexcept {
    if (padding == Padding::Valid) return 0;
    const std::size_t out = out_len();
    if (out == 0) return 0;
    const std::size_t needed = (out - 1) * stride + kernel;
    return needed > in_len ? (needed - in_len) / 2 : 0;
}

void im2col(const ConvGeometry& g, std::span<const double> input, std::span<double> patches) {
    const std::size_t out = g.out_len();
    const std::size_t pad = g.pad_left();
    const std::size_t cols = g.patch_size();
    for (std::size_t o = 0; o < out; ++o) {
        double* row = patches.data() + o * cols;
        // Input index of tap k is start + k, possibly negative under padding.
        const std::ptrdiff_t start =
            static_cast<std::ptrdiff_t>(o * g.stride) - static_cast<std::ptrdiff_t>(pad);
        const std::size_t k_lo = start < 0 ? static_cast<std::size_t>(-start) : 0;
        const std::ptrdiff_t avail = static_cast<std::ptrdiff_t>(g.in_len) - start;
        const std::size_t k_hi =
            avail <= 0 ? 0 : std::min(g.kernel, static_cast<std::size_t>(avail));
        for (std::size_t c = 0; c < g.in_channels; ++c) {
            double* dst = row + c * g.kernel;
            const double* src = input.data() + c * g.in_len;
            for (std::size_t k = 0; k < g.kernel; ++k) {
                dst[k] = (k >= k_lo && k < k_hi) ? src[start + static_cast<std::ptrdiff_t>(k)] : 0.0;
            }
        }
    }
}

void conv1d_preact_patches(const ConvGeometry& g, std::span<const double> patches,
                           std::span<const double> weights, std::span<const double> bias,
                           std::span<double> out) {
    const auto out_len = static_cast<Eigen::Index>(g.out_len());
    const auto f = static_cast<Eigen::Index>(g.filters);
    const auto cols = static_cast<Eigen::Index>(g.patch_size());
    ConstRowMap w(weights.data(), f, cols);
    ConstRowMap p(patches.data(), out_len, cols);
    RowMap o(out.data(), f, out_len);
    o.noalias() = w * p.transpose();
    o.colwise() += Eigen::Map<const Eigen::VectorXd>(bias.data(), f);
}

void conv1d_backward_patches(const ConvGeometry& g, std::span<const double> patches,
                             std::span<const double> weights, std::span<const double> grad_out,
                             std::span<double> grad_weights, std::span<double> grad_bias,
                             std::span<double> grad_input) {
    const auto out_len = static_cast<Eigen::Index>(g.out_len());
    const auto f = static_cast<Eigen::Index>(g.filters);
    const auto cols = static_cast<Eigen::Index>(g.patch_size());
    ConstRowMap p(patches.data(), out_len, cols);
    ConstRowMap dz(grad_out.data(), f, out_len);
    RowMap dw(grad_weights.data(), f, cols);
    dw.noalias() += dz * p;
    Eigen::Map<Eigen::VectorXd>(grad_bias.data(), f) += dz.rowwise().sum();

    if (grad_input.empty()) return;
    ConstRowMap w(weights.data(), f, cols);
    const RowMat dp = dz.transpose() * w;  // out_len x cols
    std::fill(grad_input.begin(), grad_input.end(), 0.0);
    const std::size_t pad = g.pad_left();
    for (std::size_t o = 0; o < g.out_len(); ++o) {
        const std::ptrdiff_t start =
            static_cast<std::ptrdiff_t>(o * g.stride) - static_cast<std::ptrdiff_t>(pad);
        for (std::size_t c = 0; c < g.in_channels; ++c) {
            double* dst = grad_input.data() + c * g.in_len;
            for (std::size_t k = 0; k < g.kernel; ++k) {
                const std::ptrdiff_t idx = start + static_cast<std::ptrdiff_t>(k);
                if (idx >= 0 && idx < static_cast<std::ptrdiff_t>(g.in_len)) {
                    dst[idx] += dp(static_cast<Eigen::Index>(o),
                                   static_cast<Eigen::Index>(c * g.kernel + k));
                }
            }
        }
    }
}

Signal conv1d_preact(const Signal& input, std::span<const double> weights,
                     std::span<const double> bias, std::size_t filters, std::size_t kernel,
                     std::size_t stride, Padding padding) {
    ConvGeometry g{input.channels, input.length, filters, kernel, stride, padding};
    require(input.data.size() == input.channels * input.length, "conv1d: input buffer size");
    require(weights.size() == g.weight_count(),
            "conv1d: expected " + std::to_string(g.weight_count()) + " weights, got " +
                std::to_string(weights.size()));
    require(bias.empty() || bias.size() == filters, "conv1d: bias size");
    require(g.out_len() > 0, "conv1d: kernel longer than input");

    std::vector<double> patches(g.out_len() * g.patch_size());
    im2col(g, input.data, patches);
    const std::vector<double> zero_bias(filters, 0.0);
    Signal out(filters, g.out_len());
    conv1d_preact_patches(g, patches, weights, bias.empty() ? zero_bias : bias, out.data);
    return out;
}

Signal conv1d_forward(const Signal& input, std::span<const double> weights,
                      std::span<const double> bias, std::size_t filters, std::size_t kernel,
                      std::size_t stride, Padding padding) {
    Signal out = conv1d_preact(input, weights, bias, filters, kernel, stride, padding);
    relu_inplace(out.data);
    return out;
}

void relu_inplace(std::span<double> v) noexcept {
    for (auto& x : v) x = x > 0.0 ? x : 0.0;
}

std::size_t pool_out_len(std::size_t in_len, std::size_t pool) noexcept {
    return pool == 0 ? 0 : (in_len + pool - 1) / pool;
}

void maxpool_forward(std::size_t channels, std::size_t in_len, std::size_t pool,
                     std::span<const double> input, std::span<double> out,
                     std::span<std::size_t> argmax) {
    const std::size_t out_len = pool_out_len(in_len, pool);
    for (std::size_t c = 0; c < channels; ++c) {
        const double* src = input.data() + c * in_len;
        for (std::size_t o = 0; o < out_len; ++o) {
            const std::size_t lo = o * pool;
            const std::size_t hi = std::min(lo + pool, in_len);
            std::size_t best = lo;
            for (std::size_t i = lo + 1; i < hi; ++i) {
                if (src[i] > src[best]) best = i;
            }
            out[c * out_len + o] = src[best];
            argmax[c * out_len + o] = c * in_len + best;
        }
    }
}

Pooled maxpool_forward(const Signal& input, std::size_t pool) {
    require(pool > 0 && input.length > 0, "maxpool: empty input or zero window");
    Pooled r;
    r.output = Signal(input.channels, pool_out_len(input.length, pool));
    r.argmax.resize(r.output.data.size());
    maxpool_forward(input.channels, input.length, pool, input.data, r.output.data, r.argmax);
    return r;
}

void maxpool_backward(std::span<const std::size_t> argmax, std::span<const double> grad_out,
                      std::span<double> grad_in) {
    std::fill(grad_in.begin(), grad_in.end(), 0.0);
    for (std::size_t i = 0; i < argmax.size(); ++i) {
        grad_in[argmax[i]] += grad_out[i];
    }
}

void make_dropout_mask(double rate, std::mt19937_64& rng, std::span<double> mask) {
    if (rate <= 0.0) {
        std::fill(mask.begin(), mask.end(), 1.0);
        return;
    }
    const double keep_scale = 1.0 / (1.0 - rate);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& m : mask) {
        m = u(rng) < rate ? 0.0 : keep_scale;
    }
}

std::vector<double> dropout(std::span<const double> input, double rate, Mode mode,
                            std::mt19937_64& rng, std::vector<double>* mask_out) {
    if (!(rate >= 0.0 && rate < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "dropout rate must lie in [0, 1)");
    }
    std::vector<double> out(input.begin(), input.end());
    std::vector<double> mask(input.size(), 1.0);
    if (mode == Mode::Train) {
        make_dropout_mask(rate, rng, mask);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
    }
    if (mask_out) *mask_out = std::move(mask);
    return out;
}

void dense_forward(std::span<const double> input, std::span<const double> weights,
                   std::span<const double> bias, std::span<double> scores) {
    const auto n_in = static_cast<Eigen::Index>(input.size());
    const auto n_out = static_cast<Eigen::Index>(scores.size());
    ConstRowMap w(weights.data(), n_out, n_in);
    Eigen::Map<Eigen::VectorXd> s(scores.data(), n_out);
    s.noalias() = w * Eigen::Map<const Eigen::VectorXd>(input.data(), n_in);
    s += Eigen::Map<const Eigen::VectorXd>(bias.data(), n_out);
}

std::vector<double> dense_forward(std::span<const double> input, std::span<const double> weights,
                                  std::span<const double> bias) {
    require(!bias.empty() && weights.size() == bias.size() * input.size(),
            "dense: weights must be out x in with out = bias size");
    std::vector<double> scores(bias.size());
    dense_forward(input, weights, bias, scores);
    return scores;
}

void dense_backward(std::span<const double> input, std::span<const double> weights,
                    std::span<const double> grad_scores, std::span<double> grad_weights,
                    std::span<double> grad_bias, std::span<double> grad_input) {
    const auto n_in = static_cast<Eigen::Index>(input.size());
    const auto n_out = static_cast<Eigen::Index>(grad_scores.size());
    Eigen::Map<const Eigen::VectorXd> x(input.data(), n_in);
    Eigen::Map<const Eigen::VectorXd> ds(grad_scores.data(), n_out);
    RowMap(grad_weights.data(), n_out, n_in).noalias() += ds * x.transpose();
    Eigen::Map<Eigen::VectorXd>(grad_bias.data(), n_out) += ds;
    if (!grad_input.empty()) {
        Eigen::Map<Eigen::VectorXd>(grad_input.data(), n_in).noalias() =
            ConstRowMap(weights.data(), n_out, n_in).transpose() * ds;
    }
}

namespace {

double softplus(double x) noexcept {
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double sigmoid(double x) noexcept {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

std::vector<double> activate(std::span<const double> scores, Head head) {
    std::vector<double> p(scores.size());
    if (head == Head::Sigmoid) {
        std::transform(scores.begin(), scores.end(), p.begin(), sigmoid);
        return p;
    }
    const double m = *std::max_element(scores.begin(), scores.end());
    double z = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        p[i] = std::exp(scores[i] - m);
        z += p[i];
    }
    for (auto& v : p) v /= z;
    return p;
}

LossGrad loss_and_grad(std::span<const double> scores, std::size_t label, Head head) {
    if (scores.size() < 2) {
        throw Error(ErrorKind::InvalidArgument, "loss needs at least two classes");
    }
    if (label >= scores.size()) {
        throw Error(ErrorKind::InvalidLabel, "label " + std::to_string(label) + " with only " +
                                                 std::to_string(scores.size()) + " classes");
    }
    LossGrad r;
    r.grad.resize(scores.size());
    if (head == Head::Softmax) {
        const double m = *std::max_element(scores.begin(), scores.end());
        double z = 0.0;
        for (auto s : scores) z += std::exp(s - m);
        const double lse = m + std::log(z);
        r.loss = lse - scores[label];
        for (std::size_t i = 0; i < scores.size(); ++i) {
            r.grad[i] = std::exp(scores[i] - lse) - (i == label ? 1.0 : 0.0);
        }
    } else {
        for (std::size_t i = 0; i < scores.size(); ++i) {
            const double t = i == label ? 1.0 : 0.0;
            r.loss += softplus(scores[i]) - t * scores[i];
            r.grad[i] = sigmoid(scores[i]) - t;
        }
    }
    return r;
}

}  // namespace rawbyte::nn
