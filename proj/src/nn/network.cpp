#include "rawbyte/nn/network.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <string>
#include <thread>

#include "rawbyte/error.hpp"

namespace rawbyte::nn {

namespace {

// Runs fn(i) for i in [0, n). Work is split into contiguous chunks; results
// must be written to per-index slots so the outcome is scheduling-independent.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = default_threads();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

ConvGeometry conv1_geometry(const NetworkConfig& c) {
    return {1, c.input_len, c.conv1_filters, c.kernel, c.stride, c.padding};
}

ConvGeometry conv2_geometry(const NetworkConfig& c, const Shapes& s) {
    return {c.conv1_filters, s.pool_out, c.conv2_filters, c.kernel, c.stride, c.padding};
}

std::size_t argmax_of(std::span<const double> v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

unsigned default_threads() noexcept {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

Shapes derive_shapes(const NetworkConfig& cfg) {
    Shapes s;
    s.conv1_out = conv_out_len(cfg.input_len, cfg.kernel, cfg.stride, cfg.padding);
    s.pool_out = pool_out_len(s.conv1_out, cfg.pool);
    s.conv2_out = conv_out_len(s.pool_out, cfg.kernel, cfg.stride, cfg.padding);
    s.flat = s.conv2_out * cfg.conv2_filters;
    s.conv1_weights = cfg.conv1_filters * cfg.kernel;
    s.conv2_weights = cfg.conv2_filters * cfg.conv1_filters * cfg.kernel;
    s.dense_weights = cfg.n_classes * s.flat;
    s.total_params = s.conv1_weights + cfg.conv1_filters + s.conv2_weights + cfg.conv2_filters +
                     s.dense_weights + cfg.n_classes;
    return s;
}

void validate(const NetworkConfig& cfg) {
    auto fail = [](const std::string& why) { throw Error(ErrorKind::InvalidArgument, why); };
    if (cfg.input_len == 0) fail("input length must be positive");
    if (cfg.conv1_filters == 0 || cfg.conv2_filters == 0) fail("filter counts must be positive");
    if (cfg.kernel == 0 || cfg.stride == 0 || cfg.pool == 0) {
        fail("kernel, stride and pool must be positive");
    }
    if (!(cfg.dropout_rate >= 0.0 && cfg.dropout_rate < 1.0)) fail("dropout rate must lie in [0, 1)");
    if (cfg.n_classes < 2) fail("need at least two classes");
    const Shapes s = derive_shapes(cfg);
    if (s.conv1_out == 0 || s.pool_out == 0 || s.conv2_out == 0) {
        fail("layer lengths collapse to zero: conv1=" + std::to_string(s.conv1_out) +
             " pool=" + std::to_string(s.pool_out) + " conv2=" + std::to_string(s.conv2_out));
    }
}

std::uint64_t Network::next_version() noexcept {
    static std::atomic<std::uint64_t> counter{0};
    return ++counter;
}

Network::Network(const NetworkConfig& cfg, std::uint64_t seed) : cfg_(cfg), rng_(seed) {
    validate(cfg_);
    version_ = next_version();
    shapes_ = derive_shapes(cfg_);

    layout_.conv1_w = 0;
    layout_.conv1_b = layout_.conv1_w + shapes_.conv1_weights;
    layout_.conv2_w = layout_.conv1_b + cfg_.conv1_filters;
    layout_.conv2_b = layout_.conv2_w + shapes_.conv2_weights;
    layout_.dense_w = layout_.conv2_b + cfg_.conv2_filters;
    layout_.dense_b = layout_.dense_w + shapes_.dense_weights;
    layout_.total = layout_.dense_b + cfg_.n_classes;
    params_.assign(layout_.total, 0.0);

    auto glorot = [&](std::size_t off, std::size_t count, double fan_in, double fan_out) {
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> u(-limit, limit);
        for (std::size_t i = 0; i < count; ++i) params_[off + i] = u(rng_);
    };
    const double k = static_cast<double>(cfg_.kernel);
    glorot(layout_.conv1_w, shapes_.conv1_weights, k, k * cfg_.conv1_filters);
    glorot(layout_.conv2_w, shapes_.conv2_weights, k * cfg_.conv1_filters, k * cfg_.conv2_filters);
    glorot(layout_.dense_w, shapes_.dense_weights, static_cast<double>(shapes_.flat),
           static_cast<double>(cfg_.n_classes));
}

void Network::forward_sample(std::span<const double> input, SampleCache& c) const {
    if (input.size() != cfg_.input_len) {
        throw Error(ErrorKind::ShapeMismatch, "input has " + std::to_string(input.size()) +
                                                  " values, network expects " +
                                                  std::to_string(cfg_.input_len));
    }
    const auto p = std::span<const double>(params_);
    const ConvGeometry g1 = conv1_geometry(cfg_);
    const ConvGeometry g2 = conv2_geometry(cfg_, shapes_);

    c.patches1.resize(g1.out_len() * g1.patch_size());
    im2col(g1, input, c.patches1);
    c.act1.resize(cfg_.conv1_filters * shapes_.conv1_out);
    conv1d_preact_patches(g1, c.patches1, p.subspan(layout_.conv1_w, shapes_.conv1_weights),
                          p.subspan(layout_.conv1_b, cfg_.conv1_filters), c.act1);
    relu_inplace(c.act1);

    c.pooled.resize(cfg_.conv1_filters * shapes_.pool_out);
    c.argmax.resize(c.pooled.size());
    maxpool_forward(cfg_.conv1_filters, shapes_.conv1_out, cfg_.pool, c.act1, c.pooled, c.argmax);

    c.patches2.resize(g2.out_len() * g2.patch_size());
    im2col(g2, c.pooled, c.patches2);
    c.act2.resize(shapes_.flat);
    conv1d_preact_patches(g2, c.patches2, p.subspan(layout_.conv2_w, shapes_.conv2_weights),
                          p.subspan(layout_.conv2_b, cfg_.conv2_filters), c.act2);
    relu_inplace(c.act2);

    c.dropped.resize(shapes_.flat);
    if (c.mask.size() == shapes_.flat) {
        for (std::size_t i = 0; i < shapes_.flat; ++i) c.dropped[i] = c.act2[i] * c.mask[i];
    } else {
        c.mask.assign(shapes_.flat, 1.0);
        c.dropped = c.act2;
    }

    c.scores.resize(cfg_.n_classes);
    dense_forward(c.dropped, p.subspan(layout_.dense_w, shapes_.dense_weights),
                  p.subspan(layout_.dense_b, cfg_.n_classes), c.scores);
}

BatchCache Network::forward(std::span<const Example> batch, Mode mode, unsigned threads) {
    BatchCache cache;
    cache.owner = this;
    cache.param_version = version_;
    cache.samples.resize(batch.size());
    // Masks are drawn up front, in batch order, so results do not depend on
    // how samples are spread over threads.
    for (auto& c : cache.samples) {
        c.mask.assign(shapes_.flat, 1.0);
        if (mode == Mode::Train) make_dropout_mask(cfg_.dropout_rate, rng_, c.mask);
    }
    parallel_for(batch.size(), threads, [&](std::size_t i) {
        auto& c = cache.samples[i];
        forward_sample(batch[i].input, c);
        c.loss = loss_and_grad(c.scores, batch[i].label, cfg_.head);
    });
    double total = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        total += cache.samples[i].loss.loss;
        if (argmax_of(cache.samples[i].scores) == batch[i].label) ++cache.correct;
    }
    cache.mean_loss = batch.empty() ? 0.0 : total / static_cast<double>(batch.size());
    return cache;
}

std::vector<double> Network::scores(std::span<const double> input) const {
    SampleCache c;
    forward_sample(input, c);
    return c.scores;
}

std::vector<double> Network::predict(std::span<const double> input) const {
    return activate(scores(input), cfg_.head);
}

std::size_t Network::predict_class(std::span<const double> input) const {
    return argmax_of(scores(input));
}

std::vector<std::vector<double>> Network::scores_batch(
    std::span<const std::span<const double>> inputs, unsigned threads) const {
    std::vector<std::vector<double>> out(inputs.size());
    parallel_for(inputs.size(), threads, [&](std::size_t i) { out[i] = scores(inputs[i]); });
    return out;
}

std::vector<double> backward(const Network& net, const BatchCache& cache, unsigned threads) {
    std::vector<std::vector<double>> grads;
    grads.reserve(cache.samples.size());
    for (const auto& c : cache.samples) grads.push_back(c.loss.grad);
    return backward(net, cache, grads, threads);
}

std::vector<double> backward(const Network& net, const BatchCache& cache,
                             std::span<const std::vector<double>> score_grads,
                             unsigned threads) {
    if (cache.owner != &net || cache.param_version != net.version() || cache.samples.empty()) {
        throw Error(ErrorKind::StaleCache,
                    "backward needs a forward pass over the network's current parameters");
    }
    if (score_grads.size() != cache.samples.size()) {
        throw Error(ErrorKind::ShapeMismatch, "one score gradient per cached sample required");
    }
    const auto& cfg = net.config();
    const auto& sh = net.shapes();
    const auto& lay = net.layout();
    const auto p = net.params();
    const ConvGeometry g1 = conv1_geometry(cfg);
    const ConvGeometry g2 = conv2_geometry(cfg, sh);
    const std::size_t n = cache.samples.size();

    std::vector<std::vector<double>> per_sample(n);
    parallel_for(n, threads, [&](std::size_t i) {
        const auto& c = cache.samples[i];
        auto& g = per_sample[i];
        g.assign(lay.total, 0.0);
        auto gs = std::span<double>(g);

        std::vector<double> d_dropped(sh.flat);
        dense_backward(c.dropped, p.subspan(lay.dense_w, sh.dense_weights), score_grads[i],
                       gs.subspan(lay.dense_w, sh.dense_weights),
                       gs.subspan(lay.dense_b, cfg.n_classes), d_dropped);

        std::vector<double> dz2(sh.flat);
        for (std::size_t j = 0; j < sh.flat; ++j) {
            dz2[j] = c.act2[j] > 0.0 ? d_dropped[j] * c.mask[j] : 0.0;
        }
        std::vector<double> d_pooled(c.pooled.size());
        conv1d_backward_patches(g2, c.patches2, p.subspan(lay.conv2_w, sh.conv2_weights), dz2,
                                gs.subspan(lay.conv2_w, sh.conv2_weights),
                                gs.subspan(lay.conv2_b, cfg.conv2_filters), d_pooled);

        std::vector<double> dz1(c.act1.size());
        maxpool_backward(c.argmax, d_pooled, dz1);
        for (std::size_t j = 0; j < dz1.size(); ++j) {
            if (!(c.act1[j] > 0.0)) dz1[j] = 0.0;
        }
        conv1d_backward_patches(g1, c.patches1, p.subspan(lay.conv1_w, sh.conv1_weights), dz1,
                                gs.subspan(lay.conv1_w, sh.conv1_weights),
                                gs.subspan(lay.conv1_b, cfg.conv1_filters), {});
    });

    std::vector<double> total(lay.total, 0.0);
    for (const auto& g : per_sample) {
        for (std::size_t j = 0; j < total.size(); ++j) total[j] += g[j];
    }
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& v : total) v *= inv;
    return total;
}

}  // namespace rawbyte::nn
