#include "rawbyte/nn/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>

namespace rawbyte::nn {

std::string_view to_string(OptimizerKind k) noexcept {
    return k == OptimizerKind::Adam ? "adam" : "sgd";
}

std::optional<OptimizerKind> parse_optimizer(std::string_view name) noexcept {
    if (name == "adam") return OptimizerKind::Adam;
    if (name == "sgd") return OptimizerKind::Sgd;
    return std::nullopt;
}

Optimizer::Optimizer(OptimizerKind kind, double lr, std::size_t n_params)
    : kind_(kind), lr_(lr) {
    if (kind_ == OptimizerKind::Adam) {
        m_.assign(n_params, 0.0);
        v_.assign(n_params, 0.0);
    }
}

void Optimizer::step(std::span<double> params, std::span<const double> grads) {
    if (kind_ == OptimizerKind::Sgd) {
        for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr_ * grads[i];
        return;
    }
    ++t_;
    const double t = static_cast<double>(t_);
    const double lr_t = lr_ * std::sqrt(1.0 - std::pow(beta2_, t)) / (1.0 - std::pow(beta1_, t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i] * grads[i];
        params[i] -= lr_t * m_[i] / (std::sqrt(v_[i]) + eps_);
    }
}

namespace {

std::vector<std::vector<double>> scaled_inputs(const Dataset& ds) {
    std::vector<std::vector<double>> out(ds.samples.size());
    for (std::size_t i = 0; i < ds.samples.size(); ++i) out[i] = ds.samples[i].values();
    return out;
}

constexpr std::size_t kEvalChunk = 256;

Evaluation evaluate_inputs(const Network& net, const std::vector<std::vector<double>>& inputs,
                           const Dataset& ds, std::span<const std::size_t> indices,
                           unsigned threads) {
    Evaluation ev;
    ev.predictions.reserve(indices.size());
    ev.labels.reserve(indices.size());
    double loss = 0.0;
    std::size_t correct = 0;
    for (std::size_t lo = 0; lo < indices.size(); lo += kEvalChunk) {
        const std::size_t hi = std::min(indices.size(), lo + kEvalChunk);
        std::vector<std::span<const double>> batch;
        batch.reserve(hi - lo);
        for (std::size_t k = lo; k < hi; ++k) batch.emplace_back(inputs[indices[k]]);
        const auto scores = net.scores_batch(batch, threads);
        for (std::size_t k = lo; k < hi; ++k) {
            const auto& s = scores[k - lo];
            const std::size_t label = ds.samples[indices[k]].label;
            const auto pred =
                static_cast<std::size_t>(std::max_element(s.begin(), s.end()) - s.begin());
            ev.predictions.push_back(pred);
            ev.labels.push_back(label);
            loss += loss_and_grad(s, label, net.config().head).loss;
            if (pred == label) ++correct;
        }
    }
    if (!indices.empty()) {
        ev.loss = loss / static_cast<double>(indices.size());
        ev.accuracy = static_cast<double>(correct) / static_cast<double>(indices.size());
    }
    return ev;
}

}  // namespace

Evaluation evaluate(const Network& net, const Dataset& ds, std::span<const std::size_t> indices,
                    unsigned threads) {
    std::vector<std::vector<double>> inputs(ds.samples.size());
    for (auto i : indices) inputs[i] = ds.samples[i].values();
    return evaluate_inputs(net, inputs, ds, indices, threads);
}

TrainResult train(const Dataset& ds, const NetworkConfig& nc, const TrainConfig& tc,
                  const EpochCallback& on_epoch) {
    if (tc.epochs == 0) throw Error(ErrorKind::InvalidArgument, "epochs must be at least 1");
    if (tc.batch_size == 0) throw Error(ErrorKind::InvalidArgument, "batch size must be at least 1");
    if (!(tc.learning_rate > 0.0)) throw Error(ErrorKind::InvalidArgument, "learning rate must be positive");
    if (ds.splits.train.empty() || ds.splits.val.empty()) {
        throw Error(ErrorKind::InvalidArgument, "training needs non-empty train and validation splits");
    }
    if (nc.input_len != ds.sample_len) {
        throw Error(ErrorKind::ShapeMismatch,
                    "network input length " + std::to_string(nc.input_len) +
                        " differs from dataset sample length " + std::to_string(ds.sample_len));
    }
    if (nc.n_classes != ds.classes.size()) {
        throw Error(ErrorKind::ShapeMismatch,
                    "network has " + std::to_string(nc.n_classes) + " outputs, dataset has " +
                        std::to_string(ds.classes.size()) + " classes");
    }

    const auto inputs = scaled_inputs(ds);
    Network net(nc, tc.seed);
    Optimizer opt(tc.optimizer, tc.learning_rate, net.param_count());
    std::mt19937_64 shuffle_rng(tc.seed ^ 0x9e3779b97f4a7c15ULL);

    TrainResult best{net, {}};
    TrainHistory& hist = best.history;
    double best_val = -1.0;
    std::vector<std::size_t> order(ds.splits.train.begin(), ds.splits.train.end());

    for (std::size_t epoch = 1; epoch <= tc.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double loss_sum = 0.0;
        std::size_t correct = 0;
        for (std::size_t lo = 0; lo < order.size(); lo += tc.batch_size) {
            const std::size_t hi = std::min(order.size(), lo + tc.batch_size);
            std::vector<Example> batch;
            batch.reserve(hi - lo);
            for (std::size_t k = lo; k < hi; ++k) {
                batch.push_back({inputs[order[k]], ds.samples[order[k]].label});
            }
            const BatchCache cache = net.forward(batch, Mode::Train, tc.threads);
            if (!std::isfinite(cache.mean_loss)) {
                throw TrainingDiverged("non-finite training loss in epoch " +
                                           std::to_string(epoch),
                                       hist);
            }
            loss_sum += cache.mean_loss * static_cast<double>(batch.size());
            correct += cache.correct;
            const auto grads = backward(net, cache, tc.threads);
            opt.step(net.mutable_params(), grads);
        }

        const Evaluation val = evaluate_inputs(net, inputs, ds, ds.splits.val, tc.threads);
        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_sum / static_cast<double>(order.size());
        rec.train_acc = static_cast<double>(correct) / static_cast<double>(order.size());
        rec.val_loss = val.loss;
        rec.val_acc = val.accuracy;
        hist.epochs.push_back(rec);
        if (!std::isfinite(rec.val_loss)) {
            throw TrainingDiverged("non-finite validation loss in epoch " + std::to_string(epoch),
                                   hist);
        }
        if (rec.val_acc > best_val) {
            best_val = rec.val_acc;
            best.network = net;
            hist.best_index = hist.epochs.size() - 1;
        }
        if (on_epoch) on_epoch(rec);
        if (tc.stop_at_perfect && rec.val_acc >= 1.0) {
            hist.stopped_early = epoch < tc.epochs;
            break;
        }
    }
    return best;
}

void write_history(const std::filesystem::path& path, const TrainHistory& history,
                   std::span<const std::string> header_lines) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write history: " + path.string());
    for (const auto& h : header_lines) out << "# " << h << '\n';
    if (!history.epochs.empty()) {
        out << "# best_epoch=" << history.best().epoch << '\n';
    }
    out << "# stopped_early=" << (history.stopped_early ? 1 : 0) << '\n';
    out << "epoch,train_loss,train_acc,val_loss,val_acc,checkpoint\n";
    char buf[256];
    for (std::size_t i = 0; i < history.epochs.size(); ++i) {
        const auto& e = history.epochs[i];
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%d\n", e.epoch, e.train_loss,
                      e.train_acc, e.val_loss, e.val_acc, i == history.best_index ? 1 : 0);
        out << buf;
    }
    if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

}  // namespace rawbyte::nn
