#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rawbyte/encoder.hpp"
#include "rawbyte/error.hpp"
#include "rawbyte/nn/network.hpp"

namespace rawbyte::nn {

enum class OptimizerKind : std::uint8_t { Adam, Sgd };

std::string_view to_string(OptimizerKind k) noexcept;
std::optional<OptimizerKind> parse_optimizer(std::string_view name) noexcept;

struct TrainConfig {
    std::size_t epochs = 50;
    std::size_t batch_size = 32;
    double learning_rate = 1e-3;
    OptimizerKind optimizer = OptimizerKind::Adam;
    std::uint64_t seed = 0;
    bool stop_at_perfect = true;  // end once validation accuracy reaches 1.0
    unsigned threads = 0;         // 0 = hardware concurrency
};

/// Adam with the usual defaults (beta1 0.9, beta2 0.999, eps 1e-7), or plain SGD.
class Optimizer {
public:
    Optimizer(OptimizerKind kind, double lr, std::size_t n_params);
    void step(std::span<double> params, std::span<const double> grads);

private:
    OptimizerKind kind_;
    double lr_;
    double beta1_ = 0.9;
    double beta2_ = 0.999;
    double eps_ = 1e-7;
    std::uint64_t t_ = 0;
    std::vector<double> m_;
    std::vector<double> v_;
};

struct EpochRecord {
    std::size_t epoch = 0;  // 1-based
    double train_loss = 0.0;
    double train_acc = 0.0;
    double val_loss = 0.0;
    double val_acc = 0.0;

    friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
    std::size_t best_index = 0;  // into epochs; the checkpointed network
    bool stopped_early = false;

    const EpochRecord& best() const { return epochs.at(best_index); }

    friend bool operator==(const TrainHistory&, const TrainHistory&) = default;
};

struct TrainResult {
    Network network;  // the checkpoint with the highest validation accuracy
    TrainHistory history;
};

/// Non-finite loss; carries the epochs completed before it.
class TrainingDiverged : public Error {
public:
    TrainingDiverged(const std::string& what, TrainHistory history)
        : Error(ErrorKind::DivergedLoss, what), history_(std::move(history)) {}
    const TrainHistory& history() const noexcept { return history_; }

private:
    TrainHistory history_;
};

struct Evaluation {
    double loss = 0.0;
    double accuracy = 0.0;
    std::vector<std::size_t> predictions;
    std::vector<std::size_t> labels;
};

/// Eval-mode pass over ds.samples[i] for i in `indices`.
Evaluation evaluate(const Network& net, const Dataset& ds, std::span<const std::size_t> indices,
                    unsigned threads = 0);

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Seeded mini-batch training. Init, shuffling and dropout all derive from
/// tc.seed, and batch gradients are summed in sample order, so a run is
/// reproducible bit-for-bit on one machine whatever the thread count.
TrainResult train(const Dataset& ds, const NetworkConfig& nc, const TrainConfig& tc,
                  const EpochCallback& on_epoch = {});

/// `epoch,train_loss,train_acc,val_loss,val_acc,checkpoint` rows.
void write_history(const std::filesystem::path& path, const TrainHistory& history,
                   std::span<const std::string> header_lines = {});

}  // namespace rawbyte::nn
