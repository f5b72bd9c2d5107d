#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "checks.hpp"
#include "oracles.hpp"
#include "rawbyte/error.hpp"
#include "rawbyte/nn/layers.hpp"

using namespace rawbyte;
using namespace rawbyte::nn;

namespace {

std::vector<double> randn(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
    std::normal_distribution<double> d(0.0, scale);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

}  // namespace

TEST(ConvGeometry, KerasSameLengths) {
    EXPECT_EQ(conv_out_len(1024, 64, 3, Padding::Same), 342u);
    EXPECT_EQ(conv_out_len(69, 64, 3, Padding::Same), 23u);
    EXPECT_EQ(conv_out_len(10, 3, 1, Padding::Valid), 8u);
    EXPECT_EQ(conv_out_len(2, 3, 1, Padding::Valid), 0u);
    ConvGeometry g{1, 1024, 24, 64, 3, Padding::Same};
    // (342 - 1) * 3 + 64 - 1024 = 63 padded taps, 31 of them on the left
    EXPECT_EQ(g.pad_left(), 31u);
    EXPECT_EQ(pool_out_len(342, 5), 69u);
}

TEST(ConvKernel, MatchesNaiveOn100RandomCases) {
    EXPECT_LT(checks::conv_kernel_worst(11, 100), 1e-9);
}

TEST(ConvKernel, ReluVariantClampsNegatives) {
    Signal x(1, 4);
    x.data = {1, -2, 3, -4};
    const std::vector<double> w{1.0}, b{0.0};
    const auto y = conv1d_forward(x, w, b, 1, 1, 1, Padding::Valid);
    EXPECT_EQ(y.data, (std::vector<double>{1, 0, 3, 0}));
}

TEST(ConvKernel, RejectsWrongWeightCount) {
    Signal x(1, 8);
    const std::vector<double> w(3), b(1);
    EXPECT_THROW(conv1d_preact(x, w, b, 1, 4, 1, Padding::Valid), Error);
}

TEST(DenseKernel, MatchesNaiveOn100RandomCases) {
    EXPECT_LT(checks::dense_kernel_worst(12, 100), 1e-9);
}

TEST(MaxPool, MatchesNaiveWithPartialWindow) {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 50; ++t) {
        const std::size_t C = pick(rng, 1, 3), L = pick(rng, 1, 40), P = pick(rng, 1, 6);
        Signal x(C, L);
        x.data = randn(rng, C * L);
        const auto got = maxpool_forward(x, P);
        EXPECT_EQ(got.output.length, (L + P - 1) / P);
        EXPECT_EQ(got.output.data, oracle::maxpool(x.data, C, L, P));
    }
}

TEST(MaxPool, TiesRouteGradientToFirstIndex) {
    Signal x(1, 6);
    x.data = {2, 2, 1, 0, 5, 5};
    const auto p = maxpool_forward(x, 3);
    EXPECT_EQ(p.argmax, (std::vector<std::size_t>{0, 4}));
    std::vector<double> g(6, 0.0);
    maxpool_backward(p.argmax, std::vector<double>{1.0, 2.0}, g);
    EXPECT_EQ(g, (std::vector<double>{1, 0, 0, 0, 2, 0}));
}

TEST(Dropout, SurvivorFractionAndMeanPreserved) {
    std::mt19937_64 rng(14);
    const std::vector<double> ones(100000, 1.0);
    std::vector<double> mask;
    const auto y = dropout(ones, 0.5, Mode::Train, rng, &mask);
    const auto survivors = std::count_if(y.begin(), y.end(), [](double v) { return v != 0.0; });
    const double frac = static_cast<double>(survivors) / 1e5;
    EXPECT_NEAR(frac, 0.5, 0.01);
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / 1e5;
    EXPECT_NEAR(mean, 1.0, 0.02);
    for (double v : y) ASSERT_TRUE(v == 0.0 || v == 2.0);
    EXPECT_EQ(mask, y);
}

TEST(Dropout, EvalIsIdentityAndBadRatesRejected) {
    std::mt19937_64 rng(15);
    const std::vector<double> x{1, -2, 3};
    EXPECT_EQ(dropout(x, 0.5, Mode::Eval, rng), x);
    EXPECT_EQ(dropout(x, 0.0, Mode::Train, rng), x);
    EXPECT_THROW(dropout(x, 1.0, Mode::Train, rng), Error);
    EXPECT_THROW(dropout(x, -0.1, Mode::Train, rng), Error);
}

TEST(Loss, SoftmaxCrossEntropyMatchesDirectFormula) {
    std::mt19937_64 rng(16);
    for (int t = 0; t < 20; ++t) {
        const auto s = randn(rng, pick(rng, 2, 6), 3.0);
        const std::size_t label = pick(rng, 0, s.size() - 1);
        const auto lg = loss_and_grad(s, label, Head::Softmax);
        EXPECT_NEAR(lg.loss, oracle::softmax_ce(s, label), 1e-12);
        const auto p = activate(s, Head::Softmax);
        EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
        for (std::size_t k = 0; k < s.size(); ++k) {
            EXPECT_NEAR(lg.grad[k], p[k] - (k == label ? 1.0 : 0.0), 1e-12);
        }
    }
}

TEST(Loss, StableForExtremeScores) {
    const std::vector<double> s{1000.0, -1000.0};
    EXPECT_NEAR(loss_and_grad(s, 0, Head::Softmax).loss, 0.0, 1e-12);
    EXPECT_NEAR(loss_and_grad(s, 1, Head::Softmax).loss, 2000.0, 1e-9);
    EXPECT_TRUE(std::isfinite(loss_and_grad(s, 1, Head::Sigmoid).loss));
}

TEST(Loss, RejectsBadLabelsAndShortScores) {
    const std::vector<double> s{0.1, 0.2};
    EXPECT_THROW(loss_and_grad(s, 2, Head::Softmax), Error);
    EXPECT_THROW(loss_and_grad(std::vector<double>{0.3}, 0, Head::Softmax), Error);
}

// Finite-difference checks of each layer in isolation.
class LayerGradients : public ::testing::TestWithParam<int> {};

TEST_P(LayerGradients, MatchCentralDifferences) {
    for (const auto& e : checks::layer_gradient_errors(GetParam())) EXPECT_LT(e.error, 1e-4) << e.what;
}

INSTANTIATE_TEST_SUITE_P(RandomConfigs, LayerGradients, ::testing::Range(0, 20));
