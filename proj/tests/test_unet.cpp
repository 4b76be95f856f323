#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "test_util.hpp"
#include "wxaug/checkpoint.hpp"
#include "wxaug/errors.hpp"
#include "wxaug/gradcheck.hpp"
#include "wxaug/loss.hpp"
#include "wxaug/scene.hpp"
#include "wxaug/train.hpp"
#include "wxaug/unet.hpp"

using namespace wxaug;
using wxaug::test::TempDir;

namespace {

const double kLn8 = 2.0794415416798357;

UNetConfig small_config() { return {2, 4, 8, 32}; }

UNetWeights random_weights(const UNetConfig& cfg, std::uint64_t seed) {
  RngStream s = derive_stream(seed, {{"w", 0}});
  UNetWeights w = init_weights(cfg, s);
  for (auto& l : w.layers) {
    for (auto& v : l.weight) v = static_cast<float>(s.uniform(-0.2, 0.2));
    for (auto& v : l.bias) v = static_cast<float>(s.uniform(-0.1, 0.1));
  }
  return w;
}

Tensor<float> random_batch(int n, int size, std::uint64_t seed) {
  RngStream s = derive_stream(seed, {{"x", 0}});
  Tensor<float> t(n, size, size, 3);
  for (auto& v : t.data) v = static_cast<float>(s.uniform(0.0, 1.0));
  return t;
}

std::vector<Sample> scenes(int count, int size) {
  std::vector<Sample> out;
  for (int i = 0; i < count; ++i) {
    auto [rgb, mask] = render_scene({kTowns[static_cast<std::size_t>(i) % kTowns.size()], 500u + static_cast<std::uint64_t>(i)},
                                    preset_weather("ClearNoon"), size, size);
    out.push_back({rgb, mask});
  }
  return out;
}

}  // namespace

TEST(UNetConfig, ValidationAndChannels) {
  UNetConfig c;
  EXPECT_EQ(c.channels_at(0), 8);
  EXPECT_EQ(c.channels_at(1), 16);
  EXPECT_EQ(c.channels_at(2), 32);
  EXPECT_NO_THROW(c.validate());
  EXPECT_THROW((UNetConfig{3, 8, 8, 60}.validate()), ConfigError);
  EXPECT_THROW((UNetConfig{0, 8, 8, 64}.validate()), ConfigError);
  EXPECT_THROW((UNetConfig{2, 8, 0, 64}.validate()), ConfigError);
}

TEST(Init, ZeroHeadAndDeterministic) {
  const UNetConfig cfg;
  RngStream a = derive_stream(42, {{"init", 0}});
  RngStream b = derive_stream(42, {{"init", 0}});
  const UNetWeights wa = init_weights(cfg, a);
  EXPECT_EQ(wa, init_weights(cfg, b));
  for (float v : wa.head().weight) ASSERT_EQ(v, 0.0f);
  for (float v : wa.head().bias) ASSERT_EQ(v, 0.0f);
  EXPECT_EQ(wa.head().kernel, 1);
  // Encoder convs: 3x3, He-uniform bound sqrt(6 / fan_in).
  const auto& first = wa.layers.front();
  EXPECT_EQ(first.in_ch, 3);
  EXPECT_EQ(first.out_ch, 8);
  const float bound = std::sqrt(6.0f / (9 * 3));
  for (float v : first.weight) ASSERT_LE(std::abs(v), bound);
  EXPECT_EQ(wa.layers.size(), 5u * 3 + 3);
}

TEST(Forward, ShapesAndZeroHeadLogits) {
  const UNetConfig cfg;
  RngStream s = derive_stream(1, {{"init", 0}});
  const UNetWeights w = init_weights(cfg, s);
  const Tensor<float> logits = forward(w, random_batch(2, 64, 3));
  EXPECT_EQ(logits.n, 2);
  EXPECT_EQ(logits.h, 64);
  EXPECT_EQ(logits.w, 64);
  EXPECT_EQ(logits.c, 8);
  for (float v : logits.data) ASSERT_EQ(v, 0.0f);
  EXPECT_THROW(forward(w, random_batch(1, 32, 3)), DataError);
}

TEST(Forward, ZeroInputWithZeroBiasesGivesZeroLogits) {
  UNetWeights w = random_weights(small_config(), 5);
  for (auto& l : w.layers) std::fill(l.bias.begin(), l.bias.end(), 0.0f);
  const Tensor<float> logits = forward(w, Tensor<float>(1, 32, 32, 3));
  for (float v : logits.data) ASSERT_EQ(v, 0.0f);
}

TEST(Forward, FloatAndDoubleAgree) {
  const UNetWeights w = random_weights(small_config(), 6);
  const Tensor<float> x = random_batch(1, 32, 7);
  Tensor<double> xd(1, 32, 32, 3);
  std::copy(x.data.begin(), x.data.end(), xd.data.begin());
  const Tensor<float> lf = forward(w, x);
  const Tensor<double> ld = forward(w.cast<double>(), xd);
  for (std::size_t i = 0; i < lf.data.size(); ++i) ASSERT_NEAR(lf.data[i], ld.data[i], 1e-4);
}

TEST(Loss, UniformAndHandExamples) {
  Tensor<float> zero(1, 4, 4, 8);
  const std::vector<std::uint8_t> labels(16, 3);
  EXPECT_NEAR(sparse_ce_loss(zero, labels), kLn8, 1e-9);

  Tensor<double> two(1, 1, 1, 2);
  two.data = {0.0, std::log(3.0)};
  const std::vector<std::uint8_t> zero_label = {0};
  EXPECT_NEAR(sparse_ce_loss(two, zero_label), std::log(4.0), 1e-12);

  Tensor<float> sat(1, 2, 2, 8);
  const std::vector<std::uint8_t> lab = {0, 1, 2, 7};
  for (int p = 0; p < 4; ++p) sat.data[static_cast<std::size_t>(p) * 8 + lab[static_cast<std::size_t>(p)]] = 50.0f;
  EXPECT_LT(sparse_ce_loss(sat, lab), 1e-10);

  Tensor<float> big(1, 1, 1, 3);
  big.data = {1000.0f, -1000.0f, 0.0f};
  const std::vector<std::uint8_t> one = {1};
  EXPECT_NEAR(sparse_ce_loss(big, one), 2000.0, 1e-6);  // stable, not inf
}

TEST(Loss, IgnoreAndValidation) {
  Tensor<double> t(1, 1, 2, 2);
  t.data = {0.0, std::log(3.0), 5.0, 0.0};
  const std::vector<std::uint8_t> labels = {0, 1};
  EXPECT_NEAR(sparse_ce_loss(t, labels, 1), std::log(4.0), 1e-12);
  const std::vector<std::uint8_t> bad = {0, 2};
  EXPECT_THROW(sparse_ce_loss(t, bad), DataError);
  const std::vector<std::uint8_t> short_labels = {0};
  EXPECT_THROW(sparse_ce_loss(t, short_labels), DataError);
}

TEST(Loss, SoftmaxGradientSumsToZero) {
  Tensor<double> logits(1, 3, 3, 5);
  RngStream s = derive_stream(2, {{"l", 0}});
  for (auto& v : logits.data) v = s.uniform(-3, 3);
  std::vector<std::uint8_t> labels(9);
  for (auto& l : labels) l = static_cast<std::uint8_t>(s.uniform_int(0, 4));
  Tensor<double> grad(1, 3, 3, 5);
  sparse_ce_stats(logits, labels, -1, &grad, 1.0);
  for (int p = 0; p < 9; ++p) {
    double sum = 0.0;
    for (int k = 0; k < 5; ++k) sum += grad.data[static_cast<std::size_t>(p) * 5 + k];
    EXPECT_NEAR(sum, 0.0, 1e-12);  // softmax rows sum to one
  }
}

TEST(Backward, HeadBiasGradientForUniformSoftmax) {
  // Zero head: dL/db_k = 1/K - frequency of class k.
  const UNetConfig cfg = small_config();
  RngStream s = derive_stream(3, {{"init", 0}});
  const UNetWeights w = init_weights(cfg, s);
  std::vector<std::uint8_t> labels(32 * 32);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<std::uint8_t>(i % 3 == 0 ? 5 : 1);
  UNetWeights g = w;
  const BatchStats st = loss_and_gradients(w, random_batch(1, 32, 4), labels, g);
  EXPECT_NEAR(st.mean_loss(), kLn8, 1e-6);
  const double f5 = 342.0 / 1024.0;  // indices divisible by 3 in [0, 1024)
  for (int k = 0; k < 8; ++k) {
    const double freq = k == 5 ? f5 : (k == 1 ? 1.0 - f5 : 0.0);
    EXPECT_NEAR(g.head().bias[static_cast<std::size_t>(k)], 0.125 - freq, 1e-6) << k;
  }
}

TEST(Backward, GradientsFiniteOnRandomInput) {
  const UNetWeights w = random_weights(small_config(), 9);
  std::vector<std::uint8_t> labels(2 * 32 * 32);
  RngStream s = derive_stream(9, {{"lab", 0}});
  for (auto& l : labels) l = static_cast<std::uint8_t>(s.uniform_int(0, 7));
  UNetWeights g = w;
  loss_and_gradients(w, random_batch(2, 32, 10), labels, g);
  for (const auto& l : g.layers) {
    for (float v : l.weight) ASSERT_TRUE(std::isfinite(v));
    for (float v : l.bias) ASSERT_TRUE(std::isfinite(v));
  }
}

TEST(GradCheck, TinyConfigWithinTolerance) {
  const GradCheckResult r = grad_check(tiny_grad_check_config(), 42);
  EXPECT_LE(r.max_rel_error, 1e-4) << r.worst_parameter;
  EXPECT_GE(r.checked, 200u);
  const GradCheckResult again = grad_check(tiny_grad_check_config(), 42);
  EXPECT_EQ(r.max_rel_error, again.max_rel_error);
  EXPECT_THROW(grad_check({2, 2, 3, 10}, 42), ConfigError);
}

TEST(GradCheck, OtherSeedsAndShapes) {
  EXPECT_LE(grad_check(tiny_grad_check_config(), 7).max_rel_error, 1e-4);
  EXPECT_LE(grad_check({1, 3, 4, 4}, 11).max_rel_error, 1e-4);
}

TEST(Predict, ZeroHeadPredictsClassZero) {
  RngStream s = derive_stream(4, {{"init", 0}});
  const UNetWeights w = init_weights(small_config(), s);
  const MaskImage m = predict_mask(w, scenes(1, 32)[0].rgb);
  EXPECT_EQ(m.width, 32);
  EXPECT_EQ(m.height, 32);
  for (auto v : m.data) ASSERT_EQ(v, 0);
  const float ties[3] = {1.0f, 1.0f, 0.5f};
  EXPECT_EQ(argmax_class(ties, 3), 0);
}

TEST(Checkpoint, RoundTripIsExact) {
  TempDir dir("ckpt");
  const UNetWeights w = random_weights(small_config(), 12);
  save_checkpoint(w, dir / "m.wlab");
  const UNetWeights back = load_checkpoint(dir / "m.wlab");
  EXPECT_EQ(back, w);
  EXPECT_EQ(back.config, w.config);
}

TEST(Checkpoint, CorruptFilesRejected) {
  TempDir dir("ckpt");
  const UNetWeights w = random_weights(small_config(), 13);
  save_checkpoint(w, dir / "m.wlab");
  std::string bytes;
  {
    std::ifstream in(dir / "m.wlab", std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  std::ofstream(dir / "trunc.wlab", std::ios::binary) << bytes.substr(0, bytes.size() - 7);
  EXPECT_THROW(load_checkpoint(dir / "trunc.wlab"), DataError);
  std::ofstream(dir / "extra.wlab", std::ios::binary) << bytes << "x";
  EXPECT_THROW(load_checkpoint(dir / "extra.wlab"), DataError);
  std::string magic = bytes;
  magic[0] = 'X';
  std::ofstream(dir / "magic.wlab", std::ios::binary) << magic;
  EXPECT_THROW(load_checkpoint(dir / "magic.wlab"), DataError);
  EXPECT_THROW(load_checkpoint(dir / "absent.wlab"), IoError);
}

TEST(Train, InitialLossHistoryAndDeterminism) {
  const auto samples = scenes(6, 32);
  const std::vector<std::size_t> tr = {0, 1, 2, 3}, va = {4, 5};
  TrainConfig tc;
  tc.epochs = 3;
  tc.batch_size = 2;
  const AugmentConfig aug;
  const TrainResult a = train(samples, tr, va, tc, small_config(), &aug, 42);
  EXPECT_NEAR(a.initial_loss, kLn8, 1e-6);
  ASSERT_EQ(a.history.size(), 3u);
  EXPECT_EQ(a.step_losses.size(), 6u);
  for (const auto& h : a.history) {
    EXPECT_TRUE(std::isfinite(h.train_loss));
    EXPECT_TRUE(std::isfinite(h.val_loss));
  }
  const TrainResult b = train(samples, tr, va, tc, small_config(), &aug, 42);
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.step_losses, b.step_losses);
  const TrainResult c = train(samples, tr, va, tc, small_config(), &aug, 43);
  EXPECT_NE(a.weights, c.weights);
}

TEST(Train, EmptyValidationAndNaNDetection) {
  const auto samples = scenes(2, 32);
  const std::vector<std::size_t> tr = {0, 1};
  TrainConfig tc;
  tc.epochs = 1;
  tc.batch_size = 2;
  const TrainResult r = train(samples, tr, {}, tc, small_config(), nullptr, 1);
  EXPECT_TRUE(std::isnan(r.history[0].val_loss));
  tc.epochs = 30;
  tc.learning_rate = 1e30;
  EXPECT_THROW(train(samples, tr, {}, tc, small_config(), nullptr, 1), NumericalError);
}

TEST(Train, ConfigValidation) {
  TrainConfig tc;
  tc.epochs = 0;
  EXPECT_THROW(tc.validate(), ConfigError);
  tc = {};
  tc.learning_rate = -1;
  EXPECT_THROW(tc.validate(), ConfigError);
  tc = {};
  tc.beta2 = 1.0;
  EXPECT_THROW(tc.validate(), ConfigError);
}

TEST(Train, SplitIsDisjointAndSeeded) {
  const TrainValSplit a = select_train_val(1200, 1000, 200, 42);
  EXPECT_EQ(a.train.size(), 1000u);
  EXPECT_EQ(a.val.size(), 200u);
  std::vector<bool> seen(1200, false);
  for (auto i : a.train) seen[i] = true;
  for (auto i : a.val) {
    ASSERT_FALSE(seen[i]);
    seen[i] = true;
  }
  const TrainValSplit b = select_train_val(1200, 1000, 200, 42);
  EXPECT_EQ(a.train, b.train);
  EXPECT_NE(a.train, select_train_val(1200, 1000, 200, 43).train);
  EXPECT_THROW(select_train_val(10, 8, 3, 1), ConfigError);
}

TEST(History, CsvLayout) {
  TempDir dir("hist");
  std::vector<HistoryRow> h = {{0, 2.0, NAN, 0.25, NAN}, {1, 1.5, 1.25, 0.5, 0.75}};
  write_history_csv(h, dir / "h.csv");
  std::ifstream in(dir / "h.csv");
  std::string text(std::istreambuf_iterator<char>(in), {});
  EXPECT_EQ(text, "epoch,train_loss,val_loss,train_acc,val_acc\n0,2,,0.25,\n1,1.5,1.25,0.5,0.75\n");
}
