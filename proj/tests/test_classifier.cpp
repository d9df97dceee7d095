#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <iterator>
#include <vector>

#include "creditseg/classifier.hpp"

using namespace creditseg;

namespace {

TrainConfig tiny_config(int hidden, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.hidden = hidden;
  cfg.rng_seed = seed;
  return cfg;
}

// A 2x2x1-class model with hand-picked weights, small enough to follow the
// arithmetic by hand.
ScorerModel handmade_model() {
  ScorerModel m;
  m.vocab_size = 2;
  m.hidden = 2;
  m.n_classes = 1;
  m.class_names = {"only"};
  m.w1 = {1.0f, 0.0f, 0.0f, 1.0f};  // identity
  m.b1 = {0.0f, 0.0f};
  m.w2 = {1.0f, 0.0f, 0.0f, -1.0f};  // rows: hidden unit -> outputs
  m.b2 = {0.0f, 0.5f};
  return m;
}

double batch_loss(const ScorerModel& m, std::span<const TrainingExample> batch) {
  Gradients g;
  return loss_and_grads(m, batch, 0.0, nullptr, g);
}

}  // namespace

TEST_CASE("init_model is deterministic and bounded") {
  const TrainConfig cfg = tiny_config(16, 42);
  const ScorerModel a = init_model(100, 5, cfg);
  const ScorerModel b = init_model(100, 5, cfg);
  CHECK(a.w1 == b.w1);
  CHECK(a.w2 == b.w2);
  CHECK(a.outputs() == 6);
  CHECK(a.null_index() == 5);
  const double s1 = 1.0 / std::sqrt(100.0);
  for (float w : a.w1) {
    CHECK(std::abs(w) <= s1);
  }
  const double s2 = 1.0 / std::sqrt(16.0);
  for (float w : a.w2) {
    CHECK(std::abs(w) <= s2);
  }
  for (float v : a.b1) CHECK(v == 0.0f);
  for (float v : a.b2) CHECK(v == 0.0f);

  TrainConfig other = cfg;
  other.rng_seed = 43;
  CHECK(init_model(100, 5, other).w1 != a.w1);
  CHECK_THROWS_AS(init_model(0, 5, cfg), std::invalid_argument);
}

TEST_CASE("forward computes relu then softmax") {
  const ScorerModel m = handmade_model();

  SECTION("hand-checked probabilities") {
    // x = (0.6, 0.8): z1 = (0.6, 0.8), z2 = (0.6, -0.8 + 0.5) = (0.6, -0.3)
    const std::vector<double> x = {0.6, 0.8};
    const std::vector<double> p = forward(m, x);
    REQUIRE(p.size() == 2);
    const double expect0 = 1.0 / (1.0 + std::exp(-0.9));
    CHECK(p[0] == Catch::Approx(expect0).epsilon(1e-9));
    CHECK(p[0] + p[1] == Catch::Approx(1.0).epsilon(1e-12));
  }
  SECTION("relu clamps negative hidden units") {
    ScorerModel neg = m;
    neg.w1 = {-1.0f, 0.0f, 0.0f, 1.0f};
    // x = (1, 0): z1 = (-1, 0) -> act (0, 0) -> z2 = b2 = (0, 0.5)
    const std::vector<double> p = forward(neg, std::vector<double>{1.0, 0.0});
    const double expect0 = 1.0 / (1.0 + std::exp(0.5));
    CHECK(p[0] == Catch::Approx(expect0).epsilon(1e-9));
  }
  SECTION("input validation") {
    CHECK_THROWS_AS(forward(m, std::vector<double>{1.0}), std::invalid_argument);
    const std::vector<double> nan_x = {0.1, std::nan("")};
    CHECK_THROWS_AS(forward(m, nan_x), std::invalid_argument);
  }
}

TEST_CASE("analytic gradients match finite differences") {
  TrainConfig cfg = tiny_config(4, 2026);
  ScorerModel m = init_model(6, 2, cfg);
  m.class_names = {"a", "b"};

  std::vector<TrainingExample> batch;
  batch.push_back({{0.7, 0.3, 0.0, 0.5, 0.0, 0.4}, 0});
  batch.push_back({{0.0, 0.9, 0.1, 0.0, 0.4, 0.0}, 1});
  batch.push_back({{0.5, 0.0, 0.5, 0.5, 0.5, 0.0}, 0});

  // Keep the check away from the relu kink so the loss is differentiable at
  // every probed point.
  for (const TrainingExample& ex : batch) {
    for (int h = 0; h < m.hidden; ++h) {
      double z = static_cast<double>(m.b1[static_cast<std::size_t>(h)]);
      for (int v = 0; v < m.vocab_size; ++v) {
        z += ex.features[static_cast<std::size_t>(v)] *
             static_cast<double>(
                 m.w1[static_cast<std::size_t>(v) * 4 + static_cast<std::size_t>(h)]);
      }
      REQUIRE(std::abs(z) > 5e-3);
    }
  }

  Gradients analytic;
  loss_and_grads(m, batch, 0.0, nullptr, analytic);

  const double h = 5e-4;
  auto check_block = [&](std::vector<float>& params, const std::vector<double>& g,
                         const char* name) {
    double worst = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
      const float orig = params[i];
      params[i] = static_cast<float>(static_cast<double>(orig) + h);
      const double hi = batch_loss(m, batch);
      const double p_hi = static_cast<double>(params[i]);
      params[i] = static_cast<float>(static_cast<double>(orig) - h);
      const double lo = batch_loss(m, batch);
      const double p_lo = static_cast<double>(params[i]);
      params[i] = orig;
      const double fd = (hi - lo) / (p_hi - p_lo);
      const double denom = std::max({std::abs(fd), std::abs(g[i]), 1e-8});
      worst = std::max(worst, std::abs(fd - g[i]) / denom);
    }
    INFO(name);
    CHECK(worst < 1e-4);
  };
  check_block(m.w1, analytic.w1, "w1");
  check_block(m.b1, analytic.b1, "b1");
  check_block(m.w2, analytic.w2, "w2");
  check_block(m.b2, analytic.b2, "b2");
}

TEST_CASE("input dropout scales kept coordinates by the keep rate") {
  // One input, one hidden unit, identity-ish weights: the loss takes exactly
  // two values depending on whether the single coordinate is kept (scaled to
  // 2) or dropped.
  ScorerModel m;
  m.vocab_size = 1;
  m.hidden = 1;
  m.n_classes = 1;
  m.class_names = {"only"};
  m.w1 = {1.0f};
  m.b1 = {0.0f};
  m.w2 = {1.0f, 0.0f};
  m.b2 = {0.0f, 0.0f};
  std::vector<TrainingExample> one;
  one.push_back({{1.0}, 0});

  const double loss_kept = std::log(1.0 + std::exp(-2.0));
  const double loss_dropped = std::log(2.0);

  Gradients g;
  int kept = 0, dropped = 0;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    Rng probe(seed);
    const bool expect_kept = probe.next_unit() < 0.5;
    Rng rng(seed);
    const double loss = loss_and_grads(m, one, 0.5, &rng, g);
    if (expect_kept) {
      CHECK(loss == Catch::Approx(loss_kept).epsilon(1e-12));
      ++kept;
    } else {
      CHECK(loss == Catch::Approx(loss_dropped).epsilon(1e-12));
      ++dropped;
    }
  }
  CHECK(kept > 16);
  CHECK(dropped > 16);

  SECTION("zero coordinates consume no randomness") {
    ScorerModel wide = m;
    wide.vocab_size = 3;
    wide.w1 = {0.0f, 1.0f, 0.0f};
    std::vector<TrainingExample> ex;
    ex.push_back({{0.0, 1.0, 0.0}, 0});
    Rng a(9);
    const double with_zeros = loss_and_grads(wide, ex, 0.5, &a, g);
    Rng b(9);
    const double without = loss_and_grads(m, one, 0.5, &b, g);
    CHECK(with_zeros == without);
  }
}

TEST_CASE("loss_and_grads validates its inputs") {
  const ScorerModel m = handmade_model();
  Gradients g;
  std::vector<TrainingExample> batch;
  CHECK_THROWS_AS(loss_and_grads(m, batch, 0.0, nullptr, g),
                  std::invalid_argument);
  batch.push_back({{1.0, 0.0}, 1});  // the null output is not a valid target
  CHECK_THROWS_AS(loss_and_grads(m, batch, 0.0, nullptr, g),
                  std::invalid_argument);
  batch[0].target = -1;
  CHECK_THROWS_AS(loss_and_grads(m, batch, 0.0, nullptr, g),
                  std::invalid_argument);
  batch[0] = {{1.0}, 0};
  CHECK_THROWS_AS(loss_and_grads(m, batch, 0.0, nullptr, g),
                  std::invalid_argument);
  batch[0] = {{1.0, 0.0}, 0};
  CHECK_THROWS_AS(loss_and_grads(m, batch, 0.5, nullptr, g),
                  std::invalid_argument);
  CHECK_THROWS_AS(loss_and_grads(m, batch, 1.0, nullptr, g),
                  std::invalid_argument);
}

TEST_CASE("a single optimizer step moves each weight by about the step size") {
  ScorerModel m;
  m.vocab_size = 1;
  m.hidden = 1;
  m.n_classes = 1;
  m.class_names = {"only"};
  m.w1 = {0.5f};
  m.b1 = {0.1f};
  m.w2 = {0.3f, -0.2f};
  m.b2 = {0.05f, -0.05f};
  const ScorerModel before = m;

  std::vector<TrainingExample> data;
  data.push_back({{1.0}, 0});
  TrainConfig cfg = tiny_config(1, 0);
  cfg.dropout = 0.0;
  cfg.epochs_per_iteration = 1;
  cfg.batch_size = 1;
  const double lr = 0.1;
  const std::vector<double> losses = train(m, data, cfg, lr);
  REQUIRE(losses.size() == 1);

  // z1 = 0.6, z2 = (0.23, -0.17); the first-step update collapses to
  // lr * sign(gradient) because the bias corrections cancel.
  const double p0 = 1.0 / (1.0 + std::exp(-0.4));
  CHECK(losses[0] == Catch::Approx(-std::log(p0)).margin(1e-6));
  CHECK(m.w1[0] == Catch::Approx(before.w1[0] + lr).margin(2e-6));
  CHECK(m.b1[0] == Catch::Approx(before.b1[0] + lr).margin(2e-6));
  CHECK(m.w2[0] == Catch::Approx(before.w2[0] + lr).margin(2e-6));
  CHECK(m.w2[1] == Catch::Approx(before.w2[1] - lr).margin(2e-6));
  CHECK(m.b2[0] == Catch::Approx(before.b2[0] + lr).margin(2e-6));
  CHECK(m.b2[1] == Catch::Approx(before.b2[1] - lr).margin(2e-6));
}

TEST_CASE("training fits a separable toy problem") {
  const double r = 1.0 / std::sqrt(2.0);
  std::vector<TrainingExample> data;
  data.push_back({{r, r, 0.0, 0.0}, 0});
  data.push_back({{0.8, 0.6, 0.0, 0.0}, 0});
  data.push_back({{0.0, 0.0, r, r}, 1});
  data.push_back({{0.0, 0.0, 0.6, 0.8}, 1});

  TrainConfig cfg = tiny_config(8, 7);
  cfg.dropout = 0.0;
  cfg.epochs_per_iteration = 200;
  ScorerModel m = init_model(4, 2, cfg);
  m.class_names = {"a", "b"};
  const std::vector<double> losses = train(m, data, cfg, 0.01);
  REQUIRE(losses.size() == 200);
  CHECK(losses.back() < losses.front());
  CHECK(losses.back() < 0.1);
  for (const TrainingExample& ex : data) {
    const std::vector<double> p = forward(m, ex.features);
    int argmax = 0;
    for (int o = 1; o < 3; ++o) {
      if (p[static_cast<std::size_t>(o)] > p[static_cast<std::size_t>(argmax)]) argmax = o;
    }
    CHECK(argmax == ex.target);
  }

  SECTION("same seed reproduces the exact weights") {
    ScorerModel m2 = init_model(4, 2, cfg);
    m2.class_names = {"a", "b"};
    train(m2, data, cfg, 0.01);
    CHECK(m2.w1 == m.w1);
    CHECK(m2.b1 == m.b1);
    CHECK(m2.w2 == m.w2);
    CHECK(m2.b2 == m.b2);
  }
  SECTION("different seed diverges") {
    TrainConfig other = cfg;
    other.rng_seed = 8;
    ScorerModel m3 = init_model(4, 2, other);
    m3.class_names = {"a", "b"};
    train(m3, data, other, 0.01);
    CHECK(m3.w1 != m.w1);
  }
}

TEST_CASE("fine_tune on nothing is a no-op with a warning") {
  TrainConfig cfg = tiny_config(4, 3);
  ScorerModel m = init_model(4, 2, cfg);
  m.class_names = {"a", "b"};
  const ScorerModel before = m;
  const std::vector<double> losses = fine_tune(m, {}, cfg);
  CHECK(losses.empty());
  CHECK(m.w1 == before.w1);
  CHECK(m.w2 == before.w2);
}

TEST_CASE("train rejects an empty data set") {
  TrainConfig cfg = tiny_config(4, 3);
  ScorerModel m = init_model(4, 2, cfg);
  CHECK_THROWS_AS(train(m, {}, cfg, 0.001), std::invalid_argument);
}

TEST_CASE("model file round trip") {
  TrainConfig cfg = tiny_config(3, 99);
  ScorerModel m = init_model(5, 2, cfg);
  m.class_names = {"comedy", "drama"};
  m.vocab_hash = 0xfeedfacecafebeefULL;
  m.b1[1] = 0.25f;
  m.b2[2] = -1.5f;
  const std::string path = "classifier_test_model.tmp";
  save_model(m, path);

  const ScorerModel back = load_model(path);
  CHECK(back.vocab_size == 5);
  CHECK(back.hidden == 3);
  CHECK(back.n_classes == 2);
  CHECK(back.class_names == m.class_names);
  CHECK(back.vocab_hash == m.vocab_hash);
  CHECK(back.w1 == m.w1);
  CHECK(back.b1 == m.b1);
  CHECK(back.w2 == m.w2);
  CHECK(back.b2 == m.b2);
  std::remove(path.c_str());
}

TEST_CASE("model file rejects corruption") {
  TrainConfig cfg = tiny_config(3, 99);
  ScorerModel m = init_model(5, 2, cfg);
  m.class_names = {"comedy", "drama"};
  const std::string path = "classifier_test_corrupt.tmp";

  SECTION("bad magic") {
    {
      std::ofstream out(path, std::ios::binary);
      out << "NOPEgarbage";
    }
    CHECK_THROWS_WITH(load_model(path),
                      Catch::Matchers::ContainsSubstring("magic"));
  }
  SECTION("unsupported version") {
    save_model(m, path);
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(4);
    const char v2[4] = {2, 0, 0, 0};
    f.write(v2, 4);
    f.close();
    CHECK_THROWS_WITH(load_model(path),
                      Catch::Matchers::ContainsSubstring("version"));
  }
  SECTION("truncated parameters") {
    save_model(m, path);
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    in.close();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 10));
    out.close();
    CHECK_THROWS_WITH(load_model(path),
                      Catch::Matchers::ContainsSubstring("truncated"));
  }
  SECTION("trailing bytes") {
    save_model(m, path);
    std::ofstream out(path, std::ios::binary | std::ios::app);
    out << "x";
    out.close();
    CHECK_THROWS_WITH(load_model(path),
                      Catch::Matchers::ContainsSubstring("trailing"));
  }
  std::remove(path.c_str());
}

TEST_CASE("save_model requires named classes") {
  TrainConfig cfg = tiny_config(3, 99);
  ScorerModel m = init_model(5, 2, cfg);
  CHECK_THROWS_AS(save_model(m, "never_written.tmp"), std::invalid_argument);
}
