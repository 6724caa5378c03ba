#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "rbmci/errors.hpp"
#include "rbmci/rbm.hpp"

using namespace rbmci;

namespace {

RbmModel random_model(int nv, int nh, double beta, std::uint64_t seed, double scale) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  auto m = RbmModel::zeros(nv, nh, beta);
  for (auto& x : m.weights.reshaped()) x = u(rng);
  for (auto& x : m.visible_bias) x = u(rng);
  for (auto& x : m.hidden_bias) x = u(rng);
  return m;
}

}  // namespace

TEST_CASE("visible encoding") {
  CHECK(encode_determinant({0b01, 0b10}, 2) == BinaryVector{1, 0, 0, 1});
  CHECK(encode_determinant({0, 0}, 3) == BinaryVector(6, 0));
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const int n = 1 + static_cast<int>(rng() % 64);
    const Bitmask mask = n == 64 ? ~Bitmask{0} : (Bitmask{1} << n) - 1;
    const Determinant d{rng() & mask, rng() & mask};
    CHECK(decode_determinant(encode_determinant(d, n), n) == d);
  }
  CHECK_THROWS_AS(decode_determinant(BinaryVector(5, 0), 2), shape_error);
}

TEST_CASE("energy function") {
  auto zero = RbmModel::zeros(3, 2);
  CHECK(rbm_energy(zero, BinaryVector{1, 0, 1}, BinaryVector{1, 1}) == 0.0);

  auto m = RbmModel::zeros(1, 1);
  m.visible_bias << 1;
  m.weights << 2;
  CHECK(rbm_energy(m, BinaryVector{1}, BinaryVector{1}) == -3.0);

  auto r = random_model(4, 3, 1.0, 3, 1.0);
  const BinaryVector h{1, 0, 1};
  CHECK(rbm_energy(r, BinaryVector(4, 0), h) == doctest::Approx(-(r.hidden_bias[0] + r.hidden_bias[2])).epsilon(1e-15));
  CHECK_THROWS_AS(rbm_energy(r, BinaryVector(3, 0), h), shape_error);
  CHECK_THROWS_AS(rbm_energy(r, BinaryVector(4, 0), BinaryVector(2, 0)), shape_error);
}

TEST_CASE("conditional probabilities") {
  SUBCASE("zero model is a fair coin at any temperature") {
    for (double beta : {0.1, 1.0, 7.0}) {
      const auto m = RbmModel::zeros(4, 3, beta);
      for (double p : hidden_probabilities(m, BinaryVector{1, 0, 1, 1})) CHECK(p == 0.5);
      for (double p : visible_probabilities(m, BinaryVector{0, 1, 1})) CHECK(p == 0.5);
    }
  }
  SUBCASE("activation ln 3") {
    auto m = RbmModel::zeros(2, 1);
    m.weights << std::log(3.0), 0.0;
    CHECK(hidden_probabilities(m, BinaryVector{1, 0})[0] == doctest::Approx(0.75).epsilon(1e-15));
  }
  SUBCASE("high temperature is near random") {
    auto m = random_model(6, 5, 1.0 / 30.0, 9, 0.15);
    Rng rng(4);
    for (int trial = 0; trial < 200; ++trial) {
      const auto v = sample_bits(Eigen::VectorXd::Constant(6, 0.5), rng);
      const auto h = sample_bits(Eigen::VectorXd::Constant(5, 0.5), rng);
      for (double p : hidden_probabilities(m, v)) {
        CHECK(p > 0.49);
        CHECK(p < 0.51);
      }
      for (double p : visible_probabilities(m, h)) {
        CHECK(p > 0.49);
        CHECK(p < 0.51);
      }
    }
  }
  SUBCASE("shape errors") {
    const auto m = RbmModel::zeros(4, 3);
    CHECK_THROWS_AS(hidden_probabilities(m, BinaryVector(3, 0)), shape_error);
    CHECK_THROWS_AS(visible_probabilities(m, BinaryVector(4, 0)), shape_error);
  }
}

TEST_CASE("sigmoid is stable at extreme arguments") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(800.0) == 1.0);
  CHECK(sigmoid(-800.0) == 0.0);
  CHECK(sigmoid(-40.0) > 0.0);
  CHECK(sigmoid(3.0) + sigmoid(-3.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("temperature semantics") {
  const auto m = random_model(5, 4, 1.3, 21, 2.0);
  const BinaryVector v{1, 0, 1, 1, 0};
  const BinaryVector h{0, 1, 1, 0};
  for (double t : {0.25, 3.0, 17.0}) {
    RbmModel s = m;
    s.beta = m.beta * t;
    s.weights /= t;
    s.visible_bias /= t;
    s.hidden_bias /= t;
    CHECK((hidden_probabilities(s, v) - hidden_probabilities(m, v)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((visible_probabilities(s, h) - visible_probabilities(m, h)).cwiseAbs().maxCoeff() <= 1e-12);
  }
  RbmModel cold = m;
  double previous = 1.0;
  for (double beta : {1e-1, 1e-3, 1e-6, 1e-9}) {
    cold.beta = beta;
    const double dev = (hidden_probabilities(cold, v).array() - 0.5).abs().maxCoeff();
    CHECK(dev < previous);
    previous = dev;
  }
  CHECK(previous < 1e-8);
}

TEST_CASE("gibbs chains") {
  SUBCASE("zero model gives fair bits") {
    const auto m = RbmModel::zeros(4, 3);
    Rng rng(123);
    std::vector<double> ones(4, 0.0);
    const int chains = 100000;
    for (int c = 0; c < chains; ++c) {
      const auto v = gibbs_chain(m, BinaryVector(4, 0), 1, rng);
      for (std::size_t i = 0; i < 4; ++i) ones[i] += v[i];
    }
    for (double x : ones) {
      CHECK(x / chains >= 0.49);
      CHECK(x / chains <= 0.51);
    }
  }
  SUBCASE("strong visible bias saturates") {
    auto m = RbmModel::zeros(4, 3);
    m.visible_bias.setConstant(20.0);
    Rng rng(5);
    int all_ones = 0;
    const int chains = 20000;
    for (int c = 0; c < chains; ++c) {
      const auto v = gibbs_chain(m, BinaryVector(4, 0), 1, rng);
      if (v == BinaryVector(4, 1)) ++all_ones;
    }
    CHECK(static_cast<double>(all_ones) / chains > 0.999);
  }
  SUBCASE("seeded determinism") {
    const auto m = random_model(6, 4, 1.0, 2, 1.0);
    Rng a(99), b(99);
    for (int i = 0; i < 50; ++i) CHECK(gibbs_chain(m, BinaryVector(6, 1), 5, a) == gibbs_chain(m, BinaryVector(6, 1), 5, b));
  }
  SUBCASE("k must be positive") {
    Rng rng(1);
    CHECK_THROWS_AS(gibbs_chain(RbmModel::zeros(2, 2), BinaryVector(2, 0), 0, rng), domain_error);
  }
}

TEST_CASE("contrastive divergence update") {
  SUBCASE("zero learning rate leaves the model unchanged") {
    const auto m = random_model(4, 3, 1.0, 8, 0.5);
    const std::vector<BinaryVector> batch{{1, 0, 1, 0}, {0, 1, 1, 1}};
    Rng rng(2);
    CHECK(cd_update(m, batch, 3, 0.0, rng) == m);
  }
  SUBCASE("hand-evaluated single sample") {
    // p(h|v=1) = 1 and p(v|h=1) = 0: data statistic 1, reconstruction statistic 0.
    auto m = RbmModel::zeros(1, 1);
    m.hidden_bias << 800.0;
    m.visible_bias << -800.0;
    const std::vector<BinaryVector> batch{{1}};
    Rng rng(1);
    const auto out = cd_update(m, batch, 1, 0.1, rng);
    CHECK(out.weights(0, 0) == 0.1);
    CHECK(out.visible_bias[0] == -800.0 + 0.1);
    CHECK(out.hidden_bias[0] == 800.0);
  }
  SUBCASE("errors") {
    const auto m = RbmModel::zeros(3, 2);
    Rng rng(1);
    CHECK_THROWS_AS(cd_update(m, std::vector<BinaryVector>{}, 1, 0.1, rng), domain_error);
    CHECK_THROWS_AS(cd_update(m, std::vector<BinaryVector>{{1, 0}}, 1, 0.1, rng), shape_error);
  }
}

TEST_CASE("training") {
  SUBCASE("configuration invariants") {
    TrainConfig c;
    CHECK_NOTHROW(c.validate());
    c.epochs = 0;
    CHECK_THROWS_AS(c.validate(), config_error);
    c = {};
    c.batch_size = 0;
    CHECK_THROWS_AS(c.validate(), config_error);
    c = {};
    c.gibbs_k = 0;
    CHECK_THROWS_AS(c.validate(), config_error);
    c = {};
    c.learning_rate = -1;
    CHECK_THROWS_AS(c.validate(), config_error);
  }
  SUBCASE("empty determinant list") {
    CHECK_THROWS_AS(train(RbmModel::zeros(4, 4), std::vector<Determinant>{}, 2, {}), domain_error);
  }
  SUBCASE("a repeated pattern is reconstructed") {
    const BinaryVector pattern{1, 1, 0, 1, 0, 0, 1, 0};
    std::vector<BinaryVector> data(4000, pattern);
    Rng init(3);
    const auto model = train_vectors(RbmModel::random(8, 8, 1.0, init), data, TrainConfig{});
    // Mean-field reconstruction: p(v | E[h | pattern]).
    const Eigen::VectorXd ph = hidden_probabilities(model, pattern);
    Eigen::VectorXd act = model.visible_bias + model.weights * ph;
    double accuracy = 0.0;
    for (int i = 0; i < 8; ++i) {
      const double p = sigmoid(model.beta * act[i]);
      accuracy += pattern[static_cast<std::size_t>(i)] ? p : 1.0 - p;
    }
    accuracy /= 8;
    CHECK(accuracy > 0.95);
  }
  SUBCASE("identical seeds give identical models") {
    const std::vector<Determinant> dets{{0b0011, 0b0011}, {0b0101, 0b0011}, {0b0011, 0b1001}};
    Rng a(6), b(6);
    const auto m1 = train(RbmModel::random(8, 8, 1.0, a), dets, 4, TrainConfig{});
    const auto m2 = train(RbmModel::random(8, 8, 1.0, b), dets, 4, TrainConfig{});
    CHECK(m1 == m2);
    TrainConfig other;
    other.seed = 2;
    Rng c(6);
    CHECK_FALSE(train(RbmModel::random(8, 8, 1.0, c), dets, 4, other) == m1);
  }
}

TEST_CASE("weighted sampling without replacement") {
  Rng rng(10);
  SUBCASE("proportional first draw") {
    const std::vector<double> w{1.0, 2.0, 3.0, 4.0};
    std::vector<double> hits(4, 0.0);
    const int trials = 100000;
    for (int t = 0; t < trials; ++t) hits[weighted_sample_without_replacement(w, 1, rng)[0]] += 1;
    for (std::size_t i = 0; i < 4; ++i) CHECK(hits[i] / trials == doctest::Approx(w[i] / 10.0).epsilon(0.05));
  }
  SUBCASE("distinct indices") {
    const std::vector<double> w{0.5, 0.1, 0.9, 0.3, 0.7};
    for (int t = 0; t < 1000; ++t) {
      auto idx = weighted_sample_without_replacement(w, 3, rng);
      std::sort(idx.begin(), idx.end());
      CHECK(std::adjacent_find(idx.begin(), idx.end()) == idx.end());
    }
  }
  SUBCASE("zero weights come last") {
    const std::vector<double> w{0.0, 0.2, 0.0, 0.3};
    for (int t = 0; t < 1000; ++t) {
      auto idx = weighted_sample_without_replacement(w, 2, rng);
      std::sort(idx.begin(), idx.end());
      CHECK(idx == std::vector<std::size_t>{1, 3});
    }
  }
  SUBCASE("all-zero weights fall back to uniform") {
    const std::vector<double> w(4, 0.0);
    std::vector<double> hits(4, 0.0);
    const int trials = 40000;
    for (int t = 0; t < trials; ++t) hits[weighted_sample_without_replacement(w, 1, rng)[0]] += 1;
    for (double h : hits) CHECK(h / trials == doctest::Approx(0.25).epsilon(0.05));
  }
  SUBCASE("errors") {
    const std::vector<double> w{1.0, -1.0};
    CHECK_THROWS_AS(weighted_sample_without_replacement(w, 1, rng), domain_error);
    const std::vector<double> ok{1.0};
    CHECK_THROWS_AS(weighted_sample_without_replacement(ok, 2, rng), domain_error);
  }
}

TEST_CASE("determinant sampling") {
  SUBCASE("peaked model reproduces its seed") {
    const Determinant seed{0b0011, 0b0101};
    auto m = RbmModel::zeros(8, 8);
    const auto v = encode_determinant(seed, 4);
    for (int i = 0; i < 8; ++i) m.visible_bias[i] = v[static_cast<std::size_t>(i)] ? 10.0 : -10.0;
    const std::vector<Determinant> seeds{seed};
    const auto out = sample_determinants(m, seeds, 20000, 2, 2, 4, {10, 1, 1});
    const auto same = std::count(out.begin(), out.end(), seed);
    CHECK(static_cast<double>(same) / out.size() >= 0.99);
  }
  SUBCASE("zero model selects orbitals uniformly") {
    const auto m = RbmModel::zeros(8, 8);
    const std::vector<Determinant> seeds{{0b0001, 0b0001}};
    const std::size_t n = 100000;
    const auto out = sample_determinants(m, seeds, n, 1, 1, 4, {1, 7, 1});
    std::vector<double> freq(4, 0.0);
    for (const auto& d : out) freq[static_cast<std::size_t>(std::countr_zero(d.alpha))] += 1;
    for (double f : freq) {
      CHECK(f / n >= 0.23);
      CHECK(f / n <= 0.27);
    }
  }
  SUBCASE("popcounts are exact over a million samples") {
    const auto m = random_model(12, 6, 1.0, 4, 3.0);
    const std::vector<Determinant> seeds{{0b000111, 0b000011}, {0b101010, 0b110000}};
    const auto out = sample_determinants(m, seeds, 1000000, 3, 2, 6, {1, 3, 1});
    std::size_t bad = 0;
    for (const auto& d : out)
      if (!satisfies_pauli(d, 3, 2, 6)) ++bad;
    CHECK(bad == 0);
  }
  SUBCASE("output is independent of the thread count") {
    const auto m = random_model(10, 10, 1.0, 5, 1.0);
    const std::vector<Determinant> seeds{{0b00111, 0b00011}};
    const auto serial = sample_determinants(m, seeds, 3000, 3, 2, 5, {4, 11, 1});
    const auto threaded = sample_determinants(m, seeds, 3000, 3, 2, 5, {4, 11, 3});
    CHECK(serial == threaded);
    CHECK(serial == sample_determinants(m, seeds, 3000, 3, 2, 5, {4, 11, 1}));
  }
  SUBCASE("errors") {
    const auto m = RbmModel::zeros(4, 2);
    CHECK_THROWS_AS(sample_determinants(m, std::vector<Determinant>{}, 1, 1, 1, 2, {}), domain_error);
    const std::vector<Determinant> seeds{{1, 1}};
    CHECK_THROWS_AS(sample_determinants(m, seeds, 0, 1, 1, 2, {}), domain_error);
    CHECK_THROWS_AS(sample_determinants(m, seeds, 1, 1, 1, 3, {}), shape_error);
  }
}

TEST_CASE("checkpoint round trip") {
  auto m = random_model(6, 4, 0.37, 12, 5.0);
  m.weights(0, 0) = std::numbers::pi * 1e-7;
  std::stringstream io;
  save_model(io, m);
  CHECK(io.str().rfind("rbmci-rbm 1\n", 0) == 0);
  const auto back = load_model(io);
  CHECK(back == m);

  std::istringstream bad("not-a-model 1\n");
  CHECK_THROWS_AS(load_model(bad), parse_error);
  std::istringstream truncated("rbmci-rbm 1\n2 2\n1.0\n0.1 0.2\n");
  CHECK_THROWS_AS(load_model(truncated), parse_error);
  std::istringstream version("rbmci-rbm 9\n");
  CHECK_THROWS_AS(load_model(version), parse_error);
}

TEST_CASE("model validation") {
  auto m = RbmModel::zeros(3, 2);
  CHECK_NOTHROW(m.validate());
  m.beta = 0.0;
  CHECK_THROWS_AS(m.validate(), domain_error);
  m.beta = 1.0;
  m.weights(1, 1) = std::nan("");
  CHECK_THROWS_AS(m.validate(), domain_error);
  m = RbmModel::zeros(3, 2);
  m.hidden_bias.resize(3);
  m.hidden_bias.setZero();
  CHECK_THROWS_AS(m.validate(), shape_error);
  Rng rng(1);
  const auto r = RbmModel::random(5, 7, 1.0, rng);
  CHECK(r.weights.cwiseAbs().maxCoeff() <= 0.01);
  CHECK(r.visible_bias.isZero());
  CHECK(r.hidden_bias.isZero());
}
