#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "rbmci/determinant.hpp"

namespace rbmci {

using Rng = std::mt19937_64;
using BinaryVector = std::vector<std::uint8_t>;

/// Bernoulli-Bernoulli restricted Boltzmann machine,
///   E(v, h) = -a.v - b.h - v^T W h,
/// whose conditionals are sharpened by the inverse temperature beta:
///   p(h_j = 1 | v) = sigmoid(beta (b_j + sum_i v_i w_ij)),
///   p(v_i = 1 | h) = sigmoid(beta (a_i + sum_j h_j w_ij)).
struct RbmModel {
  Eigen::MatrixXd weights;        // n_visible x n_hidden
  Eigen::VectorXd visible_bias;   // a
  Eigen::VectorXd hidden_bias;    // b
  double beta = 1.0;

  int n_visible() const noexcept { return static_cast<int>(visible_bias.size()); }
  int n_hidden() const noexcept { return static_cast<int>(hidden_bias.size()); }

  static RbmModel zeros(int n_visible, int n_hidden, double beta = 1.0);
  /// Weights i.i.d. uniform in [-scale, scale], biases zero.
  static RbmModel random(int n_visible, int n_hidden, double beta, Rng& rng, double scale = 0.01);

  /// Throws shape_error / domain_error on inconsistent shapes, beta <= 0 or non-finite values.
  void validate() const;

  friend bool operator==(const RbmModel& x, const RbmModel& y) {
    return x.beta == y.beta && x.weights == y.weights && x.visible_bias == y.visible_bias &&
           x.hidden_bias == y.hidden_bias;
  }
};

struct TrainConfig {
  int epochs = 2;
  int batch_size = 16;
  int gibbs_k = 10;
  double learning_rate = 0.01;
  std::uint64_t seed = 1;

  void validate() const;
};

double sigmoid(double x) noexcept;

/// Visible layout: bit i < n_orbitals is the alpha occupation of orbital i+1,
/// bit n_orbitals + i the beta occupation.
BinaryVector encode_determinant(const Determinant& d, int n_orbitals);
Determinant decode_determinant(std::span<const std::uint8_t> v, int n_orbitals);

double rbm_energy(const RbmModel& model, std::span<const std::uint8_t> v,
                  std::span<const std::uint8_t> h);

Eigen::VectorXd hidden_probabilities(const RbmModel& model, std::span<const std::uint8_t> v);
Eigen::VectorXd visible_probabilities(const RbmModel& model, std::span<const std::uint8_t> h);

BinaryVector sample_bits(const Eigen::VectorXd& probabilities, Rng& rng);

/// k alternations of (h ~ p(h|v), v ~ p(v|h)) starting from v0; returns the final v.
BinaryVector gibbs_chain(const RbmModel& model, std::span<const std::uint8_t> v0, int k, Rng& rng);

struct GibbsEnd {
  BinaryVector visible;
  Eigen::VectorXd visible_probabilities;  // p(v|h) the final visible sample was drawn from
};
GibbsEnd gibbs_chain_end(const RbmModel& model, std::span<const std::uint8_t> v0, int k, Rng& rng);

/// One contrastive-divergence step over a batch:
///   dW = eps (<v p(h|v)^T>_data - <v_k p(h|v_k)^T>_recon),
///   da = eps (<v>_data - <v_k>_recon),  db = eps (<p(h|v)>_data - <p(h|v_k)>_recon),
/// averaged over the batch, with v_k the k-step Gibbs reconstruction.
RbmModel cd_update(const RbmModel& model, std::span<const BinaryVector> batch, int gibbs_k,
                   double learning_rate, Rng& rng);

/// Mini-batch CD training; the data order is reshuffled each epoch.
RbmModel train_vectors(RbmModel model, std::vector<BinaryVector> data, const TrainConfig& config);

/// Trains on the visible encodings of `dets` (each determinant once, unweighted).
RbmModel train(RbmModel model, std::span<const Determinant> dets, int n_orbitals,
               const TrainConfig& config);

/// Indices of `count` distinct entries drawn with probability proportional to
/// weight, without replacement (Efraimidis-Spirakis keys). Zero weights are
/// only chosen once all positive weights are exhausted, uniformly among
/// themselves; all-zero weights therefore fall back to uniform selection.
std::vector<std::size_t> weighted_sample_without_replacement(std::span<const double> weights,
                                                             std::size_t count, Rng& rng);

struct SamplerConfig {
  int gibbs_k = 10;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

/// Generates `n_samples` determinants. Each sample uses its own RNG stream
/// derived from (seed, sample index): pick a seed determinant uniformly, run a
/// k-step Gibbs chain from its encoding, then draw exactly n_alpha / n_beta
/// orbitals per spin block using the final visible probabilities as weights.
/// Output may contain duplicates.
std::vector<Determinant> sample_determinants(const RbmModel& model,
                                             std::span<const Determinant> seeds,
                                             std::size_t n_samples, int n_alpha, int n_beta,
                                             int n_orbitals, const SamplerConfig& config);

/// Checkpoint format (text):
///   rbmci-rbm 1
///   <n_visible> <n_hidden>
///   <beta>
///   n_visible lines of n_hidden weights (row-major)
///   one line of n_visible visible biases
///   one line of n_hidden hidden biases
/// Values are written with 17 significant digits so a load reproduces the model exactly.
void save_model(std::ostream& out, const RbmModel& model);
RbmModel load_model(std::istream& in);

// Exact enumeration, for models with n_visible + n_hidden <= kMaxEnumerationUnits.

inline constexpr int kMaxEnumerationUnits = 24;

/// p(v) for every visible pattern; index bit i is v_i. Computed by summing
/// exp(-beta E(v,h)) over all (v, h).
std::vector<double> exact_distribution(const RbmModel& model);

/// log Z with Z = sum_{v,h} exp(-beta E(v,h)).
double exact_log_partition(const RbmModel& model);

struct RbmGradient {
  Eigen::MatrixXd weights;
  Eigen::VectorXd visible_bias;
  Eigen::VectorXd hidden_bias;

  Eigen::VectorXd flatten() const;
};

/// Mean log p(v) over `data`.
double exact_log_likelihood(const RbmModel& model, std::span<const BinaryVector> data);

/// Gradient of exact_log_likelihood with respect to (W, a, b).
RbmGradient exact_gradient(const RbmModel& model, std::span<const BinaryVector> data);

std::size_t pattern_index(std::span<const std::uint8_t> v);
BinaryVector pattern_bits(std::size_t index, int n);

}  // namespace rbmci
