#include "rbmci/rbm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "rbmci/errors.hpp"
#include "rbmci/parallel.hpp"
#include "rbmci/seeding.hpp"

namespace rbmci {

namespace {

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

Rng stream(std::uint64_t seed, std::uint64_t index) { return Rng(derive_seed(seed, index)); }

}  // namespace

RbmModel RbmModel::zeros(int n_visible, int n_hidden, double beta) {
  if (n_visible < 1 || n_hidden < 0) throw shape_error("RBM needs n_visible >= 1 and n_hidden >= 0");
  RbmModel m;
  m.weights = Eigen::MatrixXd::Zero(n_visible, n_hidden);
  m.visible_bias = Eigen::VectorXd::Zero(n_visible);
  m.hidden_bias = Eigen::VectorXd::Zero(n_hidden);
  m.beta = beta;
  m.validate();
  return m;
}

RbmModel RbmModel::random(int n_visible, int n_hidden, double beta, Rng& rng, double scale) {
  RbmModel m = zeros(n_visible, n_hidden, beta);
  std::uniform_real_distribution<double> init(-scale, scale);
  for (Eigen::Index i = 0; i < m.weights.rows(); ++i)
    for (Eigen::Index j = 0; j < m.weights.cols(); ++j) m.weights(i, j) = init(rng);
  return m;
}

void RbmModel::validate() const {
  if (weights.rows() != visible_bias.size() || weights.cols() != hidden_bias.size())
    throw shape_error("RBM weight matrix shape does not match bias lengths");
  if (!(beta > 0) || !std::isfinite(beta)) throw domain_error("inverse temperature must be positive and finite");
  if (!weights.allFinite() || !visible_bias.allFinite() || !hidden_bias.allFinite())
    throw domain_error("RBM parameters must be finite");
}

void TrainConfig::validate() const {
  if (epochs < 1 || batch_size < 1 || gibbs_k < 1)
    throw config_error("epochs, batch_size and gibbs_k must all be at least 1");
  if (!(learning_rate >= 0) || !std::isfinite(learning_rate))
    throw config_error("learning rate must be finite and non-negative");
}

double sigmoid(double x) noexcept {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

BinaryVector encode_determinant(const Determinant& d, int n_orbitals) {
  BinaryVector v(static_cast<std::size_t>(2 * n_orbitals), 0);
  for (int p = 0; p < n_orbitals; ++p) {
    v[static_cast<std::size_t>(p)] = static_cast<std::uint8_t>((d.alpha >> p) & 1);
    v[static_cast<std::size_t>(n_orbitals + p)] = static_cast<std::uint8_t>((d.beta >> p) & 1);
  }
  return v;
}

Determinant decode_determinant(std::span<const std::uint8_t> v, int n_orbitals) {
  if (v.size() != static_cast<std::size_t>(2 * n_orbitals))
    throw shape_error("visible vector length must be 2*n_orbitals");
  Determinant d;
  for (int p = 0; p < n_orbitals; ++p) {
    if (v[static_cast<std::size_t>(p)]) d.alpha |= Bitmask{1} << p;
    if (v[static_cast<std::size_t>(n_orbitals + p)]) d.beta |= Bitmask{1} << p;
  }
  return d;
}

double rbm_energy(const RbmModel& model, std::span<const std::uint8_t> v,
                  std::span<const std::uint8_t> h) {
  if (v.size() != static_cast<std::size_t>(model.n_visible()) ||
      h.size() != static_cast<std::size_t>(model.n_hidden()))
    throw shape_error("energy arguments do not match the model layer sizes");
  double e = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i]) e -= model.visible_bias[static_cast<Eigen::Index>(i)];
  for (std::size_t j = 0; j < h.size(); ++j)
    if (h[j]) e -= model.hidden_bias[static_cast<Eigen::Index>(j)];
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i]) continue;
    for (std::size_t j = 0; j < h.size(); ++j)
      if (h[j]) e -= model.weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  return e;
}

Eigen::VectorXd hidden_probabilities(const RbmModel& model, std::span<const std::uint8_t> v) {
  if (v.size() != static_cast<std::size_t>(model.n_visible()))
    throw shape_error("visible vector length does not match the model");
  Eigen::VectorXd act = model.hidden_bias;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i]) act += model.weights.row(static_cast<Eigen::Index>(i)).transpose();
  for (Eigen::Index j = 0; j < act.size(); ++j) act[j] = sigmoid(model.beta * act[j]);
  return act;
}

Eigen::VectorXd visible_probabilities(const RbmModel& model, std::span<const std::uint8_t> h) {
  if (h.size() != static_cast<std::size_t>(model.n_hidden()))
    throw shape_error("hidden vector length does not match the model");
  Eigen::VectorXd act = model.visible_bias;
  for (std::size_t j = 0; j < h.size(); ++j)
    if (h[j]) act += model.weights.col(static_cast<Eigen::Index>(j));
  for (Eigen::Index i = 0; i < act.size(); ++i) act[i] = sigmoid(model.beta * act[i]);
  return act;
}

BinaryVector sample_bits(const Eigen::VectorXd& probabilities, Rng& rng) {
  BinaryVector out(static_cast<std::size_t>(probabilities.size()));
  for (Eigen::Index i = 0; i < probabilities.size(); ++i)
    out[static_cast<std::size_t>(i)] = uniform01(rng) < probabilities[i] ? 1 : 0;
  return out;
}

GibbsEnd gibbs_chain_end(const RbmModel& model, std::span<const std::uint8_t> v0, int k, Rng& rng) {
  if (k < 1) throw domain_error("Gibbs chain needs k >= 1");
  if (v0.size() != static_cast<std::size_t>(model.n_visible()))
    throw shape_error("visible vector length does not match the model");
  const Eigen::Index nv = model.n_visible();
  const Eigen::Index nh = model.n_hidden();
  GibbsEnd end;
  end.visible.assign(v0.begin(), v0.end());
  end.visible_probabilities.resize(nv);
  BinaryVector h(static_cast<std::size_t>(nh));
  Eigen::VectorXd act_h(nh);
  for (int step = 0; step < k; ++step) {
    act_h = model.hidden_bias;
    for (Eigen::Index i = 0; i < nv; ++i)
      if (end.visible[static_cast<std::size_t>(i)]) act_h += model.weights.row(i).transpose();
    for (Eigen::Index j = 0; j < nh; ++j)
      h[static_cast<std::size_t>(j)] = uniform01(rng) < sigmoid(model.beta * act_h[j]) ? 1 : 0;
    Eigen::VectorXd& pv = end.visible_probabilities;
    pv = model.visible_bias;
    for (Eigen::Index j = 0; j < nh; ++j)
      if (h[static_cast<std::size_t>(j)]) pv += model.weights.col(j);
    for (Eigen::Index i = 0; i < nv; ++i) {
      pv[i] = sigmoid(model.beta * pv[i]);
      end.visible[static_cast<std::size_t>(i)] = uniform01(rng) < pv[i] ? 1 : 0;
    }
  }
  return end;
}

BinaryVector gibbs_chain(const RbmModel& model, std::span<const std::uint8_t> v0, int k, Rng& rng) {
  return gibbs_chain_end(model, v0, k, rng).visible;
}

RbmModel cd_update(const RbmModel& model, std::span<const BinaryVector> batch, int gibbs_k,
                   double learning_rate, Rng& rng) {
  if (batch.empty()) throw domain_error("contrastive divergence needs a nonempty batch");
  if (gibbs_k < 1) throw domain_error("contrastive divergence needs gibbs_k >= 1");
  const Eigen::Index nv = model.n_visible();
  const Eigen::Index nh = model.n_hidden();
  Eigen::MatrixXd dw = Eigen::MatrixXd::Zero(nv, nh);
  Eigen::VectorXd da = Eigen::VectorXd::Zero(nv);
  Eigen::VectorXd db = Eigen::VectorXd::Zero(nh);
  auto as_vector = [](const BinaryVector& v) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) x[static_cast<Eigen::Index>(i)] = v[i];
    return x;
  };
  for (const auto& v0 : batch) {
    if (v0.size() != static_cast<std::size_t>(nv)) throw shape_error("batch vector length does not match the model");
    const Eigen::VectorXd ph0 = hidden_probabilities(model, v0);
    BinaryVector vk = v0;
    Eigen::VectorXd phk = ph0;
    for (int step = 0; step < gibbs_k; ++step) {
      const BinaryVector h = sample_bits(phk, rng);
      vk = sample_bits(visible_probabilities(model, h), rng);
      phk = hidden_probabilities(model, vk);
    }
    const Eigen::VectorXd x0 = as_vector(v0);
    const Eigen::VectorXd xk = as_vector(vk);
    dw += x0 * ph0.transpose() - xk * phk.transpose();
    da += x0 - xk;
    db += ph0 - phk;
  }
  const double scale = learning_rate / static_cast<double>(batch.size());
  RbmModel out = model;
  out.weights += scale * dw;
  out.visible_bias += scale * da;
  out.hidden_bias += scale * db;
  return out;
}

RbmModel train_vectors(RbmModel model, std::vector<BinaryVector> data, const TrainConfig& config) {
  config.validate();
  model.validate();
  if (data.empty()) throw domain_error("training set is empty");
  Rng rng(config.seed);
  const std::size_t batch = static_cast<std::size_t>(config.batch_size);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(data.begin(), data.end(), rng);
    for (std::size_t start = 0; start < data.size(); start += batch) {
      const std::size_t len = std::min(batch, data.size() - start);
      model = cd_update(model, std::span<const BinaryVector>(data).subspan(start, len),
                        config.gibbs_k, config.learning_rate, rng);
    }
  }
  return model;
}

RbmModel train(RbmModel model, std::span<const Determinant> dets, int n_orbitals,
               const TrainConfig& config) {
  if (dets.empty()) throw domain_error("cannot train on an empty determinant list");
  if (model.n_visible() != 2 * n_orbitals) throw shape_error("model visible layer must be 2*n_orbitals");
  std::vector<BinaryVector> data;
  data.reserve(dets.size());
  for (const auto& d : dets) data.push_back(encode_determinant(d, n_orbitals));
  return train_vectors(std::move(model), std::move(data), config);
}

std::vector<std::size_t> weighted_sample_without_replacement(std::span<const double> weights,
                                                             std::size_t count, Rng& rng) {
  if (count > weights.size()) throw domain_error("cannot draw more items than available without replacement");
  struct Keyed {
    double key;
    double tiebreak;
    std::size_t index;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double w = weights[i];
    if (!(w >= 0) || !std::isfinite(w)) throw domain_error("sampling weights must be finite and non-negative");
    double u = uniform01(rng);
    while (u == 0.0) u = uniform01(rng);
    const double key = w > 0 ? std::log(u) / w : -std::numeric_limits<double>::infinity();
    keyed.push_back({key, u, i});
  }
  std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(count), keyed.end(),
                    [](const Keyed& x, const Keyed& y) {
                      if (x.key != y.key) return x.key > y.key;
                      return x.tiebreak > y.tiebreak;
                    });
  std::vector<std::size_t> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = keyed[k].index;
  return out;
}

std::vector<Determinant> sample_determinants(const RbmModel& model,
                                             std::span<const Determinant> seeds,
                                             std::size_t n_samples, int n_alpha, int n_beta,
                                             int n_orbitals, const SamplerConfig& config) {
  if (seeds.empty()) throw domain_error("sampling needs at least one seed determinant");
  if (n_samples < 1) throw domain_error("sampling needs n_samples >= 1");
  if (model.n_visible() != 2 * n_orbitals) throw shape_error("model visible layer must be 2*n_orbitals");
  if (n_alpha < 0 || n_beta < 0 || n_alpha > n_orbitals || n_beta > n_orbitals)
    throw capacity_error("electron count per spin exceeds the number of orbitals");
  std::vector<Determinant> out(n_samples);
  const auto block = static_cast<std::size_t>(n_orbitals);
  parallel_for(n_samples, config.threads, [&](std::size_t s) {
    Rng rng = stream(config.seed, s);
    const auto pick = std::uniform_int_distribution<std::size_t>(0, seeds.size() - 1)(rng);
    const BinaryVector v0 = encode_determinant(seeds[pick], n_orbitals);
    const GibbsEnd end = gibbs_chain_end(model, v0, config.gibbs_k, rng);
    const double* p = end.visible_probabilities.data();
    Determinant d;
    for (std::size_t k : weighted_sample_without_replacement(std::span<const double>(p, block),
                                                             static_cast<std::size_t>(n_alpha), rng))
      d.alpha |= Bitmask{1} << k;
    for (std::size_t k : weighted_sample_without_replacement(std::span<const double>(p + block, block),
                                                             static_cast<std::size_t>(n_beta), rng))
      d.beta |= Bitmask{1} << k;
    out[s] = d;
  });
  return out;
}

void save_model(std::ostream& out, const RbmModel& model) {
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "rbmci-rbm 1\n" << model.n_visible() << ' ' << model.n_hidden() << '\n' << num(model.beta) << '\n';
  for (Eigen::Index i = 0; i < model.weights.rows(); ++i) {
    for (Eigen::Index j = 0; j < model.weights.cols(); ++j) out << (j ? " " : "") << num(model.weights(i, j));
    out << '\n';
  }
  for (Eigen::Index i = 0; i < model.visible_bias.size(); ++i) out << (i ? " " : "") << num(model.visible_bias[i]);
  out << '\n';
  for (Eigen::Index j = 0; j < model.hidden_bias.size(); ++j) out << (j ? " " : "") << num(model.hidden_bias[j]);
  out << '\n';
}

RbmModel load_model(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "rbmci-rbm") throw parse_error("not an RBM checkpoint", 1);
  if (version != 1) throw parse_error("unsupported RBM checkpoint version " + std::to_string(version), 1);
  int nv = 0, nh = 0;
  double beta = 0;
  if (!(in >> nv >> nh >> beta)) throw parse_error("truncated RBM checkpoint header", 0);
  RbmModel m = RbmModel::zeros(nv, nh, beta);
  auto read = [&](double& x) {
    std::string tok;
    if (!(in >> tok)) throw parse_error("truncated RBM checkpoint", 0);
    char* end = nullptr;
    x = std::strtod(tok.c_str(), &end);
    if (*end != '\0') throw parse_error("non-numeric value '" + tok + "' in RBM checkpoint", 0);
  };
  for (Eigen::Index i = 0; i < nv; ++i)
    for (Eigen::Index j = 0; j < nh; ++j) read(m.weights(i, j));
  for (Eigen::Index i = 0; i < nv; ++i) read(m.visible_bias[i]);
  for (Eigen::Index j = 0; j < nh; ++j) read(m.hidden_bias[j]);
  m.validate();
  return m;
}

}  // namespace rbmci
