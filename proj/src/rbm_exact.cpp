#include <cmath>
#include <limits>

#include "rbmci/errors.hpp"
#include "rbmci/rbm.hpp"

namespace rbmci {

namespace {

void check_enumerable(const RbmModel& model) {
  model.validate();
  if (model.n_visible() + model.n_hidden() > kMaxEnumerationUnits)
    throw capacity_error("exact enumeration is limited to n_visible + n_hidden <= " +
                         std::to_string(kMaxEnumerationUnits));
}

double softplus(double x) noexcept { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

// b + W^T v for the visible pattern with the given index
Eigen::VectorXd hidden_activation(const RbmModel& model, std::size_t v) {
  Eigen::VectorXd act = model.hidden_bias;
  for (int i = 0; i < model.n_visible(); ++i)
    if ((v >> i) & 1) act += model.weights.row(i).transpose();
  return act;
}

double visible_field(const RbmModel& model, std::size_t v) {
  double s = 0.0;
  for (int i = 0; i < model.n_visible(); ++i)
    if ((v >> i) & 1) s += model.visible_bias[i];
  return s;
}

// log sum_h exp(-beta E(v, h)) by explicit enumeration of h
double log_unnormalized_enumerated(const RbmModel& model, std::size_t v) {
  const Eigen::VectorXd act = hidden_activation(model, v);
  const double field = visible_field(model, v);
  const std::size_t n_h = std::size_t{1} << model.n_hidden();
  std::vector<double> logw(n_h);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t h = 0; h < n_h; ++h) {
    double neg_energy = field;
    for (int j = 0; j < model.n_hidden(); ++j)
      if ((h >> j) & 1) neg_energy += act[j];
    logw[h] = model.beta * neg_energy;
    top = std::max(top, logw[h]);
  }
  double s = 0.0;
  for (double lw : logw) s += std::exp(lw - top);
  return top + std::log(s);
}

// Same quantity with the hidden sum done in closed form.
double log_unnormalized_factorized(const RbmModel& model, std::size_t v) {
  const Eigen::VectorXd act = hidden_activation(model, v);
  double s = model.beta * visible_field(model, v);
  for (Eigen::Index j = 0; j < act.size(); ++j) s += softplus(model.beta * act[j]);
  return s;
}

std::vector<double> log_unnormalized_all(const RbmModel& model) {
  const std::size_t n_v = std::size_t{1} << model.n_visible();
  std::vector<double> out(n_v);
  for (std::size_t v = 0; v < n_v; ++v) out[v] = log_unnormalized_enumerated(model, v);
  return out;
}

double log_sum_exp(const std::vector<double>& x) {
  double top = -std::numeric_limits<double>::infinity();
  for (double v : x) top = std::max(top, v);
  double s = 0.0;
  for (double v : x) s += std::exp(v - top);
  return top + std::log(s);
}

}  // namespace

std::size_t pattern_index(std::span<const std::uint8_t> v) {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i]) idx |= std::size_t{1} << i;
  return idx;
}

BinaryVector pattern_bits(std::size_t index, int n) {
  BinaryVector v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((index >> i) & 1);
  return v;
}

double exact_log_partition(const RbmModel& model) {
  check_enumerable(model);
  return log_sum_exp(log_unnormalized_all(model));
}

std::vector<double> exact_distribution(const RbmModel& model) {
  check_enumerable(model);
  std::vector<double> logw = log_unnormalized_all(model);
  const double log_z = log_sum_exp(logw);
  for (double& x : logw) x = std::exp(x - log_z);
  return logw;
}

Eigen::VectorXd RbmGradient::flatten() const {
  Eigen::VectorXd out(weights.size() + visible_bias.size() + hidden_bias.size());
  out << Eigen::Map<const Eigen::VectorXd>(weights.data(), weights.size()), visible_bias, hidden_bias;
  return out;
}

double exact_log_likelihood(const RbmModel& model, std::span<const BinaryVector> data) {
  check_enumerable(model);
  if (data.empty()) throw domain_error("log-likelihood of an empty data set");
  const double log_z = exact_log_partition(model);
  double s = 0.0;
  for (const auto& v : data) {
    if (v.size() != static_cast<std::size_t>(model.n_visible())) throw shape_error("data vector length does not match the model");
    s += log_unnormalized_factorized(model, pattern_index(v)) - log_z;
  }
  return s / static_cast<double>(data.size());
}

RbmGradient exact_gradient(const RbmModel& model, std::span<const BinaryVector> data) {
  check_enumerable(model);
  if (data.empty()) throw domain_error("gradient of an empty data set");
  const int nv = model.n_visible();
  const int nh = model.n_hidden();
  RbmGradient g{Eigen::MatrixXd::Zero(nv, nh), Eigen::VectorXd::Zero(nv), Eigen::VectorXd::Zero(nh)};

  auto accumulate = [&](std::size_t v, double weight) {
    Eigen::VectorXd ph = hidden_activation(model, v);
    for (Eigen::Index j = 0; j < ph.size(); ++j) ph[j] = sigmoid(model.beta * ph[j]);
    for (int i = 0; i < nv; ++i)
      if ((v >> i) & 1) {
        g.weights.row(i) += weight * ph.transpose();
        g.visible_bias[i] += weight;
      }
    g.hidden_bias += weight * ph;
  };
  const double w_data = 1.0 / static_cast<double>(data.size());
  for (const auto& v : data) {
    if (v.size() != static_cast<std::size_t>(nv)) throw shape_error("data vector length does not match the model");
    accumulate(pattern_index(v), w_data);
  }
  const std::vector<double> p = exact_distribution(model);
  for (std::size_t v = 0; v < p.size(); ++v) accumulate(v, -p[v]);
  g.weights *= model.beta;
  g.visible_bias *= model.beta;
  g.hidden_bias *= model.beta;
  return g;
}

}  // namespace rbmci
