#include "rbmci/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "rbmci/errors.hpp"

namespace rbmci {

std::vector<double> OccupancyDistribution::total() const {
  std::vector<double> out(alpha.size());
  for (std::size_t p = 0; p < alpha.size(); ++p) out[p] = alpha[p] + beta[p];
  return out;
}

OccupancyDistribution occupancy_distribution(const WavefunctionState& state, int n_orbitals,
                                             bool weighted) {
  if (state.determinants.empty()) throw domain_error("occupancy of an empty state");
  if (weighted && static_cast<std::size_t>(state.coefficients.size()) != state.determinants.size())
    throw shape_error("coefficient count differs from determinant count");
  OccupancyDistribution occ;
  occ.weighted = weighted;
  occ.alpha.assign(static_cast<std::size_t>(n_orbitals), 0.0);
  occ.beta.assign(static_cast<std::size_t>(n_orbitals), 0.0);
  const double unit = 1.0 / static_cast<double>(state.determinants.size());
  for (std::size_t i = 0; i < state.determinants.size(); ++i) {
    const Determinant& d = state.determinants[i];
    double w = unit;
    if (weighted) {
      const double c = state.coefficients[static_cast<Eigen::Index>(i)];
      w = c * c;
    }
    for (int p = 0; p < n_orbitals; ++p) {
      if ((d.alpha >> p) & 1) occ.alpha[static_cast<std::size_t>(p)] += w;
      if ((d.beta >> p) & 1) occ.beta[static_cast<std::size_t>(p)] += w;
    }
  }
  return occ;
}

void write_occupancy_csv(std::ostream& out, const OccupancyDistribution& raw,
                         const OccupancyDistribution& weighted) {
  if (raw.alpha.size() != weighted.alpha.size()) throw shape_error("occupancy vectors differ in length");
  char buf[128];
  out << "spin,orbital_index,raw_frequency,weighted_frequency\n";
  auto block = [&](const char* spin, const std::vector<double>& r, const std::vector<double>& w) {
    for (std::size_t p = 0; p < r.size(); ++p) {
      std::snprintf(buf, sizeof buf, "%s,%zu,%.17g,%.17g\n", spin, p + 1, r[p], w[p]);
      out << buf;
    }
  };
  block("alpha", raw.alpha, weighted.alpha);
  block("beta", raw.beta, weighted.beta);
  block("total", raw.total(), weighted.total());
}

GelmanRubinReport gelman_rubin(const std::vector<std::vector<double>>& chains) {
  GelmanRubinReport r;
  r.chains = chains.size();
  if (r.chains < 2) throw domain_error("Gelman-Rubin needs at least J = 2 chains");
  r.length = chains.front().size();
  if (r.length < 2) throw domain_error("Gelman-Rubin needs chains of length L >= 2");
  for (const auto& c : chains)
    if (c.size() != r.length) throw domain_error("Gelman-Rubin chains must have equal length");

  const double J = static_cast<double>(r.chains);
  const double L = static_cast<double>(r.length);
  for (const auto& c : chains) {
    double s = 0.0;
    for (double x : c) s += x;
    r.chain_means.push_back(s / L);
  }
  for (double m : r.chain_means) r.grand_mean += m;
  r.grand_mean /= J;
  for (double m : r.chain_means) r.between_variance += (m - r.grand_mean) * (m - r.grand_mean);
  r.between_variance *= L / (J - 1.0);
  for (std::size_t j = 0; j < r.chains; ++j) {
    double s = 0.0;
    for (double x : chains[j]) s += (x - r.chain_means[j]) * (x - r.chain_means[j]);
    r.within_variance += s / (L - 1.0);
  }
  r.within_variance /= J;
  if (!(r.within_variance > 0))
    throw domain_error("degenerate Gelman-Rubin input: within-chain variance W is zero");
  r.statistic = std::sqrt(((L - 1.0) / L * r.within_variance + r.between_variance / L) / r.within_variance);
  return r;
}

ComponentwiseGelmanRubin gelman_rubin_componentwise(
    const std::vector<std::vector<std::vector<double>>>& chains) {
  if (chains.size() < 2) throw domain_error("Gelman-Rubin needs at least J = 2 chains");
  if (chains.front().empty()) throw domain_error("Gelman-Rubin needs chains of length L >= 2");
  const std::size_t dim = chains.front().front().size();
  ComponentwiseGelmanRubin out;
  out.max_statistic = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t c = 0; c < dim; ++c) {
    std::vector<std::vector<double>> scalar(chains.size());
    for (std::size_t j = 0; j < chains.size(); ++j)
      for (const auto& sample : chains[j]) {
        if (sample.size() != dim) throw shape_error("chain samples differ in dimension");
        scalar[j].push_back(sample[c]);
      }
    bool flat = true;
    for (const auto& s : scalar)
      for (double x : s) flat = flat && x == s.front();
    double stat = std::numeric_limits<double>::quiet_NaN();
    if (flat)
      ++out.degenerate_components;
    else
      stat = gelman_rubin(scalar).statistic;
    out.statistics.push_back(stat);
    if (!std::isnan(stat) && (std::isnan(out.max_statistic) || stat > out.max_statistic))
      out.max_statistic = stat;
  }
  return out;
}

namespace {

boost::multiprecision::cpp_int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  boost::multiprecision::cpp_int r = 1;
  for (int i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

}  // namespace

boost::multiprecision::cpp_int estimate_fci_size(int n_orbitals, int n_electrons) {
  if (n_electrons < 0 || n_orbitals < 0) throw domain_error("counts must be non-negative");
  if (n_electrons % 2 != 0)
    throw domain_error("the size estimate assumes a closed shell; n_electrons must be even");
  if (n_electrons / 2 > n_orbitals) throw domain_error("n_electrons/2 exceeds n_orbitals");
  const auto b = binomial(n_orbitals, n_electrons / 2);
  return b * b;
}

boost::multiprecision::cpp_int full_space_size(int n_orbitals, int n_alpha, int n_beta) {
  return binomial(n_orbitals, n_alpha) * binomial(n_orbitals, n_beta);
}

CorrelationAccounting correlation_fraction(double e_hf, double e_method, double e_fci) {
  if (e_fci == e_hf) throw domain_error("correlation energy is zero (E_fci == E_hf)");
  if (!(e_fci < e_hf)) throw domain_error("correlation fraction needs E_fci < E_hf");
  CorrelationAccounting acc;
  acc.correlation_percent = 100.0 * (e_method - e_hf) / (e_fci - e_hf);
  acc.non_variational = e_method < e_fci;
  if (acc.non_variational) acc.correlation_percent = 100.0;
  acc.total_energy_percent = 100.0 * (1.0 - std::abs(e_method - e_fci) / std::abs(e_fci));
  return acc;
}

}  // namespace rbmci
