#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <iosfwd>
#include <vector>

#include "rbmci/hamiltonian.hpp"

namespace rbmci {

/// How often each spatial orbital is occupied across a determinant set, per spin.
/// Raw frequencies count determinants; weighted frequencies sum |c_i|^2.
struct OccupancyDistribution {
  std::vector<double> alpha;
  std::vector<double> beta;
  bool weighted = false;

  /// alpha + beta per orbital
  std::vector<double> total() const;
};

OccupancyDistribution occupancy_distribution(const WavefunctionState& state, int n_orbitals,
                                             bool weighted);

/// CSV with header `spin,orbital_index,raw_frequency,weighted_frequency`;
/// spin is alpha, beta or total (their sum); orbital_index is 1-based.
void write_occupancy_csv(std::ostream& out, const OccupancyDistribution& raw,
                         const OccupancyDistribution& weighted);

struct GelmanRubinReport {
  std::size_t chains = 0;  // J
  std::size_t length = 0;  // L
  std::vector<double> chain_means;
  double grand_mean = 0.0;
  double between_variance = 0.0;  // B = L/(J-1) sum_j (mean_j - grand)^2
  double within_variance = 0.0;   // W = 1/J sum_j s_j^2
  double statistic = 0.0;         // R = sqrt(((L-1)/L W + B/L) / W)
};

/// Potential scale reduction of J >= 2 equal-length chains with L >= 2.
/// Throws domain_error on too few chains/samples, ragged chains or W == 0.
GelmanRubinReport gelman_rubin(const std::vector<std::vector<double>>& chains);

/// Gelman-Rubin applied independently to each component of vector-valued
/// chains (chains[j][t][component]). Components whose within-chain variance
/// is zero are skipped and counted.
struct ComponentwiseGelmanRubin {
  std::vector<double> statistics;  // NaN for skipped components
  std::size_t degenerate_components = 0;
  double max_statistic = 0.0;      // NaN when every component is degenerate
};
ComponentwiseGelmanRubin gelman_rubin_componentwise(
    const std::vector<std::vector<std::vector<double>>>& chains);

/// Closed-shell estimate binom(n_orbitals, n_electrons/2)^2 of the full CI size.
boost::multiprecision::cpp_int estimate_fci_size(int n_orbitals, int n_electrons);

/// Exact count binom(n_orbitals, n_alpha) * binom(n_orbitals, n_beta).
boost::multiprecision::cpp_int full_space_size(int n_orbitals, int n_alpha, int n_beta);

struct CorrelationAccounting {
  double correlation_percent = 0.0;   // 100 (E - E_hf)/(E_fci - E_hf), capped at 100
  double total_energy_percent = 0.0;  // 100 (1 - |E - E_fci| / |E_fci|)
  bool non_variational = false;       // E below E_fci
};

CorrelationAccounting correlation_fraction(double e_hf, double e_method, double e_fci);

}  // namespace rbmci
