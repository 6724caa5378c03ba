#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rbmci/determinant.hpp"
#include "rbmci/fcidump.hpp"
#include "rbmci/hamiltonian.hpp"
#include "rbmci/rbm.hpp"

namespace rbmci {

struct LoopConfig {
  int max_iterations = 20;
  double prune_threshold = 1e-10;      // on |c_i|^2
  double stability_threshold = 1e-6;   // Hartree
  TrainConfig train;
  int n_hidden = 0;                    // 0: same as the visible layer
  double beta = 1.0;
  double sample_multiplier = 10.0;     // samples per iteration = multiplier * |dets|
  std::size_t sample_cap = 200000;
  bool reinit_weights = false;
  bool keep_reference = true;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  DavidsonOptions davidson;

  void validate() const;
};

struct IterationRecord {
  int iteration = 0;
  double energy = 0.0;            // after pruning; drives the convergence test
  double energy_pre_prune = 0.0;  // over the full diagonalized set
  std::size_t n_dets_in = 0;
  std::size_t n_generated = 0;
  std::size_t n_duplicates_removed = 0;
  std::size_t n_taboo_hits = 0;
  std::size_t n_disconnected_removed = 0;
  std::size_t n_after_diag = 0;
  std::size_t n_pruned = 0;
  std::size_t n_kept = 0;
  double wall_seconds = 0.0;
};

struct ConvergenceReport {
  WavefunctionState final_state;
  std::vector<IterationRecord> records;
  bool converged = false;
  std::size_t taboo_size = 0;
  double reference_energy = 0.0;  // <HF|H|HF>
  std::optional<std::string> failure;
  std::optional<RbmModel> final_model;
};

/// What one iteration saw; handed to the observer passed to run_selection.
struct IterationView {
  const IterationRecord& record;
  const std::vector<Determinant>& diagonalized;  // pre-prune set, sorted by key
  const std::vector<Determinant>& pruned;
  const WavefunctionState& state;                // post-prune
  const RbmModel& model;
};

using IterationObserver = std::function<void(const IterationView&)>;

struct PruneResult {
  std::vector<Determinant> kept;
  std::vector<std::size_t> kept_indices;  // positions in the input state
  std::vector<Determinant> pruned;
};

/// Keeps determinant i iff |c_i|^2 > threshold (the reference is always kept
/// when `keep_reference` is set); adds the keys of the rest to `taboo`.
PruneResult prune(const WavefunctionState& state, double threshold, TabooList& taboo, int n_orbitals,
                  std::optional<Determinant> keep_reference);

inline bool converged(double e_new, double e_old, double stability_threshold) noexcept {
  return std::abs(e_new - e_old) < stability_threshold;
}

/// Iterative RBM-guided selection starting from the CISD space of the
/// reference determinant: train, generate, deduplicate, taboo-filter,
/// connectivity-filter, diagonalize, prune, until the energy change drops
/// below the stability threshold or max_iterations is reached.
///
/// A diagonalization failure ends the run with `failure` set and
/// `converged == false`; an empty determinant set after pruning throws
/// config_error.
ConvergenceReport run_selection(const IntegralTable& table, const LoopConfig& config,
                                const IterationObserver& observer = {});

/// Lowest eigenpair over `dets` using Davidson with the given warm start (or
/// the diagonal guess when `guess` is empty).
WavefunctionState diagonalize(std::vector<Determinant> dets, const IntegralTable& table,
                              const Eigen::VectorXd& guess, const DavidsonOptions& options,
                              unsigned threads);

}  // namespace rbmci
