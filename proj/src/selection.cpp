#include "rbmci/selection.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include "rbmci/errors.hpp"
#include "rbmci/seeding.hpp"
#include "rbmci/slater_condon.hpp"

namespace rbmci {

namespace {

std::uint64_t iteration_seed(std::uint64_t seed, int iteration, std::uint64_t purpose) noexcept {
  return derive_seed(derive_seed(seed, static_cast<std::uint64_t>(iteration)), purpose);
}

enum : std::uint64_t { kInitStream = 1, kTrainStream = 2, kSampleStream = 3 };

Eigen::VectorXd warm_start(const std::vector<Determinant>& dets, const WavefunctionState& previous,
                           int n_orbitals) {
  std::map<DeterminantKey, double> coeff;
  for (std::size_t i = 0; i < previous.determinants.size(); ++i)
    coeff[to_key(previous.determinants[i], n_orbitals)] = previous.coefficients[static_cast<Eigen::Index>(i)];
  Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dets.size()));
  for (std::size_t i = 0; i < dets.size(); ++i)
    if (auto it = coeff.find(to_key(dets[i], n_orbitals)); it != coeff.end())
      g[static_cast<Eigen::Index>(i)] = it->second;
  return g;
}

}  // namespace

void LoopConfig::validate() const {
  train.validate();
  if (max_iterations < 1) throw config_error("max_iterations must be at least 1");
  if (!(prune_threshold >= 0)) throw config_error("prune_threshold must be non-negative");
  if (!(stability_threshold > 0)) throw config_error("stability_threshold must be positive");
  if (n_hidden < 0) throw config_error("n_hidden must be non-negative");
  if (!(beta > 0) || !std::isfinite(beta)) throw config_error("inverse temperature must be positive");
  if (!(sample_multiplier > 0)) throw config_error("sample_multiplier must be positive");
  if (sample_cap < 1) throw config_error("sample_cap must be at least 1");
  if (!(davidson.tolerance > 0) || davidson.max_subspace < 2 || davidson.max_iterations < 1)
    throw config_error("invalid Davidson settings");
}

PruneResult prune(const WavefunctionState& state, double threshold, TabooList& taboo, int n_orbitals,
                  std::optional<Determinant> keep_reference) {
  PruneResult out;
  for (std::size_t i = 0; i < state.determinants.size(); ++i) {
    const Determinant& d = state.determinants[i];
    const double c = state.coefficients[static_cast<Eigen::Index>(i)];
    const bool protected_ref = keep_reference && *keep_reference == d;
    if (c * c > threshold || protected_ref) {
      out.kept.push_back(d);
      out.kept_indices.push_back(i);
    } else {
      out.pruned.push_back(d);
      taboo.insert(to_key(d, n_orbitals));
    }
  }
  return out;
}

WavefunctionState diagonalize(std::vector<Determinant> dets, const IntegralTable& table,
                              const Eigen::VectorXd& guess, const DavidsonOptions& options,
                              unsigned threads) {
  const SparseHamiltonian h = build_hamiltonian(dets, table, threads);
  Eigen::VectorXd start = guess.size() == 0 || guess.norm() == 0 ? diagonal_guess(h) : guess;
  const Eigenpair pair = davidson_lowest(h, start, options);
  return {std::move(dets), pair.coefficients, pair.energy};
}

ConvergenceReport run_selection(const IntegralTable& table, const LoopConfig& config,
                                const IterationObserver& observer) {
  config.validate();
  const int n_orb = table.n_orbitals();
  const int n_alpha = table.n_alpha();
  const int n_beta = table.n_beta();
  const int n_visible = 2 * n_orb;
  const int n_hidden = config.n_hidden > 0 ? config.n_hidden : n_visible;

  ConvergenceReport report;
  const Determinant reference = hf_reference(n_alpha, n_beta, n_orb);
  report.reference_energy = diagonal_element(reference, table);
  const std::optional<Determinant> protected_ref =
      config.keep_reference ? std::optional<Determinant>(reference) : std::nullopt;

  std::vector<Determinant> dets = generate_cisd(reference, n_orb);
  TabooList taboo;
  WavefunctionState state;
  RbmModel model;
  double energy = 0.0;

  for (int iteration = 1; iteration <= config.max_iterations; ++iteration) {
    const auto t0 = std::chrono::steady_clock::now();
    IterationRecord rec;
    rec.iteration = iteration;
    rec.n_dets_in = dets.size();

    if (iteration == 1 || config.reinit_weights) {
      Rng init(iteration_seed(config.seed, iteration, kInitStream));
      model = RbmModel::random(n_visible, n_hidden, config.beta, init);
    }
    TrainConfig train = config.train;
    train.seed = iteration_seed(config.seed, iteration, kTrainStream);
    model = rbmci::train(std::move(model), dets, n_orb, train);

    const auto budget = static_cast<std::size_t>(
        std::ceil(config.sample_multiplier * static_cast<double>(dets.size())));
    const std::size_t n_samples = std::clamp<std::size_t>(budget, 1, config.sample_cap);
    SamplerConfig sampler{config.train.gibbs_k, iteration_seed(config.seed, iteration, kSampleStream),
                          config.threads};
    std::vector<Determinant> pool =
        sample_determinants(model, dets, n_samples, n_alpha, n_beta, n_orb, sampler);
    rec.n_generated = pool.size();
    pool.insert(pool.end(), dets.begin(), dets.end());

    DedupeResult unique = dedupe_and_taboo(pool, taboo, n_orb);
    rec.n_duplicates_removed = unique.duplicates_removed;
    rec.n_taboo_hits = unique.taboo_hits;

    DeterminantSet current(n_orb);
    for (const auto& d : dets) current.insert(d);
    std::vector<Determinant> fresh;
    for (const auto& d : unique.kept)
      if (!current.contains(d)) fresh.push_back(d);
    const std::vector<Determinant> connected = connectivity_filter(fresh, dets);
    rec.n_disconnected_removed = fresh.size() - connected.size();
    for (const auto& d : connected) current.insert(d);
    std::vector<Determinant> diagonalized = current.to_vector();
    rec.n_after_diag = diagonalized.size();

    WavefunctionState full;
    try {
      full = diagonalize(diagonalized, table, warm_start(diagonalized, state, n_orb), config.davidson,
                         config.threads);
    } catch (const error& e) {
      report.failure = std::string("diagonalization failed at iteration ") + std::to_string(iteration) +
                       ": " + e.what();
      break;
    }
    rec.energy_pre_prune = full.energy;

    PruneResult pr = prune(full, config.prune_threshold, taboo, n_orb, protected_ref);
    rec.n_pruned = pr.pruned.size();
    rec.n_kept = pr.kept.size();
    if (pr.kept.empty())
      throw config_error("pruning removed every determinant; prune_threshold is too aggressive");

    if (pr.pruned.empty()) {
      state = std::move(full);
    } else {
      Eigen::VectorXd guess(static_cast<Eigen::Index>(pr.kept.size()));
      for (std::size_t k = 0; k < pr.kept_indices.size(); ++k)
        guess[static_cast<Eigen::Index>(k)] = full.coefficients[static_cast<Eigen::Index>(pr.kept_indices[k])];
      try {
        state = diagonalize(pr.kept, table, guess, config.davidson, config.threads);
      } catch (const error& e) {
        report.failure = std::string("diagonalization failed at iteration ") + std::to_string(iteration) +
                         ": " + e.what();
        break;
      }
    }
    dets = state.determinants;
    rec.energy = state.energy;
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.records.push_back(rec);
    report.final_state = state;
    report.taboo_size = taboo.size();
    report.final_model = model;
    if (observer) observer(IterationView{rec, diagonalized, pr.pruned, state, model});

    if (converged(rec.energy, energy, config.stability_threshold)) {
      report.converged = true;
      break;
    }
    energy = rec.energy;
  }
  report.taboo_size = taboo.size();
  return report;
}

}  // namespace rbmci
