#include "rbmci/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "rbmci/diagnostics.hpp"
#include "rbmci/errors.hpp"
#include "rbmci/slater_condon.hpp"

namespace rbmci {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fixed(double v, int digits = 10) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void require_readable(const std::string& path, const char* what) {
  if (path.empty()) throw file_error(std::string(what) + " path is required");
  std::ifstream in(path);
  if (!in) throw file_error(std::string("cannot read ") + what + " '" + path + "'");
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw file_error("cannot write '" + path.string() + "'");
  return out;
}

fs::path prepare_out_dir(const RunManifest& m) {
  fs::path dir = m.out_dir.empty() ? fs::path(default_output_dir()) : fs::path(m.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw file_error("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const parse_error& e) {
    err << "parse error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::parse_failure);
  } catch (const index_error& e) {
    err << "index error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::parse_failure);
  } catch (const config_error& e) {
    err << "configuration error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::config_failure);
  } catch (const file_error& e) {
    err << "file error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::file_failure);
  } catch (const capacity_error& e) {
    err << "refused: " << e.what() << '\n';
    return static_cast<int>(ExitCode::refused);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::failure);
  }
}

json config_json(const AppConfig& c) {
  const LoopConfig& l = c.loop;
  return {{"max_iterations", l.max_iterations},
          {"prune_threshold", l.prune_threshold},
          {"stability_threshold", l.stability_threshold},
          {"epochs", l.train.epochs},
          {"batch_size", l.train.batch_size},
          {"gibbs_k", l.train.gibbs_k},
          {"learning_rate", l.train.learning_rate},
          {"n_hidden", l.n_hidden},
          {"beta", l.beta},
          {"sample_multiplier", l.sample_multiplier},
          {"sample_cap", l.sample_cap},
          {"reinit_weights", l.reinit_weights},
          {"keep_reference", l.keep_reference},
          {"seed", l.seed},
          {"davidson_tolerance", l.davidson.tolerance},
          {"davidson_max_subspace", l.davidson.max_subspace},
          {"davidson_max_iterations", l.davidson.max_iterations}};
}

json record_json(const IterationRecord& r) {
  return {{"iteration", r.iteration},
          {"energy", r.energy},
          {"energy_pre_prune", r.energy_pre_prune},
          {"n_dets_in", r.n_dets_in},
          {"n_generated", r.n_generated},
          {"n_duplicates_removed", r.n_duplicates_removed},
          {"n_taboo_hits", r.n_taboo_hits},
          {"n_disconnected_removed", r.n_disconnected_removed},
          {"n_after_diag", r.n_after_diag},
          {"n_pruned", r.n_pruned},
          {"n_kept", r.n_kept},
          {"wall_seconds", r.wall_seconds}};
}

json gelman_rubin_json(const GelmanRubinReport& r) {
  return {{"J", r.chains},
          {"L", r.length},
          {"chain_means", r.chain_means},
          {"grand_mean", r.grand_mean},
          {"B", r.between_variance},
          {"W", r.within_variance},
          {"R", r.statistic}};
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void print_state_summary(std::ostream& out, const char* label, double energy, std::size_t n_dets) {
  out << label << " energy: " << fixed(energy) << " Ha\n" << "determinants: " << n_dets << '\n';
}

WavefunctionState solve_space(std::vector<Determinant> dets, const IntegralTable& table,
                              const AppConfig& config) {
  const SparseHamiltonian h = build_hamiltonian(dets, table, config.loop.threads);
  const Eigenpair pair = h.dimension() <= kDefaultDenseCutoff
                             ? dense_lowest(h)
                             : davidson_lowest(h, diagonal_guess(h), config.loop.davidson);
  return {std::move(dets), pair.coefficients, pair.energy};
}

}  // namespace

std::string default_output_dir() {
  if (const char* env = std::getenv("RBMCI_OUTPUT_DIR"); env && *env) return env;
  return "rbmci-out";
}

std::string group_thousands(const std::string& digits) {
  std::string out;
  const std::size_t n = digits.size();
  for (std::size_t i = 0; i < n; ++i) {
    out += digits[i];
    const std::size_t left = n - i - 1;
    if (left > 0 && left % 3 == 0) out += ',';
  }
  return out;
}

AppConfig resolve_config(const RunManifest& m) {
  AppConfig config;
  config.loop.threads = 0;  // all hardware threads unless configured
  if (!m.config_path.empty()) apply_config_file(config, m.config_path);
  if (m.seed) config.loop.seed = *m.seed;
  if (m.threads) config.loop.threads = *m.threads;
  if (m.max_iterations) config.loop.max_iterations = *m.max_iterations;
  if (m.prune_threshold) config.loop.prune_threshold = *m.prune_threshold;
  if (m.stability_threshold) config.loop.stability_threshold = *m.stability_threshold;
  if (m.temperature) {
    if (!(*m.temperature > 0)) throw config_error("temperature must be positive");
    config.loop.beta = 1.0 / *m.temperature;
  }
  if (m.reinit_weights) config.loop.reinit_weights = *m.reinit_weights;
  if (m.fci_cap) config.fci_cap = *m.fci_cap;
  if (m.dump_determinants) config.dump_determinants = *m.dump_determinants;
  config.loop.validate();
  return config;
}

int cmd_run(const RunManifest& m, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_readable(m.fcidump, "FCIDUMP");
    if (!m.config_path.empty()) require_readable(m.config_path, "config");
    const AppConfig config = resolve_config(m);
    const IntegralTable table = read_fcidump(m.fcidump);
    const int n_orb = table.n_orbitals();
    const fs::path dir = prepare_out_dir(m);

    std::ofstream log = open_output(dir / "iterations.jsonl");
    auto observer = [&](const IterationView& view) {
      json line = record_json(view.record);
      const auto weighted = occupancy_distribution(view.state, n_orb, true);
      line["weighted_occupancy"] = {{"alpha", weighted.alpha}, {"beta", weighted.beta}};
      log << line.dump() << '\n';
      log.flush();
      if (config.dump_determinants) {
        char name[64];
        std::snprintf(name, sizeof name, "determinants_iter%03d.txt", view.record.iteration);
        std::ofstream snap = open_output(dir / name);
        write_determinants(snap, view.state.determinants, n_orb);
      }
    };
    const ConvergenceReport report = run_selection(table, config.loop, observer);

    json records = json::array();
    for (const auto& r : report.records) records.push_back(record_json(r));
    json doc = {{"schema", "rbmci-report/1"},
                {"fcidump", m.fcidump},
                {"n_orbitals", n_orb},
                {"n_electrons", table.n_electrons()},
                {"ms2", table.ms2()},
                {"converged", report.converged},
                {"failure", report.failure ? json(*report.failure) : json(nullptr)},
                {"iterations", report.records.size()},
                {"final_energy", report.records.empty() ? json(nullptr) : json(report.final_state.energy)},
                {"reference_energy", report.reference_energy},
                {"n_determinants", report.final_state.determinants.size()},
                {"taboo_size", report.taboo_size},
                {"config", config_json(config)},
                {"records", records}};
    open_output(dir / "report.json") << doc.dump(2) << '\n';

    if (!report.final_state.determinants.empty()) {
      std::ofstream occ = open_output(dir / "occupancy.csv");
      write_occupancy_csv(occ, occupancy_distribution(report.final_state, n_orb, false),
                          occupancy_distribution(report.final_state, n_orb, true));
      std::ofstream dets = open_output(dir / "determinants.txt");
      write_determinants(dets, report.final_state.determinants, n_orb);
    }
    if (report.final_model) {
      std::ofstream model = open_output(dir / "model.rbm");
      save_model(model, *report.final_model);
    }

    if (!report.records.empty()) print_state_summary(out, "final", report.final_state.energy, report.final_state.determinants.size());
    out << "iterations: " << report.records.size() << '\n'
        << "converged: " << (report.converged ? "yes" : "no") << '\n';
    if (report.failure) err << *report.failure << '\n';
    return static_cast<int>(report.converged ? ExitCode::ok : ExitCode::unconverged);
  });
}

int cmd_fci(const RunManifest& m, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_readable(m.fcidump, "FCIDUMP");
    if (!m.config_path.empty()) require_readable(m.config_path, "config");
    const AppConfig config = resolve_config(m);
    const IntegralTable table = read_fcidump(m.fcidump);
    const auto size = full_space_size(table.n_orbitals(), table.n_alpha(), table.n_beta());
    if (size > config.fci_cap) {
      std::ostringstream msg;
      msg << "full CI space has " << group_thousands(size.str()) << " determinants";
      if (table.n_electrons() % 2 == 0)
        msg << " (estimated N_det = binom(" << table.n_orbitals() << ", " << table.n_electrons() / 2
            << ")^2 = " << group_thousands(estimate_fci_size(table.n_orbitals(), table.n_electrons()).str())
            << ")";
      msg << ", above the cap of " << group_thousands(std::to_string(config.fci_cap));
      err << "refused: " << msg.str() << '\n';
      return static_cast<int>(ExitCode::refused);
    }
    const WavefunctionState state = solve_space(
        enumerate_full_space(table.n_alpha(), table.n_beta(), table.n_orbitals()), table, config);
    print_state_summary(out, "FCI", state.energy, state.determinants.size());
    return static_cast<int>(ExitCode::ok);
  });
}

int cmd_cisd(const RunManifest& m, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_readable(m.fcidump, "FCIDUMP");
    if (!m.config_path.empty()) require_readable(m.config_path, "config");
    const AppConfig config = resolve_config(m);
    const IntegralTable table = read_fcidump(m.fcidump);
    const Determinant ref = hf_reference(table.n_alpha(), table.n_beta(), table.n_orbitals());
    const WavefunctionState state = solve_space(generate_cisd(ref, table.n_orbitals()), table, config);
    out << "reference energy: " << fixed(diagonal_element(ref, table)) << " Ha\n";
    print_state_summary(out, "CISD", state.energy, state.determinants.size());
    return static_cast<int>(ExitCode::ok);
  });
}

int cmd_analyze(const RunManifest& m, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (m.runs.size() < 2)
      throw config_error("analyze needs at least two run directories (J >= 2 chains)");
    struct RunLog {
      std::vector<double> energies;
      std::vector<std::vector<double>> occupancy;  // per iteration, alpha block then beta
      std::string occupancy_csv;
    };
    std::vector<RunLog> logs;
    for (const auto& run : m.runs) {
      const fs::path path = fs::path(run) / "iterations.jsonl";
      std::ifstream in(path);
      if (!in) throw file_error("missing run log '" + path.string() + "'");
      RunLog log;
      std::string line;
      std::size_t line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json rec;
        try {
          rec = json::parse(line);
          log.energies.push_back(rec.at("energy").get<double>());
          auto occ = rec.at("weighted_occupancy").at("alpha").get<std::vector<double>>();
          const auto beta = rec.at("weighted_occupancy").at("beta").get<std::vector<double>>();
          occ.insert(occ.end(), beta.begin(), beta.end());
          log.occupancy.push_back(std::move(occ));
        } catch (const json::exception& e) {
          throw parse_error(path.string() + ": " + e.what(), line_no);
        }
      }
      if (log.energies.empty()) throw file_error("run log '" + path.string() + "' has no iterations");
      std::ifstream csv(fs::path(run) / "occupancy.csv");
      if (csv) {
        std::ostringstream ss;
        ss << csv.rdbuf();
        log.occupancy_csv = ss.str();
      }
      logs.push_back(std::move(log));
    }
    const std::size_t dim = logs.front().occupancy.back().size();
    for (const auto& l : logs)
      if (l.occupancy.back().size() != dim) throw config_error("runs cover different orbital spaces");

    json doc = {{"schema", "rbmci-analysis/1"}, {"runs", m.runs}};

    // Final normalized occupancy of each run, read as a chain over orbitals;
    // B is then the between-run variance of the distributions.
    std::vector<std::vector<double>> final_dists;
    for (const auto& l : logs) {
      std::vector<double> d = l.occupancy.back();
      double s = 0.0;
      for (double x : d) s += x;
      for (double& x : d) x /= s;
      final_dists.push_back(std::move(d));
    }
    doc["final_distribution"] = gelman_rubin_json(gelman_rubin(final_dists));

    std::size_t length = logs.front().energies.size();
    for (const auto& l : logs) length = std::min(length, l.energies.size());
    doc["common_length"] = length;
    if (length >= 2) {
      std::vector<std::vector<std::vector<double>>> occ_chains;
      std::vector<std::vector<double>> energy_chains;
      for (const auto& l : logs) {
        occ_chains.emplace_back(l.occupancy.begin(), l.occupancy.begin() + static_cast<std::ptrdiff_t>(length));
        energy_chains.emplace_back(l.energies.begin(), l.energies.begin() + static_cast<std::ptrdiff_t>(length));
      }
      const auto cw = gelman_rubin_componentwise(occ_chains);
      json stats = json::array();
      for (double s : cw.statistics) stats.push_back(nullable(s));
      doc["occupancy_componentwise"] = {{"R", stats},
                                        {"max_R", nullable(cw.max_statistic)},
                                        {"degenerate_components", cw.degenerate_components}};
      try {
        doc["energy"] = gelman_rubin_json(gelman_rubin(energy_chains));
      } catch (const domain_error& e) {
        doc["energy"] = {{"error", e.what()}};
      }
      out << "occupancy max R: " << (std::isfinite(cw.max_statistic) ? fixed(cw.max_statistic, 6) : "n/a") << '\n';
    } else {
      doc["occupancy_componentwise"] = {{"error", "runs need at least 2 common iterations"}};
    }
    out << "final-distribution B: " << doc["final_distribution"]["B"].get<double>()
        << "  R: " << fixed(doc["final_distribution"]["R"].get<double>(), 6) << '\n';

    const fs::path dir = prepare_out_dir(m);
    open_output(dir / "gelman_rubin.json") << doc.dump(2) << '\n';
    std::ofstream merged = open_output(dir / "occupancy_runs.csv");
    merged << "run,spin,orbital_index,raw_frequency,weighted_frequency\n";
    for (std::size_t r = 0; r < logs.size(); ++r) {
      std::istringstream csv(logs[r].occupancy_csv);
      std::string line;
      std::getline(csv, line);  // header
      while (std::getline(csv, line))
        if (!line.empty()) merged << r + 1 << ',' << line << '\n';
    }
    return static_cast<int>(ExitCode::ok);
  });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"RBM-guided selected configuration interaction"};
  app.require_subcommand(1);
  RunManifest m;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  int max_iterations = 0;
  double prune = 0, stability = 0, temperature = 0;
  std::size_t fci_cap = 0;

  auto common = [&](CLI::App* sub, bool needs_fcidump) {
    if (needs_fcidump) sub->add_option("--fcidump", m.fcidump, "FCIDUMP integral file")->required();
    sub->add_option("--config", m.config_path, "key = value configuration file");
    sub->add_option("--out", m.out_dir, "output directory (default $RBMCI_OUTPUT_DIR or rbmci-out)");
    sub->add_option("--seed", seed, "RNG seed");
    sub->add_option("--threads", threads, "worker threads (0 = all hardware threads)");
    sub->add_option("--max-iterations", max_iterations, "selection iterations");
    sub->add_option("--prune-threshold", prune, "prune determinants with |c|^2 at or below this");
    sub->add_option("--stability-threshold", stability, "energy change (Ha) that ends the loop");
    sub->add_option("--temperature", temperature, "RBM temperature 1/beta");
  };
  CLI::App* run = app.add_subcommand("run", "RBM-guided selection loop");
  common(run, true);
  run->add_flag("--reinit-weights", "reinitialize RBM weights every iteration");
  run->add_flag("--dump-dets", "write the kept determinants after every iteration");
  CLI::App* fci = app.add_subcommand("fci", "exact diagonalization over the full determinant space");
  common(fci, true);
  fci->add_option("--fci-cap", fci_cap, "refuse spaces larger than this (default 50000)");
  CLI::App* cisd = app.add_subcommand("cisd", "diagonalization over the CISD space");
  common(cisd, true);
  CLI::App* analyze = app.add_subcommand("analyze", "occupancy and Gelman-Rubin analysis of saved runs");
  common(analyze, false);
  analyze->add_option("--runs", m.runs, "run output directories")->required()->expected(1, -1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? 0 : static_cast<int>(ExitCode::usage);
  }
  CLI::App* active = app.get_subcommands().front();
  auto given = [&](const char* name) { return active->get_option_no_throw(name) && active->count(name) > 0; };
  if (given("--seed")) m.seed = seed;
  if (given("--threads")) m.threads = threads;
  if (given("--max-iterations")) m.max_iterations = max_iterations;
  if (given("--prune-threshold")) m.prune_threshold = prune;
  if (given("--stability-threshold")) m.stability_threshold = stability;
  if (given("--temperature")) m.temperature = temperature;
  if (given("--fci-cap")) m.fci_cap = fci_cap;
  if (given("--reinit-weights")) m.reinit_weights = true;
  if (given("--dump-dets")) m.dump_determinants = true;

  if (active == run) return cmd_run(m, out, err);
  if (active == fci) return cmd_fci(m, out, err);
  if (active == cisd) return cmd_cisd(m, out, err);
  return cmd_analyze(m, out, err);
}

}  // namespace rbmci
