#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "fixtures.hpp"
#include "rbmci/cli.hpp"
#include "rbmci/errors.hpp"

using namespace rbmci;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  args.insert(args.begin(), "rbmci");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rbmci-cli-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<json> read_jsonl(const fs::path& p) {
  std::ifstream in(p);
  std::vector<json> out;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(json::parse(line));
  return out;
}

std::set<std::string> keys(const json& j) {
  std::set<std::string> k;
  for (const auto& [key, value] : j.items()) k.insert(key);
  return k;
}

}  // namespace

TEST_CASE("run on the hydrogen molecule") {
  const auto dir = scratch("h2");
  const auto r = cli({"run", "--fcidump", testing::fixture_path("h2"), "--out", dir.string()});
  CHECK(r.code == 0);
  const auto report = json::parse(slurp(dir / "report.json"));
  CHECK(std::abs(report.at("final_energy").get<double>() - testing::fixture_reference("h2").e_fci) < 1e-8);
  CHECK(report.at("converged").get<bool>());
  CHECK(r.out.find("final energy: ") != std::string::npos);
  CHECK(r.out.find("iterations: 2") != std::string::npos);
  CHECK(r.out.find("determinants: ") != std::string::npos);
  for (const auto* f : {"iterations.jsonl", "occupancy.csv", "determinants.txt", "model.rbm"})
    CHECK(fs::exists(dir / f));
}

TEST_CASE("output files keep a stable schema") {
  const auto dir = scratch("schema");
  REQUIRE(cli({"run", "--fcidump", testing::fixture_path("h4_chain"), "--out", dir.string(), "--dump-dets"}).code == 0);
  const auto report = json::parse(slurp(dir / "report.json"));
  CHECK(keys(report) == std::set<std::string>{"schema", "fcidump", "n_orbitals", "n_electrons", "ms2", "converged",
                                               "failure", "iterations", "final_energy", "reference_energy",
                                               "n_determinants", "taboo_size", "config", "records"});
  CHECK(report.at("schema") == "rbmci-report/1");
  const std::set<std::string> record_keys{"iteration", "energy", "energy_pre_prune", "n_dets_in", "n_generated",
                                          "n_duplicates_removed", "n_taboo_hits", "n_disconnected_removed",
                                          "n_after_diag", "n_pruned", "n_kept", "wall_seconds"};
  for (const auto& rec : report.at("records")) CHECK(keys(rec) == record_keys);
  auto line_keys = record_keys;
  line_keys.insert("weighted_occupancy");
  const auto lines = read_jsonl(dir / "iterations.jsonl");
  CHECK(lines.size() == report.at("iterations").get<std::size_t>());
  for (const auto& line : lines) {
    CHECK(keys(line) == line_keys);
    CHECK(line.at("weighted_occupancy").at("alpha").size() == 4);
  }
  CHECK(slurp(dir / "occupancy.csv").rfind("spin,orbital_index,raw_frequency,weighted_frequency\n", 0) == 0);
  CHECK(fs::exists(dir / "determinants_iter001.txt"));
  std::ifstream model(dir / "model.rbm");
  CHECK_NOTHROW(load_model(model));
}

TEST_CASE("single iteration on water is reported as unconverged") {
  const auto dir = scratch("h2o-one");
  const auto r = cli({"run", "--fcidump", testing::fixture_path("h2o_min"), "--out", dir.string(), "--max-iterations", "1"});
  CHECK(r.code == static_cast<int>(ExitCode::unconverged));
  const auto report = json::parse(slurp(dir / "report.json"));
  CHECK(report.at("iterations") == 1);
  CHECK_FALSE(report.at("converged").get<bool>());
}

TEST_CASE("identical invocations give identical energies") {
  std::vector<std::vector<double>> energies;
  std::vector<std::string> dets;
  for (const auto* name : {"det-a", "det-b"}) {
    const auto dir = scratch(name);
    REQUIRE(cli({"run", "--fcidump", testing::fixture_path("h2o_min"), "--out", dir.string(), "--seed", "5"}).code == 0);
    std::vector<double> e;
    for (const auto& line : read_jsonl(dir / "iterations.jsonl")) e.push_back(line.at("energy").get<double>());
    energies.push_back(e);
    dets.push_back(slurp(dir / "determinants.txt"));
  }
  CHECK(energies[0] == energies[1]);
  CHECK(dets[0] == dets[1]);
}

TEST_CASE("full CI command") {
  SUBCASE("hydrogen") {
    const auto r = cli({"fci", "--fcidump", testing::fixture_path("h2")});
    CHECK(r.code == 0);
    CHECK(r.out.find("determinants: 4") != std::string::npos);
    CHECK(r.out.find("FCI energy: -1.1372838") != std::string::npos);
  }
  SUBCASE("a space the size of water in a split-valence basis is refused") {
    const auto dir = scratch("big");
    std::ofstream(dir / "big.fcidump") << "&FCI NORB=13, NELEC=10, MS2=0,\n&END\n";
    const auto r = cli({"fci", "--fcidump", (dir / "big.fcidump").string()});
    CHECK(r.code == static_cast<int>(ExitCode::refused));
    CHECK(r.err.find("1,656,369") != std::string::npos);
  }
  SUBCASE("cap override") {
    const auto r = cli({"fci", "--fcidump", testing::fixture_path("h2"), "--fci-cap", "3"});
    CHECK(r.code == static_cast<int>(ExitCode::refused));
  }
}

TEST_CASE("CISD equals full CI for two electrons") {
  const auto r = cli({"cisd", "--fcidump", testing::fixture_path("h2")});
  CHECK(r.code == 0);
  CHECK(r.out.find("CISD energy: -1.1372838") != std::string::npos);
  CHECK(r.out.find("reference energy: -1.1167593") != std::string::npos);
}

TEST_CASE("analysis across runs") {
  std::vector<std::string> runs;
  for (int seed : {1, 2}) {
    const auto dir = scratch("an-run" + std::to_string(seed));
    REQUIRE(cli({"run", "--fcidump", testing::fixture_path("h2o_min"), "--out", dir.string(), "--seed",
                 std::to_string(seed), "--stability-threshold", "1e-12"})
                .code == 0);
    runs.push_back(dir.string());
  }
  SUBCASE("two runs") {
    const auto out = scratch("an-out");
    const auto r = cli({"analyze", "--runs", runs[0], runs[1], "--out", out.string()});
    CHECK(r.code == 0);
    const auto doc = json::parse(slurp(out / "gelman_rubin.json"));
    const auto max_r = doc.at("occupancy_componentwise").at("max_R");
    REQUIRE(max_r.is_number());
    CHECK(std::isfinite(max_r.get<double>()));
    CHECK(max_r.get<double>() > 0);
    CHECK(doc.at("final_distribution").at("B").get<double>() >= 0);
    CHECK(slurp(out / "occupancy_runs.csv").rfind("run,spin,orbital_index", 0) == 0);
    CHECK(r.out.find("occupancy max R: ") != std::string::npos);
  }
  SUBCASE("one run is not enough") {
    const auto r = cli({"analyze", "--runs", runs[0], "--out", scratch("an-one").string()});
    CHECK(r.code == static_cast<int>(ExitCode::config_failure));
    CHECK(r.err.find("J >= 2") != std::string::npos);
  }
  SUBCASE("missing logs") {
    const auto r = cli({"analyze", "--runs", runs[0], scratch("empty").string(), "--out", scratch("an-miss").string()});
    CHECK(r.code == static_cast<int>(ExitCode::file_failure));
  }
}

TEST_CASE("configuration precedence") {
  const auto dir = scratch("config");
  std::ofstream(dir / "rbmci.conf") << "# loop settings\nmax_iterations = 1\nseed = 3\n";
  SUBCASE("file overrides defaults") {
    const auto r = cli({"run", "--fcidump", testing::fixture_path("h4_chain"), "--config", (dir / "rbmci.conf").string(),
                        "--out", (dir / "a").string()});
    CHECK(r.code == static_cast<int>(ExitCode::unconverged));
    const auto report = json::parse(slurp(dir / "a" / "report.json"));
    CHECK(report.at("config").at("seed") == 3);
  }
  SUBCASE("flags override the file") {
    const auto r = cli({"run", "--fcidump", testing::fixture_path("h4_chain"), "--config", (dir / "rbmci.conf").string(),
                        "--max-iterations", "20", "--seed", "4", "--out", (dir / "b").string()});
    CHECK(r.code == 0);
    const auto report = json::parse(slurp(dir / "b" / "report.json"));
    CHECK(report.at("config").at("seed") == 4);
    CHECK(report.at("config").at("max_iterations") == 20);
  }
  SUBCASE("temperature flag sets the inverse temperature") {
    RunManifest m;
    m.temperature = 4.0;
    CHECK(resolve_config(m).loop.beta == 0.25);
    m.temperature = -1.0;
    CHECK_THROWS_AS(resolve_config(m), config_error);
  }
  SUBCASE("bad config values") {
    std::ofstream(dir / "bad.conf") << "max_iterations = lots\n";
    const auto r = cli({"run", "--fcidump", testing::fixture_path("h2"), "--config", (dir / "bad.conf").string(),
                        "--out", (dir / "c").string()});
    CHECK(r.code == static_cast<int>(ExitCode::config_failure));
    std::ofstream(dir / "unknown.conf") << "colour = blue\n";
    CHECK(cli({"run", "--fcidump", testing::fixture_path("h2"), "--config", (dir / "unknown.conf").string(),
               "--out", (dir / "d").string()})
              .code == static_cast<int>(ExitCode::config_failure));
  }
}

TEST_CASE("config text parsing") {
  AppConfig c;
  std::istringstream in("epochs = 3\nlearning_rate=0.5 # inline\n\n temperature = 2\nreinit_weights = true\nfci_cap = 10\n");
  apply_config_text(c, in);
  CHECK(c.loop.train.epochs == 3);
  CHECK(c.loop.train.learning_rate == 0.5);
  CHECK(c.loop.beta == 0.5);
  CHECK(c.loop.reinit_weights);
  CHECK(c.fci_cap == 10);
  std::istringstream missing_eq("epochs 3\n");
  CHECK_THROWS_AS(apply_config_text(c, missing_eq), config_error);
}

TEST_CASE("failure exit codes") {
  const auto dir = scratch("codes");
  std::ofstream(dir / "broken.fcidump") << "&FCI NELEC=2\n&END\n";
  CHECK(cli({"fci", "--fcidump", (dir / "broken.fcidump").string()}).code == static_cast<int>(ExitCode::parse_failure));
  CHECK(cli({"fci", "--fcidump", (dir / "absent.fcidump").string()}).code == static_cast<int>(ExitCode::file_failure));
  CHECK(cli({"run"}).code == static_cast<int>(ExitCode::usage));
  CHECK(cli({"frobnicate"}).code == static_cast<int>(ExitCode::usage));
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({"run", "--fcidump", testing::fixture_path("h2"), "--prune-threshold", "-1", "--out", (dir / "x").string()}).code ==
        static_cast<int>(ExitCode::config_failure));
}

TEST_CASE("output directory defaults") {
  ::setenv("RBMCI_OUTPUT_DIR", "/tmp/rbmci-env-dir", 1);
  CHECK(default_output_dir() == "/tmp/rbmci-env-dir");
  ::unsetenv("RBMCI_OUTPUT_DIR");
  CHECK(default_output_dir() == "rbmci-out");
  CHECK(group_thousands("1656369") == "1,656,369");
  CHECK(group_thousands("100") == "100");
  CHECK(group_thousands("1000") == "1,000");
}
