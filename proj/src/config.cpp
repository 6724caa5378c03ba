#include "rbmci/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <map>

#include "rbmci/errors.hpp"

namespace rbmci {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double as_double(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || errno == ERANGE) throw config_error("'" + key + "' expects a number, got '" + v + "'");
  return x;
}

long long as_integer(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0' || errno == ERANGE) throw config_error("'" + key + "' expects an integer, got '" + v + "'");
  return x;
}

std::uint64_t as_unsigned(const std::string& key, const std::string& v) {
  const long long x = as_integer(key, v);
  if (x < 0) throw config_error("'" + key + "' must be non-negative");
  return static_cast<std::uint64_t>(x);
}

int as_int(const std::string& key, const std::string& v) { return static_cast<int>(as_integer(key, v)); }

bool as_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw config_error("'" + key + "' expects true or false, got '" + v + "'");
}

using Setter = std::function<void(AppConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"max_iterations", [](AppConfig& c, auto& k, auto& v) { c.loop.max_iterations = as_int(k, v); }},
      {"prune_threshold", [](AppConfig& c, auto& k, auto& v) { c.loop.prune_threshold = as_double(k, v); }},
      {"stability_threshold", [](AppConfig& c, auto& k, auto& v) { c.loop.stability_threshold = as_double(k, v); }},
      {"epochs", [](AppConfig& c, auto& k, auto& v) { c.loop.train.epochs = as_int(k, v); }},
      {"batch_size", [](AppConfig& c, auto& k, auto& v) { c.loop.train.batch_size = as_int(k, v); }},
      {"gibbs_k", [](AppConfig& c, auto& k, auto& v) { c.loop.train.gibbs_k = as_int(k, v); }},
      {"learning_rate", [](AppConfig& c, auto& k, auto& v) { c.loop.train.learning_rate = as_double(k, v); }},
      {"n_hidden", [](AppConfig& c, auto& k, auto& v) { c.loop.n_hidden = as_int(k, v); }},
      {"beta", [](AppConfig& c, auto& k, auto& v) { c.loop.beta = as_double(k, v); }},
      {"temperature",
       [](AppConfig& c, auto& k, auto& v) {
         const double t = as_double(k, v);
         if (!(t > 0)) throw config_error("temperature must be positive");
         c.loop.beta = 1.0 / t;
       }},
      {"sample_multiplier", [](AppConfig& c, auto& k, auto& v) { c.loop.sample_multiplier = as_double(k, v); }},
      {"sample_cap", [](AppConfig& c, auto& k, auto& v) { c.loop.sample_cap = as_unsigned(k, v); }},
      {"reinit_weights", [](AppConfig& c, auto& k, auto& v) { c.loop.reinit_weights = as_bool(k, v); }},
      {"keep_reference", [](AppConfig& c, auto& k, auto& v) { c.loop.keep_reference = as_bool(k, v); }},
      {"seed", [](AppConfig& c, auto& k, auto& v) { c.loop.seed = as_unsigned(k, v); }},
      {"threads", [](AppConfig& c, auto& k, auto& v) { c.loop.threads = static_cast<unsigned>(as_unsigned(k, v)); }},
      {"davidson_tolerance", [](AppConfig& c, auto& k, auto& v) { c.loop.davidson.tolerance = as_double(k, v); }},
      {"davidson_max_subspace", [](AppConfig& c, auto& k, auto& v) { c.loop.davidson.max_subspace = as_int(k, v); }},
      {"davidson_max_iterations", [](AppConfig& c, auto& k, auto& v) { c.loop.davidson.max_iterations = as_int(k, v); }},
      {"fci_cap", [](AppConfig& c, auto& k, auto& v) { c.fci_cap = as_unsigned(k, v); }},
      {"dump_determinants", [](AppConfig& c, auto& k, auto& v) { c.dump_determinants = as_bool(k, v); }},
  };
  return table;
}

}  // namespace

void apply_config_value(AppConfig& config, const std::string& key, const std::string& value) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw config_error("unknown configuration key '" + key + "'");
  it->second(config, key, value);
}

void apply_config_text(AppConfig& config, std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("config line " + std::to_string(line_no) + ": expected key = value");
    try {
      apply_config_value(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const config_error& e) {
      throw config_error("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void apply_config_file(AppConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw file_error("cannot open config file '" + path + "'");
  apply_config_text(config, in);
}

}  // namespace rbmci
