#include "fixtures.hpp"

#include <fstream>
#include <json.hpp>
#include <stdexcept>

namespace rbmci::testing {

std::string fixture_path(const std::string& name) {
  return std::string(RBMCI_FIXTURE_DIR) + "/" + name + ".fcidump";
}

IntegralTable load_fixture(const std::string& name) { return read_fcidump(fixture_path(name)); }

FixtureReference fixture_reference(const std::string& name) {
  std::ifstream in(std::string(RBMCI_FIXTURE_DIR) + "/" + name + ".ref.json");
  if (!in) throw std::runtime_error("missing reference for fixture " + name);
  const auto doc = nlohmann::json::parse(in);
  return {doc.at("e_hf").get<double>(), doc.at("e_fci").get<double>()};
}

}  // namespace rbmci::testing
