#pragma once

#include <string>

#include "rbmci/fcidump.hpp"

namespace rbmci::testing {

std::string fixture_path(const std::string& name);  // e.g. "h2" -> .../h2.fcidump
IntegralTable load_fixture(const std::string& name);

/// Energies computed by pyscf when the fixture was generated (see make_fixtures.py).
struct FixtureReference {
  double e_hf = 0.0;
  double e_fci = 0.0;
};
FixtureReference fixture_reference(const std::string& name);

}  // namespace rbmci::testing
