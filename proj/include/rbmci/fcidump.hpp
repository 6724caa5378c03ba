#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace rbmci {

/// One- and two-electron integrals over spatial orbitals, as read from an
/// FCIDUMP file. Orbital indices in the public accessors are 1-based.
///
/// Two-electron integrals are stored in chemists' notation (pq|rs) under the
/// lexicographically smallest of the eight equivalent index permutations.
/// Entries that were never set read as exactly zero.
class IntegralTable {
 public:
  IntegralTable() = default;
  IntegralTable(int n_orbitals, int n_electrons, int ms2);

  int n_orbitals() const noexcept { return n_orbitals_; }
  int n_electrons() const noexcept { return n_electrons_; }
  int ms2() const noexcept { return ms2_; }
  int n_alpha() const noexcept { return (n_electrons_ + ms2_) / 2; }
  int n_beta() const noexcept { return (n_electrons_ - ms2_) / 2; }

  double core_energy() const noexcept { return core_energy_; }
  void set_core_energy(double value) noexcept { core_energy_ = value; }

  double one(int p, int q) const;
  void set_one(int p, int q, double value);

  double two_chem(int p, int q, int r, int s) const;
  /// Physicists' notation: <ij|kl> = (ik|jl).
  double two_phys(int i, int j, int k, int l) const { return two_chem(i, k, j, l); }
  void set_two_chem(int p, int q, int r, int s, double value);

  const std::vector<int>& orbsym() const noexcept { return orbsym_; }
  int isym() const noexcept { return isym_; }
  void set_orbsym(std::vector<int> orbsym) { orbsym_ = std::move(orbsym); }
  void set_isym(int isym) noexcept { isym_ = isym; }

  std::size_t n_two_electron_entries() const noexcept { return two_.size(); }

  /// Canonical storage key of (pq|rs); exposed for tests of the symmetry closure.
  static std::uint64_t canonical_key(int p, int q, int r, int s) noexcept;

  /// Visit every stored two-electron entry in canonical index order.
  template <class F>
  void for_each_two(F&& f) const {
    for (const auto& [key, value] : sorted_two()) {
      f(static_cast<int>((key >> 48) & 0xffff), static_cast<int>((key >> 32) & 0xffff),
        static_cast<int>((key >> 16) & 0xffff), static_cast<int>(key & 0xffff), value);
    }
  }

 private:
  void check_index(int p) const;
  std::vector<std::pair<std::uint64_t, double>> sorted_two() const;

  int n_orbitals_ = 0;
  int n_electrons_ = 0;
  int ms2_ = 0;
  int isym_ = 1;
  std::vector<int> orbsym_;
  double core_energy_ = 0.0;
  std::vector<double> one_;  // dense, row-major n_orbitals x n_orbitals
  std::unordered_map<std::uint64_t, double> two_;
};

IntegralTable parse_fcidump(std::istream& in);
IntegralTable read_fcidump(const std::string& path);

/// Writes the table in FCIDUMP format with round-trip exact (17 significant digit) values.
void write_fcidump(std::ostream& out, const IntegralTable& table);

}  // namespace rbmci
