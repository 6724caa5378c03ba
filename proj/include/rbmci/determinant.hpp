#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace rbmci {

using Bitmask = std::uint64_t;

/// A Slater determinant over at most 64 spatial orbitals. Bit p of each mask
/// is orbital p+1 in the 1-based integral numbering.
struct Determinant {
  Bitmask alpha = 0;
  Bitmask beta = 0;

  int n_alpha() const noexcept { return std::popcount(alpha); }
  int n_beta() const noexcept { return std::popcount(beta); }

  friend bool operator==(const Determinant&, const Determinant&) = default;
};

/// Concatenation of the two occupation patterns: alpha in the low n_orbitals
/// bits, beta directly above. Stored as two 64-bit words so that up to 64
/// orbitals fit.
struct DeterminantKey {
  std::uint64_t high = 0;
  std::uint64_t low = 0;

  friend auto operator<=>(const DeterminantKey&, const DeterminantKey&) = default;
};

struct DeterminantKeyHash {
  std::size_t operator()(const DeterminantKey& k) const noexcept {
    return std::hash<std::uint64_t>{}(k.low ^ (k.high * 0x9e3779b97f4a7c15ULL));
  }
};

DeterminantKey to_key(const Determinant& d, int n_orbitals);
Determinant from_key(const DeterminantKey& key, int n_orbitals);

/// Ground-state reference: the lowest n_alpha / n_beta orbitals occupied.
Determinant hf_reference(int n_alpha, int n_beta, int n_orbitals);

inline int hamming_distance(const Determinant& a, const Determinant& b) noexcept {
  return std::popcount(a.alpha ^ b.alpha) + std::popcount(a.beta ^ b.beta);
}

/// Number of electrons moved between two determinants with equal per-spin counts.
int excitation_degree(const Determinant& a, const Determinant& b);

/// Checks popcounts and that no bit lies at or above n_orbitals.
bool satisfies_pauli(const Determinant& d, int n_alpha, int n_beta, int n_orbitals) noexcept;

/// An ordered, duplicate-free collection of determinants sorted by key.
class DeterminantSet {
 public:
  explicit DeterminantSet(int n_orbitals) : n_orbitals_(n_orbitals) {}

  int n_orbitals() const noexcept { return n_orbitals_; }
  std::size_t size() const noexcept { return keys_.size(); }
  bool empty() const noexcept { return keys_.empty(); }

  /// Returns true when d was not yet present.
  bool insert(const Determinant& d) { return keys_.insert(to_key(d, n_orbitals_)).second; }
  bool contains(const Determinant& d) const { return keys_.count(to_key(d, n_orbitals_)) != 0; }
  void erase(const Determinant& d) { keys_.erase(to_key(d, n_orbitals_)); }

  std::vector<Determinant> to_vector() const;

 private:
  int n_orbitals_;
  std::set<DeterminantKey> keys_;
};

/// Keys of determinants removed by pruning; never cleared during a run.
class TabooList {
 public:
  void insert(const DeterminantKey& key) { keys_.insert(key); }
  bool contains(const DeterminantKey& key) const { return keys_.count(key) != 0; }
  std::size_t size() const noexcept { return keys_.size(); }
  const std::set<DeterminantKey>& keys() const noexcept { return keys_; }

 private:
  std::set<DeterminantKey> keys_;
};

/// Reference plus every spin-conserving single and double excitation, sorted by key.
std::vector<Determinant> generate_cisd(const Determinant& reference, int n_orbitals);

/// Every determinant with the given per-spin counts, sorted by key.
std::vector<Determinant> enumerate_full_space(int n_alpha, int n_beta, int n_orbitals);

/// Candidates within Hamming distance 4 (excitation degree <= 2) of some member of `current`.
std::vector<Determinant> connectivity_filter(std::span<const Determinant> candidates,
                                             std::span<const Determinant> current);

struct DedupeResult {
  std::vector<Determinant> kept;  // sorted by key
  std::size_t duplicates_removed = 0;
  std::size_t taboo_hits = 0;
};

/// Removes duplicates by key, then drops anything whose key is tabooed.
DedupeResult dedupe_and_taboo(std::span<const Determinant> candidates, const TabooList& taboo,
                              int n_orbitals);

void sort_by_key(std::vector<Determinant>& dets, int n_orbitals);

/// Text export: one determinant per line, "alpha beta" as binary strings
/// with orbital 1 first (most significant orbital last).
void write_determinants(std::ostream& out, std::span<const Determinant> dets, int n_orbitals);
std::vector<Determinant> read_determinants(std::istream& in, int n_orbitals);
std::string occupation_string(Bitmask mask, int n_orbitals);

}  // namespace rbmci
