#include "rbmci/determinant.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "rbmci/errors.hpp"

namespace rbmci {

namespace {

Bitmask low_bits(int n) noexcept { return n >= 64 ? ~Bitmask{0} : (Bitmask{1} << n) - 1; }

void check_orbitals(int n_orbitals) {
  if (n_orbitals < 1 || n_orbitals > 64)
    throw capacity_error("orbital count must lie in [1, 64]");
}

// All subsets of the occupied/virtual orbitals of `mask` reachable by moving
// exactly `rank` electrons (rank 0, 1 or 2).
std::vector<Bitmask> excite(Bitmask mask, int n_orbitals, int rank) {
  std::vector<int> occ, vir;
  for (int p = 0; p < n_orbitals; ++p) ((mask >> p) & 1 ? occ : vir).push_back(p);
  std::vector<Bitmask> out;
  if (rank == 0) {
    out.push_back(mask);
  } else if (rank == 1) {
    for (int i : occ)
      for (int a : vir) out.push_back((mask & ~(Bitmask{1} << i)) | (Bitmask{1} << a));
  } else {
    for (std::size_t i = 0; i < occ.size(); ++i)
      for (std::size_t j = i + 1; j < occ.size(); ++j)
        for (std::size_t a = 0; a < vir.size(); ++a)
          for (std::size_t b = a + 1; b < vir.size(); ++b) {
            Bitmask m = mask & ~(Bitmask{1} << occ[i]) & ~(Bitmask{1} << occ[j]);
            out.push_back(m | (Bitmask{1} << vir[a]) | (Bitmask{1} << vir[b]));
          }
  }
  return out;
}

// Every mask of n_orbitals bits with exactly n set bits, ascending.
std::vector<Bitmask> combinations(int n_orbitals, int n) {
  std::vector<Bitmask> out;
  if (n == 0) {
    out.push_back(0);
    return out;
  }
  const Bitmask limit = low_bits(n_orbitals);
  Bitmask v = low_bits(n);
  while (true) {
    out.push_back(v);
    // Gosper's hack: next integer with the same popcount.
    const Bitmask c = v & (~v + 1);
    const Bitmask r = v + c;
    if (r == 0 || (r & ~limit)) break;
    v = (((r ^ v) >> 2) / c) | r;
    if (v & ~limit) break;
  }
  return out;
}

}  // namespace

DeterminantKey to_key(const Determinant& d, int n_orbitals) {
  check_orbitals(n_orbitals);
  DeterminantKey key;
  key.low = d.alpha;
  if (n_orbitals == 64) {
    key.high = d.beta;
  } else {
    key.low |= d.beta << n_orbitals;
    key.high = d.beta >> (64 - n_orbitals);
  }
  return key;
}

Determinant from_key(const DeterminantKey& key, int n_orbitals) {
  check_orbitals(n_orbitals);
  const int total = 2 * n_orbitals;
  if (total < 128) {
    const bool overflow = total <= 64 ? (key.high != 0 || (total < 64 && (key.low >> total) != 0))
                                      : (key.high >> (total - 64)) != 0;
    if (overflow) throw index_error("key has bits at or above 2*n_orbitals");
  }
  Determinant d;
  d.alpha = key.low & low_bits(n_orbitals);
  if (n_orbitals == 64) {
    d.beta = key.high;
  } else {
    d.beta = (key.low >> n_orbitals) | (key.high << (64 - n_orbitals));
    d.beta &= low_bits(n_orbitals);
  }
  return d;
}

Determinant hf_reference(int n_alpha, int n_beta, int n_orbitals) {
  check_orbitals(n_orbitals);
  if (n_alpha < 0 || n_beta < 0 || n_alpha > n_orbitals || n_beta > n_orbitals)
    throw capacity_error("electron count per spin exceeds the number of orbitals");
  return {low_bits(n_alpha), low_bits(n_beta)};
}

int excitation_degree(const Determinant& a, const Determinant& b) {
  if (a.n_alpha() != b.n_alpha() || a.n_beta() != b.n_beta())
    throw domain_error("excitation degree undefined for different per-spin electron counts");
  return hamming_distance(a, b) / 2;
}

bool satisfies_pauli(const Determinant& d, int n_alpha, int n_beta, int n_orbitals) noexcept {
  const Bitmask outside = ~low_bits(n_orbitals);
  return d.n_alpha() == n_alpha && d.n_beta() == n_beta && !(d.alpha & outside) &&
         !(d.beta & outside);
}

std::vector<Determinant> DeterminantSet::to_vector() const {
  std::vector<Determinant> out;
  out.reserve(keys_.size());
  for (const auto& k : keys_) out.push_back(from_key(k, n_orbitals_));
  return out;
}

void sort_by_key(std::vector<Determinant>& dets, int n_orbitals) {
  std::sort(dets.begin(), dets.end(), [n_orbitals](const Determinant& x, const Determinant& y) {
    return to_key(x, n_orbitals) < to_key(y, n_orbitals);
  });
}

std::vector<Determinant> generate_cisd(const Determinant& reference, int n_orbitals) {
  check_orbitals(n_orbitals);
  DeterminantSet set(n_orbitals);
  for (int ra = 0; ra <= 2; ++ra)
    for (int rb = 0; ra + rb <= 2; ++rb)
      for (Bitmask a : excite(reference.alpha, n_orbitals, ra))
        for (Bitmask b : excite(reference.beta, n_orbitals, rb)) set.insert({a, b});
  return set.to_vector();
}

std::vector<Determinant> enumerate_full_space(int n_alpha, int n_beta, int n_orbitals) {
  check_orbitals(n_orbitals);
  if (n_alpha < 0 || n_beta < 0 || n_alpha > n_orbitals || n_beta > n_orbitals)
    throw capacity_error("electron count per spin exceeds the number of orbitals");
  std::vector<Determinant> out;
  const auto alphas = combinations(n_orbitals, n_alpha);
  const auto betas = combinations(n_orbitals, n_beta);
  out.reserve(alphas.size() * betas.size());
  for (Bitmask b : betas)
    for (Bitmask a : alphas) out.push_back({a, b});
  sort_by_key(out, n_orbitals);
  return out;
}

std::vector<Determinant> connectivity_filter(std::span<const Determinant> candidates,
                                             std::span<const Determinant> current) {
  std::vector<Determinant> out;
  for (const auto& c : candidates) {
    const bool connected = std::any_of(current.begin(), current.end(), [&](const Determinant& d) {
      return hamming_distance(c, d) <= 4;
    });
    if (connected) out.push_back(c);
  }
  return out;
}

DedupeResult dedupe_and_taboo(std::span<const Determinant> candidates, const TabooList& taboo,
                              int n_orbitals) {
  DedupeResult result;
  std::set<DeterminantKey> seen;
  for (const auto& c : candidates) {
    const auto key = to_key(c, n_orbitals);
    if (!seen.insert(key).second)
      ++result.duplicates_removed;
    else if (taboo.contains(key))
      ++result.taboo_hits;
  }
  for (const auto& k : seen)
    if (!taboo.contains(k)) result.kept.push_back(from_key(k, n_orbitals));
  return result;
}

std::string occupation_string(Bitmask mask, int n_orbitals) {
  std::string s(static_cast<std::size_t>(n_orbitals), '0');
  for (int p = 0; p < n_orbitals; ++p)
    if ((mask >> p) & 1) s[static_cast<std::size_t>(p)] = '1';
  return s;
}

void write_determinants(std::ostream& out, std::span<const Determinant> dets, int n_orbitals) {
  for (const auto& d : dets)
    out << occupation_string(d.alpha, n_orbitals) << ' ' << occupation_string(d.beta, n_orbitals)
        << '\n';
}

std::vector<Determinant> read_determinants(std::istream& in, int n_orbitals) {
  check_orbitals(n_orbitals);
  std::vector<Determinant> out;
  std::string line;
  std::size_t line_no = 0;
  auto parse_mask = [&](const std::string& s) {
    if (s.size() != static_cast<std::size_t>(n_orbitals))
      throw parse_error("occupation string has wrong length", line_no);
    Bitmask m = 0;
    for (int p = 0; p < n_orbitals; ++p) {
      const char c = s[static_cast<std::size_t>(p)];
      if (c == '1')
        m |= Bitmask{1} << p;
      else if (c != '0')
        throw parse_error("occupation string must contain only 0 and 1", line_no);
    }
    return m;
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string a, b;
    if (!(ls >> a)) continue;
    if (!(ls >> b)) throw parse_error("expected alpha and beta occupation strings", line_no);
    out.push_back({parse_mask(a), parse_mask(b)});
  }
  return out;
}

}  // namespace rbmci
