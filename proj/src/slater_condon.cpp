#include "rbmci/slater_condon.hpp"

#include <bit>

#include "rbmci/errors.hpp"

namespace rbmci {

namespace {

// Occupied bits of `mask` strictly between orbitals a and b.
int occupied_between(Bitmask mask, int a, int b) noexcept {
  if (a > b) std::swap(a, b);
  if (b - a < 2) return 0;
  const Bitmask window = ((Bitmask{1} << b) - 1) & ~((Bitmask{1} << (a + 1)) - 1);
  return std::popcount(mask & window);
}

std::vector<int> bits_of(Bitmask mask) {
  std::vector<int> out;
  while (mask) {
    out.push_back(std::countr_zero(mask));
    mask &= mask - 1;
  }
  return out;
}

// Phase of moving the ket electrons in `particles` onto `holes` within one spin
// channel; pairs are applied in order and each step counts the electrons the
// moving one passes.
int channel_phase(Bitmask ket, const std::vector<int>& holes, const std::vector<int>& particles) {
  int parity = 0;
  Bitmask current = ket;
  for (std::size_t k = 0; k < holes.size(); ++k) {
    parity += occupied_between(current, holes[k], particles[k]);
    current &= ~(Bitmask{1} << particles[k]);
    current |= Bitmask{1} << holes[k];
  }
  return (parity & 1) ? -1 : 1;
}

double one_body(const IntegralTable& t, int p, int q) { return t.one(p + 1, q + 1); }

// <pq|rs> with 0-based orbitals
double phys(const IntegralTable& t, int p, int q, int r, int s) {
  return t.two_phys(p + 1, q + 1, r + 1, s + 1);
}

}  // namespace

std::optional<ExcitationInfo> analyze_excitation(const Determinant& bra, const Determinant& ket) {
  const int degree = excitation_degree(bra, ket);
  if (degree > 2) return std::nullopt;
  ExcitationInfo info;
  info.degree = degree;
  const auto ha = bits_of(bra.alpha & ~ket.alpha);
  const auto pa = bits_of(ket.alpha & ~bra.alpha);
  const auto hb = bits_of(bra.beta & ~ket.beta);
  const auto pb = bits_of(ket.beta & ~bra.beta);
  for (int h : ha) info.holes.push_back({h, Spin::alpha});
  for (int h : hb) info.holes.push_back({h, Spin::beta});
  for (int p : pa) info.particles.push_back({p, Spin::alpha});
  for (int p : pb) info.particles.push_back({p, Spin::beta});
  // The alpha block precedes the beta block, so no alpha electron lies between
  // two beta positions (and vice versa); channels contribute independently.
  info.phase = channel_phase(ket.alpha, ha, pa) * channel_phase(ket.beta, hb, pb);
  return info;
}

double diagonal_element(const Determinant& d, const IntegralTable& t) {
  const auto oa = bits_of(d.alpha);
  const auto ob = bits_of(d.beta);
  double e = t.core_energy();
  for (int i : oa) e += one_body(t, i, i);
  for (int i : ob) e += one_body(t, i, i);
  auto same_spin = [&](const std::vector<int>& occ) {
    double s = 0.0;
    for (std::size_t x = 0; x < occ.size(); ++x)
      for (std::size_t y = x + 1; y < occ.size(); ++y) {
        const int i = occ[x], j = occ[y];
        s += phys(t, i, j, i, j) - phys(t, i, j, j, i);
      }
    return s;
  };
  e += same_spin(oa) + same_spin(ob);
  for (int i : oa)
    for (int j : ob) e += phys(t, i, j, i, j);
  return e;
}

double matrix_element(const Determinant& bra, const Determinant& ket, const IntegralTable& t) {
  const auto info = analyze_excitation(bra, ket);
  if (!info) return 0.0;
  if (info->degree == 0) return diagonal_element(bra, t);

  if (info->degree == 1) {
    const SpinOrbital h = info->holes[0];
    const SpinOrbital p = info->particles[0];
    double v = one_body(t, h.orbital, p.orbital);
    const Bitmask common_alpha = bra.alpha & ket.alpha;
    const Bitmask common_beta = bra.beta & ket.beta;
    for (int i : bits_of(common_alpha)) {
      v += phys(t, h.orbital, i, p.orbital, i);
      if (h.spin == Spin::alpha) v -= phys(t, h.orbital, i, i, p.orbital);
    }
    for (int i : bits_of(common_beta)) {
      v += phys(t, h.orbital, i, p.orbital, i);
      if (h.spin == Spin::beta) v -= phys(t, h.orbital, i, i, p.orbital);
    }
    return info->phase * v;
  }

  const SpinOrbital h1 = info->holes[0], h2 = info->holes[1];
  const SpinOrbital p1 = info->particles[0], p2 = info->particles[1];
  double v = 0.0;
  if (h1.spin == p1.spin && h2.spin == p2.spin) v += phys(t, h1.orbital, h2.orbital, p1.orbital, p2.orbital);
  if (h1.spin == p2.spin && h2.spin == p1.spin) v -= phys(t, h1.orbital, h2.orbital, p2.orbital, p1.orbital);
  return info->phase * v;
}

}  // namespace rbmci
