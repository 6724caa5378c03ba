#pragma once

#include <optional>
#include <vector>

#include "rbmci/determinant.hpp"
#include "rbmci/fcidump.hpp"

namespace rbmci {

enum class Spin { alpha, beta };

/// A spin orbital; `orbital` is the 0-based bit index in the determinant masks.
struct SpinOrbital {
  int orbital = 0;
  Spin spin = Spin::alpha;

  friend bool operator==(const SpinOrbital&, const SpinOrbital&) = default;
};

/// Difference between a bra and a ket determinant.
///
/// Holes are occupied in the bra and empty in the ket; particles are empty in
/// the bra and occupied in the ket. Both lists are in canonical spin-orbital
/// order (alpha block first, ascending orbital), and holes[k] is paired with
/// particles[k]. `phase` is the sign with which the paired creation/annihilation
/// string maps the ket onto the bra:
///   a+_{h1} a+_{h2} a_{p2} a_{p1} |ket> = phase |bra>.
struct ExcitationInfo {
  int degree = 0;
  std::vector<SpinOrbital> holes;
  std::vector<SpinOrbital> particles;
  int phase = 1;
};

/// Returns std::nullopt when the determinants differ by more than two electrons.
/// Throws domain_error when per-spin electron counts differ.
std::optional<ExcitationInfo> analyze_excitation(const Determinant& bra, const Determinant& ket);

/// <bra|H|ket> by the Slater-Condon rules, in Hartree.
double matrix_element(const Determinant& bra, const Determinant& ket, const IntegralTable& table);

/// <D|H|D> for a single determinant.
double diagonal_element(const Determinant& d, const IntegralTable& table);

}  // namespace rbmci
