#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "rbmci/determinant.hpp"
#include "rbmci/fcidump.hpp"

namespace rbmci {

/// Off-diagonal elements with magnitude at or below this are not stored.
inline constexpr double kStructuralZero = 1e-15;

/// Symmetric CI Hamiltonian in compressed-row form. Both triangles are stored
/// and every row holds its diagonal entry.
class SparseHamiltonian {
 public:
  SparseHamiltonian() = default;

  /// Builds from per-row (column, value) lists of the strict upper triangle.
  SparseHamiltonian(Eigen::VectorXd diagonal,
                    const std::vector<std::vector<std::pair<std::size_t, double>>>& upper);

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(diagonal_.size()); }
  const Eigen::VectorXd& diagonal() const noexcept { return diagonal_; }
  std::size_t nonzeros() const noexcept { return values_.size(); }

  const std::vector<std::size_t>& row_offsets() const noexcept { return row_offsets_; }
  const std::vector<std::size_t>& columns() const noexcept { return columns_; }
  const std::vector<double>& values() const noexcept { return values_; }

  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd to_dense() const;

  /// Stored value at (i, j), zero when absent.
  double at(std::size_t i, std::size_t j) const;

 private:
  Eigen::VectorXd diagonal_;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::size_t> columns_;
  std::vector<double> values_;
};

/// Hamiltonian over `dets` (which must be duplicate-free with uniform
/// per-spin counts). `threads == 0` uses all hardware threads.
SparseHamiltonian build_hamiltonian(std::span<const Determinant> dets, const IntegralTable& table,
                                    unsigned threads = 1);

/// Coordinate dump: "i j value" per stored entry, 1-based.
void write_matrix_coo(std::ostream& out, const SparseHamiltonian& h);

struct Eigenpair {
  double energy = 0.0;
  Eigen::VectorXd coefficients;
  int iterations = 0;
  double residual = 0.0;
};

struct DavidsonOptions {
  double tolerance = 1e-8;  // on ||Hx - Ex||
  int max_subspace = 20;
  int max_iterations = 2000;
};

/// Lowest eigenpair by the Davidson method with the diagonal preconditioner
/// 1/(H_ii - theta). The subspace is collapsed onto the current Ritz vector
/// when it reaches `max_subspace`. Throws convergence_error (carrying the best
/// residual) when `max_iterations` is exhausted.
Eigenpair davidson_lowest(const SparseHamiltonian& h, const Eigen::VectorXd& guess,
                          const DavidsonOptions& options = {});

/// Unit vector on the smallest diagonal entry.
Eigen::VectorXd diagonal_guess(const SparseHamiltonian& h);

inline constexpr std::size_t kDefaultDenseCutoff = 2000;

/// Exact lowest eigenpair by full symmetric diagonalization.
/// Throws capacity_error above `cutoff`.
Eigenpair dense_lowest(const SparseHamiltonian& h, std::size_t cutoff = kDefaultDenseCutoff);
Eigenpair dense_lowest(const Eigen::MatrixXd& h, std::size_t cutoff = kDefaultDenseCutoff);

/// Flips the sign so the largest-magnitude entry is positive (first one on ties).
void fix_sign(Eigen::VectorXd& v);

/// Expansion of the ground state over a determinant list.
struct WavefunctionState {
  std::vector<Determinant> determinants;
  Eigen::VectorXd coefficients;  // unit norm
  double energy = 0.0;
};

}  // namespace rbmci
