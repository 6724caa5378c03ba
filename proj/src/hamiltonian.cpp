#include "rbmci/hamiltonian.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>

#include "rbmci/errors.hpp"
#include "rbmci/parallel.hpp"
#include "rbmci/slater_condon.hpp"

namespace rbmci {

SparseHamiltonian::SparseHamiltonian(
    Eigen::VectorXd diagonal, const std::vector<std::vector<std::pair<std::size_t, double>>>& upper)
    : diagonal_(std::move(diagonal)) {
  const std::size_t n = dimension();
  if (upper.size() != n) throw shape_error("upper-triangle row count differs from dimension");
  std::vector<std::vector<std::pair<std::size_t, double>>> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    rows[i].emplace_back(i, diagonal_[static_cast<Eigen::Index>(i)]);
    for (const auto& [j, v] : upper[i]) {
      if (j <= i || j >= n) throw shape_error("upper-triangle entry outside the strict upper triangle");
      rows[i].emplace_back(j, v);
      rows[j].emplace_back(i, v);
    }
  }
  row_offsets_.assign(1, 0);
  for (auto& row : rows) {
    std::sort(row.begin(), row.end());
    for (const auto& [j, v] : row) {
      columns_.push_back(j);
      values_.push_back(v);
    }
    row_offsets_.push_back(columns_.size());
  }
}

Eigen::VectorXd SparseHamiltonian::multiply(const Eigen::VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != dimension())
    throw shape_error("vector length differs from Hamiltonian dimension");
  Eigen::VectorXd y = Eigen::VectorXd::Zero(x.size());
  for (std::size_t i = 0; i < dimension(); ++i) {
    double s = 0.0;
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
      s += values_[k] * x[static_cast<Eigen::Index>(columns_[k])];
    y[static_cast<Eigen::Index>(i)] = s;
  }
  return y;
}

Eigen::MatrixXd SparseHamiltonian::to_dense() const {
  const auto n = static_cast<Eigen::Index>(dimension());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < dimension(); ++i)
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(columns_[k])) = values_[k];
  return m;
}

double SparseHamiltonian::at(std::size_t i, std::size_t j) const {
  if (i >= dimension() || j >= dimension()) throw index_error("matrix index out of range");
  auto first = columns_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i]);
  auto last = columns_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i + 1]);
  auto it = std::lower_bound(first, last, j);
  return (it != last && *it == j) ? values_[static_cast<std::size_t>(it - columns_.begin())] : 0.0;
}

SparseHamiltonian build_hamiltonian(std::span<const Determinant> dets, const IntegralTable& table,
                                    unsigned threads) {
  const std::size_t n = dets.size();
  if (n == 0) throw domain_error("cannot build a Hamiltonian over an empty determinant list");
  const int na = dets.front().n_alpha();
  const int nb = dets.front().n_beta();
  std::set<DeterminantKey> seen;
  for (const auto& d : dets) {
    if (!satisfies_pauli(d, na, nb, table.n_orbitals()))
      throw domain_error("determinants must share per-spin electron counts within the orbital range");
    if (!seen.insert(to_key(d, table.n_orbitals())).second)
      throw domain_error("duplicate determinant in Hamiltonian build");
  }

  Eigen::VectorXd diagonal(static_cast<Eigen::Index>(n));
  std::vector<std::vector<std::pair<std::size_t, double>>> upper(n);
  parallel_for(n, threads, [&](std::size_t i) {
    diagonal[static_cast<Eigen::Index>(i)] = diagonal_element(dets[i], table);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (hamming_distance(dets[i], dets[j]) > 4) continue;
      const double v = matrix_element(dets[i], dets[j], table);
      if (std::abs(v) > kStructuralZero) upper[i].emplace_back(j, v);
    }
  });
  return SparseHamiltonian(std::move(diagonal), upper);
}

void write_matrix_coo(std::ostream& out, const SparseHamiltonian& h) {
  char buf[64];
  for (std::size_t i = 0; i < h.dimension(); ++i)
    for (std::size_t k = h.row_offsets()[i]; k < h.row_offsets()[i + 1]; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", h.values()[k]);
      out << i + 1 << ' ' << h.columns()[k] + 1 << ' ' << buf << '\n';
    }
}

void fix_sign(Eigen::VectorXd& v) {
  if (v.size() == 0) return;
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  if (v[best] < 0) v = -v;
}

Eigen::VectorXd diagonal_guess(const SparseHamiltonian& h) {
  if (h.dimension() == 0) throw domain_error("empty Hamiltonian");
  Eigen::Index best = 0;
  h.diagonal().minCoeff(&best);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(h.dimension()));
  g[best] = 1.0;
  return g;
}

Eigenpair dense_lowest(const Eigen::MatrixXd& h, std::size_t cutoff) {
  if (h.rows() == 0) throw domain_error("empty Hamiltonian");
  if (h.rows() != h.cols()) throw shape_error("matrix is not square");
  if (static_cast<std::size_t>(h.rows()) > cutoff)
    throw capacity_error("dimension " + std::to_string(h.rows()) + " exceeds the dense cutoff " +
                         std::to_string(cutoff));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  if (solver.info() != Eigen::Success) throw convergence_error("dense eigensolver failed", 0.0);
  Eigenpair out;
  out.energy = solver.eigenvalues()[0];
  out.coefficients = solver.eigenvectors().col(0);
  out.coefficients.normalize();
  fix_sign(out.coefficients);
  out.residual = (h * out.coefficients - out.energy * out.coefficients).norm();
  return out;
}

Eigenpair dense_lowest(const SparseHamiltonian& h, std::size_t cutoff) {
  if (h.dimension() > cutoff)
    throw capacity_error("dimension " + std::to_string(h.dimension()) +
                         " exceeds the dense cutoff " + std::to_string(cutoff));
  return dense_lowest(h.to_dense(), cutoff);
}

}  // namespace rbmci
