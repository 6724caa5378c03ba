#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "rbmci/errors.hpp"
#include "rbmci/hamiltonian.hpp"

namespace rbmci {

namespace {

constexpr double kPreconditionerFloor = 1e-8;
constexpr double kLinearDependence = 1e-10;

// Orthogonalizes t against the first m columns of V (two Gram-Schmidt passes)
// and returns its remaining norm.
double orthogonalize(Eigen::VectorXd& t, const Eigen::MatrixXd& V, Eigen::Index m) {
  for (int pass = 0; pass < 2; ++pass)
    for (Eigen::Index k = 0; k < m; ++k) t -= V.col(k).dot(t) * V.col(k);
  return t.norm();
}

}  // namespace

Eigenpair davidson_lowest(const SparseHamiltonian& h, const Eigen::VectorXd& guess,
                          const DavidsonOptions& options) {
  const auto n = static_cast<Eigen::Index>(h.dimension());
  if (n == 0) throw domain_error("Davidson on a zero-dimensional matrix");
  if (guess.size() != n) throw shape_error("guess length differs from Hamiltonian dimension");
  if (!(options.tolerance > 0)) throw domain_error("Davidson tolerance must be positive");
  if (options.max_subspace < 2) throw domain_error("Davidson subspace must hold at least 2 vectors");
  const double guess_norm = guess.norm();
  if (!(guess_norm > 0) || !std::isfinite(guess_norm)) throw domain_error("Davidson guess is zero");

  const Eigen::Index max_m = std::min<Eigen::Index>(options.max_subspace, n);
  Eigen::MatrixXd V(n, max_m);
  Eigen::MatrixXd HV(n, max_m);
  V.col(0) = guess / guess_norm;
  HV.col(0) = h.multiply(V.col(0));
  Eigen::Index m = 1;

  double best_residual = std::numeric_limits<double>::infinity();
  Eigen::VectorXd x, hx;
  double theta = 0.0;
  const Eigen::VectorXd& diag = h.diagonal();

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    Eigen::MatrixXd T = V.leftCols(m).transpose() * HV.leftCols(m);
    T = 0.5 * (T + T.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sub(T);
    theta = sub.eigenvalues()[0];
    const Eigen::VectorXd y = sub.eigenvectors().col(0);
    x = V.leftCols(m) * y;
    hx = HV.leftCols(m) * y;
    const Eigen::VectorXd r = hx - theta * x;
    const double rnorm = r.norm();
    best_residual = std::min(best_residual, rnorm);

    if (rnorm <= options.tolerance) {
      Eigenpair out;
      out.coefficients = x.normalized();
      fix_sign(out.coefficients);
      out.energy = theta;
      out.iterations = iter;
      out.residual = rnorm;
      return out;
    }

    if (m == max_m) {
      const double xn = x.norm();
      V.col(0) = x / xn;
      HV.col(0) = hx / xn;
      m = 1;
    }

    Eigen::VectorXd t(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double denom = diag[i] - theta;
      if (std::abs(denom) < kPreconditionerFloor) denom = denom < 0 ? -kPreconditionerFloor : kPreconditionerFloor;
      t[i] = r[i] / denom;
    }
    double tn = orthogonalize(t, V, m);
    if (tn < kLinearDependence) {
      t = r;
      tn = orthogonalize(t, V, m);
    }
    if (tn < kLinearDependence) {
      // Residual lies in the current subspace up to rounding: the Ritz pair is
      // as accurate as this basis allows. Extend with the coordinate vector
      // carrying the largest residual component.
      Eigen::Index k = 0;
      r.cwiseAbs().maxCoeff(&k);
      t = Eigen::VectorXd::Unit(n, k);
      tn = orthogonalize(t, V, m);
      if (tn < kLinearDependence)
        throw convergence_error("Davidson subspace became linearly dependent", best_residual);
    }
    V.col(m) = t / tn;
    HV.col(m) = h.multiply(V.col(m));
    ++m;
  }
  throw convergence_error("Davidson did not converge within " +
                              std::to_string(options.max_iterations) + " iterations",
                          best_residual);
}

}  // namespace rbmci
