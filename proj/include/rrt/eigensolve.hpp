#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

#include "rrt/assembly.hpp"

namespace rrt {

struct MixedEigenpair {
  double lambda_h = 0.0;
  Vector sigma_coeffs;
  Vector u_coeffs;
  double residual_norm = 0.0;  // ||B s - lambda M u||_{M^-1} / lambda
};

struct SolveOptions {
  int k = 6;
  double tol = 1e-10;
  int max_iterations = 1000;
  std::uint64_t seed = 20240607;
  double inner_tol = 0.0;  // <= 0 selects tol / 100
  int block_size = 0;      // <= 0 selects max(k + 2, 2k + 4), capped at n
  int inner_max_iterations = 2000;
  std::ostream* trace = nullptr;  // "iteration residual" per outer iteration

  double effective_inner_tol() const { return inner_tol > 0.0 ? inner_tol : tol / 100.0; }
};

/// Validates k/tol against the problem size (KTooLarge, InvalidArgument).
void validate(const SolveOptions& opts, int n_cell);

/// B A^{-1} B^T u with A^{-1} applied by Jacobi-preconditioned CG to
/// inner_tol. Throws InnerSolveDiverged when the iteration cap is hit.
Vector schur_apply(const MixedSystem& system, const Vector& u_vec, const SolveOptions& opts = {});

/// k smallest eigenpairs of (B A^{-1} B^T, M), ascending, u M-orthonormal,
/// sigma = A^{-1} B^T u. Shift-invert block subspace iteration with
/// Rayleigh-Ritz; the inverse is applied through a sparse LU factorization
/// of the saddle-point matrix.
std::vector<MixedEigenpair> solve_mixed_eigs(const MixedSystem& system, const SolveOptions& opts);

/// Dense reference: forms the Schur matrix column by column with direct
/// solves and diagonalizes M^{-1/2} S M^{-1/2}. Throws OracleCapExceeded
/// when n_cell > cap.
std::vector<MixedEigenpair> dense_oracle_eigs(const MixedSystem& system, int k, int cap = 5000);

/// Mixed source problem A s = B^T u, B s = M f for cell values f, solved
/// directly. Returns (sigma, u).
std::pair<Vector, Vector> solve_mixed_poisson(const MixedSystem& system, const Vector& f_cell);

/// sigma = A^{-1} B^T u with a direct solve.
Vector recover_sigma(const MixedSystem& system, const Vector& u);

/// Relative residual of the second mixed equation.
double mixed_residual(const MixedSystem& system, double lambda, const Vector& sigma,
                      const Vector& u);

namespace detail {

struct RitzResult {
  Vector values;
  Eigen::MatrixXd vectors;  // D-orthonormal columns
  Vector residuals;
  int iterations = 0;
};

/// Smallest eigenpairs of S x = theta D x (D diagonal positive, S SPD) given
/// an operator applying S^{-1} D column-wise. Used by both the mixed and the
/// projected-EQ solvers.
RitzResult block_inverse_subspace(const std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>& inv_apply,
                                  const Vector& d, const SolveOptions& opts);

/// Makes the entry of largest magnitude positive.
void normalize_sign(Vector& v, Vector* companion = nullptr);

}  // namespace detail

}  // namespace rrt
