#include "rrt/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <string>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "rrt/error.hpp"

namespace rrt {

using Eigen::MatrixXd;

void validate(const SolveOptions& opts, int n_cell) {
  if (opts.k < 1) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
  if (opts.k > n_cell) {
    throw Error(ErrorKind::KTooLarge, "k = " + std::to_string(opts.k) + " exceeds " +
                                          std::to_string(n_cell) + " available eigenpairs");
  }
  if (!(opts.tol > 0.0 && opts.tol < 1.0))
    throw Error(ErrorKind::InvalidArgument, "tol must lie in (0, 1)");
  if (opts.max_iterations < 1)
    throw Error(ErrorKind::InvalidArgument, "max_iterations must be >= 1");
}

Vector schur_apply(const MixedSystem& system, const Vector& u_vec, const SolveOptions& opts) {
  if (u_vec.size() != system.layout.n_cell)
    throw Error(ErrorKind::LayoutMismatch, "u vector length does not match n_cell");
  const Vector rhs = system.B.transpose() * u_vec;
  if (rhs.squaredNorm() == 0.0) return Vector::Zero(u_vec.size());

  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(opts.effective_inner_tol());
  cg.setMaxIterations(opts.inner_max_iterations);
  cg.compute(system.A.matrix);
  const Vector sigma = cg.solve(rhs);
  if (cg.info() != Eigen::Success) {
    throw Error(ErrorKind::InnerSolveDiverged,
                "CG on A stopped after " + std::to_string(cg.iterations()) +
                    " iterations with relative residual " + std::to_string(cg.error()));
  }
  return system.B * sigma;
}

Vector recover_sigma(const MixedSystem& system, const Vector& u) {
  Eigen::SimplicialLLT<SparseMatrix> llt(system.A.matrix);
  return llt.solve(system.B.transpose() * u);
}

double mixed_residual(const MixedSystem& system, double lambda, const Vector& sigma,
                      const Vector& u) {
  const Vector r = system.B * sigma - lambda * system.M.cwiseProduct(u);
  const double rn = std::sqrt(r.cwiseAbs2().cwiseQuotient(system.M).sum());
  const double un = std::sqrt(u.cwiseAbs2().cwiseProduct(system.M).sum());
  return rn / (std::abs(lambda) * un);
}

namespace detail {

void normalize_sign(Vector& v, Vector* companion) {
  Eigen::Index idx = 0;
  v.cwiseAbs().maxCoeff(&idx);
  if (v[idx] < 0.0) {
    v = -v;
    if (companion != nullptr) *companion = -*companion;
  }
}

RitzResult block_inverse_subspace(const std::function<MatrixXd(const MatrixXd&)>& inv_apply,
                                  const Vector& d, const SolveOptions& opts) {
  const int n = static_cast<int>(d.size());
  validate(opts, n);
  int p = opts.block_size > 0 ? opts.block_size : std::max(opts.k + 2, 2 * opts.k + 4);
  p = std::clamp(p, opts.k, n);

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  MatrixXd x(n, p);
  for (int c = 0; c < p; ++c)
    for (int r = 0; r < n; ++r) x(r, c) = dist(rng);
  {
    // D-orthonormalize the start block.
    MatrixXd g = x.transpose() * d.asDiagonal() * x;
    Eigen::LLT<MatrixXd> llt(0.5 * (g + g.transpose()));
    x = llt.matrixU().solve<Eigen::OnTheRight>(x);
  }

  RitzResult out;
  Vector residuals = Vector::Constant(opts.k, 1.0);
  for (int it = 1; it <= opts.max_iterations; ++it) {
    const MatrixXd y = inv_apply(x);  // S y = D x
    const MatrixXd dx = d.asDiagonal() * x;
    const MatrixXd dy = d.asDiagonal() * y;
    MatrixXd gs = y.transpose() * dx;
    MatrixXd gd = y.transpose() * dy;
    gs = 0.5 * (gs + gs.transpose()).eval();
    gd = 0.5 * (gd + gd.transpose()).eval();

    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> ges(gs, gd);
    if (ges.info() != Eigen::Success)
      throw Error(ErrorKind::NotConverged, "Rayleigh-Ritz step failed");
    const Vector theta = ges.eigenvalues();
    const MatrixXd& c = ges.eigenvectors();

    const MatrixXd ritz = y * c;
    const MatrixXd sx = x * c;  // S ritz = D sx
    for (int i = 0; i < opts.k; ++i) {
      const Vector r = sx.col(i) - theta[i] * ritz.col(i);
      residuals[i] = std::sqrt(r.cwiseAbs2().dot(d)) / std::abs(theta[i]);
    }
    x = ritz;
    if (opts.trace != nullptr) *opts.trace << it << ' ' << residuals.maxCoeff() << '\n';
    out.iterations = it;
    if (residuals.maxCoeff() <= opts.tol) {
      out.values = theta.head(opts.k);
      out.vectors = x.leftCols(opts.k);
      out.residuals = residuals;
      return out;
    }
  }
  throw Error(ErrorKind::NotConverged,
              "block iteration reached " + std::to_string(opts.max_iterations) +
                  " iterations; worst relative residual " + std::to_string(residuals.maxCoeff()));
}

}  // namespace detail

namespace {

SparseMatrix saddle_matrix(const MixedSystem& system) {
  const int ns = system.layout.n_sigma();
  const int nc = system.layout.n_cell;
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(system.A.matrix.nonZeros() + 2 * system.B.nonZeros());
  for (int col = 0; col < system.A.matrix.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(system.A.matrix, col); it; ++it)
      t.emplace_back(it.row(), it.col(), it.value());
  for (int col = 0; col < system.B.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(system.B, col); it; ++it) {
      t.emplace_back(ns + it.row(), it.col(), -it.value());
      t.emplace_back(it.col(), ns + it.row(), -it.value());
    }
  SparseMatrix k(ns + nc, ns + nc);
  k.setFromTriplets(t.begin(), t.end());
  k.makeCompressed();
  return k;
}

std::vector<MixedEigenpair> finish_pairs(const MixedSystem& system, const Vector& values,
                                         const MatrixXd& u_vectors) {
  Eigen::SimplicialLLT<SparseMatrix> llt(system.A.matrix);
  std::vector<MixedEigenpair> out;
  out.reserve(values.size());
  for (int i = 0; i < values.size(); ++i) {
    MixedEigenpair pair;
    pair.lambda_h = values[i];
    pair.u_coeffs = u_vectors.col(i);
    const double norm = std::sqrt(pair.u_coeffs.cwiseAbs2().dot(system.M));
    pair.u_coeffs /= norm;
    detail::normalize_sign(pair.u_coeffs);
    pair.sigma_coeffs = llt.solve(system.B.transpose() * pair.u_coeffs);
    pair.residual_norm = mixed_residual(system, pair.lambda_h, pair.sigma_coeffs, pair.u_coeffs);
    out.push_back(std::move(pair));
  }
  return out;
}

}  // namespace

std::vector<MixedEigenpair> solve_mixed_eigs(const MixedSystem& system, const SolveOptions& opts) {
  validate(opts, system.layout.n_cell);
  const int ns = system.layout.n_sigma();
  const int nc = system.layout.n_cell;

  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(saddle_matrix(system));
  if (lu.info() != Eigen::Success)
    throw Error(ErrorKind::SingularSystem, "saddle-point factorization failed: " + lu.lastErrorMessage());

  auto inv_apply = [&](const MatrixXd& x) -> MatrixXd {
    MatrixXd rhs = MatrixXd::Zero(ns + nc, x.cols());
    rhs.bottomRows(nc) = -(system.M.asDiagonal() * x);
    const MatrixXd sol = lu.solve(rhs);
    return sol.bottomRows(nc);
  };
  const detail::RitzResult ritz = detail::block_inverse_subspace(inv_apply, system.M, opts);
  return finish_pairs(system, ritz.values, ritz.vectors);
}

std::pair<Vector, Vector> solve_mixed_poisson(const MixedSystem& system, const Vector& f_cell) {
  const int ns = system.layout.n_sigma();
  const int nc = system.layout.n_cell;
  if (f_cell.size() != nc) throw Error(ErrorKind::LayoutMismatch, "f length does not match n_cell");
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(saddle_matrix(system));
  if (lu.info() != Eigen::Success)
    throw Error(ErrorKind::SingularSystem, "saddle-point factorization failed: " + lu.lastErrorMessage());
  Vector rhs = Vector::Zero(ns + nc);
  rhs.tail(nc) = -system.M.cwiseProduct(f_cell);
  const Vector sol = lu.solve(rhs);
  return {sol.head(ns), sol.tail(nc)};
}

std::vector<MixedEigenpair> dense_oracle_eigs(const MixedSystem& system, int k, int cap) {
  const int nc = system.layout.n_cell;
  if (nc > cap) {
    throw Error(ErrorKind::OracleCapExceeded,
                "n_cell = " + std::to_string(nc) + " exceeds oracle cap " + std::to_string(cap));
  }
  SolveOptions check;
  check.k = k;
  validate(check, nc);

  Eigen::SimplicialLLT<SparseMatrix> llt(system.A.matrix);
  const SparseMatrix bt = system.B.transpose();
  MatrixXd s(nc, nc);
  for (int j = 0; j < nc; ++j) {
    const Vector col = bt.col(j);
    s.col(j) = system.B * llt.solve(col);
  }
  const Vector inv_sqrt_m = system.M.cwiseSqrt().cwiseInverse();
  MatrixXd c = inv_sqrt_m.asDiagonal() * s * inv_sqrt_m.asDiagonal();
  c = 0.5 * (c + c.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(c);
  const MatrixXd u = inv_sqrt_m.asDiagonal() * es.eigenvectors().leftCols(k);
  return finish_pairs(system, es.eigenvalues().head(k), u);
}

}  // namespace rrt
