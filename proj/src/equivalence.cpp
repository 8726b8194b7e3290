#include "rrt/equivalence.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SparseCholesky>

#include "rrt/analysis.hpp"
#include "rrt/error.hpp"
#include "rrt/exact.hpp"

namespace rrt {

namespace {

using Eigen::MatrixXd;

double local_coeff(const Vector& coeffs, int dof) { return dof < 0 ? 0.0 : coeffs[dof]; }

Vector cell_rhs(const PeqSystem& peq, const Vector& cell_values) {
  Vector rhs = Vector::Zero(peq.layout.size());
  rhs.tail(peq.layout.n_cell) = cell_values;
  return rhs;
}

}  // namespace

PeqSolution peq_solution(const PeqSystem& peq, Vector coeffs) {
  const PeqLayout& d = peq.layout;
  const TensorMesh& mesh = peq.mesh;
  if (coeffs.size() != d.size()) throw Error(ErrorKind::LayoutMismatch, "PEQ coefficient length mismatch");
  const auto& basis = peq_reference_basis();

  PeqSolution s;
  s.cell_means.resize(d.n_cell);
  s.gradient.resize(d.n_cell);
  for (int j = 0; j < mesh.ny(); ++j) {
    for (int i = 0; i < mesh.nx(); ++i) {
      if (!mesh.active(i, j)) continue;
      const double hx = mesh.hx(i);
      const double hy = mesh.hy(j);
      const int c = d.cell(i, j);
      Eigen::Matrix<double, 5, 1> means;
      means << local_coeff(coeffs, d.xedge(i, j)) / hy, local_coeff(coeffs, d.xedge(i + 1, j)) / hy,
          local_coeff(coeffs, d.yedge(i, j)) / hx, local_coeff(coeffs, d.yedge(i, j + 1)) / hx,
          coeffs[c] / (hx * hy);
      const Eigen::Matrix<double, 5, 1> p = basis * means;  // 1, xi, eta, xi^2, eta^2
      CellGradient& g = s.gradient[c - d.n_edge];
      g.gx_left = 2.0 / hx * (p[1] - 2.0 * p[3]);
      g.gx_right = 2.0 / hx * (p[1] + 2.0 * p[3]);
      g.gy_bottom = 2.0 / hy * (p[2] - 2.0 * p[4]);
      g.gy_top = 2.0 / hy * (p[2] + 2.0 * p[4]);
      s.cell_means[c - d.n_edge] = means[4];
    }
  }
  s.coeffs = std::move(coeffs);
  return s;
}

PeqSolution solve_peq_poisson(const PeqSystem& peq, const Vector& f_cell_means) {
  if (f_cell_means.size() != peq.layout.n_cell)
    throw Error(ErrorKind::LayoutMismatch, "f length does not match the cell count");
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(peq.K.matrix);
  if (ldlt.info() != Eigen::Success) throw Error(ErrorKind::SingularSystem, "PEQ stiffness factorization failed");
  // (Pi0 f, v) pairs f_K with the cell integral of v, which is the cell DOF.
  Vector u = ldlt.solve(cell_rhs(peq, f_cell_means));
  if (ldlt.info() != Eigen::Success) throw Error(ErrorKind::SingularSystem, "PEQ solve failed");
  return peq_solution(peq, std::move(u));
}

std::vector<PeqEigenpair> solve_peq_eigs(const PeqSystem& peq, const SolveOptions& opts) {
  const PeqLayout& d = peq.layout;
  validate(opts, d.n_cell);
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(peq.K.matrix);
  if (ldlt.info() != Eigen::Success) throw Error(ErrorKind::SingularSystem, "PEQ stiffness factorization failed");

  const Vector dcell = peq.M0.tail(d.n_cell);
  auto inv_apply = [&](const MatrixXd& x) -> MatrixXd {
    MatrixXd rhs = MatrixXd::Zero(d.size(), x.cols());
    rhs.bottomRows(d.n_cell) = dcell.asDiagonal() * x;
    const MatrixXd w = ldlt.solve(rhs);
    return w.bottomRows(d.n_cell);
  };
  const detail::RitzResult ritz = detail::block_inverse_subspace(inv_apply, dcell, opts);

  std::vector<PeqEigenpair> out;
  out.reserve(ritz.values.size());
  for (int i = 0; i < ritz.values.size(); ++i) {
    const double lambda = ritz.values[i];
    Vector x = ritz.vectors.col(i);
    x /= std::sqrt(x.cwiseAbs2().dot(dcell));
    detail::normalize_sign(x);
    // K v = lambda M0 v with the cell part of v equal to x.
    Vector v = lambda * ldlt.solve(cell_rhs(peq, dcell.cwiseProduct(x)));
    v.tail(d.n_cell) = x;
    out.push_back({lambda, peq_solution(peq, std::move(v))});
  }
  return out;
}

double flux_gradient_distance(const TensorMesh& mesh, const DofLayout& d, const Vector& sigma,
                              const std::vector<CellGradient>& gradient) {
  if (static_cast<int>(gradient.size()) != d.n_cell || sigma.size() != d.n_sigma())
    throw Error(ErrorKind::LayoutMismatch, "flux or gradient length mismatch");
  auto segment = [](double a, double b) { return (a * a + a * b + b * b) / 3.0; };
  double total = 0.0;
  for (int c = 0; c < d.n_cell; ++c) {
    const auto [i, j] = d.cell_pos[c];
    const CellGradient& g = gradient[c];
    const double ax = sigma[d.xedge(i, j)] + g.gx_left;
    const double bx = sigma[d.xedge(i + 1, j)] + g.gx_right;
    const double ay = sigma[d.yedge(i, j)] + g.gy_bottom;
    const double by = sigma[d.yedge(i, j + 1)] + g.gy_top;
    total += mesh.area(i, j) * (segment(ax, bx) + segment(ay, by));
  }
  return std::sqrt(total);
}

double max_normal_jump(const TensorMesh& mesh, const DofLayout& d,
                       const std::vector<CellGradient>& gradient) {
  double worst = 0.0;
  for (int j = 0; j < mesh.ny(); ++j) {
    for (int i = 0; i < mesh.nx(); ++i) {
      const int c = d.cell(i, j);
      if (c < 0) continue;
      if (i + 1 < mesh.nx() && d.cell(i + 1, j) >= 0)
        worst = std::max(worst, std::abs(gradient[c].gx_right - gradient[d.cell(i + 1, j)].gx_left));
      if (j + 1 < mesh.ny() && d.cell(i, j + 1) >= 0)
        worst = std::max(worst, std::abs(gradient[c].gy_top - gradient[d.cell(i, j + 1)].gy_bottom));
    }
  }
  return worst;
}

double EquivalenceReport::worst_lambda() const {
  double w = 0.0;
  for (const auto& p : pairs) w = std::max(w, p.lambda_rel);
  return w;
}

double EquivalenceReport::worst_sigma() const {
  double w = 0.0;
  for (const auto& p : pairs) w = std::max(w, p.sigma_dist);
  return w;
}

double EquivalenceReport::worst_u() const {
  double w = 0.0;
  for (const auto& p : pairs) w = std::max(w, p.u_dist);
  return w;
}

EquivalenceReport verify_equivalence(const TensorMesh& mesh, int k, double tol, double cluster_tol) {
  const MixedSystem mixed = assemble_mixed(mesh);
  const PeqSystem peq = assemble_peq(mesh);
  const DofLayout& d = mixed.layout;
  if (peq.layout.n_cell != d.n_cell) throw Error(ErrorKind::LayoutMismatch, "cell counts differ");

  SolveOptions opts;
  opts.tol = tol;
  validate(SolveOptions{.k = k, .tol = tol}, d.n_cell);
  // A few extra pairs so that a cluster straddling index k is seen whole.
  opts.k = std::min(d.n_cell, k + 4);
  const auto rrt = solve_mixed_eigs(mixed, opts);
  const auto pe = solve_peq_eigs(peq, opts);

  EquivalenceReport report;
  int start = 0;
  while (start < k) {
    int end = start + 1;
    while (end < opts.k && rrt[end].lambda_h - rrt[start].lambda_h <= cluster_tol * rrt[start].lambda_h) ++end;
    const int size = end - start;

    MatrixXd ur(d.n_cell, size), up(d.n_cell, size), cp(peq.layout.size(), size);
    for (int c = 0; c < size; ++c) {
      ur.col(c) = rrt[start + c].u_coeffs;
      up.col(c) = pe[start + c].solution.cell_means;
      cp.col(c) = pe[start + c].solution.coeffs;
    }
    const MatrixXd q = ur.transpose() * mixed.M.asDiagonal() * up;
    const MatrixXd aligned = cp * q.transpose();
    const double gap = eigenspace_gap(EigenspaceBasis::cell(mixed, ur), EigenspaceBasis::cell(mixed, up));

    for (int c = 0; c < size && start + c < k; ++c) {
      const MixedEigenpair& r = rrt[start + c];
      const PeqSolution s = peq_solution(peq, aligned.col(c));
      EquivalencePair p;
      p.lambda_rrt = r.lambda_h;
      p.lambda_peq = pe[start + c].lambda;
      p.lambda_rel = std::abs(p.lambda_rrt - p.lambda_peq) / p.lambda_rrt;
      const double sigma_norm = std::sqrt(r.sigma_coeffs.dot(mixed.A.matrix * r.sigma_coeffs));
      p.sigma_dist = flux_gradient_distance(mesh, d, r.sigma_coeffs, s.gradient) / sigma_norm;
      p.u_dist = std::sqrt((r.u_coeffs - s.cell_means).cwiseAbs2().dot(mixed.M));
      p.cluster_size = size;
      p.cluster_gap = gap;
      report.pairs.push_back(p);
      report.max_jump = std::max(report.max_jump, max_normal_jump(mesh, d, pe[start + c].solution.gradient));
    }
    start = end;
  }

  Vector f;
  if (mesh.full())
    f = l2_project_exact(mesh, FieldSample::single(bounding_rectangle(mesh), 1, 1));
  else
    f = Vector::Ones(d.n_cell);
  const auto [sigma, u] = solve_mixed_poisson(mixed, f);
  const PeqSolution ps = solve_peq_poisson(peq, f);
  report.poisson_sigma_dist = flux_gradient_distance(mesh, d, sigma, ps.gradient);
  report.poisson_u_dist = std::sqrt((u - ps.cell_means).cwiseAbs2().dot(mixed.M));
  report.max_jump = std::max(report.max_jump, max_normal_jump(mesh, d, ps.gradient));
  return report;
}

}  // namespace rrt
