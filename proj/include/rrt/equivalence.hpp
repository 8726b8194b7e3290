#pragma once

#include <vector>

#include "rrt/assembly.hpp"
#include "rrt/eigensolve.hpp"

namespace rrt {

/// Piecewise gradient of a PEQ function on one cell. The x component is
/// linear in x and the y component linear in y, so endpoint values describe
/// it completely.
struct CellGradient {
  double gx_left = 0.0;
  double gx_right = 0.0;
  double gy_bottom = 0.0;
  double gy_top = 0.0;
};

struct PeqSolution {
  Vector coeffs;                       // edge integrals then cell integrals
  Vector cell_means;                   // Pi0 u, one value per cell (layout order)
  std::vector<CellGradient> gradient;  // per cell, same order as cell_means
};

/// Rebuilds the cell means and the broken gradient from DOF coefficients.
PeqSolution peq_solution(const PeqSystem& peq, Vector coeffs);

/// (grad_h u, grad_h v) = (Pi0 f, v) for cell values f. Sparse Cholesky;
/// throws SingularSystem if the factorization fails.
PeqSolution solve_peq_poisson(const PeqSystem& peq, const Vector& f_cell_means);

struct PeqEigenpair {
  double lambda = 0.0;
  PeqSolution solution;  // ||Pi0 u||_0 = 1
};

/// k smallest eigenpairs of (grad_h u, grad_h v) = lambda (Pi0 u, Pi0 v).
/// The pencil is condensed onto the cell integrals (where Pi0 acts) by
/// eliminating the edge unknowns through K, which leaves an SPD problem with
/// n_cell finite eigenvalues.
std::vector<PeqEigenpair> solve_peq_eigs(const PeqSystem& peq, const SolveOptions& opts);

/// ||sigma + grad_h u||_0 for an RT field sigma and a PEQ gradient, exact.
double flux_gradient_distance(const TensorMesh& mesh, const DofLayout& d, const Vector& sigma,
                              const std::vector<CellGradient>& gradient);

/// Largest jump of the normal component of grad_h u across interior edges.
double max_normal_jump(const TensorMesh& mesh, const DofLayout& d,
                       const std::vector<CellGradient>& gradient);

struct EquivalencePair {
  double lambda_rrt = 0.0;
  double lambda_peq = 0.0;
  double lambda_rel = 0.0;     // |lambda_rrt - lambda_peq| / lambda_rrt
  double sigma_dist = 0.0;     // ||sigma_rrt + grad_h u_peq||_0 / ||sigma_rrt||_0
  double u_dist = 0.0;         // ||u_rrt - Pi0 u_peq||_0
  int cluster_size = 1;
  double cluster_gap = 0.0;    // gap between the two cell eigenspaces
};

struct EquivalenceReport {
  std::vector<EquivalencePair> pairs;
  double max_jump = 0.0;            // normal-flux continuity of grad_h u_peq
  double poisson_sigma_dist = 0.0;  // source problem with f = Pi0 u_{1,1}
  double poisson_u_dist = 0.0;

  double worst_lambda() const;
  double worst_sigma() const;
  double worst_u() const;
};

/// Solves both discretizations on the mesh and compares eigenvalues,
/// fluxes and cell means. Eigenvectors inside a cluster (values within
/// cluster_tol relatively) are matched by the orthogonal map between the
/// two cell eigenspaces.
EquivalenceReport verify_equivalence(const TensorMesh& mesh, int k, double tol,
                                     double cluster_tol = 1e-7);

}  // namespace rrt
