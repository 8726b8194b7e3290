#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "rrt/mesh.hpp"

namespace rrt {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Degrees of freedom of the lowest-order rectangular Raviart-Thomas pair.
///
/// Flux DOFs are mean normal fluxes on edges, with the normal pointing in +x
/// for vertical edges and +y for horizontal ones. Vertical-edge DOFs come
/// first, then horizontal-edge DOFs, each block ordered like the cells
/// (position along the edge direction fast). Cell DOFs follow the mesh cell
/// order. Inactive cells, and edges touching no active cell, get index -1.
struct DofLayout {
  int n1 = 0;
  int n2 = 0;
  int n_xedge = 0;
  int n_yedge = 0;
  int n_cell = 0;

  std::vector<int> xedge_dof;  // (p, j) -> p + j*(n1+1)
  std::vector<int> yedge_dof;  // (i, q) -> i + q*n1, values offset by n_xedge
  std::vector<int> cell_dof;   // (i, j) -> i + j*n1

  std::vector<std::array<int, 2>> sigma_pos;  // dof -> (p, j) or (i, q)
  std::vector<std::array<int, 2>> cell_pos;    // dof -> (i, j)

  int n_sigma() const { return n_xedge + n_yedge; }
  int xedge(int p, int j) const { return xedge_dof[p + j * (n1 + 1)]; }
  int yedge(int i, int q) const { return yedge_dof[i + q * n1]; }
  int cell(int i, int j) const { return cell_dof[i + j * n1]; }
  bool is_xedge(int dof) const { return dof < n_xedge; }
};

DofLayout layout(const TensorMesh& mesh);

/// Symmetric sparse matrix assembled from symmetric element contributions.
struct SparseSym {
  SparseMatrix matrix;
  bool symmetric = true;

  int dimension() const { return static_cast<int>(matrix.rows()); }
};

/// Mixed system: A = (sigma, tau), B = cell integrals of div, M = cell areas.
/// The discrete eigenproblem reads A s = B^T u, B s = lambda M u.
struct MixedSystem {
  TensorMesh mesh;
  DofLayout layout;
  SparseSym A;
  SparseMatrix B;  // n_cell x n_sigma
  Vector M;        // diagonal of cell areas
};

MixedSystem assemble_mixed(const TensorMesh& mesh);

/// Local closed-form blocks of one cell [xl, xl+hx] x [yb, yb+hy].
/// Order of local flux DOFs: left, right, bottom, top.
struct MixedElement {
  Eigen::Matrix4d mass;
  Eigen::Vector4d div;  // integral of div over the cell
  double area;
};
MixedElement mixed_element(double hx, double hy);

/// Layout of the projected enriched rotated-bilinear space: one DOF per
/// interior edge (the edge integral) and one per cell (the cell integral).
/// Boundary edge DOFs are eliminated (homogeneous Dirichlet).
struct PeqLayout {
  int n1 = 0;
  int n2 = 0;
  int n_edge = 0;  // free (interior) edge DOFs
  int n_cell = 0;
  std::vector<int> xedge_dof;  // same indexing as DofLayout, -1 on boundary
  std::vector<int> yedge_dof;
  std::vector<int> cell_dof;   // offset by n_edge

  int size() const { return n_edge + n_cell; }
  int xedge(int p, int j) const { return xedge_dof[p + j * (n1 + 1)]; }
  int yedge(int i, int q) const { return yedge_dof[i + q * n1]; }
  int cell(int i, int j) const { return cell_dof[i + j * n1]; }
};

struct PeqSystem {
  TensorMesh mesh;
  PeqLayout layout;
  SparseSym K;  // (grad_h u, grad_h v)
  Vector M0;    // diagonal of (Pi0 u, Pi0 v): zero on edges, 1/|K| on cells
};

PeqSystem assemble_peq(const TensorMesh& mesh);

/// Local PEQ element on [xl, xl+hx] x [yb, yb+hy] in the dual basis of the
/// functionals (int_L, int_R, int_B, int_T, int_K).
struct PeqElement {
  Eigen::Matrix<double, 5, 5> stiffness;
  Eigen::Matrix<double, 5, 1> cell_mean;  // cell mean of each basis function
};
PeqElement peq_element(double hx, double hy);

/// Coefficients of the dual basis on the reference cell [-1,1]^2 in the
/// monomials (1, xi, eta, xi^2, eta^2), for mean-value functionals
/// (left, right, bottom, top, cell). Scaling by 1/|e| or 1/|K| gives the
/// integral-normalized basis.
const Eigen::Matrix<double, 5, 5>& peq_reference_basis();

/// Coordinate text dump: "row col value" per line with 17 significant digits.
void write_coordinate(std::ostream& os, const SparseMatrix& m);

}  // namespace rrt
