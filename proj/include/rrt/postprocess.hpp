#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "rrt/assembly.hpp"
#include "rrt/eigensolve.hpp"
#include "rrt/exact.hpp"

namespace rrt {

struct SuperclosenessReport {
  double norm_sigma = 0.0;  // ||sigma_I - sigma_h||_0
  double norm_div = 0.0;    // ||div(sigma_I - sigma_h)||_0
  double norm_u = 0.0;      // ||Pi0 u - u_h||_0
  int level = 0;
  double h = 0.0;
};

/// Norms of the differences measured through A, B and M. Throws
/// LayoutMismatch when a vector does not fit the layout.
SuperclosenessReport supercloseness_norms(const MixedSystem& system, const MixedEigenpair& pair,
                                          const Vector& sigma_I, const Vector& pi0_u);

/// Tensor Lagrange polynomial on one macro element, stored by nodal values:
/// value(x, y) = sum_a sum_b values[a][b] L_a(x) M_b(y).
struct LagrangePatch {
  std::vector<double> xs;  // interpolation abscissae
  std::vector<double> ys;  // interpolation ordinates
  std::vector<double> values;  // values[a + b * xs.size()]

  double value(double x, double y) const;
  double dx(double x, double y) const;
  double dy(double x, double y) const;
};

/// Piecewise polynomial on the 2x2 macro elements of a mesh. The flux part
/// holds sigma_x in Q21 and sigma_y in Q12 per macro element; the scalar part
/// holds a Q11 polynomial.
struct PostprocessedField {
  TensorMesh mesh;  // the fine mesh the discrete data lives on
  int macro_nx = 0;
  int macro_ny = 0;
  std::vector<LagrangePatch> flux_x;
  std::vector<LagrangePatch> flux_y;
  std::vector<LagrangePatch> scalar;

  bool has_flux() const { return !flux_x.empty(); }
  bool has_scalar() const { return !scalar.empty(); }
  int macro_of_cell(int i, int j) const { return i / 2 + (j / 2) * macro_nx; }
};

/// Macro-element flux reconstruction. sigma_x on a macro element is the Q21
/// interpolant of the six vertical-edge flux values placed at (edge line,
/// cell-row midpoint); sigma_y likewise with the roles of x and y swapped.
/// Throws OddMeshDimensions unless both cell counts are even.
PostprocessedField i2h_sigma(const TensorMesh& mesh, const Vector& sigma_h);

/// Q11 interpolant of the four cell values placed at the cell centroids of
/// each macro element.
PostprocessedField j2h_u(const TensorMesh& mesh, const Vector& u_h);

/// L2 (order 0) or broken H1-seminorm (order 1) error against the exact
/// field, with 5x5 Gauss points on every fine cell. Flux fields compare with
/// sigma = -grad u, scalar fields with u.
double error_norms_postprocessed(const PostprocessedField& field, const FieldSample& exact,
                                 int order);

/// Same norms of the unprocessed discrete fields, for comparison.
double flux_error(const TensorMesh& mesh, const Vector& sigma_h, const FieldSample& exact);
double scalar_error(const TensorMesh& mesh, const Vector& u_h, const FieldSample& exact);

/// Evaluates a discrete RT field at a point inside cell (i, j).
std::array<double, 2> evaluate_flux(const TensorMesh& mesh, const DofLayout& d,
                                    const Vector& sigma, int i, int j, double x, double y);

/// Sampled grid "x y value" lines for figures; component 0/1 = flux x/y,
/// 2 = scalar.
void write_sampled(std::ostream& os, const PostprocessedField& field, int component,
                   int samples_per_cell = 4);

}  // namespace rrt
