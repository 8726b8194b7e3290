#pragma once

#include <functional>
#include <numbers>
#include <vector>

#include "rrt/assembly.hpp"
#include "rrt/eigensolve.hpp"
#include "rrt/mesh.hpp"

namespace rrt {

struct Rectangle {
  double x0 = 0.0;
  double x1 = std::numbers::pi;
  double y0 = 0.0;
  double y1 = std::numbers::pi;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  bool is_square() const { return width() == height(); }
};

/// Domain spanned by the mesh's outer nodes.
Rectangle bounding_rectangle(const TensorMesh& mesh);

/// Wave numbers of sin(m pi (x - x0) / a) sin(n pi (y - y0) / b).
struct Frequency {
  int m = 1;
  int n = 1;
  bool operator==(const Frequency&) const = default;
};

/// Exact Dirichlet eigenvalue on a rectangle with its frequency pairs.
/// On a square the pairs are unordered (m <= n), each (m, n) with m != n
/// standing for the two functions u_{m,n}, u_{n,m}.
struct ExactEigenpair {
  double lambda = 0.0;
  Rectangle domain;
  std::vector<Frequency> frequencies;  // ascending by m^4 + n^4
  int multiplicity = 0;

  /// Ordered (m, n) of an L2-orthonormal basis of the eigenspace.
  std::vector<Frequency> basis() const;
  /// Basis functions belonging to one frequency pair.
  std::vector<Frequency> basis_of(const Frequency& f) const;
};

double exact_lambda(const Rectangle& domain, int m, int n);

/// First k exact eigenvalues counted with multiplicity, ascending.
std::vector<ExactEigenpair> enumerate_exact(const Rectangle& domain, int k);

/// One term c * N sin(alpha (x-x0)) sin(beta (y-y0)) with N = 2/sqrt(ab).
struct Mode {
  double coeff = 1.0;
  int m = 1;
  int n = 1;
};

/// A finite sine series on a rectangle with pointwise evaluators and the
/// closed-form cell and edge integrals the analysis needs.
class FieldSample {
public:
  FieldSample(Rectangle domain, std::vector<Mode> modes);
  static FieldSample single(const Rectangle& domain, int m, int n, double coeff = 1.0);

  const Rectangle& domain() const { return domain_; }
  const std::vector<Mode>& modes() const { return modes_; }
  /// Eigenvalue if every mode shares one; otherwise the largest mode value.
  double lambda() const;

  double u(double x, double y) const;
  double ux(double x, double y) const;
  double uy(double x, double y) const;
  double uxx(double x, double y) const;
  double uyy(double x, double y) const;
  double uxy(double x, double y) const;
  double uxxx(double x, double y) const;
  double uyyy(double x, double y) const;
  double laplacian(double x, double y) const;
  double sigma_x(double x, double y) const { return -ux(x, y); }
  double sigma_y(double x, double y) const { return -uy(x, y); }

  /// Integral of u over [xl, xr] x [yb, yt].
  double cell_integral(double xl, double xr, double yb, double yt) const;
  /// Integral of -Laplacian(u) = div(sigma) over the cell.
  double cell_integral_div_sigma(double xl, double xr, double yb, double yt) const;
  double cell_integral_uxx_sq(double xl, double xr, double yb, double yt) const;
  double cell_integral_uyy_sq(double xl, double xr, double yb, double yt) const;
  /// Mean of sigma . (+x) over the vertical edge {x} x [yb, yt].
  double xedge_mean_flux(double x, double yb, double yt) const;
  /// Mean of sigma . (+y) over the horizontal edge [xl, xr] x {y}.
  double yedge_mean_flux(double y, double xl, double xr) const;

private:
  double alpha(const Mode& t) const;
  double beta(const Mode& t) const;
  template <class Term>
  double sum_modes(double x, double y, Term&& term) const;

  Rectangle domain_;
  std::vector<Mode> modes_;
  double amplitude_;
};

/// Mean normal fluxes of sigma = -grad u over every edge, in closed form.
Vector rt_interpolate_exact(const TensorMesh& mesh, const FieldSample& field);

/// Cell means of u, in closed form.
Vector l2_project_exact(const TensorMesh& mesh, const FieldSample& field);

/// Edge-mean interpolation of an arbitrary vector field by Gauss quadrature
/// along each edge (exact for polynomials of degree < 2 * points).
Vector rt_interpolate_quadrature(const TensorMesh& mesh,
                                 const std::function<double(double, double)>& sx,
                                 const std::function<double(double, double)>& sy, int points = 10);

Vector l2_project_quadrature(const TensorMesh& mesh, const std::function<double(double, double)>& f,
                             int points = 10);

/// Coefficients (u_h, b) of the discrete u over the given exact basis
/// functions, with u_h piecewise constant.
Vector project_onto_basis(const TensorMesh& mesh, const Vector& u_h,
                          const std::vector<Frequency>& basis, const Rectangle& domain);

/// Unit element of the exact eigenspace closest to u_h in L2. Throws
/// AmbiguousCluster when the projection norm is below 0.5.
FieldSample align_exact_representative(const MixedEigenpair& pair, const ExactEigenpair& exact,
                                       const TensorMesh& mesh);

/// Same, restricted to the basis functions of one frequency pair.
FieldSample align_to_frequency(const Vector& u_h, const ExactEigenpair& exact,
                               const Frequency& frequency, const TensorMesh& mesh);

}  // namespace rrt
