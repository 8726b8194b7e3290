#include "rrt/postprocess.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "rrt/error.hpp"
#include "rrt/quadrature.hpp"

namespace rrt {

namespace {

double lagrange(const std::vector<double>& nodes, int a, double t) {
  double v = 1.0;
  for (int c = 0; c < static_cast<int>(nodes.size()); ++c)
    if (c != a) v *= (t - nodes[c]) / (nodes[a] - nodes[c]);
  return v;
}

double lagrange_derivative(const std::vector<double>& nodes, int a, double t) {
  double sum = 0.0;
  for (int skip = 0; skip < static_cast<int>(nodes.size()); ++skip) {
    if (skip == a) continue;
    double v = 1.0 / (nodes[a] - nodes[skip]);
    for (int c = 0; c < static_cast<int>(nodes.size()); ++c)
      if (c != a && c != skip) v *= (t - nodes[c]) / (nodes[a] - nodes[c]);
    sum += v;
  }
  return sum;
}

void require_macro_mesh(const TensorMesh& mesh) {
  if (!mesh.full())
    throw Error(ErrorKind::NonRectangularDomain, "postprocessing needs a full rectangular mesh");
  if (mesh.nx() % 2 != 0 || mesh.ny() % 2 != 0) {
    throw Error(ErrorKind::OddMeshDimensions,
                "mesh " + std::to_string(mesh.nx()) + "x" + std::to_string(mesh.ny()) +
                    " is not a 2x2 refinement of a coarser mesh");
  }
}

double mid(double a, double b) { return 0.5 * (a + b); }

}  // namespace

double LagrangePatch::value(double x, double y) const {
  const int nx = static_cast<int>(xs.size());
  double s = 0.0;
  for (int b = 0; b < static_cast<int>(ys.size()); ++b) {
    const double lb = lagrange(ys, b, y);
    for (int a = 0; a < nx; ++a) s += values[a + b * nx] * lagrange(xs, a, x) * lb;
  }
  return s;
}

double LagrangePatch::dx(double x, double y) const {
  const int nx = static_cast<int>(xs.size());
  double s = 0.0;
  for (int b = 0; b < static_cast<int>(ys.size()); ++b) {
    const double lb = lagrange(ys, b, y);
    for (int a = 0; a < nx; ++a) s += values[a + b * nx] * lagrange_derivative(xs, a, x) * lb;
  }
  return s;
}

double LagrangePatch::dy(double x, double y) const {
  const int nx = static_cast<int>(xs.size());
  double s = 0.0;
  for (int b = 0; b < static_cast<int>(ys.size()); ++b) {
    const double lb = lagrange_derivative(ys, b, y);
    for (int a = 0; a < nx; ++a) s += values[a + b * nx] * lagrange(xs, a, x) * lb;
  }
  return s;
}

SuperclosenessReport supercloseness_norms(const MixedSystem& system, const MixedEigenpair& pair,
                                          const Vector& sigma_I, const Vector& pi0_u) {
  const DofLayout& d = system.layout;
  if (sigma_I.size() != d.n_sigma() || pair.sigma_coeffs.size() != d.n_sigma() ||
      pi0_u.size() != d.n_cell || pair.u_coeffs.size() != d.n_cell) {
    throw Error(ErrorKind::LayoutMismatch, "vector sizes do not match the mixed layout");
  }
  const Vector ds = sigma_I - pair.sigma_coeffs;
  const Vector du = pi0_u - pair.u_coeffs;
  const Vector div = system.B * ds;

  SuperclosenessReport r;
  r.norm_sigma = std::sqrt(std::max(0.0, ds.dot(system.A.matrix * ds)));
  r.norm_u = std::sqrt(du.cwiseAbs2().dot(system.M));
  r.norm_div = std::sqrt(div.cwiseAbs2().cwiseQuotient(system.M).sum());
  r.level = system.mesh.level();
  r.h = mesh_size(system.mesh);
  return r;
}

PostprocessedField i2h_sigma(const TensorMesh& mesh, const Vector& sigma_h) {
  require_macro_mesh(mesh);
  const DofLayout d = layout(mesh);
  if (sigma_h.size() != d.n_sigma()) throw Error(ErrorKind::LayoutMismatch, "sigma_h length mismatch");

  PostprocessedField f{mesh, mesh.nx() / 2, mesh.ny() / 2, {}, {}, {}};
  f.flux_x.reserve(f.macro_nx * f.macro_ny);
  f.flux_y.reserve(f.macro_nx * f.macro_ny);
  for (int mj = 0; mj < f.macro_ny; ++mj) {
    for (int mi = 0; mi < f.macro_nx; ++mi) {
      const int i0 = 2 * mi;
      const int j0 = 2 * mj;
      LagrangePatch px;
      px.xs = {mesh.x(i0), mesh.x(i0 + 1), mesh.x(i0 + 2)};
      px.ys = {mid(mesh.y(j0), mesh.y(j0 + 1)), mid(mesh.y(j0 + 1), mesh.y(j0 + 2))};
      for (int b = 0; b < 2; ++b)
        for (int a = 0; a < 3; ++a) px.values.push_back(sigma_h[d.xedge(i0 + a, j0 + b)]);

      LagrangePatch py;
      py.xs = {mid(mesh.x(i0), mesh.x(i0 + 1)), mid(mesh.x(i0 + 1), mesh.x(i0 + 2))};
      py.ys = {mesh.y(j0), mesh.y(j0 + 1), mesh.y(j0 + 2)};
      for (int b = 0; b < 3; ++b)
        for (int a = 0; a < 2; ++a) py.values.push_back(sigma_h[d.yedge(i0 + a, j0 + b)]);

      f.flux_x.push_back(std::move(px));
      f.flux_y.push_back(std::move(py));
    }
  }
  return f;
}

PostprocessedField j2h_u(const TensorMesh& mesh, const Vector& u_h) {
  require_macro_mesh(mesh);
  const DofLayout d = layout(mesh);
  if (u_h.size() != d.n_cell) throw Error(ErrorKind::LayoutMismatch, "u_h length mismatch");

  PostprocessedField f{mesh, mesh.nx() / 2, mesh.ny() / 2, {}, {}, {}};
  f.scalar.reserve(f.macro_nx * f.macro_ny);
  for (int mj = 0; mj < f.macro_ny; ++mj) {
    for (int mi = 0; mi < f.macro_nx; ++mi) {
      const int i0 = 2 * mi;
      const int j0 = 2 * mj;
      LagrangePatch p;
      p.xs = {mid(mesh.x(i0), mesh.x(i0 + 1)), mid(mesh.x(i0 + 1), mesh.x(i0 + 2))};
      p.ys = {mid(mesh.y(j0), mesh.y(j0 + 1)), mid(mesh.y(j0 + 1), mesh.y(j0 + 2))};
      for (int b = 0; b < 2; ++b)
        for (int a = 0; a < 2; ++a) p.values.push_back(u_h[d.cell(i0 + a, j0 + b)]);
      f.scalar.push_back(std::move(p));
    }
  }
  return f;
}

double error_norms_postprocessed(const PostprocessedField& field, const FieldSample& exact,
                                 int order) {
  if (order != 0 && order != 1) throw Error(ErrorKind::InvalidArgument, "order must be 0 or 1");
  const GaussRule rule = gauss_legendre(5);
  const TensorMesh& mesh = field.mesh;
  double total = 0.0;
  for (int j = 0; j < mesh.ny(); ++j) {
    for (int i = 0; i < mesh.nx(); ++i) {
      const int m = field.macro_of_cell(i, j);
      auto integrand = [&](double x, double y) {
        if (field.has_flux()) {
          const LagrangePatch& px = field.flux_x[m];
          const LagrangePatch& py = field.flux_y[m];
          if (order == 0) {
            const double ex = px.value(x, y) - exact.sigma_x(x, y);
            const double ey = py.value(x, y) - exact.sigma_y(x, y);
            return ex * ex + ey * ey;
          }
          const double uxy = exact.uxy(x, y);
          const double a = px.dx(x, y) + exact.uxx(x, y);
          const double b = px.dy(x, y) + uxy;
          const double c = py.dx(x, y) + uxy;
          const double e = py.dy(x, y) + exact.uyy(x, y);
          return a * a + b * b + c * c + e * e;
        }
        const LagrangePatch& p = field.scalar[m];
        if (order == 0) {
          const double e = p.value(x, y) - exact.u(x, y);
          return e * e;
        }
        const double a = p.dx(x, y) - exact.ux(x, y);
        const double b = p.dy(x, y) - exact.uy(x, y);
        return a * a + b * b;
      };
      total += integrate_cell(rule, mesh.x(i), mesh.x(i + 1), mesh.y(j), mesh.y(j + 1), integrand);
    }
  }
  return std::sqrt(total);
}

std::array<double, 2> evaluate_flux(const TensorMesh& mesh, const DofLayout& d,
                                    const Vector& sigma, int i, int j, double x, double y) {
  const double tx = (x - mesh.x(i)) / mesh.hx(i);
  const double ty = (y - mesh.y(j)) / mesh.hy(j);
  const double sx = (1.0 - tx) * sigma[d.xedge(i, j)] + tx * sigma[d.xedge(i + 1, j)];
  const double sy = (1.0 - ty) * sigma[d.yedge(i, j)] + ty * sigma[d.yedge(i, j + 1)];
  return {sx, sy};
}

double flux_error(const TensorMesh& mesh, const Vector& sigma_h, const FieldSample& exact) {
  const GaussRule rule = gauss_legendre(5);
  const DofLayout d = layout(mesh);
  double total = 0.0;
  for (int c = 0; c < d.n_cell; ++c) {
    const auto [i, j] = d.cell_pos[c];
    total += integrate_cell(rule, mesh.x(i), mesh.x(i + 1), mesh.y(j), mesh.y(j + 1),
                            [&](double x, double y) {
                              const auto s = evaluate_flux(mesh, d, sigma_h, i, j, x, y);
                              const double ex = s[0] - exact.sigma_x(x, y);
                              const double ey = s[1] - exact.sigma_y(x, y);
                              return ex * ex + ey * ey;
                            });
  }
  return std::sqrt(total);
}

double scalar_error(const TensorMesh& mesh, const Vector& u_h, const FieldSample& exact) {
  const GaussRule rule = gauss_legendre(5);
  const DofLayout d = layout(mesh);
  double total = 0.0;
  for (int c = 0; c < d.n_cell; ++c) {
    const auto [i, j] = d.cell_pos[c];
    total += integrate_cell(rule, mesh.x(i), mesh.x(i + 1), mesh.y(j), mesh.y(j + 1),
                            [&](double x, double y) {
                              const double e = u_h[c] - exact.u(x, y);
                              return e * e;
                            });
  }
  return std::sqrt(total);
}

void write_sampled(std::ostream& os, const PostprocessedField& field, int component,
                   int samples_per_cell) {
  const TensorMesh& mesh = field.mesh;
  char buf[128];
  for (int j = 0; j < mesh.ny(); ++j) {
    for (int i = 0; i < mesh.nx(); ++i) {
      const int m = field.macro_of_cell(i, j);
      const LagrangePatch* p = nullptr;
      if (component == 0 && field.has_flux()) p = &field.flux_x[m];
      if (component == 1 && field.has_flux()) p = &field.flux_y[m];
      if (component == 2 && field.has_scalar()) p = &field.scalar[m];
      if (p == nullptr) throw Error(ErrorKind::InvalidArgument, "field lacks the requested component");
      for (int b = 0; b < samples_per_cell; ++b) {
        for (int a = 0; a < samples_per_cell; ++a) {
          const double x = mesh.x(i) + (a + 0.5) * mesh.hx(i) / samples_per_cell;
          const double y = mesh.y(j) + (b + 0.5) * mesh.hy(j) / samples_per_cell;
          std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", x, y, p->value(x, y));
          os << buf;
        }
      }
    }
  }
}

}  // namespace rrt
