#include "rrt/exact.hpp"

#include <algorithm>
#include <cmath>

#include "rrt/error.hpp"
#include "rrt/quadrature.hpp"

namespace rrt {

namespace {

constexpr double kPi = std::numbers::pi;

// Interval integrals written as products so small cells keep full relative
// accuracy (no difference of nearly equal antiderivative values).
double int_cos(double k, double l, double r) {
  if (k == 0.0) return r - l;
  return 2.0 * std::cos(0.5 * k * (l + r)) * std::sin(0.5 * k * (r - l)) / k;
}

double int_sin(double k, double l, double r) {
  if (k == 0.0) return 0.0;
  return 2.0 * std::sin(0.5 * k * (l + r)) * std::sin(0.5 * k * (r - l)) / k;
}

double int_sin_sin(double a, double b, double l, double r) {
  return 0.5 * (int_cos(a - b, l, r) - int_cos(a + b, l, r));
}

bool same_lambda(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); }

}  // namespace

Rectangle bounding_rectangle(const TensorMesh& mesh) {
  return {mesh.node_x().front(), mesh.node_x().back(), mesh.node_y().front(),
          mesh.node_y().back()};
}

double exact_lambda(const Rectangle& domain, int m, int n) {
  if (domain.is_square()) {
    const double s = kPi / domain.width();
    return static_cast<double>(m * m + n * n) * s * s;
  }
  const double a = m * kPi / domain.width();
  const double b = n * kPi / domain.height();
  return a * a + b * b;
}

std::vector<Frequency> ExactEigenpair::basis() const {
  std::vector<Frequency> out;
  for (const Frequency& f : frequencies) {
    const auto part = basis_of(f);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

std::vector<Frequency> ExactEigenpair::basis_of(const Frequency& f) const {
  if (domain.is_square() && f.m != f.n) return {{f.m, f.n}, {f.n, f.m}};
  return {f};
}

std::vector<ExactEigenpair> enumerate_exact(const Rectangle& domain, int k) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
  struct Entry {
    double lambda;
    int m;
    int n;
  };
  std::vector<Entry> entries;
  int bound = std::max(4, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(k)))) + 2);
  for (;;) {
    entries.clear();
    for (int m = 1; m <= bound; ++m)
      for (int n = 1; n <= bound; ++n) entries.push_back({exact_lambda(domain, m, n), m, n});
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
      if (a.lambda != b.lambda) return a.lambda < b.lambda;
      return a.m < b.m;
    });
    // Any pair outside the scanned square is at least this large.
    const double outside =
        std::min(exact_lambda(domain, bound + 1, 1), exact_lambda(domain, 1, bound + 1));
    if (entries[k - 1].lambda < outside && !same_lambda(entries[k - 1].lambda, outside)) break;
    bound *= 2;
  }

  std::vector<ExactEigenpair> out;
  std::size_t i = 0;
  while (static_cast<int>(out.size()) < k) {
    std::size_t j = i;
    while (j < entries.size() && same_lambda(entries[j].lambda, entries[i].lambda)) ++j;
    ExactEigenpair e;
    e.lambda = entries[i].lambda;
    e.domain = domain;
    for (std::size_t t = i; t < j; ++t) {
      if (domain.is_square() && entries[t].m > entries[t].n) continue;
      e.frequencies.push_back({entries[t].m, entries[t].n});
    }
    const double s4x = std::pow(kPi / domain.width(), 4);
    const double s4y = std::pow(kPi / domain.height(), 4);
    std::stable_sort(e.frequencies.begin(), e.frequencies.end(),
                     [&](const Frequency& a, const Frequency& b) {
                       return std::pow(a.m, 4) * s4x + std::pow(a.n, 4) * s4y <
                              std::pow(b.m, 4) * s4x + std::pow(b.n, 4) * s4y;
                     });
    e.multiplicity = static_cast<int>(j - i);
    for (int c = 0; c < e.multiplicity && static_cast<int>(out.size()) < k; ++c) out.push_back(e);
    i = j;
  }
  return out;
}

FieldSample::FieldSample(Rectangle domain, std::vector<Mode> modes)
    : domain_(domain), modes_(std::move(modes)),
      amplitude_(2.0 / std::sqrt(domain.width() * domain.height())) {}

FieldSample FieldSample::single(const Rectangle& domain, int m, int n, double coeff) {
  return FieldSample(domain, {{coeff, m, n}});
}

double FieldSample::alpha(const Mode& t) const { return t.m * kPi / domain_.width(); }
double FieldSample::beta(const Mode& t) const { return t.n * kPi / domain_.height(); }

double FieldSample::lambda() const {
  double lam = 0.0;
  for (const Mode& t : modes_) lam = std::max(lam, exact_lambda(domain_, t.m, t.n));
  return lam;
}

template <class Term>
double FieldSample::sum_modes(double x, double y, Term&& term) const {
  const double dx = x - domain_.x0;
  const double dy = y - domain_.y0;
  double s = 0.0;
  for (const Mode& t : modes_) {
    const double a = alpha(t);
    const double b = beta(t);
    s += t.coeff * term(a, b, a * dx, b * dy);
  }
  return amplitude_ * s;
}

double FieldSample::u(double x, double y) const {
  return sum_modes(x, y, [](double, double, double p, double q) { return std::sin(p) * std::sin(q); });
}
double FieldSample::ux(double x, double y) const {
  return sum_modes(x, y, [](double a, double, double p, double q) { return a * std::cos(p) * std::sin(q); });
}
double FieldSample::uy(double x, double y) const {
  return sum_modes(x, y, [](double, double b, double p, double q) { return b * std::sin(p) * std::cos(q); });
}
double FieldSample::uxx(double x, double y) const {
  return sum_modes(x, y, [](double a, double, double p, double q) { return -a * a * std::sin(p) * std::sin(q); });
}
double FieldSample::uyy(double x, double y) const {
  return sum_modes(x, y, [](double, double b, double p, double q) { return -b * b * std::sin(p) * std::sin(q); });
}
double FieldSample::uxy(double x, double y) const {
  return sum_modes(x, y, [](double a, double b, double p, double q) { return a * b * std::cos(p) * std::cos(q); });
}
double FieldSample::uxxx(double x, double y) const {
  return sum_modes(x, y, [](double a, double, double p, double q) { return -a * a * a * std::cos(p) * std::sin(q); });
}
double FieldSample::uyyy(double x, double y) const {
  return sum_modes(x, y, [](double, double b, double p, double q) { return -b * b * b * std::sin(p) * std::cos(q); });
}
double FieldSample::laplacian(double x, double y) const {
  return sum_modes(x, y, [](double a, double b, double p, double q) {
    return -(a * a + b * b) * std::sin(p) * std::sin(q);
  });
}

double FieldSample::cell_integral(double xl, double xr, double yb, double yt) const {
  double s = 0.0;
  for (const Mode& t : modes_) {
    s += t.coeff * int_sin(alpha(t), xl - domain_.x0, xr - domain_.x0) *
         int_sin(beta(t), yb - domain_.y0, yt - domain_.y0);
  }
  return amplitude_ * s;
}

double FieldSample::cell_integral_div_sigma(double xl, double xr, double yb, double yt) const {
  double s = 0.0;
  for (const Mode& t : modes_) {
    const double a = alpha(t);
    const double b = beta(t);
    s += t.coeff * (a * a + b * b) * int_sin(a, xl - domain_.x0, xr - domain_.x0) *
         int_sin(b, yb - domain_.y0, yt - domain_.y0);
  }
  return amplitude_ * s;
}

double FieldSample::cell_integral_uxx_sq(double xl, double xr, double yb, double yt) const {
  double s = 0.0;
  const double l = xl - domain_.x0, r = xr - domain_.x0;
  const double b0 = yb - domain_.y0, t0 = yt - domain_.y0;
  for (const Mode& p : modes_) {
    for (const Mode& q : modes_) {
      const double ap = alpha(p), aq = alpha(q);
      s += p.coeff * q.coeff * ap * ap * aq * aq * int_sin_sin(ap, aq, l, r) *
           int_sin_sin(beta(p), beta(q), b0, t0);
    }
  }
  return amplitude_ * amplitude_ * s;
}

double FieldSample::cell_integral_uyy_sq(double xl, double xr, double yb, double yt) const {
  double s = 0.0;
  const double l = xl - domain_.x0, r = xr - domain_.x0;
  const double b0 = yb - domain_.y0, t0 = yt - domain_.y0;
  for (const Mode& p : modes_) {
    for (const Mode& q : modes_) {
      const double bp = beta(p), bq = beta(q);
      s += p.coeff * q.coeff * bp * bp * bq * bq * int_sin_sin(alpha(p), alpha(q), l, r) *
           int_sin_sin(bp, bq, b0, t0);
    }
  }
  return amplitude_ * amplitude_ * s;
}

double FieldSample::xedge_mean_flux(double x, double yb, double yt) const {
  double s = 0.0;
  for (const Mode& t : modes_) {
    const double a = alpha(t);
    s += t.coeff * a * std::cos(a * (x - domain_.x0)) *
         int_sin(beta(t), yb - domain_.y0, yt - domain_.y0);
  }
  return -amplitude_ * s / (yt - yb);
}

double FieldSample::yedge_mean_flux(double y, double xl, double xr) const {
  double s = 0.0;
  for (const Mode& t : modes_) {
    const double b = beta(t);
    s += t.coeff * b * std::cos(b * (y - domain_.y0)) *
         int_sin(alpha(t), xl - domain_.x0, xr - domain_.x0);
  }
  return -amplitude_ * s / (xr - xl);
}

Vector rt_interpolate_exact(const TensorMesh& mesh, const FieldSample& field) {
  const DofLayout d = layout(mesh);
  Vector out(d.n_sigma());
  for (int dof = 0; dof < d.n_sigma(); ++dof) {
    const auto [a, b] = d.sigma_pos[dof];
    if (d.is_xedge(dof))
      out[dof] = field.xedge_mean_flux(mesh.x(a), mesh.y(b), mesh.y(b + 1));
    else
      out[dof] = field.yedge_mean_flux(mesh.y(b), mesh.x(a), mesh.x(a + 1));
  }
  return out;
}

Vector l2_project_exact(const TensorMesh& mesh, const FieldSample& field) {
  const DofLayout d = layout(mesh);
  Vector out(d.n_cell);
  for (int c = 0; c < d.n_cell; ++c) {
    const auto [i, j] = d.cell_pos[c];
    out[c] = field.cell_integral(mesh.x(i), mesh.x(i + 1), mesh.y(j), mesh.y(j + 1)) /
             mesh.area(i, j);
  }
  return out;
}

Vector rt_interpolate_quadrature(const TensorMesh& mesh,
                                 const std::function<double(double, double)>& sx,
                                 const std::function<double(double, double)>& sy, int points) {
  const GaussRule rule = gauss_legendre(points);
  const DofLayout d = layout(mesh);
  Vector out(d.n_sigma());
  for (int dof = 0; dof < d.n_sigma(); ++dof) {
    const auto [a, b] = d.sigma_pos[dof];
    if (d.is_xedge(dof)) {
      const double x = mesh.x(a);
      out[dof] = integrate_interval(rule, mesh.y(b), mesh.y(b + 1),
                                    [&](double y) { return sx(x, y); }) /
                 mesh.hy(b);
    } else {
      const double y = mesh.y(b);
      out[dof] = integrate_interval(rule, mesh.x(a), mesh.x(a + 1),
                                    [&](double x) { return sy(x, y); }) /
                 mesh.hx(a);
    }
  }
  return out;
}

Vector l2_project_quadrature(const TensorMesh& mesh, const std::function<double(double, double)>& f,
                             int points) {
  const GaussRule rule = gauss_legendre(points);
  const DofLayout d = layout(mesh);
  Vector out(d.n_cell);
  for (int c = 0; c < d.n_cell; ++c) {
    const auto [i, j] = d.cell_pos[c];
    out[c] = integrate_cell(rule, mesh.x(i), mesh.x(i + 1), mesh.y(j), mesh.y(j + 1), f) /
             mesh.area(i, j);
  }
  return out;
}

Vector project_onto_basis(const TensorMesh& mesh, const Vector& u_h,
                          const std::vector<Frequency>& basis, const Rectangle& domain) {
  const DofLayout d = layout(mesh);
  if (u_h.size() != d.n_cell) throw Error(ErrorKind::LayoutMismatch, "u_h length mismatch");
  Vector c = Vector::Zero(static_cast<int>(basis.size()));
  for (std::size_t t = 0; t < basis.size(); ++t) {
    const FieldSample b = FieldSample::single(domain, basis[t].m, basis[t].n);
    double s = 0.0;
    for (int cell = 0; cell < d.n_cell; ++cell) {
      const auto [i, j] = d.cell_pos[cell];
      s += u_h[cell] * b.cell_integral(mesh.x(i), mesh.x(i + 1), mesh.y(j), mesh.y(j + 1));
    }
    c[static_cast<int>(t)] = s;
  }
  return c;
}

namespace {

FieldSample representative(const TensorMesh& mesh, const Vector& u_h,
                           const std::vector<Frequency>& basis, const Rectangle& domain) {
  const Vector c = project_onto_basis(mesh, u_h, basis, domain);
  const double norm = c.norm();
  if (norm < 0.5) {
    throw Error(ErrorKind::AmbiguousCluster,
                "projection onto the exact eigenspace has norm " + std::to_string(norm));
  }
  std::vector<Mode> modes;
  for (std::size_t t = 0; t < basis.size(); ++t)
    modes.push_back({c[static_cast<int>(t)] / norm, basis[t].m, basis[t].n});
  return FieldSample(domain, std::move(modes));
}

}  // namespace

FieldSample align_exact_representative(const MixedEigenpair& pair, const ExactEigenpair& exact,
                                       const TensorMesh& mesh) {
  return representative(mesh, pair.u_coeffs, exact.basis(), exact.domain);
}

FieldSample align_to_frequency(const Vector& u_h, const ExactEigenpair& exact,
                               const Frequency& frequency, const TensorMesh& mesh) {
  return representative(mesh, u_h, exact.basis_of(frequency), exact.domain);
}

}  // namespace rrt
