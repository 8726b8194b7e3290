#include "rrt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "rrt/error.hpp"
#include "rrt/postprocess.hpp"
#include "rrt/quadrature.hpp"

namespace rrt {

namespace {

constexpr double kDegenerate = 1e-14;

double shift_coefficient(const Rectangle& domain, const Frequency& f) {
  const double a = f.m * std::numbers::pi / domain.width();
  const double b = f.n * std::numbers::pi / domain.height();
  return (std::pow(a, 4) + std::pow(b, 4)) / 12.0;
}

// L with L L^T = V^T W V; throws when V is numerically rank deficient.
Eigen::MatrixXd gram_factor(const EigenspaceBasis& b) {
  const Eigen::MatrixXd g = b.vectors.transpose() * (b.metric * b.vectors);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > 1e8)
    throw Error(ErrorKind::InvalidArgument, "basis Gram matrix is singular or ill-conditioned");
  return Eigen::LLT<Eigen::MatrixXd>(g).matrixL();
}

}  // namespace

double expansion_term(const TensorMesh& mesh, const FieldSample& exact_rep) {
  double sum = 0.0;
  for (int j = 0; j < mesh.ny(); ++j) {
    for (int i = 0; i < mesh.nx(); ++i) {
      if (!mesh.active(i, j)) continue;
      const double xl = mesh.x(i), xr = mesh.x(i + 1), yb = mesh.y(j), yt = mesh.y(j + 1);
      sum += mesh.hx(i) * mesh.hx(i) * exact_rep.cell_integral_uxx_sq(xl, xr, yb, yt) +
             mesh.hy(j) * mesh.hy(j) * exact_rep.cell_integral_uyy_sq(xl, xr, yb, yt);
    }
  }
  return sum / 12.0;
}

double residual(double e1, double e2) { return e1 - e2; }

ExpansionReport expansion_report(const TensorMesh& mesh, double lambda_h, double lambda,
                                 const FieldSample& exact_rep) {
  ExpansionReport r;
  r.e1 = lambda_h - lambda;
  r.e2 = expansion_term(mesh, exact_rep);
  r.r = residual(r.e1, r.e2);
  r.level = mesh.level();
  r.h = mesh_size(mesh);
  return r;
}

double RatesTable::finest() const {
  if (rates.empty() || !rates.back())
    throw Error(ErrorKind::DegenerateRatio, "finest rate unavailable: error below 1e-14");
  return *rates.back();
}

RatesTable rate(const std::vector<double>& values, double reference) {
  if (values.size() < 2) throw Error(ErrorKind::InvalidArgument, "rates need at least two levels");
  RatesTable t;
  t.values = values;
  for (double v : values) t.errors.push_back(std::abs(v - reference));
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    if (t.errors[i] < kDegenerate || t.errors[i + 1] < kDegenerate)
      t.rates.emplace_back();
    else
      t.rates.emplace_back(std::log2(t.errors[i] / t.errors[i + 1]));
  }
  return t;
}

std::string trend(const std::vector<double>& values) {
  if (values.size() < 2) return "~";
  bool down = true;
  bool up = true;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    down = down && values[i + 1] < values[i];
    up = up && values[i + 1] > values[i];
  }
  if (down) return "↘";
  if (up) return "↗";
  return "~";
}

double extrapolate(double lambda_h, double lambda_half) { return (4.0 * lambda_half - lambda_h) / 3.0; }

std::vector<BoundCheck> check_upper_bound(const std::vector<double>& lambdas_h,
                                          const std::vector<double>& exact) {
  if (lambdas_h.size() != exact.size())
    throw Error(ErrorKind::DimensionMismatch, "eigenvalue lists differ in length");
  std::vector<BoundCheck> out;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    const double margin = lambdas_h[i] - exact[i];
    out.push_back({margin, margin >= -1e-12 * exact[i]});
  }
  return out;
}

double lower_bound_margin(double lambda_h, double lambda, double a, double h) {
  return (lambda_h - lambda) - lambda * lambda * h * h / (24.0 * a * a);
}

FrequencyMatch match_frequencies(const std::vector<MixedEigenpair>& cluster,
                                 const ExactEigenpair& exact, double h) {
  if (static_cast<int>(cluster.size()) != exact.multiplicity) {
    throw Error(ErrorKind::AmbiguousAssignment,
                "cluster has " + std::to_string(cluster.size()) + " values, multiplicity is " +
                    std::to_string(exact.multiplicity));
  }
  std::vector<double> predicted;
  for (const Frequency& f : exact.frequencies) predicted.push_back(shift_coefficient(exact.domain, f) * h * h);

  FrequencyMatch out;
  std::vector<int> used(exact.frequencies.size(), 0);
  std::vector<std::vector<double>> members(exact.frequencies.size());
  for (std::size_t c = 0; c < cluster.size(); ++c) {
    const double observed = cluster[c].lambda_h - exact.lambda;
    std::size_t best = 0;
    for (std::size_t f = 1; f < predicted.size(); ++f)
      if (std::abs(observed - predicted[f]) < std::abs(observed - predicted[best])) best = f;
    out.assignments.push_back({static_cast<int>(c), cluster[c].lambda_h, exact.frequencies[best],
                               predicted[best], observed});
    out.residual_scale = std::max(out.residual_scale, std::abs(observed - predicted[best]));
    ++used[best];
    members[best].push_back(cluster[c].lambda_h);
  }

  for (std::size_t f = 0; f < predicted.size(); ++f) {
    const int expected = static_cast<int>(exact.basis_of(exact.frequencies[f]).size());
    if (used[f] != expected) {
      throw Error(ErrorKind::AmbiguousAssignment,
                  "frequency (" + std::to_string(exact.frequencies[f].m) + "," +
                      std::to_string(exact.frequencies[f].n) + ") received " +
                      std::to_string(used[f]) + " values, expected " + std::to_string(expected));
    }
    if (members[f].size() == 2) out.pair_spread = std::max(out.pair_spread, std::abs(members[f][0] - members[f][1]));
    for (std::size_t g = f + 1; g < predicted.size(); ++g) {
      if (std::abs(predicted[f] - predicted[g]) < 2.0 * out.residual_scale)
        throw Error(ErrorKind::AmbiguousAssignment, "predicted shifts are not separated at this h");
    }
  }
  return out;
}

double rayleigh_quotient(const MixedSystem& system, const Vector& sigma) {
  if (sigma.size() != system.A.dimension()) throw Error(ErrorKind::LayoutMismatch, "sigma length mismatch");
  const double denom = sigma.dot(system.A.matrix * sigma);
  if (!(denom > 0.0)) throw Error(ErrorKind::ZeroVector, "Rayleigh quotient of a zero vector");
  const Vector div = system.B * sigma;
  return div.cwiseAbs2().cwiseQuotient(system.M).sum() / denom;
}

EigenspaceBasis EigenspaceBasis::flux(const MixedSystem& system, Eigen::MatrixXd vectors) {
  return {std::move(vectors), system.A.matrix};
}

EigenspaceBasis EigenspaceBasis::cell(const MixedSystem& system, Eigen::MatrixXd vectors) {
  SparseMatrix w(system.M.size(), system.M.size());
  w.reserve(Eigen::VectorXi::Constant(system.M.size(), 1));
  for (int i = 0; i < system.M.size(); ++i) w.insert(i, i) = system.M[i];
  w.makeCompressed();
  return {std::move(vectors), std::move(w)};
}

double eigenspace_gap(const EigenspaceBasis& r, const EigenspaceBasis& s) {
  if (r.vectors.cols() != s.vectors.cols() || r.vectors.rows() != s.vectors.rows() ||
      r.metric.rows() != r.vectors.rows() || s.metric.rows() != s.vectors.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "subspaces differ in dimension or length");
  }
  if (r.vectors.cols() == 0) return 0.0;
  const Eigen::MatrixXd lr = gram_factor(r);
  const Eigen::MatrixXd ls = gram_factor(s);
  // Metric-orthonormal bases Q = V L^{-T}.
  const Eigen::MatrixXd qr = lr.triangularView<Eigen::Lower>().solve(r.vectors.transpose()).transpose();
  const Eigen::MatrixXd qs = ls.triangularView<Eigen::Lower>().solve(s.vectors.transpose()).transpose();
  const Eigen::MatrixXd cross = qs.transpose() * (r.metric * qr);
  const Eigen::MatrixXd w = qr - qs * cross;
  const Eigen::MatrixXd g = w.transpose() * (r.metric * w);
  const double top = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g).eigenvalues().maxCoeff();
  return std::sqrt(std::clamp(top, 0.0, 1.0));
}

double gap_to_exact(const TensorMesh& mesh, const std::vector<Vector>& u_h,
                    const std::vector<Frequency>& basis, const Rectangle& domain) {
  if (u_h.size() != basis.size()) throw Error(ErrorKind::DimensionMismatch, "subspaces differ in dimension");
  if (basis.empty()) return 0.0;
  const int n = static_cast<int>(basis.size());
  Eigen::MatrixXd c(n, n);
  for (int j = 0; j < n; ++j) c.col(j) = project_onto_basis(mesh, u_h[j], basis, domain);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(c);
  const double smin = svd.singularValues().minCoeff();
  return std::sqrt(std::max(0.0, 1.0 - smin * smin));
}

double interpolation_pairing(const TensorMesh& mesh, const Vector& sigma_h, const FieldSample& exact) {
  const DofLayout d = layout(mesh);
  const Vector sigma_i = rt_interpolate_exact(mesh, exact);
  const GaussRule rule = gauss_legendre(5);
  double total = 0.0;
  for (int c = 0; c < d.n_cell; ++c) {
    const auto [i, j] = d.cell_pos[c];
    total += integrate_cell(rule, mesh.x(i), mesh.x(i + 1), mesh.y(j), mesh.y(j + 1),
                            [&](double x, double y) {
                              const auto si = evaluate_flux(mesh, d, sigma_i, i, j, x, y);
                              const auto sh = evaluate_flux(mesh, d, sigma_h, i, j, x, y);
                              return (exact.sigma_x(x, y) - si[0]) * sh[0] +
                                     (exact.sigma_y(x, y) - si[1]) * sh[1];
                            });
  }
  return total;
}

double integral_expansion(const TensorMesh& mesh, const Vector& tau_h, const FieldSample& exact) {
  const DofLayout d = layout(mesh);
  const GaussRule rule = gauss_legendre(5);
  double total = 0.0;
  for (int c = 0; c < d.n_cell; ++c) {
    const auto [i, j] = d.cell_pos[c];
    const double hx2 = mesh.hx(i) * mesh.hx(i);
    const double hy2 = mesh.hy(j) * mesh.hy(j);
    total += integrate_cell(rule, mesh.x(i), mesh.x(i + 1), mesh.y(j), mesh.y(j + 1),
                            [&](double x, double y) {
                              const auto t = evaluate_flux(mesh, d, tau_h, i, j, x, y);
                              return hx2 * exact.uxxx(x, y) * t[0] + hy2 * exact.uyyy(x, y) * t[1];
                            });
  }
  return total / 12.0;
}

}  // namespace rrt
