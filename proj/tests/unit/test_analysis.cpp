#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rrt/analysis.hpp"
#include "rrt/error.hpp"

using namespace rrt;

namespace {

const double kPi = std::numbers::pi;

TensorMesh uniform(int n) { return build_mesh(uniform_nodes(0, kPi, n + 1), uniform_nodes(0, kPi, n + 1)); }

TensorMesh graded(int level) {
  TensorMesh m = build_mesh({0.0, kPi / 4, kPi / 2, 2 * kPi / 3, 5 * kPi / 6, kPi},
                            {0.0, kPi / 6, kPi / 3, kPi / 2, 3 * kPi / 4, kPi});
  for (int l = 0; l < level; ++l) m = uniform_refine(m);
  return m;
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

std::vector<MixedEigenpair> solve(const MixedSystem& s, int k) {
  SolveOptions o;
  o.k = k;
  o.tol = 1e-11;
  return solve_mixed_eigs(s, o);
}

}  // namespace

TEST_CASE("rates") {
  const RatesTable t = rate({1.0, 0.25, 0.0625});
  REQUIRE(t.rates.size() == 2);
  CHECK(*t.rates[0] == doctest::Approx(2.0));
  CHECK(t.finest() == doctest::Approx(2.0));
  CHECK(rate({2.0258, 2.0064, 2.0016, 2.0004, 2.0001}, 2.0).finest() == doctest::Approx(2.0).epsilon(0.01));
  CHECK(rate({1.30e-04, 8.23e-06, 5.16e-07, 3.22e-08, 2.02e-09}).finest() == doctest::Approx(4.0).epsilon(0.01));
  const RatesTable d = rate({1.0, 1e-16});
  CHECK_FALSE(d.rates[0].has_value());
  CHECK(kind_of([&] { d.finest(); }) == ErrorKind::DegenerateRatio);
}

TEST_CASE("trend, extrapolation, residual") {
  CHECK(trend({3.0, 2.0, 1.0}) == "↘");
  CHECK(trend({1.0, 2.0}) == "↗");
  CHECK(trend({1.0, 2.0, 1.5}) == "~");
  CHECK(extrapolate(2.0064, 2.0016) == doctest::Approx(2.0));
  CHECK(extrapolate(3.5, 3.5) == doctest::Approx(3.5));
  CHECK(residual(0.5, 0.5) == 0.0);
  CHECK(residual(0.3, 0.1) == doctest::Approx(0.2));
}

TEST_CASE("upper and lower bounds") {
  const auto c = check_upper_bound({2.1, 5.0, 4.9}, {2.0, 5.0, 5.0});
  CHECK(c[0].holds);
  CHECK(c[0].margin == doctest::Approx(0.1));
  CHECK(c[1].holds);
  CHECK_FALSE(c[2].holds);
  const double a = 2.0, h = 0.1, lam = 5.0;
  CHECK(lower_bound_margin(lam + lam * lam * h * h / (24 * a * a), lam, a, h) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("expansion term in closed form") {
  const TensorMesh m = uniform(8);
  const double h = kPi / 8;
  CHECK(expansion_term(m, FieldSample::single(Rectangle{}, 1, 1)) == doctest::Approx(h * h / 6).epsilon(1e-12));
  CHECK(expansion_term(m, FieldSample::single(Rectangle{}, 1, 1)) == doctest::Approx(0.0257069).epsilon(1e-5));
  const TensorMesh fine = uniform(128);
  const double hf = kPi / 128;
  CHECK(expansion_term(fine, FieldSample::single(Rectangle{}, 3, 1)) == doctest::Approx(82 * hf * hf / 12).epsilon(1e-12));
  const ExpansionReport r = expansion_report(m, 2.0258, 2.0, FieldSample::single(Rectangle{}, 1, 1));
  CHECK(r.r == r.e1 - r.e2);
  CHECK(r.e1 == doctest::Approx(0.0258));
}

TEST_CASE("frequency matching on a uniform mesh") {
  const TensorMesh m = uniform(32);
  const MixedSystem s = assemble_mixed(m);
  const auto pairs = solve(s, 6);
  const auto exact = enumerate_exact(Rectangle{}, 6);
  const std::vector<MixedEigenpair> cluster(pairs.begin() + 4, pairs.begin() + 6);
  const FrequencyMatch fm = match_frequencies(cluster, exact[4], mesh_size(m));
  REQUIRE(fm.assignments.size() == 2);
  const double h = kPi / 32;
  for (const auto& a : fm.assignments) {
    CHECK(a.frequency == Frequency{1, 3});
    CHECK(a.predicted_shift == doctest::Approx(82 * h * h / 12));
    CHECK(a.observed_shift == doctest::Approx(a.predicted_shift).epsilon(0.02));
  }
  CHECK(fm.pair_spread < 1e-10);
  const std::vector<MixedEigenpair> partial(pairs.begin() + 4, pairs.begin() + 5);
  CHECK(kind_of([&] { match_frequencies(partial, exact[4], mesh_size(m)); }) == ErrorKind::AmbiguousAssignment);
}

TEST_CASE("Rayleigh quotients and the min-max principle") {
  const MixedSystem s = assemble_mixed(graded(1));
  const auto pairs = solve(s, 8);
  for (const auto& p : pairs) CHECK(rayleigh_quotient(s, p.sigma_coeffs) == doctest::Approx(p.lambda_h).epsilon(1e-9));
  CHECK(kind_of([&] { rayleigh_quotient(s, Vector::Zero(s.layout.n_sigma())); }) == ErrorKind::ZeroVector);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int t = 0; t < 20; ++t) {
    Vector mix = Vector::Zero(s.layout.n_sigma());
    double num = 0.0, den = 0.0;
    for (const auto& p : pairs) {
      const double beta = g(rng);
      const double norm = std::sqrt(p.sigma_coeffs.dot(s.A.matrix * p.sigma_coeffs));
      mix += beta * p.sigma_coeffs / norm;
      num += beta * beta * p.lambda_h;
      den += beta * beta;
    }
    const double r = rayleigh_quotient(s, mix);
    CHECK(r >= pairs.front().lambda_h * (1 - 1e-12));
    CHECK(r <= pairs.back().lambda_h * (1 + 1e-12));
    CHECK(r == doctest::Approx(num / den).epsilon(1e-9));
  }

  // The RT interpolant of u_{1,1} on a uniform mesh: R - 2 is about h^2/6.
  const TensorMesh m = uniform(32);
  const MixedSystem su = assemble_mixed(m);
  const double h = kPi / 32;
  const double shift = rayleigh_quotient(su, rt_interpolate_exact(m, FieldSample::single(Rectangle{}, 1, 1))) - 2.0;
  CHECK(shift == doctest::Approx(h * h / 6).epsilon(0.02));
}

TEST_CASE("eigenspace gaps") {
  const MixedSystem s = assemble_mixed(graded(0));
  const auto pairs = solve(s, 4);
  Eigen::MatrixXd a(s.layout.n_sigma(), 1), b(s.layout.n_sigma(), 1), two(s.layout.n_sigma(), 2);
  a.col(0) = pairs[0].sigma_coeffs;
  b.col(0) = pairs[1].sigma_coeffs;
  two << pairs[0].sigma_coeffs, pairs[1].sigma_coeffs;
  CHECK(eigenspace_gap(EigenspaceBasis::flux(s, a), EigenspaceBasis::flux(s, a)) < 1e-7);
  CHECK(eigenspace_gap(EigenspaceBasis::flux(s, a), EigenspaceBasis::flux(s, b)) == doctest::Approx(1.0));
  CHECK(kind_of([&] { eigenspace_gap(EigenspaceBasis::flux(s, a), EigenspaceBasis::flux(s, two)); }) ==
        ErrorKind::DimensionMismatch);
  Eigen::MatrixXd dep(s.layout.n_sigma(), 2);
  dep << pairs[0].sigma_coeffs, pairs[0].sigma_coeffs;
  CHECK(kind_of([&] { eigenspace_gap(EigenspaceBasis::flux(s, dep), EigenspaceBasis::flux(s, two)); }) ==
        ErrorKind::InvalidArgument);
  Eigen::MatrixXd u(s.layout.n_cell, 2);
  u << pairs[2].u_coeffs, pairs[3].u_coeffs;
  Eigen::MatrixXd w(s.layout.n_cell, 2);
  w << pairs[2].u_coeffs + 0.1 * pairs[0].u_coeffs, pairs[3].u_coeffs;
  const double ab = eigenspace_gap(EigenspaceBasis::cell(s, u), EigenspaceBasis::cell(s, w));
  const double ba = eigenspace_gap(EigenspaceBasis::cell(s, w), EigenspaceBasis::cell(s, u));
  CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
  CHECK(ab == doctest::Approx(0.1 / std::sqrt(1.01)).epsilon(1e-9));
}

TEST_CASE("gap of the lambda = 5 eigenspace converges") {
  const auto exact = enumerate_exact(Rectangle{}, 3);
  std::vector<double> to_exact, to_pi0;
  for (int l = 1; l <= 4; ++l) {
    const TensorMesh m = graded(l);
    const MixedSystem s = assemble_mixed(m);
    const auto pairs = solve(s, 3);
    to_exact.push_back(gap_to_exact(m, {pairs[1].u_coeffs, pairs[2].u_coeffs}, exact[1].basis(), Rectangle{}));
    Eigen::MatrixXd uh(s.layout.n_cell, 2), pi0(s.layout.n_cell, 2);
    uh << pairs[1].u_coeffs, pairs[2].u_coeffs;
    pi0 << l2_project_exact(m, FieldSample::single(Rectangle{}, 1, 2)),
        l2_project_exact(m, FieldSample::single(Rectangle{}, 2, 1));
    to_pi0.push_back(eigenspace_gap(EigenspaceBasis::cell(s, pi0), EigenspaceBasis::cell(s, uh)));
  }
  CHECK(rate(to_exact).finest() == doctest::Approx(1.0).epsilon(0.05));
  CHECK(rate(to_pi0).finest() == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("interpolation pairing and its integral expansion") {
  const FieldSample u = FieldSample::single(Rectangle{}, 1, 1);
  std::vector<double> pairing_defect, expansion_defect;
  for (int l = 1; l <= 4; ++l) {
    const TensorMesh m = graded(l);
    const MixedSystem s = assemble_mixed(m);
    const auto p = solve(s, 1).front();
    const double pairing = interpolation_pairing(m, p.sigma_coeffs, u);
    pairing_defect.push_back((p.lambda_h - 2.0) - pairing);
    expansion_defect.push_back(pairing - integral_expansion(m, p.sigma_coeffs, u));
  }
  CHECK(rate(pairing_defect).finest() >= 3.8);
  CHECK(rate(expansion_defect).finest() >= 3.8);
}
