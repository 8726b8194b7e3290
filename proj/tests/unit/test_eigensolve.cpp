#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "rrt/eigensolve.hpp"
#include "rrt/error.hpp"

using namespace rrt;

namespace {

const double kPi = std::numbers::pi;

MixedSystem square(int n) { return assemble_mixed(build_mesh(uniform_nodes(0, kPi, n + 1), uniform_nodes(0, kPi, n + 1))); }

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("option validation") {
  SolveOptions o;
  o.k = 0;
  CHECK(kind_of([&] { validate(o, 10); }) == ErrorKind::InvalidArgument);
  o.k = 11;
  CHECK(kind_of([&] { validate(o, 10); }) == ErrorKind::KTooLarge);
  o.k = 3;
  o.tol = 0.0;
  CHECK(kind_of([&] { validate(o, 10); }) == ErrorKind::InvalidArgument);
  o.tol = 1e-10;
  CHECK_NOTHROW(validate(o, 10));
  const MixedSystem s = square(2);
  o.k = 5;
  CHECK(kind_of([&] { solve_mixed_eigs(s, o); }) == ErrorKind::KTooLarge);
  CHECK(kind_of([&] { dense_oracle_eigs(s, 2, 3); }) == ErrorKind::OracleCapExceeded);
  CHECK(kind_of([&] { schur_apply(s, Vector::Ones(3)); }) == ErrorKind::LayoutMismatch);
}

TEST_CASE("iterative solver agrees with the dense oracle") {
  for (const MixedSystem& s : {square(4), square(8),
                               assemble_mixed(build_mesh({0, 0.4, 1.1, 1.3, 2.0, 3.0}, {0, 0.2, 1.0, 1.9}))}) {
    SolveOptions o;
    o.k = std::min(8, s.layout.n_cell);
    const auto it = solve_mixed_eigs(s, o);
    const auto dn = dense_oracle_eigs(s, o.k);
    REQUIRE(it.size() == static_cast<std::size_t>(o.k));
    for (int i = 0; i < o.k; ++i) {
      CHECK(it[i].lambda_h == doctest::Approx(dn[i].lambda_h).epsilon(1e-10));
      CHECK(it[i].residual_norm < 1e-9);
      if (i > 0) CHECK(it[i].lambda_h >= it[i - 1].lambda_h);
    }
  }
}

TEST_CASE("eigenpairs satisfy the mixed equations with M-orthonormal u") {
  const MixedSystem s = square(8);
  SolveOptions o;
  o.k = 6;
  const auto p = solve_mixed_eigs(s, o);
  for (int a = 0; a < 6; ++a) {
    CHECK((s.A.matrix * p[a].sigma_coeffs - s.B.transpose() * p[a].u_coeffs).norm() < 1e-10);
    CHECK(mixed_residual(s, p[a].lambda_h, p[a].sigma_coeffs, p[a].u_coeffs) < 1e-9);
    for (int b = 0; b <= a; ++b) {
      const double g = p[a].u_coeffs.dot(s.M.asDiagonal() * p[b].u_coeffs);
      CHECK(g == doctest::Approx(a == b ? 1.0 : 0.0).scale(1.0).epsilon(1e-10));
    }
    // Sign convention: largest entry of u positive.
    Eigen::Index idx;
    p[a].u_coeffs.cwiseAbs().maxCoeff(&idx);
    CHECK(p[a].u_coeffs[idx] > 0.0);
  }
  CHECK(p[0].lambda_h == doctest::Approx(2.0258).epsilon(1e-4));
}

TEST_CASE("runs are deterministic for a fixed seed") {
  const MixedSystem s = square(8);
  SolveOptions o;
  o.k = 4;
  const auto a = solve_mixed_eigs(s, o);
  const auto b = solve_mixed_eigs(s, o);
  for (int i = 0; i < 4; ++i) {
    CHECK(a[i].lambda_h == b[i].lambda_h);
    CHECK((a[i].u_coeffs - b[i].u_coeffs).norm() == 0.0);
  }
}

TEST_CASE("trace stream gets one line per outer iteration") {
  const MixedSystem s = square(4);
  std::ostringstream os;
  SolveOptions o;
  o.k = 2;
  o.trace = &os;
  solve_mixed_eigs(s, o);
  CHECK_FALSE(os.str().empty());
}

TEST_CASE("Schur apply by CG matches the direct route") {
  const MixedSystem s = square(6);
  Vector u = Vector::LinSpaced(s.layout.n_cell, -1.0, 2.0);
  const Vector direct = s.B * recover_sigma(s, u);
  SolveOptions o;
  o.tol = 1e-12;
  CHECK((schur_apply(s, u, o) - direct).norm() < 1e-10 * direct.norm());
  CHECK(schur_apply(s, Vector::Zero(s.layout.n_cell)).norm() == 0.0);
  o.inner_max_iterations = 1;
  o.tol = 1e-14;
  CHECK(kind_of([&] { schur_apply(s, u, o); }) == ErrorKind::InnerSolveDiverged);
}

TEST_CASE("mixed source problem") {
  const MixedSystem s = square(8);
  const Vector f = Vector::Ones(s.layout.n_cell);
  const auto [sigma, u] = solve_mixed_poisson(s, f);
  CHECK((s.A.matrix * sigma - s.B.transpose() * u).norm() < 1e-12);
  CHECK((s.B * sigma - s.M.asDiagonal() * f).norm() < 1e-12);
  CHECK(u.minCoeff() > 0.0);
  CHECK(kind_of([&] { solve_mixed_poisson(s, Vector::Ones(3)); }) == ErrorKind::LayoutMismatch);
}
