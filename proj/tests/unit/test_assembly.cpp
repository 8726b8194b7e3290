#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "rrt/assembly.hpp"
#include "rrt/exact.hpp"

using namespace rrt;

TEST_CASE("layout numbers vertical edges, horizontal edges, cells") {
  const DofLayout d = layout(build_mesh({0.0, 1.0, 2.0, 3.0}, {0.0, 1.0, 2.0}));
  CHECK(d.n_xedge == 8);
  CHECK(d.n_yedge == 9);
  CHECK(d.n_cell == 6);
  CHECK(d.xedge(2, 1) == 2 + 1 * 4);
  CHECK(d.yedge(1, 2) == 8 + 1 + 2 * 3);
  CHECK(d.cell(2, 1) == 5);
  CHECK(d.is_xedge(7));
  CHECK_FALSE(d.is_xedge(8));
  CHECK(d.sigma_pos[d.yedge(1, 2)] == std::array<int, 2>{1, 2});
}

TEST_CASE("masked cells drop their exclusive edges") {
  const DofLayout d = layout(TensorMesh({0.0, 1.0, 2.0}, {0.0, 1.0, 2.0}, 0, {true, true, true, false}));
  CHECK(d.n_cell == 3);
  CHECK(d.n_xedge == 5);
  CHECK(d.n_yedge == 5);
  CHECK(d.cell(1, 1) == -1);
  CHECK(d.xedge(2, 1) == -1);
  CHECK(d.yedge(1, 2) == -1);
}

TEST_CASE("single cell, closed-form element") {
  const MixedElement e = mixed_element(2.0, 3.0);
  CHECK(e.area == 6.0);
  CHECK(e.mass(0, 0) == doctest::Approx(2.0));
  CHECK(e.mass(0, 1) == doctest::Approx(1.0));
  CHECK(e.mass(0, 2) == 0.0);
  CHECK(e.div[1] == 3.0);
  CHECK(e.div[2] == -2.0);
}

TEST_CASE("one-cell square reproduces lambda = 24 / pi^2") {
  const double pi = std::numbers::pi;
  const MixedSystem s = assemble_mixed(build_mesh({0.0, pi}, {0.0, pi}));
  const Eigen::MatrixXd A(s.A.matrix);
  const Eigen::MatrixXd B(s.B);
  const double schur = (B * A.inverse() * B.transpose())(0, 0);
  CHECK(schur / s.M[0] == doctest::Approx(24.0 / (pi * pi)).epsilon(1e-14));
}

TEST_CASE("global matrices are symmetric and B is a divergence") {
  const MixedSystem s = assemble_mixed(build_mesh({0.0, 0.3, 1.0, 1.4}, {0.0, 0.5, 0.6, 1.1}));
  CHECK(s.A.symmetric);
  const SparseMatrix asym = s.A.matrix - SparseMatrix(s.A.matrix.transpose());
  CHECK(asym.norm() == 0.0);
  // Divergence integrals of a constant field vanish on every cell.
  Vector ones = Vector::Zero(s.layout.n_sigma());
  ones.head(s.layout.n_xedge).setOnes();
  CHECK((s.B * ones).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(s.M.sum() == doctest::Approx(1.4 * 1.1));
  // A is positive definite: Cholesky succeeds.
  Eigen::SimplicialLLT<SparseMatrix> llt(s.A.matrix);
  CHECK(llt.info() == Eigen::Success);
}

TEST_CASE("B applied to the interpolant integrates the divergence") {
  const TensorMesh m = build_mesh({0.0, 0.7, 1.5, 3.1}, {0.0, 1.0, 2.2, 3.0});
  const MixedSystem s = assemble_mixed(m);
  const FieldSample f(Rectangle{}, {{1.0, 1, 2}, {-0.4, 3, 1}});
  const Vector div = s.B * rt_interpolate_exact(m, f);
  for (int c = 0; c < s.layout.n_cell; ++c) {
    const auto [i, j] = s.layout.cell_pos[c];
    CHECK(div[c] == doctest::Approx(f.cell_integral_div_sigma(m.x(i), m.x(i + 1), m.y(j), m.y(j + 1))).epsilon(1e-12));
  }
}

TEST_CASE("projected-EQ element") {
  const auto& basis = peq_reference_basis();
  // The constant 1 has unit mean on every functional, so the dual basis sums to it.
  const Eigen::Matrix<double, 5, 1> sum = basis.rowwise().sum();
  CHECK(sum[0] == doctest::Approx(1.0));
  CHECK(sum.tail(4).norm() < 1e-15);
  const PeqElement e = peq_element(2.0, 1.0);
  CHECK((e.stiffness - e.stiffness.transpose()).norm() < 1e-14);
  // Constants lie in the kernel of the stiffness.
  Eigen::Matrix<double, 5, 1> c;
  c << 1.0, 1.0, 2.0, 2.0, 2.0;  // integrals of 1: edge lengths, area
  CHECK((e.stiffness * c).norm() < 1e-13);
  CHECK(e.cell_mean.dot(c) == doctest::Approx(1.0));

  const PeqSystem p = assemble_peq(build_mesh({0.0, 1.0, 2.0, 3.0}, {0.0, 1.0, 2.0}));
  CHECK(p.layout.n_edge == 7);
  CHECK(p.layout.n_cell == 6);
  CHECK(p.M0.head(7).cwiseAbs().maxCoeff() == 0.0);
  CHECK(p.M0[7] == doctest::Approx(1.0));
}

TEST_CASE("coordinate dump") {
  SparseMatrix m(2, 2);
  m.insert(1, 0) = 0.1;
  std::ostringstream os;
  write_coordinate(os, m);
  CHECK(os.str().find("1 0 0.10000000000000001") != std::string::npos);
}
