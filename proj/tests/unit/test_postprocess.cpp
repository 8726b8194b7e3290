#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "rrt/error.hpp"
#include "rrt/postprocess.hpp"

using namespace rrt;

namespace {

const double kPi = std::numbers::pi;

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

}  // namespace

TEST_CASE("Lagrange patch evaluates a tensor polynomial and its derivatives") {
  auto f = [](double x, double y) { return 1.0 + x - 2.0 * x * x + 3.0 * x * x * y; };
  LagrangePatch p;
  p.xs = {0.0, 0.5, 2.0};
  p.ys = {-1.0, 1.0};
  for (double y : p.ys)
    for (double x : p.xs) p.values.push_back(f(x, y));
  CHECK(p.value(0.3, 0.2) == doctest::Approx(f(0.3, 0.2)));
  CHECK(p.dx(0.3, 0.2) == doctest::Approx(1.0 - 4.0 * 0.3 + 6.0 * 0.3 * 0.2));
  CHECK(p.dy(0.3, 0.2) == doctest::Approx(3.0 * 0.09));
}

TEST_CASE("macro operators reproduce their polynomial spaces") {
  const TensorMesh m = graded(1);
  auto u = [](double x, double y) { return 2.0 - x + 0.5 * y + 0.25 * x * y; };
  auto sx = [](double x, double y) { return x * x * y - y + 0.1 * x; };
  auto sy = [](double x, double y) { return -x * y * y + 2.0 * x; };
  const PostprocessedField pu = j2h_u(m, l2_project_quadrature(m, u));
  const PostprocessedField ps = i2h_sigma(m, rt_interpolate_quadrature(m, sx, sy));
  CHECK(pu.has_scalar());
  CHECK_FALSE(pu.has_flux());
  CHECK(ps.has_flux());
  CHECK(pu.macro_nx == 5);
  double err = 0.0;
  for (int j = 0; j < m.ny(); ++j)
    for (int i = 0; i < m.nx(); ++i) {
      const double x = m.x(i) + 0.37 * m.hx(i), y = m.y(j) + 0.81 * m.hy(j);
      const int c = pu.macro_of_cell(i, j);
      err = std::max({err, std::abs(pu.scalar[c].value(x, y) - u(x, y)), std::abs(ps.flux_x[c].value(x, y) - sx(x, y)),
                      std::abs(ps.flux_y[c].value(x, y) - sy(x, y))});
    }
  CHECK(err < 1e-12);
}

TEST_CASE("macro operators reject unsuitable meshes") {
  const TensorMesh odd = graded(0);
  CHECK(kind_of([&] { j2h_u(odd, Vector::Zero(odd.num_cells())); }) == ErrorKind::OddMeshDimensions);
  const TensorMesh masked({0.0, 1.0, 2.0}, {0.0, 1.0, 2.0}, 0, {true, true, true, false});
  CHECK(kind_of([&] { j2h_u(masked, Vector::Zero(3)); }) == ErrorKind::NonRectangularDomain);
  const TensorMesh even = graded(1);
  CHECK(kind_of([&] { i2h_sigma(even, Vector::Zero(3)); }) == ErrorKind::LayoutMismatch);
}

TEST_CASE("RT fields evaluate linear fields exactly") {
  const TensorMesh m = graded(0);
  const DofLayout d = layout(m);
  auto sx = [](double x, double) { return 1.0 + 2.0 * x; };
  auto sy = [](double, double y) { return -0.5 + y; };
  const Vector s = rt_interpolate_quadrature(m, sx, sy);
  const auto v = evaluate_flux(m, d, s, 2, 3, m.x(2) + 0.1, m.y(3) + 0.2);
  CHECK(v[0] == doctest::Approx(sx(m.x(2) + 0.1, 0)));
  CHECK(v[1] == doctest::Approx(sy(0, m.y(3) + 0.2)));
}

TEST_CASE("supercloseness norms through the mixed matrices") {
  const MixedSystem s = assemble_mixed(graded(0));
  MixedEigenpair p;
  p.sigma_coeffs = Vector::LinSpaced(s.layout.n_sigma(), 0.0, 1.0);
  p.u_coeffs = Vector::Ones(s.layout.n_cell);
  const SuperclosenessReport zero = supercloseness_norms(s, p, p.sigma_coeffs, p.u_coeffs);
  CHECK(zero.norm_sigma == 0.0);
  CHECK(zero.norm_u == 0.0);
  const SuperclosenessReport r = supercloseness_norms(s, p, p.sigma_coeffs, 2.0 * p.u_coeffs);
  CHECK(r.norm_u == doctest::Approx(kPi));  // ||1||_0 on the square
  CHECK(kind_of([&] { supercloseness_norms(s, p, Vector::Zero(2), p.u_coeffs); }) == ErrorKind::LayoutMismatch);
}

TEST_CASE("postprocessed interpolants converge at second order") {
  const FieldSample f = FieldSample::single(Rectangle{}, 1, 2);
  std::vector<double> sl2, sh1, ul2, raw;
  for (int l = 1; l <= 3; ++l) {
    const TensorMesh m = graded(l);
    const PostprocessedField ps = i2h_sigma(m, rt_interpolate_exact(m, f));
    const PostprocessedField pu = j2h_u(m, l2_project_exact(m, f));
    sl2.push_back(error_norms_postprocessed(ps, f, 0));
    sh1.push_back(error_norms_postprocessed(ps, f, 1));
    ul2.push_back(error_norms_postprocessed(pu, f, 0));
    raw.push_back(flux_error(m, rt_interpolate_exact(m, f), f));
  }
  CHECK(std::log2(sl2[1] / sl2[2]) == doctest::Approx(2.0).epsilon(0.1));
  CHECK(std::log2(ul2[1] / ul2[2]) == doctest::Approx(2.0).epsilon(0.1));
  CHECK(std::log2(sh1[1] / sh1[2]) == doctest::Approx(1.0).epsilon(0.1));
  CHECK(std::log2(raw[1] / raw[2]) == doctest::Approx(1.0).epsilon(0.1));
  CHECK_THROWS_AS(error_norms_postprocessed(i2h_sigma(graded(1), rt_interpolate_exact(graded(1), f)), f, 2), Error);

  const TensorMesh m = graded(2);
  CHECK(scalar_error(m, l2_project_exact(m, f), f) > 0.0);
}

TEST_CASE("sampled output") {
  const TensorMesh m = graded(1);
  const PostprocessedField pu = j2h_u(m, Vector::Ones(m.num_cells()));
  std::ostringstream os;
  write_sampled(os, pu, 2, 2);
  const std::string out = os.str();
  CHECK(std::count(out.begin(), out.end(), '\n') == 4 * m.num_cells());
  std::ostringstream dummy;
  CHECK(kind_of([&] { write_sampled(dummy, pu, 0); }) == ErrorKind::InvalidArgument);
}
