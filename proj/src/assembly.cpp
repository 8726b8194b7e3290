#include "rrt/assembly.hpp"

#include <cstdio>
#include <ostream>

namespace rrt {

using Triplet = Eigen::Triplet<double>;

DofLayout layout(const TensorMesh& mesh) {
  DofLayout d;
  const int n1 = mesh.nx();
  const int n2 = mesh.ny();
  d.n1 = n1;
  d.n2 = n2;
  d.xedge_dof.assign((n1 + 1) * n2, -1);
  d.yedge_dof.assign(n1 * (n2 + 1), -1);
  d.cell_dof.assign(n1 * n2, -1);

  auto active = [&](int i, int j) {
    return i >= 0 && j >= 0 && i < n1 && j < n2 && mesh.active(i, j);
  };

  for (int j = 0; j < n2; ++j)
    for (int p = 0; p <= n1; ++p)
      if (active(p - 1, j) || active(p, j)) {
        d.xedge_dof[p + j * (n1 + 1)] = d.n_xedge++;
        d.sigma_pos.push_back({p, j});
      }
  for (int q = 0; q <= n2; ++q)
    for (int i = 0; i < n1; ++i)
      if (active(i, q - 1) || active(i, q)) {
        d.yedge_dof[i + q * n1] = d.n_xedge + d.n_yedge++;
        d.sigma_pos.push_back({i, q});
      }
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i)
      if (active(i, j)) {
        d.cell_dof[i + j * n1] = d.n_cell++;
        d.cell_pos.push_back({i, j});
      }
  return d;
}

MixedElement mixed_element(double hx, double hy) {
  MixedElement e;
  const double area = hx * hy;
  e.mass.setZero();
  e.mass(0, 0) = e.mass(1, 1) = area / 3.0;
  e.mass(0, 1) = e.mass(1, 0) = area / 6.0;
  e.mass(2, 2) = e.mass(3, 3) = area / 3.0;
  e.mass(2, 3) = e.mass(3, 2) = area / 6.0;
  e.div << -hy, hy, -hx, hx;
  e.area = area;
  return e;
}

MixedSystem assemble_mixed(const TensorMesh& mesh) {
  DofLayout d = layout(mesh);
  std::vector<Triplet> a_entries;
  std::vector<Triplet> b_entries;
  a_entries.reserve(8 * d.n_cell);
  b_entries.reserve(4 * d.n_cell);
  Vector m(d.n_cell);

  for (int c = 0; c < d.n_cell; ++c) {
    const auto [i, j] = d.cell_pos[c];
    const MixedElement e = mixed_element(mesh.hx(i), mesh.hy(j));
    const std::array<int, 4> dofs = {d.xedge(i, j), d.xedge(i + 1, j), d.yedge(i, j),
                                     d.yedge(i, j + 1)};
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b)
        if (e.mass(a, b) != 0.0) a_entries.emplace_back(dofs[a], dofs[b], e.mass(a, b));
      b_entries.emplace_back(c, dofs[a], e.div[a]);
    }
    m[c] = e.area;
  }

  MixedSystem sys{mesh, d, {}, {}, std::move(m)};
  sys.A.matrix.resize(d.n_sigma(), d.n_sigma());
  sys.A.matrix.setFromTriplets(a_entries.begin(), a_entries.end());
  sys.A.matrix.prune(0.0);
  sys.A.matrix.makeCompressed();
  sys.B.resize(d.n_cell, d.n_sigma());
  sys.B.setFromTriplets(b_entries.begin(), b_entries.end());
  sys.B.prune(0.0);
  sys.B.makeCompressed();
  return sys;
}

const Eigen::Matrix<double, 5, 5>& peq_reference_basis() {
  // Columns: psi_L, psi_R, psi_B, psi_T, psi_K; rows: 1, xi, eta, xi^2, eta^2.
  // Each psi has mean 1 on its own edge (or the cell) and mean 0 on the rest.
  static const Eigen::Matrix<double, 5, 5> basis = [] {
    Eigen::Matrix<double, 5, 5> c;
    c << -0.25, -0.25, -0.25, -0.25, 2.0,
         -0.5, 0.5, 0.0, 0.0, 0.0,
         0.0, 0.0, -0.5, 0.5, 0.0,
         0.75, 0.75, 0.0, 0.0, -1.5,
         0.0, 0.0, 0.75, 0.75, -1.5;
    return c;
  }();
  return basis;
}

PeqElement peq_element(double hx, double hy) {
  // Gradient Gram matrices of the monomials on [-1,1]^2.
  Eigen::Matrix<double, 5, 5> g_xi = Eigen::Matrix<double, 5, 5>::Zero();
  Eigen::Matrix<double, 5, 5> g_eta = Eigen::Matrix<double, 5, 5>::Zero();
  g_xi(1, 1) = 4.0;
  g_xi(3, 3) = 16.0 / 3.0;
  g_eta(2, 2) = 4.0;
  g_eta(4, 4) = 16.0 / 3.0;

  const auto& c = peq_reference_basis();
  const Eigen::Matrix<double, 5, 5> mean_stiffness =
      (hy / hx) * c.transpose() * g_xi * c + (hx / hy) * c.transpose() * g_eta * c;

  Eigen::Matrix<double, 5, 1> scale;
  scale << 1.0 / hy, 1.0 / hy, 1.0 / hx, 1.0 / hx, 1.0 / (hx * hy);

  PeqElement e;
  e.stiffness = scale.asDiagonal() * mean_stiffness * scale.asDiagonal();
  e.stiffness = 0.5 * (e.stiffness + e.stiffness.transpose()).eval();
  e.cell_mean.setZero();
  e.cell_mean[4] = 1.0 / (hx * hy);
  return e;
}

PeqSystem assemble_peq(const TensorMesh& mesh) {
  PeqLayout d;
  const int n1 = mesh.nx();
  const int n2 = mesh.ny();
  d.n1 = n1;
  d.n2 = n2;
  d.xedge_dof.assign((n1 + 1) * n2, -1);
  d.yedge_dof.assign(n1 * (n2 + 1), -1);
  d.cell_dof.assign(n1 * n2, -1);
  auto active = [&](int i, int j) {
    return i >= 0 && j >= 0 && i < n1 && j < n2 && mesh.active(i, j);
  };

  for (int j = 0; j < n2; ++j)
    for (int p = 0; p <= n1; ++p)
      if (active(p - 1, j) && active(p, j)) d.xedge_dof[p + j * (n1 + 1)] = d.n_edge++;
  for (int q = 0; q <= n2; ++q)
    for (int i = 0; i < n1; ++i)
      if (active(i, q - 1) && active(i, q)) d.yedge_dof[i + q * n1] = d.n_edge++;
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i)
      if (active(i, j)) d.cell_dof[i + j * n1] = d.n_edge + d.n_cell++;

  std::vector<Triplet> k_entries;
  k_entries.reserve(25 * d.n_cell);
  Vector m0 = Vector::Zero(d.size());
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      if (!active(i, j)) continue;
      const PeqElement e = peq_element(mesh.hx(i), mesh.hy(j));
      const std::array<int, 5> dofs = {d.xedge(i, j), d.xedge(i + 1, j), d.yedge(i, j),
                                       d.yedge(i, j + 1), d.cell(i, j)};
      for (int a = 0; a < 5; ++a) {
        if (dofs[a] < 0) continue;
        for (int b = 0; b < 5; ++b)
          if (dofs[b] >= 0 && e.stiffness(a, b) != 0.0)
            k_entries.emplace_back(dofs[a], dofs[b], e.stiffness(a, b));
      }
      m0[d.cell(i, j)] = 1.0 / mesh.area(i, j);
    }
  }

  PeqSystem sys{mesh, d, {}, std::move(m0)};
  sys.K.matrix.resize(d.size(), d.size());
  sys.K.matrix.setFromTriplets(k_entries.begin(), k_entries.end());
  sys.K.matrix.prune(0.0);
  sys.K.matrix.makeCompressed();
  return sys;
}

void write_coordinate(std::ostream& os, const SparseMatrix& m) {
  char buf[96];
  for (int col = 0; col < m.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(m, col); it; ++it) {
      std::snprintf(buf, sizeof(buf), "%lld %lld %.17g\n", static_cast<long long>(it.row()),
                    static_cast<long long>(it.col()), it.value());
      os << buf;
    }
  }
}

}  // namespace rrt
