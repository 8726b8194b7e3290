#include "rrt/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rrt/error.hpp"

namespace rrt {

namespace {

void check_nodes(const std::vector<double>& nodes, const char* name) {
  if (nodes.size() < 2) {
    throw Error(ErrorKind::TooFewNodes,
                std::string(name) + " needs at least 2 nodes, got " + std::to_string(nodes.size()));
  }
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (!(nodes[i] > nodes[i - 1])) {
      throw Error(ErrorKind::NonMonotonicNodes,
                  std::string(name) + " not strictly increasing at index " + std::to_string(i));
    }
  }
}

std::vector<double> bisect(std::span<const double> nodes) {
  std::vector<double> out;
  out.reserve(2 * nodes.size() - 1);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    out.push_back(nodes[i]);
    out.push_back(0.5 * (nodes[i] + nodes[i + 1]));
  }
  out.push_back(nodes.back());
  return out;
}

}  // namespace

TensorMesh::TensorMesh(std::vector<double> node_x, std::vector<double> node_y, int level,
                       std::vector<bool> active)
    : node_x_(std::move(node_x)), node_y_(std::move(node_y)), level_(level),
      active_(std::move(active)) {
  check_nodes(node_x_, "node_x");
  check_nodes(node_y_, "node_y");
  if (!active_.empty()) {
    if (static_cast<int>(active_.size()) != num_cells()) {
      throw Error(ErrorKind::InvalidArgument, "cell mask size does not match the mesh");
    }
    if (std::all_of(active_.begin(), active_.end(), [](bool b) { return b; })) active_.clear();
  }
}

TensorMesh build_mesh(std::vector<double> node_x, std::vector<double> node_y) {
  return TensorMesh(std::move(node_x), std::move(node_y));
}

std::vector<double> uniform_nodes(double start, double end, int count) {
  if (count < 2) throw Error(ErrorKind::TooFewNodes, "uniform descriptor needs count >= 2");
  std::vector<double> nodes(count);
  const int n = count - 1;
  for (int i = 0; i <= n; ++i) nodes[i] = start + (end - start) * i / n;
  nodes.back() = end;
  return nodes;
}

TensorMesh uniform_refine(const TensorMesh& mesh) {
  std::vector<bool> mask;
  if (!mesh.full()) {
    const int nx = mesh.nx();
    const int ny = mesh.ny();
    mask.assign(4 * nx * ny, false);
    for (int j = 0; j < 2 * ny; ++j)
      for (int i = 0; i < 2 * nx; ++i) mask[i + j * 2 * nx] = mesh.active(i / 2, j / 2);
  }
  return TensorMesh(bisect(mesh.node_x()), bisect(mesh.node_y()), mesh.level() + 1,
                    std::move(mask));
}

double regularity_constant(const TensorMesh& mesh) {
  double a = 1.0;
  for (int j = 0; j < mesh.ny(); ++j) {
    for (int i = 0; i < mesh.nx(); ++i) {
      if (!mesh.active(i, j)) continue;
      const double r = mesh.hx(i) / mesh.hy(j);
      a = std::max({a, r, 1.0 / r});
    }
  }
  return a;
}

double mesh_size(const TensorMesh& mesh) {
  double h = 0.0;
  for (int i = 0; i < mesh.nx(); ++i) h = std::max(h, mesh.hx(i));
  for (int j = 0; j < mesh.ny(); ++j) h = std::max(h, mesh.hy(j));
  return h;
}

bool is_uniform(const TensorMesh& mesh, double rel_tol) {
  const double h = mesh_size(mesh);
  for (int i = 0; i < mesh.nx(); ++i)
    if (std::abs(mesh.hx(i) - h) > rel_tol * h) return false;
  for (int j = 0; j < mesh.ny(); ++j)
    if (std::abs(mesh.hy(j) - h) > rel_tol * h) return false;
  return true;
}

}  // namespace rrt
