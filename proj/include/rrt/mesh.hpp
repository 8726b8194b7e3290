#pragma once

#include <span>
#include <vector>

namespace rrt {

/// Tensor-product rectangular mesh given by two strictly increasing node
/// vectors. Cell K(i, j) spans [x_i, x_{i+1}] x [y_j, y_{j+1}]; cells are
/// enumerated with i fast and j slow.
///
/// An optional cell mask marks which cells belong to the domain, so unions of
/// rectangles can be described. The default mask is all-active.
class TensorMesh {
public:
  TensorMesh(std::vector<double> node_x, std::vector<double> node_y, int level = 0,
             std::vector<bool> active = {});

  int nx() const { return static_cast<int>(node_x_.size()) - 1; }
  int ny() const { return static_cast<int>(node_y_.size()) - 1; }
  int num_cells() const { return nx() * ny(); }
  int level() const { return level_; }

  std::span<const double> node_x() const { return node_x_; }
  std::span<const double> node_y() const { return node_y_; }
  double x(int i) const { return node_x_[i]; }
  double y(int j) const { return node_y_[j]; }
  double hx(int i) const { return node_x_[i + 1] - node_x_[i]; }
  double hy(int j) const { return node_y_[j + 1] - node_y_[j]; }
  double area(int i, int j) const { return hx(i) * hy(j); }

  int cell_id(int i, int j) const { return i + j * nx(); }
  bool active(int i, int j) const { return active_.empty() || active_[cell_id(i, j)]; }
  bool full() const { return active_.empty(); }
  const std::vector<bool>& mask() const { return active_; }

private:
  std::vector<double> node_x_;
  std::vector<double> node_y_;
  int level_ = 0;
  std::vector<bool> active_;  // empty means every cell is active
};

/// Throws TooFewNodes / NonMonotonicNodes on invalid node vectors.
TensorMesh build_mesh(std::vector<double> node_x, std::vector<double> node_y);

/// Uniform node vector start + i*(end-start)/(count-1), i = 0..count-1.
std::vector<double> uniform_nodes(double start, double end, int count);

/// Inserts the midpoint between every pair of consecutive nodes. Parent nodes
/// are copied unchanged.
TensorMesh uniform_refine(const TensorMesh& mesh);

/// Smallest a >= 1 with a^{-1} h_y <= h_x <= a h_y over all active cells.
double regularity_constant(const TensorMesh& mesh);

/// Largest cell edge length.
double mesh_size(const TensorMesh& mesh);

bool is_uniform(const TensorMesh& mesh, double rel_tol = 1e-12);

}  // namespace rrt
