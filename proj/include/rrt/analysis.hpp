#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rrt/assembly.hpp"
#include "rrt/eigensolve.hpp"
#include "rrt/exact.hpp"

namespace rrt {

struct ExpansionReport {
  double e1 = 0.0;  // lambda_h - lambda
  double e2 = 0.0;  // dominant h^2 term
  double r = 0.0;   // e1 - e2
  int level = 0;
  double h = 0.0;
};

/// (1/12) sum_K (hx^2 int_K u_xx^2 + hy^2 int_K u_yy^2), closed form.
double expansion_term(const TensorMesh& mesh, const FieldSample& exact_rep);

double residual(double e1, double e2);

ExpansionReport expansion_report(const TensorMesh& mesh, double lambda_h, double lambda,
                                 const FieldSample& exact_rep);

/// Values with log2 ratios of successive |value - reference|. A ratio whose
/// error underflows 1e-14 is left empty.
struct RatesTable {
  std::vector<double> values;
  std::vector<double> errors;
  std::vector<std::optional<double>> rates;  // rates[i] between levels i and i+1

  /// Rate of the two finest levels. Throws DegenerateRatio if unavailable.
  double finest() const;
};

RatesTable rate(const std::vector<double>& values, double reference = 0.0);

/// "↘" when every successive difference is negative, "↗" when every one is
/// positive, "~" otherwise.
std::string trend(const std::vector<double>& values);

/// (4 lambda_half - lambda_h) / 3.
double extrapolate(double lambda_h, double lambda_half);

struct BoundCheck {
  double margin = 0.0;  // lambda_h - lambda
  bool holds = true;    // margin >= -1e-12 lambda
};

std::vector<BoundCheck> check_upper_bound(const std::vector<double>& lambdas_h,
                                          const std::vector<double>& exact);

/// (lambda_h - lambda) - lambda^2 h^2 / (24 a^2).
double lower_bound_margin(double lambda_h, double lambda, double a, double h);

struct FrequencyAssignment {
  int index = 0;  // position in the cluster passed in
  double lambda_h = 0.0;
  Frequency frequency;
  double predicted_shift = 0.0;  // (m^4 + n^4) h^2 / 12
  double observed_shift = 0.0;   // lambda_h - lambda
};

struct FrequencyMatch {
  std::vector<FrequencyAssignment> assignments;  // in cluster order
  double residual_scale = 0.0;  // largest |observed - predicted|
  double pair_spread = 0.0;     // largest split within one m != n pair
};

/// Assigns every discrete value of the cluster converging to exact.lambda the
/// frequency pair whose predicted shift is nearest. Throws
/// AmbiguousAssignment when two predictions are closer than twice the
/// residual scale, or when the assignment disagrees with the multiplicities.
FrequencyMatch match_frequencies(const std::vector<MixedEigenpair>& cluster,
                                 const ExactEigenpair& exact, double h);

/// (B s)^T M^{-1} (B s) / (s^T A s). Throws ZeroVector.
double rayleigh_quotient(const MixedSystem& system, const Vector& sigma);

/// Columns spanning a subspace, with the inner product matrix of the space.
struct EigenspaceBasis {
  Eigen::MatrixXd vectors;
  SparseMatrix metric;

  static EigenspaceBasis flux(const MixedSystem& system, Eigen::MatrixXd vectors);
  static EigenspaceBasis cell(const MixedSystem& system, Eigen::MatrixXd vectors);
};

/// sup over unit x in R of ||x - P_S x||, through principal angles. Throws
/// DimensionMismatch for unequal dimensions or lengths, InvalidArgument for a
/// numerically dependent basis.
double eigenspace_gap(const EigenspaceBasis& r, const EigenspaceBasis& s);

/// Gap between span{u_jh} (M-orthonormal cell vectors) and the L2-orthonormal
/// exact basis functions, measured in L2 through the cross Gram matrix
/// (u_i, u_jh).
double gap_to_exact(const TensorMesh& mesh, const std::vector<Vector>& u_h,
                    const std::vector<Frequency>& basis, const Rectangle& domain);

/// (sigma - sigma_I, sigma_h) with 5x5 Gauss points per cell.
double interpolation_pairing(const TensorMesh& mesh, const Vector& sigma_h,
                             const FieldSample& exact);

/// (1/12) sum_K (hx^2 int_K u_xxx tau_1 + hy^2 int_K u_yyy tau_2), 5x5 Gauss.
double integral_expansion(const TensorMesh& mesh, const Vector& tau_h, const FieldSample& exact);

}  // namespace rrt
