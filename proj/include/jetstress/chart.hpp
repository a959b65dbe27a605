#pragma once

#include <Eigen/Core>
#include <vector>

#include "jetstress/jetfield.hpp"
#include "jetstress/stress.hpp"

namespace jetstress {

/// Axis-aligned box [lo, hi].
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  bool contains(const Eigen::VectorXd& x, double slack = 1e-12) const;
};

/// A coordinate change x -> x' with an explicit inverse x' -> x. The box is
/// the validity domain in the source coordinates x.
class ChartMap {
 public:
  ChartMap() = default;
  ChartMap(SmoothMap forward, SmoothMap inverse, Box box);

  static ChartMap identity(int n, Box box);
  /// x' = L x + c.
  static ChartMap affine(const Eigen::MatrixXd& l, const Eigen::VectorXd& c, Box box);

  int dimension() const { return forward_.inputs(); }
  const SmoothMap& forward() const { return forward_; }
  const SmoothMap& inverse() const { return inverse_; }
  const Box& box() const { return box_; }

  Eigen::VectorXd to_target(const Eigen::VectorXd& x) const { return forward_.value(x); }
  Eigen::VectorXd to_source(const Eigen::VectorXd& xp) const { return inverse_.value(xp); }
  /// det(dx'/dx) at x.
  double jacobian_determinant(const Eigen::VectorXd& x) const;

  /// Largest |Taylor coefficient of (forward o inverse - id)| to the given
  /// order, over the sample points (given in source coordinates).
  double round_trip_residual(const std::vector<Eigen::VectorXd>& samples, int order) const;

  /// Throws std::out_of_range outside the box and std::domain_error where the
  /// Jacobian is singular.
  void check_point(const Eigen::VectorXd& x) const;

  /// The chart read backwards (x' -> x), valid on the image box of `box`.
  ChartMap inverted(Box target_box) const;

 private:
  SmoothMap forward_;
  SmoothMap inverse_;
  Box box_;
};

/// Fiber coordinate change w' = A(x) w. The map has n inputs and m*m outputs
/// (row-major).
struct BundleTransition {
  int m = 1;
  SmoothMap matrix;

  BundleTransition() = default;
  BundleTransition(int m, SmoothMap matrix);
  static BundleTransition identity(int n, int m);
  static BundleTransition constant(int n, const Eigen::MatrixXd& a);

  Eigen::MatrixXd at(const Eigen::VectorXd& x) const;
  /// The transition back from W' to W as a function of x': A(X(x'))^{-1}.
  BundleTransition inverse_through(const ChartMap& chart) const;
};

/// The section x' -> A(X(x')) w(X(x')) in the target chart.
SmoothMap transform_section(const ChartMap& chart, const BundleTransition& a, const SmoothMap& w);

/// u' = G u for a k-jet u at x (source chart), giving the jet at x'.
JetPoint transform_jet(const ChartMap& chart, const BundleTransition& a, const JetPoint& u,
                       const Eigen::VectorXd& x);

/// Matrix of transform_jet on the flattened components at x.
Eigen::MatrixXd assemble_G(const ChartMap& chart, const BundleTransition& a, const Eigen::VectorXd& x,
                           int m, int k);

/// Matrix of the induced map J^1(J^{k-1}W) -> J^1(J^{k-1}W') at x, on
/// NonHolJetPoint::flatten components.
Eigen::MatrixXd assemble_H(const ChartMap& chart, const BundleTransition& a, const Eigen::VectorXd& x,
                           int m, int k);

/// p' = H p.
NonHolJetPoint transform_nonholonomic(const ChartMap& chart, const BundleTransition& a,
                                      const NonHolJetPoint& p, const Eigen::VectorXd& x);

// Stress values known at x' = chart(x) are pulled to x so that the paired
// forms agree: S = 𝒥 G^T S', b = 𝒥 G_{k-1}^T b', P = 𝒥 H^T P' and
// tau^{J;i} = 𝒥 x^i_{,i'} (G_{k-1}^T tau'^{.;i'})^J, with 𝒥 = det(dx'/dx).

VariationalStress pushforward_var_stress(const ChartMap& chart, const BundleTransition& a,
                                         const VariationalStress& s_target, const Eigen::VectorXd& x);
BodyForce pushforward_body_force(const ChartMap& chart, const BundleTransition& a,
                                 const BodyForce& b_target, const Eigen::VectorXd& x);
TractionStress pushforward_traction_stress(const ChartMap& chart, const BundleTransition& a,
                                           const TractionStress& tau_target, const Eigen::VectorXd& x);
NonHolStress pushforward_nhs(const ChartMap& chart, const BundleTransition& a,
                             const NonHolStress& p_target, const Eigen::VectorXd& x);

}  // namespace jetstress
