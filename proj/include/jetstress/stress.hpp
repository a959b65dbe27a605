#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "jetstress/jetfield.hpp"
#include "jetstress/symalg.hpp"

namespace jetstress {

// Stress values at a point. Every component is stored in the dual convention,
// so each pairing below is a plain sum over canonical multi-indices.
//
// Flattened layouts (used by fields, potentials and files):
//   VariationalStress, BodyForce, HyperTraction: alpha * N + graded_rank(I)
//   TractionStress:   (alpha * N + graded_rank(J)) * n + i
//   NonHolStress:     P block (as BodyForce), then the P-bar block (as TractionStress)
// where N is graded_dimension(n, k) for S and graded_dimension(n, k - 1) otherwise.

/// Graded family of fully symmetric dual arrays per fiber index: the shared
/// storage of S, b and hyper-tractions.
struct GradedDual {
  int n = 1;
  int m = 1;
  int order = 0;
  Eigen::MatrixXd values;  // m x graded_dimension(n, order)

  GradedDual() = default;
  GradedDual(int n, int m, int order);
  GradedDual(int n, int m, int order, Eigen::MatrixXd values);

  double operator()(int alpha, const MultiIndex& index) const;
  double& operator()(int alpha, const MultiIndex& index);
  SymArray block(int alpha, int degree) const;
  void set_block(int alpha, const SymArray& block);

  int components() const { return static_cast<int>(values.size()); }
  Eigen::VectorXd flatten() const;
  void assign_flat(const Eigen::VectorXd& flat);
};

/// S_alpha^I for |I| <= k.
struct VariationalStress : GradedDual {
  VariationalStress() = default;
  VariationalStress(int n, int m, int k) : GradedDual(n, m, k) {}
  int k() const { return order; }
  static VariationalStress unflatten(int n, int m, int k, const Eigen::VectorXd& flat);
};

/// b_alpha^J for |J| <= k - 1.
struct BodyForce : GradedDual {
  BodyForce() = default;
  BodyForce(int n, int m, int k) : GradedDual(n, m, k - 1) {}
  int k() const { return order + 1; }
  static BodyForce unflatten(int n, int m, int k, const Eigen::VectorXd& flat);
};

/// Hyper-traction t_alpha^J on a boundary element, |J| <= k - 1.
struct HyperTraction : GradedDual {
  HyperTraction() = default;
  HyperTraction(int n, int m, int k) : GradedDual(n, m, k - 1) {}
  int k() const { return order + 1; }
};

/// tau_alpha^{J;i}, |J| <= k - 1: symmetric in J only.
struct TractionStress {
  int n = 1;
  int m = 1;
  int k = 1;
  std::vector<Eigen::MatrixXd> values;  // per alpha: graded_dimension(n, k-1) x n

  TractionStress() = default;
  TractionStress(int n, int m, int k);

  double operator()(int alpha, const MultiIndex& head, int i) const;
  double& operator()(int alpha, const MultiIndex& head, int i);
  /// The |J| = r part as a degree r+1 almost symmetric array.
  AlmostSymArray block(int alpha, int r) const;
  void set_block(int alpha, const AlmostSymArray& block);

  int components() const { return m * graded_dimension(n, k - 1) * n; }
  Eigen::VectorXd flatten() const;
  static TractionStress unflatten(int n, int m, int k, const Eigen::VectorXd& flat);
};

/// P = (P_alpha^J, Pbar_alpha^{J;j}), |J| <= k - 1.
struct NonHolStress {
  int n = 1;
  int m = 1;
  int k = 1;
  BodyForce p;
  TractionStress pbar;

  NonHolStress() = default;
  NonHolStress(int n, int m, int k);

  int components() const { return p.components() + pbar.components(); }
  Eigen::VectorXd flatten() const;
  static NonHolStress unflatten(int n, int m, int k, const Eigen::VectorXd& flat);
};

// ---------------------------------------------------------------------------
// Fields: a SmoothMap R^n -> components, in the flattened layout above.

struct VarStressField {
  int n = 1, m = 1, k = 0;
  SmoothMap map;
  VarStressField() = default;
  VarStressField(int n, int m, int k, SmoothMap map);
  VariationalStress at(const Eigen::VectorXd& x) const;
};

struct BodyForceField {
  int n = 1, m = 1, k = 1;
  SmoothMap map;
  BodyForceField() = default;
  BodyForceField(int n, int m, int k, SmoothMap map);
  BodyForce at(const Eigen::VectorXd& x) const;
};

struct TractionField {
  int n = 1, m = 1, k = 1;
  SmoothMap map;
  TractionField() = default;
  TractionField(int n, int m, int k, SmoothMap map);
  TractionStress at(const Eigen::VectorXd& x) const;
};

struct NonHolStressField {
  int n = 1, m = 1, k = 1;
  SmoothMap map;
  NonHolStressField() = default;
  NonHolStressField(int n, int m, int k, SmoothMap map);
  NonHolStress at(const Eigen::VectorXd& x) const;
};

// ---------------------------------------------------------------------------
// Pairings.

/// sum S_alpha^I u^alpha_I over |I| <= k: the dx coefficient of S . j^k w.
double var_pair(const VariationalStress& s, const JetPoint& u);

/// sum b_alpha^J v^alpha_J; v may have order >= k - 1.
double body_pair(const BodyForce& b, const JetPoint& v);

/// Coefficients c_i of tau . v on the basis d_i _| dx.
Eigen::VectorXd traction_action(const TractionStress& tau, const JetPoint& v);

/// The (n-1)-form tau . v evaluated on the tangent frame (columns of `frame`,
/// n x (n-1)): sum_i c_i det[e_i, frame]. Throws on a rank-deficient frame.
double evaluate_on_frame(const Eigen::VectorXd& form, const Eigen::MatrixXd& frame);

/// Hyper-traction t_alpha^J = sum_i tau_alpha^{J;i} det[e_i, frame] on the
/// boundary element spanned by `frame`.
HyperTraction hyper_traction(const TractionStress& tau, const Eigen::MatrixXd& frame);

/// sum P_alpha^J lambda^alpha_J + sum Pbar_alpha^{J;j} mu^alpha_{J;j}.
double nh_pair(const NonHolStress& p, const NonHolJetPoint& q);

// ---------------------------------------------------------------------------
// Operators.

/// P^J = sum_j d_j tau^{J;j}, Pbar = tau.
NonHolStressField exterior_jet(const TractionField& tau);

/// Pbar as a traction stress.
TractionStress p_tau(const NonHolStress& p);
TractionField p_tau(const NonHolStressField& p);

/// The non-holonomic stress 𝔡(p_tau P) - P, computed literally. Its P-bar slot
/// vanishes identically.
NonHolStressField divergence_full(const NonHolStressField& p);

/// div P in the body-force shape. Every evaluation asserts that the P-bar
/// slot of divergence_full is zero to `slot_tol` relative to the data scale
/// and throws std::logic_error otherwise.
BodyForceField divergence(const NonHolStressField& p, double slot_tol = 1e-10);

/// P^J = tau_{,j}^{J;j} + b^J, Pbar = tau.
NonHolStressField induced_nhs(const BodyForceField& b, const TractionField& tau);

using CollapseFn = std::function<SymArray(const AlmostSymArray&)>;

/// The restriction of P to holonomic jets: S^K = collapse(Pbar^{.;.}) at
/// |K| = k, S^J = P^J + collapse(Pbar) for 1 <= |J| < k, S = P at degree 0.
/// `collapse` defaults to collapse_last; replacing it is how tests inject faults.
VariationalStress restrict_to_holonomic(const NonHolStress& p, const CollapseFn& collapse = {});
VarStressField restrict_to_holonomic(const NonHolStressField& p, const CollapseFn& collapse = {});

/// restrict_to_holonomic(exterior_jet(tau)).
VarStressField reduced_exterior_jet(const TractionField& tau);

/// restrict_to_holonomic(induced_nhs(b, tau)).
VarStressField var_stress_from_force_system(const BodyForceField& b, const TractionField& tau);

/// A non-zero P with restrict_to_holonomic(P) = 0, for k >= 2 and n >= 2:
/// Pbar^{(J0+e1);2} = 1 and Pbar^{(J0+e2);1} = -1 at top degree, fiber index 0.
NonHolStress kernel_element(int n, int m, int k);

/// A right inverse of restrict_to_holonomic: Pbar at top degree is the spread
/// of the top block of S (so it is symmetric), lower Pbar vanish, P copies
/// the remaining blocks.
NonHolStress lift_variational(const VariationalStress& s);

// ---------------------------------------------------------------------------
// Constitutive evaluation. Potentials read jet components in the derivative
// convention, in JetPoint::flatten (resp. NonHolJetPoint::flatten) order.

/// S_alpha^I = d phi / d u^alpha_I. The gradient in canonical coordinates is
/// already in the dual convention: it equals |I|!/I! times the derivative of
/// phi with respect to the full-array entry u_{i1...il}.
VariationalStress constitutive_var(const SmoothMap& phi, const JetPoint& u);

/// Gradient of a potential on J^1(J^{k-1}W) components (lambda, mu).
NonHolStress constitutive_nhs(const SmoothMap& phi, const NonHolJetPoint& q);

}  // namespace jetstress
