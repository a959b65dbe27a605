#pragma once

#include <Eigen/Core>
#include <random>

#include "jetstress/chart.hpp"
#include "jetstress/expr.hpp"
#include "jetstress/jetfield.hpp"
#include "jetstress/stress.hpp"

namespace jetstress {

using Rng = std::mt19937_64;

/// Integer in [-3, 3].
int random_coefficient(Rng& rng);

/// Polynomial in n variables of total degree <= max_degree; each monomial
/// gets an independent integer coefficient in [-3, 3].
Expr random_polynomial(int n, int max_degree, Rng& rng);

/// Sum of `terms` monomials of total degree <= max_degree in `variables`
/// variables with non-zero integer coefficients in [-3, 3]. Used where dense
/// polynomials would be too large (potentials over all jet components).
Expr random_sparse_polynomial(int variables, int max_degree, int terms, Rng& rng);

/// `outputs` independent random polynomials as one map.
SmoothMap random_polynomial_map(int n, int outputs, int max_degree, Rng& rng);

/// Uniform point in the box [lo, hi].
Eigen::VectorXd random_point(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, Rng& rng);

VarStressField random_var_stress_field(int n, int m, int k, int max_degree, Rng& rng);
BodyForceField random_body_force_field(int n, int m, int k, int max_degree, Rng& rng);
TractionField random_traction_field(int n, int m, int k, int max_degree, Rng& rng);
NonHolStressField random_nhs_field(int n, int m, int k, int max_degree, Rng& rng);

/// Integer-valued stress and jet values (no field), entries in [-3, 3].
VariationalStress random_var_stress(int n, int m, int k, Rng& rng);
TractionStress random_traction_stress(int n, int m, int k, Rng& rng);
NonHolStress random_nhs(int n, int m, int k, Rng& rng);
JetPoint random_jet(int n, int m, int k, Rng& rng);
NonHolJetPoint random_nonholonomic_jet(int n, int m, int k, Rng& rng);

/// A nonlinear triangular chart with exact polynomial inverse:
/// x'_i = a_i x_i + q_i(x_{i+1}, ..., x_{n-1}) with a_i in {1, 2, 1/2} and
/// quadratic q_i with coefficients in quarter integers.
ChartMap random_triangular_chart(int n, Rng& rng, Box box);

/// Fiber transition A(x) = unit lower triangular with linear entries below
/// the diagonal (invertible everywhere).
BundleTransition random_unipotent_transition(int n, int m, Rng& rng);

}  // namespace jetstress
