#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "jetstress/jetfield.hpp"
#include "jetstress/stress.hpp"

namespace jetstress {

enum class Shape { box, simplex };

/// An oriented face: the affine image origin + frame * u of the reference
/// (n-1)-cell (unit cube or unit simplex). `sign` is +1 when the frame is
/// positively oriented for the outward-first convention, -1 otherwise.
struct Face {
  Shape shape = Shape::box;
  Eigen::VectorXd origin;
  Eigen::MatrixXd frame;  // n x (n-1)
  int sign = 1;

  Eigen::VectorXd point(const Eigen::VectorXd& u) const { return origin + frame * u; }
};

/// A box [lo, hi] or an affine simplex with n + 1 vertices.
struct Region {
  Shape shape = Shape::box;
  Eigen::VectorXd lo, hi;               // box
  std::vector<Eigen::VectorXd> vertices;  // simplex
  int orientation = 1;

  static Region box(Eigen::VectorXd lo, Eigen::VectorXd hi);
  static Region unit_box(int n);
  static Region simplex(std::vector<Eigen::VectorXd> vertices);
  static Region unit_simplex(int n);

  int dimension() const;
  double volume() const;
  /// Boundary faces, each with its induced orientation sign.
  std::vector<Face> faces() const;
  /// Affine map from the reference cell: origin + frame * u.
  Eigen::VectorXd origin() const;
  Eigen::MatrixXd frame() const;
};

/// Nodes (columns) and weights on a reference cell, exact for polynomials of
/// total degree <= order.
struct QuadratureRule {
  Eigen::MatrixXd nodes;
  Eigen::VectorXd weights;
  int order = 0;
};

/// Gauss-Legendre rule with `points` nodes on [0, 1].
QuadratureRule gauss_legendre(int points);

/// Tensor Gauss-Legendre on the unit cube or collapsed (Duffy) rule on the
/// unit simplex of the given dimension, exact to total degree `order`.
QuadratureRule reference_rule(Shape shape, int dimension, int order);

/// Deterministic pairwise summation.
double pairwise_sum(std::span<const double> values);

using Density = std::function<double(const Eigen::VectorXd&)>;
using FormCoefficients = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Integral of density * dx over the region (the orientation flag multiplies
/// the result).
double integrate_n_form(const Density& density, const Region& region, int order);

/// Integral over the oriented boundary of the (n-1)-form sum_i c_i d_i _| dx.
double integrate_boundary_form(const FormCoefficients& c, const Region& region, int order);

/// Boundary orientation check on the n = 1 fundamental theorem:
/// integral over [a, b] of f' equals f(b) - f(a). True when the sign
/// convention is consistent.
bool orientation_self_test();

/// The (n-1)-form tau . v on the face at z, evaluated on the face frame:
/// the hyper-traction density against the face parametrization measure.
double cauchy_pullback(const TractionField& tau, const Face& face, const Eigen::VectorXd& z,
                       const JetPoint& v);

/// |integral over dR of tau . lambda - integral over R of 𝔡tau . j^1 lambda|,
/// with lambda a section of J^{k-1}W given by its components.
double stokes_residual(const TractionField& tau, const SmoothMap& lambda, const Region& region, int order);

/// Integral over R of b . j^{k-1}w plus the integral over dR of tau . j^{k-1}w.
double force_functional(const BodyForceField& b, const TractionField& tau, const Region& region,
                        const SmoothMap& w, int order);

/// Integral over R of P . j^1(j^{k-1}w).
double nhs_functional(const NonHolStressField& p, const Region& region, const SmoothMap& w, int order);

/// Integral over R of S . j^k w.
double var_functional(const VarStressField& s, const Region& region, const SmoothMap& w, int order);

}  // namespace jetstress
