#include "jetstress/random_fields.hpp"

namespace jetstress {

int random_coefficient(Rng& rng) { return static_cast<int>(rng() % 7) - 3; }

Expr random_polynomial(int n, int max_degree, Rng& rng) {
  std::vector<Expr> terms;
  for (const auto& index : enumerate_up_to(n, max_degree)) {
    const int c = random_coefficient(rng);
    if (c != 0) terms.push_back(Expr::monomial(c, index.counts()));
  }
  return Expr::sum(std::move(terms));
}

Expr random_sparse_polynomial(int variables, int max_degree, int terms, Rng& rng) {
  std::vector<Expr> out;
  for (int t = 0; t < terms; ++t) {
    std::vector<int> exponents(static_cast<std::size_t>(variables), 0);
    const int d = static_cast<int>(rng() % static_cast<std::uint64_t>(max_degree + 1));
    for (int e = 0; e < d; ++e) ++exponents[rng() % static_cast<std::uint64_t>(variables)];
    int c = 0;
    while (c == 0) c = random_coefficient(rng);
    out.push_back(Expr::monomial(c, exponents));
  }
  return Expr::sum(std::move(out));
}

SmoothMap random_polynomial_map(int n, int outputs, int max_degree, Rng& rng) {
  std::vector<Expr> exprs;
  exprs.reserve(static_cast<std::size_t>(outputs));
  for (int i = 0; i < outputs; ++i) exprs.push_back(random_polynomial(n, max_degree, rng));
  return SmoothMap::from_expressions(n, std::move(exprs));
}

Eigen::VectorXd random_point(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd x(lo.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = lo(i) + (hi(i) - lo(i)) * unit(rng);
  return x;
}

VarStressField random_var_stress_field(int n, int m, int k, int max_degree, Rng& rng) {
  return VarStressField(n, m, k, random_polynomial_map(n, VariationalStress(n, m, k).components(), max_degree, rng));
}

BodyForceField random_body_force_field(int n, int m, int k, int max_degree, Rng& rng) {
  return BodyForceField(n, m, k, random_polynomial_map(n, BodyForce(n, m, k).components(), max_degree, rng));
}

TractionField random_traction_field(int n, int m, int k, int max_degree, Rng& rng) {
  return TractionField(n, m, k, random_polynomial_map(n, TractionStress(n, m, k).components(), max_degree, rng));
}

NonHolStressField random_nhs_field(int n, int m, int k, int max_degree, Rng& rng) {
  return NonHolStressField(n, m, k, random_polynomial_map(n, NonHolStress(n, m, k).components(), max_degree, rng));
}

namespace {
Eigen::VectorXd random_vector(Eigen::Index size, Rng& rng) {
  Eigen::VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) v(i) = random_coefficient(rng);
  return v;
}
}  // namespace

VariationalStress random_var_stress(int n, int m, int k, Rng& rng) {
  return VariationalStress::unflatten(n, m, k, random_vector(VariationalStress(n, m, k).components(), rng));
}

TractionStress random_traction_stress(int n, int m, int k, Rng& rng) {
  return TractionStress::unflatten(n, m, k, random_vector(TractionStress(n, m, k).components(), rng));
}

NonHolStress random_nhs(int n, int m, int k, Rng& rng) {
  return NonHolStress::unflatten(n, m, k, random_vector(NonHolStress(n, m, k).components(), rng));
}

JetPoint random_jet(int n, int m, int k, Rng& rng) {
  return JetPoint::unflatten(n, m, k, random_vector(JetPoint(n, m, k).components(), rng));
}

NonHolJetPoint random_nonholonomic_jet(int n, int m, int k, Rng& rng) {
  return NonHolJetPoint::unflatten(n, m, k, random_vector(NonHolJetPoint(n, m, k).components(), rng));
}

ChartMap random_triangular_chart(int n, Rng& rng, Box box) {
  // q_i depends on the trailing variables only.
  std::vector<Expr> shifts(static_cast<std::size_t>(n), Expr::constant(0.0));
  for (int i = 0; i + 1 < n; ++i) {
    std::vector<Expr> terms;
    for (const auto& index : enumerate_up_to(n, 2)) {
      if (degree(index) == 0) continue;
      bool trailing = true;
      for (int r = 0; r <= i; ++r) trailing = trailing && index[r] == 0;
      if (!trailing) continue;
      const int c = random_coefficient(rng);
      if (c != 0) terms.push_back(Expr::monomial(0.25 * c, index.counts()));
    }
    if (terms.empty()) terms.push_back(Expr::monomial(0.25, enumerate(n, 2).back().counts()));
    shifts[static_cast<std::size_t>(i)] = Expr::sum(std::move(terms));
  }
  static constexpr double kScales[] = {1.0, 2.0, 0.5};
  std::vector<double> scale;
  for (int i = 0; i < n; ++i) scale.push_back(kScales[rng() % 3]);
  std::vector<Expr> forward, inverse(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    forward.push_back(Expr::constant(scale[static_cast<std::size_t>(i)]) * Expr::variable(i) +
                      shifts[static_cast<std::size_t>(i)]);
  }
  // x_i = (x'_i - q_i(x_{i+1}, ...)) / a_i, solved from the last variable upwards.
  for (int i = n - 1; i >= 0; --i) {
    std::vector<Expr> substitution;
    for (int r = 0; r < n; ++r) {
      substitution.push_back(r > i ? inverse[static_cast<std::size_t>(r)] : Expr::variable(r));
    }
    inverse[static_cast<std::size_t>(i)] =
        Expr::constant(1.0 / scale[static_cast<std::size_t>(i)]) *
        (Expr::variable(i) - Expr::compose(shifts[static_cast<std::size_t>(i)], substitution));
  }
  return ChartMap(SmoothMap::from_expressions(n, forward), SmoothMap::from_expressions(n, inverse), std::move(box));
}

BundleTransition random_unipotent_transition(int n, int m, Rng& rng) {
  std::vector<Expr> entries;
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) {
      if (r == c) {
        entries.push_back(Expr::constant(1.0));
      } else if (c < r) {
        entries.push_back(random_polynomial(n, 1, rng));
      } else {
        entries.push_back(Expr::constant(0.0));
      }
    }
  }
  return BundleTransition(m, SmoothMap::from_expressions(n, std::move(entries)));
}

}  // namespace jetstress
