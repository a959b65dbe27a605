#include "jetstress/stress.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jetstress {

namespace {

void require(bool condition, const char* message) {
  if (!condition) throw std::invalid_argument(message);
}

Eigen::VectorXd field_values(const SmoothMap& map, const Eigen::VectorXd& x) {
  return map.value(x);
}

// Pairings sum hundreds of products of order 1e3; extended accumulation keeps
// the result at the rounding level of the largest term.
template <typename A, typename B>
long double accumulate_product(const A& a, const B& b) {
  long double total = 0.0L;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      total += static_cast<long double>(a(i, j)) * static_cast<long double>(b(i, j));
    }
  }
  return total;
}

}  // namespace

// --- GradedDual ------------------------------------------------------------

GradedDual::GradedDual(int n_, int m_, int order_)
    : n(n_), m(m_), order(order_), values(Eigen::MatrixXd::Zero(m_, graded_dimension(n_, order_))) {
  require(order_ >= 0, "stress order must be non-negative");
}

GradedDual::GradedDual(int n_, int m_, int order_, Eigen::MatrixXd values_)
    : n(n_), m(m_), order(order_), values(std::move(values_)) {
  require(values.rows() == m && values.cols() == graded_dimension(n, order), "stress value shape mismatch");
}

double GradedDual::operator()(int alpha, const MultiIndex& index) const {
  return values(alpha, graded_rank(index));
}

double& GradedDual::operator()(int alpha, const MultiIndex& index) {
  return values(alpha, graded_rank(index));
}

SymArray GradedDual::block(int alpha, int deg) const {
  return SymArray(n, deg, Convention::dual,
                  values.row(alpha).segment(graded_dimension(n, deg - 1), symmetric_dimension(n, deg)).transpose());
}

void GradedDual::set_block(int alpha, const SymArray& block) {
  require(block.n == n && block.l <= order, "set_block: shape mismatch");
  require(block.convention == Convention::dual, "set_block: stress blocks are dual arrays");
  values.row(alpha).segment(graded_dimension(n, block.l - 1), symmetric_dimension(n, block.l)) =
      block.values.transpose();
}

Eigen::VectorXd GradedDual::flatten() const {
  Eigen::MatrixXd t = values.transpose();
  return Eigen::Map<const Eigen::VectorXd>(t.data(), t.size());
}

void GradedDual::assign_flat(const Eigen::VectorXd& flat) {
  const int width = graded_dimension(n, order);
  require(flat.size() == m * width, "stress unflatten: size mismatch");
  for (int a = 0; a < m; ++a) values.row(a) = flat.segment(a * width, width).transpose();
}

VariationalStress VariationalStress::unflatten(int n, int m, int k, const Eigen::VectorXd& flat) {
  VariationalStress s(n, m, k);
  s.assign_flat(flat);
  return s;
}

BodyForce BodyForce::unflatten(int n, int m, int k, const Eigen::VectorXd& flat) {
  BodyForce b(n, m, k);
  b.assign_flat(flat);
  return b;
}

// --- TractionStress --------------------------------------------------------

TractionStress::TractionStress(int n_, int m_, int k_) : n(n_), m(m_), k(k_) {
  require(k >= 1, "traction stresses need k >= 1");
  values.assign(static_cast<std::size_t>(m), Eigen::MatrixXd::Zero(graded_dimension(n, k - 1), n));
}

double TractionStress::operator()(int alpha, const MultiIndex& head, int i) const {
  return values[static_cast<std::size_t>(alpha)](graded_rank(head), i);
}

double& TractionStress::operator()(int alpha, const MultiIndex& head, int i) {
  return values[static_cast<std::size_t>(alpha)](graded_rank(head), i);
}

AlmostSymArray TractionStress::block(int alpha, int r) const {
  return AlmostSymArray(n, r + 1,
                        values[static_cast<std::size_t>(alpha)].middleRows(graded_dimension(n, r - 1),
                                                                            symmetric_dimension(n, r)));
}

void TractionStress::set_block(int alpha, const AlmostSymArray& block) {
  require(block.n == n && block.l >= 1 && block.l <= k, "set_block: shape mismatch");
  const int r = block.l - 1;
  values[static_cast<std::size_t>(alpha)].middleRows(graded_dimension(n, r - 1), symmetric_dimension(n, r)) =
      block.values;
}

Eigen::VectorXd TractionStress::flatten() const {
  const int width = graded_dimension(n, k - 1);
  Eigen::VectorXd flat(components());
  Eigen::Index pos = 0;
  for (int a = 0; a < m; ++a) {
    for (int r = 0; r < width; ++r) {
      flat.segment(pos, n) = values[static_cast<std::size_t>(a)].row(r).transpose();
      pos += n;
    }
  }
  return flat;
}

TractionStress TractionStress::unflatten(int n, int m, int k, const Eigen::VectorXd& flat) {
  TractionStress t(n, m, k);
  require(flat.size() == t.components(), "TractionStress::unflatten: size mismatch");
  const int width = graded_dimension(n, k - 1);
  Eigen::Index pos = 0;
  for (int a = 0; a < m; ++a) {
    for (int r = 0; r < width; ++r) {
      t.values[static_cast<std::size_t>(a)].row(r) = flat.segment(pos, n).transpose();
      pos += n;
    }
  }
  return t;
}

// --- NonHolStress ----------------------------------------------------------

NonHolStress::NonHolStress(int n_, int m_, int k_)
    : n(n_), m(m_), k(k_), p(n_, m_, k_), pbar(n_, m_, k_) {}

Eigen::VectorXd NonHolStress::flatten() const {
  Eigen::VectorXd flat(components());
  flat << p.flatten(), pbar.flatten();
  return flat;
}

NonHolStress NonHolStress::unflatten(int n, int m, int k, const Eigen::VectorXd& flat) {
  NonHolStress s(n, m, k);
  require(flat.size() == s.components(), "NonHolStress::unflatten: size mismatch");
  const auto head = s.p.components();
  s.p.assign_flat(flat.head(head));
  s.pbar = TractionStress::unflatten(n, m, k, flat.tail(flat.size() - head));
  return s;
}

// --- fields ----------------------------------------------------------------

VarStressField::VarStressField(int n_, int m_, int k_, SmoothMap map_)
    : n(n_), m(m_), k(k_), map(std::move(map_)) {
  require(map.inputs() == n && map.outputs() == m * graded_dimension(n, k),
          "VarStressField: map shape does not match (n, m, k)");
}

VariationalStress VarStressField::at(const Eigen::VectorXd& x) const {
  return VariationalStress::unflatten(n, m, k, field_values(map, x));
}

BodyForceField::BodyForceField(int n_, int m_, int k_, SmoothMap map_)
    : n(n_), m(m_), k(k_), map(std::move(map_)) {
  require(map.inputs() == n && map.outputs() == m * graded_dimension(n, k - 1),
          "BodyForceField: map shape does not match (n, m, k)");
}

BodyForce BodyForceField::at(const Eigen::VectorXd& x) const {
  return BodyForce::unflatten(n, m, k, field_values(map, x));
}

TractionField::TractionField(int n_, int m_, int k_, SmoothMap map_)
    : n(n_), m(m_), k(k_), map(std::move(map_)) {
  require(map.inputs() == n && map.outputs() == TractionStress(n, m, k).components(),
          "TractionField: map shape does not match (n, m, k)");
}

TractionStress TractionField::at(const Eigen::VectorXd& x) const {
  return TractionStress::unflatten(n, m, k, field_values(map, x));
}

NonHolStressField::NonHolStressField(int n_, int m_, int k_, SmoothMap map_)
    : n(n_), m(m_), k(k_), map(std::move(map_)) {
  require(map.inputs() == n && map.outputs() == NonHolStress(n, m, k).components(),
          "NonHolStressField: map shape does not match (n, m, k)");
}

NonHolStress NonHolStressField::at(const Eigen::VectorXd& x) const {
  return NonHolStress::unflatten(n, m, k, field_values(map, x));
}

// --- pairings --------------------------------------------------------------

double var_pair(const VariationalStress& s, const JetPoint& u) {
  require(s.n == u.n && s.m == u.m && s.order == u.order, "var_pair: shape mismatch");
  return static_cast<double>(accumulate_product(s.values, u.values));
}

double body_pair(const BodyForce& b, const JetPoint& v) {
  require(b.n == v.n && b.m == v.m && v.order >= b.order, "body_pair: shape mismatch");
  return static_cast<double>(accumulate_product(b.values, v.values.leftCols(b.values.cols())));
}

Eigen::VectorXd traction_action(const TractionStress& tau, const JetPoint& v) {
  require(tau.n == v.n && tau.m == v.m && v.order >= tau.k - 1, "traction_action: shape mismatch");
  const int width = graded_dimension(tau.n, tau.k - 1);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(tau.n);
  for (int a = 0; a < tau.m; ++a) {
    c += tau.values[static_cast<std::size_t>(a)].transpose() * v.values.row(a).head(width).transpose();
  }
  return c;
}

namespace {
// det[e_i, frame] for each i: the contraction d_i _| dx evaluated on the frame.
Eigen::VectorXd contraction_weights(const Eigen::MatrixXd& frame) {
  const auto n = frame.rows();
  require(frame.cols() == n - 1, "frame must hold n - 1 tangent vectors");
  if (n > 1) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(frame);
    if (lu.rank() < n - 1) throw std::domain_error("degenerate (rank-deficient) tangent frame");
  }
  Eigen::VectorXd w(n);
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m.setZero();
    m(i, 0) = 1.0;
    if (n > 1) m.rightCols(n - 1) = frame;
    w(i) = m.determinant();
  }
  return w;
}
}  // namespace

double evaluate_on_frame(const Eigen::VectorXd& form, const Eigen::MatrixXd& frame) {
  require(form.size() == frame.rows(), "evaluate_on_frame: dimension mismatch");
  return form.dot(contraction_weights(frame));
}

HyperTraction hyper_traction(const TractionStress& tau, const Eigen::MatrixXd& frame) {
  require(frame.rows() == tau.n, "hyper_traction: dimension mismatch");
  const Eigen::VectorXd w = contraction_weights(frame);
  HyperTraction t(tau.n, tau.m, tau.k);
  for (int a = 0; a < tau.m; ++a) t.values.row(a) = (tau.values[static_cast<std::size_t>(a)] * w).transpose();
  return t;
}

double nh_pair(const NonHolStress& p, const NonHolJetPoint& q) {
  require(p.n == q.n && p.m == q.m && p.k == q.k, "nh_pair: shape mismatch");
  long double total = accumulate_product(p.p.values, q.lambda);
  for (int a = 0; a < p.m; ++a) {
    total += accumulate_product(p.pbar.values[static_cast<std::size_t>(a)], q.mu[static_cast<std::size_t>(a)]);
  }
  return static_cast<double>(total);
}

// --- operators -------------------------------------------------------------

namespace {

// Index of tau_alpha^{J;i} in the flattened traction layout.
int traction_slot(int n, int width, int alpha, int rank, int i) {
  return (alpha * width + rank) * n + i;
}

// Series-level exterior jet of traction components, `tau` expanded to order + 1.
std::vector<Series> exterior_jet_series(std::span<const Series> tau, int n, int m, int k, int order) {
  const int width = graded_dimension(n, k - 1);
  std::vector<Series> out;
  out.reserve(static_cast<std::size_t>(m * width * (1 + n)));
  for (int a = 0; a < m; ++a) {
    for (int r = 0; r < width; ++r) {
      auto acc = Series::zero(n, order);
      for (int j = 0; j < n; ++j) {
        acc += tau[static_cast<std::size_t>(traction_slot(n, width, a, r, j))].derivative(j).truncated(order);
      }
      out.push_back(std::move(acc));
    }
  }
  for (const auto& s : tau) out.push_back(s.truncated(order));
  return out;
}

Eigen::MatrixXd matrix_of(int inputs, const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f) {
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(inputs);
  Eigen::MatrixXd out;
  for (int c = 0; c < inputs; ++c) {
    unit(c) = 1.0;
    const Eigen::VectorXd col = f(unit);
    if (c == 0) out.resize(col.size(), inputs);
    out.col(c) = col;
    unit(c) = 0.0;
  }
  return out;
}

}  // namespace

NonHolStressField exterior_jet(const TractionField& tau) {
  const int n = tau.n, m = tau.m, k = tau.k;
  const int outputs = NonHolStress(n, m, k).components();
  return NonHolStressField(n, m, k,
                           differential_map(tau.map, outputs, 1,
                                            [n, m, k](std::span<const Series> expanded, int order) {
                                              return exterior_jet_series(expanded, n, m, k, order);
                                            }));
}

TractionStress p_tau(const NonHolStress& p) { return p.pbar; }

TractionField p_tau(const NonHolStressField& p) {
  const int head = BodyForce(p.n, p.m, p.k).components();
  const int tail = TractionStress(p.n, p.m, p.k).components();
  const SmoothMap base = p.map;
  return TractionField(p.n, p.m, p.k, SmoothMap(p.n, tail, [base, head](std::span<const Series> in) {
                         auto all = base(in);
                         return std::vector<Series>(all.begin() + head, all.end());
                       }));
}

NonHolStressField divergence_full(const NonHolStressField& p) {
  const auto dp = exterior_jet(p_tau(p));
  const SmoothMap a = dp.map;
  const SmoothMap b = p.map;
  return NonHolStressField(p.n, p.m, p.k, SmoothMap(p.n, b.outputs(), [a, b](std::span<const Series> in) {
                             auto left = a(in);
                             const auto right = b(in);
                             for (std::size_t i = 0; i < left.size(); ++i) left[i] -= right[i];
                             return left;
                           }));
}

BodyForceField divergence(const NonHolStressField& p, double slot_tol) {
  const auto full = divergence_full(p).map;
  const SmoothMap data = p.map;
  const int head = BodyForce(p.n, p.m, p.k).components();
  return BodyForceField(p.n, p.m, p.k,
                        SmoothMap(p.n, head, [full, data, head, slot_tol](std::span<const Series> in) {
                          auto all = full(in);
                          double scale = 1.0;
                          for (const auto& s : data(in)) scale = std::max(scale, s.coeffs().cwiseAbs().maxCoeff());
                          for (std::size_t i = static_cast<std::size_t>(head); i < all.size(); ++i) {
                            if (all[i].coeffs().cwiseAbs().maxCoeff() > slot_tol * scale) {
                              throw std::logic_error("divergence: P-bar slot of d(p_tau P) - P is not zero");
                            }
                          }
                          all.resize(static_cast<std::size_t>(head));
                          return all;
                        }));
}

NonHolStressField induced_nhs(const BodyForceField& b, const TractionField& tau) {
  require(b.n == tau.n && b.m == tau.m && b.k == tau.k, "induced_nhs: shape mismatch");
  const SmoothMap dtau = exterior_jet(tau).map;
  const SmoothMap force = b.map;
  return NonHolStressField(tau.n, tau.m, tau.k,
                           SmoothMap(tau.n, dtau.outputs(), [dtau, force](std::span<const Series> in) {
                             auto out = dtau(in);
                             const auto bv = force(in);
                             for (std::size_t i = 0; i < bv.size(); ++i) out[i] += bv[i];
                             return out;
                           }));
}

VariationalStress restrict_to_holonomic(const NonHolStress& p, const CollapseFn& collapse) {
  const CollapseFn& c = collapse ? collapse : CollapseFn(collapse_last);
  VariationalStress s(p.n, p.m, p.k);
  for (int a = 0; a < p.m; ++a) {
    s.values.row(a).head(p.p.values.cols()) = p.p.values.row(a);
    for (int deg = 1; deg <= p.k; ++deg) {
      const SymArray collapsed = c(p.pbar.block(a, deg - 1));
      s.values.row(a).segment(graded_dimension(p.n, deg - 1), symmetric_dimension(p.n, deg)) +=
          collapsed.values.transpose();
    }
  }
  return s;
}

VarStressField restrict_to_holonomic(const NonHolStressField& p, const CollapseFn& collapse) {
  const int n = p.n, m = p.m, k = p.k;
  const Eigen::MatrixXd matrix =
      matrix_of(NonHolStress(n, m, k).components(), [&](const Eigen::VectorXd& flat) {
        return restrict_to_holonomic(NonHolStress::unflatten(n, m, k, flat), collapse).flatten();
      });
  return VarStressField(n, m, k, linear_image(p.map, matrix));
}

VarStressField reduced_exterior_jet(const TractionField& tau) {
  return restrict_to_holonomic(exterior_jet(tau));
}

VarStressField var_stress_from_force_system(const BodyForceField& b, const TractionField& tau) {
  return restrict_to_holonomic(induced_nhs(b, tau));
}

NonHolStress kernel_element(int n, int m, int k) {
  require(n >= 2 && k >= 2, "kernel_element: needs n >= 2 and k >= 2");
  NonHolStress p(n, m, k);
  MultiIndex j0(n);
  for (int r = 0; r < k - 2; ++r) j0 = append(j0, 0);
  p.pbar(0, append(j0, 0), 1) = 1.0;
  p.pbar(0, append(j0, 1), 0) = -1.0;
  return p;
}

NonHolStress lift_variational(const VariationalStress& s) {
  const int k = s.k();
  require(k >= 1, "lift_variational: needs k >= 1");
  NonHolStress p(s.n, s.m, k);
  for (int a = 0; a < s.m; ++a) {
    p.p.values.row(a) = s.values.row(a).head(p.p.values.cols());
    p.pbar.set_block(a, spread_last(s.block(a, k)));
  }
  return p;
}

// --- constitutive ----------------------------------------------------------

namespace {
Eigen::VectorXd gradient(const SmoothMap& phi, const Eigen::VectorXd& at) {
  require(phi.outputs() == 1, "potential must be scalar");
  require(phi.inputs() == at.size(), "potential arity does not match the jet components");
  const auto expanded = phi.expand(at, 1);
  return expanded.front().coeffs().tail(at.size());
}
}  // namespace

VariationalStress constitutive_var(const SmoothMap& phi, const JetPoint& u) {
  return VariationalStress::unflatten(u.n, u.m, u.order, gradient(phi, u.flatten()));
}

NonHolStress constitutive_nhs(const SmoothMap& phi, const NonHolJetPoint& q) {
  return NonHolStress::unflatten(q.n, q.m, q.k, gradient(phi, q.flatten()));
}

}  // namespace jetstress
