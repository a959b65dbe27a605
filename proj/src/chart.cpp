#include "jetstress/chart.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jetstress {

bool Box::contains(const Eigen::VectorXd& x, double slack) const {
  if (x.size() != lo.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) < lo(i) - slack || x(i) > hi(i) + slack) return false;
  }
  return true;
}

ChartMap::ChartMap(SmoothMap forward, SmoothMap inverse, Box box)
    : forward_(std::move(forward)), inverse_(std::move(inverse)), box_(std::move(box)) {
  const int n = forward_.inputs();
  if (forward_.outputs() != n || inverse_.inputs() != n || inverse_.outputs() != n) {
    throw std::invalid_argument("ChartMap: forward and inverse must both map R^n to R^n");
  }
  if (box_.lo.size() != n || box_.hi.size() != n) throw std::invalid_argument("ChartMap: box dimension");
}

ChartMap ChartMap::identity(int n, Box box) {
  return ChartMap(SmoothMap::identity(n), SmoothMap::identity(n), std::move(box));
}

namespace {
std::vector<Expr> affine_expressions(const Eigen::MatrixXd& l, const Eigen::VectorXd& c) {
  std::vector<Expr> out;
  for (Eigen::Index r = 0; r < l.rows(); ++r) {
    std::vector<Expr> terms;
    for (Eigen::Index j = 0; j < l.cols(); ++j) {
      if (l(r, j) != 0.0) terms.push_back(Expr::constant(l(r, j)) * Expr::variable(static_cast<int>(j)));
    }
    if (c(r) != 0.0 || terms.empty()) terms.push_back(Expr::constant(c(r)));
    out.push_back(Expr::sum(std::move(terms)));
  }
  return out;
}
}  // namespace

ChartMap ChartMap::affine(const Eigen::MatrixXd& l, const Eigen::VectorXd& c, Box box) {
  const auto n = static_cast<int>(l.rows());
  Eigen::FullPivLU<Eigen::MatrixXd> lu(l);
  if (!lu.isInvertible()) throw std::domain_error("ChartMap::affine: singular matrix");
  const Eigen::MatrixXd li = lu.inverse();
  return ChartMap(SmoothMap::from_expressions(n, affine_expressions(l, c)),
                  SmoothMap::from_expressions(n, affine_expressions(li, -li * c)), std::move(box));
}

double ChartMap::jacobian_determinant(const Eigen::VectorXd& x) const {
  return forward_.jacobian(x).determinant();
}

double ChartMap::round_trip_residual(const std::vector<Eigen::VectorXd>& samples, int order) const {
  const int n = dimension();
  double worst = 0.0;
  auto compare = [&](const std::vector<Series>& got, const Eigen::VectorXd& at) {
    for (int i = 0; i < n; ++i) {
      const auto expected = Series::variable(n, order, i, at(i));
      worst = std::max(worst, (got[static_cast<std::size_t>(i)].coeffs() - expected.coeffs()).cwiseAbs().maxCoeff());
    }
  };
  for (const auto& x : samples) {
    const Eigen::VectorXd xp = to_target(x);
    compare(forward_(inverse_.expand(xp, order)), xp);
    compare(inverse_(forward_.expand(x, order)), x);
  }
  return worst;
}

void ChartMap::check_point(const Eigen::VectorXd& x) const {
  if (!box_.contains(x)) throw std::out_of_range("chart: point outside the validity box");
  if (std::abs(jacobian_determinant(x)) < 1e-14) throw std::domain_error("chart: singular Jacobian");
}

ChartMap ChartMap::inverted(Box target_box) const {
  return ChartMap(inverse_, forward_, std::move(target_box));
}

// --- BundleTransition ------------------------------------------------------

BundleTransition::BundleTransition(int m_, SmoothMap matrix_) : m(m_), matrix(std::move(matrix_)) {
  if (matrix.outputs() != m * m) throw std::invalid_argument("BundleTransition: needs m*m outputs");
}

BundleTransition BundleTransition::identity(int n, int m) {
  return constant(n, Eigen::MatrixXd::Identity(m, m));
}

BundleTransition BundleTransition::constant(int n, const Eigen::MatrixXd& a) {
  const auto m = static_cast<int>(a.rows());
  Eigen::VectorXd flat(m * m);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) flat(r * m + c) = a(r, c);
  }
  return BundleTransition(m, SmoothMap::constant(n, flat));
}

Eigen::MatrixXd BundleTransition::at(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd flat = matrix.value(x);
  Eigen::MatrixXd a(m, m);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) a(r, c) = flat(r * m + c);
  }
  return a;
}

namespace {

using SeriesMatrix = std::vector<Series>;  // row-major m x m

SeriesMatrix multiply(const SeriesMatrix& a, const SeriesMatrix& b, int m) {
  SeriesMatrix out;
  out.reserve(static_cast<std::size_t>(m * m));
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) {
      auto acc = a[static_cast<std::size_t>(r * m)] * b[static_cast<std::size_t>(c)];
      for (int j = 1; j < m; ++j) {
        acc += a[static_cast<std::size_t>(r * m + j)] * b[static_cast<std::size_t>(j * m + c)];
      }
      out.push_back(std::move(acc));
    }
  }
  return out;
}

// Inverse of a series matrix: M = M0 + N with N nilpotent, so
// M^{-1} = sum_r (-M0^{-1} N)^r M0^{-1}, finite at the truncation order.
SeriesMatrix invert(const SeriesMatrix& mat, int m) {
  const int vars = mat.front().variables();
  const int order = mat.front().order();
  Eigen::MatrixXd m0(m, m);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) m0(r, c) = mat[static_cast<std::size_t>(r * m + c)].value();
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m0);
  if (!lu.isInvertible()) throw std::domain_error("BundleTransition: singular fiber transition");
  const Eigen::MatrixXd m0i = lu.inverse();
  SeriesMatrix inv0, step;
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) inv0.push_back(Series::constant(vars, order, m0i(r, c)));
  }
  SeriesMatrix nil;
  for (const auto& s : mat) nil.push_back(s.displacement());
  step = multiply(inv0, nil, m);
  for (auto& s : step) s = -s;
  SeriesMatrix result = inv0;
  SeriesMatrix term = inv0;
  for (int r = 1; r <= order; ++r) {
    term = multiply(step, term, m);
    for (std::size_t i = 0; i < result.size(); ++i) result[i] += term[i];
  }
  return result;
}

}  // namespace

BundleTransition BundleTransition::inverse_through(const ChartMap& chart) const {
  const int mm = m;
  const SmoothMap a = matrix;
  const SmoothMap back = chart.inverse();
  return BundleTransition(m, SmoothMap(chart.dimension(), m * m, [a, back, mm](std::span<const Series> in) {
                            return invert(a(back(in)), mm);
                          }));
}

SmoothMap transform_section(const ChartMap& chart, const BundleTransition& a, const SmoothMap& w) {
  if (w.outputs() != a.m) throw std::invalid_argument("transform_section: fiber dimension mismatch");
  const SmoothMap back = chart.inverse();
  const SmoothMap mat = a.matrix;
  const int m = a.m;
  return SmoothMap(chart.dimension(), m, [back, mat, w, m](std::span<const Series> in) {
    const auto x = back(in);
    const auto values = w(x);
    const auto am = mat(x);
    std::vector<Series> out;
    for (int b = 0; b < m; ++b) {
      auto acc = am[static_cast<std::size_t>(b * m)] * values[0];
      for (int c = 1; c < m; ++c) acc += am[static_cast<std::size_t>(b * m + c)] * values[static_cast<std::size_t>(c)];
      out.push_back(std::move(acc));
    }
    return out;
  });
}

// --- jet transitions -------------------------------------------------------

namespace {

// Ingredients of the jet transition at x: the source polynomial basis
// B_I = (X(x' + s) - x)^I / I! and A(X(x' + s)), as series in s.
struct JetBasis {
  int n = 0;
  int k = 0;
  std::vector<MultiIndex> indices;
  std::vector<Series> basis;
  std::vector<Series> a;
};

// Powers D^I / I! for every I of degree <= max_degree (graded order).
std::vector<Series> scaled_powers(const std::vector<Series>& d, int max_degree, int vars, int order) {
  const int n = static_cast<int>(d.size());
  const auto indices = enumerate_up_to(n, max_degree);
  std::vector<Series> out;
  out.reserve(indices.size());
  for (const auto& index : indices) {
    if (degree(index) == 0) {
      out.push_back(Series::constant(vars, order, 1.0));
      continue;
    }
    int j = 0;
    while (index[j] == 0) ++j;
    auto s = out[static_cast<std::size_t>(graded_rank(remove(index, j)))] * d[static_cast<std::size_t>(j)];
    s *= 1.0 / index[j];
    out.push_back(std::move(s));
  }
  return out;
}

JetBasis jet_basis(const ChartMap& chart, const BundleTransition& a, const Eigen::VectorXd& x, int k) {
  chart.check_point(x);
  const int n = chart.dimension();
  const Eigen::VectorXd xp = chart.to_target(x);
  std::vector<Series> s;
  for (int i = 0; i < n; ++i) s.push_back(Series::variable(n, k, i, xp(i)));
  const auto big_x = chart.inverse()(s);
  std::vector<Series> d;
  for (int i = 0; i < n; ++i) d.push_back(big_x[static_cast<std::size_t>(i)] - x(i));
  JetBasis jb;
  jb.n = n;
  jb.k = k;
  jb.indices = enumerate_up_to(n, k);
  jb.basis = scaled_powers(d, k, n, k);
  jb.a = a.matrix(big_x);
  return jb;
}

}  // namespace

JetPoint transform_jet(const ChartMap& chart, const BundleTransition& a, const JetPoint& u,
                       const Eigen::VectorXd& x) {
  if (u.m != a.m || u.n != chart.dimension()) throw std::invalid_argument("transform_jet: shape mismatch");
  const auto jb = jet_basis(chart, a, x, u.order);
  const int m = u.m;
  std::vector<Series> w;
  for (int al = 0; al < m; ++al) {
    auto acc = Series::zero(u.n, u.order);
    for (std::size_t r = 0; r < jb.basis.size(); ++r) {
      const double c = u.values(al, static_cast<Eigen::Index>(r));
      if (c != 0.0) acc += c * jb.basis[r];
    }
    w.push_back(std::move(acc));
  }
  JetPoint out(u.n, m, u.order);
  for (int b = 0; b < m; ++b) {
    auto acc = jb.a[static_cast<std::size_t>(b * m)] * w[0];
    for (int c = 1; c < m; ++c) acc += jb.a[static_cast<std::size_t>(b * m + c)] * w[static_cast<std::size_t>(c)];
    for (std::size_t r = 0; r < jb.indices.size(); ++r) {
      out.values(b, static_cast<Eigen::Index>(r)) = acc.partial(jb.indices[r]);
    }
  }
  return out;
}

Eigen::MatrixXd assemble_G(const ChartMap& chart, const BundleTransition& a, const Eigen::VectorXd& x,
                           int m, int k) {
  if (m != a.m) throw std::invalid_argument("assemble_G: fiber dimension mismatch");
  const auto jb = jet_basis(chart, a, x, k);
  const auto width = static_cast<int>(jb.indices.size());
  Eigen::MatrixXd g(m * width, m * width);
  for (int al = 0; al < m; ++al) {
    for (int c = 0; c < width; ++c) {
      for (int b = 0; b < m; ++b) {
        const auto f = jb.a[static_cast<std::size_t>(b * m + al)] * jb.basis[static_cast<std::size_t>(c)];
        for (int r = 0; r < width; ++r) {
          g(b * width + r, al * width + c) = f.partial(jb.indices[static_cast<std::size_t>(r)]);
        }
      }
    }
  }
  return g;
}

Eigen::MatrixXd assemble_H(const ChartMap& chart, const BundleTransition& a, const Eigen::VectorXd& x,
                           int m, int k) {
  if (m != a.m) throw std::invalid_argument("assemble_H: fiber dimension mismatch");
  if (k < 1) throw std::invalid_argument("assemble_H: needs k >= 1");
  chart.check_point(x);
  const int n = chart.dimension();
  const int vars = 2 * n;
  const Eigen::VectorXd xp = chart.to_target(x);
  // (s, r): y' = x' + s, z' = x' + s + r.
  std::vector<Series> yp, zp;
  for (int i = 0; i < n; ++i) {
    yp.push_back(Series::variable(vars, k, i, xp(i)));
    zp.push_back(Series::variable(vars, k, i, xp(i)) + Series::variable(vars, k, n + i, 0.0));
  }
  const auto y = chart.inverse()(yp);
  const auto z = chart.inverse()(zp);
  std::vector<Series> dy, dz;
  for (int i = 0; i < n; ++i) {
    dy.push_back(y[static_cast<std::size_t>(i)] - x(i));
    dz.push_back(z[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)]);
  }
  const auto q = scaled_powers(dz, k - 1, vars, k);
  const auto az = a.matrix(z);

  const auto heads = enumerate_up_to(n, k - 1);
  const auto width = static_cast<int>(heads.size());
  const int lambda_size = m * width;
  const int size = lambda_size * (1 + n);
  // Coefficient slots read back: r^{J'} and r^{J'} s_{j'}.
  std::vector<int> value_slot(static_cast<std::size_t>(width));
  std::vector<std::vector<int>> slope_slot(static_cast<std::size_t>(width), std::vector<int>(static_cast<std::size_t>(n)));
  std::vector<double> fact(static_cast<std::size_t>(width));
  for (int r = 0; r < width; ++r) {
    std::vector<int> counts(static_cast<std::size_t>(vars), 0);
    for (int i = 0; i < n; ++i) counts[static_cast<std::size_t>(n + i)] = heads[static_cast<std::size_t>(r)][i];
    value_slot[static_cast<std::size_t>(r)] = graded_rank(MultiIndex(counts));
    for (int j = 0; j < n; ++j) {
      auto c = counts;
      c[static_cast<std::size_t>(j)] += 1;
      slope_slot[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] = graded_rank(MultiIndex(c));
    }
    fact[static_cast<std::size_t>(r)] = static_cast<double>(factorial(heads[static_cast<std::size_t>(r)]));
  }

  Eigen::MatrixXd h(size, size);
  auto fill_column = [&](int column, int al, const Series& source) {
    for (int b = 0; b < m; ++b) {
      const auto f = az[static_cast<std::size_t>(b * m + al)] * source;
      for (int r = 0; r < width; ++r) {
        const double scale = fact[static_cast<std::size_t>(r)];
        h(b * width + r, column) = scale * f.coeffs()(value_slot[static_cast<std::size_t>(r)]);
        for (int j = 0; j < n; ++j) {
          h(lambda_size + (b * width + r) * n + j, column) =
              scale * f.coeffs()(slope_slot[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)]);
        }
      }
    }
  };
  for (int al = 0; al < m; ++al) {
    for (int c = 0; c < width; ++c) {
      const auto& qc = q[static_cast<std::size_t>(c)];
      fill_column(al * width + c, al, qc);
      for (int j = 0; j < n; ++j) {
        fill_column(lambda_size + (al * width + c) * n + j, al, qc * dy[static_cast<std::size_t>(j)]);
      }
    }
  }
  return h;
}

NonHolJetPoint transform_nonholonomic(const ChartMap& chart, const BundleTransition& a,
                                      const NonHolJetPoint& p, const Eigen::VectorXd& x) {
  const Eigen::MatrixXd h = assemble_H(chart, a, x, p.m, p.k);
  return NonHolJetPoint::unflatten(p.n, p.m, p.k, h * p.flatten());
}

VariationalStress pushforward_var_stress(const ChartMap& chart, const BundleTransition& a,
                                         const VariationalStress& s_target, const Eigen::VectorXd& x) {
  const Eigen::MatrixXd g = assemble_G(chart, a, x, s_target.m, s_target.k());
  const double jac = chart.jacobian_determinant(x);
  return VariationalStress::unflatten(s_target.n, s_target.m, s_target.k(),
                                      jac * (g.transpose() * s_target.flatten()));
}

BodyForce pushforward_body_force(const ChartMap& chart, const BundleTransition& a,
                                 const BodyForce& b_target, const Eigen::VectorXd& x) {
  const Eigen::MatrixXd g = assemble_G(chart, a, x, b_target.m, b_target.order);
  const double jac = chart.jacobian_determinant(x);
  return BodyForce::unflatten(b_target.n, b_target.m, b_target.k(), jac * (g.transpose() * b_target.flatten()));
}

TractionStress pushforward_traction_stress(const ChartMap& chart, const BundleTransition& a,
                                           const TractionStress& tau_target, const Eigen::VectorXd& x) {
  const int n = tau_target.n, m = tau_target.m, k = tau_target.k;
  const Eigen::MatrixXd g = assemble_G(chart, a, x, m, k - 1);
  const double jac = chart.jacobian_determinant(x);
  const Eigen::MatrixXd dx_dxp = chart.inverse().jacobian(chart.to_target(x));
  const int width = graded_dimension(n, k - 1);
  // Column i' holds tau'^{(alpha, J); i'} flattened over (alpha, J).
  Eigen::MatrixXd primed(m * width, n);
  for (int al = 0; al < m; ++al) primed.middleRows(al * width, width) = tau_target.values[static_cast<std::size_t>(al)];
  const Eigen::MatrixXd pulled = jac * (g.transpose() * primed) * dx_dxp.transpose();
  TractionStress tau(n, m, k);
  for (int al = 0; al < m; ++al) tau.values[static_cast<std::size_t>(al)] = pulled.middleRows(al * width, width);
  return tau;
}

NonHolStress pushforward_nhs(const ChartMap& chart, const BundleTransition& a,
                             const NonHolStress& p_target, const Eigen::VectorXd& x) {
  const Eigen::MatrixXd h = assemble_H(chart, a, x, p_target.m, p_target.k);
  const double jac = chart.jacobian_determinant(x);
  return NonHolStress::unflatten(p_target.n, p_target.m, p_target.k, jac * (h.transpose() * p_target.flatten()));
}

}  // namespace jetstress
