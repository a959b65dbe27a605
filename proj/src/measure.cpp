#include "jetstress/measure.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <cmath>
#include <future>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace jetstress {

// --- regions ---------------------------------------------------------------

Region Region::box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
  if (lo.size() != hi.size() || lo.size() < 1) throw std::invalid_argument("Region::box: bad corners");
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (!(hi(i) > lo(i))) throw std::invalid_argument("Region::box: degenerate extent");
  }
  Region r;
  r.shape = Shape::box;
  r.lo = std::move(lo);
  r.hi = std::move(hi);
  return r;
}

Region Region::unit_box(int n) { return box(Eigen::VectorXd::Zero(n), Eigen::VectorXd::Ones(n)); }

Region Region::simplex(std::vector<Eigen::VectorXd> vertices) {
  if (vertices.size() < 2) throw std::invalid_argument("Region::simplex: needs n + 1 vertices");
  const auto n = vertices.front().size();
  if (static_cast<Eigen::Index>(vertices.size()) != n + 1) {
    throw std::invalid_argument("Region::simplex: needs n + 1 vertices");
  }
  Region r;
  r.shape = Shape::simplex;
  r.vertices = std::move(vertices);
  if (std::abs(r.frame().determinant()) < 1e-14) throw std::invalid_argument("Region::simplex: degenerate");
  return r;
}

Region Region::unit_simplex(int n) {
  std::vector<Eigen::VectorXd> v{Eigen::VectorXd::Zero(n)};
  for (int i = 0; i < n; ++i) v.push_back(Eigen::VectorXd::Unit(n, i));
  return simplex(std::move(v));
}

int Region::dimension() const {
  return static_cast<int>(shape == Shape::box ? lo.size() : vertices.front().size());
}

Eigen::VectorXd Region::origin() const { return shape == Shape::box ? lo : vertices.front(); }

Eigen::MatrixXd Region::frame() const {
  if (shape == Shape::box) return (hi - lo).asDiagonal();
  const int n = dimension();
  Eigen::MatrixXd f(n, n);
  for (int j = 0; j < n; ++j) f.col(j) = vertices[static_cast<std::size_t>(j + 1)] - vertices.front();
  return f;
}

double Region::volume() const {
  double v = std::abs(frame().determinant());
  if (shape == Shape::simplex) {
    for (int i = 2; i <= dimension(); ++i) v /= i;
  }
  return v;
}

namespace {
int orientation_sign(const Eigen::VectorXd& outward, const Eigen::MatrixXd& frame) {
  const auto n = outward.size();
  Eigen::MatrixXd m(n, n);
  m.col(0) = outward;
  if (n > 1) m.rightCols(n - 1) = frame;
  const double d = m.determinant();
  if (d == 0.0) throw std::domain_error("degenerate boundary face");
  return d > 0 ? 1 : -1;
}
}  // namespace

std::vector<Face> Region::faces() const {
  const int n = dimension();
  std::vector<Face> out;
  if (shape == Shape::box) {
    for (int a = 0; a < n; ++a) {
      Eigen::MatrixXd frame(n, n - 1);
      int col = 0;
      for (int b = 0; b < n; ++b) {
        if (b == a) continue;
        frame.col(col++) = (hi(b) - lo(b)) * Eigen::VectorXd::Unit(n, b);
      }
      for (int side = 0; side < 2; ++side) {
        Face f;
        f.shape = Shape::box;
        f.origin = lo;
        f.origin(a) = side == 0 ? lo(a) : hi(a);
        f.frame = frame;
        const Eigen::VectorXd outward = (side == 0 ? -1.0 : 1.0) * Eigen::VectorXd::Unit(n, a);
        f.sign = orientation * orientation_sign(outward, frame);
        out.push_back(std::move(f));
      }
    }
  } else {
    for (int i = 0; i <= n; ++i) {
      std::vector<Eigen::VectorXd> others;
      for (int j = 0; j <= n; ++j) {
        if (j != i) others.push_back(vertices[static_cast<std::size_t>(j)]);
      }
      Face f;
      f.shape = Shape::simplex;
      f.origin = others.front();
      f.frame.resize(n, n - 1);
      for (int c = 0; c < n - 1; ++c) f.frame.col(c) = others[static_cast<std::size_t>(c + 1)] - f.origin;
      f.sign = orientation * orientation_sign(f.origin - vertices[static_cast<std::size_t>(i)], f.frame);
      out.push_back(std::move(f));
    }
  }
  return out;
}

// --- quadrature ------------------------------------------------------------

QuadratureRule gauss_legendre(int points) {
  if (points < 1) throw std::invalid_argument("gauss_legendre: needs at least one point");
  // P_N(x) and P_N'(x) by the three-term recurrence.
  const auto legendre = [points](double x) {
    double p0 = 1.0, p1 = x;
    for (int r = 2; r <= points; ++r) {
      const double p2 = ((2.0 * r - 1.0) * x * p1 - (r - 1.0) * p0) / r;
      p0 = p1;
      p1 = p2;
    }
    return std::pair{p1, points * (x * p1 - p0) / (x * x - 1.0)};
  };
  QuadratureRule rule;
  rule.nodes.resize(1, points);
  rule.weights.resize(points);
  rule.order = 2 * points - 1;
  for (int i = 0; i < points; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (points + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(x);
      const double step = p / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const double dp = legendre(x).second;
    rule.nodes(0, i) = 0.5 * (1.0 - x);
    rule.weights(i) = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

QuadratureRule reference_rule(Shape shape, int dimension, int order) {
  if (order < 0) order = 0;
  QuadratureRule rule;
  rule.order = order;
  if (dimension == 0) {
    rule.nodes.resize(0, 1);
    rule.weights = Eigen::VectorXd::Ones(1);
    return rule;
  }
  // The collapsed map adds up to dimension - 1 to the degree in each variable.
  const int extra = shape == Shape::simplex ? dimension - 1 : 0;
  const auto line = gauss_legendre((order + extra) / 2 + 1);
  const auto q = line.weights.size();
  Eigen::Index total = 1;
  for (int d = 0; d < dimension; ++d) total *= q;
  rule.nodes.resize(dimension, total);
  rule.weights.resize(total);
  std::vector<Eigen::Index> digit(static_cast<std::size_t>(dimension), 0);
  for (Eigen::Index p = 0; p < total; ++p) {
    Eigen::Index rest = p;
    for (int d = dimension - 1; d >= 0; --d) {
      digit[static_cast<std::size_t>(d)] = rest % q;
      rest /= q;
    }
    double weight = 1.0;
    if (shape == Shape::box) {
      for (int d = 0; d < dimension; ++d) {
        rule.nodes(d, p) = line.nodes(0, digit[static_cast<std::size_t>(d)]);
        weight *= line.weights(digit[static_cast<std::size_t>(d)]);
      }
    } else {
      // u_d = t_d prod_{e<d} (1 - t_e); the Jacobian is prod_d of that product.
      double remaining = 1.0;
      for (int d = 0; d < dimension; ++d) {
        const double t = line.nodes(0, digit[static_cast<std::size_t>(d)]);
        rule.nodes(d, p) = remaining * t;
        weight *= line.weights(digit[static_cast<std::size_t>(d)]) * remaining;
        remaining *= 1.0 - t;
      }
    }
    rule.weights(p) = weight;
  }
  return rule;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const auto half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace {

// Evaluates f at indices [0, count) on a few threads; results in index order.
std::vector<double> parallel_evaluate(Eigen::Index count, const std::function<double(Eigen::Index)>& f) {
  std::vector<double> out(static_cast<std::size_t>(count));
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const auto workers = static_cast<Eigen::Index>(std::min<unsigned>(hw, 8));
  if (count < 32 || workers == 1) {
    for (Eigen::Index i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = f(i);
    return out;
  }
  std::vector<std::future<void>> jobs;
  const Eigen::Index chunk = (count + workers - 1) / workers;
  for (Eigen::Index start = 0; start < count; start += chunk) {
    const Eigen::Index stop = std::min(count, start + chunk);
    jobs.push_back(std::async(std::launch::async, [&, start, stop] {
      for (Eigen::Index i = start; i < stop; ++i) out[static_cast<std::size_t>(i)] = f(i);
    }));
  }
  for (auto& j : jobs) j.get();
  return out;
}

Eigen::VectorXd contraction_vector(const Eigen::MatrixXd& frame) {
  const auto n = frame.rows();
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = evaluate_on_frame(Eigen::VectorXd::Unit(n, i), frame);
  return w;
}

}  // namespace

double integrate_n_form(const Density& density, const Region& region, int order) {
  const int n = region.dimension();
  const auto rule = reference_rule(region.shape, n, order);
  const Eigen::VectorXd origin = region.origin();
  const Eigen::MatrixXd frame = region.frame();
  const double jac = std::abs(frame.determinant());
  const auto values = parallel_evaluate(rule.weights.size(), [&](Eigen::Index p) {
    return rule.weights(p) * density(origin + frame * rule.nodes.col(p));
  });
  return region.orientation * jac * pairwise_sum(values);
}

double integrate_boundary_form(const FormCoefficients& c, const Region& region, int order) {
  const int n = region.dimension();
  std::vector<double> per_face;
  for (const auto& face : region.faces()) {
    const auto rule = reference_rule(face.shape, n - 1, order);
    const Eigen::VectorXd w = contraction_vector(face.frame);
    const auto values = parallel_evaluate(rule.weights.size(), [&](Eigen::Index p) {
      const Eigen::VectorXd z = face.point(rule.nodes.col(p));
      return rule.weights(p) * c(z).dot(w);
    });
    per_face.push_back(face.sign * pairwise_sum(values));
  }
  return pairwise_sum(per_face);
}

bool orientation_self_test() {
  const auto region = Region::box(Eigen::VectorXd::Constant(1, 0.25), Eigen::VectorXd::Constant(1, 1.5));
  const auto f = [](double x) { return x * x * x - x; };
  const double boundary = integrate_boundary_form(
      [&](const Eigen::VectorXd& x) { return Eigen::VectorXd::Constant(1, f(x(0))); }, region, 3);
  const double interior =
      integrate_n_form([](const Eigen::VectorXd& x) { return 3.0 * x(0) * x(0) - 1.0; }, region, 2);
  const double expected = f(1.5) - f(0.25);
  return std::abs(boundary - expected) < 1e-12 && std::abs(interior - expected) < 1e-12;
}

double cauchy_pullback(const TractionField& tau, const Face& face, const Eigen::VectorXd& z,
                       const JetPoint& v) {
  const auto n = face.origin.size();
  if (n > 1) {
    const Eigen::VectorXd u = face.frame.colPivHouseholderQr().solve(z - face.origin);
    if ((face.point(u) - z).norm() > 1e-9 * (1.0 + z.norm())) {
      throw std::invalid_argument("cauchy_pullback: point is not on the face");
    }
  } else if ((z - face.origin).norm() > 1e-12) {
    throw std::invalid_argument("cauchy_pullback: point is not on the face");
  }
  return face.sign * evaluate_on_frame(traction_action(tau.at(z), v), face.frame);
}

double stokes_residual(const TractionField& tau, const SmoothMap& lambda, const Region& region, int order) {
  const int n = tau.n, m = tau.m, k = tau.k;
  const auto dtau = exterior_jet(tau);
  const double boundary = integrate_boundary_form(
      [&](const Eigen::VectorXd& x) {
        return traction_action(tau.at(x), JetPoint::unflatten(n, m, k - 1, lambda.value(x)));
      },
      region, order);
  const double interior = integrate_n_form(
      [&](const Eigen::VectorXd& x) { return nh_pair(dtau.at(x), prolong_section_of_jets(lambda, m, k, x)); },
      region, order);
  return std::abs(boundary - interior);
}

double force_functional(const BodyForceField& b, const TractionField& tau, const Region& region,
                        const SmoothMap& w, int order) {
  const int k = tau.k;
  const double body =
      integrate_n_form([&](const Eigen::VectorXd& x) { return body_pair(b.at(x), prolong(w, x, k - 1)); }, region,
                       order);
  const double boundary = integrate_boundary_form(
      [&](const Eigen::VectorXd& x) { return traction_action(tau.at(x), prolong(w, x, k - 1)); }, region, order);
  return body + boundary;
}

double nhs_functional(const NonHolStressField& p, const Region& region, const SmoothMap& w, int order) {
  return integrate_n_form(
      [&](const Eigen::VectorXd& x) { return nh_pair(p.at(x), include_holonomic(prolong(w, x, p.k))); }, region,
      order);
}

double var_functional(const VarStressField& s, const Region& region, const SmoothMap& w, int order) {
  return integrate_n_form([&](const Eigen::VectorXd& x) { return var_pair(s.at(x), prolong(w, x, s.k)); }, region,
                          order);
}

}  // namespace jetstress
