#include "jetstress/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <Eigen/Core>

namespace jetstress {

namespace {

constexpr const char* kLibraryVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Small helpers.

struct MaxAbs {
  double value = 0.0;
  void operator()(double r) {
    if (std::isnan(r)) {
      value = std::numeric_limits<double>::infinity();
    } else {
      value = std::max(value, std::abs(r));
    }
  }
  void operator()(const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) (*this)(v(i));
  }
};

// Smallest value seen, for lower-bound checks.
struct MinAbs {
  double value = std::numeric_limits<double>::infinity();
  void operator()(double r) {
    if (std::isnan(r)) r = 0.0;
    value = std::min(value, std::abs(r));
  }
};

std::string scale_note(double residual, double scale) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "max |value| %.3g, relative %.2g", scale,
                scale > 0 ? residual / scale : 0.0);
  return buf;
}

double max_abs(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

std::string shape_tag(int n, int k) { return " [n=" + std::to_string(n) + " k=" + std::to_string(k) + "]"; }

Rng suite_rng(std::uint64_t seed, const std::string& suite) {
  std::uint32_t h = 2166136261u;
  for (unsigned char ch : suite) h = (h ^ ch) * 16777619u;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), h};
  return Rng(seq);
}

Eigen::VectorXd unit_point(int n, Rng& rng) {
  return random_point(Eigen::VectorXd::Zero(n), Eigen::VectorXd::Ones(n), rng);
}

Eigen::VectorXd uniform_vector(Eigen::Index size, Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Eigen::VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) v(i) = dist(rng);
  return v;
}

SmoothMap offset_map(const SmoothMap& map, const Eigen::VectorXd& shift) {
  return SmoothMap(map.inputs(), map.outputs(), [map, shift](std::span<const Series> in) {
    auto out = map(in);
    for (std::size_t i = 0; i < out.size(); ++i) out[i].coeffs()(0) += shift(static_cast<Eigen::Index>(i));
    return out;
  });
}

SmoothMap negated(const SmoothMap& map) {
  return linear_image(map, -Eigen::MatrixXd::Identity(map.outputs(), map.outputs()));
}

// dx coefficient of d(tau . lambda) = sum_i (tau^{J;i} lambda_J)_{,i}, by the
// product rule on first-order expansions.
double exterior_derivative_coefficient(const TractionField& tau, const SmoothMap& lambda, const Eigen::VectorXd& x) {
  const int n = tau.n, m = tau.m, width = graded_dimension(n, tau.k - 1);
  const auto te = tau.map.expand(x, 1);
  const auto le = lambda.expand(x, 1);
  long double total = 0.0L;
  for (int a = 0; a < m; ++a) {
    for (int r = 0; r < width; ++r) {
      const auto& l = le[static_cast<std::size_t>(a * width + r)].coeffs();
      for (int i = 0; i < n; ++i) {
        const auto& t = te[static_cast<std::size_t>((a * width + r) * n + i)].coeffs();
        total += static_cast<long double>(t(1 + i)) * l(0) + static_cast<long double>(t(0)) * l(1 + i);
      }
    }
  }
  return static_cast<double>(total);
}

// Full-array value of a dual traction component: tau^{J;l} / (|J|!/J!).
double full_traction(const TractionStress& tau, int alpha, const MultiIndex& head, int l) {
  return tau(alpha, head, l) / static_cast<double>(multiplicity(head));
}

// Largest spread of the full array over the reorderings of each (J, l) in the
// |J| = r block: zero iff the block is symmetric in all r + 1 slots.
double block_asymmetry(const TractionStress& tau, int alpha, int r) {
  double worst = 0.0;
  for (const auto& whole : enumerate(tau.n, r + 1)) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int j = 0; j < tau.n; ++j) {
      if (whole[j] == 0) continue;
      const double v = full_traction(tau, alpha, remove(whole, j), j);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    worst = std::max(worst, hi - lo);
  }
  return worst;
}

Box unit_box_of(int n) { return Box{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Ones(n)}; }

// ---------------------------------------------------------------------------
// Suite context.

struct Ctx {
  const VerifyConfig& cfg;
  std::string suite;
  Rng rng;
  CollapseFn collapse;
  std::vector<Check> out;

  Ctx(const VerifyConfig& c, std::string name)
      : cfg(c), suite(std::move(name)), rng(suite_rng(c.seed, suite)), collapse(collapse_for(c)) {}

  void add(std::string name, std::string identity, double residual, double tolerance, bool lower = false,
           std::string note = {}) {
    out.push_back(make_check(suite, std::move(name), std::move(identity), residual, tolerance, lower, std::move(note)));
  }

  int degree(int k) const { return k + 1; }
  int order(int k) const { return std::max(2 * degree(k), cfg.quadrature_order); }

  SmoothMap section(int n, int k) {
    if (cfg.section && cfg.section->inputs() == n && cfg.section->outputs() == cfg.m) return *cfg.section;
    return random_polynomial_map(n, cfg.m, degree(k), rng);
  }

  std::vector<const FieldSpec*> user_fields(FieldKind kind, int n, int k) const {
    std::vector<const FieldSpec*> found;
    for (const auto& f : cfg.fields) {
      if (f.kind == kind && f.n == n && f.k == k && f.m == cfg.m) found.push_back(&f);
    }
    return found;
  }

  std::vector<std::pair<int, int>> shapes(int max_k = 4) const {
    std::vector<std::pair<int, int>> s;
    for (int n : cfg.ns) {
      for (int k : cfg.ks) {
        if (k <= max_k) s.emplace_back(n, k);
      }
    }
    return s;
  }
};

// ---------------------------------------------------------------------------
// Suites.

void suite_dims(Ctx& c) {
  auto fact = [](int v) {
    long double f = 1;
    for (int i = 2; i <= v; ++i) f *= i;
    return f;
  };
  MaxAbs count, partition, order;
  for (int n = 1; n <= 5; ++n) {
    for (int l = 0; l <= 5; ++l) {
      const auto list = enumerate(n, l);
      const long double closed = fact(n + l - 1) / (fact(n - 1) * fact(l));
      count(static_cast<double>(static_cast<long double>(list.size()) - closed));
      long double sum = 0;
      for (const auto& index : list) sum += static_cast<long double>(multiplicity(index));
      partition(static_cast<double>(sum - std::pow(static_cast<long double>(n), l)));
      for (std::size_t i = 0; i < list.size(); ++i) {
        if (degree(list[i]) != l) order(1.0);
        if (i > 0 && !(list[i - 1].counts() > list[i].counts())) order(1.0);
        if (graded_rank(list[i]) != graded_dimension(n, l - 1) + static_cast<int>(i)) order(1.0);
      }
    }
  }
  c.add("enumerate count, n<=5 l<=5", "|enumerate(n,l)| = (n+l-1)!/((n-1)! l!)", count.value, 0.0);
  c.add("multiplicities partition sequences", "sum_I |I|!/I! = n^l", partition.value, 0.0);
  c.add("canonical order", "graded, descending lex on counts, ranks contiguous", order.value, 0.0);
}

void suite_arrows(Ctx& c) {
  const double tol = c.cfg.tol.algebraic;
  MaxAbs roundtrip, transfer, extension, symm, dense;
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(c.rng() % 3);
    const int l = 1 + static_cast<int>(c.rng() % 4);
    const int rows = symmetric_dimension(n, l - 1);
    const int size = symmetric_dimension(n, l);
    AlmostSymArray t(n, l, Eigen::MatrixXd::NullaryExpr(rows, n, [&]() { return unit(c.rng); }));
    SymArray r(n, l, Convention::dual, uniform_vector(size, c.rng));
    SymArray w(n, l, Convention::derivative, uniform_vector(size, c.rng));

    roundtrip(collapse_last(spread_last(r)).values - r.values);

    double lhs = 0.0;
    const auto heads = enumerate(n, l - 1);
    for (const auto& head : heads) {
      for (int j = 0; j < n; ++j) lhs += t(head, j) * w(append(head, j));
    }
    transfer(lhs - pair(collapse_last(t), w));

    const auto whole = enumerate(n, l);
    const auto ext = collapse_last(extend_symmetric(r));
    for (std::size_t i = 0; i < whole.size(); ++i) {
      extension(ext.values(static_cast<Eigen::Index>(i)) -
                distinct_count(whole[i]) * r.values(static_cast<Eigen::Index>(i)));
    }

    const RawArray raw = [&](std::span<const int> s) { return t.at_sequence(s); };
    symm(symmetrize_almost(t).values - symmetrize(raw, n, l).values);

    // Dense contraction: every index sequence, dual entries divided by the multiplicity.
    double full = 0.0;
    std::vector<int> seq(static_cast<std::size_t>(l), 0);
    for (;;) {
      const auto index = MultiIndex::from_sequence(n, seq);
      full += r(index) / static_cast<double>(multiplicity(index)) * w(index);
      int pos = l - 1;
      while (pos >= 0 && ++seq[static_cast<std::size_t>(pos)] == n) seq[static_cast<std::size_t>(pos--)] = 0;
      if (pos < 0) break;
    }
    dense(full - pair(r, w));
  }
  c.add("collapse o spread = id (1000 arrays)", "collapse_last(spread_last(R)) = R", roundtrip.value, tol);
  c.add("pairing transfer (1000 arrays)", "sum_{J,j} T^{J;j} w_{Jj} = sum_I collapse_last(T)^I w_I", transfer.value, tol);
  c.add("collapse of symmetric extension", "collapse_last(ext R)_I = c(I) R_I", extension.value, tol);
  c.add("symmetrize_almost vs full symmetrization", "l-permutation average = l!-permutation average",
        symm.value, tol);
  c.add("dual pairing vs dense contraction", "sum_I T_I w_I = sum_seq (T_<seq>/mult) w_seq", dense.value, tol);
}

void suite_duality(Ctx& c) {
  const double tol = c.cfg.tol.algebraic;
  for (auto [n, k] : c.shapes()) {
    const int m = c.cfg.m;
    MaxAbs dual, iso, field_vs_point, lift, scale;
    int non_holonomic = 0;
    std::vector<NonHolStressField> systems;
    for (const auto* f : c.user_fields(FieldKind::nonholonomic, n, k)) systems.push_back(f->nonholonomic());
    for (int s = 0; s < c.cfg.systems; ++s) systems.push_back(random_nhs_field(n, m, k, c.degree(k), c.rng));
    for (const auto& pfield : systems) {
      const auto w = c.section(n, k);
      const auto jw = jet_section(w, k - 1);
      const auto sfield = restrict_to_holonomic(pfield, c.collapse);
      for (int p = 0; p < c.cfg.points; ++p) {
        const auto x = unit_point(n, c.rng);
        const auto px = pfield.at(x);
        const auto u = prolong(w, x, k);
        const auto q = prolong_section_of_jets(jw, m, k, x);
        const auto s = restrict_to_holonomic(px, c.collapse);
        const double rhs = var_pair(s, u);
        dual(nh_pair(px, q) - rhs);
        scale(rhs);
        iso(q.flatten() - include_holonomic(u).flatten());
        if (!is_holonomic(q, 1e-10)) ++non_holonomic;
        if (p == 0) field_vs_point(sfield.at(x).flatten() - s.flatten());
      }
      const auto sv = random_var_stress(n, m, k, c.rng);
      lift(restrict_to_holonomic(lift_variational(sv), c.collapse).flatten() - sv.flatten());
    }
    const auto tag = shape_tag(n, k);
    c.add("dual restriction" + tag, "nh_pair(P, j1(j^{k-1}w)) = var_pair(restrict_to_holonomic(P), j^k w)",
          dual.value, tol, false, scale_note(dual.value, scale.value));
    c.add("jet isomorphism" + tag, "j1(j^{k-1}w) = include_holonomic(j^k w)", iso.value, tol);
    c.add("prolonged jets are holonomic" + tag, "is_holonomic(j1(j^{k-1}w))", non_holonomic, 0.0);
    c.add("field restriction matches pointwise" + tag, "restrict_to_holonomic(P)(x) = restrict_to_holonomic(P(x))",
          field_vs_point.value, tol);
    c.add("restriction of a lift" + tag, "restrict_to_holonomic(lift_variational(S)) = S", lift.value, tol);
  }
}

void suite_exterior_jet(Ctx& c) {
  const double tol = c.cfg.tol.algebraic;
  for (auto [n, k] : c.shapes()) {
    const int m = c.cfg.m;
    const int width = graded_dimension(n, k - 1);
    MaxAbs ext, reduced, constant_p, constant_pbar, ext_scale, red_scale;
    std::vector<TractionField> systems;
    for (const auto* f : c.user_fields(FieldKind::traction, n, k)) systems.push_back(f->traction());
    for (int s = 0; s < c.cfg.systems; ++s) systems.push_back(random_traction_field(n, m, k, c.degree(k), c.rng));
    for (const auto& tau : systems) {
      const auto lambda = random_polynomial_map(n, m * width, c.degree(k), c.rng);
      const auto w = c.section(n, k);
      const auto jw = jet_section(w, k - 1);
      const auto dtau = exterior_jet(tau);
      const auto red = restrict_to_holonomic(dtau, c.collapse);
      for (int p = 0; p < c.cfg.points; ++p) {
        const auto x = unit_point(n, c.rng);
        const double d_lambda = exterior_derivative_coefficient(tau, lambda, x);
        const double d_w = exterior_derivative_coefficient(tau, jw, x);
        ext(nh_pair(dtau.at(x), prolong_section_of_jets(lambda, m, k, x)) - d_lambda);
        reduced(var_pair(red.at(x), prolong(w, x, k)) - d_w);
        ext_scale(d_lambda);
        red_scale(d_w);
      }
    }
    const auto tc = random_traction_stress(n, m, k, c.rng);
    const TractionField constant(n, m, k, SmoothMap::constant(n, tc.flatten()));
    const auto x = unit_point(n, c.rng);
    const auto dc = exterior_jet(constant).at(x);
    constant_p(dc.p.flatten());
    constant_pbar(dc.pbar.flatten() - tc.flatten());

    const auto tag = shape_tag(n, k);
    c.add("exterior jet" + tag, "nh_pair(ext_jet(tau), j1 lambda) = d(tau . lambda)/dx", ext.value, tol, false,
          scale_note(ext.value, ext_scale.value));
    c.add("reduced exterior jet" + tag, "var_pair(restrict(ext_jet(tau)), j^k w) = d(tau . j^{k-1}w)/dx",
          reduced.value, tol, false, scale_note(reduced.value, red_scale.value));
    c.add("constant tau has no P part" + tag, "ext_jet(const) = (0, tau)",
          std::max(constant_p.value, constant_pbar.value), tol);
  }
}

void suite_divergence(Ctx& c) {
  const double tol = c.cfg.tol.algebraic;
  for (auto [n, k] : c.shapes()) {
    const int m = c.cfg.m;
    MaxAbs div_induced, ptau, div_ext, slot, back;
    MinAbs perturbed;
    const auto taus = c.user_fields(FieldKind::traction, n, k);
    const auto bodies = c.user_fields(FieldKind::bodyforce, n, k);
    for (int s = 0; s < c.cfg.systems; ++s) {
      const auto tau = s < static_cast<int>(taus.size()) ? taus[static_cast<std::size_t>(s)]->traction()
                                                          : random_traction_field(n, m, k, c.degree(k), c.rng);
      const auto b = s < static_cast<int>(bodies.size()) ? bodies[static_cast<std::size_t>(s)]->bodyforce()
                                                          : random_body_force_field(n, m, k, c.degree(k), c.rng);
      const auto pfield = random_nhs_field(n, m, k, c.degree(k), c.rng);
      const auto induced = induced_nhs(b, tau);
      const auto div_n = divergence(induced);
      const auto full_n = divergence_full(induced);
      const auto pt = p_tau(induced);
      const auto div_d = divergence(exterior_jet(tau));
      // Equilibrium read backwards: b := -div P must rebuild P from (b, p_tau P).
      const BodyForceField minus_div(n, m, k, negated(divergence(pfield).map));
      const auto rebuilt = induced_nhs(minus_div, p_tau(pfield));
      Eigen::VectorXd bump = Eigen::VectorXd::Zero(NonHolStress(n, m, k).components());
      bump(0) = 1.0;
      const NonHolStressField shifted(n, m, k, offset_map(pfield.map, bump));
      const auto div_shifted = divergence(shifted);
      for (int p = 0; p < c.cfg.points; ++p) {
        const auto x = unit_point(n, c.rng);
        div_induced(div_n.at(x).flatten() + b.at(x).flatten());
        ptau(pt.at(x).flatten() - tau.at(x).flatten());
        div_ext(div_d.at(x).flatten());
        slot(full_n.at(x).pbar.flatten());
        back(rebuilt.at(x).flatten() - pfield.at(x).flatten());
        perturbed(max_abs(div_shifted.at(x).flatten() + minus_div.at(x).flatten()));
      }
    }
    const auto tag = shape_tag(n, k);
    c.add("div of induced stress" + tag, "div(induced_nhs(b, tau)) = -b", div_induced.value, tol);
    c.add("p_tau of induced stress" + tag, "p_tau(induced_nhs(b, tau)) = tau", ptau.value, tol);
    c.add("div o ext_jet = 0" + tag, "div(ext_jet(tau)) = 0", div_ext.value, tol);
    c.add("P-bar slot of the divergence vanishes" + tag, "divergence_full(P).pbar = 0", slot.value, tol);
    c.add("equilibrium only-if" + tag, "div P + b = 0  =>  P = induced_nhs(b, p_tau P)", back.value, tol);
    c.add("perturbed stress violates equilibrium" + tag, "P + delta (P slot): |div + b| = |delta| > 0",
          perturbed.value, 0.5, true);
  }
}

void suite_measure(Ctx& c) {
  const double tol = c.cfg.tol.quadrature;
  MaxAbs exact;
  auto fact = [](int v) {
    double f = 1;
    for (int i = 2; i <= v; ++i) f *= i;
    return f;
  };
  for (int n = 1; n <= 3; ++n) {
    for (Shape shape : {Shape::box, Shape::simplex}) {
      const Region region = shape == Shape::box ? Region::unit_box(n) : Region::unit_simplex(n);
      for (int trial = 0; trial < 5; ++trial) {
        const int d = 1 + static_cast<int>(c.rng() % 6);
        std::vector<std::pair<double, std::vector<int>>> terms;
        for (const auto& index : enumerate_up_to(n, d)) {
          terms.emplace_back(random_coefficient(c.rng), index.counts());
        }
        double closed = 0.0;
        for (const auto& [coef, e] : terms) {
          double v = coef;
          int total = 0;
          for (int a : e) {
            v *= shape == Shape::box ? 1.0 / (a + 1) : fact(a);
            total += a;
          }
          if (shape == Shape::simplex) v /= fact(n + total);
          closed += v;
        }
        const double q = integrate_n_form(
            [&](const Eigen::VectorXd& x) {
              double s = 0.0;
              for (const auto& [coef, e] : terms) {
                double v = coef;
                for (int i = 0; i < n; ++i) v *= std::pow(x(i), e[static_cast<std::size_t>(i)]);
                s += v;
              }
              return s;
            },
            region, d);
        exact(q - closed);
      }
    }
  }
  c.add("polynomial exactness, boxes and simplices", "rule of order d integrates degree-d monomials exactly",
        exact.value, tol);
  c.add("boundary orientation self-test", "int_[a,b] f' = f(b) - f(a)", orientation_self_test() ? 0.0 : 1.0, 0.0);
  const auto green = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(2);
    v(0) = x(0);
    return v;
  };
  c.add("Green's theorem on the square and triangle", "int_dR x1 d_1 _| dx = area(R)",
        std::max(std::abs(integrate_boundary_form(green, Region::unit_box(2), 2) - 1.0),
                 std::abs(integrate_boundary_form(green, Region::unit_simplex(2), 2) - 0.5)),
        tol);
  MaxAbs closed_form;
  for (int n = 2; n <= 3; ++n) {
    const Eigen::VectorXd cst = uniform_vector(n, c.rng);
    for (const auto& region : {Region::unit_box(n), Region::unit_simplex(n)}) {
      closed_form(integrate_boundary_form([&](const Eigen::VectorXd&) { return cst; }, region, 1));
    }
  }
  c.add("constant form over a closed boundary", "int_dR c_i d_i _| dx = 0", closed_form.value, tol);
}

void suite_stokes(Ctx& c) {
  const double tol = c.cfg.tol.quadrature;
  std::vector<std::pair<int, int>> shapes;
  for (int n : c.cfg.ns) {
    if (std::find(c.cfg.ks.begin(), c.cfg.ks.end(), 1) == c.cfg.ks.end()) shapes.emplace_back(n, 1);
  }
  for (auto s : c.shapes(3)) shapes.push_back(s);
  const int per_shape = std::max(1, c.cfg.systems / 5);
  for (auto [n, k] : shapes) {
    const int m = c.cfg.m;
    const int order = c.order(k);
    std::vector<Region> regions{Region::unit_box(n), Region::unit_simplex(n)};
    for (const auto& r : c.cfg.regions) {
      if (r.dimension() == n) regions.push_back(r);
    }
    MaxAbs stokes, three_way, additivity;
    for (int s = 0; s < per_shape; ++s) {
      const auto tau = random_traction_field(n, m, k, c.degree(k), c.rng);
      const auto b = random_body_force_field(n, m, k, c.degree(k), c.rng);
      const auto lambda = random_polynomial_map(n, m * graded_dimension(n, k - 1), c.degree(k), c.rng);
      const auto w = c.section(n, k);
      const auto induced = induced_nhs(b, tau);
      const auto svar = restrict_to_holonomic(induced, c.collapse);
      for (const auto& region : regions) {
        stokes(stokes_residual(tau, lambda, region, order));
        const double f1 = force_functional(b, tau, region, w, order);
        const double f2 = nhs_functional(induced, region, w, order);
        const double f3 = var_functional(svar, region, w, order);
        three_way(std::max({std::abs(f1 - f2), std::abs(f1 - f3), std::abs(f2 - f3)}));
      }
      // Two-piece split of the unit box: internal face contributions cancel.
      Eigen::VectorXd mid = Eigen::VectorXd::Ones(n);
      mid(0) = 0.5;
      Eigen::VectorXd mid_lo = Eigen::VectorXd::Zero(n);
      mid_lo(0) = 0.5;
      const double whole = force_functional(b, tau, Region::unit_box(n), w, order);
      const double left = force_functional(b, tau, Region::box(Eigen::VectorXd::Zero(n), mid), w, order);
      const double right = force_functional(b, tau, Region::box(mid_lo, Eigen::VectorXd::Ones(n)), w, order);
      additivity(whole - left - right);
    }
    const auto tag = shape_tag(n, k) + " order=" + std::to_string(order);
    c.add("Stokes for the exterior jet" + tag, "int_dR tau . lambda = int_R ext_jet(tau) . j1 lambda", stokes.value,
          tol);
    c.add("three force functionals agree" + tag,
          "int b.j^{k-1}w + int_dR tau.j^{k-1}w = int P.j1 j^{k-1}w = int S.j^k w", three_way.value, tol);
    c.add("additivity over a split box" + tag, "f_R = f_R1 + f_R2", additivity.value, tol);
  }
}

// Bounding box of the image of `box` under the chart, padded.
Box image_box(const ChartMap& chart, const Box& box) {
  const int n = chart.dimension();
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  Eigen::VectorXd hi = -lo;
  const int g = 5;
  int total = 1;
  for (int i = 0; i < n; ++i) total *= g;
  for (int t = 0; t < total; ++t) {
    Eigen::VectorXd x(n);
    int rest = t;
    for (int i = 0; i < n; ++i) {
      x(i) = box.lo(i) + (box.hi(i) - box.lo(i)) * (rest % g) / (g - 1.0);
      rest /= g;
    }
    const auto y = chart.to_target(x);
    lo = lo.cwiseMin(y);
    hi = hi.cwiseMax(y);
  }
  const Eigen::VectorXd pad = (hi - lo).cwiseMax(1.0);
  return Box{lo - pad, hi + pad};
}

void suite_covariance(Ctx& c) {
  const double tol = c.cfg.tol.chart;
  for (auto [n, k] : c.shapes()) {
    const int m = c.cfg.m;
    MaxAbs round_trip, s_inv, b_inv, tau_inv, p_inv, g_section, g_matrix, h_hol, triangular, vanishing, jet_back;
    const int charts = std::max(1, c.cfg.systems / 4);
    const int per_chart = std::max(1, c.cfg.points / 20);
    const auto degrees = enumerate_up_to(n, k);
    const int big = graded_dimension(n, k);
    for (int s = 0; s < charts; ++s) {
      const bool user_chart = s == 0 && c.cfg.chart && c.cfg.chart->dimension() == n;
      const ChartMap chart = user_chart ? *c.cfg.chart : random_triangular_chart(n, c.rng, unit_box_of(n));
      const bool user_a = s == 0 && c.cfg.transition && c.cfg.transition->m == m &&
                          c.cfg.transition->matrix.inputs() == n;
      const BundleTransition a = user_a ? *c.cfg.transition : random_unipotent_transition(n, m, c.rng);
      const auto back = chart.inverted(image_box(chart, chart.box()));
      const auto a_back = a.inverse_through(chart);
      const auto w = c.section(n, k);
      const auto w_target = transform_section(chart, a, w);
      std::vector<Eigen::VectorXd> samples;
      for (int p = 0; p < per_chart; ++p) {
        samples.push_back(random_point(chart.box().lo, chart.box().hi, c.rng));
      }
      round_trip(chart.round_trip_residual(samples, k + 1));
      for (const auto& x : samples) {
        const auto xp = chart.to_target(x);
        const double jac = chart.jacobian_determinant(x);
        const auto u = prolong(w, x, k);
        const auto up = transform_jet(chart, a, u, x);
        const auto g = assemble_G(chart, a, x, m, k);
        g_matrix(g * u.flatten() - up.flatten());
        g_section(prolong(w_target, xp, k).flatten() - up.flatten());
        jet_back(transform_jet(back, a_back, up, xp).flatten() - u.flatten());

        const auto sp = random_var_stress(n, m, k, c.rng);
        s_inv(var_pair(pushforward_var_stress(chart, a, sp, x), u) - jac * var_pair(sp, up));

        const auto v = u.truncated(k - 1);
        const auto vp = transform_jet(chart, a, v, x);
        const auto bp = BodyForce::unflatten(n, m, k, uniform_vector(BodyForce(n, m, k).components(), c.rng, -3, 3));
        b_inv(body_pair(pushforward_body_force(chart, a, bp, x), v) - jac * body_pair(bp, vp));

        const auto taup = random_traction_stress(n, m, k, c.rng);
        const Eigen::MatrixXd frame = Eigen::MatrixXd::NullaryExpr(n, n - 1, [&]() {
          return std::uniform_real_distribution<double>(-1.0, 1.0)(c.rng);
        });
        if (n > 1) {
          tau_inv(evaluate_on_frame(traction_action(pushforward_traction_stress(chart, a, taup, x), v), frame) -
                  evaluate_on_frame(traction_action(taup, vp), chart.forward().jacobian(x) * frame));
        }

        const auto pp = random_nhs(n, m, k, c.rng);
        const auto q = random_nonholonomic_jet(n, m, k, c.rng);
        p_inv(nh_pair(pushforward_nhs(chart, a, pp, x), q) - jac * nh_pair(pp, transform_nonholonomic(chart, a, q, x)));
        h_hol(transform_nonholonomic(chart, a, include_holonomic(u), x).flatten() - include_holonomic(up).flatten());

        // Rows (alpha', I') and columns (alpha, I): only |I| <= |I'| may be non-zero.
        for (int row = 0; row < g.rows(); ++row) {
          for (int col = 0; col < g.cols(); ++col) {
            if (degree(degrees[static_cast<std::size_t>(col % big)]) >
                degree(degrees[static_cast<std::size_t>(row % big)])) {
              triangular(g(row, col));
            }
          }
        }
        for (int l = 0; l < k; ++l) {
          auto truncated_sp = sp;
          for (int a_ = 0; a_ < m; ++a_) {
            for (int col = graded_dimension(n, l); col < big; ++col) truncated_sp.values(a_, col) = 0.0;
          }
          const auto pushed = pushforward_var_stress(chart, a, truncated_sp, x);
          for (int a_ = 0; a_ < m; ++a_) {
            vanishing(pushed.values.row(a_).tail(big - graded_dimension(n, l)).transpose().eval());
          }
        }
      }
    }

    // Integrals over a region and its image under an affine chart agree.
    MaxAbs integral;
    {
      Eigen::MatrixXd l = Eigen::MatrixXd::Identity(n, n);
      for (int i = 0; i < n; ++i) {
        l(i, i) = 0.5 + std::uniform_real_distribution<double>(0.0, 1.5)(c.rng);
        for (int j = i + 1; j < n; ++j) l(i, j) = std::uniform_real_distribution<double>(-1.0, 1.0)(c.rng);
      }
      const Eigen::VectorXd shift = uniform_vector(n, c.rng);
      const auto chart = ChartMap::affine(l, shift, Box{Eigen::VectorXd::Constant(n, -5), Eigen::VectorXd::Constant(n, 5)});
      const auto a = random_unipotent_transition(n, m, c.rng);
      const auto source = Region::unit_simplex(n);
      std::vector<Eigen::VectorXd> verts;
      for (const auto& v : source.vertices) verts.push_back(l * v + shift);
      const auto target = Region::simplex(verts);
      const auto s_target = random_var_stress_field(n, m, k, c.degree(k), c.rng);
      const auto w = c.section(n, k);
      const auto w_target = transform_section(chart, a, w);
      const int order = std::max(4 * c.degree(k), c.cfg.quadrature_order);
      const double lhs = integrate_n_form(
          [&](const Eigen::VectorXd& x) {
            return var_pair(pushforward_var_stress(chart, a, s_target.at(chart.to_target(x)), x), prolong(w, x, k));
          },
          source, order);
      const double rhs = integrate_n_form(
          [&](const Eigen::VectorXd& xp) { return var_pair(s_target.at(xp), prolong(w_target, xp, k)); }, target,
          order);
      integral(lhs - rhs);
    }

    const auto tag = shape_tag(n, k);
    c.add("chart round trip" + tag, "forward o inverse = id to order k+1", round_trip.value, tol);
    c.add("jet round trip" + tag, "transform_jet(chart^-1) o transform_jet(chart) = id", jet_back.value, tol);
    c.add("G matches transformed section" + tag, "G . j^k w(x) = j^k (A w o X)(x')", g_section.value, tol);
    c.add("G matrix matches transform_jet" + tag, "G u = transform_jet(u)", g_matrix.value, tol);
    c.add("G block-triangular" + tag, "G^{a' I}_{I' a} = 0 for |I| > |I'|", triangular.value, tol);
    c.add("S pairing invariance" + tag, "S . u dx = S' . G u dx'", s_inv.value, tol);
    c.add("b pairing invariance" + tag, "b . v dx = b' . G v dx'", b_inv.value, tol);
    if (n > 1) {
      c.add("tau form invariance" + tag, "(tau . v)(T) = (tau' . G v)(DX T)", tau_inv.value, tol);
    }
    c.add("P pairing invariance" + tag, "P . q dx = P' . H q dx'", p_inv.value, tol);
    c.add("H preserves holonomic jets" + tag, "H include(u) = include(G u)", h_hol.value, tol);
    c.add("vanishing above order is invariant" + tag, "S'_{|I|>l} = 0 => S_{|I|>l} = 0", vanishing.value, tol);
    c.add("integral invariance under an affine chart" + tag, "int_R S . j^k w = int_R' S' . j^k w'",
          integral.value, c.cfg.tol.quadrature);
  }
}

JetPoint uniform_jet(int n, int m, int k, Rng& rng) {
  return JetPoint::unflatten(n, m, k, uniform_vector(JetPoint(n, m, k).components(), rng));
}

Eigen::VectorXd central_difference(const SmoothMap& phi, const Eigen::VectorXd& at, double h) {
  Eigen::VectorXd g(at.size());
  for (Eigen::Index i = 0; i < at.size(); ++i) {
    Eigen::VectorXd plus = at, minus = at;
    plus(i) += h;
    minus(i) -= h;
    g(i) = (phi.value(plus)(0) - phi.value(minus)(0)) / (2.0 * h);
  }
  return g;
}

void suite_constitutive(Ctx& c) {
  const double rel_tol = 1e-6;
  const double tol = c.cfg.tol.algebraic;
  const double h = 1e-5;
  for (auto [n, k] : c.shapes()) {
    const int m = c.cfg.m;
    const int vars = JetPoint(n, m, k).components();
    const int nh_vars = NonHolJetPoint(n, m, k).components();
    const int width = graded_dimension(n, k - 1);
    const int big = graded_dimension(n, k);
    const auto all = enumerate_up_to(n, k);

    // Averaging map (lambda, mu) -> jet components; it undoes include_holonomic.
    std::vector<Expr> average;
    for (int a = 0; a < m; ++a) {
      for (const auto& index : all) {
        if (degree(index) < k) {
          average.push_back(Expr::variable(a * width + graded_rank(index)));
          continue;
        }
        std::vector<Expr> terms;
        for (int j = 0; j < n; ++j) {
          if (index[j] == 0) continue;
          const int mu = m * width + (a * width + graded_rank(remove(index, j))) * n + j;
          terms.push_back(Expr::constant(static_cast<double>(index[j]) / k) * Expr::variable(mu));
        }
        average.push_back(Expr::sum(std::move(terms)));
      }
    }

    MaxAbs fd_var, fd_nh, chain, quadratic, top_free;
    for (int trial = 0; trial < 50; ++trial) {
      const Expr poly = random_sparse_polynomial(vars, 4, 12, c.rng);
      const auto phi = SmoothMap::from_expressions(vars, {poly});
      const auto u = uniform_jet(n, m, k, c.rng);
      const auto s = constitutive_var(phi, u);
      const auto g = central_difference(phi, u.flatten(), h);
      fd_var(max_abs(s.flatten() - g) / std::max(1.0, max_abs(g)));

      const auto phi_nh = SmoothMap::from_expressions(nh_vars, {Expr::compose(poly, average)});
      const auto held = restrict_to_holonomic(constitutive_nhs(phi_nh, include_holonomic(u)), c.collapse);
      chain(held.flatten() - s.flatten());

      const Expr nh_poly = random_sparse_polynomial(nh_vars, 4, 12, c.rng);
      const auto big_phi = SmoothMap::from_expressions(nh_vars, {nh_poly});
      const auto q = NonHolJetPoint::unflatten(n, m, k, uniform_vector(nh_vars, c.rng));
      const auto gq = central_difference(big_phi, q.flatten(), h);
      fd_nh(max_abs(constitutive_nhs(big_phi, q).flatten() - gq) / std::max(1.0, max_abs(gq)));

      // Potential that ignores the top-degree components.
      std::vector<Expr> drop_top;
      for (int a = 0; a < m; ++a) {
        for (const auto& index : all) {
          drop_top.push_back(degree(index) == k ? Expr::constant(0.0)
                                                : Expr::variable(a * big + graded_rank(index)));
        }
      }
      const auto lower = constitutive_var(SmoothMap::from_expressions(vars, {Expr::compose(poly, drop_top)}), u);
      for (int a = 0; a < m; ++a) {
        top_free(lower.values.row(a).tail(symmetric_dimension(n, k)).transpose().eval());
      }
    }
    std::vector<Expr> squares;
    for (int i = 0; i < vars; ++i) squares.push_back(Expr::constant(0.5) * Expr::variable(i) * Expr::variable(i));
    const auto quad = SmoothMap::from_expressions(vars, {Expr::sum(squares)});
    const auto u = uniform_jet(n, m, k, c.rng);
    quadratic(constitutive_var(quad, u).flatten() - u.flatten());

    const auto tag = shape_tag(n, k);
    c.add("gradient vs central differences (50 potentials)" + tag,
          "max|S - FD| / max(1, max|FD|), S = d phi / d u_I", fd_var.value, rel_tol);
    c.add("non-holonomic gradient vs central differences" + tag, "max|P - FD| / max(1, max|FD|)", fd_nh.value,
          rel_tol);
    c.add("quadratic potential" + tag, "phi = sum u^2/2 => S = u", quadratic.value, tol);
    c.add("order-k material has no top stress" + tag, "d phi / d u_{|I|=k} = 0 => S_{|I|=k} = 0", top_free.value,
          tol);
    c.add("chain rule through the holonomic inclusion" + tag,
          "restrict(constitutive_nhs(phi o avg, include u)) = constitutive_var(phi, u)", chain.value, tol);
  }
}

void suite_non_injectivity(Ctx& c) {
  const double tol = c.cfg.tol.algebraic;
  std::vector<std::pair<int, int>> shapes{{2, 2}};
  for (auto s : c.shapes()) {
    if (s.first >= 2 && s.second >= 2 && s != std::pair<int, int>{2, 2}) shapes.push_back(s);
  }
  for (auto [n, k] : shapes) {
    const int m = c.cfg.m;
    const auto kappa = kernel_element(n, m, k);
    MaxAbs restricted, holonomic, same_s, same_force;
    restricted(restrict_to_holonomic(kappa, c.collapse).flatten());
    for (int t = 0; t < 20; ++t) holonomic(nh_pair(kappa, include_holonomic(random_jet(n, m, k, c.rng))));

    // Two traction stresses differing by the kernel element's P-bar: same S,
    // same b, same force functional, different hyper-tractions.
    const auto tau = random_traction_field(n, m, k, c.degree(k), c.rng);
    const auto b = random_body_force_field(n, m, k, c.degree(k), c.rng);
    const TractionField tau2(n, m, k, offset_map(tau.map, kappa.pbar.flatten()));
    const auto s1 = restrict_to_holonomic(induced_nhs(b, tau), c.collapse);
    const auto s2 = restrict_to_holonomic(induced_nhs(b, tau2), c.collapse);
    for (int p = 0; p < c.cfg.points; ++p) {
      const auto x = unit_point(n, c.rng);
      same_s(s1.at(x).flatten() - s2.at(x).flatten());
    }
    const auto region = Region::unit_box(n);
    MaxAbs face_max;
    for (const auto& face : region.faces()) {
      const Eigen::VectorXd z = face.point(Eigen::VectorXd::Constant(n - 1, 0.5));
      face_max(max_abs(hyper_traction(tau2.at(z), face.frame).flatten() -
                       hyper_traction(tau.at(z), face.frame).flatten()));
    }
    const auto w = c.section(n, k);
    const int order = c.order(k);
    same_force(force_functional(b, tau, region, w, order) - force_functional(b, tau2, region, w, order));

    const auto tag = shape_tag(n, k);
    c.add("kernel element is non-zero" + tag, "|kappa| > 0", max_abs(kappa.flatten()), 0.5, true);
    c.add("kernel element restricts to zero" + tag, "restrict_to_holonomic(kappa) = 0", restricted.value, tol);
    c.add("kernel element annihilates holonomic jets" + tag, "nh_pair(kappa, include(u)) = 0", holonomic.value, tol);
    c.add("S and b do not determine tau" + tag, "S(b, tau) = S(b, tau + kappa-bar)", same_s.value, tol);
    c.add("same force functional" + tag, "f(b, tau) = f(b, tau + kappa-bar)", same_force.value,
          c.cfg.tol.quadrature);
    c.add("hyper-tractions differ on some face" + tag, "max_faces |t(tau + kappa-bar) - t(tau)| > 0",
          face_max.value, 0.5, true);
  }
}

void suite_k1(Ctx& c) {
  const double tol = c.cfg.tol.algebraic;
  for (int n : c.cfg.ns) {
    const int m = c.cfg.m;
    const int k = 1;
    MaxAbs top, bottom, reshape, stokes;
    for (int s = 0; s < c.cfg.systems; ++s) {
      const auto tau = random_traction_field(n, m, k, c.degree(k), c.rng);
      const auto red = restrict_to_holonomic(exterior_jet(tau), c.collapse);
      for (int p = 0; p < std::max(1, c.cfg.points / 10); ++p) {
        const auto x = unit_point(n, c.rng);
        const auto sx = red.at(x);
        const auto tx = tau.at(x);
        const Eigen::MatrixXd jac = tau.map.jacobian(x);  // rows: alpha * n + i
        for (int a = 0; a < m; ++a) {
          double div = 0.0;
          for (int i = 0; i < n; ++i) {
            top(sx(a, append(MultiIndex(n), i)) - tx(a, MultiIndex(n), i));
            div += jac(a * n + i, i);
          }
          bottom(sx(a, MultiIndex(n)) - div);
        }
      }
      const auto pk = random_nhs(n, m, k, c.rng);
      const auto sk = restrict_to_holonomic(pk, c.collapse);
      for (int a = 0; a < m; ++a) {
        reshape(sk(a, MultiIndex(n)) - pk.p(a, MultiIndex(n)));
        for (int i = 0; i < n; ++i) reshape(sk(a, append(MultiIndex(n), i)) - pk.pbar(a, MultiIndex(n), i));
      }
      const auto w = c.section(n, k);
      for (const auto& region : {Region::unit_box(n), Region::unit_simplex(n)}) {
        stokes(stokes_residual(tau, w, region, c.order(k)));
      }
    }
    const std::string tag = " [n=" + std::to_string(n) + " k=1]";
    c.add("reduced exterior jet top block is tau" + tag, "S^{(i)} = tau^{;i}", top.value, tol);
    c.add("reduced exterior jet bottom is the divergence" + tag, "S = tau^{;i}_{,i}", bottom.value, tol);
    c.add("restriction is a reshaping" + tag, "restrict_to_holonomic(P) = (P, P-bar)", reshape.value, tol);
    c.add("divergence theorem" + tag, "int_dR tau . w = int_R (tau^i w)_{,i}", stokes.value, c.cfg.tol.quadrature);
  }
}

void suite_euclidean(Ctx& c) {
  const double tol = c.cfg.tol.quadrature;
  const int n = 3, m = 3, k = 2;
  const int order = 8;
  const auto pairs = enumerate(n, 2);
  const int width = graded_dimension(n, 1);

  // Full symmetric S_j^{i1 i2}(x) as degree-3 polynomials; only the top order.
  std::vector<Expr> s_exprs;
  for (int a = 0; a < m; ++a) {
    for (std::size_t r = 0; r < pairs.size(); ++r) s_exprs.push_back(random_polynomial(n, 3, c.rng));
  }
  const auto s_map = SmoothMap::from_expressions(n, s_exprs);
  const auto s_at = [&](int a, int i1, int i2) -> const Expr& {
    MultiIndex idx(n);
    idx = append(append(idx, i1), i2);
    return s_exprs[static_cast<std::size_t>(a * static_cast<int>(pairs.size()) + rank_in_degree(idx))];
  };

  // tau_j^{(i1);i2} = S_j^{i1 i2}; b_j^{(i1)} = -S_j^{i1 i2}_{,i2}.
  std::vector<Expr> tau_exprs(static_cast<std::size_t>(TractionStress(n, m, k).components()), Expr::constant(0.0));
  for (int a = 0; a < m; ++a) {
    for (int i1 = 0; i1 < n; ++i1) {
      const int row = a * width + graded_rank(append(MultiIndex(n), i1));
      for (int i2 = 0; i2 < n; ++i2) tau_exprs[static_cast<std::size_t>(row * n + i2)] = s_at(a, i1, i2);
    }
  }
  const TractionField tau(n, m, k, SmoothMap::from_expressions(n, tau_exprs));
  const BodyForceField b(n, m, k, differential_map(s_map, m * width, 1, [&](std::span<const Series> e, int ord) {
    std::vector<Series> out(static_cast<std::size_t>(m * width), Series::zero(n, ord));
    for (int a = 0; a < m; ++a) {
      for (int i1 = 0; i1 < n; ++i1) {
        auto acc = Series::zero(n, ord);
        for (int i2 = 0; i2 < n; ++i2) {
          MultiIndex idx = append(append(MultiIndex(n), i1), i2);
          acc = acc - e[static_cast<std::size_t>(a * static_cast<int>(pairs.size()) + rank_in_degree(idx))]
                          .derivative(i2)
                          .truncated(ord);
        }
        out[static_cast<std::size_t>(a * width + graded_rank(append(MultiIndex(n), i1)))] = acc;
      }
    }
    return out;
  }));
  const auto v = random_polynomial_map(n, m, 3, c.rng);

  Eigen::VectorXd lo(3), hi(3);
  lo << -0.5, 0.0, 0.25;
  hi << 0.5, 1.0, 1.5;
  const auto region = Region::box(lo, hi);

  const auto second = [&](const Eigen::VectorXd& x) {
    // S_j^{i1 i2} v^j_{,i1 i2} summed over all index sequences.
    const auto u = prolong(v, x, 2);
    double sum = 0.0;
    std::vector<double> vals(s_exprs.size());
    const auto sv = s_map.value(x);
    for (int a = 0; a < m; ++a) {
      for (int i1 = 0; i1 < n; ++i1) {
        for (int i2 = 0; i2 < n; ++i2) {
          MultiIndex idx = append(append(MultiIndex(n), i1), i2);
          sum += sv(a * static_cast<int>(pairs.size()) + rank_in_degree(idx)) * u(a, idx);
        }
      }
    }
    return sum;
  };
  const double internal = integrate_n_form(second, region, order);

  const double body = integrate_n_form(
      [&](const Eigen::VectorXd& x) {
        const auto u = prolong(v, x, 1);
        const Eigen::MatrixXd ds = s_map.jacobian(x);
        double sum = 0.0;
        for (int a = 0; a < m; ++a) {
          for (int i1 = 0; i1 < n; ++i1) {
            for (int i2 = 0; i2 < n; ++i2) {
              MultiIndex idx = append(append(MultiIndex(n), i1), i2);
              sum += ds(a * static_cast<int>(pairs.size()) + rank_in_degree(idx), i2) *
                     u(a, append(MultiIndex(n), i1));
            }
          }
        }
        return sum;
      },
      region, order);

  // Boundary term with explicit unit normals, face by face.
  const auto rule = reference_rule(Shape::box, 2, order);
  double boundary = 0.0;
  for (int d = 0; d < n; ++d) {
    const int p = (d + 1) % n, q = (d + 2) % n;
    const double area = (hi(p) - lo(p)) * (hi(q) - lo(q));
    for (int side = 0; side < 2; ++side) {
      const double normal = side == 0 ? -1.0 : 1.0;
      for (Eigen::Index node = 0; node < rule.weights.size(); ++node) {
        Eigen::VectorXd z(3);
        z(d) = side == 0 ? lo(d) : hi(d);
        z(p) = lo(p) + (hi(p) - lo(p)) * rule.nodes(0, node);
        z(q) = lo(q) + (hi(q) - lo(q)) * rule.nodes(1, node);
        const auto u = prolong(v, z, 1);
        const auto sv = s_map.value(z);
        double t = 0.0;
        for (int a = 0; a < m; ++a) {
          for (int i1 = 0; i1 < n; ++i1) {
            MultiIndex idx = append(append(MultiIndex(n), i1), d);
            t += sv(a * static_cast<int>(pairs.size()) + rank_in_degree(idx)) * normal *
                 u(a, append(MultiIndex(n), i1));
          }
        }
        boundary += rule.weights(node) * area * t;
      }
    }
  }

  const double pipeline_boundary = integrate_boundary_form(
      [&](const Eigen::VectorXd& x) { return traction_action(tau.at(x), prolong(v, x, 1)); }, region, order);
  const double force = force_functional(b, tau, region, v, order);
  const auto svar = restrict_to_holonomic(induced_nhs(b, tau), c.collapse);
  const double variational = var_functional(svar, region, v, order);

  // Pointwise: recovered S equals the dual form of the symmetric S.
  MaxAbs recovered;
  for (int t = 0; t < 20; ++t) {
    const auto x = random_point(lo, hi, c.rng);
    const auto sx = svar.at(x);
    const auto sv = s_map.value(x);
    for (int a = 0; a < m; ++a) {
      for (const auto& idx : enumerate_up_to(n, 2)) {
        const double expected =
            degree(idx) == 2
                ? static_cast<double>(multiplicity(idx)) * sv(a * static_cast<int>(pairs.size()) + rank_in_degree(idx))
                : 0.0;
        recovered(sx(a, idx) - expected);
      }
    }
  }

  // Hyper-traction at face centres: t_j^{i1} = S_j^{i1 i2} n_{i2}.
  MaxAbs cauchy;
  const Eigen::VectorXd centre = 0.5 * (lo + hi);
  for (const auto& face : region.faces()) {
    const Eigen::VectorXd z = face.point(Eigen::VectorXd::Constant(2, 0.5));
    Eigen::VectorXd normal = Eigen::VectorXd::Zero(3);
    double area = 1.0;
    for (int col = 0; col < 2; ++col) area *= face.frame.col(col).norm();
    for (int d = 0; d < 3; ++d) {
      if (face.frame.row(d).norm() == 0.0) normal(d) = z(d) > centre(d) ? 1.0 : -1.0;
    }
    const auto t = hyper_traction(tau.at(z), face.frame);
    const auto sv = s_map.value(z);
    for (int a = 0; a < m; ++a) {
      for (int i1 = 0; i1 < n; ++i1) {
        double expected = 0.0;
        for (int i2 = 0; i2 < n; ++i2) {
          MultiIndex idx = append(append(MultiIndex(n), i1), i2);
          expected += sv(a * static_cast<int>(pairs.size()) + rank_in_degree(idx)) * normal(i2);
        }
        cauchy(face.sign * t(a, append(MultiIndex(n), i1)) / area - expected);
      }
    }
  }

  c.add("integration by parts with unit normals", "int S v_{,i1i2} = int_dR S n_{i2} v_{,i1} - int S_{,i2} v_{,i1}",
        internal - (boundary - body), tol);
  c.add("boundary form equals the unit-normal boundary term", "int_dR tau . j1 v = int_dR S n v_{,i1} dA",
        pipeline_boundary - boundary, tol);
  c.add("force functional reproduces the internal power", "int b . j1 v + int_dR tau . j1 v = int S v_{,i1i2}",
        force - internal, tol);
  c.add("variational stress from the force system", "int restrict(induced(b,tau)) . j2 v = int S v_{,i1i2}",
        variational - internal, tol);
  c.add("recovered variational stress is S", "restrict(induced(b, tau)) = S (dual)", recovered.value, tol);
  c.add("hyper-traction is S n", "t_j^{i1} = S_j^{i1 i2} n_{i2}", cauchy.value, tol);
}

// ---------------------------------------------------------------------------
// Symmetry example.

struct SymmetryCase {
  std::vector<Check> checks;
  std::string table;
};

ChartMap example_chart() {
  const Expr x1 = Expr::variable(0), x2 = Expr::variable(1);
  const auto fwd = SmoothMap::from_expressions(2, {x1 + x2 * x2, x2});
  const auto inv = SmoothMap::from_expressions(2, {x1 - x2 * x2, x2});
  return ChartMap(fwd, inv, Box{Eigen::VectorXd::Constant(2, -2.0), Eigen::VectorXd::Constant(2, 2.0)});
}

// Fully symmetric tau' with full-array value f(<Jl>) = 1 + K_1 + 2 K_2.
TractionStress symmetric_example_stress(int n, int k) {
  TractionStress t(n, 1, k);
  for (int r = 0; r < k; ++r) {
    for (const auto& head : enumerate(n, r)) {
      for (int l = 0; l < n; ++l) {
        const auto whole = append(head, l);
        double f = 1.0;
        for (int i = 0; i < n; ++i) f += (i + 1) * whole[i];
        t(0, head, l) = static_cast<double>(multiplicity(head)) * f;
      }
    }
  }
  return t;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", std::abs(v) < 1e-13 ? 0.0 : v);
  return buf;
}

std::string index_label(const MultiIndex& head, int l) {
  std::string s;
  for (int i : head.sequence()) s += std::to_string(i + 1);
  return s + std::to_string(l + 1);
}

}  // namespace

// ---------------------------------------------------------------------------

Check make_check(std::string suite, std::string name, std::string identity, double residual, double tolerance,
                 bool lower_bound, std::string note) {
  Check c;
  c.suite = std::move(suite);
  c.name = std::move(name);
  c.identity = std::move(identity);
  c.residual = std::abs(residual);
  c.tolerance = tolerance;
  c.lower_bound = lower_bound;
  c.pass = lower_bound ? c.residual > tolerance : c.residual <= tolerance;
  c.note = std::move(note);
  return c;
}

CollapseFn collapse_for(const VerifyConfig& config) {
  if (config.fault_injection == "collapse_factor") {
    return [](const AlmostSymArray& t) {
      auto r = collapse_last(t);
      const auto list = enumerate(t.n, t.l);
      for (std::size_t i = 0; i < list.size(); ++i) r.values(static_cast<Eigen::Index>(i)) *= distinct_count(list[i]);
      return r;
    };
  }
  return {};
}

TableResult example_symmetry() {
  TableResult result;
  std::ostringstream os;
  const double chart_tol = 1e-9;
  const auto chart = example_chart();
  const auto a = BundleTransition::identity(2, 1);
  Eigen::VectorXd x(2);
  x << 0.3, 0.7;
  const auto xp = chart.to_target(x);
  const double jac = chart.jacobian_determinant(x);
  const int k = 4, n = 2;
  const auto taup = symmetric_example_stress(n, k);
  const auto tau = pushforward_traction_stress(chart, a, taup, x);

  os << "chart: x'1 = x1 + (x2)^2, x'2 = x2 (inverse x1 = x'1 - (x'2)^2)\n";
  os << "sample point x = (" << fmt(x(0)) << ", " << fmt(x(1)) << "), x' = (" << fmt(xp(0)) << ", " << fmt(xp(1))
     << "), J = " << fmt(jac) << "\n";
  os << "tau' fully symmetric: full component tau'^{K} = 1 + K_1 + 2 K_2 (K counts)\n";
  os << "pushed-forward full components tau^{J l} (indices 1-based):\n";
  for (int r = k - 1; r >= 0; --r) {
    os << "  |J| = " << r << ":";
    for (const auto& head : enumerate(n, r)) {
      for (int l = 0; l < n; ++l) os << "  tau^" << index_label(head, l) << " = " << fmt(full_traction(tau, 0, head, l));
    }
    os << "   asymmetry " << fmt(block_asymmetry(tau, 0, r)) << "\n";
  }

  // Oracle: the component-wise transformation law written out for k - 1 = 3
  // with the derivatives x^i_{,i'}, x^i_{,i'j'}, x^i_{,i'j'k'} of the inverse.
  const auto inv = chart.inverse().expand(xp, 3);
  auto d = [&](int i, std::vector<int> seq) {
    return inv[static_cast<std::size_t>(i)].partial(MultiIndex::from_sequence(n, seq));
  };
  auto tp = [&](std::vector<int> seq) {
    const int l = seq.back();
    seq.pop_back();
    return full_traction(taup, 0, MultiIndex::from_sequence(n, seq), l);
  };
  MaxAbs oracle;
  const int N = n;
  for (int l = 0; l < N; ++l) {
    double t1 = 0;
    for (int lp = 0; lp < N; ++lp) t1 += tp({lp}) * d(l, {lp});
    oracle(jac * t1 - full_traction(tau, 0, MultiIndex(n), l));
    for (int i = 0; i < N; ++i) {
      double t2 = 0;
      for (int ip = 0; ip < N; ++ip) {
        for (int lp = 0; lp < N; ++lp) {
          t2 += tp({ip, lp}) * d(i, {ip}) * d(l, {lp});
          for (int jp = 0; jp < N; ++jp) {
            t2 += tp({ip, jp, lp}) * d(i, {ip, jp}) * d(l, {lp});
            for (int kp = 0; kp < N; ++kp) t2 += tp({ip, jp, kp, lp}) * d(i, {ip, jp, kp}) * d(l, {lp});
          }
        }
      }
      oracle(jac * t2 - full_traction(tau, 0, append(MultiIndex(n), i), l));
      for (int j = 0; j < N; ++j) {
        // The (i, j) pair is symmetrized: only the symmetric part pairs with w_{,ij}.
        auto t3 = [&](int i_, int j_) {
          double s = 0;
          for (int ip = 0; ip < N; ++ip) {
            for (int jp = 0; jp < N; ++jp) {
              for (int lp = 0; lp < N; ++lp) {
                s += tp({ip, jp, lp}) * d(i_, {ip}) * d(j_, {jp}) * d(l, {lp});
                for (int kp = 0; kp < N; ++kp) {
                  s += tp({ip, jp, kp, lp}) *
                       (d(i_, {ip, kp}) * d(j_, {jp}) + d(i_, {ip}) * d(j_, {jp, kp}) + d(i_, {ip, jp}) * d(j_, {kp})) *
                       d(l, {lp});
                }
              }
            }
          }
          return s;
        };
        const auto head = append(append(MultiIndex(n), i), j);
        oracle(jac * 0.5 * (t3(i, j) + t3(j, i)) - full_traction(tau, 0, head, l));
        for (int kk = 0; kk < N; ++kk) {
          double t4 = 0;
          for (int ip = 0; ip < N; ++ip) {
            for (int jp = 0; jp < N; ++jp) {
              for (int kp = 0; kp < N; ++kp) {
                for (int lp = 0; lp < N; ++lp) {
                  t4 += tp({ip, jp, kp, lp}) * d(i, {ip}) * d(j, {jp}) * d(kk, {kp}) * d(l, {lp});
                }
              }
            }
          }
          oracle(jac * t4 - full_traction(tau, 0, append(head, kk), l));
        }
      }
    }
  }

  const MultiIndex e1 = append(MultiIndex(n), 0), e2 = append(MultiIndex(n), 1);
  const double asym = std::abs(full_traction(tau, 0, e1, 1) - full_traction(tau, 0, e2, 0));
  const double expected = 2.0 * std::abs(jac * full_traction(taup, 0, append(e2, 1), 1));
  os << "asymmetry |tau^12 - tau^21| = " << fmt(asym) << "  (2 J |tau'^222| = " << fmt(expected) << ")\n";

  const std::string suite = "symmetry-example";
  auto& out = result.checks;
  out.push_back(make_check(suite, "components match the written-out transformation law",
                           "tau^{Jl} = J sum tau'^{J'l'} (derivatives of x(x')) x^l_{,l'}", oracle.value, chart_tol));
  out.push_back(make_check(suite, "top block stays symmetric [k=4]", "tau'^{ijkl} symmetric => tau^{ijkl} symmetric",
                           block_asymmetry(tau, 0, k - 1), chart_tol));
  out.push_back(make_check(suite, "tau^{il} block is not symmetric [k=4]", "|tau^12 - tau^21| > 1e-3", asym, 1e-3, true));
  out.push_back(make_check(suite, "asymmetry equals 2 J |tau'^222|", "tau^12 - tau^21 = -2 J tau'^222",
                           std::abs(asym - expected), chart_tol));

  // Identity and linear charts keep every block symmetric.
  Eigen::MatrixXd lin(2, 2);
  lin << 2.0, 1.0, 0.0, 1.0;
  const Box wide{Eigen::VectorXd::Constant(2, -2.0), Eigen::VectorXd::Constant(2, 2.0)};
  const auto tau_id = pushforward_traction_stress(ChartMap::identity(2, wide), a, taup, x);
  const auto tau_lin = pushforward_traction_stress(ChartMap::affine(lin, Eigen::VectorXd::Zero(2), wide), a, taup, x);
  MaxAbs id_asym, lin_asym;
  for (int r = 0; r < k; ++r) {
    id_asym(block_asymmetry(tau_id, 0, r));
    lin_asym(block_asymmetry(tau_lin, 0, r));
  }
  out.push_back(make_check(suite, "identity chart preserves all symmetries", "all blocks symmetric", id_asym.value,
                           1e-12));
  out.push_back(make_check(suite, "linear chart preserves all symmetries", "x^i_{,i'j'} = 0 => all blocks symmetric",
                           lin_asym.value, chart_tol));
  os << "identity chart: max block asymmetry " << fmt(id_asym.value) << "\n";
  os << "linear chart x' = [[2,1],[0,1]] x: max block asymmetry " << fmt(lin_asym.value) << "\n";

  // k = 2: the tau^{il} block transforms doubly contravariantly.
  Rng rng(7);
  MaxAbs k2_sym;
  MinAbs k2_asym;
  for (int trial = 0; trial < 10; ++trial) {
    const int nn = 2 + trial % 2;
    const ChartMap ch = nn == 2 ? example_chart() : random_triangular_chart(nn, rng, unit_box_of(nn));
    const auto aa = BundleTransition::identity(nn, 1);
    const Eigen::VectorXd y = random_point(Eigen::VectorXd::Zero(nn), Eigen::VectorXd::Ones(nn), rng);
    TractionStress t2(nn, 1, 2);
    for (int l = 0; l < nn; ++l) {
      t2(0, MultiIndex(nn), l) = random_coefficient(rng);
      for (int i = 0; i <= l; ++i) {
        const double v = random_coefficient(rng);
        t2(0, append(MultiIndex(nn), i), l) = v;
        t2(0, append(MultiIndex(nn), l), i) = v;
      }
    }
    k2_sym(block_asymmetry(pushforward_traction_stress(ch, aa, t2, y), 0, 1));
    auto skew = t2;
    skew(0, append(MultiIndex(nn), 0), 1) += 1.0;
    k2_asym(block_asymmetry(pushforward_traction_stress(ch, aa, skew, y), 0, 1));
  }
  out.push_back(make_check(suite, "k=2 symmetric tau' stays symmetric", "tau'^{i'l'} symmetric => tau^{il} symmetric",
                           k2_sym.value, chart_tol));
  out.push_back(make_check(suite, "k=2 asymmetric tau' stays asymmetric", "tau'^{i'l'} not symmetric => tau^{il} not",
                           k2_asym.value, 1e-3, true));
  os << "k = 2, 10 random cases: max asymmetry for symmetric tau' " << fmt(k2_sym.value)
     << ", min asymmetry for skewed tau' " << fmt(k2_asym.value) << "\n";
  result.table = os.str();
  return result;
}

TableResult dims_table(int n_max, int l_max) {
  TableResult result;
  std::ostringstream os;
  os << "  n  l  enumerate  (n+l-1)!/((n-1)! l!)\n";
  MaxAbs diff;
  for (int n = 1; n <= n_max; ++n) {
    for (int l = 0; l <= l_max; ++l) {
      const auto count = static_cast<std::int64_t>(enumerate(n, l).size());
      const std::int64_t closed = binomial(n + l - 1, l);
      diff(static_cast<double>(count - closed));
      char line[96];
      std::snprintf(line, sizeof line, "%3d %2d %10lld %10lld\n", n, l, static_cast<long long>(count),
                    static_cast<long long>(closed));
      os << line;
    }
  }
  result.table = os.str();
  result.checks.push_back(make_check("dims", "enumerate count", "|enumerate(n,l)| = (n+l-1)!/((n-1)! l!)",
                                     diff.value, 0.0));
  return result;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{
      "dims",       "arrows",     "duality",        "exterior-jet",    "divergence",       "measure",   "stokes",
      "covariance", "constitutive", "non-injectivity", "k1-degeneration", "symmetry-example", "euclidean"};
  return names;
}

std::vector<Check> run_suite(const std::string& name, const VerifyConfig& config) {
  using Runner = void (*)(Ctx&);
  static const std::map<std::string, Runner> runners{
      {"dims", suite_dims},
      {"arrows", suite_arrows},
      {"duality", suite_duality},
      {"exterior-jet", suite_exterior_jet},
      {"divergence", suite_divergence},
      {"measure", suite_measure},
      {"stokes", suite_stokes},
      {"covariance", suite_covariance},
      {"constitutive", suite_constitutive},
      {"non-injectivity", suite_non_injectivity},
      {"k1-degeneration", suite_k1},
      {"euclidean", suite_euclidean},
  };
  if (name == "symmetry-example") return example_symmetry().checks;
  const auto it = runners.find(name);
  if (it == runners.end()) throw std::invalid_argument("unknown suite \"" + name + "\"");
  Ctx ctx(config, name);
  try {
    it->second(ctx);
  } catch (const std::exception& e) {
    ctx.add("suite raised an exception", "", std::numeric_limits<double>::infinity(), 0.0, false, e.what());
  }
  return ctx.out;
}

Report run_verify(const VerifyConfig& config) {
  Report report;
  report.seed = config.seed;
  const auto& selected = config.suites.empty() ? suite_names() : config.suites;
  for (const auto& name : selected) {
    auto checks = run_suite(name, config);
    report.checks.insert(report.checks.end(), checks.begin(), checks.end());
  }
  return report;
}

bool Report::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

Json Report::to_json(bool with_timestamp) const {
  Json j;
  j["report_version"] = kReportVersion;
  j["seed"] = seed;
  j["environment"] = {{"library", std::string("jetstress ") + kLibraryVersion},
                      {"compiler", __VERSION__},
                      {"cplusplus", static_cast<long>(__cplusplus)},
                      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                    std::to_string(EIGEN_MINOR_VERSION)}};
  if (with_timestamp) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    j["timestamp"] = buf;
  }
  int failed = 0;
  Json checks = Json::array();
  for (const auto& c : this->checks) {
    if (!c.pass) ++failed;
    Json e{{"suite", c.suite},
           {"name", c.name},
           {"identity", c.identity},
           {"max_abs_residual", std::isfinite(c.residual) ? Json(c.residual) : Json(nullptr)},
           {"tolerance", c.tolerance},
           {"comparison", c.lower_bound ? ">" : "<="},
           {"pass", c.pass}};
    if (!c.note.empty()) e["note"] = c.note;
    checks.push_back(std::move(e));
  }
  j["pass"] = failed == 0;
  j["summary"] = {{"checks", this->checks.size()}, {"failed", failed}};
  j["checks"] = std::move(checks);
  return j;
}

std::string format_check(const Check& c) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e %s %.1e", c.residual, c.lower_bound ? ">" : "<=", c.tolerance);
  std::string s = std::string(c.pass ? "PASS " : "FAIL ") + c.suite + ": " + c.name + "  (" + buf + ")";
  if (!c.note.empty()) s += "  " + c.note;
  return s;
}

// ---------------------------------------------------------------------------
// Config.

namespace {

std::vector<int> int_list(const Json& j, const char* what) {
  std::vector<int> out;
  if (j.is_number_integer()) {
    out.push_back(j.get<int>());
  } else if (j.is_array() && !j.empty()) {
    for (const auto& e : j) {
      if (!e.is_number_integer()) throw ParseError(std::string(what) + " must hold integers");
      out.push_back(e.get<int>());
    }
  } else {
    throw ParseError(std::string(what) + " must be an integer or a non-empty list of integers");
  }
  return out;
}

void require_range(const std::vector<int>& v, int lo, int hi, const char* what) {
  for (int x : v) {
    if (x < lo || x > hi) {
      throw ParseError(std::string(what) + " = " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]");
    }
  }
}

bool contains(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

}  // namespace

VerifyConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("config must be a JSON object");
  static const std::vector<std::string> known{"n",       "m",       "k",          "seed",    "points",
                                              "systems", "suites",  "tolerances", "fields",  "section",
                                              "chart",   "transition", "regions", "fault_injection", "export",
                                              "quadrature_order"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      throw ParseError("unknown config field \"" + it.key() + "\"");
    }
  }
  VerifyConfig c;
  c.source = j;
  try {
    if (j.contains("n")) c.ns = int_list(j["n"], "n");
    if (j.contains("k")) c.ks = int_list(j["k"], "k");
    if (j.contains("m")) {
      if (!j["m"].is_number_integer()) throw ParseError("m must be an integer");
      c.m = j["m"].get<int>();
    }
    require_range(c.ns, 1, 4, "n");
    require_range(c.ks, 1, 4, "k");
    require_range({c.m}, 1, 3, "m");
    if (j.contains("seed")) {
      if (!j["seed"].is_number_unsigned()) throw ParseError("seed must be a non-negative integer");
      c.seed = j["seed"].get<std::uint64_t>();
    }
    for (const char* key : {"points", "systems"}) {
      if (!j.contains(key)) continue;
      if (!j[key].is_number_integer() || j[key].get<int>() < 1) {
        throw ParseError(std::string(key) + " must be a positive integer");
      }
      (std::string(key) == "points" ? c.points : c.systems) = j[key].get<int>();
    }
    if (j.contains("quadrature_order")) {
      const Json& q = j["quadrature_order"];
      if (!q.is_number_integer() || q.get<int>() < 1 || q.get<int>() > 60) {
        throw ParseError("quadrature_order must be an integer in [1, 60]");
      }
      c.quadrature_order = q.get<int>();
    }
    if (j.contains("suites")) {
      const Json& s = j["suites"];
      if (s.is_string()) {
        c.suites.push_back(s.get<std::string>());
      } else if (s.is_array()) {
        for (const auto& e : s) {
          if (!e.is_string()) throw ParseError("suites must be strings");
          c.suites.push_back(e.get<std::string>());
        }
      } else {
        throw ParseError("suites must be a string or a list of strings");
      }
      for (const auto& name : c.suites) {
        if (std::find(suite_names().begin(), suite_names().end(), name) == suite_names().end()) {
          throw ParseError("unknown suite \"" + name + "\"");
        }
      }
    }
    if (j.contains("tolerances")) {
      const Json& t = j["tolerances"];
      if (!t.is_object()) throw ParseError("tolerances must be an object");
      for (auto it = t.begin(); it != t.end(); ++it) {
        if (!it.value().is_number() || it.value().get<double>() < 0) {
          throw ParseError("tolerance " + it.key() + " must be a non-negative number");
        }
        const double v = it.value().get<double>();
        if (it.key() == "algebraic") {
          c.tol.algebraic = v;
        } else if (it.key() == "chart") {
          c.tol.chart = v;
        } else if (it.key() == "quadrature") {
          c.tol.quadrature = v;
        } else {
          throw ParseError("unknown tolerance \"" + it.key() + "\"");
        }
      }
    }
    if (j.contains("fields")) {
      if (!j["fields"].is_array()) throw ParseError("fields must be a list");
      for (const auto& f : j["fields"]) {
        auto spec = field_from_json(f);
        if (!contains(c.ns, spec.n) || !contains(c.ks, spec.k) || spec.m != c.m) {
          throw ParseError("field shape (n=" + std::to_string(spec.n) + ", m=" + std::to_string(spec.m) +
                           ", k=" + std::to_string(spec.k) + ") is not among the configured dimensions");
        }
        c.fields.push_back(std::move(spec));
      }
    }
    if (j.contains("section")) {
      const Json& s = j["section"];
      if (!s.is_array() || static_cast<int>(s.size()) != c.m) throw ParseError("section must list m expressions");
      int arity = 1;
      for (const auto& e : s) arity = std::max(arity, expr_from_json(e).arity());
      int n = arity;
      for (int cand : c.ns) {
        if (cand >= arity) {
          n = cand;
          break;
        }
      }
      if (!contains(c.ns, n)) throw ParseError("section reads more variables than any configured n");
      c.section = map_from_json(s, n);
    }
    if (j.contains("chart")) {
      c.chart = chart_from_json(j["chart"]);
      if (!contains(c.ns, c.chart->dimension())) throw ParseError("chart dimension is not a configured n");
    }
    if (j.contains("transition")) {
      const int n = c.chart ? c.chart->dimension() : c.ns.front();
      c.transition = transition_from_json(j["transition"], n);
      if (c.transition->m != c.m) throw ParseError("transition must be an m x m matrix");
    }
    if (j.contains("regions")) {
      if (!j["regions"].is_array()) throw ParseError("regions must be a list");
      for (const auto& r : j["regions"]) {
        auto region = region_from_json(r);
        if (!contains(c.ns, region.dimension())) throw ParseError("region dimension is not a configured n");
        c.regions.push_back(std::move(region));
      }
    }
    if (j.contains("fault_injection")) {
      if (!j["fault_injection"].is_string()) throw ParseError("fault_injection must be a string");
      c.fault_injection = j["fault_injection"].get<std::string>();
      if (!c.fault_injection.empty() && c.fault_injection != "collapse_factor") {
        throw ParseError("unknown fault_injection \"" + c.fault_injection + "\"");
      }
    }
    if (j.contains("export")) {
      const Json& e = j["export"];
      if (!e.is_object()) throw ParseError("export must be an object");
      if (e.contains("grid")) {
        if (!e["grid"].is_number_integer() || e["grid"].get<int>() < 1 || e["grid"].get<int>() > 64) {
          throw ParseError("export.grid must be an integer in [1, 64]");
        }
        c.export_grid = e["grid"].get<int>();
      }
    }
  } catch (const ParseError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  } catch (const std::out_of_range& e) {
    throw ParseError(e.what());
  }
  return c;
}

// ---------------------------------------------------------------------------
// Export.

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
  return buf;
}

struct ExportField {
  FieldKind kind;
  int n, m, k;
  SmoothMap map;
};

}  // namespace

Json export_samples(const VerifyConfig& config, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const int n = config.ns.front(), m = config.m, k = config.ks.front();
  Rng rng = suite_rng(config.seed, "export");

  std::vector<ExportField> fields;
  for (const auto& f : config.fields) {
    if (f.n == n && f.k == k) fields.push_back({f.kind, f.n, f.m, f.k, f.map});
  }
  const bool random = fields.empty();
  if (random) {
    fields.push_back({FieldKind::variational, n, m, k, random_var_stress_field(n, m, k, k + 2, rng).map});
    fields.push_back({FieldKind::traction, n, m, k, random_traction_field(n, m, k, k + 2, rng).map});
    fields.push_back({FieldKind::nonholonomic, n, m, k, random_nhs_field(n, m, k, k + 2, rng).map});
    fields.push_back({FieldKind::bodyforce, n, m, k, random_body_force_field(n, m, k, k + 2, rng).map});
  }
  const SmoothMap w = config.section && config.section->inputs() == n ? *config.section
                                                                       : random_polynomial_map(n, m, k + 2, rng);
  Region region = Region::unit_box(n);
  for (const auto& r : config.regions) {
    if (r.dimension() == n && r.shape == Shape::box) {
      region = r;
      break;
    }
  }

  const int g = config.export_grid;
  int total = 1;
  for (int i = 0; i < n; ++i) total *= g;
  std::vector<Eigen::VectorXd> grid;
  for (int t = 0; t < total; ++t) {
    Eigen::VectorXd x(n);
    int rest = t;
    for (int i = 0; i < n; ++i) {
      x(i) = region.lo(i) + (region.hi(i) - region.lo(i)) * ((rest % g) + 0.5) / g;
      rest /= g;
    }
    grid.push_back(x);
  }

  Json manifest;
  manifest["report_version"] = kReportVersion;
  manifest["seed"] = config.seed;
  manifest["n"] = n;
  manifest["m"] = m;
  manifest["k"] = k;
  manifest["grid"] = g;
  manifest["region"] = to_json(region);
  manifest["random_fields"] = random;
  if (w.expressions()) {
    Json sec = Json::array();
    for (const auto& e : *w.expressions()) sec.push_back(to_json(e));
    manifest["section"] = sec;
  }
  manifest["power_column"] =
      "variational: S . j^k w; bodyforce: b . j^{k-1} w; nonholonomic: P . j1(j^{k-1} w); traction: d(tau . "
      "j^{k-1} w)/dx";
  Json files = Json::array();

  std::ofstream tractions;
  bool any_traction = false;
  for (std::size_t f = 0; f < fields.size(); ++f) {
    const auto& field = fields[f];
    const std::string name = "field" + std::to_string(f) + "_" + to_string(field.kind) + ".csv";
    std::ofstream os(out_dir / name);
    if (!os) throw std::runtime_error("cannot write " + (out_dir / name).string());
    const int count = component_count(field.kind, n, m, k);
    for (int i = 0; i < n; ++i) os << "x" << i + 1 << ",";
    for (int c = 0; c < count; ++c) os << component_key(field.kind, n, m, k, c) << ",";
    os << "power\n";
    const TractionField tau_field = field.kind == FieldKind::traction ? TractionField(n, m, k, field.map)
                                                                      : TractionField();
    const VarStressField reduced =
        field.kind == FieldKind::traction ? reduced_exterior_jet(tau_field) : VarStressField();
    for (const auto& x : grid) {
      const Eigen::VectorXd values = field.map.value(x);
      double power = 0.0;
      switch (field.kind) {
        case FieldKind::variational:
          power = var_pair(VariationalStress::unflatten(n, m, k, values), prolong(w, x, k));
          break;
        case FieldKind::bodyforce:
          power = body_pair(BodyForce::unflatten(n, m, k, values), prolong(w, x, k - 1));
          break;
        case FieldKind::nonholonomic:
          power = nh_pair(NonHolStress::unflatten(n, m, k, values), include_holonomic(prolong(w, x, k)));
          break;
        case FieldKind::traction:
          power = var_pair(reduced.at(x), prolong(w, x, k));
          break;
      }
      for (int i = 0; i < n; ++i) os << num(x(i)) << ",";
      for (int c = 0; c < count; ++c) os << num(values(c)) << ",";
      os << num(power) << "\n";
    }
    files.push_back({{"path", name}, {"kind", to_string(field.kind)}, {"rows", grid.size()}, {"components", count}});

    if (field.kind == FieldKind::traction && n > 1) {
      if (!any_traction) {
        tractions.open(out_dir / "tractions.csv");
        tractions << "field,face,sign";
        for (int i = 0; i < n; ++i) tractions << ",z" << i + 1;
        HyperTraction shape(n, m, k);
        for (int a = 0; a < m; ++a) {
          for (const auto& idx : enumerate_up_to(n, k - 1)) {
            tractions << ",a" << a + 1 << ":J[";
            for (int r = 0; r < n; ++r) tractions << (r ? "," : "") << idx[r];
            tractions << "]";
          }
        }
        tractions << ",power\n";
        any_traction = true;
      }
      const auto faces = region.faces();
      for (std::size_t fi = 0; fi < faces.size(); ++fi) {
        const auto& face = faces[fi];
        const Eigen::VectorXd z = face.point(Eigen::VectorXd::Constant(n - 1, face.shape == Shape::box ? 0.5 : 1.0 / n));
        const auto t = hyper_traction(tau_field.at(z), face.frame);
        const auto v = prolong(w, z, k - 1);
        tractions << f << "," << fi << "," << face.sign;
        for (int i = 0; i < n; ++i) tractions << "," << num(z(i));
        const Eigen::VectorXd flat = t.flatten();
        for (Eigen::Index c = 0; c < flat.size(); ++c) tractions << "," << num(face.sign * flat(c));
        tractions << "," << num(face.sign * body_pair(BodyForce::unflatten(n, m, k, t.flatten()), v)) << "\n";
      }
    }
  }
  if (any_traction) {
    files.push_back({{"path", "tractions.csv"},
                     {"kind", "hyper-traction"},
                     {"note", "face centres; values against the face parametrization measure, outward orientation"}});
  }
  manifest["files"] = files;
  std::ofstream(out_dir / "manifest.json") << manifest.dump(2) << "\n";
  return manifest;
}

}  // namespace jetstress
