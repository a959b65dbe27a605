// Acceptance run: one PASS/FAIL line per criterion, at the default sampling
// (n in {2,3}, k in {2,3}, m = 2, 100 points x 20 systems).

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "jetstress/verify.hpp"

using namespace jetstress;

namespace {

struct Criterion {
  int id;
  std::string title;
  double time_limit;  // seconds; 0 = none
  std::function<std::vector<Check>()> checks;
};

std::vector<Check> select(const std::vector<Check>& all, std::vector<std::string> prefixes) {
  std::vector<Check> out;
  for (const auto& c : all) {
    for (const auto& p : prefixes) {
      if (c.name.rfind(p, 0) == 0) {
        out.push_back(c);
        break;
      }
    }
  }
  return out;
}

std::function<std::vector<Check>()> from_suite(const VerifyConfig& config, std::string suite,
                                               std::vector<std::string> prefixes) {
  return [&config, suite, prefixes] { return select(run_suite(suite, config), prefixes); };
}

}  // namespace

int main() {
  const VerifyConfig config;
  const std::vector<Criterion> criteria{
      {1, "symmetric dimension table, n <= 5, l <= 5", 1.0, from_suite(config, "dims", {"enumerate count"})},
      {2, "arrow laws on 1000 random arrays", 5.0,
       from_suite(config, "arrows", {"collapse o spread", "pairing transfer"})},
      {3, "exterior-jet identity, 100 points x 20 systems", 30.0,
       from_suite(config, "exterior-jet", {"exterior jet ["})},
      {4, "dual-restriction identity, same sampling", 0.0, from_suite(config, "duality", {"dual restriction"})},
      {5, "equilibrium biconditional", 0.0,
       from_suite(config, "divergence",
                  {"div of induced", "p_tau of induced", "equilibrium only-if", "perturbed stress"})},
      {6, "three force functionals agree on unit box and simplex, k <= 3", 60.0,
       from_suite(config, "stokes", {"three force functionals"})},
      {7, "covariance of S, tau, P; G triangular; vanishing above order", 0.0,
       from_suite(config, "covariance",
                  {"S pairing", "tau form", "P pairing", "G block-triangular", "vanishing above order"})},
      {8, "symmetry non-invariance example and the k = 2 case", 5.0, [] { return example_symmetry().checks; }},
      {9, "non-injectivity of the restriction at n = 2, k = 2", 0.0,
       [&config] {
         auto all = run_suite("non-injectivity", config);
         std::vector<Check> out;
         for (const auto& c : select(all, {"kernel element is non-zero", "kernel element restricts"})) {
           if (c.name.find("[n=2 k=2]") != std::string::npos) out.push_back(c);
         }
         return out;
       }},
      {10, "constitutive gradients vs central differences, quadratic exact", 0.0,
       from_suite(config, "constitutive", {"gradient vs central", "non-holonomic gradient", "quadratic potential"})},
      {11, "Euclidean integration-by-parts cross-check, n = 3, k = 2", 0.0, from_suite(config, "euclidean", {""})},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    const auto checks = c.checks();
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    int passed = 0;
    double worst = 0.0, tol = 0.0;
    std::string first_failure;
    for (const auto& k : checks) {
      if (k.pass) {
        ++passed;
      } else if (first_failure.empty()) {
        first_failure = k.name;
      }
      if (!k.lower_bound && k.residual >= worst) {
        worst = k.residual;
        tol = k.tolerance;
      }
    }
    const bool in_time = c.time_limit <= 0.0 || seconds < c.time_limit;
    const bool ok = !checks.empty() && passed == static_cast<int>(checks.size()) && in_time;
    if (!ok) ++failed;
    char timing[64];
    if (c.time_limit > 0.0) {
      std::snprintf(timing, sizeof timing, "%.2f s (limit %.0f s)", seconds, c.time_limit);
    } else {
      std::snprintf(timing, sizeof timing, "%.2f s", seconds);
    }
    std::printf("%s criterion %2d: %s | %d/%zu checks, worst residual %.3e (tol %.0e) | %s%s%s\n",
                ok ? "PASS" : "FAIL", c.id, c.title.c_str(), passed, checks.size(), worst, tol, timing,
                first_failure.empty() ? "" : " | first failure: ", first_failure.c_str());
  }
  std::printf("%s: %zu/%zu criteria\n", failed == 0 ? "PASS" : "FAIL", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
