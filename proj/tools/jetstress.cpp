#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>

#include "jetstress/verify.hpp"

namespace js = jetstress;

namespace {

constexpr int kPass = 0;
constexpr int kCheckFailure = 1;
constexpr int kParseError = 2;

js::VerifyConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw js::ParseError("cannot open config " + path);
  js::Json j;
  try {
    j = js::Json::parse(in);
  } catch (const js::Json::parse_error& e) {
    throw js::ParseError(path + ": " + e.what());
  }
  return js::config_from_json(j);
}

int print_table(const js::TableResult& result) {
  std::cout << result.table;
  bool ok = true;
  for (const auto& c : result.checks) {
    std::cout << js::format_check(c) << "\n";
    ok = ok && c.pass;
  }
  return ok ? kPass : kCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification harness for higher-order continuum stresses on jet bundles"};
  app.require_subcommand(1);

  std::string config_path, suite, report_path, out_dir;
  std::uint64_t seed = 0;
  bool json_out = false, quiet = false;
  auto* verify = app.add_subcommand("verify", "Run the identity suites and print one line per check");
  verify->add_option("--config", config_path, "JSON configuration")->required();
  verify->add_option("--suite", suite, "Run only this suite");
  auto* seed_opt = verify->add_option("--seed", seed, "Override the configured seed");
  verify->add_option("--report", report_path, "Write the JSON report here");
  verify->add_flag("--json", json_out, "Print the JSON report instead of check lines");
  verify->add_flag("-q,--quiet", quiet, "Print failures and the summary only");

  app.add_subcommand("example-symmetry", "Symmetry of pushed-forward traction stresses under a nonlinear chart");

  int dims_n = 4, dims_l = 4;
  auto* dims = app.add_subcommand("dims", "Counts of symmetric multi-indices");
  dims->add_option("--n", dims_n, "Largest base dimension")->check(CLI::Range(1, 12));
  dims->add_option("--l", dims_l, "Largest degree")->check(CLI::Range(0, 12));

  auto* exp = app.add_subcommand("export", "Sample configured fields on a grid to CSV");
  exp->add_option("--config", config_path, "JSON configuration")->required();
  exp->add_option("--out", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParseError;
  }

  try {
    if (*verify) {
      auto config = load_config(config_path);
      if (*seed_opt) config.seed = seed;
      if (!suite.empty()) {
        const auto& names = js::suite_names();
        if (std::find(names.begin(), names.end(), suite) == names.end()) {
          throw js::ParseError("unknown suite \"" + suite + "\"");
        }
        config.suites = {suite};
      }
      const auto report = js::run_verify(config);
      const auto doc = report.to_json();
      if (!report_path.empty()) std::ofstream(report_path) << doc.dump(2) << "\n";
      if (json_out) {
        std::cout << doc.dump(2) << "\n";
      } else {
        int failed = 0;
        for (const auto& c : report.checks) {
          if (!c.pass) ++failed;
          if (!quiet || !c.pass) std::cout << js::format_check(c) << "\n";
        }
        std::cout << (failed == 0 ? "PASS" : "FAIL") << ": " << report.checks.size() - failed << "/"
                  << report.checks.size() << " checks (seed " << report.seed << ", report_version "
                  << js::kReportVersion << ")\n";
      }
      return report.pass() ? kPass : kCheckFailure;
    }
    if (app.got_subcommand("example-symmetry")) return print_table(js::example_symmetry());
    if (*dims) return print_table(js::dims_table(dims_n, dims_l));
    if (*exp) {
      const auto manifest = js::export_samples(load_config(config_path), out_dir);
      std::cout << "wrote " << manifest["files"].size() << " files and manifest.json to " << out_dir << "\n";
      return kPass;
    }
  } catch (const js::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailure;
  }
  return kParseError;
}
