// liesphere <pipeline> --config <path> [--out <dir>] [--verbose]
//
// Runs the configured verification pipelines and writes report.json,
// timing.json, CSV tables and OBJ meshes under the output directory.
// Exit codes: 0 all checks pass, 1 check failure, 2 usage/config error,
// 3 runtime error.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "liesphere/liesphere.hpp"

namespace {

using liesphere::cli::Pipeline;
using liesphere::cli::RunConfig;

void print_report(const liesphere::cli::RunReport& rep, bool verbose) {
  for (const auto& p : rep.pipelines) {
    for (const auto& c : p.checks) {
      if (!c.error.empty())
        std::printf("[FAIL] %s/%s: %s\n", pipeline_name(p.pipeline), c.name.c_str(),
                    c.error.c_str());
      else
        std::printf("[%s] %s/%s  residual %.3e  tolerance %.3e\n", c.pass ? "PASS" : "FAIL",
                    pipeline_name(p.pipeline), c.name.c_str(), c.max_residual, c.tolerance);
    }
    if (verbose) {
      for (const auto& a : p.artifacts)
        std::printf("       %s/%s\n", pipeline_name(p.pipeline), a.c_str());
      std::printf("       %s took %.2f s\n", pipeline_name(p.pipeline), p.seconds);
    }
  }
  std::printf("%s\n", rep.pass() ? "all checks passed" : "CHECKS FAILED");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lie sphere geometry verification pipelines"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  bool verbose = false;

  std::optional<Pipeline> selected;
  bool run_all = false;
  auto add_pipeline = [&](const std::string& name, const std::string& desc,
                          std::optional<Pipeline> p) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", config_path, "JSON run configuration")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (default: the config's 'out')");
    sub->add_flag("--verbose", verbose, "print artifacts and timings");
    sub->callback([&, p] {
      selected = p;
      run_all = !p.has_value();
    });
    return sub;
  };

  add_pipeline("check-gc", "compatibility residuals of the configured family", Pipeline::check_gc);
  add_pipeline("integrate", "frame transport with conservation checks", Pipeline::integrate);
  add_pipeline("surface", "sphere congruences, reconstruction and operator checks",
               Pipeline::surface);
  add_pipeline("landau", "lowest Landau level profile and operator pair", Pipeline::landau);
  add_pipeline("euclid-roundtrip", "surface -> potentials -> frame -> surface round trip",
               Pipeline::euclid_roundtrip);
  add_pipeline("wilczynski", "real projective frames in wedge coordinates",
               Pipeline::wilczynski);
  add_pipeline("all", "every pipeline listed in the config", std::nullopt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    RunConfig cfg = liesphere::cli::load_config(config_path);
    if (selected) {
      cfg.pipelines = {*selected};
      liesphere::cli::validate_config(cfg);
    } else if (run_all && cfg.pipelines.empty()) {
      std::fprintf(stderr, "error: config lists no pipelines\n");
      return 2;
    }
    const std::filesystem::path out = out_dir.empty() ? cfg.out : out_dir;

    const auto rep = liesphere::cli::run(cfg, out);
    print_report(rep, verbose);
    return rep.pass() ? 0 : 1;
  } catch (const liesphere::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const liesphere::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const liesphere::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
