// Command-line front end: run scenario files or bundled scenarios and report.
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "lgconn/scenario.hpp"

namespace {

int cmd_list()
{
  for (const auto & s : lgconn::bundled_scenarios()) {
    std::printf("%-26s %s%s\n", s.name.c_str(), s.negative_control ? "[negative control] " : "",
                s.description.c_str());
  }
  return lgconn::kExitPass;
}

int cmd_show(const std::string & name)
{
  const nlohmann::json doc = lgconn::load_scenario(name);
  std::cout << doc.dump(2) << "\n";
  return lgconn::kExitPass;
}

int cmd_run(const std::string & target, const lgconn::RunOverrides & overrides, const std::string & report_path,
            bool json_only)
{
  const nlohmann::json doc = lgconn::apply_overrides(lgconn::load_scenario(target), overrides);
  const lgconn::RunReport report = lgconn::run_scenario(doc);
  const std::string body = report.to_json().dump(2) + "\n";
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out || !(out << body)) {
      throw lgconn::ConfigError("--report", "cannot write " + report_path);
    }
  }
  if (json_only) {
    std::cout << body;
  } else {
    std::cout << report.render_table();
  }
  return report.exit_code();
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Validate connection coefficients on Lie group fiber bundles"};
  app.require_subcommand(1);

  auto * list = app.add_subcommand("list", "List bundled scenarios");

  std::string show_name;
  auto * show = app.add_subcommand("show", "Print a bundled scenario as JSON");
  show->add_option("name", show_name, "Bundled scenario name or file")->required();

  std::string target;
  std::string report_path;
  bool json_only = false;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  double tol = 0.0;
  auto * run = app.add_subcommand("run", "Run a scenario file or bundled scenario");
  run->add_option("scenario", target, "Scenario file path or bundled scenario name")->required();
  auto * seed_opt = run->add_option("--seed", seed, "Sampling seed (overrides sampling.seed)");
  auto * samples_opt =
    run->add_option("--samples", samples, "Sample count (overrides sampling.count)")->check(CLI::PositiveNumber);
  auto * tol_opt =
    run->add_option("--tol", tol, "Absolute tolerance (overrides tolerances.abs_tol)")->check(CLI::PositiveNumber);
  run->add_option("--report", report_path, "Write the JSON report to this path");
  run->add_flag("--json-only", json_only, "Print the JSON report instead of the summary table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    return code == 0 ? lgconn::kExitPass : lgconn::kExitConfigError;
  }

  try {
    if (*list) {
      return cmd_list();
    }
    if (*show) {
      return cmd_show(show_name);
    }
    lgconn::RunOverrides overrides;
    if (*seed_opt) {
      overrides.seed = seed;
    }
    if (*samples_opt) {
      overrides.samples = samples;
    }
    if (*tol_opt) {
      overrides.abs_tol = tol;
    }
    return cmd_run(target, overrides, report_path, json_only);
  } catch (const lgconn::ConfigError & e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return lgconn::kExitConfigError;
  } catch (const lgconn::Error & e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return lgconn::kExitValidationFailure;
  }
}
