// Command-line runner: scenario evaluation, fringe scans and
// series-comparison studies with deterministic CSV/JSON output.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "atomif/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Options {
  std::string scenario_path;
  bool scan = false;
  std::string method_override;
  bool compare_series = false;
  std::string out_path;
  std::string format = "csv";
};

void write_output(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open output file '" + path + "'");
  }
  out << content;
}

int run(const Options& opt) {
  std::string stage = "scenario";
  try {
    atomif::Scenario scenario = atomif::load_scenario(opt.scenario_path);
    if (!opt.method_override.empty()) {
      scenario.method = atomif::MethodSpec::parse(opt.method_override);
    }

    stage = "evaluation";
    const atomif::Report report = atomif::run_scenario(scenario);
    std::cout << atomif::report_to_text(report);

    std::optional<atomif::ScanTable> scan_table;
    if (opt.scan) {
      stage = "scan";
      scan_table = atomif::run_scan(scenario);
      if (scenario.scan && scenario.scan->variable ==
                               atomif::ScanSpec::Variable::LaserPhaseLast) {
        const atomif::FringeFit fit = atomif::fit_fringe(
            *scan_table, report.detection.sign, report.last_coefficient);
        std::cout << "fringe_fit_phase_mod_2pi: "
                  << atomif::format_double(fit.phase_mod_2pi) << "\n";
        std::cout << "fringe_fit_visibility: "
                  << atomif::format_double(fit.visibility) << "\n";
      }
    }

    std::vector<atomif::SeriesComparison> comparisons;
    if (opt.compare_series) {
      stage = "series-comparison";
      comparisons = atomif::compare_series(scenario);
      std::cout << atomif::comparisons_to_text(comparisons);
    }

    stage = "output";
    if (!opt.out_path.empty()) {
      if (opt.format == "csv") {
        if (!scan_table) {
          throw atomif::ConfigError(
              "--format csv needs --scan (CSV output is the scan table)");
        }
        write_output(opt.out_path, atomif::scan_to_csv(*scan_table));
      } else {
        std::string json = "{\n\"report\": " + atomif::report_to_json(report);
        if (scan_table) {
          json.back() = ',';
          json += "\n\"scan\": " + atomif::scan_to_json(*scan_table);
        }
        if (!comparisons.empty()) {
          json.back() = ',';
          json += "\n\"series_comparison\": " +
                  atomif::comparisons_to_json(comparisons);
        }
        json += "}\n";
        write_output(opt.out_path, json);
      }
    } else if (scan_table) {
      std::cout << atomif::scan_to_csv(*scan_table);
    }
    return kExitOk;
  } catch (const atomif::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical error in stage '" << stage << "': " << e.what()
              << "\n";
    return kExitNumerical;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "atomif: phase shift, visibility and exit-port probability for "
      "light-pulse atom interferometers in quadratic potentials"};
  app.require_subcommand(1);

  Options opt;
  CLI::App* run_cmd = app.add_subcommand("run", "evaluate a scenario file");
  run_cmd->add_option("--scenario", opt.scenario_path, "scenario JSON file")
      ->required();
  run_cmd->add_flag("--scan", opt.scan, "evaluate the scenario's scan block");
  run_cmd->add_option("--method", opt.method_override,
                      "exact|perturbative:<k>|oracle:<h> (overrides the file)");
  run_cmd->add_flag("--compare-series", opt.compare_series,
                    "halving study against the closed-form expansions");
  run_cmd->add_option("--out", opt.out_path, "output file path");
  run_cmd
      ->add_option("--format", opt.format, "output format for --out")
      ->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  return run(opt);
}
