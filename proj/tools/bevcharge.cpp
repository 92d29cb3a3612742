// bevcharge: validate fleet datasets, compute consumption/emission trees and
// write report tables.
//
//   bevcharge validate --data DIR
//   bevcharge compute  --data DIR [--years 2020..2022] [--out FILE] [--format json|csv]
//   bevcharge report   --data DIR [--level national|zone|model|version] [--format md|csv]
//                      [--intensity] [--growth] [--scale stock|all-sales]
//
// --data defaults to $BEV_DATA_DIR. --config FILE reads key=value defaults
// (use "report.level=zone" or an [report] section for subcommand options);
// flags given on the command line win.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bevcharge/cli.hpp"
#include "bevcharge/version.hpp"

namespace {

using namespace bevcharge;

void add_data_option(CLI::App* cmd, std::string& data) {
  cmd->add_option("--data", data, "Dataset directory (versions.csv, sales.csv, zones.csv)")
      ->envname("BEV_DATA_DIR")
      ->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bottom-up BEV charging demand and emissions accounting"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kVersion);
  app.set_config("--config", "", "Read option defaults from a key=value file");
  app.require_subcommand(1, 1);

  std::string data;

  auto* validate = app.add_subcommand("validate", "Check a dataset and list diagnostics");
  add_data_option(validate, data);

  cli::ComputeRequest compute_req;
  std::string compute_format = "json";
  std::string compute_out;
  auto* compute = app.add_subcommand("compute", "Evaluate the full result tree");
  add_data_option(compute, data);
  compute->add_option("--years", compute_req.years, "Year, range Y1..Y2 or list (default: all)");
  compute->add_option("--out", compute_out, "Output file (default: stdout)");
  compute->add_option("--format", compute_format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  compute->add_option("--threads", compute_req.threads, "Worker threads")
      ->check(CLI::Range(1u, 256u));
  compute->add_option("--uncertainty", compute_req.uncertainty,
                      "Fraction for the national low/high band");

  cli::ReportRequest report_req;
  std::string level = "national";
  std::string report_format = "md";
  std::string scale;
  std::string denominator = "cumulative";
  std::string report_out;
  auto* report = app.add_subcommand("report", "Write contribution, growth, intensity and scaling tables");
  add_data_option(report, data);
  report->add_option("--years", report_req.years, "Year, range Y1..Y2 or list (default: all)");
  report->add_option("--level", level, "version, model, zone or national")
      ->check(CLI::IsMember({"version", "model", "zone", "national"}));
  report->add_option("--format", report_format, "md or csv")->check(CLI::IsMember({"md", "csv"}));
  report->add_flag("--intensity", report_req.intensity, "Per-vehicle energy and carbon intensity");
  report->add_flag("--growth", report_req.growth, "Annual change rates");
  report->add_option("--scale", scale, "Scale totals to the BEV stock or all BEV sales")
      ->check(CLI::IsMember({"stock", "all-sales"}));
  report->add_option("--intensity-denominator", denominator,
                     "Fleet used for intensities: cumulative or single-year")
      ->check(CLI::IsMember({"cumulative", "single-year"}));
  report->add_option("--uncertainty", report_req.uncertainty, "Band fraction (default 0.10)");
  report->add_option("--out", report_out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitValidation;
  }

  try {
    if (*validate) return cli::run_validate(data, std::cout, std::cerr);
    if (*compute) {
      compute_req.data = data;
      compute_req.format = cli::parse_format(compute_format);
      if (!compute_out.empty()) compute_req.out = compute_out;
      return cli::run_compute(compute_req, std::cout, std::cerr);
    }
    report_req.data = data;
    report_req.level = cli::parse_level(level);
    report_req.format = cli::parse_format(report_format);
    report_req.fleet_mode = cli::parse_fleet_mode(denominator);
    if (!scale.empty()) report_req.scale = cli::parse_scale(scale);
    if (!report_out.empty()) report_req.out = report_out;
    return cli::run_report(report_req, std::cout, std::cerr);
  } catch (const Error& e) {
    cli::print_error(e, std::cerr);
    return cli::exit_code_for(e);
  }
}
