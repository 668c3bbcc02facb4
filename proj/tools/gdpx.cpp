// gdpx — measures excess arrival delay caused by Ground Delay Programs and
// attributes it to program characteristics.
//
// Subcommands mirror the pipeline stages so a failed run can resume from the
// artifacts already on disk:
//   synth     generate a synthetic scenario (three CSVs + ground_truth.json)
//   classify  classify flights against each program  -> classified_flights.csv
//   measure   queueing counterfactual per program    -> excess.csv [+ svg/]
//   features  program-level design matrix            -> features.csv
//   fit       OLS/ridge/lasso fits from features.csv -> fit_report.json
//   report    fits + importance + summary from existing artifacts
//   run       the whole pipeline
//
// Exit code 0 means zero stage errors; every stage error is printed to
// stderr as "stage <name>: <detail>". Set GDPX_LOG=info|debug for progress
// logging on stderr.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gdpx/errors.hpp"
#include "gdpx/pipeline.hpp"
#include "gdpx/synth.hpp"

namespace {

int run_synth(const std::string& config_path, const std::string& out_dir,
              const std::optional<std::uint64_t>& seed_override) {
  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "gdpx synth: cannot open config " << config_path << "\n";
    return 2;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  gdpx::synth::ScenarioConfig cfg = gdpx::synth::parse_scenario_config(buf.str());
  if (seed_override) cfg.seed = *seed_override;
  const gdpx::synth::Scenario scenario = gdpx::synth::generate_scenario(cfg);
  gdpx::synth::write_scenario(scenario, out_dir);
  std::cerr << "wrote " << scenario.flights.size() << " flights, "
            << scenario.truth.gdps.size() << " programs to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"excess-delay measurement and attribution for Ground Delay Programs"};
  app.require_subcommand(1);

  // synth has its own argument set
  std::string synth_config, synth_out;
  std::optional<std::uint64_t> synth_seed;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic scenario");
  synth->add_option("--config", synth_config, "scenario config JSON")->required();
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--seed", synth_seed, "override the config seed");

  // pipeline stages share one config; exactly one subcommand parses
  gdpx::pipeline::RunConfig cfg;
  std::string flights, quarters, advisories, out_dir, epoch;
  auto bind_inputs = [&](CLI::App* cmd, bool quarters_required) {
    cmd->add_option("--flights", flights, "flight records CSV")->required();
    auto* q = cmd->add_option("--quarters", quarters, "quarter-hour ARR RATE CSV");
    if (quarters_required) q->required();
    cmd->add_option("--advisories", advisories, "GDP advisory events CSV")->required();
  };
  auto bind_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_dir, "output directory")->required();
    cmd->add_option("--seed", cfg.seed, "master seed")->capture_default_str();
    cmd->add_option("--epoch", epoch,
                    "run epoch, YYYY-MM-DDTHH:MMZ quarter-aligned "
                    "(default: midnight before the earliest input time)");
    cmd->add_option("--taxi-in-min", cfg.taxi_in_min, "scheduled taxi-in minutes")
        ->capture_default_str();
  };
  auto bind_fit = [&](CLI::App* cmd) {
    cmd->add_option("--others-threshold", cfg.others_threshold,
                    "min programs/year for an airport's own indicator column")
        ->capture_default_str();
    cmd->add_option("--test-fraction", cfg.test_fraction, "held-out fraction")
        ->capture_default_str();
    cmd->add_option("--folds", cfg.folds, "cross-validation folds")->capture_default_str();
    cmd->add_option("--lambda-grid", cfg.lambda_grid, "penalty grid, comma separated")
        ->delimiter(',');
    cmd->add_option("--perm-repeats", cfg.perm_repeats, "permutation importance repeats")
        ->capture_default_str();
  };

  CLI::App* classify = app.add_subcommand("classify", "classify flights per program");
  bind_inputs(classify, false);
  bind_common(classify);

  CLI::App* measure = app.add_subcommand("measure", "measure excess delay per program");
  bind_inputs(measure, true);
  bind_common(measure);
  measure->add_flag("--svg", cfg.write_svg, "write per-program queueing diagrams");

  CLI::App* features = app.add_subcommand("features", "build the program feature table");
  bind_inputs(features, true);
  bind_common(features);
  features->add_flag("--svg", cfg.write_svg, "write per-program queueing diagrams");
  features->add_option("--others-threshold", cfg.others_threshold,
                       "min programs/year for an airport's own indicator column")
      ->capture_default_str();

  CLI::App* fit = app.add_subcommand("fit", "fit models from features.csv");
  bind_common(fit);
  bind_fit(fit);

  CLI::App* report = app.add_subcommand("report", "fits, importance, summary from artifacts");
  bind_common(report);
  bind_fit(report);

  CLI::App* run = app.add_subcommand("run", "full pipeline");
  bind_inputs(run, true);
  bind_common(run);
  bind_fit(run);
  run->add_flag("--svg", cfg.write_svg, "write per-program queueing diagrams");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return run_synth(synth_config, synth_out, synth_seed);

    cfg.flights_path = flights;
    cfg.quarters_path = quarters;
    cfg.advisories_path = advisories;
    cfg.out_dir = out_dir;
    if (!epoch.empty()) cfg.epoch_iso = epoch;

    gdpx::pipeline::RunResult result;
    if (classify->parsed()) result = gdpx::pipeline::run_classify(cfg);
    if (measure->parsed()) result = gdpx::pipeline::run_measure(cfg);
    if (features->parsed()) result = gdpx::pipeline::run_features(cfg);
    if (fit->parsed()) result = gdpx::pipeline::run_fit(cfg);
    if (report->parsed()) result = gdpx::pipeline::run_report(cfg);
    if (run->parsed()) result = gdpx::pipeline::run_all(cfg);

    for (const gdpx::pipeline::StageError& e : result.errors) {
      std::cerr << "stage " << e.stage << ": " << e.detail << "\n";
    }
    return result.exit_code();
  } catch (const gdpx::Error& e) {
    std::cerr << "gdpx: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "gdpx: " << e.what() << "\n";
    return 2;
  }
}
