// corrvote: reproduce the aggregation experiments and run custom scenarios.
//
//   corrvote reproduce fig1 --trials 10000 --seed 42 --out results/
//   corrvote run scenario.cfg --out scenario.csv
//   corrvote sweep scenario.cfg --parameter m --values 2,5,10
//   corrvote list-rules
//
// Exit codes: 0 success, 1 I/O failure, 2 usage or validation error.

#include "corrvote/config.hpp"
#include "corrvote/figures.hpp"
#include "corrvote/report.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace corrvote;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::optional<std::int64_t> trials;
  std::optional<std::uint64_t> seed;
  std::string out;
  unsigned workers = 1;
  bool diagnostics = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts, const std::string& out_help) {
  cmd->add_option("--trials", opts.trials, "Number of trials per scenario")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", opts.seed, "Master seed (default: CORRVOTE_SEED or 42)");
  cmd->add_option("--out", opts.out, out_help);
  cmd->add_option("--workers", opts.workers, "Worker threads; output does not depend on it")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--diagnostics", opts.diagnostics,
                "Also write a diagnostics sidecar (k_hat histograms, fallback counts)");
}

/// --seed, then a seed from the config file, then CORRVOTE_SEED, then 42.
std::uint64_t resolve_seed(const CommonOptions& opts, std::optional<std::uint64_t> from_config) {
  if (opts.seed) return *opts.seed;
  if (from_config) return *from_config;
  if (const char* env = std::getenv("CORRVOTE_SEED"); env != nullptr && *env != '\0') {
    try {
      return detail::parse_seed_text(env, "CORRVOTE_SEED", 0);
    } catch (const ConfigError&) {
      throw UsageError("CORRVOTE_SEED must be a non-negative 64-bit integer");
    }
  }
  return kDefaultSeed;
}

void write_diagnostics(const fs::path& path, const std::vector<SweepBlock>& blocks) {
  std::ofstream d(path);
  if (!d) throw IoError("cannot open '" + path.string() + "' for writing");
  write_diagnostics_csv(d, blocks);
  if (!d.flush()) throw IoError("failed writing '" + path.string() + "'");
}

fs::path sidecar_path(const fs::path& results) {
  fs::path side = results;
  side.replace_filename(results.stem().string() + "_diagnostics.csv");
  return side;
}

void write_file(const fs::path& path, const std::vector<SweepBlock>& blocks, bool diagnostics) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_results_csv(out, blocks);
  if (!out.flush()) throw IoError("failed writing '" + path.string() + "'");
  if (diagnostics) write_diagnostics(sidecar_path(path), blocks);
}

/// One line per sweep point: the parameter value and every rule's mean.
void print_summary(std::ostream& os, const std::vector<SweepBlock>& blocks) {
  for (const auto& block : blocks) {
    for (const auto& point : block.points) {
      os << block.sweep_id;
      if (point.parameter != "none") os << ' ' << point.parameter << '=' << point.value;
      for (const auto& r : point.result.rules) {
        os << "  " << rule_name(r.rule) << '=' << std::fixed << std::setprecision(4)
           << r.mean_relative_utility << std::defaultfloat;
      }
      os << '\n';
    }
  }
}

ParsedConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config '" + path + "'");
  return parse_config(in);
}

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> values;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = detail::trim(item);
    double x = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), x);
    if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
      throw UsageError("--values: '" + item + "' is not a number");
    }
    values.push_back(x);
  }
  if (values.empty()) throw UsageError("--values: no values given");
  return values;
}

void emit(const std::vector<SweepBlock>& blocks, const CommonOptions& opts,
          const std::string& stem) {
  if (opts.out.empty()) {
    write_results_csv(std::cout, blocks);
    if (opts.diagnostics) write_diagnostics(sidecar_path(fs::path(stem + ".csv")), blocks);
    print_summary(std::cerr, blocks);
  } else {
    write_file(fs::path(opts.out), blocks, opts.diagnostics);
    print_summary(std::cout, blocks);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Score aggregation for correlated noisy estimators"};
  app.require_subcommand(1);

  CommonOptions reproduce_opts;
  std::string figure_id;
  auto* reproduce = app.add_subcommand("reproduce", "Rerun a figure's experiment, write <id>.csv");
  reproduce->add_option("figure", figure_id, "fig1, fig2, fig3, fig4, fig5, fig6a or fig6b")
      ->required();
  add_common(reproduce, reproduce_opts, "Output directory (default: current directory)");

  CommonOptions run_opts;
  std::string run_config;
  auto* run = app.add_subcommand("run", "Run a single scenario from a config file");
  run->add_option("config", run_config, "Scenario config file")->required();
  add_common(run, run_opts, "Output CSV path (default: stdout)");

  CommonOptions sweep_opts;
  std::string sweep_config;
  std::string sweep_parameter;
  std::string sweep_values;
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep one parameter of a config's scenario");
  sweep_cmd->add_option("config", sweep_config, "Scenario config file")->required();
  sweep_cmd->add_option("--parameter", sweep_parameter,
                        "group_size, n_independent, m, sigma_d, sigma_f, alpha or beta");
  sweep_cmd->add_option("--values", sweep_values, "Comma-separated parameter values");
  add_common(sweep_cmd, sweep_opts, "Output CSV path (default: stdout)");

  auto* list_rules = app.add_subcommand("list-rules", "List the canonical rule names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (list_rules->parsed()) {
      for (Rule r : kAllRules) {
        std::cout << std::left << std::setw(5) << rule_name(r) << rule_description(r) << '\n';
      }
      return kExitOk;
    }

    if (reproduce->parsed()) {
      if (!is_figure_id(figure_id)) {
        std::cerr << "error: unknown figure id '" << figure_id << "'\n\n" << reproduce->help();
        return kExitUsage;
      }
      ScenarioConfig reference;
      reference.master_seed = resolve_seed(reproduce_opts, std::nullopt);
      if (reproduce_opts.trials) reference.n_trials = *reproduce_opts.trials;
      std::vector<SweepBlock> blocks;
      for (const SweepPlan& plan : figure_plans(figure_id, reference)) {
        blocks.push_back(run_plan(plan, reproduce_opts.workers));
      }
      const fs::path dir = reproduce_opts.out.empty() ? fs::path(".") : fs::path(reproduce_opts.out);
      std::error_code ec;
      fs::create_directories(dir, ec);
      write_file(dir / (figure_id + ".csv"), blocks, reproduce_opts.diagnostics);
      print_summary(std::cout, blocks);
      return kExitOk;
    }

    const bool is_run = run->parsed();
    const CommonOptions& opts = is_run ? run_opts : sweep_opts;
    const std::string& path = is_run ? run_config : sweep_config;
    ParsedConfig parsed = load_config(path);
    ScenarioConfig& cfg = parsed.scenario;
    cfg.master_seed =
        resolve_seed(opts, parsed.seed_set ? std::optional(cfg.master_seed) : std::nullopt);
    if (opts.trials) cfg.n_trials = *opts.trials;
    cfg.validate();
    const std::string stem = fs::path(path).stem().string();

    SweepPlan plan{stem, cfg, std::nullopt, {}};
    if (!is_run) {
      const std::string param =
          !sweep_parameter.empty() ? sweep_parameter : parsed.sweep_parameter.value_or("");
      if (param.empty()) throw UsageError("sweep: no --parameter and no sweep_parameter key");
      plan.parameter = parse_sweep_parameter(param);
      plan.values = !sweep_values.empty() ? parse_values(sweep_values) : parsed.sweep_values;
      if (plan.values.empty()) throw UsageError("sweep: no --values and no sweep_values key");
    }
    emit({run_plan(plan, opts.workers)}, opts, stem);
    return kExitOk;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
}
