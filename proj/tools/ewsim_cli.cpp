// ewsim command line front end. Talks to the engine only through the C API.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ewsim/ewsim.h"

namespace {

int report_failure(ewsim_status status) {
  std::cerr << "ewsim: " << ewsim_status_name(status) << ": " << ewsim_last_error() << '\n';
  return static_cast<int>(status);
}

int cmd_simulate(const std::string& config, const std::string& out_dir, std::optional<std::uint64_t> seed, bool quiet) {
  ewsim_grid* grid = nullptr;
  const std::uint64_t seed_value = seed.value_or(0);
  ewsim_status st = ewsim_grid_run(config.c_str(), out_dir.empty() ? nullptr : out_dir.c_str(),
                                   seed ? &seed_value : nullptr, &grid);
  if (st != EWSIM_OK) return report_failure(st);
  if (!quiet) {
    const std::size_t n = ewsim_grid_num_cells(grid);
    std::cout << n << " cell(s) written to " << ewsim_grid_output_dir(grid) << "\n\n";
    for (std::size_t i = 0; i < n; ++i) {
      std::cout << "[" << ewsim_grid_cell_name(grid, i) << "]\n" << ewsim_grid_cell_summary(grid, i) << '\n';
    }
  }
  ewsim_grid_free(grid);
  return 0;
}

int cmd_attribute(const std::string& trades, double tc_bps, const std::string& out) {
  ewsim_status st = ewsim_attribute_csv(trades.c_str(), tc_bps, out.c_str());
  return st == EWSIM_OK ? 0 : report_failure(st);
}

int cmd_generate(ewsim_synthetic_spec spec, const std::string& out) {
  ewsim_history* history = nullptr;
  ewsim_status st = ewsim_history_generate(&spec, &history);
  if (st != EWSIM_OK) return report_failure(st);
  st = ewsim_history_write_csv(history, out.c_str());
  const std::size_t days = ewsim_history_num_days(history);
  ewsim_history_free(history);
  if (st != EWSIM_OK) return report_failure(st);
  std::cout << "wrote " << days << " trading days x " << spec.n_assets << " securities to " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equal-weighted portfolio simulation and trading-profit attribution"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ewsim_version()));

  std::string config;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  auto* simulate = app.add_subcommand("simulate", "Run the experiment grid described by a config file");
  simulate->add_option("--config", config, "Config file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", out_dir, "Output directory (overrides output.dir)");
  simulate->add_option("--seed", seed, "Synthetic market seed (overrides synthetic.seed)");
  simulate->add_flag("--quiet", quiet, "Do not print summaries");

  std::string trades;
  std::string profit_out;
  double tc_bps = 0.0;
  auto* attribute = app.add_subcommand("attribute", "Trading-profit attribution of a trade log CSV");
  attribute->add_option("--trades", trades, "Trade CSV (date,security_id,weight_change,price_index,is_reconstitution_buy)")
      ->required()
      ->check(CLI::ExistingFile);
  attribute->add_option("--tc-bps", tc_bps, "Transaction cost in basis points")->check(CLI::NonNegativeNumber);
  attribute->add_option("--out", profit_out, "Output CSV (date,trading_profit)")->required();

  ewsim_synthetic_spec spec;
  ewsim_synthetic_spec_init(&spec);
  std::string market_out;
  auto* generate = app.add_subcommand("generate", "Write a synthetic log-normal market as CSV");
  generate->add_option("--assets", spec.n_assets, "Number of securities")->capture_default_str();
  generate->add_option("--years", spec.horizon_years, "Horizon in years")->capture_default_str();
  generate->add_option("--periods-per-year", spec.periods_per_year, "Trading days per year (multiple of 12)")
      ->capture_default_str();
  generate->add_option("--vol", spec.vol, "Annualized log-volatility")->capture_default_str();
  generate->add_option("--drift", spec.drift, "Annualized log-drift")->capture_default_str();
  generate->add_option("--correlation", spec.correlation, "Pairwise correlation in [0, 1)")->capture_default_str();
  generate->add_option("--seed", spec.seed, "Random seed")->capture_default_str();
  generate->add_option("--start-year", spec.start_year, "First calendar year")->capture_default_str();
  generate->add_option("--out", market_out, "Output CSV")->required();

  CLI11_PARSE(app, argc, argv);

  if (*simulate) return cmd_simulate(config, out_dir, seed, quiet);
  if (*attribute) return cmd_attribute(trades, tc_bps, profit_out);
  if (*generate) return cmd_generate(spec, market_out);
  return 1;
}
