#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ewsim/ewsim.h"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("ewsim_capi_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ewsim_history* small_history() {
  ewsim_synthetic_spec spec;
  ewsim_synthetic_spec_init(&spec);
  spec.n_assets = 6;
  spec.horizon_years = 2;
  ewsim_history* h = nullptr;
  EXPECT_EQ(ewsim_history_generate(&spec, &h), EWSIM_OK);
  return h;
}

}  // namespace

TEST(CApi, VersionAndStatusNames) {
  EXPECT_STREQ(ewsim_version(), "1.0.0");
  EXPECT_STREQ(ewsim_status_name(EWSIM_OK), "ok");
  EXPECT_STREQ(ewsim_status_name(EWSIM_ERR_CONFIG), "config_error");
  EXPECT_STREQ(ewsim_status_name(static_cast<ewsim_status>(42)), "unknown_status");
}

TEST(CApi, GenerateSimulateAndRead) {
  ewsim_history* h = small_history();
  ASSERT_NE(h, nullptr);
  EXPECT_EQ(ewsim_history_num_days(h), 504u);
  EXPECT_EQ(ewsim_history_num_securities(h), 6u);

  ewsim_run_params p;
  ewsim_run_params_init(&p);
  p.top_n = 3;
  p.tc_bps = 40;
  ewsim_run* run = nullptr;
  ASSERT_EQ(ewsim_simulate(h, &p, &run), EWSIM_OK);
  const size_t n = ewsim_run_length(run);
  EXPECT_EQ(n, 504u);
  EXPECT_GT(ewsim_run_num_trades(run), 3u);

  std::vector<double> rel(n), size(n), leak(n), prem(n), bracket(n);
  ASSERT_EQ(ewsim_run_series(run, EWSIM_SERIES_EW_TOPN_VS_CW_TOPN, bracket.data(), n), EWSIM_OK);
  ASSERT_EQ(ewsim_run_series(run, EWSIM_SERIES_SIZE_EXPOSURE, size.data(), n), EWSIM_OK);
  ASSERT_EQ(ewsim_run_series(run, EWSIM_SERIES_LEAKAGE, leak.data(), n), EWSIM_OK);
  ASSERT_EQ(ewsim_run_series(run, EWSIM_SERIES_PREMIUM_ESTIMATE, prem.data(), n), EWSIM_OK);
  for (size_t i = 0; i < n; ++i) EXPECT_NEAR(leak[i] + prem[i], bracket[i] - size[i], 1e-15);

  EXPECT_EQ(ewsim_run_series(run, EWSIM_SERIES_EW_RELATIVE, rel.data(), n - 1), EWSIM_ERR_INVALID_ARGUMENT);
  EXPECT_NE(std::string(ewsim_last_error()).find("buffer"), std::string::npos);

  double mean = 0, sd = 0;
  EXPECT_EQ(ewsim_run_stats(run, EWSIM_SERIES_TURNOVER, 252, &mean, &sd), EWSIM_OK);
  EXPECT_GT(mean, 0.0);

  const auto dir = scratch("run");
  ASSERT_EQ(ewsim_run_write(run, dir.string().c_str()), EWSIM_OK);
  for (const char* f : {"relative.csv", "profit.csv", "decomposition.csv", "turnover.csv", "trades.csv"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }

  // Re-attributing the written trade log reproduces the profit totals.
  const auto profit_path = dir / "profit_again.csv";
  ASSERT_EQ(ewsim_attribute_csv((dir / "trades.csv").string().c_str(), 40, profit_path.string().c_str()), EWSIM_OK);
  std::vector<double> tp(n);
  ASSERT_EQ(ewsim_run_series(run, EWSIM_SERIES_TRADING_PROFIT, tp.data(), n), EWSIM_OK);
  double total = 0;
  for (double x : tp) total += x;
  std::ifstream in(profit_path);
  std::string line;
  std::getline(in, line);
  double total_again = 0;
  while (std::getline(in, line)) total_again += std::stod(line.substr(line.find(',') + 1));
  EXPECT_NEAR(total, total_again, 1e-12);

  ewsim_run_free(run);
  ewsim_history_free(h);
  fs::remove_all(dir);
}

TEST(CApi, ErrorCodes) {
  ewsim_history* h = nullptr;
  EXPECT_EQ(ewsim_history_load_csv("/nonexistent/file.csv", &h), EWSIM_ERR_IO);
  EXPECT_EQ(h, nullptr);
  EXPECT_EQ(ewsim_history_load_csv(nullptr, &h), EWSIM_ERR_INVALID_ARGUMENT);

  const auto dir = scratch("errors");
  {
    std::ofstream out(dir / "bad.csv");
    out << "date,security_id,total_return,market_cap\n2020-01-02,A,0.0,0\n";
  }
  EXPECT_EQ(ewsim_history_load_csv((dir / "bad.csv").string().c_str(), &h), EWSIM_ERR_PARSE);
  EXPECT_NE(std::string(ewsim_last_error()).find("line 2"), std::string::npos);

  ewsim_synthetic_spec spec;
  ewsim_synthetic_spec_init(&spec);
  spec.correlation = 1.0;
  EXPECT_EQ(ewsim_history_generate(&spec, &h), EWSIM_ERR_INVALID_ARGUMENT);

  {
    std::ofstream out(dir / "bad.ini");
    out << "[grid]\ntc_bps = -1\n";
  }
  ewsim_grid* g = nullptr;
  EXPECT_EQ(ewsim_grid_run((dir / "bad.ini").string().c_str(), nullptr, nullptr, &g), EWSIM_ERR_CONFIG);
  EXPECT_NE(std::string(ewsim_last_error()).find("grid.tc_bps"), std::string::npos);

  {
    std::ofstream out(dir / "trades.csv");
    out << "date,security_id,weight_change,price_index,is_reconstitution_buy\n2020-01-02,A,-0.1,1,0\n";
  }
  EXPECT_EQ(ewsim_attribute_csv((dir / "trades.csv").string().c_str(), 0, (dir / "p.csv").string().c_str()),
            EWSIM_ERR_DATA);

  ewsim_history* good = small_history();
  ewsim_run_params p;
  ewsim_run_params_init(&p);
  p.frequency = EWSIM_QUARTERLY;
  p.month_offset = 5;
  ewsim_run* run = nullptr;
  EXPECT_EQ(ewsim_simulate(good, &p, &run), EWSIM_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(run, nullptr);
  ewsim_history_free(good);

  EXPECT_EQ(ewsim_run_length(nullptr), 0u);
  EXPECT_EQ(ewsim_grid_cell_name(nullptr, 0), nullptr);
  ewsim_run_free(nullptr);
  ewsim_grid_free(nullptr);
  ewsim_history_free(nullptr);
  fs::remove_all(dir);
}

TEST(CApi, GridRunWithOverrides) {
  const auto dir = scratch("grid");
  {
    std::ofstream out(dir / "g.ini");
    out << "[synthetic]\nn_assets = 5\nhorizon_years = 1\n[grid]\ntc_bps = 0, 40\n[output]\ndir = ignored\n";
  }
  ewsim_grid* g = nullptr;
  const uint64_t seed = 17;
  const auto out = dir / "out";
  ASSERT_EQ(ewsim_grid_run((dir / "g.ini").string().c_str(), out.string().c_str(), &seed, &g), EWSIM_OK);
  EXPECT_EQ(std::string(ewsim_grid_output_dir(g)), out.string());
  ASSERT_EQ(ewsim_grid_num_cells(g), 2u);
  EXPECT_STREQ(ewsim_grid_cell_name(g, 0), "all_tc0_monthly");
  EXPECT_NE(std::string(ewsim_grid_cell_summary(g, 1)).find("change"), std::string::npos);
  EXPECT_EQ(ewsim_grid_cell_name(g, 2), nullptr);
  EXPECT_FALSE(fs::exists(dir / "ignored"));
  ewsim_grid_free(g);
  fs::remove_all(dir);
}
