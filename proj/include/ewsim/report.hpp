#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ewsim/date.hpp"
#include "ewsim/market_data.hpp"
#include "ewsim/portfolio_engine.hpp"
#include "ewsim/spt.hpp"

namespace ewsim {

enum class DataSource { csv, synthetic };
enum class SummaryFormat { plain, machine };
enum class BaselineRule { automatic, schedule, tc, none };

// A portfolio size in the grid. `label` is what the calibration table is keyed
// on (lrg/sml for the classic pair).
struct SizeSpec {
  std::string label;
  std::size_t top_n = kAllMembers;
};

struct RunConfig {
  DataSource source = DataSource::synthetic;
  std::string data_path;  // csv source; relative paths resolve against the config file
  SyntheticSpec synthetic;
  int periods_per_year = 252;
  std::optional<Date> start;
  std::optional<Date> end;

  std::vector<SizeSpec> sizes;
  std::vector<double> tc_bps{0.0};
  std::vector<RebalanceSchedule> schedules{RebalanceSchedule::monthly()};
  BaselineRule baseline = BaselineRule::automatic;

  std::string universe;  // calibration row; empty = none
  CalibrationTable calibration = CalibrationTable::defaults();
  std::optional<double> factor;  // overrides the table for every cell

  std::string output_dir = "out";
  SummaryFormat summary_format = SummaryFormat::plain;
  bool write_trades = false;
  std::optional<Date> rebase_from;
  unsigned threads = 0;  // 0 = hardware concurrency

  void validate() const;
  double factor_for(const SizeSpec& size) const;
};

// Flat INI-style file with [data], [synthetic], [grid], [calibration] and
// [output] sections. Unknown keys are rejected by name.
RunConfig parse_config(std::istream& in, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

struct SummaryRow {
  std::string series;  // ew_relative_return | premium_estimate | trading_profit | turnover
  double mean = 0.0;
  double stdev = 0.0;
  std::optional<double> change;

  friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

// Columns `series,mean,stdev,change`. Plain: 2 decimals, change column dropped
// when no row has one. Machine: CSV at full precision.
std::string emit_summary(const std::vector<SummaryRow>& rows, SummaryFormat format);
std::vector<SummaryRow> parse_summary(std::istream& in);

struct CellReport {
  std::string name;
  SizeSpec size;
  double tc_bps = 0.0;
  RebalanceSchedule schedule;
  double factor = 0.0;
  std::optional<std::string> baseline;  // name of the cell Change is taken against
  std::vector<SummaryRow> rows;
  std::vector<SummaryRow> rebased_rows;  // only with rebase_from
  std::size_t series_rows = 0;
};

struct GridReport {
  std::string output_dir;
  std::vector<CellReport> cells;
};

std::string cell_name(const SizeSpec& size, double tc_bps, const RebalanceSchedule& schedule);

// Builds the market, runs one simulation per (size, tc, schedule) cell and
// writes every cell's series files and summary below config.output_dir.
GridReport run_grid(const RunConfig& config);

MarketHistory load_market(const RunConfig& config);

}  // namespace ewsim
