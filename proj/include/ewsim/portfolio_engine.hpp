#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ewsim/date.hpp"
#include "ewsim/market_data.hpp"

namespace ewsim {

using WeightMap = std::map<SecurityId, double>;
using ValueMap = std::map<SecurityId, double>;

inline constexpr std::size_t kAllMembers = std::numeric_limits<std::size_t>::max();

enum class Frequency { monthly, quarterly, semiannual };

std::string to_string(Frequency f);
Frequency parse_frequency(std::string_view name);

// A calendar month m (1..12) is a rebalance month when m % cycle == offset,
// so quarterly/2 -> {2, 5, 8, 11} and semiannual/2 -> {2, 8}.
struct RebalanceSchedule {
  Frequency frequency = Frequency::monthly;
  unsigned month_offset = 0;

  static RebalanceSchedule monthly() { return {Frequency::monthly, 0}; }
  static RebalanceSchedule quarterly(unsigned offset = 2) { return {Frequency::quarterly, offset}; }
  static RebalanceSchedule semiannual(unsigned offset = 2) { return {Frequency::semiannual, offset}; }

  unsigned cycle_months() const;
  bool rebalances_in(unsigned month) const;
  void validate() const;

  friend bool operator==(const RebalanceSchedule&, const RebalanceSchedule&) = default;
};

struct TradeEvent {
  Date date;
  SecurityId security;
  double weight_change = 0.0;
  double price_index = 1.0;
  bool is_reconstitution_buy = false;

  friend bool operator==(const TradeEvent&, const TradeEvent&) = default;
};

struct PortfolioState {
  Date date;
  WeightMap weights;
  double cum_log_return = 0.0;
  double period_turnover = 0.0;
  double tc_bps = 0.0;
};

// Self-financing drift: w_i (1 + r_i) / sum_j w_j (1 + r_j).
// Throws Error(data) when a held security has no return.
WeightMap drift_weights(const WeightMap& weights, const ValueMap& returns);

WeightMap equal_weight_targets(const UniverseSnapshot& snapshot, std::size_t top_n);
WeightMap cap_weight_targets(const UniverseSnapshot& snapshot, std::size_t top_n = kAllMembers);

struct RebalanceResult {
  PortfolioState state;
  std::vector<TradeEvent> trades;  // one per security with a nonzero weight change, id order
  double traded_weight = 0.0;      // sum |dw|
  double cost_log_return = 0.0;    // log(1 - tc * sum |dw|), <= 0
};

// Moves `state` to `targets`; the cost is a pro-rata haircut on portfolio
// performance and does not alter the weights.
RebalanceResult rebalance(const PortfolioState& state, const WeightMap& targets, const ValueMap& prices);

struct SimulationParams {
  std::size_t top_n = kAllMembers;
  RebalanceSchedule schedule;
  double tc_bps = 0.0;
};

struct SimulationResult {
  std::vector<Date> dates;
  std::vector<double> ew_rel_logret;              // EW vs cap-weighted full market
  std::vector<double> ew_topn_vs_cw_topn_logret;  // EW vs cap-weighted top-n
  std::vector<double> turnover;                   // one-way, charged trades only
  std::vector<double> size_exposure;              // change in mean log market weight of EW holdings
  std::vector<double> ew_logret;                  // EW log return net of costs
  std::vector<TradeEvent> trades;
};

// Day loop over the whole history. The EW portfolio is established on the
// first trading day (reconstitution buys, no cost, no turnover) and rebalanced
// on the first trading day of every schedule month afterwards. The full-market
// benchmark resets to cap weights at every monthly reconstitution; the top-n
// benchmark on the EW schedule. Held names without a record on a day earn 0.
SimulationResult run_simulation(const MarketHistory& history, const SimulationParams& params);

struct AnnualizedStats {
  double mean = 0.0;   // % per year
  double stdev = 0.0;  // % per year
};

AnnualizedStats annualized_stats(std::span<const double> per_period, int periods_per_year);

// Yearly sums of one-way turnover (in %), averaged across the calendar years
// present in `dates`; stdev is the sample stdev of those yearly sums.
AnnualizedStats annualized_turnover(std::span<const Date> dates, std::span<const double> turnover);

// CSV `date,ew_rel_logret,ew_topn_vs_cw_topn_logret,turnover`.
void write_relative_series(std::ostream& out, const SimulationResult& result);
struct RelativeSeriesTable {
  std::vector<Date> dates;
  std::vector<double> ew_rel_logret;
  std::vector<double> ew_topn_vs_cw_topn_logret;
  std::vector<double> turnover;
};
RelativeSeriesTable read_relative_series(std::istream& in);

// CSV `date,turnover`.
void write_turnover(std::ostream& out, const SimulationResult& result);

// CSV `date,security_id,weight_change,price_index,is_reconstitution_buy`.
void write_trades(std::ostream& out, std::span<const TradeEvent> trades);
std::vector<TradeEvent> read_trades(std::istream& in);

}  // namespace ewsim
