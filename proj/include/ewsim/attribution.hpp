#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "ewsim/date.hpp"
#include "ewsim/market_data.hpp"
#include "ewsim/portfolio_engine.hpp"

namespace ewsim {

struct BuyLot {
  Date date;
  double remaining_weight = 0.0;
  double price_index = 1.0;
  bool is_reconstitution_buy = false;

  friend bool operator==(const BuyLot&, const BuyLot&) = default;
};

// Open buy lots per security, oldest first.
//
// A sell walks the lots newest-first and realizes weight * (P_sell - P_buy) / P_buy
// against ordinary lots. Reaching a reconstitution lot halts matching for the
// rest of that sell; the unmatched remainder still retires weight from that
// lot and older ones, without profit, so the ledger keeps tracking the
// traded position. A reconstitution buy starts a new holding spell and drops
// whatever lots the previous spell left behind.
class LotLedger {
 public:
  struct SellOutcome {
    double profit = 0.0;
    double matched = 0.0;
    double unmatched = 0.0;
  };

  void record_buy(const TradeEvent& buy);
  SellOutcome match_sell(const TradeEvent& sell, double tc_bps);

  const std::vector<BuyLot>& lots(const SecurityId& id) const;
  double remaining_weight(const SecurityId& id) const;
  bool has_history(const SecurityId& id) const { return lots_.contains(id); }

 private:
  std::map<SecurityId, std::vector<BuyLot>> lots_;
};

struct ProfitSeries {
  std::vector<Date> dates;
  std::vector<double> trading_profit;
};

// Replays chronologically ordered trades through one ledger and sums profit
// per trade date. Throws Error(data) on out-of-order trades or a sell of a
// security that was never bought.
ProfitSeries attribute(std::span<const TradeEvent> trades, double tc_bps);

// Same, aligned to `calendar` (zero on dates without sells). Every trade date
// must be on the calendar.
ProfitSeries attribute(std::span<const TradeEvent> trades, double tc_bps, std::span<const Date> calendar);

// CSV `date,trading_profit`.
void write_profit(std::ostream& out, const ProfitSeries& series);
ProfitSeries read_profit(std::istream& in);

}  // namespace ewsim
