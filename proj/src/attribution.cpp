#include "ewsim/attribution.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "ewsim/error.hpp"
#include "text.hpp"

namespace ewsim {

void LotLedger::record_buy(const TradeEvent& buy) {
  if (!(buy.weight_change > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "record_buy needs a positive weight change (" + buy.security.value + ")");
  }
  if (!(buy.price_index > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "buy price index must be positive (" + buy.security.value + ")");
  }
  auto& lots = lots_[buy.security];
  if (buy.is_reconstitution_buy) lots.clear();
  lots.push_back({buy.date, buy.weight_change, buy.price_index, buy.is_reconstitution_buy});
}

LotLedger::SellOutcome LotLedger::match_sell(const TradeEvent& sell, double tc_bps) {
  if (!(sell.weight_change < 0.0)) {
    throw Error(ErrorCode::invalid_argument, "match_sell needs a negative weight change (" + sell.security.value + ")");
  }
  auto it = lots_.find(sell.security);
  if (it == lots_.end()) {
    throw Error(ErrorCode::data, "sell of never-bought security " + sell.security.value);
  }
  auto& lots = it->second;
  const double size = -sell.weight_change;
  const double tc = tc_bps / 10000.0;

  SellOutcome out;
  double left = size;
  bool halted = false;
  for (auto lot = lots.rbegin(); lot != lots.rend() && left > 0.0; ++lot) {
    if (lot->is_reconstitution_buy) halted = true;
    const double m = std::min(left, lot->remaining_weight);
    if (!halted) {
      out.profit += m * (sell.price_index - lot->price_index) / lot->price_index;
      out.matched += m;
    }
    lot->remaining_weight -= m;
    left -= m;
  }
  std::erase_if(lots, [](const BuyLot& l) { return l.remaining_weight <= 0.0; });

  out.unmatched = size - out.matched;
  out.profit -= 2.0 * tc * out.matched + 2.0 * tc * out.unmatched;
  return out;
}

const std::vector<BuyLot>& LotLedger::lots(const SecurityId& id) const {
  static const std::vector<BuyLot> kEmpty;
  auto it = lots_.find(id);
  return it == lots_.end() ? kEmpty : it->second;
}

double LotLedger::remaining_weight(const SecurityId& id) const {
  double total = 0.0;
  for (const auto& l : lots(id)) total += l.remaining_weight;
  return total;
}

ProfitSeries attribute(std::span<const TradeEvent> trades, double tc_bps) {
  if (!(tc_bps >= 0.0)) throw Error(ErrorCode::invalid_argument, "tc_bps must be >= 0");
  ProfitSeries out;
  LotLedger ledger;
  for (std::size_t k = 0; k < trades.size(); ++k) {
    const auto& t = trades[k];
    if (k > 0 && t.date < trades[k - 1].date) {
      throw Error(ErrorCode::data, "trades out of chronological order at " + format_date(t.date));
    }
    if (out.dates.empty() || out.dates.back() != t.date) {
      out.dates.push_back(t.date);
      out.trading_profit.push_back(0.0);
    }
    if (t.weight_change > 0.0) {
      ledger.record_buy(t);
    } else if (t.weight_change < 0.0) {
      out.trading_profit.back() += ledger.match_sell(t, tc_bps).profit;
    } else {
      throw Error(ErrorCode::data, "trade with zero weight change for " + t.security.value);
    }
  }
  return out;
}

ProfitSeries attribute(std::span<const TradeEvent> trades, double tc_bps, std::span<const Date> calendar) {
  const auto sparse = attribute(trades, tc_bps);
  ProfitSeries out;
  out.dates.assign(calendar.begin(), calendar.end());
  out.trading_profit.assign(calendar.size(), 0.0);
  std::size_t pos = 0;
  for (std::size_t k = 0; k < sparse.dates.size(); ++k) {
    while (pos < calendar.size() && calendar[pos] < sparse.dates[k]) ++pos;
    if (pos == calendar.size() || calendar[pos] != sparse.dates[k]) {
      throw Error(ErrorCode::data, "trade date " + format_date(sparse.dates[k]) + " is not on the calendar");
    }
    out.trading_profit[pos] = sparse.trading_profit[k];
  }
  return out;
}

void write_profit(std::ostream& out, const ProfitSeries& series) {
  out << "date,trading_profit\n";
  for (std::size_t i = 0; i < series.dates.size(); ++i) {
    out << format_date(series.dates[i]) << ',' << text::format_double(series.trading_profit[i]) << '\n';
  }
}

ProfitSeries read_profit(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  text::expect_header(in, line, line_no, "date,trading_profit");
  ProfitSeries s;
  while (text::next_line(in, line, line_no)) {
    if (text::trim(line).empty()) continue;
    auto f = text::split(line);
    if (f.size() != 2) throw ParseError(line_no, "expected 2 fields");
    try {
      s.dates.push_back(parse_date(f[0]));
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
    s.trading_profit.push_back(text::require_double(f[1], line_no, "trading_profit"));
  }
  return s;
}

}  // namespace ewsim
