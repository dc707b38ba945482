#include "ewsim/portfolio_engine.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

#include "ewsim/error.hpp"
#include "ewsim/spt.hpp"
#include "text.hpp"
#include "weights.hpp"

namespace ewsim {

namespace {

constexpr std::string_view kRelativeHeader = "date,ew_rel_logret,ew_topn_vs_cw_topn_logret,turnover";
constexpr std::string_view kTradesHeader = "date,security_id,weight_change,price_index,is_reconstitution_buy";

double tc_fraction(double tc_bps) {
  if (!(tc_bps >= 0.0) || !(tc_bps < 5000.0)) {
    throw Error(ErrorCode::invalid_argument, "tc_bps must lie in [0, 5000)");
  }
  return tc_bps / 10000.0;
}

detail::Book<SecurityId> to_book(const WeightMap& weights) {
  detail::Book<SecurityId> book;
  book.reserve(weights.size());
  for (const auto& [id, w] : weights) {
    if (w != 0.0) book.emplace_back(id, w);
  }
  return book;
}

WeightMap to_map(const detail::Book<SecurityId>& book) {
  return WeightMap(book.begin(), book.end());
}

std::size_t selection_size(std::size_t members, std::size_t top_n) {
  if (members == 0) throw Error(ErrorCode::invalid_argument, "empty universe snapshot");
  if (top_n == 0) throw Error(ErrorCode::invalid_argument, "top_n must be >= 1");
  return std::min(members, top_n);
}

// Day records ranked by descending cap, ties by ascending security index.
std::vector<DayRecord> ranked_day(std::span<const DayRecord> day) {
  std::vector<DayRecord> ranked(day.begin(), day.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const DayRecord& a, const DayRecord& b) { return a.market_cap > b.market_cap; });
  return ranked;
}

detail::Book<SecurityIndex> equal_book(const std::vector<DayRecord>& ranked, std::size_t top_n) {
  const std::size_t k = selection_size(ranked.size(), top_n);
  detail::Book<SecurityIndex> book;
  book.reserve(k);
  const double w = 1.0 / static_cast<double>(k);
  for (std::size_t i = 0; i < k; ++i) book.emplace_back(ranked[i].security, w);
  std::sort(book.begin(), book.end());
  return book;
}

detail::Book<SecurityIndex> cap_book(const std::vector<DayRecord>& ranked, std::size_t top_n) {
  const std::size_t k = selection_size(ranked.size(), top_n);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) total += ranked[i].market_cap;
  detail::Book<SecurityIndex> book;
  book.reserve(k);
  for (std::size_t i = 0; i < k; ++i) book.emplace_back(ranked[i].security, ranked[i].market_cap / total);
  std::sort(book.begin(), book.end());
  return book;
}

}  // namespace

std::string to_string(Frequency f) {
  switch (f) {
    case Frequency::monthly: return "monthly";
    case Frequency::quarterly: return "quarterly";
    case Frequency::semiannual: return "semiannual";
  }
  return "?";
}

Frequency parse_frequency(std::string_view name) {
  if (name == "monthly") return Frequency::monthly;
  if (name == "quarterly") return Frequency::quarterly;
  if (name == "semiannual") return Frequency::semiannual;
  throw Error(ErrorCode::invalid_argument, "unknown rebalance frequency '" + std::string(name) + "'");
}

unsigned RebalanceSchedule::cycle_months() const {
  switch (frequency) {
    case Frequency::monthly: return 1;
    case Frequency::quarterly: return 3;
    case Frequency::semiannual: return 6;
  }
  return 1;
}

void RebalanceSchedule::validate() const {
  if (month_offset >= cycle_months()) {
    throw Error(ErrorCode::invalid_argument, "month_offset " + std::to_string(month_offset) +
                                                 " out of range for " + to_string(frequency) + " schedule");
  }
}

bool RebalanceSchedule::rebalances_in(unsigned month) const {
  return month % cycle_months() == month_offset;
}

WeightMap drift_weights(const WeightMap& weights, const ValueMap& returns) {
  auto book = to_book(weights);
  for (const auto& [id, w] : book) {
    if (!returns.contains(id)) {
      throw Error(ErrorCode::data, "no return for held security " + id.value);
    }
  }
  detail::drift_in_place(book, [&](const SecurityId& id) { return returns.at(id); });
  return to_map(book);
}

WeightMap equal_weight_targets(const UniverseSnapshot& snapshot, std::size_t top_n) {
  const std::size_t k = selection_size(snapshot.members.size(), top_n);
  WeightMap out;
  const double w = 1.0 / static_cast<double>(k);
  for (std::size_t i = 0; i < k; ++i) out[snapshot.members[i]] = w;
  return out;
}

WeightMap cap_weight_targets(const UniverseSnapshot& snapshot, std::size_t top_n) {
  const std::size_t k = selection_size(snapshot.members.size(), top_n);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) total += snapshot.caps[i];
  WeightMap out;
  for (std::size_t i = 0; i < k; ++i) out[snapshot.members[i]] = snapshot.caps[i] / total;
  return out;
}

RebalanceResult rebalance(const PortfolioState& state, const WeightMap& targets, const ValueMap& prices) {
  const double tc = tc_fraction(state.tc_bps);
  RebalanceResult out;
  out.state = state;
  auto book = to_book(state.weights);
  const auto target_book = to_book(targets);
  out.traded_weight = detail::rebalance_in_place(book, target_book, [&](const SecurityId& id, double delta, double prior) {
    auto it = prices.find(id);
    if (it == prices.end()) throw Error(ErrorCode::data, "no price index for traded security " + id.value);
    out.trades.push_back({state.date, id, delta, it->second, prior == 0.0 && delta > 0.0});
  });
  out.cost_log_return = std::log(1.0 - tc * out.traded_weight);
  out.state.weights = to_map(book);
  out.state.cum_log_return += out.cost_log_return;
  out.state.period_turnover += 0.5 * out.traded_weight;
  return out;
}

SimulationResult run_simulation(const MarketHistory& history, const SimulationParams& params) {
  if (history.num_days() == 0) throw Error(ErrorCode::data, "empty market history");
  params.schedule.validate();
  if (params.top_n == 0) throw Error(ErrorCode::invalid_argument, "top_n must be >= 1");
  const double tc = tc_fraction(params.tc_bps);

  const auto recon_days = history.reconstitution_days();
  if (recon_days.size() < 2) {
    throw Error(ErrorCode::data, "history must span at least two reconstitution dates");
  }
  const bool any_scheduled = std::any_of(recon_days.begin() + 1, recon_days.end(), [&](std::size_t d) {
    return params.schedule.rebalances_in(month_of(history.calendar()[d]));
  });
  if (!any_scheduled) {
    throw Error(ErrorCode::data, "rebalance schedule selects no date in the history");
  }

  const std::size_t n_days = history.num_days();
  const std::size_t n_sec = history.num_securities();
  const auto& ids = history.securities();

  SimulationResult out;
  out.dates = history.calendar();
  out.ew_rel_logret.assign(n_days, 0.0);
  out.ew_topn_vs_cw_topn_logret.assign(n_days, 0.0);
  out.turnover.assign(n_days, 0.0);
  out.size_exposure.assign(n_days, 0.0);
  out.ew_logret.assign(n_days, 0.0);

  // Dense per-security state; the stamp arrays mark which day a value belongs to.
  constexpr std::size_t kNever = static_cast<std::size_t>(-1);
  std::vector<double> ret(n_sec, 0.0);
  std::vector<std::size_t> ret_day(n_sec, kNever);
  std::vector<double> mu_prev(n_sec, 0.0), mu_cur(n_sec, 0.0);
  std::vector<std::size_t> mu_prev_day(n_sec, kNever), mu_cur_day(n_sec, kNever);
  std::vector<double> price_index(n_sec, 1.0);
  std::vector<bool> seen(n_sec, false);

  detail::Book<SecurityIndex> ew, cw_all, cw_top;
  bool established = false;
  std::size_t next_recon = 0;
  std::vector<double> held_mu_start, held_mu_end;

  for (std::size_t d = 0; d < n_days; ++d) {
    const auto day = history.day(d);
    std::swap(mu_prev, mu_cur);
    std::swap(mu_prev_day, mu_cur_day);
    const double total_cap = history.total_cap(d);
    for (const auto& r : day) {
      ret[r.security] = r.total_return;
      ret_day[r.security] = d;
      mu_cur[r.security] = r.market_cap / total_cap;
      mu_cur_day[r.security] = d;
    }
    auto return_of = [&](SecurityIndex i) { return ret_day[i] == d ? ret[i] : 0.0; };

    double ew_log = 0.0;
    double cw_all_log = 0.0;
    double cw_top_log = 0.0;
    if (established) {
      held_mu_start.clear();
      held_mu_end.clear();
      for (const auto& [i, w] : ew) {
        if (mu_prev_day[i] == d - 1 && mu_cur_day[i] == d) {
          held_mu_start.push_back(mu_prev[i]);
          held_mu_end.push_back(mu_cur[i]);
        }
      }
      if (!held_mu_start.empty()) out.size_exposure[d] = size_exposure(held_mu_start, held_mu_end);
      ew_log = std::log(detail::drift_in_place(ew, return_of));
      cw_all_log = std::log(detail::drift_in_place(cw_all, return_of));
      cw_top_log = std::log(detail::drift_in_place(cw_top, return_of));
    }

    for (const auto& r : day) {
      if (seen[r.security]) {
        price_index[r.security] *= 1.0 + r.total_return;
      } else {
        seen[r.security] = true;
        price_index[r.security] = 1.0;
      }
    }

    if (next_recon < recon_days.size() && recon_days[next_recon] == d) {
      ++next_recon;
      const auto ranked = ranked_day(day);
      cw_all = cap_book(ranked, kAllMembers);
      if (!established || params.schedule.rebalances_in(month_of(history.calendar()[d]))) {
        const auto targets = equal_book(ranked, params.top_n);
        const Date date = history.calendar()[d];
        const double traded = detail::rebalance_in_place(ew, targets, [&](SecurityIndex i, double delta, double prior) {
          out.trades.push_back({date, ids[i], delta, price_index[i], prior == 0.0 && delta > 0.0});
        });
        if (established) {
          ew_log += std::log(1.0 - tc * traded);
          out.turnover[d] = 0.5 * traded;
        }
        cw_top = cap_book(ranked, params.top_n);
        established = true;
      }
    }

    out.ew_logret[d] = ew_log;
    out.ew_rel_logret[d] = ew_log - cw_all_log;
    out.ew_topn_vs_cw_topn_logret[d] = ew_log - cw_top_log;
  }
  return out;
}

AnnualizedStats annualized_stats(std::span<const double> per_period, int periods_per_year) {
  if (per_period.size() < 2) throw Error(ErrorCode::invalid_argument, "series too short for statistics");
  if (periods_per_year <= 0) throw Error(ErrorCode::invalid_argument, "periods_per_year must be positive");
  const double n = static_cast<double>(per_period.size());
  const double mean = std::accumulate(per_period.begin(), per_period.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : per_period) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  return {periods_per_year * mean * 100.0, std::sqrt(static_cast<double>(periods_per_year)) * sd * 100.0};
}

AnnualizedStats annualized_turnover(std::span<const Date> dates, std::span<const double> turnover) {
  if (dates.size() != turnover.size()) throw Error(ErrorCode::invalid_argument, "misaligned turnover series");
  if (dates.empty()) throw Error(ErrorCode::invalid_argument, "empty turnover series");
  std::vector<double> yearly;
  for (std::size_t i = 0; i < dates.size(); ++i) {
    if (i == 0 || dates[i].year() != dates[i - 1].year()) yearly.push_back(0.0);
    yearly.back() += turnover[i];
  }
  const double n = static_cast<double>(yearly.size());
  const double mean = std::accumulate(yearly.begin(), yearly.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : yearly) ss += (x - mean) * (x - mean);
  const double sd = yearly.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return {mean * 100.0, sd * 100.0};
}

void write_relative_series(std::ostream& out, const SimulationResult& result) {
  out << kRelativeHeader << '\n';
  for (std::size_t i = 0; i < result.dates.size(); ++i) {
    out << format_date(result.dates[i]) << ',' << text::format_double(result.ew_rel_logret[i]) << ','
        << text::format_double(result.ew_topn_vs_cw_topn_logret[i]) << ','
        << text::format_double(result.turnover[i]) << '\n';
  }
}

void write_turnover(std::ostream& out, const SimulationResult& result) {
  out << "date,turnover\n";
  for (std::size_t i = 0; i < result.dates.size(); ++i) {
    out << format_date(result.dates[i]) << ',' << text::format_double(result.turnover[i]) << '\n';
  }
}

RelativeSeriesTable read_relative_series(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  text::expect_header(in, line, line_no, kRelativeHeader);
  RelativeSeriesTable t;
  while (text::next_line(in, line, line_no)) {
    if (text::trim(line).empty()) continue;
    auto f = text::split(line);
    if (f.size() != 4) throw ParseError(line_no, "expected 4 fields");
    try {
      t.dates.push_back(parse_date(f[0]));
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
    t.ew_rel_logret.push_back(text::require_double(f[1], line_no, "ew_rel_logret"));
    t.ew_topn_vs_cw_topn_logret.push_back(text::require_double(f[2], line_no, "ew_topn_vs_cw_topn_logret"));
    t.turnover.push_back(text::require_double(f[3], line_no, "turnover"));
  }
  return t;
}

void write_trades(std::ostream& out, std::span<const TradeEvent> trades) {
  out << kTradesHeader << '\n';
  for (const auto& t : trades) {
    out << format_date(t.date) << ',' << t.security.value << ',' << text::format_double(t.weight_change) << ','
        << text::format_double(t.price_index) << ',' << (t.is_reconstitution_buy ? 1 : 0) << '\n';
  }
}

std::vector<TradeEvent> read_trades(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  text::expect_header(in, line, line_no, kTradesHeader);
  std::vector<TradeEvent> trades;
  while (text::next_line(in, line, line_no)) {
    if (text::trim(line).empty()) continue;
    auto f = text::split(line);
    if (f.size() != 5) throw ParseError(line_no, "expected 5 fields, got " + std::to_string(f.size()));
    TradeEvent t;
    try {
      t.date = parse_date(f[0]);
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
    if (f[1].empty()) throw ParseError(line_no, "empty security_id");
    t.security.value = std::string(f[1]);
    t.weight_change = text::require_double(f[2], line_no, "weight_change");
    t.price_index = text::require_double(f[3], line_no, "price_index");
    if (f[4] == "1" || f[4] == "true") {
      t.is_reconstitution_buy = true;
    } else if (f[4] == "0" || f[4] == "false") {
      t.is_reconstitution_buy = false;
    } else {
      throw ParseError(line_no, "is_reconstitution_buy must be 0/1/true/false");
    }
    if (!(t.price_index > 0.0)) throw ParseError(line_no, "price_index must be > 0");
    if (t.is_reconstitution_buy && !(t.weight_change > 0.0)) {
      throw ParseError(line_no, "reconstitution buy with non-positive weight change");
    }
    trades.push_back(std::move(t));
  }
  return trades;
}

}  // namespace ewsim
