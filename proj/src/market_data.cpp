#include "ewsim/market_data.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "ewsim/error.hpp"
#include "text.hpp"

namespace ewsim {

namespace {

constexpr std::string_view kHistoryHeader = "date,security_id,total_return,market_cap";

void validate_values(const DailyRecord& r, const std::string& where) {
  if (r.security.value.empty()) throw Error(ErrorCode::data, where + "empty security_id");
  if (!(r.market_cap > 0.0)) {
    throw Error(ErrorCode::data, where + "market_cap must be > 0 for " + r.security.value);
  }
  if (!(r.total_return > -1.0)) {
    throw Error(ErrorCode::data, where + "total_return must be > -1 for " + r.security.value);
  }
}

}  // namespace

MarketHistory MarketHistory::from_records(std::vector<DailyRecord> records) {
  if (records.empty()) throw Error(ErrorCode::data, "market history has no records");
  for (const auto& r : records) validate_values(r, "");

  std::sort(records.begin(), records.end(), [](const DailyRecord& a, const DailyRecord& b) {
    if (a.date != b.date) return a.date < b.date;
    return a.security < b.security;
  });

  MarketHistory h;
  std::set<SecurityId> ids;
  for (const auto& r : records) ids.insert(r.security);
  h.securities_.assign(ids.begin(), ids.end());

  h.records_.reserve(records.size());
  h.offsets_.push_back(0);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (i > 0 && records[i - 1].date == r.date && records[i - 1].security == r.security) {
      throw Error(ErrorCode::data, "duplicate record for (" + format_date(r.date) + ", " +
                                       r.security.value + ")");
    }
    if (h.calendar_.empty() || h.calendar_.back() != r.date) {
      if (!h.calendar_.empty()) h.offsets_.push_back(h.records_.size());
      h.calendar_.push_back(r.date);
      h.total_cap_.push_back(0.0);
    }
    auto idx = static_cast<SecurityIndex>(
        std::lower_bound(h.securities_.begin(), h.securities_.end(), r.security) -
        h.securities_.begin());
    h.records_.push_back({idx, r.total_return, r.market_cap});
    h.total_cap_.back() += r.market_cap;
  }
  h.offsets_.push_back(h.records_.size());
  return h;
}

std::optional<std::size_t> MarketHistory::day_index(Date date) const {
  auto it = std::lower_bound(calendar_.begin(), calendar_.end(), date);
  if (it == calendar_.end() || *it != date) return std::nullopt;
  return static_cast<std::size_t>(it - calendar_.begin());
}

std::optional<SecurityIndex> MarketHistory::security_index(const SecurityId& id) const {
  auto it = std::lower_bound(securities_.begin(), securities_.end(), id);
  if (it == securities_.end() || *it != id) return std::nullopt;
  return static_cast<SecurityIndex>(it - securities_.begin());
}

std::vector<std::size_t> MarketHistory::reconstitution_days() const {
  std::vector<std::size_t> out;
  for (std::size_t d = 0; d < calendar_.size(); ++d) {
    if (d == 0 || !same_month(calendar_[d - 1], calendar_[d])) out.push_back(d);
  }
  return out;
}

std::vector<DailyRecord> MarketHistory::to_records() const {
  std::vector<DailyRecord> out;
  out.reserve(records_.size());
  for (std::size_t d = 0; d < calendar_.size(); ++d) {
    for (const auto& r : day(d)) {
      out.push_back({calendar_[d], securities_[r.security], r.total_return, r.market_cap});
    }
  }
  return out;
}

MarketHistory MarketHistory::slice(Date first, Date last) const {
  std::vector<DailyRecord> kept;
  for (std::size_t d = 0; d < calendar_.size(); ++d) {
    if (calendar_[d] < first || calendar_[d] > last) continue;
    for (const auto& r : day(d)) {
      kept.push_back({calendar_[d], securities_[r.security], r.total_return, r.market_cap});
    }
  }
  if (kept.empty()) {
    throw Error(ErrorCode::data,
                "no trading dates in range " + format_date(first) + ".." + format_date(last));
  }
  return from_records(std::move(kept));
}

MarketHistory load_history(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  text::expect_header(in, line, line_no, kHistoryHeader);

  std::vector<DailyRecord> records;
  std::vector<std::size_t> lines;
  while (text::next_line(in, line, line_no)) {
    if (text::trim(line).empty()) continue;
    auto fields = text::split(line);
    if (fields.size() != 4) {
      throw ParseError(line_no, "expected 4 fields, got " + std::to_string(fields.size()));
    }
    DailyRecord r;
    try {
      r.date = parse_date(fields[0]);
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
    r.security.value = std::string(fields[1]);
    r.total_return = text::require_double(fields[2], line_no, "total_return");
    r.market_cap = text::require_double(fields[3], line_no, "market_cap");
    try {
      validate_values(r, "");
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
    records.push_back(std::move(r));
    lines.push_back(line_no);
  }

  // Duplicates are reported against the later of the two lines.
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (records[a].date != records[b].date) return records[a].date < records[b].date;
    return records[a].security < records[b].security;
  });
  for (std::size_t k = 1; k < order.size(); ++k) {
    const auto& a = records[order[k - 1]];
    const auto& b = records[order[k]];
    if (a.date == b.date && a.security == b.security) {
      throw ParseError(lines[order[k]], "duplicate record for (" + format_date(b.date) + ", " +
                                            b.security.value + "), first seen on line " +
                                            std::to_string(lines[order[k - 1]]));
    }
  }
  if (records.empty()) throw ParseError(line_no, "no data rows");
  return MarketHistory::from_records(std::move(records));
}

MarketHistory load_history_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open market data file '" + path + "'");
  return load_history(in);
}

void write_history(std::ostream& out, const MarketHistory& history) {
  out << kHistoryHeader << '\n';
  const auto& ids = history.securities();
  for (std::size_t d = 0; d < history.num_days(); ++d) {
    const std::string date = format_date(history.calendar()[d]);
    for (const auto& r : history.day(d)) {
      out << date << ',' << ids[r.security].value << ',' << text::format_double(r.total_return)
          << ',' << text::format_double(r.market_cap) << '\n';
    }
  }
}

UniverseSnapshot reconstitute_day(const MarketHistory& history, std::size_t day_index) {
  if (day_index >= history.num_days()) {
    throw Error(ErrorCode::invalid_argument, "day index out of range");
  }
  auto recs = history.day(day_index);
  std::vector<const DayRecord*> ranked;
  ranked.reserve(recs.size());
  for (const auto& r : recs) ranked.push_back(&r);
  // Records are already in ascending id order, so a stable sort by cap keeps
  // the id tie-break.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const DayRecord* a, const DayRecord* b) { return a->market_cap > b->market_cap; });

  UniverseSnapshot snap;
  snap.date = history.calendar()[day_index];
  snap.members.reserve(ranked.size());
  snap.caps.reserve(ranked.size());
  for (const auto* r : ranked) {
    snap.members.push_back(history.securities()[r->security]);
    snap.caps.push_back(r->market_cap);
  }
  return snap;
}

UniverseSnapshot reconstitute(const MarketHistory& history, Date date) {
  auto idx = history.day_index(date);
  if (!idx) throw Error(ErrorCode::invalid_argument, format_date(date) + " is not on the trading calendar");
  return reconstitute_day(history, *idx);
}

ReconstitutionFlows reconstitution_flows(const UniverseSnapshot& prev, const UniverseSnapshot& next,
                                         std::size_t top_n) {
  auto top = [top_n](const UniverseSnapshot& s) {
    std::size_t k = std::min(top_n, s.members.size());
    std::vector<SecurityId> ids(s.members.begin(), s.members.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(ids.begin(), ids.end());
    return ids;
  };
  auto a = top(prev);
  auto b = top(next);
  std::vector<SecurityId> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  return {common.size(), a.size() - common.size(), b.size() - common.size()};
}

}  // namespace ewsim
