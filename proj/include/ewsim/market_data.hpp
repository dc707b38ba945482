#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ewsim/date.hpp"

namespace ewsim {

// Opaque security token. Ordering is plain byte order and doubles as the
// cap-ranking tie-breaker.
struct SecurityId {
  std::string value;

  friend auto operator<=>(const SecurityId&, const SecurityId&) = default;
  friend bool operator==(const SecurityId&, const SecurityId&) = default;
};

struct DailyRecord {
  Date date;
  SecurityId security;
  double total_return = 0.0;  // simple return over the day ending on `date`
  double market_cap = 0.0;
};

// Dense index into MarketHistory::securities().
using SecurityIndex = std::uint32_t;

struct DayRecord {
  SecurityIndex security;
  double total_return;
  double market_cap;

  friend bool operator==(const DayRecord&, const DayRecord&) = default;
};

// Point-in-time daily panel. Immutable once built; safe to share between
// concurrent simulations.
class MarketHistory {
 public:
  MarketHistory() = default;

  // Validates and indexes. Throws Error(data) on duplicates, cap <= 0,
  // return <= -1 or an empty record set.
  static MarketHistory from_records(std::vector<DailyRecord> records);

  const std::vector<Date>& calendar() const { return calendar_; }
  const std::vector<SecurityId>& securities() const { return securities_; }
  std::size_t num_days() const { return calendar_.size(); }
  std::size_t num_securities() const { return securities_.size(); }
  std::size_t num_records() const { return records_.size(); }

  // Records of one calendar day, ordered by security index (== by SecurityId).
  std::span<const DayRecord> day(std::size_t day_index) const {
    return {records_.data() + offsets_[day_index], offsets_[day_index + 1] - offsets_[day_index]};
  }

  double total_cap(std::size_t day_index) const { return total_cap_[day_index]; }

  std::optional<std::size_t> day_index(Date date) const;
  std::optional<SecurityIndex> security_index(const SecurityId& id) const;

  // Indices of the first calendar date of every month present in the calendar.
  std::vector<std::size_t> reconstitution_days() const;

  // Restriction to [first, last] (inclusive); throws if the range holds no dates.
  MarketHistory slice(Date first, Date last) const;

  std::vector<DailyRecord> to_records() const;

  friend bool operator==(const MarketHistory&, const MarketHistory&) = default;

 private:
  std::vector<Date> calendar_;
  std::vector<SecurityId> securities_;
  std::vector<std::size_t> offsets_;  // CSR offsets into records_, size num_days + 1
  std::vector<DayRecord> records_;
  std::vector<double> total_cap_;
};

// CSV schema `date,security_id,total_return,market_cap`.
MarketHistory load_history(std::istream& in);
MarketHistory load_history_file(const std::string& path);
void write_history(std::ostream& out, const MarketHistory& history);

struct SyntheticSpec {
  std::size_t n_assets = 50;
  int horizon_years = 50;
  int periods_per_year = 252;
  std::vector<double> vol{0.30};   // annualized log-vol; one value broadcasts to all assets
  std::vector<double> drift{0.0};  // annualized log-drift; same broadcast rule
  double correlation = 0.0;
  std::uint64_t seed = 1;
  int start_year = 2000;
};

// Log-normal multiplicative market on a synthetic calendar of
// periods_per_year / 12 trading days per month (days 1..k of each month).
// Equicorrelated shocks via a one-factor construction.
MarketHistory generate_synthetic(const SyntheticSpec& spec);

struct UniverseSnapshot {
  Date date;
  std::vector<SecurityId> members;  // descending cap, ties by ascending id
  std::vector<double> caps;         // parallel to members
};

UniverseSnapshot reconstitute(const MarketHistory& history, Date date);
UniverseSnapshot reconstitute_day(const MarketHistory& history, std::size_t day_index);

struct ReconstitutionFlows {
  std::size_t stay = 0;
  std::size_t leave = 0;
  std::size_t enter = 0;

  friend bool operator==(const ReconstitutionFlows&, const ReconstitutionFlows&) = default;
};

ReconstitutionFlows reconstitution_flows(const UniverseSnapshot& prev, const UniverseSnapshot& next,
                                         std::size_t top_n);

}  // namespace ewsim
