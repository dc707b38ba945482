#include <algorithm>
#include <cmath>
#include <random>

#include "ewsim/error.hpp"
#include "ewsim/market_data.hpp"

namespace ewsim {

namespace {

std::vector<double> broadcast(const std::vector<double>& v, std::size_t n, const char* name) {
  if (v.size() == 1) return std::vector<double>(n, v.front());
  if (v.size() != n) {
    throw Error(ErrorCode::invalid_argument, std::string("synthetic ") + name +
                                                 " needs 1 or n_assets values, got " +
                                                 std::to_string(v.size()));
  }
  return v;
}

std::vector<Date> synthetic_calendar(int start_year, int years, int days_per_month) {
  std::vector<Date> out;
  out.reserve(static_cast<std::size_t>(years) * 12 * static_cast<std::size_t>(days_per_month));
  for (int y = 0; y < years; ++y) {
    for (unsigned m = 1; m <= 12; ++m) {
      for (int d = 1; d <= days_per_month; ++d) {
        out.push_back(Date{std::chrono::year{start_year + y}, std::chrono::month{m},
                           std::chrono::day{static_cast<unsigned>(d)}});
      }
    }
  }
  return out;
}

}  // namespace

MarketHistory generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n_assets < 2) throw Error(ErrorCode::invalid_argument, "synthetic n_assets must be >= 2");
  if (spec.horizon_years < 1) throw Error(ErrorCode::invalid_argument, "synthetic horizon_years must be >= 1");
  if (spec.periods_per_year < 12 || spec.periods_per_year % 12 != 0 || spec.periods_per_year > 336) {
    throw Error(ErrorCode::invalid_argument,
                "synthetic periods_per_year must be a multiple of 12 in [12, 336]");
  }
  if (!(spec.correlation >= 0.0 && spec.correlation < 1.0)) {
    throw Error(ErrorCode::invalid_argument,
                "synthetic correlation must lie in [0, 1) for a positive semi-definite equicorrelation matrix");
  }
  const std::size_t n = spec.n_assets;
  const auto vol = broadcast(spec.vol, n, "vol");
  const auto drift = broadcast(spec.drift, n, "drift");
  for (double v : vol) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorCode::invalid_argument, "synthetic vol must be >= 0");
  }
  for (double m : drift) {
    if (!std::isfinite(m)) throw Error(ErrorCode::invalid_argument, "synthetic drift must be finite");
  }

  const auto calendar = synthetic_calendar(spec.start_year, spec.horizon_years, spec.periods_per_year / 12);
  const double ppy = spec.periods_per_year;
  const double common_load = std::sqrt(spec.correlation);
  const double idio_load = std::sqrt(1.0 - spec.correlation);

  std::vector<SecurityId> ids(n);
  const std::size_t width = std::max<std::size_t>(3, std::to_string(n).size());
  for (std::size_t i = 0; i < n; ++i) {
    std::string digits = std::to_string(i + 1);
    ids[i].value = "S" + std::string(width - digits.size(), '0') + digits;
  }

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<double> caps(n, 1.0);
  std::vector<DailyRecord> records;
  records.reserve(calendar.size() * n);
  for (std::size_t d = 0; d < calendar.size(); ++d) {
    if (d == 0) {
      for (std::size_t i = 0; i < n; ++i) records.push_back({calendar[d], ids[i], 0.0, caps[i]});
      continue;
    }
    const double common = normal(rng);
    for (std::size_t i = 0; i < n; ++i) {
      const double shock = common_load * common + idio_load * normal(rng);
      const double log_ret = drift[i] / ppy + vol[i] / std::sqrt(ppy) * shock;
      const double gross = std::exp(log_ret);
      caps[i] *= gross;
      records.push_back({calendar[d], ids[i], gross - 1.0, caps[i]});
    }
  }
  return MarketHistory::from_records(std::move(records));
}

}  // namespace ewsim
