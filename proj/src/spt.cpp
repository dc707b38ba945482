#include "ewsim/spt.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "ewsim/error.hpp"
#include "ewsim/portfolio_engine.hpp"
#include "text.hpp"

namespace ewsim {

CalibrationTable CalibrationTable::defaults() {
  CalibrationTable t;
  t.set("crsp", "lrg", 0.3);
  t.set("crsp", "sml", 0.3);
  t.set("s500", "lrg", 0.45);
  t.set("s500", "sml", 0.55);
  t.set("msci", "lrg", 0.45);
  t.set("msci", "sml", 0.55);
  t.set("msem", "lrg", 0.6);
  t.set("msem", "sml", 0.65);
  return t;
}

void CalibrationTable::set(const std::string& universe, const std::string& size_label, double factor) {
  if (!(factor >= 0.0 && factor <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "calibration factor for " + universe + "/" + size_label +
                                                 " must lie in [0, 1]");
  }
  factors_[{universe, size_label}] = factor;
}

std::optional<double> CalibrationTable::find(const std::string& universe, const std::string& size_label) const {
  auto it = factors_.find({universe, size_label});
  if (it == factors_.end()) return std::nullopt;
  return it->second;
}

double size_exposure(std::span<const double> start, std::span<const double> end) {
  if (start.size() != end.size()) throw Error(ErrorCode::invalid_argument, "size_exposure: mismatched held sets");
  if (start.empty()) throw Error(ErrorCode::invalid_argument, "size_exposure: empty held set");
  double sum = 0.0;
  for (std::size_t i = 0; i < start.size(); ++i) {
    if (!(start[i] > 0.0) || !(end[i] > 0.0)) {
      throw Error(ErrorCode::invalid_argument, "size_exposure: market weight must be positive");
    }
    sum += std::log(end[i]) - std::log(start[i]);
  }
  return sum / static_cast<double>(start.size());
}

double size_exposure(const std::map<SecurityId, double>& held_start, const std::map<SecurityId, double>& held_end,
                     const std::map<SecurityId, double>& market_weight_start,
                     const std::map<SecurityId, double>& market_weight_end) {
  std::vector<double> a, b;
  for (const auto& [id, w] : held_start) {
    if (w <= 0.0) continue;
    auto e = held_end.find(id);
    if (e == held_end.end() || e->second <= 0.0) continue;
    auto ms = market_weight_start.find(id);
    auto me = market_weight_end.find(id);
    if (ms == market_weight_start.end() || me == market_weight_end.end()) {
      throw Error(ErrorCode::invalid_argument, "size_exposure: missing market weight for " + id.value);
    }
    a.push_back(ms->second);
    b.push_back(me->second);
  }
  return size_exposure(a, b);
}

double leakage(double ew_topn_ret, double cw_topn_ret, double size_exp, double factor) {
  if (!(factor >= 0.0 && factor <= 1.0)) throw Error(ErrorCode::invalid_argument, "calibration factor must lie in [0, 1]");
  return factor * ((ew_topn_ret - cw_topn_ret) - size_exp);
}

double premium_estimate(double ew_topn_ret, double cw_topn_ret, double size_exp, double factor) {
  const double residual = (ew_topn_ret - cw_topn_ret) - size_exp;
  return residual - leakage(ew_topn_ret, cw_topn_ret, size_exp, factor);
}

DecompositionSeries decompose(std::span<const Date> dates, std::span<const double> bracket,
                              std::span<const double> size_exp, double factor) {
  if (dates.size() != bracket.size() || dates.size() != size_exp.size()) {
    throw Error(ErrorCode::invalid_argument, "decompose: misaligned series lengths");
  }
  DecompositionSeries out;
  out.dates.assign(dates.begin(), dates.end());
  out.size_exposure.assign(size_exp.begin(), size_exp.end());
  out.leakage.resize(dates.size());
  out.premium_estimate.resize(dates.size());
  for (std::size_t i = 0; i < dates.size(); ++i) {
    out.leakage[i] = leakage(bracket[i], 0.0, size_exp[i], factor);
    out.premium_estimate[i] = premium_estimate(bracket[i], 0.0, size_exp[i], factor);
  }
  return out;
}

DecompositionSeries decompose(const SimulationResult& run, double factor) {
  return decompose(run.dates, run.ew_topn_vs_cw_topn_logret, run.size_exposure, factor);
}

void write_decomposition(std::ostream& out, const DecompositionSeries& s) {
  out << "date,size_exposure,leakage,premium_estimate\n";
  for (std::size_t i = 0; i < s.dates.size(); ++i) {
    out << format_date(s.dates[i]) << ',' << text::format_double(s.size_exposure[i]) << ','
        << text::format_double(s.leakage[i]) << ',' << text::format_double(s.premium_estimate[i]) << '\n';
  }
}

DecompositionSeries read_decomposition(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  text::expect_header(in, line, line_no, "date,size_exposure,leakage,premium_estimate");
  DecompositionSeries s;
  while (text::next_line(in, line, line_no)) {
    if (text::trim(line).empty()) continue;
    auto f = text::split(line);
    if (f.size() != 4) throw ParseError(line_no, "expected 4 fields");
    try {
      s.dates.push_back(parse_date(f[0]));
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
    s.size_exposure.push_back(text::require_double(f[1], line_no, "size_exposure"));
    s.leakage.push_back(text::require_double(f[2], line_no, "leakage"));
    s.premium_estimate.push_back(text::require_double(f[3], line_no, "premium_estimate"));
  }
  return s;
}

}  // namespace ewsim
