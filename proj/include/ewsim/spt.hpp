#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ewsim/date.hpp"
#include "ewsim/market_data.hpp"

namespace ewsim {

struct SimulationResult;

// Calibration factors for the leakage estimate keyed by (universe, size label).
class CalibrationTable {
 public:
  CalibrationTable() = default;

  // crsp/s500/msci/msem x lrg/sml defaults.
  static CalibrationTable defaults();

  void set(const std::string& universe, const std::string& size_label, double factor);
  std::optional<double> find(const std::string& universe, const std::string& size_label) const;
  const std::map<std::pair<std::string, std::string>, double>& entries() const { return factors_; }

 private:
  std::map<std::pair<std::string, std::string>, double> factors_;
};

// Mean change of log market weight over the held set. The spans are the
// market weights (cap / total universe cap) of the same held names at the
// start and end of the period. Throws Error(invalid_argument) on an empty
// set, mismatched sizes or a non-positive weight.
double size_exposure(std::span<const double> market_weight_start, std::span<const double> market_weight_end);

// Map form: the held set is the intersection of the two holdings, and each
// held name must have a positive market weight on both sides.
double size_exposure(const std::map<SecurityId, double>& held_start, const std::map<SecurityId, double>& held_end,
                     const std::map<SecurityId, double>& market_weight_start,
                     const std::map<SecurityId, double>& market_weight_end);

// factor * ((ew_topn_ret - cw_topn_ret) - size_exp)
double leakage(double ew_topn_ret, double cw_topn_ret, double size_exp, double factor);

// The complement of leakage within the bracket: bracket - size - leakage.
double premium_estimate(double ew_topn_ret, double cw_topn_ret, double size_exp, double factor);

struct DecompositionSeries {
  std::vector<Date> dates;
  std::vector<double> size_exposure;
  std::vector<double> leakage;
  std::vector<double> premium_estimate;
};

// Per-period decomposition of the EW vs CW-top-n relative return.
DecompositionSeries decompose(const SimulationResult& run, double factor);

// Lower-level form over already aligned series.
DecompositionSeries decompose(std::span<const Date> dates, std::span<const double> ew_topn_vs_cw_topn,
                              std::span<const double> size_exposure, double factor);

// CSV `date,size_exposure,leakage,premium_estimate`.
void write_decomposition(std::ostream& out, const DecompositionSeries& series);
DecompositionSeries read_decomposition(std::istream& in);

}  // namespace ewsim
