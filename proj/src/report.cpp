#include "ewsim/report.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "ewsim/attribution.hpp"
#include "ewsim/error.hpp"
#include "text.hpp"

namespace ewsim {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kSummaryHeader = "series,mean,stdev,change";

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  // avoid printing "-0.00"
  if (std::string_view(buf) == "-0.00") return "0.00";
  return buf;
}

struct CellSeries {
  SimulationResult run;
  ProfitSeries profit;
  DecompositionSeries decomposition;
};

std::vector<SummaryRow> summarize(const CellSeries& s, int ppy, std::size_t from) {
  auto tail = [from](const std::vector<double>& v) { return std::span<const double>(v).subspan(from); };
  std::vector<SummaryRow> rows;
  auto add = [&](const char* name, AnnualizedStats st) { rows.push_back({name, st.mean, st.stdev, std::nullopt}); };
  add("ew_relative_return", annualized_stats(tail(s.run.ew_rel_logret), ppy));
  add("premium_estimate", annualized_stats(tail(s.decomposition.premium_estimate), ppy));
  add("trading_profit", annualized_stats(tail(s.profit.trading_profit), ppy));
  add("turnover", annualized_turnover(std::span<const Date>(s.run.dates).subspan(from), tail(s.run.turnover)));
  return rows;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error(ErrorCode::io, "failed writing '" + path.string() + "'");
}

template <class Fn>
std::string render(Fn&& fn) {
  std::ostringstream os;
  fn(os);
  return os.str();
}

std::optional<std::size_t> baseline_index(const RunConfig& cfg, std::size_t si, std::size_t ti, std::size_t ki) {
  BaselineRule rule = cfg.baseline;
  if (rule == BaselineRule::automatic) {
    if (cfg.schedules.size() > 1) rule = BaselineRule::schedule;
    else if (cfg.tc_bps.size() > 1) rule = BaselineRule::tc;
    else rule = BaselineRule::none;
  }
  const std::size_t nt = cfg.tc_bps.size();
  const std::size_t nk = cfg.schedules.size();
  auto index = [&](std::size_t t, std::size_t k) { return (si * nt + t) * nk + k; };
  if (rule == BaselineRule::schedule) {
    std::size_t base = 0;
    for (std::size_t k = 0; k < nk; ++k) {
      if (cfg.schedules[k].frequency == Frequency::monthly) {
        base = k;
        break;
      }
    }
    if (base == ki) return std::nullopt;
    return index(ti, base);
  }
  if (rule == BaselineRule::tc) {
    auto base = static_cast<std::size_t>(std::min_element(cfg.tc_bps.begin(), cfg.tc_bps.end()) - cfg.tc_bps.begin());
    if (base == ti || cfg.tc_bps[base] == cfg.tc_bps[ti]) return std::nullopt;
    return index(base, ki);
  }
  return std::nullopt;
}

}  // namespace

std::string emit_summary(const std::vector<SummaryRow>& rows, SummaryFormat format) {
  if (rows.empty()) throw Error(ErrorCode::invalid_argument, "emit_summary: no rows");
  std::ostringstream os;
  if (format == SummaryFormat::machine) {
    os << kSummaryHeader << '\n';
    for (const auto& r : rows) {
      os << r.series << ',' << text::format_double(r.mean) << ',' << text::format_double(r.stdev) << ',';
      if (r.change) os << text::format_double(*r.change);
      os << '\n';
    }
    return os.str();
  }
  const bool with_change = std::any_of(rows.begin(), rows.end(), [](const SummaryRow& r) { return r.change.has_value(); });
  std::size_t width = std::string_view("series").size();
  for (const auto& r : rows) width = std::max(width, r.series.size());
  auto pad = [](std::string s, std::size_t w, bool right) {
    if (s.size() >= w) return s;
    return right ? std::string(w - s.size(), ' ') + s : s + std::string(w - s.size(), ' ');
  };
  os << pad("series", width, false) << "  " << pad("mean", 8, true) << "  " << pad("stdev", 8, true);
  if (with_change) os << "  " << pad("change", 8, true);
  os << '\n';
  for (const auto& r : rows) {
    os << pad(r.series, width, false) << "  " << pad(fixed2(r.mean), 8, true) << "  " << pad(fixed2(r.stdev), 8, true);
    if (with_change) os << "  " << pad(r.change ? fixed2(*r.change) : "", 8, true);
    os << '\n';
  }
  std::string s = os.str();
  // strip trailing blanks left by empty change cells
  std::string cleaned;
  std::istringstream lines(s);
  std::string line;
  while (std::getline(lines, line)) {
    while (!line.empty() && line.back() == ' ') line.pop_back();
    cleaned += line + '\n';
  }
  return cleaned;
}

std::vector<SummaryRow> parse_summary(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  text::expect_header(in, line, line_no, kSummaryHeader);
  std::vector<SummaryRow> rows;
  while (text::next_line(in, line, line_no)) {
    if (text::trim(line).empty()) continue;
    auto f = text::split(line);
    if (f.size() != 4) throw ParseError(line_no, "expected 4 fields");
    SummaryRow r;
    r.series = std::string(f[0]);
    r.mean = text::require_double(f[1], line_no, "mean");
    r.stdev = text::require_double(f[2], line_no, "stdev");
    if (!f[3].empty()) r.change = text::require_double(f[3], line_no, "change");
    rows.push_back(std::move(r));
  }
  return rows;
}

MarketHistory load_market(const RunConfig& config) {
  MarketHistory history = config.source == DataSource::csv ? load_history_file(config.data_path)
                                                           : generate_synthetic(config.synthetic);
  if (config.start || config.end) {
    const auto& cal = history.calendar();
    const Date first = config.start.value_or(cal.front());
    const Date last = config.end.value_or(cal.back());
    if (first < cal.front() || last > cal.back()) {
      throw Error(ErrorCode::config, "configured date range " + format_date(first) + ".." + format_date(last) +
                                         " lies outside the data span " + format_date(cal.front()) + ".." +
                                         format_date(cal.back()));
    }
    history = history.slice(first, last);
  }
  return history;
}

GridReport run_grid(const RunConfig& config) {
  config.validate();
  const MarketHistory history = load_market(config);

  struct CellPlan {
    std::size_t si, ti, ki;
  };
  std::vector<CellPlan> plan;
  for (std::size_t si = 0; si < config.sizes.size(); ++si)
    for (std::size_t ti = 0; ti < config.tc_bps.size(); ++ti)
      for (std::size_t ki = 0; ki < config.schedules.size(); ++ki) plan.push_back({si, ti, ki});

  std::vector<CellSeries> series(plan.size());
  std::vector<std::exception_ptr> failures(plan.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < plan.size(); i = next++) {
      try {
        const auto& p = plan[i];
        const double tc = config.tc_bps[p.ti];
        auto& cell = series[i];
        cell.run = run_simulation(history, {config.sizes[p.si].top_n, config.schedules[p.ki], tc});
        cell.profit = attribute(cell.run.trades, tc, cell.run.dates);
        cell.decomposition = decompose(cell.run, config.factor_for(config.sizes[p.si]));
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  unsigned n_threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, plan.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
  }
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  std::size_t rebase_from = 0;
  if (config.rebase_from) {
    const auto& cal = history.calendar();
    rebase_from = static_cast<std::size_t>(std::lower_bound(cal.begin(), cal.end(), *config.rebase_from) - cal.begin());
    if (cal.size() - rebase_from < 2) {
      throw Error(ErrorCode::config, "output.rebase_from leaves fewer than two trading dates");
    }
  }

  GridReport report;
  report.output_dir = config.output_dir;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto& p = plan[i];
    CellReport cell;
    cell.size = config.sizes[p.si];
    cell.tc_bps = config.tc_bps[p.ti];
    cell.schedule = config.schedules[p.ki];
    cell.name = cell_name(cell.size, cell.tc_bps, cell.schedule);
    cell.factor = config.factor_for(cell.size);
    cell.rows = summarize(series[i], config.periods_per_year, 0);
    if (config.rebase_from) cell.rebased_rows = summarize(series[i], config.periods_per_year, rebase_from);
    cell.series_rows = series[i].run.dates.size();
    report.cells.push_back(std::move(cell));
  }
  for (std::size_t i = 0; i < plan.size(); ++i) {
    auto base = baseline_index(config, plan[i].si, plan[i].ti, plan[i].ki);
    if (!base) continue;
    auto& cell = report.cells[i];
    const auto& ref = report.cells[*base];
    cell.baseline = ref.name;
    for (std::size_t r = 0; r < cell.rows.size(); ++r) cell.rows[r].change = cell.rows[r].mean - ref.rows[r].mean;
    for (std::size_t r = 0; r < cell.rebased_rows.size(); ++r) {
      cell.rebased_rows[r].change = cell.rebased_rows[r].mean - ref.rebased_rows[r].mean;
    }
  }

  // Output is written from this thread only, in grid order.
  const fs::path root(config.output_dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create output directory '" + root.string() + "': " + ec.message());
  const char* summary_name = config.summary_format == SummaryFormat::plain ? "summary.txt" : "summary.csv";
  std::string grid_text;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto& cell = report.cells[i];
    const auto& s = series[i];
    const fs::path dir = root / cell.name;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::io, "cannot create '" + dir.string() + "': " + ec.message());
    write_file(dir / "relative.csv", render([&](std::ostream& os) { write_relative_series(os, s.run); }));
    write_file(dir / "profit.csv", render([&](std::ostream& os) { write_profit(os, s.profit); }));
    write_file(dir / "decomposition.csv", render([&](std::ostream& os) { write_decomposition(os, s.decomposition); }));
    write_file(dir / "turnover.csv", render([&](std::ostream& os) { write_turnover(os, s.run); }));
    write_file(dir / summary_name, emit_summary(cell.rows, config.summary_format));
    if (config.rebase_from) {
      const std::string name = std::string("summary_from_") + format_date(*config.rebase_from) +
                               (config.summary_format == SummaryFormat::plain ? ".txt" : ".csv");
      write_file(dir / name, emit_summary(cell.rebased_rows, config.summary_format));
    }
    if (config.write_trades) {
      write_file(dir / "trades.csv", render([&](std::ostream& os) { write_trades(os, s.run.trades); }));
    }

    grid_text += "[" + cell.name + "] top_n=" +
                 (cell.size.top_n == kAllMembers ? std::string("all") : std::to_string(cell.size.top_n)) +
                 " tc_bps=" + text::format_double(cell.tc_bps) + " schedule=" + to_string(cell.schedule.frequency) +
                 "/" + std::to_string(cell.schedule.month_offset) + " factor=" + text::format_double(cell.factor);
    if (cell.baseline) grid_text += " baseline=" + *cell.baseline;
    grid_text += "\n" + emit_summary(cell.rows, SummaryFormat::plain) + "\n";
  }
  write_file(root / "grid_summary.txt", grid_text);
  return report;
}

}  // namespace ewsim
