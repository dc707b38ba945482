#include "ewsim/ewsim.h"

#include <filesystem>
#include <fstream>
#include <new>
#include <string>

#include "ewsim/attribution.hpp"
#include "ewsim/error.hpp"
#include "ewsim/market_data.hpp"
#include "ewsim/portfolio_engine.hpp"
#include "ewsim/report.hpp"
#include "ewsim/spt.hpp"

struct ewsim_history {
  ewsim::MarketHistory history;
};

struct ewsim_run {
  ewsim::SimulationResult result;
  ewsim::ProfitSeries profit;
  ewsim::DecompositionSeries decomposition;
};

struct ewsim_grid {
  ewsim::GridReport report;
  std::vector<std::string> summaries;
};

namespace {

thread_local std::string g_last_error;

ewsim_status to_status(ewsim::ErrorCode code) {
  switch (code) {
    case ewsim::ErrorCode::invalid_argument: return EWSIM_ERR_INVALID_ARGUMENT;
    case ewsim::ErrorCode::parse: return EWSIM_ERR_PARSE;
    case ewsim::ErrorCode::data: return EWSIM_ERR_DATA;
    case ewsim::ErrorCode::config: return EWSIM_ERR_CONFIG;
    case ewsim::ErrorCode::io: return EWSIM_ERR_IO;
  }
  return EWSIM_ERR_INTERNAL;
}

ewsim_status fail(ewsim_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <class Fn>
ewsim_status guarded(Fn&& fn) noexcept {
  try {
    g_last_error.clear();
    fn();
    return EWSIM_OK;
  } catch (const ewsim::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(EWSIM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(EWSIM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(EWSIM_ERR_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw ewsim::Error(ewsim::ErrorCode::invalid_argument, what);
}

ewsim::RebalanceSchedule to_schedule(ewsim_frequency f, unsigned offset) {
  switch (f) {
    case EWSIM_MONTHLY: return {ewsim::Frequency::monthly, offset};
    case EWSIM_QUARTERLY: return {ewsim::Frequency::quarterly, offset};
    case EWSIM_SEMIANNUAL: return {ewsim::Frequency::semiannual, offset};
  }
  throw ewsim::Error(ewsim::ErrorCode::invalid_argument, "unknown frequency");
}

const std::vector<double>& pick(const ewsim_run& run, ewsim_series s) {
  switch (s) {
    case EWSIM_SERIES_EW_RELATIVE: return run.result.ew_rel_logret;
    case EWSIM_SERIES_EW_TOPN_VS_CW_TOPN: return run.result.ew_topn_vs_cw_topn_logret;
    case EWSIM_SERIES_TURNOVER: return run.result.turnover;
    case EWSIM_SERIES_SIZE_EXPOSURE: return run.decomposition.size_exposure;
    case EWSIM_SERIES_LEAKAGE: return run.decomposition.leakage;
    case EWSIM_SERIES_PREMIUM_ESTIMATE: return run.decomposition.premium_estimate;
    case EWSIM_SERIES_TRADING_PROFIT: return run.profit.trading_profit;
  }
  throw ewsim::Error(ewsim::ErrorCode::invalid_argument, "unknown series id");
}

template <class Writer>
void write_to(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ewsim::Error(ewsim::ErrorCode::io, "cannot write '" + path.string() + "'");
  writer(out);
}

}  // namespace

extern "C" {

const char* ewsim_version(void) { return "1.0.0"; }

const char* ewsim_status_name(ewsim_status status) {
  switch (status) {
    case EWSIM_OK: return "ok";
    case EWSIM_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case EWSIM_ERR_PARSE: return "parse_error";
    case EWSIM_ERR_DATA: return "data_error";
    case EWSIM_ERR_CONFIG: return "config_error";
    case EWSIM_ERR_IO: return "io_error";
    case EWSIM_ERR_INTERNAL: return "internal_error";
  }
  return "unknown_status";
}

const char* ewsim_last_error(void) { return g_last_error.c_str(); }

void ewsim_synthetic_spec_init(ewsim_synthetic_spec* spec) {
  if (!spec) return;
  const ewsim::SyntheticSpec d;
  spec->n_assets = d.n_assets;
  spec->horizon_years = d.horizon_years;
  spec->periods_per_year = d.periods_per_year;
  spec->vol = d.vol.front();
  spec->drift = d.drift.front();
  spec->correlation = d.correlation;
  spec->seed = d.seed;
  spec->start_year = d.start_year;
}

void ewsim_run_params_init(ewsim_run_params* params) {
  if (!params) return;
  params->top_n = 0;
  params->frequency = EWSIM_MONTHLY;
  params->month_offset = 0;
  params->tc_bps = 0.0;
  params->calibration_factor = 0.0;
}

ewsim_status ewsim_history_load_csv(const char* path, ewsim_history** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = nullptr;
    auto h = std::make_unique<ewsim_history>();
    h->history = ewsim::load_history_file(path);
    *out = h.release();
  });
}

ewsim_status ewsim_history_generate(const ewsim_synthetic_spec* spec, ewsim_history** out) {
  return guarded([&] {
    require(spec && out, "null argument");
    *out = nullptr;
    ewsim::SyntheticSpec s;
    s.n_assets = spec->n_assets;
    s.horizon_years = spec->horizon_years;
    s.periods_per_year = spec->periods_per_year;
    s.vol = {spec->vol};
    s.drift = {spec->drift};
    s.correlation = spec->correlation;
    s.seed = spec->seed;
    s.start_year = spec->start_year;
    auto h = std::make_unique<ewsim_history>();
    h->history = ewsim::generate_synthetic(s);
    *out = h.release();
  });
}

ewsim_status ewsim_history_write_csv(const ewsim_history* history, const char* path) {
  return guarded([&] {
    require(history && path, "null argument");
    write_to(path, [&](std::ostream& os) { ewsim::write_history(os, history->history); });
  });
}

size_t ewsim_history_num_days(const ewsim_history* history) { return history ? history->history.num_days() : 0; }

size_t ewsim_history_num_securities(const ewsim_history* history) {
  return history ? history->history.num_securities() : 0;
}

void ewsim_history_free(ewsim_history* history) { delete history; }

ewsim_status ewsim_simulate(const ewsim_history* history, const ewsim_run_params* params, ewsim_run** out) {
  return guarded([&] {
    require(history && params && out, "null argument");
    *out = nullptr;
    ewsim::SimulationParams p;
    p.top_n = params->top_n == 0 ? ewsim::kAllMembers : params->top_n;
    p.schedule = to_schedule(params->frequency, params->month_offset);
    p.tc_bps = params->tc_bps;
    auto run = std::make_unique<ewsim_run>();
    run->result = ewsim::run_simulation(history->history, p);
    run->profit = ewsim::attribute(run->result.trades, p.tc_bps, run->result.dates);
    run->decomposition = ewsim::decompose(run->result, params->calibration_factor);
    *out = run.release();
  });
}

size_t ewsim_run_length(const ewsim_run* run) { return run ? run->result.dates.size() : 0; }

size_t ewsim_run_num_trades(const ewsim_run* run) { return run ? run->result.trades.size() : 0; }

ewsim_status ewsim_run_series(const ewsim_run* run, ewsim_series series, double* out, size_t capacity) {
  return guarded([&] {
    require(run && out, "null argument");
    const auto& v = pick(*run, series);
    require(capacity >= v.size(), "output buffer smaller than the series");
    std::copy(v.begin(), v.end(), out);
  });
}

ewsim_status ewsim_run_stats(const ewsim_run* run, ewsim_series series, int periods_per_year, double* mean,
                             double* stdev) {
  return guarded([&] {
    require(run && mean && stdev, "null argument");
    const auto stats = series == EWSIM_SERIES_TURNOVER
                           ? ewsim::annualized_turnover(run->result.dates, run->result.turnover)
                           : ewsim::annualized_stats(pick(*run, series), periods_per_year);
    *mean = stats.mean;
    *stdev = stats.stdev;
  });
}

ewsim_status ewsim_run_write(const ewsim_run* run, const char* dir) {
  return guarded([&] {
    require(run && dir, "null argument");
    const std::filesystem::path root(dir);
    std::error_code ec;
    std::filesystem::create_directories(root, ec);
    if (ec) throw ewsim::Error(ewsim::ErrorCode::io, "cannot create '" + root.string() + "': " + ec.message());
    write_to(root / "relative.csv", [&](std::ostream& os) { ewsim::write_relative_series(os, run->result); });
    write_to(root / "profit.csv", [&](std::ostream& os) { ewsim::write_profit(os, run->profit); });
    write_to(root / "decomposition.csv", [&](std::ostream& os) { ewsim::write_decomposition(os, run->decomposition); });
    write_to(root / "turnover.csv", [&](std::ostream& os) { ewsim::write_turnover(os, run->result); });
    write_to(root / "trades.csv", [&](std::ostream& os) { ewsim::write_trades(os, run->result.trades); });
  });
}

void ewsim_run_free(ewsim_run* run) { delete run; }

ewsim_status ewsim_attribute_csv(const char* trades_path, double tc_bps, const char* out_path) {
  return guarded([&] {
    require(trades_path && out_path, "null argument");
    std::ifstream in(trades_path);
    if (!in) throw ewsim::Error(ewsim::ErrorCode::io, std::string("cannot open trade log '") + trades_path + "'");
    const auto trades = ewsim::read_trades(in);
    const auto profit = ewsim::attribute(trades, tc_bps);
    write_to(out_path, [&](std::ostream& os) { ewsim::write_profit(os, profit); });
  });
}

ewsim_status ewsim_grid_run(const char* config_path, const char* out_dir, const uint64_t* seed, ewsim_grid** out) {
  return guarded([&] {
    require(config_path && out, "null argument");
    *out = nullptr;
    auto config = ewsim::load_config(config_path);
    if (out_dir) config.output_dir = out_dir;
    if (seed) config.synthetic.seed = *seed;
    auto grid = std::make_unique<ewsim_grid>();
    grid->report = ewsim::run_grid(config);
    for (const auto& cell : grid->report.cells) {
      grid->summaries.push_back(ewsim::emit_summary(cell.rows, ewsim::SummaryFormat::plain));
    }
    *out = grid.release();
  });
}

const char* ewsim_grid_output_dir(const ewsim_grid* grid) { return grid ? grid->report.output_dir.c_str() : nullptr; }

size_t ewsim_grid_num_cells(const ewsim_grid* grid) { return grid ? grid->report.cells.size() : 0; }

const char* ewsim_grid_cell_name(const ewsim_grid* grid, size_t index) {
  if (!grid || index >= grid->report.cells.size()) return nullptr;
  return grid->report.cells[index].name.c_str();
}

const char* ewsim_grid_cell_summary(const ewsim_grid* grid, size_t index) {
  if (!grid || index >= grid->summaries.size()) return nullptr;
  return grid->summaries[index].c_str();
}

void ewsim_grid_free(ewsim_grid* grid) { delete grid; }

}  // extern "C"
