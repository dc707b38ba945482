#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>

#include "ewsim/error.hpp"
#include "ewsim/report.hpp"
#include "text.hpp"

namespace ewsim {

namespace {

namespace pt = boost::property_tree;

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw Error(ErrorCode::config, "config field '" + key + "': " + why);
}

double to_double(const std::string& key, std::string_view v) {
  double out = 0.0;
  if (!text::parse_double(text::trim(v), out)) bad(key, "expected a number, got '" + std::string(v) + "'");
  return out;
}

long long to_int(const std::string& key, std::string_view v) {
  v = text::trim(v);
  long long out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) bad(key, "expected an integer, got '" + std::string(v) + "'");
  return out;
}

bool to_bool(const std::string& key, std::string_view v) {
  v = text::trim(v);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad(key, "expected true/false");
}

Date to_date(const std::string& key, std::string_view v) {
  try {
    return parse_date(text::trim(v));
  } catch (const Error& e) {
    bad(key, e.what());
  }
}

std::vector<std::string_view> list(std::string_view v) {
  std::vector<std::string_view> out;
  for (auto item : text::split(v)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::size_t parse_top_n(const std::string& key, std::string_view v) {
  if (v == "all") return kAllMembers;
  const long long n = to_int(key, v);
  if (n < 1) bad(key, "top_n must be >= 1");
  return static_cast<std::size_t>(n);
}

std::string tc_label(double tc) {
  std::string s = text::format_double(tc);
  for (char& c : s) {
    if (c == '.') c = 'p';
  }
  return s;
}

using Handler = std::function<void(const std::string& key, const std::string& value)>;

}  // namespace

std::string cell_name(const SizeSpec& size, double tc_bps, const RebalanceSchedule& schedule) {
  std::string name = size.label + "_tc" + tc_label(tc_bps) + "_" + to_string(schedule.frequency);
  const unsigned default_offset = schedule.frequency == Frequency::monthly ? 0u : 2u;
  if (schedule.month_offset != default_offset) name += "_off" + std::to_string(schedule.month_offset);
  return name;
}

void RunConfig::validate() const {
  if (source == DataSource::csv && data_path.empty()) bad("data.path", "required when data.source = csv");
  if (sizes.empty()) bad("grid.top_n", "at least one portfolio size is required");
  if (tc_bps.empty()) bad("grid.tc_bps", "at least one value is required");
  if (schedules.empty()) bad("grid.schedules", "at least one schedule is required");
  std::set<std::string> labels;
  for (const auto& s : sizes) {
    if (!labels.insert(s.label).second) bad("grid.top_n", "duplicate size label '" + s.label + "'");
  }
  for (double tc : tc_bps) {
    if (!(tc >= 0.0) || !(tc < 5000.0)) bad("grid.tc_bps", "values must lie in [0, 5000)");
  }
  for (const auto& s : schedules) {
    try {
      s.validate();
    } catch (const Error& e) {
      bad("grid.schedules", e.what());
    }
  }
  if (periods_per_year <= 0) bad("data.periods_per_year", "must be positive");
  if (start && end && *end < *start) bad("data.end", "precedes data.start");
  if (factor && !(*factor >= 0.0 && *factor <= 1.0)) bad("calibration.factor", "must lie in [0, 1]");
  if (output_dir.empty()) bad("output.dir", "must not be empty");
  for (const auto& s : sizes) (void)factor_for(s);
}

double RunConfig::factor_for(const SizeSpec& size) const {
  if (factor) return *factor;
  if (universe.empty()) return 0.0;
  auto f = calibration.find(universe, size.label);
  if (!f) bad("calibration.universe", "no factor for (" + universe + ", " + size.label + ")");
  return *f;
}

RunConfig parse_config(std::istream& in, const std::string& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::config, std::string("config syntax: ") + e.what());
  }

  RunConfig cfg;
  bool data_ppy_set = false;
  std::optional<unsigned> quarterly_offset, semiannual_offset;
  std::string schedule_key_value;

  const std::map<std::string, std::map<std::string, Handler>> sections = {
      {"data",
       {
           {"source",
            [&](const std::string& k, const std::string& v) {
              if (v == "csv") cfg.source = DataSource::csv;
              else if (v == "synthetic") cfg.source = DataSource::synthetic;
              else bad(k, "expected csv or synthetic");
            }},
           {"path", [&](const std::string&, const std::string& v) { cfg.data_path = v; }},
           {"start", [&](const std::string& k, const std::string& v) { cfg.start = to_date(k, v); }},
           {"end", [&](const std::string& k, const std::string& v) { cfg.end = to_date(k, v); }},
           {"periods_per_year",
            [&](const std::string& k, const std::string& v) {
              cfg.periods_per_year = static_cast<int>(to_int(k, v));
              data_ppy_set = true;
            }},
       }},
      {"synthetic",
       {
           {"n_assets",
            [&](const std::string& k, const std::string& v) {
              auto n = to_int(k, v);
              if (n < 2) bad(k, "must be >= 2");
              cfg.synthetic.n_assets = static_cast<std::size_t>(n);
            }},
           {"horizon_years", [&](const std::string& k, const std::string& v) { cfg.synthetic.horizon_years = static_cast<int>(to_int(k, v)); }},
           {"periods_per_year",
            [&](const std::string& k, const std::string& v) {
              cfg.synthetic.periods_per_year = static_cast<int>(to_int(k, v));
            }},
           {"vol",
            [&](const std::string& k, const std::string& v) {
              cfg.synthetic.vol.clear();
              for (auto x : list(v)) cfg.synthetic.vol.push_back(to_double(k, x));
            }},
           {"drift",
            [&](const std::string& k, const std::string& v) {
              cfg.synthetic.drift.clear();
              for (auto x : list(v)) cfg.synthetic.drift.push_back(to_double(k, x));
            }},
           {"correlation", [&](const std::string& k, const std::string& v) { cfg.synthetic.correlation = to_double(k, v); }},
           {"seed",
            [&](const std::string& k, const std::string& v) {
              auto s = to_int(k, v);
              if (s < 0) bad(k, "must be >= 0");
              cfg.synthetic.seed = static_cast<std::uint64_t>(s);
            }},
           {"start_year", [&](const std::string& k, const std::string& v) { cfg.synthetic.start_year = static_cast<int>(to_int(k, v)); }},
       }},
      {"grid",
       {
           {"top_n",
            [&](const std::string& k, const std::string& v) {
              cfg.sizes.clear();
              for (auto item : list(v)) {
                SizeSpec s;
                auto colon = item.find(':');
                if (colon == std::string_view::npos) {
                  s.top_n = parse_top_n(k, item);
                  s.label = item == "all" ? "all" : "n" + std::string(item);
                } else {
                  s.label = std::string(text::trim(item.substr(0, colon)));
                  s.top_n = parse_top_n(k, text::trim(item.substr(colon + 1)));
                  if (s.label.empty()) bad(k, "empty size label");
                }
                cfg.sizes.push_back(s);
              }
            }},
           {"tc_bps",
            [&](const std::string& k, const std::string& v) {
              cfg.tc_bps.clear();
              for (auto x : list(v)) cfg.tc_bps.push_back(to_double(k, x));
            }},
           {"schedules", [&](const std::string&, const std::string& v) { schedule_key_value = v; }},
           {"quarterly_offset", [&](const std::string& k, const std::string& v) { quarterly_offset = static_cast<unsigned>(to_int(k, v)); }},
           {"semiannual_offset", [&](const std::string& k, const std::string& v) { semiannual_offset = static_cast<unsigned>(to_int(k, v)); }},
           {"baseline",
            [&](const std::string& k, const std::string& v) {
              if (v == "auto") cfg.baseline = BaselineRule::automatic;
              else if (v == "schedule") cfg.baseline = BaselineRule::schedule;
              else if (v == "tc") cfg.baseline = BaselineRule::tc;
              else if (v == "none") cfg.baseline = BaselineRule::none;
              else bad(k, "expected auto, schedule, tc or none");
            }},
       }},
      {"output",
       {
           {"dir", [&](const std::string&, const std::string& v) { cfg.output_dir = v; }},
           {"summary_format",
            [&](const std::string& k, const std::string& v) {
              if (v == "plain") cfg.summary_format = SummaryFormat::plain;
              else if (v == "machine") cfg.summary_format = SummaryFormat::machine;
              else bad(k, "expected plain or machine");
            }},
           {"write_trades", [&](const std::string& k, const std::string& v) { cfg.write_trades = to_bool(k, v); }},
           {"rebase_from", [&](const std::string& k, const std::string& v) { cfg.rebase_from = to_date(k, v); }},
           {"threads",
            [&](const std::string& k, const std::string& v) {
              auto n = to_int(k, v);
              if (n < 0) bad(k, "must be >= 0");
              cfg.threads = static_cast<unsigned>(n);
            }},
       }},
  };

  for (const auto& [section_name, section] : tree) {
    if (section.data().size() > 0 && section.empty()) {
      throw Error(ErrorCode::config, "config key '" + section_name + "' must live inside a section");
    }
    if (section_name == "calibration") {
      for (const auto& [key, node] : section) {
        const std::string full = "calibration." + key;
        const std::string value(text::trim(node.data()));
        if (key == "universe") {
          cfg.universe = value;
        } else if (key == "factor") {
          cfg.factor = to_double(full, value);
        } else {
          auto dot = key.find('.');
          if (dot == std::string::npos || dot == 0 || dot + 1 == key.size()) {
            bad(full, "unknown key; expected universe, factor or <universe>.<size label>");
          }
          try {
            cfg.calibration.set(key.substr(0, dot), key.substr(dot + 1), to_double(full, value));
          } catch (const Error& e) {
            bad(full, e.what());
          }
        }
      }
      continue;
    }
    auto sec = sections.find(section_name);
    if (sec == sections.end()) throw Error(ErrorCode::config, "unknown config section [" + section_name + "]");
    for (const auto& [key, node] : section) {
      const std::string full = section_name + "." + key;
      auto h = sec->second.find(key);
      if (h == sec->second.end()) bad(full, "unknown key");
      h->second(full, std::string(text::trim(node.data())));
    }
  }

  if (!schedule_key_value.empty()) {
    cfg.schedules.clear();
    for (auto name : list(schedule_key_value)) {
      Frequency f;
      try {
        f = parse_frequency(name);
      } catch (const Error& e) {
        bad("grid.schedules", e.what());
      }
      switch (f) {
        case Frequency::monthly: cfg.schedules.push_back(RebalanceSchedule::monthly()); break;
        case Frequency::quarterly: cfg.schedules.push_back(RebalanceSchedule::quarterly(quarterly_offset.value_or(2))); break;
        case Frequency::semiannual: cfg.schedules.push_back(RebalanceSchedule::semiannual(semiannual_offset.value_or(2))); break;
      }
    }
  }
  if (cfg.sizes.empty()) cfg.sizes.push_back({"all", kAllMembers});
  // A synthetic market fixes its own sampling rate unless told otherwise.
  if (cfg.source == DataSource::synthetic && !data_ppy_set) cfg.periods_per_year = cfg.synthetic.periods_per_year;

  if (cfg.source == DataSource::csv && !cfg.data_path.empty()) {
    std::filesystem::path p(cfg.data_path);
    if (p.is_relative()) cfg.data_path = (std::filesystem::path(base_dir) / p).lexically_normal().string();
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open config file '" + path + "'");
  auto dir = std::filesystem::path(path).parent_path();
  return parse_config(in, dir.empty() ? "." : dir.string());
}

}  // namespace ewsim
