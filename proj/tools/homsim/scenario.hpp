#pragma once

// Scenario runner behind the homsim command: JSON config -> validated
// ScenarioConfig -> in-memory CSV outputs plus a manifest.

#include <openssl/evp.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hom/hom.hpp"
#include "hom/io.hpp"

namespace homsim {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

enum class Scenario { fig2_surface, fig3_dip, fig4_surface, beat_curve, montecarlo, custom_modes };

inline constexpr std::array<std::pair<std::string_view, Scenario>, 6> scenario_names{{
    {"fig2-surface", Scenario::fig2_surface},
    {"fig3-dip", Scenario::fig3_dip},
    {"fig4-surface", Scenario::fig4_surface},
    {"beat-curve", Scenario::beat_curve},
    {"montecarlo", Scenario::montecarlo},
    {"custom-modes", Scenario::custom_modes},
}};

inline std::string_view name_of(Scenario s) {
  for (const auto& [name, value] : scenario_names)
    if (value == s) return name;
  return "?";
}

/// Evenly spaced values, endpoints included; one point means {min}.
struct Range {
  double min = 0.0;
  double max = 0.0;
  std::size_t points = 0;

  std::vector<double> values() const {
    std::vector<double> out(points);
    for (std::size_t i = 0; i < points; ++i)
      out[i] = points == 1 ? min
                           : min + (max - min) * static_cast<double>(i) /
                                       static_cast<double>(points - 1);
    return out;
  }
};

struct ModeSpec {
  std::string type;  // "gaussian" or "csv"
  double center = 0.0;
  double carrier = 0.0;
  fs::path path;
};

struct MonteCarloSpec {
  std::size_t n_pairs = 1000000;
  double bin_width = 0.05;
  double range = 3.0;
  bool write_events = false;
};

struct ScenarioConfig {
  Scenario scenario = Scenario::fig2_surface;
  hom::PhotonPairConfig parameters;
  Range time{-8.0, 8.0, 641};
  Range tau{-4.0, 4.0, 161};
  Range delta_tau{-3.0, 3.0, 121};
  Range delta_omega{0.0, 4.0, 17};
  std::vector<double> delta_omega_values{1.0, 2.0, 4.0};
  std::vector<double> filter_windows;
  bool numeric = true;
  fs::path output = "out";
  std::optional<std::uint64_t> seed;
  MonteCarloSpec montecarlo;
  ModeSpec mode1;
  ModeSpec mode2;
};

/// Raised for input that is not JSON at all.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parsed config and every violated invariant found while reading it.
struct Loaded {
  ScenarioConfig config;
  json raw;
  std::string raw_text;
  std::vector<std::string> issues;
};

namespace detail {

class Reader {
 public:
  std::vector<std::string> issues;

  void issue(const std::string& path, const std::string& message) {
    issues.push_back(path + ": " + message);
  }

  // Flags keys of `obj` that are not in `known`.
  void known_keys(const json& obj, const std::string& path, std::initializer_list<const char*> known) {
    for (const auto& [key, value] : obj.items()) {
      if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; }))
        issue(join(path, key), "unknown key");
    }
  }

  bool object(const json& obj, const char* key, const std::string& path) {
    if (!obj.contains(key)) return false;
    if (!obj.at(key).is_object()) {
      issue(join(path, key), "must be an object");
      return false;
    }
    return true;
  }

  void number(const json& obj, const char* key, const std::string& path, double& out) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (!v.is_number()) {
      issue(join(path, key), "must be a number");
      return;
    }
    out = v.get<double>();
    if (!std::isfinite(out)) issue(join(path, key), "must be finite");
  }

  template <typename Int>
  void integer(const json& obj, const char* key, const std::string& path, Int& out) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (!v.is_number_unsigned()) {
      issue(join(path, key), "must be a nonnegative integer");
      return;
    }
    out = static_cast<Int>(v.get<std::uint64_t>());
  }

  void boolean(const json& obj, const char* key, const std::string& path, bool& out) {
    if (!obj.contains(key)) return;
    if (!obj.at(key).is_boolean()) {
      issue(join(path, key), "must be true or false");
      return;
    }
    out = obj.at(key).get<bool>();
  }

  void numbers(const json& obj, const char* key, const std::string& path, std::vector<double>& out) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (!v.is_array()) {
      issue(join(path, key), "must be an array of numbers");
      return;
    }
    out.clear();
    for (const auto& x : v) {
      if (!x.is_number()) {
        issue(join(path, key), "must be an array of numbers");
        return;
      }
      out.push_back(x.get<double>());
    }
  }

  void range(const json& obj, const char* key, const std::string& path, Range& out) {
    if (!object(obj, key, path)) return;
    const auto& r = obj.at(key);
    const auto p = join(path, key);
    known_keys(r, p, {"min", "max", "points"});
    number(r, "min", p, out.min);
    number(r, "max", p, out.max);
    integer(r, "points", p, out.points);
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
};

inline void check_range(detail::Reader& r, const Range& range, const std::string& path,
                        std::size_t min_points = 1) {
  if (range.points == 0 || (range.points == 1 && range.min != range.max) ||
      (range.points > 1 && !(range.min < range.max)))
    r.issue(path, "empty range (need points >= 1 and min < max, or points = 1 and min = max)");
  else if (range.points < min_points)
    r.issue(path, "needs at least " + std::to_string(min_points) + " points");
}

inline void read_mode(detail::Reader& r, const json& obj, const char* key, const std::string& path,
                      const fs::path& base, ModeSpec& out) {
  const auto p = detail::Reader::join(path, key);
  if (!obj.contains(key)) {
    r.issue(p, "missing");
    return;
  }
  if (!r.object(obj, key, path)) return;
  const auto& m = obj.at(key);
  r.known_keys(m, p, {"type", "center", "carrier", "path"});
  if (!m.contains("type") || !m.at("type").is_string()) {
    r.issue(p + ".type", "must be \"gaussian\" or \"csv\"");
    return;
  }
  const auto type = m.at("type").get<std::string>();
  if (type != "gaussian" && type != "csv") {
    r.issue(p + ".type", "must be \"gaussian\" or \"csv\"");
    return;
  }
  out.type = type;
  if (out.type == "gaussian") {
    r.number(m, "center", p, out.center);
    r.number(m, "carrier", p, out.carrier);
  } else if (out.type == "csv") {
    if (!m.contains("path") || !m.at("path").is_string()) {
      r.issue(p + ".path", "must name a t,re,im CSV file");
      out.type.clear();
      return;
    }
    out.path = base / m.at("path").get<std::string>();
  }
}

inline bool writable_target(const fs::path& dir) {
  std::error_code ec;
  fs::path probe = fs::absolute(dir, ec);
  if (ec) return false;
  while (!probe.empty() && !fs::exists(probe, ec)) {
    if (probe == probe.parent_path()) return false;
    probe = probe.parent_path();
  }
  return fs::is_directory(probe, ec) && ::access(probe.c_str(), W_OK) == 0;
}

}  // namespace detail

/// Loads a mode described by `spec`; sampled files are read and renormalised.
inline hom::ModeFunction load_mode(const ModeSpec& spec) {
  if (spec.type == "gaussian") return hom::make_gaussian_mode(spec.center, spec.carrier);
  std::ifstream in(spec.path);
  hom::require(static_cast<bool>(in), hom::ErrorKind::invalid_argument,
               "cannot open mode file " + spec.path.string());
  return hom::read_mode_csv(in);
}

/// Parses `text`; throws ParseError if it is not JSON. Paths inside the config
/// (mode CSV files) are resolved against `base`.
inline Loaded parse_config(const std::string& text, const fs::path& base = ".") {
  Loaded out;
  out.raw_text = text;
  try {
    out.raw = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
  if (!out.raw.is_object()) throw ParseError("config must be a JSON object");
  detail::Reader r;
  auto& c = out.config;
  const auto& j = out.raw;
  r.known_keys(j, "", {"scenario", "parameters", "grids", "numeric", "output", "seed",
                       "montecarlo", "modes", "filter_windows"});

  if (!j.contains("scenario") || !j.at("scenario").is_string()) {
    r.issue("scenario", "missing; one of fig2-surface, fig3-dip, fig4-surface, beat-curve, "
                        "montecarlo, custom-modes");
  } else {
    const auto name = j.at("scenario").get<std::string>();
    const auto it = std::find_if(scenario_names.begin(), scenario_names.end(),
                                 [&](const auto& p) { return p.first == name; });
    if (it == scenario_names.end())
      r.issue("scenario", "unknown scenario '" + name + "'");
    else
      c.scenario = it->second;
  }

  if (r.object(j, "parameters", "")) {
    const auto& p = j.at("parameters");
    r.known_keys(p, "parameters", {"delta_tau", "delta", "omega_mean", "delta_omega"});
    r.number(p, "delta_tau", "parameters", c.parameters.delta_tau);
    r.number(p, "delta", "parameters", c.parameters.delta);
    r.number(p, "omega_mean", "parameters", c.parameters.omega_mean);
    r.number(p, "delta_omega", "parameters", c.parameters.delta_omega);
    if (c.parameters.delta_omega < 0.0) r.issue("parameters.delta_omega", "must be >= 0");
  }

  if (r.object(j, "grids", "")) {
    const auto& g = j.at("grids");
    r.known_keys(g, "grids", {"time", "tau", "delta_tau", "delta_omega", "delta_omega_values"});
    r.range(g, "time", "grids", c.time);
    r.range(g, "tau", "grids", c.tau);
    r.range(g, "delta_tau", "grids", c.delta_tau);
    r.range(g, "delta_omega", "grids", c.delta_omega);
    r.numbers(g, "delta_omega_values", "grids", c.delta_omega_values);
  }
  detail::check_range(r, c.time, "grids.time", 3);

  r.boolean(j, "numeric", "", c.numeric);
  r.numbers(j, "filter_windows", "", c.filter_windows);
  for (double w : c.filter_windows)
    if (!(w > 0.0)) r.issue("filter_windows", "every window must be > 0");

  if (j.contains("output")) {
    if (!j.at("output").is_string() || j.at("output").get<std::string>().empty())
      r.issue("output", "must be a nonempty directory path");
    else
      c.output = j.at("output").get<std::string>();
  }

  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned())
      r.issue("seed", "must be a nonnegative 64-bit integer");
    else
      c.seed = j.at("seed").get<std::uint64_t>();
  }

  switch (c.scenario) {
    case Scenario::fig2_surface:
      detail::check_range(r, c.tau, "grids.tau");
      detail::check_range(r, c.delta_tau, "grids.delta_tau");
      break;
    case Scenario::fig3_dip:
      detail::check_range(r, c.tau, "grids.tau");
      if (c.delta_omega_values.empty()) r.issue("grids.delta_omega_values", "empty list");
      for (double v : c.delta_omega_values)
        if (!(v >= 0.0) || !std::isfinite(v))
          r.issue("grids.delta_omega_values", "every value must be finite and >= 0");
      break;
    case Scenario::fig4_surface:
      detail::check_range(r, c.delta_tau, "grids.delta_tau");
      detail::check_range(r, c.delta_omega, "grids.delta_omega");
      if (c.delta_omega.min < 0.0) r.issue("grids.delta_omega", "values must be >= 0");
      break;
    case Scenario::beat_curve:
      detail::check_range(r, c.tau, "grids.tau");
      break;
    case Scenario::montecarlo:
      if (!c.seed) r.issue("seed", "required for montecarlo");
      if (r.object(j, "montecarlo", "")) {
        const auto& m = j.at("montecarlo");
        r.known_keys(m, "montecarlo", {"n_pairs", "bin_width", "range", "write_events"});
        r.integer(m, "n_pairs", "montecarlo", c.montecarlo.n_pairs);
        r.number(m, "bin_width", "montecarlo", c.montecarlo.bin_width);
        r.number(m, "range", "montecarlo", c.montecarlo.range);
        r.boolean(m, "write_events", "montecarlo", c.montecarlo.write_events);
      }
      if (c.montecarlo.n_pairs < 1) r.issue("montecarlo.n_pairs", "must be >= 1");
      if (!(c.montecarlo.bin_width > 0.0)) r.issue("montecarlo.bin_width", "must be > 0");
      if (!(c.montecarlo.range >= 0.5 * c.montecarlo.bin_width))
        r.issue("montecarlo.range", "empty range (must be >= bin_width / 2)");
      break;
    case Scenario::custom_modes:
      detail::check_range(r, c.tau, "grids.tau");
      if (!j.contains("modes")) {
        r.issue("modes", "missing; needs mode1 and mode2");
      } else if (r.object(j, "modes", "")) {
        const auto& m = j.at("modes");
        r.known_keys(m, "modes", {"mode1", "mode2"});
        detail::read_mode(r, m, "mode1", "modes", base, c.mode1);
        detail::read_mode(r, m, "mode2", "modes", base, c.mode2);
        std::optional<hom::ModeFunction> loaded[2];
        const ModeSpec* specs[2] = {&c.mode1, &c.mode2};
        for (int k = 0; k < 2; ++k) {
          if (specs[k]->type.empty()) continue;
          try {
            loaded[k] = load_mode(*specs[k]);
          } catch (const hom::Error& e) {
            r.issue(k == 0 ? "modes.mode1" : "modes.mode2", e.what());
          }
        }
        if (loaded[0] && loaded[1] && loaded[0]->grid() && loaded[1]->grid() &&
            !(*loaded[0]->grid() == *loaded[1]->grid()))
          r.issue("modes", "sampled modes must share one time grid");
      }
      break;
  }
  out.issues = std::move(r.issues);
  return out;
}

/// Issue text when `dir` cannot be created or written, else empty.
inline std::string check_output(const fs::path& dir) {
  return detail::writable_target(dir) ? std::string() : "output: directory is not writable";
}

inline Loaded load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

struct OutputFile {
  std::string name;
  std::string content;
};

struct RunResult {
  std::vector<OutputFile> files;
  json summary = json::object();
};

namespace detail {

inline std::string label(const std::string& name, const std::string& unit) {
  return name + " [" + unit + "]";
}

inline std::string header(std::initializer_list<std::string> labels) {
  std::string out;
  for (const auto& l : labels) out += (out.empty() ? "" : ",") + l;
  return out + "\n";
}

// Carrier difference `centre + d` for detuning offset d.
inline hom::PairFamily shifted_family(const hom::PhotonPairConfig& p, double delta_tau) {
  return [=](double d) {
    return hom::gaussian_pair({delta_tau, p.delta + d, p.omega_mean, 0.0});
  };
}

inline hom::DelayedPairFamily shifted_delayed_family(const hom::PhotonPairConfig& p) {
  return [=](double delta_tau, double d) {
    return hom::gaussian_pair({delta_tau, p.delta + d, p.omega_mean, 0.0});
  };
}

inline hom::EnsembleOptions options(const ScenarioConfig& c) {
  hom::EnsembleOptions o;
  o.t0_grid = hom::TimeGrid(c.time.min, c.time.max, c.time.points);
  return o;
}

// First x > 0 where depth(x) = 1 - y/ref drops to depth(0)/e, by linear
// interpolation between grid points; nullopt if the curve never gets there.
inline std::optional<double> dip_half_width(std::span<const double> x, std::span<const double> y,
                                            std::span<const double> ref) {
  std::size_t zero = x.size();
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] == 0.0) zero = i;
  if (zero == x.size() || ref[zero] <= 0.0) return std::nullopt;
  auto depth = [&](std::size_t i) { return 1.0 - y[i] / ref[i]; };
  const double target = depth(zero) / std::exp(1.0);
  for (std::size_t i = zero + 1; i < x.size(); ++i) {
    if (ref[i] <= 0.0) break;
    if (depth(i) <= target) {
      const double d0 = depth(i - 1);
      const double d1 = depth(i);
      return x[i - 1] + (x[i] - x[i - 1]) * (d0 - target) / (d0 - d1);
    }
  }
  return std::nullopt;
}

inline json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

inline std::vector<double> local_minima(std::span<const double> x, std::span<const double> y) {
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < y.size(); ++i)
    if (y[i] <= y[i - 1] && y[i] < y[i + 1]) out.push_back(x[i]);
  return out;
}

inline RunResult run_fig2(const ScenarioConfig& c) {
  const auto taus = c.tau.values();
  const auto dtaus = c.delta_tau.values();
  const auto opts = options(c);
  std::vector<std::vector<double>> numeric(dtaus.size());
  if (c.numeric) {
    auto row = [&](std::size_t i) {
      numeric[i] = hom::averaged_coincidence_curve(shifted_family(c.parameters, dtaus[i]),
                                                   c.parameters.delta_omega, taus, opts)
                       .y;
    };
    if (c.parameters.delta_omega == 0.0)
      hom::parallel_for(dtaus.size(), row);
    else
      for (std::size_t i = 0; i < dtaus.size(); ++i) row(i);
  }
  std::ostringstream csv;
  csv << (c.numeric ? header({label("delta_tau", "pulse durations"), label("tau", "pulse durations"),
                              label("p_2hnu", "1/pulse duration"),
                              label("p_2hnu numeric", "1/pulse duration")})
                    : header({label("delta_tau", "pulse durations"), label("tau", "pulse durations"),
                              label("p_2hnu", "1/pulse duration")}));
  double peak = -1.0, peak_dtau = 0.0, peak_tau = 0.0, at_zero = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < dtaus.size(); ++i) {
    auto p = c.parameters;
    p.delta_tau = dtaus[i];
    for (std::size_t k = 0; k < taus.size(); ++k) {
      const double closed = hom::p_2hnu_averaged(taus[k], p);
      if (closed > peak) {
        peak = closed;
        peak_dtau = dtaus[i];
        peak_tau = taus[k];
      }
      if (taus[k] == 0.0) at_zero = std::max(at_zero, std::abs(closed));
      if (c.numeric) {
        const double num = numeric[i][k];
        if (taus[k] == 0.0) at_zero = std::max(at_zero, std::abs(num));
        worst = std::max(worst, std::abs(num - closed));
        hom::write_row(csv, {dtaus[i], taus[k], closed, num});
      } else {
        hom::write_row(csv, {dtaus[i], taus[k], closed});
      }
    }
  }
  RunResult out;
  out.files.push_back({"fig2-surface.csv", csv.str()});
  out.summary["peak"] = {{"value", peak}, {"delta_tau", peak_dtau}, {"tau", peak_tau}};
  out.summary["max_abs_at_tau_zero"] = at_zero;
  if (c.numeric) out.summary["max_abs_closed_minus_numeric"] = worst;
  return out;
}

inline RunResult run_fig3(const ScenarioConfig& c) {
  const auto taus = c.tau.values();
  const auto opts = options(c);
  const double dtau = c.parameters.delta_tau;
  std::vector<double> reference(taus.size());
  for (std::size_t k = 0; k < taus.size(); ++k) reference[k] = hom::p_2hnu_dephased(taus[k], dtau);

  std::vector<std::vector<double>> closed, numeric;
  std::vector<std::string> labels{label("tau", "pulse durations")};
  json widths = json::array();
  for (double dw : c.delta_omega_values) {
    auto p = c.parameters;
    p.delta_omega = dw;
    std::vector<double> y(taus.size());
    for (std::size_t k = 0; k < taus.size(); ++k) y[k] = hom::p_2hnu_averaged(taus[k], p);
    const std::string tag = " dw=" + hom::format_double(dw);
    labels.push_back(label("p_inh" + tag, "1/pulse duration"));
    json entry{{"delta_omega", dw},
               {"expected", dw > 0.0 ? json(2.0 / dw) : json(nullptr)},
               {"closed_form", optional_number(dip_half_width(taus, y, reference))}};
    closed.push_back(std::move(y));
    if (c.numeric) {
      numeric.push_back(
          hom::averaged_coincidence_curve(shifted_family(c.parameters, dtau), dw, taus, opts).y);
      labels.push_back(label("numeric" + tag, "1/pulse duration"));
      entry["numeric"] = optional_number(dip_half_width(taus, numeric.back(), reference));
    }
    widths.push_back(entry);
  }
  labels.push_back(label("dephased reference", "1/pulse duration"));

  std::ostringstream csv;
  for (std::size_t i = 0; i < labels.size(); ++i) csv << (i ? "," : "") << labels[i];
  csv << '\n';
  std::vector<double> row;
  for (std::size_t k = 0; k < taus.size(); ++k) {
    row.assign({taus[k]});
    for (std::size_t j = 0; j < closed.size(); ++j) {
      row.push_back(closed[j][k]);
      if (c.numeric) row.push_back(numeric[j][k]);
    }
    row.push_back(reference[k]);
    hom::write_row(csv, row);
  }
  RunResult out;
  out.files.push_back({"fig3-dip.csv", csv.str()});
  out.summary["dip_half_width"] = widths;
  if (!c.filter_windows.empty()) {
    json filtered = json::array();
    for (double dw : c.delta_omega_values)
      for (double window : c.filter_windows) {
        json entry{{"delta_omega", dw}, {"window", window}};
        if (c.parameters.delta == 0.0) {
          const auto f = hom::filtered_coincidence(dw, window, dtau);
          entry["depth"] = f.depth;
          entry["coincidence"] = f.coincidence;
          entry["reference"] = f.reference;
        }
        if (c.numeric) {
          const auto f =
              hom::filtered_coincidence(shifted_family(c.parameters, dtau), dw, window, opts);
          entry["numeric_depth"] = f.depth;
        }
        filtered.push_back(entry);
      }
    out.summary["filtered"] = filtered;
  }
  return out;
}

inline RunResult run_fig4(const ScenarioConfig& c) {
  const auto dtaus = c.delta_tau.values();
  const auto dws = c.delta_omega.values();
  const auto opts = options(c);
  std::ostringstream csv;
  csv << (c.numeric ? header({label("delta_omega", "1/pulse duration"),
                              label("delta_tau", "pulse durations"), label("p_total", "1"),
                              label("p_total numeric", "1")})
                    : header({label("delta_omega", "1/pulse duration"),
                              label("delta_tau", "pulse durations"), label("p_total", "1")}));
  double lowest = 1.0, lowest_dtau = 0.0, lowest_dw = 0.0, worst = 0.0;
  json per_width = json::array();
  for (double dw : dws) {
    std::vector<double> closed(dtaus.size());
    for (std::size_t k = 0; k < dtaus.size(); ++k) {
      auto p = c.parameters;
      p.delta_tau = dtaus[k];
      p.delta_omega = dw;
      closed[k] = hom::p_total_averaged(p);
    }
    std::vector<double> numeric;
    if (c.numeric)
      numeric = hom::total_coincidence_vs_delay(shifted_delayed_family(c.parameters), dw, dtaus, opts).y;
    for (std::size_t k = 0; k < dtaus.size(); ++k) {
      if (closed[k] < lowest) {
        lowest = closed[k];
        lowest_dtau = dtaus[k];
        lowest_dw = dw;
      }
      if (c.numeric) {
        worst = std::max(worst, std::abs(numeric[k] - closed[k]));
        hom::write_row(csv, {dw, dtaus[k], closed[k], numeric[k]});
      } else {
        hom::write_row(csv, {dw, dtaus[k], closed[k]});
      }
    }
    // Depth below the asymptote 1/2 and its 1/e half width in delta_tau.
    const std::vector<double> half(dtaus.size(), 0.5);
    auto p0 = c.parameters;
    p0.delta_tau = 0.0;
    p0.delta_omega = dw;
    per_width.push_back({{"delta_omega", dw},
                         {"depth", 0.5 - hom::p_total_averaged(p0)},
                         {"half_width", optional_number(dip_half_width(dtaus, closed, half))}});
  }
  RunResult out;
  out.files.push_back({"fig4-surface.csv", csv.str()});
  out.summary["minimum"] = {{"value", lowest}, {"delta_tau", lowest_dtau}, {"delta_omega", lowest_dw}};
  out.summary["dip"] = per_width;
  if (c.numeric) out.summary["max_abs_closed_minus_numeric"] = worst;
  return out;
}

inline RunResult run_beat(const ScenarioConfig& c) {
  const auto taus = c.tau.values();
  std::vector<double> closed(taus.size()), reference(taus.size());
  for (std::size_t k = 0; k < taus.size(); ++k) {
    closed[k] = hom::p_2hnu_averaged(taus[k], c.parameters);
    reference[k] = hom::p_2hnu_dephased(taus[k], c.parameters.delta_tau);
  }
  std::vector<double> numeric;
  if (c.numeric)
    numeric = hom::averaged_coincidence_curve(shifted_family(c.parameters, c.parameters.delta_tau),
                                              c.parameters.delta_omega, taus, options(c))
                  .y;
  std::ostringstream csv;
  if (c.numeric)
    csv << header({label("tau", "pulse durations"), label("p_2hnu", "1/pulse duration"),
                   label("p_2hnu numeric", "1/pulse duration"),
                   label("dephased reference", "1/pulse duration")});
  else
    csv << header({label("tau", "pulse durations"), label("p_2hnu", "1/pulse duration"),
                   label("dephased reference", "1/pulse duration")});
  for (std::size_t k = 0; k < taus.size(); ++k) {
    if (c.numeric)
      hom::write_row(csv, {taus[k], closed[k], numeric[k], reference[k]});
    else
      hom::write_row(csv, {taus[k], closed[k], reference[k]});
  }
  RunResult out;
  out.files.push_back({"beat-curve.csv", csv.str()});
  const auto minima = local_minima(taus, c.numeric ? numeric : closed);
  out.summary["minima"] = minima;
  if (minima.size() >= 2)
    out.summary["measured_period"] =
        (minima.back() - minima.front()) / static_cast<double>(minima.size() - 1);
  out.summary["expected_period"] = c.parameters.delta != 0.0
                                       ? json(2.0 * std::numbers::pi / std::abs(c.parameters.delta))
                                       : json(nullptr);
  return out;
}

inline RunResult run_montecarlo(const ScenarioConfig& c) {
  const auto log = hom::run_experiment(c.parameters, c.montecarlo.n_pairs, *c.seed,
                                       hom::gaussian_delayed_family(c.parameters.omega_mean));
  const auto h = hom::coincidence_histogram(log, c.montecarlo.bin_width, c.montecarlo.range);
  std::ostringstream csv;
  csv << header({label("tau", "pulse durations"), label("opposite", "counts"),
                 label("same3", "counts"), label("same4", "counts"),
                 label("opposite density", "1/pulse duration"), label("p_2hnu", "1/pulse duration")});
  for (std::size_t k = 0; k < h.bins(); ++k) {
    const double centre = h.center(k);
    hom::write_row(csv, {centre, static_cast<double>(h.opposite[k]), static_cast<double>(h.same3[k]),
                         static_cast<double>(h.same4[k]), h.opposite_density(k),
                         hom::p_2hnu_averaged(centre, c.parameters)});
  }
  RunResult out;
  out.files.push_back({"montecarlo.csv", csv.str()});
  if (c.montecarlo.write_events) {
    std::ostringstream events;
    hom::write_event_log_csv(events, log);
    out.files.push_back({"montecarlo-events.csv", events.str()});
    out.files.push_back({"montecarlo-events.json", hom::event_log_sidecar(log).dump(2) + "\n"});
  }
  out.summary["n_pairs"] = log.n_pairs();
  out.summary["seed"] = log.seed;
  out.summary["rng"] = log.rng;
  out.summary["out_of_range"] = h.out_of_range;
  if (log.n_pairs() >= 100) {
    const auto est = hom::estimate_total_coincidence(log);
    out.summary["opposite_fraction"] = {{"estimate", est.estimate},
                                        {"lower95", est.lower},
                                        {"upper95", est.upper},
                                        {"coincidences", est.coincidences}};
  }
  out.summary["expected_opposite_fraction"] = hom::p_total_averaged(c.parameters);
  return out;
}

inline RunResult run_custom(const ScenarioConfig& c) {
  const auto m1 = load_mode(c.mode1);
  const auto m2 = load_mode(c.mode2);
  const auto common = hom::common_grid(m1, m2);
  const hom::TimeGrid grid =
      common ? *common : hom::TimeGrid(c.time.min, c.time.max, c.time.points);
  const auto taus = c.tau.values();
  std::vector<double> coincidence(taus.size()), dephased(taus.size());
  hom::parallel_for(taus.size(), [&](std::size_t k) {
    coincidence[k] = hom::coincidence_at_delay(m1, m2, taus[k], grid);
    dephased[k] = hom::dephased_coincidence_at_delay(m1, m2, taus[k], grid);
  });
  std::ostringstream csv;
  csv << header({label("tau", "pulse durations"), label("coincidence", "1/pulse duration"),
                 label("dephased reference", "1/pulse duration")});
  for (std::size_t k = 0; k < taus.size(); ++k)
    hom::write_row(csv, {taus[k], coincidence[k], dephased[k]});
  const auto c12 = hom::overlap(m1, m2);
  const auto p = hom::port_pair_probabilities(m1, m2);
  RunResult out;
  out.files.push_back({"custom-modes.csv", csv.str()});
  out.summary["overlap"] = {{"re", c12.real()}, {"im", c12.imag()}, {"abs", std::abs(c12)}};
  out.summary["port_pairs"] = {{"same3", p.same3}, {"same4", p.same4}, {"opposite", p.opposite}};
  out.summary["opposite_by_quadrature"] = hom::opposite_port_probability(m1, m2, grid);
  return out;
}

}  // namespace detail

/// Runs a validated config. Numerical failures surface as hom::Error.
inline RunResult run_scenario(const ScenarioConfig& c) {
  switch (c.scenario) {
    case Scenario::fig2_surface: return detail::run_fig2(c);
    case Scenario::fig3_dip: return detail::run_fig3(c);
    case Scenario::fig4_surface: return detail::run_fig4(c);
    case Scenario::beat_curve: return detail::run_beat(c);
    case Scenario::montecarlo: return detail::run_montecarlo(c);
    case Scenario::custom_modes: return detail::run_custom(c);
  }
  return {};
}

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

/// Inputs, version, per-file checksums and scenario diagnostics. Contains no
/// timestamps or host details, so reruns reproduce it byte for byte.
inline json manifest(const Loaded& loaded, const RunResult& result) {
  json files = json::array();
  for (const auto& f : result.files)
    files.push_back({{"name", f.name}, {"bytes", f.content.size()}, {"sha256", sha256_hex(f.content)}});
  return {{"tool", "homsim"},
          {"version", hom::version},
          {"scenario", name_of(loaded.config.scenario)},
          {"config", loaded.raw},
          {"config_sha256", sha256_hex(loaded.raw_text)},
          {"files", files},
          {"summary", result.summary}};
}

/// Writes every output file and manifest.json into `dir`.
inline void write_outputs(const fs::path& dir, const Loaded& loaded, const RunResult& result) {
  fs::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  };
  for (const auto& f : result.files) write(f.name, f.content);
  write("manifest.json", manifest(loaded, result).dump(2) + "\n");
}

}  // namespace homsim
