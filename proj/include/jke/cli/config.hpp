#pragma once

// Run configuration for the `jke` command line tool.
//
// Schema (JSON, SI units; every section optional unless a command needs it):
//
// {
//   "system": {
//     "bandwidth_hz": 40e6,            // W
//     "signal_power": 1.0,             // P, normalized
//     "jamming_bits_per_symbol": 14,   // w
//     "dynamic_range_factor": 2.5,     // l
//     "bob_adc": {"aperture_jitter_s": 500e-15, "explicit_bits": null},
//     "eve_adc": {"aperture_jitter_s": 5e-15},
//     "bob_snr_db": 32,                // number, or "inf" for a noiseless channel
//     "eve_snr_db": 80
//   },
//   "timing":   {"key_bits": 256, "efficiency": 0.001},
//   "sweep":    {"which": "fig3a",
//                "snr_b_db": {"min": 0, "max": 60, "step": 1},   // or an explicit list
//                "snr_e_db": {"min": 0, "max": 100, "step": 2},
//                "w": {"min": 1, "max": 20, "step": 1},
//                "eve_jitter_s": {"min": 1e-15, "max": 50e-15, "step": 1e-15}},
//   "simulate": {"n_symbols": 100000, "seed": 1, "cancellation_depth_db": 120,   // or "inf"
//                "pam_bits": 1, "kem_bits": 64, "write_trace": true},           // kem_bits 0: pass-through
//   "race":     {"attacker": "quantum-rsa2048-8h", "cores": 1e6, "trend": "adc-2005-2024",
//                "presets_file": "../data/presets.json", "toy_kem_bits": 48,
//                "custom_attackers": [{"name": "fast", "t_qc_s": 1e-3}]},
//   "output":   {"format": "csv"}
// }

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "jke/adversary_race.hpp"
#include "jke/core_model.hpp"
#include "jke/secrecy_analysis.hpp"

namespace jke::cli {

using nlohmann::json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void reject_unknown_keys(const json& j, const std::string& where, std::set<std::string> allowed) {
  if (!j.is_object()) throw ValidationError(where + " must be an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ValidationError("unknown key '" + key + "' in " + where);
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("field '") + key + "' has the wrong type");
  }
}

/// Numbers, or the strings "inf"/"infinite" for the noiseless limit.
inline double number_or_inf(const json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string() && (v == "inf" || v == "infinite")) return std::numeric_limits<double>::infinity();
  throw ValidationError("field '" + key + "' must be a number or \"inf\"");
}

inline json inf_or_number(double v) {
  if (std::isinf(v) && v > 0) return "inf";
  return v;
}

}  // namespace detail

struct SystemConfig {
  SystemParams base;  // noise variances are derived from the SNR fields
  SnrPoint bob_snr = SnrPoint::finite(32.0);
  SnrPoint eve_snr = SnrPoint::finite(80.0);

  SystemParams to_params() const {
    SystemParams p = validate(base);
    p.bob_noise_var = snr_to_noise_var(bob_snr, p.signal_power);
    p.eve_noise_var = snr_to_noise_var(eve_snr, p.signal_power);
    return p;
  }
};

struct TimingConfig {
  int key_bits = 256;
  double efficiency = 0.001;
};

struct AxisConfig {
  std::optional<double> min, max, step;
  std::vector<double> values;

  Axis to_axis(const std::string& name) const {
    if (!values.empty()) return Axis::list(name, values);
    if (!min || !max || !step) throw ValidationError("axis " + name + " needs min/max/step or a value list");
    Axis a = Axis::range(name, *min, *max, *step);
    a.check();
    return a;
  }
  static AxisConfig range(double min, double max, double step) { return {min, max, step, {}}; }
};

struct SweepConfig {
  std::string which = "fig3a";
  AxisConfig snr_b_db = AxisConfig::range(0.0, 60.0, 1.0);
  AxisConfig snr_e_db = AxisConfig::range(0.0, 100.0, 2.0);
  AxisConfig w = AxisConfig::range(1.0, 20.0, 1.0);
  AxisConfig eve_jitter_s = AxisConfig::range(1e-15, 50e-15, 1e-15);
};

struct SimulateConfig {
  std::uint64_t n_symbols = 100000;
  std::uint64_t seed = 1;
  double cancellation_depth_db = std::numeric_limits<double>::infinity();
  int pam_bits = 1;
  int kem_bits = 64;
  bool write_trace = true;
};

struct RaceConfig {
  std::string attacker = "quantum-rsa2048-8h";
  std::optional<double> cores;
  std::string trend = "adc-2005-2024";
  std::optional<std::string> presets_file;
  int toy_kem_bits = 48;
  std::vector<AttackerTimeModel> custom_attackers;
};

struct RunConfig {
  SystemConfig system;
  TimingConfig timing;
  SweepConfig sweep;
  SimulateConfig simulate;
  RaceConfig race;
  std::string format = "csv";
};

// ---------------------------------------------------------------------------
// Presets <-> JSON

inline json attacker_to_json(const AttackerTimeModel& a) {
  json j{{"name", a.name}, {"provenance", a.provenance}};
  j["t_qc_s"] = a.t_qc_s ? json(*a.t_qc_s) : json(nullptr);
  j["core_years"] = a.core_years ? json(*a.core_years) : json(nullptr);
  return j;
}

inline AttackerTimeModel attacker_from_json(const json& j) {
  detail::reject_unknown_keys(j, "attacker", {"name", "t_qc_s", "core_years", "provenance"});
  AttackerTimeModel a;
  a.name = detail::get_or<std::string>(j, "name", "");
  if (a.name.empty()) throw ValidationError("attacker needs a name");
  if (j.contains("t_qc_s") && !j["t_qc_s"].is_null()) a.t_qc_s = detail::get_or<double>(j, "t_qc_s", 0.0);
  if (j.contains("core_years") && !j["core_years"].is_null())
    a.core_years = detail::get_or<double>(j, "core_years", 0.0);
  a.provenance = detail::get_or<std::string>(j, "provenance", "user supplied");
  if (a.t_qc_s && !(*a.t_qc_s > 0.0)) throw ValidationError("attacker " + a.name + ": t_qc_s must be positive");
  if (a.core_years && !(*a.core_years > 0.0))
    throw ValidationError("attacker " + a.name + ": core_years must be positive");
  return a;
}

inline json trend_to_json(const JitterTrend& t) {
  return {{"name", t.name},
          {"reference_year", t.reference_year},
          {"reference_jitter_s", t.reference_jitter_s},
          {"doubling_period_years", t.doubling_period_years},
          {"provenance", t.provenance}};
}

inline JitterTrend trend_from_json(const json& j) {
  detail::reject_unknown_keys(j, "trend",
                              {"name", "reference_year", "reference_jitter_s", "doubling_period_years", "provenance"});
  JitterTrend t;
  t.name = detail::get_or<std::string>(j, "name", "");
  t.reference_year = detail::get_or<int>(j, "reference_year", 2024);
  t.reference_jitter_s = detail::get_or<double>(j, "reference_jitter_s", 0.0);
  t.doubling_period_years = detail::get_or<double>(j, "doubling_period_years", 0.0);
  t.provenance = detail::get_or<std::string>(j, "provenance", "user supplied");
  if (t.name.empty()) throw ValidationError("trend needs a name");
  t.check();
  return t;
}

inline json registry_to_json(const PresetRegistry& r) {
  json j{{"attackers", json::array()}, {"trends", json::array()}};
  for (const auto& a : r.attackers) j["attackers"].push_back(attacker_to_json(a));
  for (const auto& t : r.trends) j["trends"].push_back(trend_to_json(t));
  return j;
}

inline PresetRegistry registry_from_json(const json& j) {
  detail::reject_unknown_keys(j, "preset registry", {"attackers", "trends"});
  PresetRegistry r;
  for (const auto& a : j.value("attackers", json::array())) r.attackers.push_back(attacker_from_json(a));
  for (const auto& t : j.value("trends", json::array())) r.trends.push_back(trend_from_json(t));
  return r;
}

// ---------------------------------------------------------------------------
// RunConfig <-> JSON

inline json adc_to_json(const AdcSpec& a) {
  return {{"aperture_jitter_s", a.aperture_jitter_s},
          {"explicit_bits", a.explicit_bits ? json(*a.explicit_bits) : json(nullptr)}};
}

inline AdcSpec adc_from_json(const json& j, const std::string& where) {
  detail::reject_unknown_keys(j, where, {"aperture_jitter_s", "explicit_bits"});
  AdcSpec a;
  a.aperture_jitter_s = detail::get_or<double>(j, "aperture_jitter_s", 0.0);
  if (j.contains("explicit_bits") && !j["explicit_bits"].is_null())
    a.explicit_bits = detail::get_or<double>(j, "explicit_bits", 0.0);
  return a;
}

inline json snr_to_json(const SnrPoint& s) { return s.is_infinite() ? json("inf") : json(s.db()); }

inline SnrPoint snr_from_json(const json& v, const std::string& key) {
  const double db = detail::number_or_inf(v, key);
  return std::isinf(db) && db > 0 ? SnrPoint::infinite() : SnrPoint::finite(db);
}

inline json axis_to_json(const AxisConfig& a) {
  if (!a.values.empty()) return a.values;
  return {{"min", a.min.value_or(0.0)}, {"max", a.max.value_or(0.0)}, {"step", a.step.value_or(0.0)}};
}

inline AxisConfig axis_from_json(const json& j, const std::string& name) {
  AxisConfig a;
  if (j.is_array()) {
    for (const auto& v : j) {
      if (!v.is_number()) throw ValidationError("axis " + name + " values must be numbers");
      a.values.push_back(v.get<double>());
    }
    if (a.values.empty()) throw ValidationError("axis " + name + " is empty");
    return a;
  }
  detail::reject_unknown_keys(j, "axis " + name, {"min", "max", "step"});
  for (const char* k : {"min", "max", "step"})
    if (!j.contains(k) || !j[k].is_number()) throw ValidationError("axis " + name + " needs numeric " + k);
  a.min = j["min"].get<double>();
  a.max = j["max"].get<double>();
  a.step = j["step"].get<double>();
  return a;
}

inline json system_to_json(const SystemConfig& s) {
  const auto& b = s.base;
  return {{"bandwidth_hz", b.bandwidth_hz},
          {"signal_power", b.signal_power},
          {"jamming_bits_per_symbol", b.jamming_bits_per_symbol},
          {"dynamic_range_factor", b.dynamic_range_factor},
          {"bob_adc", adc_to_json(b.bob_adc)},
          {"eve_adc", adc_to_json(b.eve_adc)},
          {"bob_snr_db", snr_to_json(s.bob_snr)},
          {"eve_snr_db", snr_to_json(s.eve_snr)}};
}

inline SystemConfig system_from_json(const json& j) {
  detail::reject_unknown_keys(j, "system",
                              {"bandwidth_hz", "signal_power", "jamming_bits_per_symbol", "dynamic_range_factor",
                               "bob_adc", "eve_adc", "bob_snr_db", "eve_snr_db"});
  SystemConfig s;
  auto& b = s.base;
  b.bandwidth_hz = detail::get_or<double>(j, "bandwidth_hz", b.bandwidth_hz);
  b.signal_power = detail::get_or<double>(j, "signal_power", b.signal_power);
  b.jamming_bits_per_symbol = detail::get_or<int>(j, "jamming_bits_per_symbol", b.jamming_bits_per_symbol);
  b.dynamic_range_factor = detail::get_or<double>(j, "dynamic_range_factor", b.dynamic_range_factor);
  if (j.contains("bob_adc")) b.bob_adc = adc_from_json(j["bob_adc"], "bob_adc");
  if (j.contains("eve_adc")) b.eve_adc = adc_from_json(j["eve_adc"], "eve_adc");
  if (j.contains("bob_snr_db")) s.bob_snr = snr_from_json(j["bob_snr_db"], "bob_snr_db");
  if (j.contains("eve_snr_db")) s.eve_snr = snr_from_json(j["eve_snr_db"], "eve_snr_db");
  return s;
}

inline json to_json(const RunConfig& c) {
  json race{{"attacker", c.race.attacker},
            {"trend", c.race.trend},
            {"toy_kem_bits", c.race.toy_kem_bits},
            {"cores", c.race.cores ? json(*c.race.cores) : json(nullptr)},
            {"presets_file", c.race.presets_file ? json(*c.race.presets_file) : json(nullptr)},
            {"custom_attackers", json::array()}};
  for (const auto& a : c.race.custom_attackers) race["custom_attackers"].push_back(attacker_to_json(a));
  return {{"system", system_to_json(c.system)},
          {"timing", {{"key_bits", c.timing.key_bits}, {"efficiency", c.timing.efficiency}}},
          {"sweep",
           {{"which", c.sweep.which},
            {"snr_b_db", axis_to_json(c.sweep.snr_b_db)},
            {"snr_e_db", axis_to_json(c.sweep.snr_e_db)},
            {"w", axis_to_json(c.sweep.w)},
            {"eve_jitter_s", axis_to_json(c.sweep.eve_jitter_s)}}},
          {"simulate",
           {{"n_symbols", c.simulate.n_symbols},
            {"seed", c.simulate.seed},
            {"cancellation_depth_db", detail::inf_or_number(c.simulate.cancellation_depth_db)},
            {"pam_bits", c.simulate.pam_bits},
            {"kem_bits", c.simulate.kem_bits},
            {"write_trace", c.simulate.write_trace}}},
          {"race", race},
          {"output", {{"format", c.format}}}};
}

inline RunConfig config_from_json(const json& j) {
  detail::reject_unknown_keys(j, "config", {"system", "timing", "sweep", "simulate", "race", "output"});
  RunConfig c;
  if (j.contains("system")) c.system = system_from_json(j["system"]);
  if (j.contains("timing")) {
    const auto& t = j["timing"];
    detail::reject_unknown_keys(t, "timing", {"key_bits", "efficiency"});
    c.timing.key_bits = detail::get_or<int>(t, "key_bits", c.timing.key_bits);
    c.timing.efficiency = detail::get_or<double>(t, "efficiency", c.timing.efficiency);
  }
  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    detail::reject_unknown_keys(s, "sweep", {"which", "snr_b_db", "snr_e_db", "w", "eve_jitter_s"});
    c.sweep.which = detail::get_or<std::string>(s, "which", c.sweep.which);
    if (s.contains("snr_b_db")) c.sweep.snr_b_db = axis_from_json(s["snr_b_db"], "snr_b_db");
    if (s.contains("snr_e_db")) c.sweep.snr_e_db = axis_from_json(s["snr_e_db"], "snr_e_db");
    if (s.contains("w")) c.sweep.w = axis_from_json(s["w"], "w");
    if (s.contains("eve_jitter_s")) c.sweep.eve_jitter_s = axis_from_json(s["eve_jitter_s"], "eve_jitter_s");
  }
  if (j.contains("simulate")) {
    const auto& s = j["simulate"];
    detail::reject_unknown_keys(s, "simulate",
                                {"n_symbols", "seed", "cancellation_depth_db", "pam_bits", "kem_bits", "write_trace"});
    c.simulate.n_symbols = detail::get_or<std::uint64_t>(s, "n_symbols", c.simulate.n_symbols);
    c.simulate.seed = detail::get_or<std::uint64_t>(s, "seed", c.simulate.seed);
    if (s.contains("cancellation_depth_db"))
      c.simulate.cancellation_depth_db = detail::number_or_inf(s["cancellation_depth_db"], "cancellation_depth_db");
    c.simulate.pam_bits = detail::get_or<int>(s, "pam_bits", c.simulate.pam_bits);
    c.simulate.kem_bits = detail::get_or<int>(s, "kem_bits", c.simulate.kem_bits);
    c.simulate.write_trace = detail::get_or<bool>(s, "write_trace", c.simulate.write_trace);
  }
  if (j.contains("race")) {
    const auto& r = j["race"];
    detail::reject_unknown_keys(r, "race",
                                {"attacker", "cores", "trend", "presets_file", "toy_kem_bits", "custom_attackers"});
    c.race.attacker = detail::get_or<std::string>(r, "attacker", c.race.attacker);
    c.race.trend = detail::get_or<std::string>(r, "trend", c.race.trend);
    c.race.toy_kem_bits = detail::get_or<int>(r, "toy_kem_bits", c.race.toy_kem_bits);
    if (r.contains("cores") && !r["cores"].is_null()) c.race.cores = detail::get_or<double>(r, "cores", 0.0);
    if (r.contains("presets_file") && !r["presets_file"].is_null())
      c.race.presets_file = detail::get_or<std::string>(r, "presets_file", "");
    for (const auto& a : r.value("custom_attackers", json::array()))
      c.race.custom_attackers.push_back(attacker_from_json(a));
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    detail::reject_unknown_keys(o, "output", {"format"});
    c.format = detail::get_or<std::string>(o, "format", c.format);
  }
  if (c.format != "csv" && c.format != "json") throw ValidationError("output format must be csv or json");
  return c;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("malformed JSON in " + path + ": " + e.what());
  }
}

/// Relative file references inside the config resolve against its directory.
inline RunConfig load_config(const std::string& path) {
  RunConfig c = config_from_json(read_json_file(path));
  if (c.race.presets_file) {
    const std::filesystem::path preset(*c.race.presets_file);
    if (preset.is_relative())
      c.race.presets_file = std::filesystem::absolute(std::filesystem::path(path).parent_path() / preset).lexically_normal().string();
  }
  return c;
}

}  // namespace jke::cli
