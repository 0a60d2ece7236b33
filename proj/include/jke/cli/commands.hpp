#pragma once

// Batch commands behind the `jke` executable. Each command writes the exact
// configuration it ran with to <out>/config.json next to its results.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "jke/adc_model.hpp"
#include "jke/adversary_race.hpp"
#include "jke/cli/config.hpp"
#include "jke/protocol_sim/jamming.hpp"
#include "jke/protocol_sim/kem.hpp"
#include "jke/protocol_sim/session.hpp"
#include "jke/secrecy_analysis.hpp"

namespace jke::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kValidation = 1, kIo = 2, kNoSecrecy = 3 };

// ---------------------------------------------------------------------------
// Output helpers

/// Round-trip exact decimal form; "inf"/"-inf"/"nan" for non-finite values.
inline std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

inline json jnum(double v) { return std::isfinite(v) ? json(v) : json(num(v)); }

inline void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

inline void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

inline void prepare_out_dir(const fs::path& out, const RunConfig& config) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create output directory " + out.string() + ": " + ec.message());
  write_json(out / "config.json", to_json(config));
}

inline json params_to_json(const SystemParams& p) {
  return {{"bandwidth_hz", p.bandwidth_hz},
          {"signal_power", p.signal_power},
          {"jamming_bits_per_symbol", p.jamming_bits_per_symbol},
          {"dynamic_range_factor", p.dynamic_range_factor},
          {"bob_adc", adc_to_json(p.bob_adc)},
          {"eve_adc", adc_to_json(p.eve_adc)},
          {"bob_effective_bits", effective_bits(p.bob_adc, p.bandwidth_hz)},
          {"eve_effective_bits", effective_bits(p.eve_adc, p.bandwidth_hz)},
          {"bob_noise_var", p.bob_noise_var},
          {"eve_noise_var", p.eve_noise_var}};
}

inline json report_to_json(const SecrecyReport& r) {
  return {{"rate_bits_per_s", r.rate_bits_per_s}, {"bob_term_bits", r.bob_term_bits},
          {"eve_term_bits", r.eve_term_bits},     {"delta_b", r.delta_b},
          {"delta_e", r.delta_e},                 {"positive", r.positive}};
}

inline json stats_to_json(const SimStats& s) {
  return {{"n_symbols", s.n_symbols},
          {"signal_power", jnum(s.signal_power)},
          {"jamming_power", jnum(s.jamming_power)},
          {"residual_jamming_power", jnum(s.residual_jamming_power)},
          {"bob_noise_var", jnum(s.bob_noise_var)},
          {"eve_noise_var", jnum(s.eve_noise_var)},
          {"bob_error_power", jnum(s.bob_error_power)},
          {"bob_effective_snr", jnum(s.bob_effective_snr)},
          {"eve_jammed_snr", jnum(s.eve_jammed_snr)},
          {"eve_residual_var", jnum(s.eve_residual_var)},
          {"eve_effective_snr", jnum(s.eve_effective_snr)},
          {"bob_symbol_errors", s.bob_symbol_errors},
          {"eve_symbol_errors", s.eve_symbol_errors},
          {"bob_key_bit_errors", s.bob_key_bit_errors},
          {"eve_key_bit_errors", s.eve_key_bit_errors}};
}

// ---------------------------------------------------------------------------
// Trace files

inline const std::vector<std::string>& trace_columns() {
  static const std::vector<std::string> cols{"clean_signal", "jamming",       "bob_noise", "eve_noise",
                                             "bob_rx",       "eve_rx",        "bob_cancelled",
                                             "bob_post",     "eve_stored",    "eve_post"};
  return cols;
}

inline std::vector<const std::vector<double>*> trace_sequences(const SimTrace& t) {
  return {&t.clean_signal, &t.jamming, &t.bob_noise,     &t.eve_noise,  &t.bob_rx,
          &t.eve_rx,       &t.bob_cancelled, &t.bob_post, &t.eve_stored, &t.eve_post};
}

inline void write_trace_csv(const fs::path& path, const SimTrace& t) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "index";
  for (const auto& c : trace_columns()) out << ',' << c;
  out << '\n';
  const auto seqs = trace_sequences(t);
  for (std::size_t i = 0; i < t.size(); ++i) {
    out << i;
    for (const auto* s : seqs) out << ',' << num((*s)[i]);
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

inline void write_trace_json(const fs::path& path, const SimTrace& t) {
  json j = json::object();
  const auto seqs = trace_sequences(t);
  for (std::size_t c = 0; c < seqs.size(); ++c) j[trace_columns()[c]] = *seqs[c];
  write_json(path, j);
}

/// Reads the sequences of a trace CSV written by write_trace_csv().
inline SimTrace read_trace_csv(const fs::path& path, int pam_bits, std::size_t key_bits, double nominal_power) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty trace file " + path.string());
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  SimTrace t;
  t.pam_bits = pam_bits;
  t.key_bits = key_bits;
  t.nominal_power = nominal_power;
  std::map<std::string, std::vector<double>*> target{
      {"clean_signal", &t.clean_signal}, {"jamming", &t.jamming},   {"bob_noise", &t.bob_noise},
      {"eve_noise", &t.eve_noise},       {"bob_rx", &t.bob_rx},     {"eve_rx", &t.eve_rx},
      {"bob_cancelled", &t.bob_cancelled}, {"bob_post", &t.bob_post}, {"eve_stored", &t.eve_stored},
      {"eve_post", &t.eve_post}};
  std::vector<std::vector<double>*> by_col;
  for (const auto& h : header) by_col.push_back(target.count(h) ? target[h] : nullptr);
  for (const auto& [name, _] : target)
    if (std::find(header.begin(), header.end(), name) == header.end())
      throw ValidationError("trace file lacks column " + name);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t c = 0;
    for (; std::getline(ss, cell, ','); ++c) {
      if (c >= by_col.size()) throw ValidationError("trace row has too many cells");
      if (!by_col[c]) continue;
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) throw ValidationError("malformed number in trace: " + cell);
      by_col[c]->push_back(v);
    }
    if (c != by_col.size()) throw ValidationError("trace row has too few cells");
  }
  return t;
}

// ---------------------------------------------------------------------------
// analyze

inline int cmd_analyze(const RunConfig& config, const fs::path& out, std::ostream& log) {
  const SystemParams params = config.system.to_params();
  prepare_out_dir(out, config);
  const SecrecyReport report = secrecy_rate(params);
  json j{{"params", params_to_json(params)}, {"secrecy", report_to_json(report)}};
  int code = kOk;
  try {
    const JkeTiming timing = jke_duration(report, config.timing.key_bits, config.timing.efficiency);
    j["timing"] = {{"key_bits", timing.key_bits}, {"efficiency", timing.efficiency},
                   {"duration_s", timing.duration_s}};
    log << fmt::format("R_s = {:.6g} bit/s, t_j = {:.6g} ms\n", report.rate_bits_per_s, timing.duration_s * 1e3);
  } catch (const NoSecrecyError& e) {
    j["timing"] = {{"key_bits", config.timing.key_bits}, {"efficiency", config.timing.efficiency},
                   {"error", e.what()}};
    log << fmt::format("R_s = {:.6g} bit/s: {}\n", report.rate_bits_per_s, e.what());
    code = kNoSecrecy;
  }
  write_json(out / "report.json", j);
  if (config.format == "csv") {
    std::string csv = "rate_bits_per_s,bob_term_bits,eve_term_bits,delta_b,delta_e,positive,duration_s\n";
    csv += fmt::format("{},{},{},{},{},{},{}\n", num(report.rate_bits_per_s), num(report.bob_term_bits),
                       num(report.eve_term_bits), num(report.delta_b), num(report.delta_e),
                       report.positive ? 1 : 0,
                       j["timing"].contains("duration_s") ? num(j["timing"]["duration_s"].get<double>()) : "");
    write_text(out / "report.csv", csv);
  }
  return code;
}

/// Recomputes statistics of a trace file written by `simulate`.
inline int cmd_analyze_trace(const RunConfig& config, const fs::path& trace_path, const fs::path& out,
                             std::ostream& log) {
  const SystemParams params = config.system.to_params();
  prepare_out_dir(out, config);
  SimTrace t = read_trace_csv(trace_path, config.simulate.pam_bits,
                              static_cast<std::size_t>(config.timing.key_bits), params.signal_power);
  const SimStats s = compute_stats(t);
  write_json(out / "trace_stats.json", stats_to_json(s));
  log << fmt::format("recomputed statistics of {} symbols\n", s.n_symbols);
  return kOk;
}

// ---------------------------------------------------------------------------
// sweep

inline json sweep_sidecar(const RunConfig& config, const SystemParams& tmpl, const Axis& rows, const Axis& cols) {
  return {{"which", config.sweep.which}, {"params", params_to_json(tmpl)},
          {"rows", {{"name", rows.name}, {"values", rows.values}}},
          {"cols", {{"name", cols.name}, {"values", cols.values}}}};
}

inline int cmd_sweep(const RunConfig& config, const fs::path& out, std::ostream& log) {
  const SystemParams tmpl = config.system.to_params();
  const std::string& which = config.sweep.which;
  if (which != "fig3a" && which != "fig3b") throw ValidationError("sweep must be fig3a or fig3b");
  prepare_out_dir(out, config);

  if (which == "fig3a") {
    const Axis snr_b = config.sweep.snr_b_db.to_axis("snr_b_db");
    const Axis snr_e = config.sweep.snr_e_db.to_axis("snr_e_db");
    const auto grid = sweep_fig3a(tmpl, snr_b, snr_e);
    const auto contour = positive_rate_contour(grid);
    if (config.format == "csv") {
      std::string csv = "snr_e_db,snr_b_db,rate_bits_per_s,bob_term_bits,eve_term_bits,delta_b,delta_e,positive\n";
      for (std::size_t r = 0; r < grid.rows.size(); ++r)
        for (std::size_t c = 0; c < grid.cols.size(); ++c) {
          const auto& cell = grid.at(r, c);
          csv += fmt::format("{},{},{},{},{},{},{},{}\n", num(grid.rows.values[r]), num(grid.cols.values[c]),
                             num(cell.rate_bits_per_s), num(cell.bob_term_bits), num(cell.eve_term_bits),
                             num(cell.delta_b), num(cell.delta_e), cell.positive ? 1 : 0);
        }
      write_text(out / "fig3a.csv", csv);
      std::string ccsv = "snr_e_db,min_positive_snr_b_db\n";
      for (std::size_t r = 0; r < contour.size(); ++r)
        ccsv += fmt::format("{},{}\n", num(grid.rows.values[r]), contour[r] ? num(*contour[r]) : "");
      write_text(out / "fig3a_contour.csv", ccsv);
    } else {
      json cells = json::array();
      for (const auto& cell : grid.cells) cells.push_back(report_to_json(cell));
      json contour_j = json::array();
      for (const auto& c : contour) contour_j.push_back(c ? json(*c) : json(nullptr));
      write_json(out / "fig3a.json", {{"cells", cells}, {"contour", contour_j}});
    }
    write_json(out / "fig3a.params.json", sweep_sidecar(config, tmpl, grid.rows, grid.cols));
    log << fmt::format("fig3a: {} x {} cells\n", grid.rows.size(), grid.cols.size());
  } else {
    const Axis w = config.sweep.w.to_axis("w");
    const Axis jitter = config.sweep.eve_jitter_s.to_axis("eve_jitter_s");
    const auto grid = sweep_fig3b(tmpl, w, jitter);
    auto value = [](const BobSnrThreshold& t) {
      switch (t.kind) {
        case BobSnrThreshold::Kind::kThreshold: return t.snr->is_infinite() ? std::numeric_limits<double>::infinity() : t.snr->db();
        case BobSnrThreshold::Kind::kInfeasible: return std::numeric_limits<double>::infinity();
        case BobSnrThreshold::Kind::kAlwaysPositive: return -std::numeric_limits<double>::infinity();
      }
      return std::numeric_limits<double>::quiet_NaN();
    };
    if (config.format == "csv") {
      std::string csv = "w,eve_jitter_s,status,min_snr_b_db,eve_ratio\n";
      for (std::size_t r = 0; r < grid.rows.size(); ++r)
        for (std::size_t c = 0; c < grid.cols.size(); ++c) {
          const auto& cell = grid.at(r, c);
          csv += fmt::format("{},{},{},{},{}\n", num(grid.rows.values[r]), num(grid.cols.values[c]),
                             to_string(cell.kind), num(value(cell)), num(cell.eve_ratio));
        }
      write_text(out / "fig3b.csv", csv);
    } else {
      json cells = json::array();
      for (const auto& cell : grid.cells)
        cells.push_back({{"status", to_string(cell.kind)}, {"min_snr_b_db", jnum(value(cell))},
                         {"eve_ratio", cell.eve_ratio}});
      write_json(out / "fig3b.json", {{"cells", cells}});
    }
    write_json(out / "fig3b.params.json", sweep_sidecar(config, tmpl, grid.rows, grid.cols));
    log << fmt::format("fig3b: {} x {} cells\n", grid.rows.size(), grid.cols.size());
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// simulate

inline int cmd_simulate(const RunConfig& config, const fs::path& out, std::ostream& log) {
  const SystemParams params = config.system.to_params();
  const auto& sim = config.simulate;
  if (sim.n_symbols < 1) throw ValidationError("n_symbols must be at least 1");
  if (!(sim.cancellation_depth_db >= 0.0)) throw ValidationError("cancellation depth must be non-negative");
  if (config.timing.key_bits < static_cast<int>(KeyMaterial::kMinBits))
    throw ValidationError("long-term key must have at least 128 bits");
  prepare_out_dir(out, config);

  // Phase 1: Bob picks k_AB and encapsulates it to Alice.
  const KeyMaterial bob_key = KeyMaterial::from_seed(sim.seed ^ 0x6b41425f6b6579ULL);
  KeyMaterial alice_key = bob_key;
  json kem_j;
  if (sim.kem_bits > 0) {
    const auto kp = kem::keygen(sim.kem_bits, sim.seed);
    const auto ct = kem::encapsulate(kp.public_key(), bob_key, sim.seed + 1);
    alice_key = kem::decapsulate(kp, ct);
    kem_j = {{"type", "toy-rsa"}, {"modulus_bits", kp.bit_length}, {"modulus", kp.modulus.str()},
             {"public_exponent", kp.public_exponent.str()}, {"ciphertext_blocks", ct.blocks.size()},
             {"keys_agree", alice_key == bob_key}, {"warning", "toy KEM, insecure by construction"}};
  } else {
    alice_key = kem::PassthroughKem::decapsulate(kem::PassthroughKem::encapsulate(bob_key));
    kem_j = {{"type", "passthrough"}, {"keys_agree", true}};
  }

  // Phase 2: Alice jams with her copy, Bob cancels with his.
  SessionOptions opt;
  opt.pam_bits = sim.pam_bits;
  opt.bob_jamming_seed = bob_key;
  opt.long_term_key = KeyMaterial::from_seed(sim.seed ^ 0x6b4c5f6b6579ULL, static_cast<std::size_t>(config.timing.key_bits));
  const CancellationModel cancel{sim.cancellation_depth_db};
  const SimTrace trace = run_jke_session(params, cancel, alice_key, sim.n_symbols, sim.seed, opt);

  JammingStream true_jamming{alice_key, params.jamming_bits_per_symbol, 0.0, {}, trace.jamming};
  const AttackReport attack = eve_storage_attack(trace, true_jamming);

  const double floor = trace.eve_step * trace.eve_step / 12.0;
  const double predicted_snr = params.signal_power / (params.eve_noise_var + floor);
  json stats{{"seed", sim.seed},
             {"n_symbols", sim.n_symbols},
             {"kem", kem_j},
             {"cancellation",
              {{"depth_db", jnum(cancel.depth_db)}, {"residual_bits", jnum(cancel.residual_bits())},
               {"warning", trace.cancellation_warning}, {"messages", trace.warnings}}},
             {"quantizers", {{"bob_step", trace.bob_step}, {"eve_step", trace.eve_step}}},
             {"stats", stats_to_json(trace.stats)},
             {"attack",
              {{"residual_var", jnum(attack.residual_var)}, {"effective_snr", jnum(attack.effective_snr)},
               {"pre_attack_snr", jnum(attack.pre_attack_snr)}}},
             {"analytic",
              {{"eve_quantization_floor", floor},
               {"eve_predicted_effective_snr", jnum(predicted_snr)},
               {"residual_var_rel_error", jnum(floor > 0 ? attack.residual_var / floor - 1.0 : 0.0)},
               {"effective_snr_rel_error", jnum(attack.effective_snr / predicted_snr - 1.0)}}}};
  write_json(out / "stats.json", stats);
  if (sim.write_trace) {
    if (config.format == "csv")
      write_trace_csv(out / "trace.csv", trace);
    else
      write_trace_json(out / "trace.json", trace);
  }
  log << fmt::format("simulated {} symbols: Bob symbol errors {}, key bit errors {}; Eve residual var {:.6g} "
                     "(floor {:.6g})\n",
                     sim.n_symbols, trace.stats.bob_symbol_errors, trace.stats.bob_key_bit_errors,
                     attack.residual_var, floor);
  for (const auto& w : trace.warnings) log << "warning: " << w << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// race

inline PresetRegistry load_registry(const RaceConfig& race) {
  PresetRegistry reg =
      race.presets_file ? registry_from_json(read_json_file(*race.presets_file)) : PresetRegistry::builtin();
  for (const auto& a : race.custom_attackers) reg.attackers.push_back(a);
  return reg;
}

inline int cmd_race(const RunConfig& config, const fs::path& out, std::ostream& log) {
  const SystemParams params = config.system.to_params();
  const PresetRegistry reg = load_registry(config.race);

  AttackerTimeModel attacker;
  if (config.race.attacker == "toy-factoring") {
    attacker = measured_factoring_attacker(kem::keygen(config.race.toy_kem_bits, config.simulate.seed));
  } else {
    attacker = reg.attacker(config.race.attacker);
    if (attacker.core_years && !attacker.t_qc_s) {
      if (!config.race.cores) throw ValidationError("attacker " + attacker.name + " needs race.cores");
      attacker = attacker.with_cores(*config.race.cores);
    }
  }
  const JitterTrend& trend = reg.trend(config.race.trend);
  prepare_out_dir(out, config);

  const SecrecyReport report = secrecy_rate(params);
  json j{{"secrecy", report_to_json(report)}};
  json trend_j = trend_to_json(trend);
  trend_j["caveat"] = kTrendCaveat;
  const double eve_jitter = params.eve_adc.aperture_jitter_s;
  if (eve_jitter < trend.reference_jitter_s) {
    const double year = year_for_jitter(trend, eve_jitter);
    trend_j["eve_jitter_s"] = eve_jitter;
    trend_j["projected_year"] = year;
    trend_j["annotation"] = fmt::format("Eve ADC with {:g} fs rms aperture jitter plausible around {}",
                                        eve_jitter * 1e15, static_cast<int>(std::ceil(year)));
  } else {
    trend_j["eve_jitter_s"] = eve_jitter;
    trend_j["annotation"] = fmt::format("Eve ADC with {:g} fs rms aperture jitter is available today",
                                        eve_jitter * 1e15);
  }
  j["trend"] = trend_j;
  j["attacker"] = attacker_to_json(attacker);
  if (attacker.core_years)
    j["attacker"]["note"] = "core-years divided linearly across cores; NFS does not parallelize uniformly";

  int code = kOk;
  try {
    const JkeTiming timing = jke_duration(report, config.timing.key_bits, config.timing.efficiency);
    const RaceScenario race = race_verdict(timing.duration_s, attacker);
    j["t_j_s"] = timing.duration_s;
    j["verdict"] = to_string(race.verdict);
    log << fmt::format("t_j = {:.6g} s vs {}: {}\n", timing.duration_s, attacker.name, to_string(race.verdict));
  } catch (const NoSecrecyError& e) {
    j["verdict"] = "no-secrecy";
    j["error"] = e.what();
    code = kNoSecrecy;
    log << e.what() << '\n';
  }
  log << trend_j["annotation"].get<std::string>() << " (" << kTrendCaveat << ")\n";
  write_json(out / "race.json", j);
  return code;
}

// ---------------------------------------------------------------------------
// Entry point

/// Parses argv and runs one subcommand; returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Jamming key exchange laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", format, trace_path, which;
  std::optional<std::uint64_t> seed;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "override simulate.seed");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };
  auto* analyze = app.add_subcommand("analyze", "secrecy rate and exchange duration at one operating point");
  add_common(analyze);
  analyze->add_option("--trace", trace_path, "recompute statistics of a simulate trace CSV");
  auto* sweep = app.add_subcommand("sweep", "secrecy-rate or threshold grids");
  add_common(sweep);
  sweep->add_option("which", which, "fig3a or fig3b")->check(CLI::IsMember({"fig3a", "fig3b"}));
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo exchange and storage attack");
  add_common(simulate);
  auto* race = app.add_subcommand("race", "exchange duration against an attacker time model");
  add_common(race);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, log, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, log, err);
    return kValidation;
  }

  try {
    RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (seed) config.simulate.seed = *seed;
    if (!format.empty()) config.format = format;
    if (!which.empty()) config.sweep.which = which;
    const fs::path out(out_dir);
    if (*analyze) return trace_path.empty() ? cmd_analyze(config, out, log) : cmd_analyze_trace(config, trace_path, out, log);
    if (*sweep) return cmd_sweep(config, out, log);
    if (*simulate) return cmd_simulate(config, out, log);
    if (*race) return cmd_race(config, out, log);
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const ValidationError& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kValidation;
  } catch (const DomainError& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kValidation;
  } catch (const kem::MalformedCiphertext& e) {
    err << "kem failure: " << e.what() << '\n';
    return kValidation;
  } catch (const NoSecrecyError& e) {
    err << e.what() << '\n';
    return kNoSecrecy;
  }
  return kValidation;
}

}  // namespace jke::cli
