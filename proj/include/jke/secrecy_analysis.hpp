#pragma once

// Analytical secrecy-rate engine: the quantization-limited lower bound on the
// secrecy rate of the jammed wiretap channel, exchange duration for a key,
// the closed-form Bob SNR threshold for positive secrecy, and sweep grids.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "jke/adc_model.hpp"
#include "jke/core_model.hpp"

namespace jke {

struct SecrecyReport {
  double rate_bits_per_s = 0.0;  // raw lower bound, may be negative
  double bob_term_bits = 0.0;
  double eve_term_bits = 0.0;
  double delta_b = 0.0;
  double delta_e = 0.0;
  bool positive = false;
};

inline constexpr double kEveEntropyPowerDivisor = 2.0 * std::numbers::pi * std::numbers::e;

/// Bob's log term: log2((P + σ²_B + δ²_B/12) / (σ²_B + δ²_B/12)).
inline double bob_term_bits(double signal_power, double bob_noise_var, double delta_b) {
  const double floor = bob_noise_var + delta_b * delta_b / 12.0;
  if (!(floor > 0.0)) throw DomainError("bob noise floor is zero: rate unbounded");
  return std::log2((signal_power + floor) / floor);
}

/// Eve's log term: log2((P + σ²_E + δ²_E/12) / (σ²_E + δ²_E/(2πe))).
inline double eve_term_bits(double signal_power, double eve_noise_var, double delta_e) {
  const double d2 = delta_e * delta_e;
  const double floor = eve_noise_var + d2 / kEveEntropyPowerDivisor;
  if (!(floor > 0.0)) throw DomainError("eve noise floor is zero: rate unbounded");
  return std::log2((signal_power + eve_noise_var + d2 / 12.0) / floor);
}

/// Rate from explicit quantizer steps. Does not derive effective bits, so a
/// zero bandwidth is admissible here and gives a zero rate.
inline SecrecyReport secrecy_rate_from_resolutions(double bandwidth_hz, double signal_power,
                                                   double bob_noise_var, double eve_noise_var,
                                                   double delta_b, double delta_e) {
  SecrecyReport r;
  r.delta_b = delta_b;
  r.delta_e = delta_e;
  r.bob_term_bits = bob_term_bits(signal_power, bob_noise_var, delta_b);
  r.eve_term_bits = eve_term_bits(signal_power, eve_noise_var, delta_e);
  r.rate_bits_per_s = bandwidth_hz * (r.bob_term_bits - r.eve_term_bits);
  r.positive = r.rate_bits_per_s > 0.0;
  return r;
}

inline SecrecyReport secrecy_rate(const SystemParams& params) {
  const SystemParams p = validate(params);
  const double b_bob = effective_bits(p.bob_adc, p.bandwidth_hz);
  const double b_eve = effective_bits(p.eve_adc, p.bandwidth_hz);
  const double delta_b = bob_resolution(p.signal_power, b_bob, p.dynamic_range_factor);
  const double delta_e = eve_resolution(p.signal_power, b_eve, p.jamming_bits_per_symbol, p.dynamic_range_factor);
  return secrecy_rate_from_resolutions(p.bandwidth_hz, p.signal_power, p.bob_noise_var, p.eve_noise_var,
                                       delta_b, delta_e);
}

/// Raised when a rate-consuming computation meets R_s <= 0.
class NoSecrecyError : public std::runtime_error {
 public:
  NoSecrecyError() : std::runtime_error("no positive secrecy at this operating point") {}
};

struct JkeTiming {
  int key_bits = 256;
  double efficiency = 0.001;
  double duration_s = 0.0;
};

inline JkeTiming jke_duration(double rate_bits_per_s, int key_bits, double efficiency) {
  if (key_bits < 1) throw ValidationError("key bits must be at least 1");
  if (!(efficiency > 0.0 && efficiency <= 1.0)) throw ValidationError("efficiency must lie in (0, 1]");
  if (!(rate_bits_per_s > 0.0)) throw NoSecrecyError();
  return {key_bits, efficiency, key_bits / (efficiency * rate_bits_per_s)};
}

inline JkeTiming jke_duration(const SecrecyReport& report, int key_bits, double efficiency) {
  return jke_duration(report.rate_bits_per_s, key_bits, efficiency);
}

/// Minimum Bob SNR for R_s > 0 with Eve fully specified.
struct BobSnrThreshold {
  enum class Kind { kThreshold, kInfeasible, kAlwaysPositive };
  Kind kind = Kind::kInfeasible;
  std::optional<SnrPoint> snr;           // set for kThreshold
  std::optional<double> bob_noise_var;   // σ²_B at equality, set for kThreshold
  double eve_ratio = 0.0;                // K, Eve's SNR-like ratio inside her log term

  bool feasible_threshold() const { return kind == Kind::kThreshold; }
};

inline const char* to_string(BobSnrThreshold::Kind k) {
  switch (k) {
    case BobSnrThreshold::Kind::kThreshold: return "threshold";
    case BobSnrThreshold::Kind::kInfeasible: return "infeasible";
    case BobSnrThreshold::Kind::kAlwaysPositive: return "always_positive";
  }
  return "?";
}

/// Classifies the positive-secrecy condition σ²_B + δ²_B/12 < P/(K-1).
inline BobSnrThreshold threshold_from_eve_ratio(double signal_power, double eve_ratio, double delta_b) {
  BobSnrThreshold t;
  t.eve_ratio = eve_ratio;
  if (eve_ratio <= 1.0) {
    t.kind = BobSnrThreshold::Kind::kAlwaysPositive;
    return t;
  }
  const double max_floor = signal_power / (eve_ratio - 1.0);
  const double bob_quant = delta_b * delta_b / 12.0;
  if (bob_quant >= max_floor) {
    t.kind = BobSnrThreshold::Kind::kInfeasible;
    return t;
  }
  const double sigma2 = max_floor - bob_quant;
  t.kind = BobSnrThreshold::Kind::kThreshold;
  t.bob_noise_var = sigma2;
  t.snr = noise_var_to_snr(sigma2, signal_power);
  return t;
}

/// Bob's noise variance in `params` is ignored.
inline BobSnrThreshold min_bob_snr_for_positive_rs(const SystemParams& params) {
  const SystemParams p = validate(params);
  const double delta_b =
      bob_resolution(p.signal_power, effective_bits(p.bob_adc, p.bandwidth_hz), p.dynamic_range_factor);
  const double delta_e = eve_resolution(p.signal_power, effective_bits(p.eve_adc, p.bandwidth_hz),
                                        p.jamming_bits_per_symbol, p.dynamic_range_factor);
  const double eve_ratio = std::exp2(eve_term_bits(p.signal_power, p.eve_noise_var, delta_e));
  return threshold_from_eve_ratio(p.signal_power, eve_ratio, delta_b);
}

// ---------------------------------------------------------------------------
// Sweeps

/// One strictly monotone grid axis.
struct Axis {
  std::string name;
  std::vector<double> values;

  /// Inclusive range; the endpoint is kept when it lies within 1e-9 steps.
  static Axis range(std::string name, double min, double max, double step) {
    if (!(step > 0.0) || !(max >= min) || !std::isfinite(min) || !std::isfinite(max))
      throw ValidationError("axis " + name + ": need step > 0 and max >= min");
    Axis a{std::move(name), {}};
    const auto n = static_cast<std::size_t>(std::floor((max - min) / step + 1e-9)) + 1;
    a.values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) a.values.push_back(min + static_cast<double>(i) * step);
    return a;
  }

  static Axis list(std::string name, std::vector<double> values) {
    Axis a{std::move(name), std::move(values)};
    a.check();
    return a;
  }

  void check() const {
    if (values.empty()) throw ValidationError("axis " + name + " is empty");
    if (values.size() < 2) return;
    const bool up = values[1] > values[0];
    for (std::size_t i = 1; i < values.size(); ++i) {
      const bool ok = up ? values[i] > values[i - 1] : values[i] < values[i - 1];
      if (!ok || !std::isfinite(values[i])) throw ValidationError("axis " + name + " is not strictly monotone");
    }
  }

  std::size_t size() const { return values.size(); }
};

/// Rectangular grid; cells are row-major with `rows` outer.
template <class Cell>
struct SweepGrid {
  Axis rows;
  Axis cols;
  std::vector<Cell> cells;

  const Cell& at(std::size_t r, std::size_t c) const { return cells.at(r * cols.size() + c); }
};

/// Rows: Eve SNR (dB). Columns: Bob SNR (dB).
inline SweepGrid<SecrecyReport> sweep_fig3a(const SystemParams& tmpl, const Axis& snr_b_db, const Axis& snr_e_db) {
  snr_b_db.check();
  snr_e_db.check();
  validate(tmpl);
  SweepGrid<SecrecyReport> g{snr_e_db, snr_b_db, {}};
  g.cells.reserve(snr_b_db.size() * snr_e_db.size());
  for (double se : snr_e_db.values) {
    for (double sb : snr_b_db.values) {
      SystemParams p = tmpl;
      p.bob_noise_var = snr_to_noise_var(SnrPoint::finite(sb), p.signal_power);
      p.eve_noise_var = snr_to_noise_var(SnrPoint::finite(se), p.signal_power);
      g.cells.push_back(secrecy_rate(p));
    }
  }
  return g;
}

/// Per Eve-SNR row, the first Bob SNR column where the rate is positive.
inline std::vector<std::optional<double>> positive_rate_contour(const SweepGrid<SecrecyReport>& g) {
  std::vector<std::optional<double>> out;
  out.reserve(g.rows.size());
  for (std::size_t r = 0; r < g.rows.size(); ++r) {
    std::optional<double> first;
    for (std::size_t c = 0; c < g.cols.size(); ++c) {
      if (g.at(r, c).positive) {
        first = g.cols.values[c];
        break;
      }
    }
    out.push_back(first);
  }
  return out;
}

/// Rows: jamming bits per symbol. Columns: Eve aperture jitter (s). Eve's
/// channel is noiseless regardless of the template.
inline SweepGrid<BobSnrThreshold> sweep_fig3b(const SystemParams& tmpl, const Axis& w_axis, const Axis& eve_jitter_s) {
  w_axis.check();
  eve_jitter_s.check();
  validate(tmpl);
  for (double w : w_axis.values)
    if (w < 0.0 || w != std::floor(w)) throw ValidationError("jamming bits axis must hold non-negative integers");
  SweepGrid<BobSnrThreshold> g{w_axis, eve_jitter_s, {}};
  g.cells.reserve(w_axis.size() * eve_jitter_s.size());
  for (double w : w_axis.values) {
    for (double jitter : eve_jitter_s.values) {
      SystemParams p = tmpl;
      p.jamming_bits_per_symbol = static_cast<int>(w);
      p.eve_adc = AdcSpec{jitter, std::nullopt};
      p.eve_noise_var = 0.0;
      g.cells.push_back(min_bob_snr_for_positive_rs(p));
    }
  }
  return g;
}

}  // namespace jke
