#pragma once

// Monte-Carlo jamming key exchange over a real baseband wiretap channel.
//
//   Alice:  X (PAM of k_L, cyclic repetition) + J(k_AB)
//   Bob:    Y = X + J + n_B  -> cancel J (finite depth) -> quantize at δ_B
//   Eve:    Z = X + J + n_E  -> quantize at δ_E and store
//   later:  Z' = stored - J  (Eve learns k_AB after the exchange)

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "jke/adc_model.hpp"
#include "jke/core_model.hpp"
#include "jke/protocol_sim/jamming.hpp"

namespace jke {

/// Analog plus digital self-interference cancellation at Bob. Infinite depth
/// means perfect removal of the known jammer.
struct CancellationModel {
  double depth_db = 0.0;

  static CancellationModel perfect() { return {std::numeric_limits<double>::infinity()}; }

  double residual_bits() const { return depth_db / 6.0; }
  /// Amplitude gain applied to the jammer that survives cancellation.
  double residual_gain() const { return std::pow(10.0, -depth_db / 20.0); }
  double residual_power(double jamming_power) const { return jamming_power * std::pow(10.0, -depth_db / 10.0); }
};

/// 6 dB of cancellation buys one bit of jammer resolution.
inline double cancellation_bits(double depth_db) {
  if (!(depth_db >= 0.0)) throw DomainError("cancellation depth must be non-negative");
  return depth_db / 6.0;
}

// ---------------------------------------------------------------------------
// PAM mapping

struct PamAlphabet {
  int bits = 1;
  double signal_power = 1.0;

  int size() const { return 1 << bits; }
  double spacing_half() const {
    const double m = size();
    return std::sqrt(3.0 * signal_power / (m * m - 1.0));
  }
  double level(int index) const { return spacing_half() * (2.0 * index - (size() - 1)); }
  int decide(double y) const {
    const double idx = std::round((y / spacing_half() + (size() - 1)) / 2.0);
    return static_cast<int>(std::clamp(idx, 0.0, static_cast<double>(size() - 1)));
  }
};

struct SessionOptions {
  int pam_bits = 1;
  std::optional<KeyMaterial> long_term_key;  // k_L; drawn from rng_seed when absent
  std::optional<KeyMaterial> bob_jamming_seed;  // Bob's copy of k_AB; defaults to Alice's
  std::optional<double> jam_scale;
  double warning_margin_bits = 1.0;
};

/// Empirical statistics. Everything here is a function of the trace
/// sequences plus (pam_bits, key_bits), see compute_stats().
struct SimStats {
  std::size_t n_symbols = 0;
  double signal_power = 0.0;
  double jamming_power = 0.0;
  double residual_jamming_power = 0.0;
  double bob_noise_var = 0.0;
  double eve_noise_var = 0.0;
  double bob_error_power = 0.0;
  double bob_effective_snr = 0.0;
  double eve_jammed_snr = 0.0;
  double eve_residual_var = 0.0;
  double eve_effective_snr = 0.0;
  std::size_t bob_symbol_errors = 0;
  std::size_t eve_symbol_errors = 0;
  std::size_t bob_key_bit_errors = 0;
  std::size_t eve_key_bit_errors = 0;

  bool operator==(const SimStats&) const = default;
};

/// What Eve keeps: quantized samples only.
struct EveRecording {
  std::vector<double> stored;
  double step = 0.0;
};

struct SimTrace {
  int pam_bits = 1;
  std::size_t key_bits = 0;
  double nominal_power = 1.0;
  std::vector<double> clean_signal;
  std::vector<double> jamming;
  std::vector<double> bob_noise;
  std::vector<double> eve_noise;
  std::vector<double> bob_rx;
  std::vector<double> eve_rx;
  std::vector<double> bob_cancelled;
  std::vector<double> bob_post;
  std::vector<double> eve_stored;
  std::vector<double> eve_post;
  double bob_step = 0.0;
  double eve_step = 0.0;
  bool cancellation_warning = false;
  std::vector<std::string> warnings;
  SimStats stats;

  std::size_t size() const { return clean_signal.size(); }
  EveRecording eve_recording() const { return {eve_stored, eve_step}; }
};

namespace detail {

inline double mean_square(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

inline double variance(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(v.size());
}

inline std::vector<double> difference(std::span<const double> a, std::span<const double> b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

inline double ratio_or_inf(double num, double den) {
  return den > 0.0 ? num / den : std::numeric_limits<double>::infinity();
}

/// Key bit j rides on symbol group j / pam_bits; symbol i carries group i mod G.
inline std::size_t group_count(std::size_t key_bits, int pam_bits) {
  return (key_bits + static_cast<std::size_t>(pam_bits) - 1) / static_cast<std::size_t>(pam_bits);
}

/// Majority vote over every repetition of each key bit.
inline std::vector<bool> decode_key(std::span<const double> received, const PamAlphabet& pam, std::size_t key_bits) {
  const std::size_t groups = group_count(key_bits, pam.bits);
  std::vector<long> votes(key_bits, 0);
  for (std::size_t i = 0; i < received.size(); ++i) {
    const std::size_t g = i % groups;
    const int sym = pam.decide(received[i]);
    for (int b = 0; b < pam.bits; ++b) {
      const std::size_t k = g * static_cast<std::size_t>(pam.bits) + static_cast<std::size_t>(b);
      if (k < key_bits) votes[k] += ((sym >> b) & 1) ? 1 : -1;
    }
  }
  std::vector<bool> bits(key_bits);
  for (std::size_t k = 0; k < key_bits; ++k) bits[k] = votes[k] > 0;
  return bits;
}

}  // namespace detail

inline SimStats compute_stats(const SimTrace& t) {
  using detail::difference;
  const std::size_t n = t.size();
  for (const auto* seq : {&t.jamming, &t.bob_noise, &t.eve_noise, &t.bob_rx, &t.eve_rx, &t.bob_cancelled,
                          &t.bob_post, &t.eve_stored, &t.eve_post})
    if (seq->size() != n) throw ValidationError("trace sequences differ in length");

  SimStats s;
  s.n_symbols = n;
  s.signal_power = detail::mean_square(t.clean_signal);
  s.jamming_power = detail::mean_square(t.jamming);
  // bob_cancelled = X + n_B + residual jammer
  auto residual = difference(difference(t.bob_cancelled, t.clean_signal), t.bob_noise);
  s.residual_jamming_power = detail::mean_square(residual);
  s.bob_noise_var = detail::variance(t.bob_noise);
  s.eve_noise_var = detail::variance(t.eve_noise);
  s.bob_error_power = detail::mean_square(difference(t.bob_post, t.clean_signal));
  s.bob_effective_snr = detail::ratio_or_inf(s.signal_power, s.bob_error_power);
  s.eve_jammed_snr = detail::ratio_or_inf(s.signal_power, detail::mean_square(difference(t.eve_rx, t.clean_signal)));
  s.eve_residual_var = detail::variance(difference(difference(t.eve_post, t.clean_signal), t.eve_noise));
  s.eve_effective_snr =
      detail::ratio_or_inf(s.signal_power, detail::mean_square(difference(t.eve_post, t.clean_signal)));

  const PamAlphabet pam{t.pam_bits, t.nominal_power};
  for (std::size_t i = 0; i < n; ++i) {
    const int truth = pam.decide(t.clean_signal[i]);
    s.bob_symbol_errors += pam.decide(t.bob_post[i]) != truth;
    s.eve_symbol_errors += pam.decide(t.eve_post[i]) != truth;
  }
  if (t.key_bits > 0) {
    const auto truth = detail::decode_key(t.clean_signal, pam, t.key_bits);
    const auto bob = detail::decode_key(t.bob_post, pam, t.key_bits);
    const auto eve = detail::decode_key(t.eve_post, pam, t.key_bits);
    for (std::size_t k = 0; k < t.key_bits; ++k) {
      s.bob_key_bit_errors += bob[k] != truth[k];
      s.eve_key_bit_errors += eve[k] != truth[k];
    }
  }
  return s;
}

/// One complete exchange. All randomness derives from `rng_seed` and the
/// jamming seed, so identical inputs give a bit-identical trace.
inline SimTrace run_jke_session(const SystemParams& params, const CancellationModel& cancel,
                                const KeyMaterial& jamming_seed, std::size_t n_symbols, std::uint64_t rng_seed,
                                const SessionOptions& options = {}) {
  const SystemParams p = validate(params);
  if (n_symbols < 1) throw ValidationError("n_symbols must be at least 1");
  if (!(cancel.depth_db >= 0.0)) throw ValidationError("cancellation depth must be non-negative");
  if (options.pam_bits < 1 || options.pam_bits > 8) throw ValidationError("pam bits must lie in [1, 8]");

  std::seed_seq key_seq{static_cast<std::uint32_t>(rng_seed), static_cast<std::uint32_t>(rng_seed >> 32), 3U};
  std::mt19937_64 key_rng(key_seq);
  const KeyMaterial long_term = options.long_term_key.value_or(KeyMaterial::from_seed(key_rng()));

  const PamAlphabet pam{options.pam_bits, p.signal_power};
  const QuantizerConfig bob_q = bob_quantizer(p);
  const QuantizerConfig eve_q = eve_quantizer(p);
  const int w = p.jamming_bits_per_symbol;
  const double jam_scale = options.jam_scale.value_or(default_jam_scale(p));

  SimTrace t;
  t.pam_bits = options.pam_bits;
  t.key_bits = long_term.size();
  t.nominal_power = p.signal_power;
  t.bob_step = bob_q.step();
  t.eve_step = eve_q.step();
  if (w > 0 && cancellation_bits(cancel.depth_db) < w + options.warning_margin_bits) {
    t.cancellation_warning = true;
    t.warnings.push_back("Bob cannot cancel a " + std::to_string(w) + "-bit jammer at this depth");
  }

  // Alice
  const std::size_t groups = detail::group_count(long_term.size(), pam.bits);
  t.clean_signal.resize(n_symbols);
  for (std::size_t i = 0; i < n_symbols; ++i) {
    const std::size_t g = i % groups;
    int sym = 0;
    for (int b = 0; b < pam.bits; ++b) {
      const std::size_t k = g * static_cast<std::size_t>(pam.bits) + static_cast<std::size_t>(b);
      if (k < long_term.size() && long_term.bit(k)) sym |= 1 << b;
    }
    t.clean_signal[i] = pam.level(sym);
  }
  std::vector<double> bob_regenerated(n_symbols, 0.0);
  if (w > 0) {
    t.jamming = jamming_stream(jamming_seed, w, n_symbols, jam_scale).symbols;
    bob_regenerated = options.bob_jamming_seed
                          ? jamming_stream(*options.bob_jamming_seed, w, n_symbols, jam_scale).symbols
                          : t.jamming;
  } else {
    t.jamming.assign(n_symbols, 0.0);
  }

  // Channels
  auto gaussian = [n_symbols](double var, std::uint64_t seed, std::uint32_t stream) {
    std::vector<double> out(n_symbols, 0.0);
    if (var <= 0.0) return out;
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> dist(0.0, 1.0);
    const double sd = std::sqrt(var);
    for (auto& v : out) v = sd * dist(rng);
    return out;
  };
  t.bob_noise = gaussian(p.bob_noise_var, rng_seed, 1U);
  t.eve_noise = gaussian(p.eve_noise_var, rng_seed, 2U);

  t.bob_rx.resize(n_symbols);
  t.eve_rx.resize(n_symbols);
  t.bob_cancelled.resize(n_symbols);
  t.bob_post.resize(n_symbols);
  t.eve_stored.resize(n_symbols);
  t.eve_post.resize(n_symbols);
  const double keep = cancel.residual_gain();
  for (std::size_t i = 0; i < n_symbols; ++i) {
    const double transmitted = t.clean_signal[i] + t.jamming[i];
    t.bob_rx[i] = transmitted + t.bob_noise[i];
    t.eve_rx[i] = transmitted + t.eve_noise[i];
    // Bob removes all but the residual fraction of his regenerated jammer.
    t.bob_cancelled[i] = t.bob_rx[i] - bob_regenerated[i] + keep * bob_regenerated[i];
    t.bob_post[i] = bob_q.quantize(t.bob_cancelled[i]);
    t.eve_stored[i] = eve_q.quantize(t.eve_rx[i]);
    t.eve_post[i] = t.eve_stored[i] - t.jamming[i];
  }
  t.stats = compute_stats(t);
  return t;
}

// ---------------------------------------------------------------------------
// Store-now-cancel-later attack

/// Eve removes the (later learned) jammer from her stored samples. Only the
/// recording is visible here, never the analog signal.
inline std::vector<double> remove_jamming(const EveRecording& recording, std::span<const double> jamming) {
  if (recording.stored.size() != jamming.size()) throw ValidationError("recording and jamming lengths differ");
  return detail::difference(recording.stored, jamming);
}

struct AttackReport {
  std::size_t n_symbols = 0;
  double residual_var = 0.0;        // Var(Z' - X - n_E)
  double effective_snr = 0.0;       // P / E[(Z' - X)^2]
  double pre_attack_snr = 0.0;      // P / E[(Z - X)^2], still jammed
  double quantization_floor = 0.0;  // δ_E^2 / 12
};

inline AttackReport eve_storage_attack(const SimTrace& trace, const JammingStream& jamming) {
  if (jamming.size() != trace.size()) throw ValidationError("jamming stream length differs from trace");
  const auto z_prime = remove_jamming(trace.eve_recording(), jamming.symbols);

  AttackReport r;
  r.n_symbols = trace.size();
  const double power = detail::mean_square(trace.clean_signal);
  const auto error = detail::difference(z_prime, trace.clean_signal);
  r.residual_var = detail::variance(detail::difference(error, trace.eve_noise));
  r.effective_snr = detail::ratio_or_inf(power, detail::mean_square(error));
  r.pre_attack_snr =
      detail::ratio_or_inf(power, detail::mean_square(detail::difference(trace.eve_rx, trace.clean_signal)));
  r.quantization_floor = trace.eve_step * trace.eve_step / 12.0;
  return r;
}

}  // namespace jke
