#pragma once

// Jitter-limited ADC abstraction: effective bits from aperture jitter,
// quantization step sizes for the legitimate receiver and the eavesdropper,
// and a sample-level uniform mid-rise quantizer.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "jke/core_model.hpp"

namespace jke {

/// Effective number of bits of an ADC limited by rms aperture jitter at the
/// given signal bandwidth. Fractional; never rounded.
inline double enob_from_jitter(double bandwidth_hz, double aperture_jitter_s) {
  if (!(bandwidth_hz > 0.0) || !(aperture_jitter_s > 0.0))
    throw DomainError("enob requires positive bandwidth and aperture jitter");
  const double jitter_snr_db = 20.0 * std::log10(2.0 * std::numbers::pi * bandwidth_hz * aperture_jitter_s);
  return -(jitter_snr_db + 1.76) / 6.02;
}

/// Amplitude resolution of one receiver at the system bandwidth.
inline double effective_bits(const AdcSpec& adc, double bandwidth_hz) {
  if (adc.explicit_bits) return *adc.explicit_bits;
  return enob_from_jitter(bandwidth_hz, adc.aperture_jitter_s);
}

/// Bob's step 2·l·√P / 2^b over his optimal dynamic range.
inline double bob_resolution(double signal_power, double bob_bits, double range_factor) {
  if (!(signal_power > 0.0) || !(range_factor > 0.0))
    throw DomainError("bob resolution requires positive power and range factor");
  return 2.0 * range_factor * std::sqrt(signal_power) / std::exp2(bob_bits);
}

/// Eve's step: her dynamic range must also span the w-bit jammer, which
/// costs w bits of resolution. b_E - w may be non-positive.
inline double eve_resolution(double signal_power, double eve_bits, int jamming_bits, double range_factor) {
  if (!(signal_power > 0.0) || !(range_factor > 0.0))
    throw DomainError("eve resolution requires positive power and range factor");
  if (jamming_bits < 0) throw DomainError("jamming bits must be non-negative");
  return 2.0 * range_factor * std::sqrt(signal_power) / std::exp2(eve_bits - jamming_bits);
}

/// Uniform quantizer with step = 2·full_scale / 2^bits.
class QuantizerConfig {
 public:
  QuantizerConfig(double full_scale, double bits) : full_scale_(full_scale), bits_(bits) {
    if (!(full_scale > 0.0) || !std::isfinite(full_scale))
      throw ValidationError("quantizer full scale must be positive");
    if (!(bits > 0.0) || !std::isfinite(bits)) throw ValidationError("quantizer bits must be positive");
    step_ = 2.0 * full_scale / std::exp2(bits);
    if (!(step_ > 0.0)) throw ValidationError("quantizer step underflows to zero");
    outermost_ = step_ * (std::max(std::ceil(full_scale_ / step_), 1.0) - 0.5);
  }

  double step() const { return step_; }
  double full_scale() const { return full_scale_; }
  double bits() const { return bits_; }
  /// Largest reconstruction level magnitude; inputs beyond clip here.
  double outermost_level() const { return outermost_; }

  double quantize(double x) const {
    const double level = step_ * (std::floor(x / step_) + 0.5);
    return std::clamp(level, -outermost_, outermost_);
  }

 private:
  double full_scale_;
  double bits_;
  double step_;
  double outermost_;
};

inline std::vector<double> quantize(std::span<const double> samples, const QuantizerConfig& config) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (double x : samples) out.push_back(config.quantize(x));
  return out;
}

/// Bob quantizes the de-jammed signal over ±l·√P.
inline QuantizerConfig bob_quantizer(const SystemParams& p) {
  return QuantizerConfig(p.dynamic_range_factor * std::sqrt(p.signal_power),
                         effective_bits(p.bob_adc, p.bandwidth_hz));
}

/// Eve quantizes signal plus jamming over ±l·√P·2^w with all her bits, which
/// yields the step of eve_resolution().
inline QuantizerConfig eve_quantizer(const SystemParams& p) {
  return QuantizerConfig(
      p.dynamic_range_factor * std::sqrt(p.signal_power) * std::exp2(p.jamming_bits_per_symbol),
      effective_bits(p.eve_adc, p.bandwidth_hz));
}

}  // namespace jke
