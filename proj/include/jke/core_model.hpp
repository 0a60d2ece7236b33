#pragma once

// Shared domain types for the jamming key exchange laboratory: operating
// points, ADC descriptions, SNR values and key material.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace jke {

/// Raised when an operating point or configuration violates an invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a function is evaluated outside its mathematical domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Jitter-limited receiver ADC. Effective bits come from the jitter at the
/// system bandwidth unless `explicit_bits` overrides them.
struct AdcSpec {
  double aperture_jitter_s = 0.0;
  std::optional<double> explicit_bits;

  bool operator==(const AdcSpec&) const = default;
};

/// Signal-to-noise ratio in dB, or the noiseless limit.
class SnrPoint {
 public:
  static SnrPoint finite(double snr_db) { return SnrPoint(snr_db); }
  static SnrPoint infinite() { return SnrPoint(); }

  bool is_infinite() const { return !db_.has_value(); }
  /// Throws DomainError for the noiseless limit.
  double db() const {
    if (!db_) throw DomainError("infinite SNR has no finite dB value");
    return *db_;
  }

  bool operator==(const SnrPoint&) const = default;

 private:
  SnrPoint() = default;
  explicit SnrPoint(double db) : db_(db) {}
  std::optional<double> db_;
};

/// P / 10^(snr/10); zero for the noiseless limit.
inline double snr_to_noise_var(const SnrPoint& snr, double signal_power) {
  if (!(signal_power > 0.0)) throw DomainError("signal power must be positive");
  if (snr.is_infinite()) return 0.0;
  return signal_power / std::pow(10.0, snr.db() / 10.0);
}

inline SnrPoint noise_var_to_snr(double noise_var, double signal_power) {
  if (!(signal_power > 0.0)) throw DomainError("signal power must be positive");
  if (noise_var < 0.0) throw DomainError("noise variance must be non-negative");
  if (noise_var == 0.0) return SnrPoint::infinite();
  return SnrPoint::finite(10.0 * std::log10(signal_power / noise_var));
}

/// Full operating point of one exchange. Noise variances are absolute in the
/// normalized power units of `signal_power` (default 1).
struct SystemParams {
  double bandwidth_hz = 40e6;
  double signal_power = 1.0;
  int jamming_bits_per_symbol = 14;
  AdcSpec bob_adc{500e-15, std::nullopt};
  AdcSpec eve_adc{5e-15, std::nullopt};
  double bob_noise_var = 0.0;
  double eve_noise_var = 0.0;
  double dynamic_range_factor = 2.5;

  bool operator==(const SystemParams&) const = default;
};

/// Returns `params` unchanged when every invariant holds; otherwise throws
/// ValidationError naming the first violated one.
inline SystemParams validate(const SystemParams& params) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!(params.bandwidth_hz > 0.0) || !finite(params.bandwidth_hz))
    throw ValidationError("bandwidth must be positive");
  if (!(params.signal_power > 0.0) || !finite(params.signal_power))
    throw ValidationError("signal power must be positive");
  if (params.jamming_bits_per_symbol < 0)
    throw ValidationError("jamming bits per symbol must be non-negative");
  auto check_adc = [&](const AdcSpec& adc, const char* who) {
    if (!(adc.aperture_jitter_s > 0.0) || !finite(adc.aperture_jitter_s))
      throw ValidationError(std::string(who) + " aperture jitter must be positive");
    if (adc.explicit_bits && (!(*adc.explicit_bits > 0.0) || !finite(*adc.explicit_bits)))
      throw ValidationError(std::string(who) + " explicit bits must be positive");
  };
  check_adc(params.bob_adc, "bob adc");
  check_adc(params.eve_adc, "eve adc");
  if (!(params.bob_noise_var >= 0.0) || !finite(params.bob_noise_var))
    throw ValidationError("bob noise variance must be non-negative");
  if (!(params.eve_noise_var >= 0.0) || !finite(params.eve_noise_var))
    throw ValidationError("eve noise variance must be non-negative");
  if (!(params.dynamic_range_factor > 0.0) || !finite(params.dynamic_range_factor))
    throw ValidationError("dynamic range factor must be positive");
  return params;
}

/// Fixed-length secret bit string (k_AB or k_L).
class KeyMaterial {
 public:
  static constexpr std::size_t kMinBits = 128;
  static constexpr std::size_t kDefaultBits = 256;

  explicit KeyMaterial(std::vector<bool> bits) : bits_(std::move(bits)) {
    if (bits_.size() < kMinBits)
      throw ValidationError("key material must have at least 128 bits");
  }

  /// Deterministic key from a 64-bit seed, for tests and reproducible runs.
  static KeyMaterial from_seed(std::uint64_t seed, std::size_t n_bits = kDefaultBits) {
    std::mt19937_64 rng(seed);
    std::vector<bool> bits(n_bits);
    for (std::size_t i = 0; i < n_bits; ++i) {
      if (i % 64 == 0) {
        std::uint64_t word = rng();
        for (std::size_t j = i; j < std::min(n_bits, i + 64); ++j) bits[j] = (word >> (j - i)) & 1U;
      }
    }
    return KeyMaterial(std::move(bits));
  }

  std::size_t size() const { return bits_.size(); }
  bool bit(std::size_t i) const { return bits_.at(i); }
  const std::vector<bool>& bits() const { return bits_; }

  KeyMaterial with_flipped_bit(std::size_t i) const {
    auto copy = bits_;
    copy.at(i) = !copy.at(i);
    return KeyMaterial(std::move(copy));
  }

  /// Packs bits LSB-first into bytes.
  std::vector<std::uint8_t> to_bytes() const {
    std::vector<std::uint8_t> out((bits_.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i]) out[i / 8] |= static_cast<std::uint8_t>(1U << (i % 8));
    return out;
  }

  std::string to_hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string s;
    for (auto b : to_bytes()) {
      s.push_back(kDigits[b >> 4]);
      s.push_back(kDigits[b & 0xF]);
    }
    return s;
  }

  std::size_t hamming_distance(const KeyMaterial& other) const {
    if (other.size() != size()) throw ValidationError("key length mismatch");
    std::size_t d = 0;
    for (std::size_t i = 0; i < size(); ++i) d += bits_[i] != other.bits_[i];
    return d;
  }

  bool operator==(const KeyMaterial&) const = default;

 private:
  std::vector<bool> bits_;
};

}  // namespace jke
