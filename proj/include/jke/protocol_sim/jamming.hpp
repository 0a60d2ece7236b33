#pragma once

// Pseudo-random jamming derived from the shared initial secret. Symbols are
// drawn from a ChaCha20 keystream keyed with BLAKE2b-256(k_AB).

#include <sodium.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "jke/core_model.hpp"

namespace jke {

namespace detail {
inline void ensure_sodium() {
  static const int rc = sodium_init();
  if (rc < 0) throw std::runtime_error("libsodium initialisation failed");
}
}  // namespace detail

inline constexpr int kMaxJammingBits = 32;

struct JammingStream {
  KeyMaterial seed;
  int bits_per_symbol = 0;
  double jam_scale = 0.0;
  std::vector<std::uint32_t> levels;  // level index in [0, 2^w)
  std::vector<double> symbols;        // mapped into [-jam_scale, +jam_scale]

  std::size_t size() const { return symbols.size(); }
};

/// Amplitude of level `index` among 2^w equally spaced levels.
inline double jamming_level_value(std::uint32_t index, int w, double jam_scale) {
  const double top = std::exp2(w) - 1.0;
  return -jam_scale + 2.0 * jam_scale * static_cast<double>(index) / top;
}

/// Raw deterministic keystream for `seed`.
inline std::vector<std::uint8_t> keystream_bytes(const KeyMaterial& seed, std::size_t n_bytes) {
  detail::ensure_sodium();
  const auto key_bytes = seed.to_bytes();
  std::array<unsigned char, randombytes_SEEDBYTES> stream_seed{};
  crypto_generichash(stream_seed.data(), stream_seed.size(), key_bytes.data(), key_bytes.size(), nullptr, 0);
  std::vector<std::uint8_t> out(n_bytes);
  randombytes_buf_deterministic(out.data(), out.size(), stream_seed.data());
  return out;
}

inline JammingStream jamming_stream(const KeyMaterial& seed, int w, std::size_t n, double jam_scale) {
  if (w > kMaxJammingBits) throw ValidationError("jamming resolution above 32 bits is unsupported");
  if (w < 1) throw ValidationError("jamming bits per symbol must be at least 1");
  if (n < 1) throw ValidationError("jamming stream length must be at least 1");
  if (!(jam_scale >= 0.0) || !std::isfinite(jam_scale)) throw ValidationError("jam scale must be non-negative");

  const auto bytes = keystream_bytes(seed, 4 * n);
  const std::uint64_t mask = (std::uint64_t{1} << w) - 1;
  JammingStream js{seed, w, jam_scale, {}, {}};
  js.levels.reserve(n);
  js.symbols.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t word = std::uint32_t{bytes[4 * i]} | (std::uint32_t{bytes[4 * i + 1]} << 8) |
                               (std::uint32_t{bytes[4 * i + 2]} << 16) | (std::uint32_t{bytes[4 * i + 3]} << 24);
    const auto level = static_cast<std::uint32_t>(word & mask);
    js.levels.push_back(level);
    js.symbols.push_back(jamming_level_value(level, w, jam_scale));
  }
  return js;
}

/// Jammer amplitude that fills Eve's widened range: level spacing 2·l·√P.
inline double default_jam_scale(const SystemParams& p) {
  return p.dynamic_range_factor * std::sqrt(p.signal_power) * (std::exp2(p.jamming_bits_per_symbol) - 1.0);
}

}  // namespace jke
