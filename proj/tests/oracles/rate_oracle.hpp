#pragma once

// Independent route to the secrecy rate: every step (effective bits, steps,
// log terms) re-evaluated in 50-digit binary floating point, and a bisection
// search over Bob's SNR for the positive-rate threshold.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <optional>

namespace jke::oracle {

using Real = boost::multiprecision::cpp_bin_float_50;

struct OraclePoint {
  double bandwidth_hz;
  double signal_power;
  int w;
  double bob_jitter_s;
  double eve_jitter_s;
  double range_factor;
  double eve_noise_var;
};

inline Real pi() { return boost::math::constants::pi<Real>(); }
inline Real euler() { return boost::math::constants::e<Real>(); }

inline Real enob(const Real& bandwidth, const Real& jitter) {
  return -(20 * log10(2 * pi() * bandwidth * jitter) + Real("1.76")) / Real("6.02");
}

inline Real rate_at_bob_snr(const OraclePoint& p, const Real& snr_db) {
  const Real W = p.bandwidth_hz, P = p.signal_power, l = p.range_factor;
  const Real step_b = 2 * l * sqrt(P) / pow(Real(2), enob(W, Real(p.bob_jitter_s)));
  const Real step_e = 2 * l * sqrt(P) / pow(Real(2), enob(W, Real(p.eve_jitter_s)) - p.w);
  const Real sb = P / pow(Real(10), snr_db / 10);
  const Real se = p.eve_noise_var;
  const Real bob = log((P + sb + step_b * step_b / 12) / (sb + step_b * step_b / 12)) / log(Real(2));
  const Real eve = log((P + se + step_e * step_e / 12) / (se + step_e * step_e / (2 * pi() * euler()))) / log(Real(2));
  return W * (bob - eve);
}

/// Zero crossing in [lo_db, hi_db]; nullopt when the rate is never positive
/// there, lo_db when it is positive everywhere.
inline std::optional<double> bisect_min_bob_snr(const OraclePoint& p, double lo_db = -60.0, double hi_db = 400.0) {
  Real lo = lo_db, hi = hi_db;
  if (rate_at_bob_snr(p, hi) <= 0) return std::nullopt;
  if (rate_at_bob_snr(p, lo) > 0) return lo_db;
  for (int i = 0; i < 80; ++i) {
    const Real mid = (lo + hi) / 2;
    if (rate_at_bob_snr(p, mid) > 0)
      hi = mid;
    else
      lo = mid;
  }
  return static_cast<double>(hi);
}

}  // namespace jke::oracle
