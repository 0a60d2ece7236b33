#pragma once

// Temporal race between the jamming exchange and an attacker recovering the
// initial secret, plus the exponential ADC jitter trend that decides when a
// given eavesdropper ADC becomes plausible.

#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "jke/core_model.hpp"
#include "jke/protocol_sim/kem.hpp"

namespace jke {

inline constexpr double kSecondsPerYear = 365.25 * 24.0 * 3600.0;

/// Time an attacker needs to recover k_AB. Either a fixed wall time, a
/// compute effort in core-years (resolved with a core count), or unknown.
struct AttackerTimeModel {
  std::string name;
  std::optional<double> t_qc_s;
  std::optional<double> core_years;
  std::string provenance;

  bool known() const { return t_qc_s.has_value(); }

  /// Linear division of the effort across cores; a simplification, since
  /// number field sieve stages do not parallelize uniformly.
  AttackerTimeModel with_cores(double cores) const {
    if (!core_years) throw ValidationError("attacker " + name + " has no core-year effort");
    if (!(cores > 0.0)) throw ValidationError("core count must be positive");
    AttackerTimeModel m = *this;
    m.t_qc_s = *core_years * kSecondsPerYear / cores;
    return m;
  }
};

enum class Verdict { kEverlasting, kBroken, kUnknown };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kEverlasting: return "everlasting";
    case Verdict::kBroken: return "broken";
    case Verdict::kUnknown: return "unknown";
  }
  return "?";
}

struct RaceScenario {
  double t_j_s = 0.0;
  AttackerTimeModel attacker;
  Verdict verdict = Verdict::kUnknown;
};

/// Everlasting only when t_j < t_QC strictly; a tie is broken.
inline RaceScenario race_verdict(double t_j_s, const AttackerTimeModel& attacker) {
  if (!(t_j_s > 0.0)) throw DomainError("exchange duration must be positive");
  RaceScenario r{t_j_s, attacker, Verdict::kUnknown};
  if (attacker.known()) r.verdict = t_j_s < *attacker.t_qc_s ? Verdict::kEverlasting : Verdict::kBroken;
  return r;
}

inline AttackerTimeModel quantum_rsa2048_preset() {
  return {"quantum-rsa2048-8h", 8.0 * 3600.0, std::nullopt,
          "Gidney & Ekera 2021, How to factor 2048 bit RSA integers in 8 hours using 20 million noisy qubits"};
}

inline AttackerTimeModel classical_effort_preset() {
  return {"classical-rsa829", std::nullopt, 2700.0,
          "Boudot et al. 2022, The state of the art in integer factoring and breaking public-key cryptography "
          "(RSA-250, 829 bit, 2700 core-years)"};
}

inline AttackerTimeModel unknown_attacker() {
  return {"unknown", std::nullopt, std::nullopt, "no estimate available"};
}

/// Wall time of a real factorization of a toy modulus on this machine.
inline AttackerTimeModel measured_factoring_attacker(const kem::KeyPair& kp) {
  const auto start = std::chrono::steady_clock::now();
  const kem::BigInt factor = kem::pollard_rho_factor(kp.modulus);
  const auto stop = std::chrono::steady_clock::now();
  if (factor != kp.p && factor != kp.q) throw std::logic_error("factorization returned a wrong factor");
  const double seconds = std::chrono::duration<double>(stop - start).count();
  return {"toy-factoring-" + std::to_string(kp.bit_length), std::max(seconds, 1e-9), std::nullopt,
          "measured Pollard rho factorization of the toy KEM modulus"};
}

/// Constant-doubling model of ADC bandwidth-resolution performance.
struct JitterTrend {
  std::string name;
  int reference_year = 2024;
  double reference_jitter_s = 50e-15;
  double doubling_period_years = 4.57;
  std::string provenance;

  void check() const {
    if (!(doubling_period_years > 0.0)) throw ValidationError("doubling period must be positive");
    if (!(reference_jitter_s > 0.0)) throw ValidationError("reference jitter must be positive");
  }
};

inline constexpr const char* kTrendCaveat =
    "pure exponential extrapolation; aperture jitter progress is expected to saturate, limited by clock purity";

inline JitterTrend adc_trend_2005_2024() {
  return {"adc-2005-2024", 2024, 50e-15, 4.57, "Murmann ADC performance survey, VLSI/ISSCC 2005-2024"};
}

inline JitterTrend adc_trend_2010_2024() {
  return {"adc-2010-2024", 2024, 50e-15, 8.34, "Murmann ADC performance survey, VLSI/ISSCC 2010-2024"};
}

inline double project_jitter(const JitterTrend& trend, double year) {
  trend.check();
  if (year < trend.reference_year) throw DomainError("projection year precedes the trend reference year");
  return trend.reference_jitter_s * std::exp2(-(year - trend.reference_year) / trend.doubling_period_years);
}

inline double year_for_jitter(const JitterTrend& trend, double target_jitter_s) {
  trend.check();
  if (!(target_jitter_s > 0.0) || !(target_jitter_s < trend.reference_jitter_s))
    throw DomainError("target jitter must be positive and below the reference jitter");
  return trend.reference_year + trend.doubling_period_years * std::log2(trend.reference_jitter_s / target_jitter_s);
}

/// Named attackers and trends; the shipped JSON registry mirrors this.
struct PresetRegistry {
  std::vector<AttackerTimeModel> attackers;
  std::vector<JitterTrend> trends;

  static PresetRegistry builtin() {
    return {{quantum_rsa2048_preset(), classical_effort_preset(), unknown_attacker()},
            {adc_trend_2005_2024(), adc_trend_2010_2024()}};
  }

  const AttackerTimeModel& attacker(const std::string& name) const {
    for (const auto& a : attackers)
      if (a.name == name) return a;
    throw ValidationError("unknown attacker preset: " + name);
  }

  const JitterTrend& trend(const std::string& name) const {
    for (const auto& t : trends)
      if (t.name == name) return t;
    throw ValidationError("unknown trend preset: " + name);
  }
};

}  // namespace jke
