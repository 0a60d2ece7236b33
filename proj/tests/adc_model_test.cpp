#include "jke/adc_model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles/reference_values.hpp"

namespace jke {
namespace {

const double kBitPerDoubling = 20.0 * std::log10(2.0) / 6.02;

TEST(Enob, MatchesArbitraryPrecisionEvaluation) {
  EXPECT_NEAR(enob_from_jitter(40e6, 5e-15), oracle::kEnob40MHz5fs, 1e-12);
  EXPECT_NEAR(enob_from_jitter(40e6, 50e-15), oracle::kEnob40MHz50fs, 1e-12);
  EXPECT_NEAR(enob_from_jitter(40e6, 500e-15), oracle::kEnob40MHz500fs, 1e-12);
  EXPECT_NEAR(enob_from_jitter(40e6, 5e-15), 19.31, 0.005);
  EXPECT_NEAR(enob_from_jitter(40e6, 500e-15), 12.67, 0.005);
}

TEST(Enob, DoublingJitterCostsOneBit) {
  const double diff = enob_from_jitter(40e6, 5e-15) - enob_from_jitter(40e6, 1e-14);
  EXPECT_NEAR(diff, 1.0001, 1e-4);
  EXPECT_NEAR(enob_from_jitter(40e6, 1e-14), oracle::kEnob40MHz10fs, 1e-12);
}

TEST(Enob, DomainErrors) {
  EXPECT_THROW(enob_from_jitter(0.0, 5e-15), DomainError);
  EXPECT_THROW(enob_from_jitter(40e6, -1.0), DomainError);
}

TEST(Enob, MonotoneAndExactBitPerDoublingProperty) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> logw(3.0, 10.0), logt(-16.0, -10.0);
  for (int i = 0; i < 5000; ++i) {
    const double w = std::pow(10.0, logw(rng)), t = std::pow(10.0, logt(rng));
    EXPECT_LT(enob_from_jitter(w * 1.01, t), enob_from_jitter(w, t));
    EXPECT_LT(enob_from_jitter(w, t * 1.01), enob_from_jitter(w, t));
    EXPECT_LT(std::abs(enob_from_jitter(w, 2 * t) - enob_from_jitter(w, t) + kBitPerDoubling), 1e-9);
  }
}

TEST(EffectiveBits, ExplicitOverride) {
  EXPECT_EQ(effective_bits(AdcSpec{5e-15, 10.5}, 40e6), 10.5);
  EXPECT_EQ(effective_bits(AdcSpec{5e-15, std::nullopt}, 40e6), enob_from_jitter(40e6, 5e-15));
}

TEST(BobResolution, Examples) {
  EXPECT_DOUBLE_EQ(bob_resolution(1.0, 0.0, 2.5), 5.0);
  EXPECT_NEAR(bob_resolution(1.0, 12.67, 2.5), oracle::kBobResolution12p67, 1e-15);
  EXPECT_DOUBLE_EQ(bob_resolution(4.0, 1.0, 2.5), 5.0);
}

TEST(EveResolution, Examples) {
  EXPECT_NEAR(eve_resolution(1.0, 19.31, 14, 2.5), oracle::kEveResolution19p31w14, 1e-14);
  EXPECT_NEAR(eve_resolution(1.0, 19.31, 14, 2.5), 0.126, 5e-4);
  EXPECT_EQ(eve_resolution(1.0, 10.0, 0, 2.5), bob_resolution(1.0, 10.0, 2.5));
  EXPECT_DOUBLE_EQ(eve_resolution(1.0, 14.0, 14, 2.5), 5.0);
  // Non-positive b_E - w is legal and coarser than the whole signal range.
  EXPECT_GT(eve_resolution(1.0, 10.0, 14, 2.5), 5.0);
}

TEST(EveResolution, ZeroJammingCollapsesToBobProperty) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> p(0.01, 100.0), b(0.0, 30.0), l(0.1, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const double pp = p(rng), bb = b(rng), ll = l(rng);
    EXPECT_EQ(eve_resolution(pp, bb, 0, ll), bob_resolution(pp, bb, ll));
  }
}

TEST(QuantizerConfig, StepInvariant) {
  const QuantizerConfig q(2.5, 4.0);
  EXPECT_DOUBLE_EQ(q.step(), 2.0 * 2.5 / 16.0);
  EXPECT_DOUBLE_EQ(q.outermost_level(), 2.5 - q.step() / 2.0);
  EXPECT_THROW(QuantizerConfig(0.0, 4.0), ValidationError);
  EXPECT_THROW(QuantizerConfig(1.0, 0.0), ValidationError);
}

TEST(Quantize, ReconstructionLevelIsFixedPoint) {
  const QuantizerConfig q(2.5, 4.0);
  for (int k = -8; k < 8; ++k) {
    const double level = q.step() * (k + 0.5);
    EXPECT_EQ(q.quantize(level), level);
  }
}

TEST(Quantize, ClipsToOutermostLevel) {
  const QuantizerConfig q(2.5, 4.0);
  EXPECT_EQ(q.quantize(2.0 * q.full_scale()), q.outermost_level());
  EXPECT_EQ(q.quantize(-2.0 * q.full_scale()), -q.outermost_level());
}

TEST(Quantize, EmptyInput) { EXPECT_TRUE(quantize({}, QuantizerConfig(1.0, 3.0)).empty()); }

TEST(Quantize, ErrorBoundedByHalfStepProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> bits(0.5, 24.0), fs(0.01, 100.0), u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const QuantizerConfig q(fs(rng), bits(rng));
    for (int j = 0; j < 200; ++j) {
      const double x = u(rng) * q.full_scale();
      EXPECT_LE(std::abs(q.quantize(x) - x), q.step() / 2.0 * (1.0 + 1e-12)) << q.bits();
    }
  }
}

TEST(Quantize, UniformErrorVarianceMonteCarlo) {
  // 10^6 samples spread uniformly over one step; error variance -> δ²/12.
  const QuantizerConfig q(2.5, 8.0);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, q.step());
  std::vector<double> x(1'000'000);
  for (auto& v : x) v = 0.3 * q.full_scale() + u(rng);
  const auto y = quantize(x, q);
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += (y[i] - x[i]) * (y[i] - x[i]);
  const double var = acc / static_cast<double>(x.size());
  EXPECT_NEAR(var / (q.step() * q.step() / 12.0), 1.0, 0.02);
}

TEST(Quantizers, BobAndEveStepsMatchResolutions) {
  SystemParams p;
  const auto bob = bob_quantizer(p);
  const auto eve = eve_quantizer(p);
  EXPECT_NEAR(bob.step(), oracle::kOperatingDeltaB, 1e-15);
  EXPECT_NEAR(eve.step(), oracle::kOperatingDeltaE, 1e-13);
  EXPECT_DOUBLE_EQ(eve.full_scale(), 2.5 * 16384.0);
}

}  // namespace
}  // namespace jke
