#pragma once

// Toy RSA key encapsulation for desk-scale experiments. Insecure by
// construction: small moduli, textbook exponentiation, no side-channel
// hardening. It exists so that the race model has something to factor.

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/miller_rabin.hpp>
#include <boost/random/independent_bits.hpp>
#include <boost/random/mersenne_twister.hpp>

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "jke/core_model.hpp"

namespace jke::kem {

using BigInt = boost::multiprecision::cpp_int;

class MalformedCiphertext : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PublicKey {
  BigInt modulus;
  BigInt exponent;
};

struct KeyPair {
  BigInt modulus;
  BigInt public_exponent;
  BigInt private_exponent;
  BigInt p;
  BigInt q;
  int bit_length = 0;

  PublicKey public_key() const { return {modulus, public_exponent}; }
};

/// Ciphertext blocks, each < n.
struct Ciphertext {
  std::vector<BigInt> blocks;
  std::size_t key_bits = 0;
};

inline constexpr int kMinModulusBits = 16;
inline constexpr int kMaxModulusBits = 2048;

namespace detail {

inline BigInt mod_inverse(const BigInt& a, const BigInt& m) {
  BigInt old_r = a % m, r = m;
  BigInt old_s = 1, s = 0;
  while (r != 0) {
    BigInt quot = old_r / r;
    BigInt tmp = old_r - quot * r;
    old_r = r;
    r = tmp;
    tmp = old_s - quot * s;
    old_s = s;
    s = tmp;
  }
  if (old_r != 1) throw std::invalid_argument("value not invertible");
  BigInt inv = old_s % m;
  if (inv < 0) inv += m;
  return inv;
}

inline unsigned bit_count(const BigInt& v) { return v == 0 ? 0U : static_cast<unsigned>(msb(v)) + 1U; }

inline BigInt random_prime(unsigned bits, boost::random::mt19937_64& gen) {
  boost::random::independent_bits_engine<boost::random::mt19937_64, 2048, BigInt> wide(gen());
  const BigInt top = (BigInt(1) << (bits - 1)) | (BigInt(1) << (bits - 2));
  const BigInt mask = (BigInt(1) << bits) - 1;
  for (;;) {
    BigInt candidate = (wide() & mask) | top | 1;
    if (boost::multiprecision::miller_rabin_test(candidate, 32, gen)) return candidate;
  }
}

}  // namespace detail

/// Builds a pair from given primes, e.g. the textbook p=61, q=53, e=17.
inline KeyPair make_keypair(const BigInt& p, const BigInt& q, const BigInt& e) {
  if (p == q) throw ValidationError("p and q must differ");
  const BigInt lambda = boost::multiprecision::lcm(BigInt(p - 1), BigInt(q - 1));
  if (boost::multiprecision::gcd(e, lambda) != 1) throw ValidationError("e is not coprime to lcm(p-1, q-1)");
  KeyPair kp;
  kp.p = p;
  kp.q = q;
  kp.modulus = p * q;
  kp.public_exponent = e;
  kp.private_exponent = detail::mod_inverse(e, lambda);
  kp.bit_length = static_cast<int>(detail::bit_count(kp.modulus));
  return kp;
}

/// Deterministic in `seed`. The modulus has exactly `bit_length` bits.
inline KeyPair keygen(int bit_length, std::uint64_t seed) {
  if (bit_length < kMinModulusBits || bit_length > kMaxModulusBits)
    throw ValidationError("kem modulus bit length must lie in [16, 2048]");
  boost::random::mt19937_64 gen(seed);
  const unsigned p_bits = static_cast<unsigned>(bit_length + 1) / 2;
  const unsigned q_bits = static_cast<unsigned>(bit_length) / 2;
  for (;;) {
    const BigInt p = detail::random_prime(p_bits, gen);
    const BigInt q = detail::random_prime(q_bits, gen);
    if (p == q) continue;
    const BigInt n = p * q;
    if (detail::bit_count(n) != static_cast<unsigned>(bit_length)) continue;
    const BigInt lambda = boost::multiprecision::lcm(BigInt(p - 1), BigInt(q - 1));
    BigInt e = 65537;
    if (e >= lambda) {
      e = 3;
      while (boost::multiprecision::gcd(e, lambda) != 1) e += 2;
    } else if (boost::multiprecision::gcd(e, lambda) != 1) {
      continue;
    }
    return make_keypair(p, q, e);
  }
}

inline BigInt encrypt(const PublicKey& pub, const BigInt& m) {
  if (m < 0 || m >= pub.modulus) throw ValidationError("message block out of range");
  return boost::multiprecision::powm(m, pub.exponent, pub.modulus);
}

inline BigInt decrypt(const KeyPair& kp, const BigInt& c) {
  if (c < 0 || c >= kp.modulus) throw MalformedCiphertext("ciphertext block >= modulus");
  return boost::multiprecision::powm(c, kp.private_exponent, kp.modulus);
}

/// Block layout: floor(log2 n) bits per block, the top quarter random pad.
struct BlockLayout {
  unsigned block_bits;
  unsigned pad_bits;
  unsigned payload_bits() const { return block_bits - pad_bits; }

  static BlockLayout for_modulus(const BigInt& n) {
    const unsigned block = static_cast<unsigned>(msb(n));
    return {block, block / 4};
  }
};

inline Ciphertext encapsulate(const PublicKey& pub, const KeyMaterial& key, std::uint64_t rng_seed) {
  if (key.size() == 0) throw ValidationError("cannot encapsulate an empty key");
  const auto layout = BlockLayout::for_modulus(pub.modulus);
  boost::random::mt19937_64 gen(rng_seed);
  Ciphertext ct;
  ct.key_bits = key.size();
  for (std::size_t start = 0; start < key.size(); start += layout.payload_bits()) {
    BigInt block = 0;
    const std::size_t end = std::min(key.size(), start + layout.payload_bits());
    for (std::size_t i = start; i < end; ++i)
      if (key.bit(i)) bit_set(block, static_cast<unsigned>(i - start));
    for (unsigned j = 0; j < layout.pad_bits; ++j)
      if (gen() & 1U) bit_set(block, layout.payload_bits() + j);
    ct.blocks.push_back(encrypt(pub, block));
  }
  return ct;
}

inline KeyMaterial decapsulate(const KeyPair& kp, const Ciphertext& ct) {
  const auto layout = BlockLayout::for_modulus(kp.modulus);
  const std::size_t expected = (ct.key_bits + layout.payload_bits() - 1) / layout.payload_bits();
  if (ct.key_bits == 0 || ct.blocks.size() != expected) throw MalformedCiphertext("wrong number of ciphertext blocks");
  std::vector<bool> bits(ct.key_bits);
  for (std::size_t b = 0; b < ct.blocks.size(); ++b) {
    const BigInt m = decrypt(kp, ct.blocks[b]);
    for (unsigned j = 0; j < layout.payload_bits(); ++j) {
      const std::size_t i = b * layout.payload_bits() + j;
      if (i >= bits.size()) break;
      bits[i] = bit_test(m, j);
    }
  }
  return KeyMaterial(std::move(bits));
}

/// No-op transport for pure channel experiments: the "ciphertext" is the key.
struct PassthroughKem {
  static KeyMaterial encapsulate(const KeyMaterial& key) {
    if (key.size() == 0) throw ValidationError("cannot encapsulate an empty key");
    return key;
  }
  static KeyMaterial decapsulate(const KeyMaterial& ct) { return ct; }
};

/// Brent's variant of Pollard's rho; returns a non-trivial factor of n.
/// Practical for the toy moduli only (up to roughly 80 bits).
inline BigInt pollard_rho_factor(const BigInt& n, std::uint64_t seed = 1) {
  using boost::multiprecision::gcd;
  if (n % 2 == 0) return 2;
  boost::random::mt19937_64 gen(seed);
  for (;;) {
    const BigInt c = BigInt(gen()) % (n - 1) + 1;
    BigInt y = BigInt(gen()) % n, x, ys, q = 1, g = 1;
    auto f = [&](const BigInt& v) { return (v * v + c) % n; };
    std::uint64_t r = 1;
    const std::uint64_t m = 128;
    while (g == 1) {
      x = y;
      for (std::uint64_t i = 0; i < r; ++i) y = f(y);
      std::uint64_t k = 0;
      while (k < r && g == 1) {
        ys = y;
        for (std::uint64_t i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          q = (q * (x > y ? BigInt(x - y) : BigInt(y - x))) % n;
        }
        g = gcd(q, n);
        k += m;
      }
      r *= 2;
    }
    if (g == n) {
      do {
        ys = f(ys);
        g = gcd(x > ys ? BigInt(x - ys) : BigInt(ys - x), n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

}  // namespace jke::kem
