#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ssiown/bytes.hpp"

namespace ssiown {

class CryptoError : public std::runtime_error {
 public:
  enum class Kind { key, decrypt };
  CryptoError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Deterministic random source. Every key, nonce and ciphertext IV in the
/// library is drawn from one of these so a seed fixes a whole simulation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  void fill(std::span<std::uint8_t> out);
  std::uint64_t next_u64();
  /// Uniform in [0, bound). `bound` must be non-zero.
  std::uint64_t uniform(std::uint64_t bound);
  /// Uniform in [lo, hi].
  std::uint64_t uniform_range(std::uint64_t lo, std::uint64_t hi) {
    return lo + uniform(hi - lo + 1);
  }

  template <std::size_t N>
  ByteArray<N> draw() {
    ByteArray<N> out{};
    fill(out);
    return out;
  }

 private:
  ByteArray<32> key_{};
  std::uint64_t counter_ = 0;
};

// Ed25519 public key; the X25519 encryption key is derived from it.
struct PublicKey {
  ByteArray<32> bytes{};
  auto operator<=>(const PublicKey&) const = default;
};

struct PrivateKey {
  ByteArray<64> bytes{};
  bool operator==(const PrivateKey&) const = default;
};

struct Signature {
  ByteArray<64> bytes{};
  bool operator==(const Signature&) const = default;
};

struct SymmetricKey {
  ByteArray<32> key_bytes{};
  bool operator==(const SymmetricKey&) const = default;
};

struct Nonce {
  static constexpr std::size_t kSize = 16;
  ByteArray<kSize> value{};
  auto operator<=>(const Nonce&) const = default;
};

enum class KeyPurpose { connection, did_root };

struct KeyPair {
  PublicKey public_key;
  PrivateKey private_key;
  KeyPurpose purpose = KeyPurpose::connection;
};

KeyPair generate_keypair(Rng& rng, KeyPurpose purpose = KeyPurpose::connection);
SymmetricKey generate_symmetric_key(Rng& rng);
Nonce generate_nonce(Rng& rng);

/// Throws CryptoError(key) for an empty message or a private key whose
/// embedded public half does not match its seed.
Signature sign(const PrivateKey& key, ByteView message);
bool verify(const PublicKey& key, ByteView message, const Signature& sig);

// Hybrid: ephemeral X25519 agreement, BLAKE2b KDF, XChaCha20-Poly1305.
// Layout: ephemeral_pk(32) | nonce(24) | ciphertext+tag.
Bytes asym_encrypt(Rng& rng, const PublicKey& recipient, ByteView plaintext);
Bytes asym_decrypt(const PrivateKey& key, ByteView ciphertext);

// Layout: nonce(24) | ciphertext+tag.
Bytes sym_encrypt(Rng& rng, const SymmetricKey& key, ByteView plaintext);
Bytes sym_decrypt(const SymmetricKey& key, ByteView ciphertext);

ByteArray<32> digest(ByteView data);

std::string base58_encode(ByteView data);

struct Did {
  static constexpr std::string_view kMethod = "ssiown";

  std::string identifier;
  PublicKey verification_key;

  std::string to_string() const;
  bool operator==(const Did&) const = default;
};

/// identifier = base58(first 16 bytes of BLAKE2b-256(public key)).
Did derive_did(const PublicKey& key);

}  // namespace ssiown
