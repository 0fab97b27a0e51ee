#include "ssiown/crypto.hpp"

#include <sodium.h>

#include <algorithm>
#include <cstring>

namespace ssiown {

namespace {

void ensure_sodium() {
  static const bool ready = [] { return sodium_init() >= 0; }();
  if (!ready) throw std::runtime_error("libsodium initialisation failed");
}

constexpr std::size_t kAeadNonce = crypto_aead_xchacha20poly1305_ietf_NPUBBYTES;
constexpr std::size_t kAeadTag = crypto_aead_xchacha20poly1305_ietf_ABYTES;

Bytes aead_seal(const std::uint8_t* key, const ByteArray<kAeadNonce>& nonce,
                ByteView ad, ByteView plaintext) {
  Bytes out(plaintext.size() + kAeadTag);
  unsigned long long written = 0;
  crypto_aead_xchacha20poly1305_ietf_encrypt(
      out.data(), &written, plaintext.data(), plaintext.size(), ad.data(),
      ad.size(), nullptr, nonce.data(), key);
  out.resize(written);
  return out;
}

Bytes aead_open(const std::uint8_t* key, const std::uint8_t* nonce, ByteView ad,
                ByteView ciphertext) {
  if (ciphertext.size() < kAeadTag) {
    throw CryptoError(CryptoError::Kind::decrypt, "ciphertext truncated");
  }
  Bytes out(ciphertext.size() - kAeadTag);
  unsigned long long written = 0;
  if (crypto_aead_xchacha20poly1305_ietf_decrypt(
          out.data(), &written, nullptr, ciphertext.data(), ciphertext.size(),
          ad.data(), ad.size(), nonce, key) != 0) {
    throw CryptoError(CryptoError::Kind::decrypt, "authentication failed");
  }
  out.resize(written);
  return out;
}

ByteArray<32> kdf(const ByteArray<32>& shared, const ByteArray<32>& eph_pk,
                  const ByteArray<32>& recipient_pk) {
  ByteArray<32> out{};
  crypto_generichash_state st;
  crypto_generichash_init(&st, nullptr, 0, out.size());
  crypto_generichash_update(&st, shared.data(), shared.size());
  crypto_generichash_update(&st, eph_pk.data(), eph_pk.size());
  crypto_generichash_update(&st, recipient_pk.data(), recipient_pk.size());
  crypto_generichash_final(&st, out.data(), out.size());
  return out;
}

}  // namespace

std::string to_hex(ByteView data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (auto b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.size() % 2 != 0) throw std::invalid_argument("odd-length hex string");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = nibble(hex[2 * i]);
    int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("invalid hex digit");
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

bool contains_bytes(ByteView haystack, ByteView needle) {
  if (needle.empty()) return true;
  return std::search(haystack.begin(), haystack.end(), needle.begin(),
                     needle.end()) != haystack.end();
}

Rng::Rng(std::uint64_t seed) {
  ensure_sodium();
  ByteArray<8> le{};
  for (int i = 0; i < 8; ++i) le[i] = static_cast<std::uint8_t>(seed >> (8 * i));
  crypto_generichash(key_.data(), key_.size(), le.data(), le.size(), nullptr, 0);
}

void Rng::fill(std::span<std::uint8_t> out) {
  if (out.empty()) return;
  ByteArray<crypto_stream_chacha20_ietf_NONCEBYTES> nonce{};
  for (int i = 0; i < 8; ++i) nonce[i] = static_cast<std::uint8_t>(counter_ >> (8 * i));
  ++counter_;
  crypto_stream_chacha20_ietf(out.data(), out.size(), nonce.data(), key_.data());
}

std::uint64_t Rng::next_u64() {
  auto b = draw<8>();
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{b[i]} << (8 * i);
  return v;
}

std::uint64_t Rng::uniform(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform bound must be positive");
  // Rejection sampling keeps the draw exactly uniform.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  for (;;) {
    std::uint64_t v = next_u64();
    if (v < limit) return v % bound;
  }
}

KeyPair generate_keypair(Rng& rng, KeyPurpose purpose) {
  ensure_sodium();
  auto seed = rng.draw<crypto_sign_SEEDBYTES>();
  KeyPair kp;
  kp.purpose = purpose;
  crypto_sign_seed_keypair(kp.public_key.bytes.data(), kp.private_key.bytes.data(),
                           seed.data());
  sodium_memzero(seed.data(), seed.size());
  return kp;
}

SymmetricKey generate_symmetric_key(Rng& rng) { return SymmetricKey{rng.draw<32>()}; }

Nonce generate_nonce(Rng& rng) { return Nonce{rng.draw<Nonce::kSize>()}; }

Signature sign(const PrivateKey& key, ByteView message) {
  ensure_sodium();
  if (message.empty()) throw std::invalid_argument("refusing to sign an empty message");
  ByteArray<32> pk{};
  ByteArray<64> sk{};
  crypto_sign_seed_keypair(pk.data(), sk.data(), key.bytes.data());
  if (!std::equal(pk.begin(), pk.end(), key.bytes.begin() + 32)) {
    throw CryptoError(CryptoError::Kind::key, "malformed private key");
  }
  Signature sig;
  crypto_sign_detached(sig.bytes.data(), nullptr, message.data(), message.size(),
                       key.bytes.data());
  return sig;
}

bool verify(const PublicKey& key, ByteView message, const Signature& sig) {
  ensure_sodium();
  return crypto_sign_verify_detached(sig.bytes.data(), message.data(), message.size(),
                                     key.bytes.data()) == 0;
}

Bytes asym_encrypt(Rng& rng, const PublicKey& recipient, ByteView plaintext) {
  ensure_sodium();
  ByteArray<32> recipient_x{};
  if (crypto_sign_ed25519_pk_to_curve25519(recipient_x.data(), recipient.bytes.data()) != 0) {
    throw CryptoError(CryptoError::Kind::key, "public key is not a valid point");
  }
  auto eph_seed = rng.draw<crypto_box_SEEDBYTES>();
  ByteArray<32> eph_pk{};
  ByteArray<32> eph_sk{};
  crypto_box_seed_keypair(eph_pk.data(), eph_sk.data(), eph_seed.data());
  ByteArray<32> shared{};
  if (crypto_scalarmult(shared.data(), eph_sk.data(), recipient_x.data()) != 0) {
    throw CryptoError(CryptoError::Kind::key, "degenerate key agreement");
  }
  auto key = kdf(shared, eph_pk, recipient_x);
  auto nonce = rng.draw<kAeadNonce>();
  Bytes body = aead_seal(key.data(), nonce, eph_pk, plaintext);
  sodium_memzero(eph_sk.data(), eph_sk.size());
  sodium_memzero(shared.data(), shared.size());
  sodium_memzero(key.data(), key.size());

  Bytes out;
  out.reserve(eph_pk.size() + nonce.size() + body.size());
  out.insert(out.end(), eph_pk.begin(), eph_pk.end());
  out.insert(out.end(), nonce.begin(), nonce.end());
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

Bytes asym_decrypt(const PrivateKey& key, ByteView ciphertext) {
  ensure_sodium();
  if (ciphertext.size() < 32 + kAeadNonce + kAeadTag) {
    throw CryptoError(CryptoError::Kind::decrypt, "ciphertext truncated");
  }
  ByteArray<32> own_x_sk{};
  ByteArray<32> own_x_pk{};
  crypto_sign_ed25519_sk_to_curve25519(own_x_sk.data(), key.bytes.data());
  crypto_scalarmult_base(own_x_pk.data(), own_x_sk.data());
  ByteArray<32> eph_pk{};
  std::copy_n(ciphertext.begin(), 32, eph_pk.begin());
  ByteArray<32> shared{};
  if (crypto_scalarmult(shared.data(), own_x_sk.data(), eph_pk.data()) != 0) {
    throw CryptoError(CryptoError::Kind::decrypt, "degenerate key agreement");
  }
  auto k = kdf(shared, eph_pk, own_x_pk);
  sodium_memzero(own_x_sk.data(), own_x_sk.size());
  sodium_memzero(shared.data(), shared.size());
  auto out = aead_open(k.data(), ciphertext.data() + 32, eph_pk,
                       ciphertext.subspan(32 + kAeadNonce));
  sodium_memzero(k.data(), k.size());
  return out;
}

Bytes sym_encrypt(Rng& rng, const SymmetricKey& key, ByteView plaintext) {
  ensure_sodium();
  auto nonce = rng.draw<kAeadNonce>();
  Bytes body = aead_seal(key.key_bytes.data(), nonce, {}, plaintext);
  Bytes out(nonce.begin(), nonce.end());
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

Bytes sym_decrypt(const SymmetricKey& key, ByteView ciphertext) {
  ensure_sodium();
  if (ciphertext.size() < kAeadNonce + kAeadTag) {
    throw CryptoError(CryptoError::Kind::decrypt, "ciphertext truncated");
  }
  return aead_open(key.key_bytes.data(), ciphertext.data(), {},
                   ciphertext.subspan(kAeadNonce));
}

ByteArray<32> digest(ByteView data) {
  ensure_sodium();
  ByteArray<32> out{};
  crypto_generichash(out.data(), out.size(), data.data(), data.size(), nullptr, 0);
  return out;
}

std::string base58_encode(ByteView data) {
  static constexpr char kAlphabet[] =
      "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";
  std::size_t zeros = 0;
  while (zeros < data.size() && data[zeros] == 0) ++zeros;
  // Repeated division of the big-endian number by 58.
  std::vector<std::uint8_t> digits;
  for (std::size_t i = zeros; i < data.size(); ++i) {
    int carry = data[i];
    for (auto& d : digits) {
      carry += d * 256;
      d = static_cast<std::uint8_t>(carry % 58);
      carry /= 58;
    }
    while (carry > 0) {
      digits.push_back(static_cast<std::uint8_t>(carry % 58));
      carry /= 58;
    }
  }
  std::string out(zeros, '1');
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) out.push_back(kAlphabet[*it]);
  return out;
}

std::string Did::to_string() const {
  return "did:" + std::string(kMethod) + ":" + identifier;
}

Did derive_did(const PublicKey& key) {
  auto h = digest(key.bytes);
  return Did{base58_encode(ByteView(h.data(), 16)), key};
}

}  // namespace ssiown
