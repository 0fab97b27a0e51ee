#include <catch_amalgamated.hpp>

#include "ssiown/crypto.hpp"

using namespace ssiown;

namespace {

KeyPair keypair_from_seed_hex(const std::string& seed_hex, const std::string& pk_hex) {
  KeyPair kp;
  auto seed = from_hex(seed_hex);
  auto pk = from_hex(pk_hex);
  std::copy(seed.begin(), seed.end(), kp.private_key.bytes.begin());
  std::copy(pk.begin(), pk.end(), kp.private_key.bytes.begin() + 32);
  std::copy(pk.begin(), pk.end(), kp.public_key.bytes.begin());
  return kp;
}

}  // namespace

TEST_CASE("ed25519 matches the published vector") {
  // second test vector of the Ed25519 RFC, cross-checked with pyca/cryptography
  auto kp = keypair_from_seed_hex(
      "4ccd089b28ff96da9db6c346ec114e0f5b8a319f35aba624da8cf6ed4fb8a6fb",
      "3d4017c3e843895a92b70aa74d1b7ebc9c982ccf2ec4968cc0cd55f12af4660c");
  const Bytes msg{0x72};
  auto sig = sign(kp.private_key, msg);
  CHECK(to_hex(sig.bytes) ==
        "92a009a9f0d4cab8720e820b5f642540a2b27b5416503f8fb3762223ebdb69da"
        "085ac1e43e15996e458f3613d0f11d8c387b2eaeb4302aeeb00d291612bb0c00");
  CHECK(verify(kp.public_key, msg, sig));
  sig.bytes[5] ^= 1;
  CHECK_FALSE(verify(kp.public_key, msg, sig));
}

TEST_CASE("sign refuses empty messages and mismatched keys") {
  Rng rng(3);
  auto kp = generate_keypair(rng);
  CHECK_THROWS_AS(sign(kp.private_key, Bytes{}), std::invalid_argument);
  auto other = generate_keypair(rng);
  std::copy(other.public_key.bytes.begin(), other.public_key.bytes.end(),
            kp.private_key.bytes.begin() + 32);
  CHECK_THROWS_AS(sign(kp.private_key, Bytes{1, 2}), CryptoError);
}

TEST_CASE("digest is 32-byte BLAKE2b") {
  // hashlib.blake2b(b"abc", digest_size=32)
  CHECK(to_hex(digest(as_view("abc"))) ==
        "bddd813c634239723171ef3fee98579b94964e3bb1cb3e427262c8c068d52319");
}

TEST_CASE("base58 uses the bitcoin alphabet and keeps leading zeros") {
  CHECK(base58_encode(as_view("Hello World!")) == "2NEpo7TZRRrLZSi2U");
  CHECK(base58_encode(Bytes{0, 0, 1}) == "112");
  CHECK(base58_encode(Bytes{}) == "");
}

TEST_CASE("rng is deterministic per seed") {
  Rng a(42), b(42), c(43);
  auto x = a.draw<32>();
  CHECK(x == b.draw<32>());
  CHECK(x != c.draw<32>());
  CHECK(a.draw<32>() != x);

  Rng r(9);
  std::array<int, 7> hist{};
  for (int i = 0; i < 7000; ++i) hist[r.uniform(7)]++;
  for (int h : hist) CHECK((h > 850 && h < 1150));
  CHECK_THROWS(r.uniform(0));
}

TEST_CASE("asymmetric encryption round trips and authenticates") {
  Rng rng(5);
  auto alice = generate_keypair(rng);
  auto mallory = generate_keypair(rng);
  const Bytes msg = to_bytes("ownership");
  auto ct = asym_encrypt(rng, alice.public_key, msg);
  CHECK(asym_decrypt(alice.private_key, ct) == msg);
  CHECK_THROWS_AS(asym_decrypt(mallory.private_key, ct), CryptoError);
  for (std::size_t i = 0; i < ct.size(); i += 7) {
    auto bad = ct;
    bad[i] ^= 0x80;
    CHECK_THROWS_AS(asym_decrypt(alice.private_key, bad), CryptoError);
  }
  CHECK_THROWS_AS(asym_decrypt(alice.private_key, Bytes(10)), CryptoError);
}

TEST_CASE("symmetric encryption round trips and authenticates") {
  Rng rng(6);
  auto key = generate_symmetric_key(rng);
  auto ct = sym_encrypt(rng, key, to_bytes("A1B2C3"));
  CHECK(sym_decrypt(key, ct) == to_bytes("A1B2C3"));
  CHECK(sym_encrypt(rng, key, to_bytes("A1B2C3")) != ct);
  ct.back() ^= 1;
  CHECK_THROWS_AS(sym_decrypt(key, ct), CryptoError);
  CHECK_THROWS_AS(sym_decrypt(generate_symmetric_key(rng), sym_encrypt(rng, key, Bytes{1})),
                  CryptoError);
}

TEST_CASE("did is derived from the key digest") {
  Rng rng(7);
  auto kp = generate_keypair(rng);
  auto did = derive_did(kp.public_key);
  auto h = digest(kp.public_key.bytes);
  CHECK(did.identifier == base58_encode(ByteView(h.data(), 16)));
  CHECK(did.to_string().rfind("did:ssiown:", 0) == 0);
  CHECK(derive_did(generate_keypair(rng).public_key).identifier != did.identifier);
}

TEST_CASE("hex helpers") {
  CHECK(to_hex(Bytes{0x00, 0xab, 0xff}) == "00abff");
  CHECK(from_hex("00ABff") == Bytes{0x00, 0xab, 0xff});
  CHECK_THROWS(from_hex("abc"));
  CHECK_THROWS(from_hex("zz"));
  CHECK(contains_bytes(Bytes{1, 2, 3, 4}, Bytes{2, 3}));
  CHECK_FALSE(contains_bytes(Bytes{1, 2, 3, 4}, Bytes{3, 2}));
}
