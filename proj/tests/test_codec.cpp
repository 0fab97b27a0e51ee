#include <catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "ssiown/codec.hpp"
#include "ssiown/messages.hpp"

using namespace ssiown;

namespace {

std::vector<MessagePayload> one_of_each(fixtures::Issuer& mf) {
  Rng& rng = mf.rng;
  auto vc = mf.issue(fixtures::Issuer::product());
  auto holder = generate_keypair(rng);
  auto challenge = generate_nonce(rng);
  const Tid tid = Tid::generate(rng);
  return {
      {ProductSellingReq{fixtures::Issuer::product()}},
      {ProductSellingResp{AckStatus::accepted, tid}},
      {OwnershipClaimReq{tid, *Pin::parse("A1B2C3D")}},
      {OwnershipClaimResp{AckStatus::accepted, vc}},
      {OwnershipClaimAck{AckStatus::rejected}},
      {PinReq{tid}},
      {PinResp{to_bytes("ciphertext"), tid}},
      {OwnershipTransferReq{"PC-100", to_bytes("ct"), tid}},
      {OwnershipTransferResp{AckStatus::accepted}},
      {OwnershipProofReq{ProofRequest{product_attribute_names(), challenge}}},
      {OwnershipProofResp{present_proof(vc, challenge, holder)}},
      {PinChallengeReq{tid, 4321, ChallengeOp::div}},
      {PinChallengeResp{tid, Rational{7, 3}}},
      {RevokeVc{vc.credential_id, "PC-100"}},
      {RevokeVcResp{AckStatus::accepted}},
  };
}

}  // namespace

TEST_CASE("codec primitives are big-endian with length prefixes") {
  auto b = Writer().u8(1).u32(0x01020304).u64(5).str("ab").take();
  CHECK(b == Bytes{1, 1, 2, 3, 4, 0, 0, 0, 0, 0, 0, 0, 5, 0, 0, 0, 2, 'a', 'b'});
  Reader r(b);
  CHECK(r.u8() == 1);
  CHECK(r.u32() == 0x01020304u);
  CHECK(r.u64() == 5);
  CHECK(r.str() == "ab");
  CHECK(r.done());
  Reader short_read(Bytes{0, 0, 0, 9, 1});
  CHECK_THROWS_AS(short_read.bytes(), DecodeError);
}

TEST_CASE("every message kind round trips") {
  fixtures::Issuer mf;
  auto all = one_of_each(mf);
  REQUIRE(all.size() == kMessageKindCount);
  for (std::size_t i = 0; i < all.size(); ++i) {
    CAPTURE(i);
    CHECK(static_cast<std::size_t>(all[i].kind()) == i);
    auto enc = canonical_encode(all[i]);
    CHECK(decode_payload(enc) == all[i]);
    CHECK(canonical_encode(decode_payload(enc)) == enc);
  }
}

TEST_CASE("encoding layout of a small message") {
  Tid tid;
  for (std::size_t i = 0; i < 16; ++i) tid.value[i] = static_cast<std::uint8_t>(i);
  Bytes expected{1, 5};  // format version, PINReq
  expected.insert(expected.end(), tid.value.begin(), tid.value.end());
  CHECK(canonical_encode(MessagePayload{PinReq{tid}}) == expected);
}

TEST_CASE("distinct payloads encode distinctly") {
  fixtures::Issuer mf;
  auto all = one_of_each(mf);
  std::set<Bytes> seen;
  for (const auto& p : all) seen.insert(canonical_encode(p));
  // same kind, different field values
  seen.insert(canonical_encode({OwnershipClaimAck{AckStatus::accepted}}));
  seen.insert(canonical_encode({PinChallengeResp{Tid{}, Rational{-7, 3}}}));
  CHECK(seen.size() == all.size() + 2);
}

TEST_CASE("truncated, padded or corrupt input is rejected") {
  fixtures::Issuer mf;
  for (const auto& p : one_of_each(mf)) {
    auto enc = canonical_encode(p);
    for (std::size_t n = 0; n < enc.size(); ++n) {
      CHECK_THROWS_AS(decode_payload(ByteView(enc.data(), n)), DecodeError);
    }
    auto padded = enc;
    padded.push_back(0);
    CHECK_THROWS_AS(decode_payload(padded), DecodeError);
  }
  CHECK_THROWS_AS(decode_payload(Bytes{2, 5}), DecodeError);
  CHECK_THROWS_AS(decode_payload(Bytes{1, 15}), DecodeError);
  // unreduced rational
  auto enc = canonical_encode({PinChallengeResp{Tid{}, Rational{7, 3}}});
  enc[enc.size() - 1] = 6;
  enc[enc.size() - 9] = 14;
  CHECK_THROWS_AS(decode_payload(enc), DecodeError);
}

TEST_CASE("random bytes never crash the decoder") {
  Rng rng(77);
  fixtures::Issuer mf;
  auto all = one_of_each(mf);
  for (int i = 0; i < 3000; ++i) {
    auto enc = canonical_encode(all[rng.uniform(all.size())]);
    const auto flips = 1 + rng.uniform(4);
    for (std::uint64_t f = 0; f < flips; ++f) enc[rng.uniform(enc.size())] ^= rng.uniform(255) + 1;
    try {
      (void)decode_payload(enc);
    } catch (const DecodeError&) {
    } catch (const PinFormatError&) {
      FAIL("pin error leaked from decoder");
    }
  }
  SUCCEED();
}

TEST_CASE("kind names") {
  CHECK(to_string(MessageKind::pin_req) == "PINReq");
  CHECK(to_string(MessageKind::revoke_vc_resp) == "revokeVCResp");
  for (std::size_t i = 0; i < kMessageKindCount; ++i) {
    auto k = static_cast<MessageKind>(i);
    CHECK(message_kind_from_string(to_string(k)) == k);
  }
  CHECK_FALSE(message_kind_from_string("bogus").has_value());
}

TEST_CASE("signed content is nonce then payload") {
  Nonce n;
  n.value.fill(0xAA);
  MessagePayload p{OwnershipTransferResp{AckStatus::accepted}};
  auto sc = signed_content(n, p);
  auto enc = canonical_encode(p);
  REQUIRE(sc.size() == 16 + 4 + enc.size());
  CHECK(std::equal(n.value.begin(), n.value.end(), sc.begin()));
  CHECK(Bytes(sc.begin() + 20, sc.end()) == enc);
}
