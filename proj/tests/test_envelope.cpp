#include <catch_amalgamated.hpp>

#include "ssiown/envelope.hpp"

using namespace ssiown;

namespace {

struct Parties {
  Rng rng{21};
  KeyPair sender = generate_keypair(rng);
  KeyPair endpoint = generate_keypair(rng);
  KeyPair mediator = generate_keypair(rng);
  KeyPair recipient_md_key = generate_keypair(rng);
  Nonce nonce = generate_nonce(rng);
  MessagePayload payload{PinChallengeReq{Tid{}, 1234, ChallengeOp::mul}};

  Envelope seal_one() {
    return seal(rng, sender, endpoint.public_key, mediator.public_key, "did:ssiown:R", nonce,
                payload);
  }
};

}  // namespace

TEST_CASE("two-hop delivery opens at the endpoint") {
  Parties p;
  auto env = p.seal_one();
  auto routed = unseal_at_mediator(p.mediator.private_key, env);
  REQUIRE(routed.has_value());
  CHECK(routed->recipient_did == "did:ssiown:R");

  auto hop2 = wrap_for_delivery(p.rng, p.recipient_md_key.public_key, *routed);
  auto peeled = unseal_at_mediator(p.recipient_md_key.private_key, hop2);
  REQUIRE(peeled.has_value());
  CHECK(*peeled == *routed);

  auto opened = unseal_at_endpoint(p.endpoint.private_key, p.sender.public_key, peeled->inner);
  REQUIRE(opened.has_value());
  CHECK(opened->nonce == p.nonce);
  CHECK(opened->payload == p.payload);
}

TEST_CASE("the mediator cannot open the inner layer") {
  Parties p;
  auto routed = unseal_at_mediator(p.mediator.private_key, p.seal_one());
  REQUIRE(routed.has_value());
  auto attempt = unseal_at_endpoint(p.mediator.private_key, p.sender.public_key, routed->inner);
  REQUIRE_FALSE(attempt.has_value());
  CHECK(attempt.error() == Rejection::decrypt_failed);
  // payload bytes never appear in what the mediator holds
  CHECK_FALSE(contains_bytes(routed->inner, canonical_encode(p.payload)));
  CHECK_FALSE(contains_bytes(routed->inner, p.nonce.value));
}

TEST_CASE("wrong keys and flipped bytes are rejected") {
  Parties p;
  auto env = p.seal_one();
  CHECK(unseal_at_mediator(p.endpoint.private_key, env).error() == Rejection::decrypt_failed);
  for (std::size_t i = 0; i < env.ciphertext.size(); i += 11) {
    auto bad = env;
    bad.ciphertext[i] ^= 0x01;
    CHECK_FALSE(unseal_at_mediator(p.mediator.private_key, bad).has_value());
  }
  auto routed = unseal_at_mediator(p.mediator.private_key, env);
  auto inner = routed->inner;
  inner[inner.size() / 2] ^= 0x40;
  CHECK(unseal_at_endpoint(p.endpoint.private_key, p.sender.public_key, inner).error() ==
        Rejection::decrypt_failed);
  auto impostor = generate_keypair(p.rng);
  CHECK(unseal_at_endpoint(p.endpoint.private_key, impostor.public_key, routed->inner).error() ==
        Rejection::bad_signature);
}

TEST_CASE("sealing is randomized") {
  Parties p;
  CHECK(p.seal_one() != p.seal_one());
}

TEST_CASE("nonce echo: expected, consumed, replayed") {
  SessionState s;
  Nonce n1{}, n2{};
  n2.value[0] = 1;
  CHECK(validate_nonce_echo(s, n1, MessageKind::pin_resp, false) == Rejection::unexpected_nonce);
  s.expect(n1, MessageKind::pin_resp);
  CHECK(s.expects(n1, MessageKind::pin_resp));
  // same nonce, other kind is not covered
  CHECK(validate_nonce_echo(s, n1, MessageKind::pin_req, false) == Rejection::unexpected_nonce);
  CHECK_FALSE(validate_nonce_echo(s, n1, MessageKind::pin_resp, false).has_value());
  CHECK(s.consumed(n1, MessageKind::pin_resp));
  CHECK_FALSE(s.expects(n1, MessageKind::pin_resp));
  CHECK(validate_nonce_echo(s, n1, MessageKind::pin_resp, false) == Rejection::replayed_nonce);
  CHECK(validate_nonce_echo(s, n1, MessageKind::pin_resp, true) == Rejection::replayed_nonce);
  // flow openers take a fresh nonce once
  CHECK_FALSE(validate_nonce_echo(s, n2, MessageKind::pin_req, true).has_value());
  CHECK(validate_nonce_echo(s, n2, MessageKind::pin_req, true) == Rejection::replayed_nonce);
}
