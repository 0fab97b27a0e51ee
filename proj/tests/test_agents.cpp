#include <catch_amalgamated.hpp>

#include "ssiown/adversary.hpp"
#include "world_helpers.hpp"

using namespace ssiown;
using namespace helpers;

namespace {

const HeldCredential* newest(const Wallet& w) {
  return w.credentials().empty() ? nullptr : &w.credentials().back();
}

VerificationReport verify_held(World& w, const std::string& who) {
  auto& wallet = w.wallet(who);
  const auto* held = newest(wallet);
  REQUIRE(held);
  auto nonce = generate_nonce(w.rng());
  return verify_presentation(
      present_proof(held->vc, nonce, wallet.connection(held->conn_id)->local), nonce, w.vdr());
}

}  // namespace

TEST_CASE("manufacturer publishes its identity and catalog") {
  World w;
  cast(w);
  const auto& mf = w.manufacturer("MF");
  CHECK(w.vdr().resolve_did(mf.did().to_string()).has_value());
  CHECK(resolve_cred_def(w.vdr(), mf.cred_def().cred_def_id) == mf.cred_def());
  REQUIRE(mf.products().size() == 2);
  CHECK(mf.product("PC-100")->status == ProductStatus::registered);
  CHECK(mf.product("nope") == nullptr);
}

TEST_CASE("distributor sale: accepted once, then refused") {
  World w;
  cast(w);
  auto& ds = w.distributor("DS");
  auto ok = ds.record_sale("PC-100", "b1@example.com");
  auto unknown = ds.record_sale("PC-999", "b1@example.com");
  auto no_mail = ds.record_sale("PC-200", "");
  w.run_until_quiescent();
  CHECK(ds.sale(ok)->status == FlowStatus::accepted);
  CHECK(ds.sale(ok)->tid.has_value());
  CHECK(ds.sale(unknown)->status == FlowStatus::rejected);
  CHECK(ds.sale(no_mail)->status == FlowStatus::rejected);
  auto again = ds.record_sale("PC-100", "b2@example.com");
  w.run_until_quiescent();
  CHECK(ds.sale(again)->status == FlowStatus::rejected);

  // buyer got both halves, paired by the flow nonce
  auto mail = w.wallet("B1").emailed_claim();
  REQUIRE(mail);
  CHECK(mail->first == *ds.sale(ok)->tid);
  CHECK(w.wallet("B2").inbox().empty());
}

TEST_CASE("new-product claim issues a credential bound to the connection") {
  World w(WorldOptions{2});
  cast(w);
  auto flow = purchase(w, "B1");
  auto& b1 = w.wallet("B1");
  REQUIRE(b1.flow(flow)->status == FlowStatus::accepted);
  const auto* p = w.manufacturer("MF").product("PC-100");
  CHECK(p->status == ProductStatus::sold);
  CHECK(p->previously_sold_count == 0);
  CHECK(p->email == "b1@example.com");
  CHECK(p->conn_id == w.agent("MF")->connection_to("B1")->conn_id);
  REQUIRE(b1.credentials().size() == 1);
  const auto& vc = b1.credentials()[0].vc;
  CHECK(vc.credential_id == p->current_credential_id);
  CHECK(vc.attribute("ConnID") == p->conn_id);
  CHECK(verify_held(w, "B1").valid);
  CHECK(w.manufacturer("MF").claimants().empty());
}

TEST_CASE("wrong PIN or TID gets no credential") {
  World w(WorldOptions{3});
  cast(w);
  w.distributor("DS").record_sale("PC-100", "b1@example.com");
  w.run_until_quiescent();
  w.connect("MF", "B1");
  auto& b1 = w.wallet("B1");
  auto mail = *b1.emailed_claim();
  const auto conn = b1.connection_to("MF")->conn_id;
  std::string wrong = mail.second.str();
  wrong[0] = wrong[0] == 'A' ? 'B' : 'A';
  auto f1 = b1.claim_new(conn, mail.first, *Pin::parse(wrong));
  auto f2 = b1.claim_new(conn, Tid{}, mail.second);
  w.run_until_quiescent();
  CHECK(b1.flow(f1)->status == FlowStatus::rejected);
  CHECK(b1.flow(f2)->status == FlowStatus::rejected);
  CHECK(b1.credentials().empty());
  CHECK(w.manufacturer("MF").product("PC-100")->status == ProductStatus::registered);
  // the right values still work afterwards
  auto f3 = b1.claim_new(conn, mail.first, mail.second);
  w.run_until_quiescent();
  CHECK(b1.flow(f3)->status == FlowStatus::accepted);
}

TEST_CASE("resale moves ownership and revokes the old credential") {
  World w(WorldOptions{4});
  cast(w);
  purchase(w, "B1");
  const auto old_id = *w.manufacturer("MF").product("PC-100")->current_credential_id;
  auto flow = resale(w, "B1", "B2");
  CHECK(w.wallet("B2").flow(flow)->status == FlowStatus::accepted);

  const auto* p = w.manufacturer("MF").product("PC-100");
  CHECK(p->status == ProductStatus::sold);
  CHECK(p->previously_sold_count == 1);
  CHECK(p->email == "b2@example.com");
  CHECK(p->conn_id == w.agent("MF")->connection_to("B2")->conn_id);
  CHECK(w.vdr().is_revoked(old_id));
  auto seller = verify_held(w, "B1");
  CHECK_FALSE(seller.valid);
  CHECK(seller.has(VerificationFailure::revoked));
  CHECK(verify_held(w, "B2").valid);
  CHECK(w.wallet("B1").credentials().back().revocation_notified);
  CHECK(w.manufacturer("MF").claimants().empty());
  CHECK(w.manufacturer("MF").revocation_notices().empty());

  // the seller only ever saw ciphertext
  for (const auto& d : w.wallet("B1").claiming_data()) {
    if (d.role != ClaimRole::selling) continue;
    CHECK_FALSE(d.pin.has_value());
    CHECK_FALSE(d.key.has_value());
    CHECK(d.encrypted_pin.has_value());
  }
}

TEST_CASE("a product can change hands repeatedly") {
  World w(WorldOptions{5});
  cast(w);
  w.add_wallet("B3", "b3@example.com");
  purchase(w, "B1");
  resale(w, "B1", "B2");
  resale(w, "B2", "B3");
  const auto* p = w.manufacturer("MF").product("PC-100");
  CHECK(p->previously_sold_count == 2);
  CHECK(verify_held(w, "B3").valid);
  CHECK_FALSE(verify_held(w, "B2").valid);
  CHECK(w.manufacturer("MF").issued().size() == 3);
}

TEST_CASE("transfer needs the seller's PIN ciphertext and a live credential") {
  World w(WorldOptions{6});
  cast(w);
  purchase(w, "B1");
  w.connect("MF", "B2");
  auto& b2 = w.wallet("B2");
  CHECK_THROWS(b2.transfer(b2.connection_to("MF")->conn_id, "PC-100", Tid{}));

  // a seller whose credential is gone cannot resell
  resale(w, "B1", "B2");
  w.add_wallet("B3", "b3@example.com");
  w.connect("B1", "B3");
  auto& b1 = w.wallet("B1");
  b1.sell(b1.connection_to("B3")->conn_id);
  w.run_until_quiescent();
  const OwnershipClaimingData* sale = nullptr;
  for (const auto& d : b1.claiming_data()) {
    if (d.role == ClaimRole::selling && d.encrypted_pin) sale = &d;
  }
  REQUIRE(sale);
  auto flow = b1.transfer(b1.connection_to("MF")->conn_id, "PC-100", sale->tid);
  w.run_until_quiescent();
  CHECK(b1.flow(flow)->status == FlowStatus::rejected);
  CHECK(w.manufacturer("MF").product("PC-100")->status == ProductStatus::sold);
  CHECK(w.manufacturer("MF").claimants().empty());
}

TEST_CASE("used claim without an authorized transfer is refused") {
  World w(WorldOptions{7});
  cast(w);
  purchase(w, "B1");
  w.connect("B1", "B2");
  auto& b1 = w.wallet("B1");
  b1.sell(b1.connection_to("B2")->conn_id);
  w.run_until_quiescent();
  w.connect("MF", "B2");
  auto& b2 = w.wallet("B2");
  const auto tid = b2.claiming_data().back().tid;
  auto flow = b2.claim_used(b2.connection_to("MF")->conn_id, tid);
  w.run_until_quiescent();
  CHECK(b2.flow(flow)->status == FlowStatus::rejected);
  CHECK(w.manufacturer("MF").product("PC-100")->previously_sold_count == 0);
}

TEST_CASE("wrong PIN at the challenge rolls the transfer back") {
  World w(WorldOptions{8});
  cast(w);
  w.add_adversary("EVE", "eve@example.com");
  purchase(w, "B1");
  w.connect("B1", "B2");
  auto& b1 = w.wallet("B1");
  b1.sell(b1.connection_to("B2")->conn_id);
  w.run_until_quiescent();
  const auto& sale = b1.claiming_data().back();
  b1.transfer(b1.connection_to("MF")->conn_id, "PC-100", sale.tid);
  w.run_until_quiescent();
  REQUIRE(w.manufacturer("MF").claimants().size() == 1);
  CHECK(w.manufacturer("MF").claimants()[0].authorized);
  CHECK(w.manufacturer("MF").product("PC-100")->status == ProductStatus::transfer_pending);

  // EVE learned the TID and races the buyer with a guessed PIN
  w.connect("MF", "EVE");
  auto& eve = w.adversary("EVE");
  auto guess = eve.claim_with_guess(eve.connection_to("MF")->conn_id, sale.tid,
                                    *Pin::parse("AAAAAA"));
  w.run_until_quiescent();
  CHECK(eve.flow(guess)->status == FlowStatus::rejected);
  CHECK(eve.credentials().empty());
  const auto* p = w.manufacturer("MF").product("PC-100");
  CHECK(p->status == ProductStatus::sold);
  CHECK(p->previously_sold_count == 0);
  CHECK(w.manufacturer("MF").claimants().empty());
  CHECK(verify_held(w, "B1").valid);
}

TEST_CASE("a second used claim for the same TID is refused") {
  World w(WorldOptions{9});
  cast(w);
  purchase(w, "B1");
  w.connect("B1", "B2");
  auto& b1 = w.wallet("B1");
  b1.sell(b1.connection_to("B2")->conn_id);
  w.run_until_quiescent();
  const auto tid = b1.claiming_data().back().tid;
  b1.transfer(b1.connection_to("MF")->conn_id, "PC-100", tid);
  w.run_until_quiescent();
  w.connect("MF", "B2");
  auto& b2 = w.wallet("B2");
  b2.set_auto_share_pin(true);
  auto first = b2.claim_used(b2.connection_to("MF")->conn_id, tid);
  auto second = b2.claim_used(b2.connection_to("MF")->conn_id, tid);
  w.run_until_quiescent();
  CHECK(b2.flow(first)->status == FlowStatus::accepted);
  CHECK(b2.flow(second)->status == FlowStatus::rejected);
  CHECK(w.manufacturer("MF").product("PC-100")->previously_sold_count == 1);
}

TEST_CASE("challenge acceptance decrypts and recomputes") {
  Rng rng(10);
  auto key = generate_symmetric_key(rng);
  auto pin = *Pin::parse("Q7Z0K2");
  auto ct = sym_encrypt(rng, key, to_bytes(pin.str()));
  auto answer = evaluate_challenge(pin_numeric(pin.str()), 777, ChallengeOp::div);
  CHECK(challenge_accepts(ct, key, 777, ChallengeOp::div, answer));
  CHECK_FALSE(challenge_accepts(ct, key, 778, ChallengeOp::div, answer));
  CHECK_FALSE(challenge_accepts(ct, generate_symmetric_key(rng), 777, ChallengeOp::div, answer));
  auto bad = ct;
  bad[3] ^= 1;
  CHECK_FALSE(challenge_accepts(bad, key, 777, ChallengeOp::div, answer));
  CHECK_FALSE(challenge_accepts(sym_encrypt(rng, key, to_bytes("bad pin!")), key, 777,
                                ChallengeOp::div, answer));
}

TEST_CASE("agent dumps never contain private keys") {
  World w(WorldOptions{11});
  cast(w);
  purchase(w, "B1");
  resale(w, "B1", "B2");
  for (const auto& id : w.agent_ids()) {
    const auto dump = w.agent(id)->dump().dump();
    for (const auto& [cid, c] : w.agent(id)->connections()) {
      CHECK(dump.find(to_hex(c.local.private_key.bytes)) == std::string::npos);
      CHECK(dump.find(to_hex(ByteView(c.local.private_key.bytes.data(), 32))) ==
            std::string::npos);
    }
    CHECK(dump.find(to_hex(w.agent(id)->mediator_facing_keys().private_key.bytes)) ==
          std::string::npos);
  }
}

TEST_CASE("each connection gets fresh keys and a DID") {
  World w(WorldOptions{12});
  cast(w);
  auto [a1, b1] = w.connect("MF", "B1");
  auto [a2, b2] = w.connect("MF", "B1");
  CHECK(a1 != a2);
  auto* c1 = w.agent("MF")->connection(a1);
  auto* c2 = w.agent("MF")->connection(a2);
  CHECK(c1->local.public_key != c2->local.public_key);
  CHECK(c1->local_did != c2->local_did);
  CHECK(c1->remote_did == w.agent("B1")->connection(b1)->local_did);
  CHECK(c1->local_did == derive_did(c1->local.public_key).to_string());
  CHECK(w.agent("B1")->connection_to("MF")->conn_id == b2);
}
