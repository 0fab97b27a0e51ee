#include <catch_amalgamated.hpp>

#include <sstream>

#include "fixtures.hpp"
#include "ssiown/events.hpp"

using namespace ssiown;

TEST_CASE("did documents resolve and are self-certifying") {
  Rng rng(1);
  Registry vdr;
  auto kp = generate_keypair(rng, KeyPurpose::did_root);
  auto did = derive_did(kp.public_key);
  CHECK_FALSE(vdr.resolve_did(did.to_string()).has_value());
  vdr.publish_did(did, "MF");
  auto doc = vdr.resolve_did(did.to_string());
  REQUIRE(doc.has_value());
  CHECK(doc->verification_key == kp.public_key);
  CHECK(doc->label == "MF");

  // a DID string that does not hash from its key
  Did forged{"NotTheHash", kp.public_key};
  CHECK_THROWS_AS(vdr.publish_did(forged), RegistryError);
}

TEST_CASE("only the subject may update its did document") {
  Rng rng(2);
  Registry vdr;
  auto a = derive_did(generate_keypair(rng).public_key);
  auto b = derive_did(generate_keypair(rng).public_key);
  vdr.publish_did(a);
  vdr.publish_did(b);
  DidDocument hijack{a.to_string(), b.verification_key, "hijack"};
  try {
    vdr.publish(EntryKind::did_doc, hijack.encode(), b.to_string());
    FAIL("update by another DID was accepted");
  } catch (const RegistryError& e) {
    CHECK(e.kind() == RegistryError::Kind::authorization);
  }
}

TEST_CASE("log is append-only with contiguous ids") {
  fixtures::Issuer mf;
  const auto before = mf.vdr.entries();
  REQUIRE(before.size() == 4);  // did, schema, cred def, revocation registry
  for (std::size_t i = 0; i < before.size(); ++i) CHECK(before[i].entry_id == i + 1);
  CHECK_THROWS_AS(mf.vdr.publish(EntryKind::schema, to_bytes("x"), "did:ssiown:nobody"),
                  RegistryError);
  CHECK(mf.vdr.entries() == before);
  mf.vdr.set_clock(10);
  mf.vdr.revoke_credential(mf.did.to_string(), mf.revreg, "vc-1");
  CHECK(mf.vdr.entries().size() == 5);
  CHECK(mf.vdr.entries().back().timestamp == 10);
  CHECK(std::equal(before.begin(), before.end(), mf.vdr.entries().begin()));
}

TEST_CASE("revocation rules") {
  fixtures::Issuer mf;
  const auto issuer = mf.did.to_string();
  CHECK_FALSE(mf.vdr.is_revoked("vc-1"));
  mf.vdr.revoke_credential(issuer, mf.revreg, "vc-1");
  CHECK(mf.vdr.is_revoked("vc-1"));
  CHECK(mf.vdr.revocation_registry(mf.revreg)->revoked_ids.count("vc-1") == 1);

  auto kind_of = [&](auto&& fn) {
    try {
      fn();
    } catch (const RegistryError& e) {
      return e.kind();
    }
    FAIL("no error");
    return RegistryError::Kind::malformed;
  };
  CHECK(kind_of([&] { mf.vdr.revoke_credential(issuer, mf.revreg, "vc-1"); }) ==
        RegistryError::Kind::already_revoked);
  CHECK(kind_of([&] { mf.vdr.revoke_credential(issuer, "revreg-99", "vc-2"); }) ==
        RegistryError::Kind::not_found);

  Rng rng(3);
  auto other = derive_did(generate_keypair(rng).public_key);
  mf.vdr.publish_did(other);
  CHECK(kind_of([&] { mf.vdr.revoke_credential(other.to_string(), mf.revreg, "vc-2"); }) ==
        RegistryError::Kind::authorization);
  CHECK_FALSE(mf.vdr.is_revoked("vc-2"));
}

TEST_CASE("replaying the log reproduces the registry") {
  fixtures::Issuer mf;
  mf.vdr.set_clock(4);
  mf.vdr.revoke_credential(mf.did.to_string(), mf.revreg, "vc-9");
  auto copy = Registry::replay(mf.vdr.entries());
  CHECK(copy == mf.vdr);

  std::stringstream ss;
  mf.vdr.write_ndjson(ss);
  auto parsed = Registry::read_ndjson(ss);
  CHECK(parsed == mf.vdr);
  CHECK(parsed.is_revoked("vc-9"));

  // reordering breaks contiguity
  auto log = mf.vdr.entries();
  std::swap(log[1], log[2]);
  CHECK_THROWS_AS(Registry::replay(log), RegistryError);
}

TEST_CASE("ndjson lines carry the documented fields") {
  fixtures::Issuer mf;
  std::stringstream ss;
  mf.vdr.write_ndjson(ss);
  std::string line;
  std::getline(ss, line);
  auto j = ssiown::Json::parse(line);
  CHECK(j["entry_id"] == 1);
  CHECK(j["kind"] == "did-doc");
  CHECK(j["author_did"] == mf.did.to_string());
  CHECK(j.contains("timestamp"));
  CHECK(j.contains("payload"));
}
