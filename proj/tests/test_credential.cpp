#include <catch_amalgamated.hpp>

#include "fixtures.hpp"

using namespace ssiown;
using fixtures::Issuer;

namespace {

// Hand-rolled length-prefixed encoding, kept separate from the codec.
void put_str(Bytes& b, const std::string& s) {
  const auto n = static_cast<std::uint32_t>(s.size());
  for (int sh = 24; sh >= 0; sh -= 8) b.push_back(static_cast<std::uint8_t>(n >> sh));
  b.insert(b.end(), s.begin(), s.end());
}

std::string oracle_credential_id(const std::string& def, const AttributeList& attrs,
                                 std::uint64_t at) {
  Bytes b;
  put_str(b, def);
  const auto n = static_cast<std::uint32_t>(attrs.size());
  for (int sh = 24; sh >= 0; sh -= 8) b.push_back(static_cast<std::uint8_t>(n >> sh));
  for (const auto& [k, v] : attrs) {
    put_str(b, k);
    put_str(b, v);
  }
  for (int sh = 56; sh >= 0; sh -= 8) b.push_back(static_cast<std::uint8_t>(at >> sh));
  auto h = digest(b);
  return "vc-" + to_hex(ByteView(h.data(), 16));
}

}  // namespace

TEST_CASE("schema lists the eight product attributes") {
  Issuer mf;
  auto s = resolve_schema(mf.vdr, mf.schema.schema_id);
  REQUIRE(s.has_value());
  CHECK(s->attribute_names ==
        std::vector<std::string>{"productCode", "distributorID", "ConnID", "status",
                                 "previouslySoldCount", "firstPurchaseDate", "lastPurchaseDate",
                                 "email"});
  CHECK(resolve_cred_def(mf.vdr, mf.cred_def.cred_def_id) == mf.cred_def);
  CHECK_FALSE(resolve_cred_def(mf.vdr, "creddef-1").has_value());  // entry 1 is a did-doc
  CHECK_FALSE(resolve_cred_def(mf.vdr, "nonsense").has_value());
}

TEST_CASE("issued credential carries the product and verifies") {
  Issuer mf;
  auto p = Issuer::product();
  auto vc = mf.issue(p, 5);
  CHECK(vc.attribute("productCode") == "PC-100");
  CHECK(vc.attribute("ConnID") == "MF-conn-1");
  CHECK(vc.attribute("email") == "b1@example.com");
  CHECK(vc.attribute("status") == "sold");
  CHECK_FALSE(vc.attribute("PIN").has_value());
  CHECK(vc.credential_id == oracle_credential_id(vc.cred_def_id, p.attributes(), 5));
  CHECK(verify_issuer_signature(vc, mf.vdr));
  CHECK(VerifiableCredential::decode(vc.encode()) == vc);

  auto holder = generate_keypair(mf.rng);
  auto nonce = generate_nonce(mf.rng);
  auto pres = present_proof(vc, nonce, holder);
  CHECK(pres.holder_did == derive_did(holder.public_key).to_string());
  auto report = verify_presentation(pres, nonce, mf.vdr);
  CHECK(report.valid);
  CHECK(report.reasons.empty());
  CHECK(ProofPresentation::decode(pres.encode()) == pres);
}

TEST_CASE("verification reports each failure") {
  Issuer mf;
  auto vc = mf.issue(Issuer::product());
  auto holder = generate_keypair(mf.rng);
  auto nonce = generate_nonce(mf.rng);

  SECTION("tampered attribute") {
    auto forged = vc;
    forged.attributes[2].second = "EVE-conn-1";
    auto r = verify_presentation(present_proof(forged, nonce, holder), nonce, mf.vdr);
    CHECK_FALSE(r.valid);
    CHECK(r.has(VerificationFailure::bad_issuer_sig));
  }
  SECTION("stale nonce") {
    auto r = verify_presentation(present_proof(vc, nonce, holder), generate_nonce(mf.rng), mf.vdr);
    CHECK(r.has(VerificationFailure::nonce_mismatch));
    CHECK_FALSE(r.has(VerificationFailure::bad_issuer_sig));
  }
  SECTION("holder signature swapped") {
    auto pres = present_proof(vc, nonce, holder);
    pres.holder_key = generate_keypair(mf.rng).public_key;
    CHECK(verify_presentation(pres, nonce, mf.vdr).has(VerificationFailure::bad_holder_sig));
  }
  SECTION("revoked") {
    mf.vdr.revoke_credential(mf.did.to_string(), mf.revreg, vc.credential_id);
    auto r = verify_presentation(present_proof(vc, nonce, holder), nonce, mf.vdr);
    CHECK_FALSE(r.valid);
    CHECK(r.reasons == std::vector{VerificationFailure::revoked});
  }
  SECTION("issuer not on this registry") {
    Issuer other(99);
    auto foreign = other.issue(Issuer::product());
    foreign.cred_def_id = "creddef-77";
    auto r = verify_presentation(present_proof(foreign, nonce, holder), nonce, mf.vdr);
    CHECK(r.has(VerificationFailure::unknown_issuer));
  }
  SECTION("self-signed by a different key under the real cred def") {
    auto fake = vc;
    fake.issuer_signature = sign(holder.private_key, fake.signing_bytes());
    CHECK_FALSE(verify_issuer_signature(fake, mf.vdr));
  }
}

TEST_CASE("generate_vc guards its inputs") {
  Issuer mf;
  auto p = Issuer::product();
  auto kind = [&](auto&& fn) {
    try {
      fn();
    } catch (const CredentialError& e) {
      return e.kind();
    }
    FAIL("no error");
    return CredentialError::Kind::schema_mismatch;
  };
  auto unpublished = mf.cred_def;
  unpublished.cred_def_id = "creddef-42";
  CHECK(kind([&] { generate_vc(p, unpublished, mf.root.private_key, mf.vdr, mf.revreg, 1); }) ==
        CredentialError::Kind::unpublished_cred_def);
  auto stranger = generate_keypair(mf.rng);
  CHECK(kind([&] { generate_vc(p, mf.cred_def, stranger.private_key, mf.vdr, mf.revreg, 1); }) ==
        CredentialError::Kind::key_mismatch);
  p.email.clear();
  CHECK(kind([&] { mf.issue(p); }) == CredentialError::Kind::schema_mismatch);
}

TEST_CASE("credential ids differ per issuance") {
  Issuer mf;
  auto a = mf.issue(Issuer::product(), 5);
  auto b = mf.issue(Issuer::product(), 6);
  auto c = mf.issue(Issuer::product("PC-100", "MF-conn-2"), 5);
  CHECK(a.credential_id != b.credential_id);
  CHECK(a.credential_id != c.credential_id);
  CHECK(mf.issue(Issuer::product(), 5).credential_id == a.credential_id);
}

TEST_CASE("proof request satisfaction") {
  Issuer mf;
  auto vc = mf.issue(Issuer::product());
  CHECK(satisfies(vc, {product_attribute_names(), {}}));
  CHECK(satisfies(vc, {{"productCode"}, {}}));
  CHECK_FALSE(satisfies(vc, {{"productCode", "serialNumber"}, {}}));
}
