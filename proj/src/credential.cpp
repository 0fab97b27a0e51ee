#include "ssiown/credential.hpp"

#include <algorithm>
#include <charconv>

#include "ssiown/codec.hpp"

namespace ssiown {

namespace {

constexpr std::string_view kSchemaPrefix = "schema-";
constexpr std::string_view kCredDefPrefix = "creddef-";

std::optional<std::uint64_t> parse_entry_ref(std::string_view id, std::string_view prefix) {
  if (id.substr(0, prefix.size()) != prefix) return std::nullopt;
  id.remove_prefix(prefix.size());
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(id.data(), id.data() + id.size(), v);
  if (ec != std::errc() || p != id.data() + id.size()) return std::nullopt;
  return v;
}

void write_attributes(Writer& w, const AttributeList& attrs) {
  w.u32(static_cast<std::uint32_t>(attrs.size()));
  for (const auto& [name, value] : attrs) w.str(name).str(value);
}

AttributeList read_attributes(Reader& r) {
  const std::uint32_t count = r.u32();
  if (count > r.remaining() / 8) throw DecodeError("attribute count exceeds input");
  AttributeList attrs(count);
  for (auto& [name, value] : attrs) {
    name = r.str();
    value = r.str();
  }
  return attrs;
}

}  // namespace

CredentialSchema publish_product_schema(Registry& vdr, const std::string& issuer_did) {
  const auto& names = product_attribute_names();
  Writer w;
  w.str("product-ownership").u32(static_cast<std::uint32_t>(names.size()));
  for (const auto& n : names) w.str(n);
  auto id = vdr.publish(EntryKind::schema, std::move(w).take(), issuer_did);
  return CredentialSchema{std::string(kSchemaPrefix) + std::to_string(id), names};
}

std::optional<CredentialSchema> resolve_schema(const Registry& vdr, std::string_view schema_id) {
  auto ref = parse_entry_ref(schema_id, kSchemaPrefix);
  if (!ref) return std::nullopt;
  const auto* e = vdr.entry(*ref);
  if (e == nullptr || e->kind != EntryKind::schema) return std::nullopt;
  try {
    Reader r(e->payload);
    r.str();
    const std::uint32_t count = r.u32();
    if (count > r.remaining() / 4) return std::nullopt;
    CredentialSchema s{std::string(schema_id), std::vector<std::string>(count)};
    for (auto& n : s.attribute_names) n = r.str();
    r.expect_done();
    return s;
  } catch (const DecodeError&) {
    return std::nullopt;
  }
}

CredentialDefinition publish_cred_def(Registry& vdr, const CredentialSchema& schema,
                                      const Did& issuer) {
  const auto issuer_did = issuer.to_string();
  Bytes payload = Writer()
                      .str(schema.schema_id)
                      .str(issuer_did)
                      .fixed(issuer.verification_key.bytes)
                      .take();
  auto id = vdr.publish(EntryKind::cred_def, std::move(payload), issuer_did);
  return CredentialDefinition{std::string(kCredDefPrefix) + std::to_string(id), schema.schema_id,
                              issuer_did, issuer.verification_key};
}

std::optional<CredentialDefinition> resolve_cred_def(const Registry& vdr,
                                                     std::string_view cred_def_id) {
  auto ref = parse_entry_ref(cred_def_id, kCredDefPrefix);
  if (!ref) return std::nullopt;
  const auto* e = vdr.entry(*ref);
  if (e == nullptr || e->kind != EntryKind::cred_def) return std::nullopt;
  try {
    Reader r(e->payload);
    CredentialDefinition def;
    def.cred_def_id = std::string(cred_def_id);
    def.schema_id = r.str();
    def.issuer_did = r.str();
    def.issuer_public_key.bytes = r.fixed<32>();
    r.expect_done();
    if (def.issuer_did != e->author_did) return std::nullopt;
    return def;
  } catch (const DecodeError&) {
    return std::nullopt;
  }
}

Bytes VerifiableCredential::signing_bytes() const {
  Writer w;
  w.str("vc/1").str(credential_id).str(cred_def_id);
  write_attributes(w, attributes);
  w.str(revocation_registry_id).u64(issued_at);
  return std::move(w).take();
}

Bytes VerifiableCredential::encode() const {
  Writer w;
  w.bytes(signing_bytes()).fixed(issuer_signature.bytes);
  return std::move(w).take();
}

VerifiableCredential VerifiableCredential::decode(ByteView in) {
  Reader outer(in);
  Bytes body = outer.bytes();
  VerifiableCredential vc;
  vc.issuer_signature.bytes = outer.fixed<64>();
  outer.expect_done();

  Reader r(body);
  if (r.str() != "vc/1") throw DecodeError("unknown credential encoding");
  vc.credential_id = r.str();
  vc.cred_def_id = r.str();
  vc.attributes = read_attributes(r);
  vc.revocation_registry_id = r.str();
  vc.issued_at = r.u64();
  r.expect_done();
  return vc;
}

std::optional<std::string> VerifiableCredential::attribute(std::string_view name) const {
  for (const auto& [n, v] : attributes) {
    if (n == name) return v;
  }
  return std::nullopt;
}

std::string derive_credential_id(std::string_view cred_def_id, const AttributeList& attributes,
                                 std::uint64_t issued_at) {
  Writer w;
  w.str(cred_def_id);
  write_attributes(w, attributes);
  w.u64(issued_at);
  auto h = digest(w.data());
  return "vc-" + to_hex(ByteView(h.data(), 16));
}

VerifiableCredential generate_vc(const ProductRecord& product, const CredentialDefinition& cred_def,
                                 const PrivateKey& issuer_key, const Registry& vdr,
                                 const std::string& revocation_registry_id,
                                 std::uint64_t issued_at) {
  auto published = resolve_cred_def(vdr, cred_def.cred_def_id);
  if (!published || *published != cred_def) {
    throw CredentialError(CredentialError::Kind::unpublished_cred_def,
                          "credential definition not on the registry: " + cred_def.cred_def_id);
  }
  if (!std::equal(issuer_key.bytes.begin() + 32, issuer_key.bytes.end(),
                  cred_def.issuer_public_key.bytes.begin())) {
    throw CredentialError(CredentialError::Kind::key_mismatch,
                          "issuer key does not match the credential definition");
  }
  auto schema = resolve_schema(vdr, cred_def.schema_id);
  if (!schema) {
    throw CredentialError(CredentialError::Kind::unpublished_cred_def, "schema not on the registry");
  }
  for (const auto* field : {&product.product_code, &product.distributor_id, &product.conn_id,
                            &product.email}) {
    if (field->empty()) {
      throw CredentialError(CredentialError::Kind::schema_mismatch, "product field missing");
    }
  }
  VerifiableCredential vc;
  vc.cred_def_id = cred_def.cred_def_id;
  vc.attributes = product.attributes();
  std::vector<std::string> names;
  for (const auto& a : vc.attributes) names.push_back(a.first);
  if (names != schema->attribute_names) {
    throw CredentialError(CredentialError::Kind::schema_mismatch,
                          "product attributes do not match the schema");
  }
  vc.revocation_registry_id = revocation_registry_id;
  vc.issued_at = issued_at;
  vc.credential_id = derive_credential_id(vc.cred_def_id, vc.attributes, issued_at);
  vc.issuer_signature = sign(issuer_key, vc.signing_bytes());
  return vc;
}

bool verify_issuer_signature(const VerifiableCredential& vc, const Registry& vdr) {
  auto def = resolve_cred_def(vdr, vc.cred_def_id);
  if (!def) return false;
  auto doc = vdr.resolve_did(def->issuer_did);
  if (!doc) return false;
  return verify(doc->verification_key, vc.signing_bytes(), vc.issuer_signature);
}

bool satisfies(const VerifiableCredential& vc, const ProofRequest& request) {
  return std::all_of(request.requested_attribute_names.begin(),
                     request.requested_attribute_names.end(),
                     [&](const std::string& n) { return vc.attribute(n).has_value(); });
}

Bytes ProofPresentation::signing_bytes() const {
  return Writer()
      .str("presentation/1")
      .bytes(credential.encode())
      .fixed(challenge_nonce.value)
      .str(holder_did)
      .fixed(holder_key.bytes)
      .take();
}

Bytes ProofPresentation::encode() const {
  return Writer().bytes(signing_bytes()).fixed(presentation_signature.bytes).take();
}

ProofPresentation ProofPresentation::decode(ByteView in) {
  Reader outer(in);
  Bytes body = outer.bytes();
  ProofPresentation p;
  p.presentation_signature.bytes = outer.fixed<64>();
  outer.expect_done();

  Reader r(body);
  if (r.str() != "presentation/1") throw DecodeError("unknown presentation encoding");
  p.credential = VerifiableCredential::decode(r.bytes());
  p.challenge_nonce.value = r.fixed<Nonce::kSize>();
  p.holder_did = r.str();
  p.holder_key.bytes = r.fixed<32>();
  r.expect_done();
  return p;
}

ProofPresentation present_proof(const VerifiableCredential& vc, const Nonce& challenge,
                                const KeyPair& holder) {
  ProofPresentation p;
  p.credential = vc;
  p.challenge_nonce = challenge;
  p.holder_key = holder.public_key;
  p.holder_did = derive_did(holder.public_key).to_string();
  p.presentation_signature = sign(holder.private_key, p.signing_bytes());
  return p;
}

std::string_view to_string(VerificationFailure f) {
  switch (f) {
    case VerificationFailure::bad_issuer_sig: return "bad-issuer-sig";
    case VerificationFailure::bad_holder_sig: return "bad-holder-sig";
    case VerificationFailure::nonce_mismatch: return "nonce-mismatch";
    case VerificationFailure::revoked: return "revoked";
    case VerificationFailure::unknown_issuer: return "unknown-issuer";
  }
  return "unknown";
}

bool VerificationReport::has(VerificationFailure f) const {
  return std::find(reasons.begin(), reasons.end(), f) != reasons.end();
}

VerificationReport verify_presentation(const ProofPresentation& p, const Nonce& expected_nonce,
                                       const Registry& vdr) {
  VerificationReport report;
  const auto& vc = p.credential;

  auto def = resolve_cred_def(vdr, vc.cred_def_id);
  auto doc = def ? vdr.resolve_did(def->issuer_did) : std::nullopt;
  if (!doc) {
    report.reasons.push_back(VerificationFailure::unknown_issuer);
  } else if (!verify(doc->verification_key, vc.signing_bytes(), vc.issuer_signature)) {
    report.reasons.push_back(VerificationFailure::bad_issuer_sig);
  }

  if (derive_did(p.holder_key).to_string() != p.holder_did ||
      !verify(p.holder_key, p.signing_bytes(), p.presentation_signature)) {
    report.reasons.push_back(VerificationFailure::bad_holder_sig);
  }
  if (p.challenge_nonce != expected_nonce) {
    report.reasons.push_back(VerificationFailure::nonce_mismatch);
  }
  if (vdr.is_revoked(vc.credential_id)) {
    report.reasons.push_back(VerificationFailure::revoked);
  }
  report.valid = report.reasons.empty();
  return report;
}

}  // namespace ssiown
