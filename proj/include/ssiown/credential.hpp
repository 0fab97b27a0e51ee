#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ssiown/bytes.hpp"
#include "ssiown/crypto.hpp"
#include "ssiown/product.hpp"
#include "ssiown/vdr.hpp"

namespace ssiown {

class CredentialError : public std::runtime_error {
 public:
  enum class Kind { schema_mismatch, unpublished_cred_def, key_mismatch };
  CredentialError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct CredentialSchema {
  std::string schema_id;
  std::vector<std::string> attribute_names;

  bool operator==(const CredentialSchema&) const = default;
};

struct CredentialDefinition {
  std::string cred_def_id;
  std::string schema_id;
  std::string issuer_did;
  PublicKey issuer_public_key;

  bool operator==(const CredentialDefinition&) const = default;
};

// Ids are "schema-<entry_id>" / "creddef-<entry_id>" of the ledger entry.
CredentialSchema publish_product_schema(Registry& vdr, const std::string& issuer_did);
CredentialDefinition publish_cred_def(Registry& vdr, const CredentialSchema& schema,
                                      const Did& issuer);
std::optional<CredentialSchema> resolve_schema(const Registry& vdr, std::string_view schema_id);
std::optional<CredentialDefinition> resolve_cred_def(const Registry& vdr,
                                                     std::string_view cred_def_id);

struct VerifiableCredential {
  std::string credential_id;
  std::string cred_def_id;
  AttributeList attributes;
  Signature issuer_signature;
  std::string revocation_registry_id;
  std::uint64_t issued_at = 0;

  /// Canonical bytes covered by the issuer signature (every field but it).
  Bytes signing_bytes() const;
  Bytes encode() const;
  static VerifiableCredential decode(ByteView in);

  std::optional<std::string> attribute(std::string_view name) const;

  bool operator==(const VerifiableCredential&) const = default;
};

/// Digest of (cred_def_id, attributes, issued_at), rendered "vc-<hex>".
std::string derive_credential_id(std::string_view cred_def_id, const AttributeList& attributes,
                                 std::uint64_t issued_at);

/// Issues a product-ownership credential. Throws CredentialError when the
/// credential definition is not on the registry, the key does not belong
/// to it, or a required product field is empty.
VerifiableCredential generate_vc(const ProductRecord& product, const CredentialDefinition& cred_def,
                                 const PrivateKey& issuer_key, const Registry& vdr,
                                 const std::string& revocation_registry_id,
                                 std::uint64_t issued_at);

bool verify_issuer_signature(const VerifiableCredential& vc, const Registry& vdr);

struct ProofRequest {
  std::vector<std::string> requested_attribute_names;
  Nonce challenge_nonce;

  bool operator==(const ProofRequest&) const = default;
};

bool satisfies(const VerifiableCredential& vc, const ProofRequest& request);

struct ProofPresentation {
  VerifiableCredential credential;
  Nonce challenge_nonce;
  std::string holder_did;
  PublicKey holder_key;
  Signature presentation_signature;

  Bytes signing_bytes() const;
  Bytes encode() const;
  static ProofPresentation decode(ByteView in);

  bool operator==(const ProofPresentation&) const = default;
};

/// holder_did is derived from the holder's key, so the presentation is
/// self-certifying; callers bind that DID to a connection.
ProofPresentation present_proof(const VerifiableCredential& vc, const Nonce& challenge,
                                const KeyPair& holder);

enum class VerificationFailure {
  bad_issuer_sig,
  bad_holder_sig,
  nonce_mismatch,
  revoked,
  unknown_issuer,
};

std::string_view to_string(VerificationFailure f);

struct VerificationReport {
  bool valid = false;
  std::vector<VerificationFailure> reasons;

  bool has(VerificationFailure f) const;
};

VerificationReport verify_presentation(const ProofPresentation& presentation,
                                       const Nonce& expected_nonce, const Registry& vdr);

}  // namespace ssiown
