#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ssiown/agent.hpp"
#include "ssiown/credential.hpp"
#include "ssiown/pin_challenge.hpp"
#include "ssiown/product.hpp"

namespace ssiown {

/// Pending claim held by the manufacturer. New-product entries carry the
/// plaintext PIN; used-product entries carry the buyer's PIN ciphertext and,
/// once the buyer claims, the key that opens it.
struct ClaimantAttribute {
  std::string product_code;
  Tid tid;
  std::variant<Bytes, Pin> pin;
  std::optional<SymmetricKey> key;
  std::optional<std::uint32_t> challenge_by;
  std::optional<ChallengeOp> challenge_type;

  // used-product flow bookkeeping
  std::string seller_conn;
  Nonce transfer_nonce;
  Nonce proof_challenge;
  bool authorized = false;  // seller proved ownership
  std::string buyer_conn;
  Nonce claim_nonce;

  bool is_new_product() const { return std::holds_alternative<Pin>(pin); }
};

/// revokeVC sent to the previous owner and not yet acknowledged. The
/// acknowledgement is bookkeeping only; the revocation is already on the ledger.
struct RevocationNotice {
  std::string product_code;
  std::string credential_id;
  std::string seller_conn;
  Nonce revoke_nonce;
};

struct IssuedCredential {
  std::string product_code;
  std::string credential_id;
  std::uint64_t issued_at = 0;
};

/// Decrypts the stored PIN ciphertext with the claimant's key and compares
/// the recomputed challenge result. False on any decrypt or format failure.
bool challenge_accepts(const Bytes& encrypted_pin, const SymmetricKey& key,
                       std::uint32_t challenge_by, ChallengeOp op, const Rational& answer);

class Manufacturer : public Agent {
 public:
  Manufacturer(World& world, std::string id, std::string email,
               const std::vector<std::string>& catalog);

  const Did& did() const { return did_; }
  const CredentialDefinition& cred_def() const { return cred_def_; }
  const std::string& revocation_registry_id() const { return rev_reg_id_; }

  const std::map<std::string, ProductRecord>& products() const { return products_; }
  const ProductRecord* product(const std::string& code) const;
  const std::vector<ClaimantAttribute>& claimants() const { return claimants_; }
  const std::vector<IssuedCredential>& issued() const { return issued_; }
  const std::vector<RevocationNotice>& revocation_notices() const { return notices_; }

  /// Number of ownershipProofReq messages sent so far.
  std::size_t proof_requests_sent() const { return proof_requests_sent_; }

 protected:
  Verdict on_message(Connection& conn, const OpenedMessage& msg) override;
  Verdict on_https(const std::string& from, const HttpsMessage& msg) override;
  bool may_open_flow(const Connection& conn, MessageKind kind) const override;
  bool may_open_https(MessageKind kind) const override {
    return kind == MessageKind::product_selling_req;
  }
  void dump_role_state(Json& out) const override;

 private:
  Verdict handle_selling_req(const std::string& from, const Nonce& nonce,
                             const ProductSellingReq& req);
  Verdict handle_new_product_claim(Connection& conn, const Nonce& nonce,
                                   const OwnershipClaimReq& req);
  Verdict handle_used_product_claim(Connection& conn, const Nonce& nonce,
                                    const OwnershipClaimReq& req);
  Verdict handle_transfer_req(Connection& conn, const Nonce& nonce,
                              const OwnershipTransferReq& req);
  Verdict handle_proof_resp(Connection& conn, const Nonce& nonce, const OwnershipProofResp& resp);
  Verdict handle_challenge_resp(Connection& conn, const Nonce& nonce,
                                const PinChallengeResp& resp);
  Verdict handle_revoke_resp(Connection& conn, const Nonce& nonce, const RevokeVcResp& resp);
  Verdict handle_claim_ack(Connection& conn, const Nonce& nonce, const OwnershipClaimAck& ack);

  VerifiableCredential issue(ProductRecord& product);
  void reject_claim(Connection& conn, const Nonce& nonce);
  void rollback(std::vector<ClaimantAttribute>::iterator entry);
  std::vector<ClaimantAttribute>::iterator find_claimant(const std::string& product_code);

  KeyPair root_keys_;
  Did did_;
  CredentialSchema schema_;
  CredentialDefinition cred_def_;
  std::string rev_reg_id_;

  std::map<std::string, ProductRecord> products_;
  std::vector<ClaimantAttribute> claimants_;
  std::vector<RevocationNotice> notices_;
  std::vector<IssuedCredential> issued_;
  std::size_t proof_requests_sent_ = 0;
};

}  // namespace ssiown
