#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ssiown/agent.hpp"
#include "ssiown/credential.hpp"
#include "ssiown/distributor.hpp"
#include "ssiown/pin_challenge.hpp"

namespace ssiown {

enum class ClaimRole { selling, buying };

/// One sale or purchase in progress. A seller only ever holds the PIN
/// ciphertext; the buyer keeps the PIN and the key.
struct OwnershipClaimingData {
  Tid tid;
  ClaimRole role = ClaimRole::buying;
  std::string counterparty;  // conn id on this wallet
  std::optional<Pin> pin;
  std::optional<SymmetricKey> key;
  std::optional<Bytes> encrypted_pin;
};

struct HeldCredential {
  VerifiableCredential vc;
  std::string conn_id;
  bool revocation_notified = false;
};

struct WalletFlow {
  MessageKind opened_with;
  FlowStatus status = FlowStatus::pending;
  std::string detail;
};

class Wallet : public Agent {
 public:
  Wallet(World& world, std::string id, std::string email, AgentRole role = AgentRole::wallet);

  /// New-product claim with the TID and PIN received by email.
  Nonce claim_new(const std::string& mf_conn, const Tid& tid, const Pin& pin);
  /// Starts a sale: mints a TID and asks the buyer for an encrypted PIN.
  Nonce sell(const std::string& buyer_conn);
  /// Asks the manufacturer to transfer `product_code` to the buyer behind `tid`.
  Nonce transfer(const std::string& mf_conn, const std::string& product_code, const Tid& tid);
  /// Used-product claim: hands the manufacturer the key for the PIN.
  Nonce claim_used(const std::string& mf_conn, const Tid& tid);

  /// Buyer side of the PIN exchange. Runs automatically on PINReq unless
  /// auto_share_pin is off.
  void share_pin(const Tid& tid);
  void set_auto_share_pin(bool on) { auto_share_pin_ = on; }

  const WalletFlow* flow(const Nonce& nonce) const;
  const std::vector<HeldCredential>& credentials() const { return credentials_; }
  const std::vector<OwnershipClaimingData>& claiming_data() const { return claiming_data_; }
  const OwnershipClaimingData* claiming(const Tid& tid, ClaimRole role) const;

  /// Most recent TID and PIN pair from the inbox, matched by email nonce.
  std::optional<std::pair<Tid, Pin>> emailed_claim() const;

 protected:
  Verdict on_message(Connection& conn, const OpenedMessage& msg) override;
  bool may_open_flow(const Connection& conn, MessageKind kind) const override;
  void dump_role_state(Json& out) const override;

  virtual Verdict on_proof_request(Connection& conn, const Nonce& nonce,
                                   const OwnershipProofReq& req);
  virtual Rational challenge_answer(const OwnershipClaimingData& data,
                                    const PinChallengeReq& req) const;

  void settle(const Nonce& nonce, FlowStatus status, std::string detail = {});
  Nonce open_flow(Connection& conn, MessageKind kind, std::initializer_list<MessageKind> replies);
  Connection& require_connection(const std::string& conn_id);

  std::map<Nonce, WalletFlow> flows_;
  std::map<Nonce, std::string> pending_transfers_;  // flow nonce -> productCode
  std::vector<OwnershipClaimingData> claiming_data_;

 private:
  Verdict on_claim_resp(Connection& conn, const Nonce& nonce, const OwnershipClaimResp& resp);
  Verdict on_pin_req(Connection& conn, const Nonce& nonce, const PinReq& req);
  Verdict on_pin_resp(Connection& conn, const Nonce& nonce, const PinResp& resp);
  Verdict on_challenge_req(Connection& conn, const Nonce& nonce, const PinChallengeReq& req);
  Verdict on_revoke(Connection& conn, const Nonce& nonce, const RevokeVc& req);
  OwnershipClaimingData* find_claiming(const Tid& tid, ClaimRole role);

  std::vector<HeldCredential> credentials_;
  std::map<std::string, std::vector<Nonce>> awaiting_used_vc_;  // conn id -> claim flows, oldest first
  std::map<Tid, Nonce> pin_req_nonce_;
  bool auto_share_pin_ = true;
};

}  // namespace ssiown
