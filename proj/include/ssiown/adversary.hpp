#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "ssiown/wallet.hpp"

namespace ssiown {

/// How the adversary answers an ownershipProofReq without holding a VC.
enum class ForgeStrategy {
  self_signed,     // right attributes, signed with its own key
  foreign_issuer,  // genuinely signed under a cred def it published itself
  tampered,        // issuer-looking VC with random attribute edits
  stale_nonce,     // presentation bound to a different challenge
  wrong_holder,    // presentation signed by a key not bound to the connection
};

inline constexpr ForgeStrategy kAllForgeStrategies[] = {
    ForgeStrategy::self_signed, ForgeStrategy::foreign_issuer, ForgeStrategy::tampered,
    ForgeStrategy::stale_nonce, ForgeStrategy::wrong_holder};

std::string_view to_string(ForgeStrategy s);
std::optional<ForgeStrategy> forge_strategy_from_string(std::string_view s);

/// A registered participant with no ownership VC. Behaves like a wallet
/// but lies where it can.
class Adversary : public Wallet {
 public:
  Adversary(World& world, std::string id, std::string email);

  /// Asks the manufacturer to transfer a product it never owned, with a
  /// made-up TID and PIN ciphertext. Returns the flow nonce.
  Nonce attempt_transfer(const std::string& mf_conn, const std::string& product_code,
                         ForgeStrategy strategy);

  /// Used-product claim for a TID it learned somewhere, with its own key.
  Nonce claim_with_guess(const std::string& mf_conn, const Tid& tid, const Pin& guess);

 protected:
  Verdict on_proof_request(Connection& conn, const Nonce& nonce,
                           const OwnershipProofReq& req) override;
  void dump_role_state(Json& out) const override;

 private:
  VerifiableCredential forge_credential(const Connection& conn, const std::string& product_code,
                                        ForgeStrategy strategy);

  KeyPair own_keys_;
  std::optional<CredentialDefinition> own_cred_def_;
  std::map<Nonce, ForgeStrategy> strategies_;
};

}  // namespace ssiown
