#include "ssiown/adversary.hpp"

#include "ssiown/world.hpp"

namespace ssiown {

namespace {
constexpr std::string_view kStrategyNames[] = {"self-signed", "foreign-issuer", "tampered",
                                               "stale-nonce", "wrong-holder"};
}

std::string_view to_string(ForgeStrategy s) {
  return kStrategyNames[static_cast<std::size_t>(s)];
}

std::optional<ForgeStrategy> forge_strategy_from_string(std::string_view s) {
  for (std::size_t i = 0; i < std::size(kStrategyNames); ++i) {
    if (kStrategyNames[i] == s) return static_cast<ForgeStrategy>(i);
  }
  return std::nullopt;
}

Adversary::Adversary(World& world, std::string id, std::string email)
    : Wallet(world, std::move(id), std::move(email), AgentRole::adversary),
      own_keys_(generate_keypair(world.rng(), KeyPurpose::did_root)) {}

Nonce Adversary::attempt_transfer(const std::string& mf_conn, const std::string& product_code,
                                  ForgeStrategy strategy) {
  Connection& conn = require_connection(mf_conn);
  const Tid tid = Tid::generate(world_.rng());
  const auto key = generate_symmetric_key(world_.rng());
  const Pin pin = Pin::generate(world_.rng());
  Bytes ct = sym_encrypt(world_.rng(), key, as_view(pin.str()));
  const Nonce n1 = open_flow(conn, MessageKind::ownership_transfer_req,
                             {MessageKind::ownership_proof_req,
                              MessageKind::ownership_transfer_resp});
  pending_transfers_[n1] = product_code;
  strategies_[n1] = strategy;
  send(conn, n1, MessagePayload{OwnershipTransferReq{product_code, std::move(ct), tid}});
  return n1;
}

Nonce Adversary::claim_with_guess(const std::string& mf_conn, const Tid& tid, const Pin& guess) {
  // Its own key: it never saw the buyer's.
  claiming_data_.push_back(OwnershipClaimingData{tid, ClaimRole::buying, mf_conn, guess,
                                                 generate_symmetric_key(world_.rng())});
  return claim_used(mf_conn, tid);
}

VerifiableCredential Adversary::forge_credential(const Connection& conn,
                                                 const std::string& product_code,
                                                 ForgeStrategy strategy) {
  ProductRecord p;
  p.product_code = product_code;
  p.distributor_id = "DS";
  p.conn_id = "MF-conn-" + std::to_string(world_.rng().uniform_range(1, 20));
  p.status = ProductStatus::sold;
  p.first_purchase_date = world_.rng().uniform(100);
  p.last_purchase_date = p.first_purchase_date;
  p.email = email_;
  (void)conn;

  if (strategy == ForgeStrategy::foreign_issuer) {
    if (!own_cred_def_) {
      Did did = derive_did(own_keys_.public_key);
      world_.vdr().publish_did(did, id_);
      auto schema = publish_product_schema(world_.vdr(), did.to_string());
      own_cred_def_ = publish_cred_def(world_.vdr(), schema, did);
    }
    return generate_vc(p, *own_cred_def_, own_keys_.private_key, world_.vdr(), "", world_.now());
  }

  // Claim to be the manufacturer's credential.
  VerifiableCredential vc;
  vc.cred_def_id = "creddef-3";
  for (const auto& e : world_.vdr().entries()) {
    if (e.kind == EntryKind::cred_def) {
      vc.cred_def_id = "creddef-" + std::to_string(e.entry_id);
      break;
    }
  }
  vc.attributes = p.attributes();
  vc.issued_at = world_.now();
  vc.revocation_registry_id = "revreg-4";
  vc.credential_id = derive_credential_id(vc.cred_def_id, vc.attributes, vc.issued_at);
  if (strategy == ForgeStrategy::tampered) {
    auto& attr = vc.attributes[world_.rng().uniform(vc.attributes.size())].second;
    attr += static_cast<char>('a' + world_.rng().uniform(26));
    vc.issuer_signature.bytes = world_.rng().draw<64>();
  } else {
    vc.issuer_signature = sign(own_keys_.private_key, vc.signing_bytes());
  }
  return vc;
}

Verdict Adversary::on_proof_request(Connection& conn, const Nonce& nonce,
                                    const OwnershipProofReq& req) {
  auto s = strategies_.find(nonce);
  auto pending = pending_transfers_.find(nonce);
  if (s == strategies_.end() || pending == pending_transfers_.end()) {
    return Wallet::on_proof_request(conn, nonce, req);
  }
  auto vc = forge_credential(conn, pending->second, s->second);
  ProofPresentation p;
  switch (s->second) {
    case ForgeStrategy::stale_nonce:
      p = present_proof(vc, generate_nonce(world_.rng()), conn.local);
      break;
    case ForgeStrategy::wrong_holder:
      p = present_proof(vc, req.request.challenge_nonce, generate_keypair(world_.rng()));
      break;
    default:
      p = present_proof(vc, req.request.challenge_nonce, conn.local);
      break;
  }
  send(conn, nonce, MessagePayload{OwnershipProofResp{std::move(p)}});
  return Verdict::ok();
}

void Adversary::dump_role_state(Json& out) const {
  Wallet::dump_role_state(out);
  Json strategies = Json::object();
  for (const auto& [n, st] : strategies_) strategies[to_hex(n.value)] = std::string(to_string(st));
  out["forge_strategies"] = std::move(strategies);
}

}  // namespace ssiown
