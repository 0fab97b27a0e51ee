#include "ssiown/wallet.hpp"

#include <algorithm>
#include <stdexcept>

#include "ssiown/world.hpp"

namespace ssiown {

Wallet::Wallet(World& world, std::string id, std::string email, AgentRole role)
    : Agent(world, std::move(id), std::move(email), role) {}

Connection& Wallet::require_connection(const std::string& conn_id) {
  Connection* c = connection(conn_id);
  if (!c) throw std::invalid_argument("unknown connection " + conn_id);
  return *c;
}

Nonce Wallet::open_flow(Connection& conn, MessageKind kind,
                        std::initializer_list<MessageKind> replies) {
  const Nonce n = generate_nonce(world_.rng());
  for (auto k : replies) conn.session.expect(n, k);
  flows_[n] = WalletFlow{kind, FlowStatus::pending, {}};
  return n;
}

void Wallet::settle(const Nonce& nonce, FlowStatus status, std::string detail) {
  auto it = flows_.find(nonce);
  if (it == flows_.end() || it->second.status != FlowStatus::pending) return;
  it->second.status = status;
  it->second.detail = std::move(detail);
}

const WalletFlow* Wallet::flow(const Nonce& nonce) const {
  auto it = flows_.find(nonce);
  return it == flows_.end() ? nullptr : &it->second;
}

OwnershipClaimingData* Wallet::find_claiming(const Tid& tid, ClaimRole role) {
  for (auto& d : claiming_data_) {
    if (d.tid == tid && d.role == role) return &d;
  }
  return nullptr;
}

const OwnershipClaimingData* Wallet::claiming(const Tid& tid, ClaimRole role) const {
  return const_cast<Wallet*>(this)->find_claiming(tid, role);
}

std::optional<std::pair<Tid, Pin>> Wallet::emailed_claim() const {
  const auto& box = inbox();
  for (auto t = box.rbegin(); t != box.rend(); ++t) {
    if (t->subject != "TID") continue;
    for (auto p = box.rbegin(); p != box.rend(); ++p) {
      if (p->subject != "PIN" || p->nonce != t->nonce) continue;
      auto tid = Tid::parse(t->value);
      auto pin = Pin::parse(p->value);
      if (tid && pin) return std::make_pair(*tid, *pin);
    }
  }
  return std::nullopt;
}

Nonce Wallet::claim_new(const std::string& mf_conn, const Tid& tid, const Pin& pin) {
  Connection& conn = require_connection(mf_conn);
  const Nonce n2 = open_flow(conn, MessageKind::ownership_claim_req,
                             {MessageKind::ownership_claim_resp});
  send(conn, n2, MessagePayload{OwnershipClaimReq{tid, pin}});
  return n2;
}

Nonce Wallet::sell(const std::string& buyer_conn) {
  Connection& conn = require_connection(buyer_conn);
  const Tid tid = Tid::generate(world_.rng());
  const Nonce n1 = open_flow(conn, MessageKind::pin_req, {MessageKind::pin_resp});
  claiming_data_.push_back(OwnershipClaimingData{tid, ClaimRole::selling, buyer_conn, {}, {}, {}});
  send(conn, n1, MessagePayload{PinReq{tid}});
  return n1;
}

Nonce Wallet::transfer(const std::string& mf_conn, const std::string& product_code,
                       const Tid& tid) {
  Connection& conn = require_connection(mf_conn);
  const auto* data = claiming(tid, ClaimRole::selling);
  if (!data || !data->encrypted_pin) {
    throw std::invalid_argument("no encrypted PIN for TID " + tid.hex());
  }
  const Nonce n1 = open_flow(conn, MessageKind::ownership_transfer_req,
                             {MessageKind::ownership_proof_req,
                              MessageKind::ownership_transfer_resp});
  pending_transfers_[n1] = product_code;
  send(conn, n1, MessagePayload{OwnershipTransferReq{product_code, *data->encrypted_pin, tid}});
  return n1;
}

Nonce Wallet::claim_used(const std::string& mf_conn, const Tid& tid) {
  Connection& conn = require_connection(mf_conn);
  const auto* data = claiming(tid, ClaimRole::buying);
  if (!data || !data->key) throw std::invalid_argument("no key for TID " + tid.hex());
  const Nonce n1 = open_flow(conn, MessageKind::ownership_claim_req,
                             {MessageKind::pin_challenge_req, MessageKind::ownership_claim_resp});
  awaiting_used_vc_[mf_conn].push_back(n1);
  send(conn, n1, MessagePayload{OwnershipClaimReq{tid, *data->key}});
  return n1;
}

void Wallet::share_pin(const Tid& tid) {
  auto* data = find_claiming(tid, ClaimRole::buying);
  auto nonce = pin_req_nonce_.find(tid);
  if (!data || data->pin || nonce == pin_req_nonce_.end()) return;
  Connection* conn = connection(data->counterparty);
  if (!conn) return;
  data->pin = Pin::generate(world_.rng());
  data->key = generate_symmetric_key(world_.rng());
  Bytes ct = sym_encrypt(world_.rng(), *data->key, as_view(data->pin->str()));
  world_.audit("secret-generated", Json{{"owner", id_},
                                        {"tid", tid.hex()},
                                        {"pin", data->pin->str()},
                                        {"key", to_hex(data->key->key_bytes)}});
  send(*conn, nonce->second, MessagePayload{PinResp{std::move(ct), tid}});
}

bool Wallet::may_open_flow(const Connection& conn, MessageKind kind) const {
  switch (kind) {
    case MessageKind::pin_req:
    case MessageKind::revoke_vc:
      return true;
    case MessageKind::ownership_claim_resp:
      return awaiting_used_vc_.count(conn.conn_id) != 0;
    default:
      return false;
  }
}

Verdict Wallet::on_message(Connection& conn, const OpenedMessage& msg) {
  const auto& p = msg.payload;
  if (const auto* m = p.as<OwnershipClaimResp>()) return on_claim_resp(conn, msg.nonce, *m);
  if (const auto* m = p.as<PinReq>()) return on_pin_req(conn, msg.nonce, *m);
  if (const auto* m = p.as<PinResp>()) return on_pin_resp(conn, msg.nonce, *m);
  if (const auto* m = p.as<OwnershipProofReq>()) return on_proof_request(conn, msg.nonce, *m);
  if (const auto* m = p.as<OwnershipTransferResp>()) {
    pending_transfers_.erase(msg.nonce);
    const bool ok = m->status == AckStatus::accepted;
    settle(msg.nonce, ok ? FlowStatus::accepted : FlowStatus::rejected);
    notify(ok ? "transfer authorised" : "transfer refused");
    return ok ? Verdict::ok() : Verdict::ok("transfer-refused");
  }
  if (const auto* m = p.as<PinChallengeReq>()) return on_challenge_req(conn, msg.nonce, *m);
  if (const auto* m = p.as<RevokeVc>()) return on_revoke(conn, msg.nonce, *m);
  return Verdict::reject("unsupported-kind");
}

Verdict Wallet::on_claim_resp(Connection& conn, const Nonce& nonce,
                              const OwnershipClaimResp& resp) {
  // A used-product VC arrives under a nonce minted by the manufacturer.
  // A refusal echoes the request nonce; a fresh nonce carries the VC for
  // the oldest used-product claim still waiting on this connection.
  Nonce flow_nonce = nonce;
  auto& waiting = awaiting_used_vc_[conn.conn_id];
  if (flows_.count(nonce) == 0 && !waiting.empty()) {
    flow_nonce = waiting.front();
  }
  waiting.erase(std::remove(waiting.begin(), waiting.end(), flow_nonce), waiting.end());
  if (waiting.empty()) awaiting_used_vc_.erase(conn.conn_id);
  if (resp.status != AckStatus::accepted || !resp.credential) {
    settle(flow_nonce, FlowStatus::rejected, "claim refused");
    notify("claim refused");
    return Verdict::ok("claim-refused");
  }
  const auto& vc = *resp.credential;
  if (!verify_issuer_signature(vc, world_.vdr())) {
    settle(flow_nonce, FlowStatus::rejected, "bad issuer signature");
    send(conn, nonce, MessagePayload{OwnershipClaimAck{AckStatus::rejected}});
    return Verdict::reject("bad-issuer-signature");
  }
  credentials_.push_back(HeldCredential{vc, conn.conn_id});
  settle(flow_nonce, FlowStatus::accepted, vc.credential_id);
  notify("received credential " + vc.credential_id);
  send(conn, nonce, MessagePayload{OwnershipClaimAck{AckStatus::accepted}});
  return Verdict::ok();
}

Verdict Wallet::on_pin_req(Connection& conn, const Nonce& nonce, const PinReq& req) {
  if (find_claiming(req.tid, ClaimRole::buying)) return Verdict::reject("duplicate-tid");
  claiming_data_.push_back(OwnershipClaimingData{req.tid, ClaimRole::buying, conn.conn_id, {}, {}, {}});
  pin_req_nonce_[req.tid] = nonce;
  if (auto_share_pin_) share_pin(req.tid);
  return Verdict::ok();
}

Verdict Wallet::on_pin_resp(Connection& conn, const Nonce& nonce, const PinResp& resp) {
  auto* data = find_claiming(resp.tid, ClaimRole::selling);
  if (!data || data->counterparty != conn.conn_id || data->encrypted_pin) {
    settle(nonce, FlowStatus::rejected, "unknown tid");
    return Verdict::reject("unknown-tid");
  }
  data->encrypted_pin = resp.encrypted_pin;
  settle(nonce, FlowStatus::accepted);
  return Verdict::ok();
}

Verdict Wallet::on_proof_request(Connection& conn, const Nonce& nonce,
                                 const OwnershipProofReq& req) {
  auto pending = pending_transfers_.find(nonce);
  if (pending == pending_transfers_.end()) return Verdict::reject("no-pending-transfer");
  const HeldCredential* chosen = nullptr;
  for (const auto& held : credentials_) {
    if (held.vc.attribute("productCode") == pending->second && satisfies(held.vc, req.request)) {
      chosen = &held;  // newest wins
    }
  }
  if (!chosen) {
    notify("no credential satisfies the proof request");
    return Verdict::reject("no-matching-credential");
  }
  auto presentation = present_proof(chosen->vc, req.request.challenge_nonce, conn.local);
  send(conn, nonce, MessagePayload{OwnershipProofResp{std::move(presentation)}});
  return Verdict::ok();
}

Rational Wallet::challenge_answer(const OwnershipClaimingData& data,
                                  const PinChallengeReq& req) const {
  return evaluate_challenge(pin_numeric(data.pin->str()), req.challenge_by, req.challenge_type);
}

Verdict Wallet::on_challenge_req(Connection& conn, const Nonce& nonce,
                                 const PinChallengeReq& req) {
  const auto* data = find_claiming(req.tid, ClaimRole::buying);
  if (!data || !data->pin) return Verdict::reject("unknown-tid");
  if (req.challenge_by < kChallengeByMin || req.challenge_by > kChallengeByMax) {
    return Verdict::reject("challenge-out-of-range");
  }
  send(conn, nonce, MessagePayload{PinChallengeResp{req.tid, challenge_answer(*data, req)}});
  return Verdict::ok();
}

Verdict Wallet::on_revoke(Connection& conn, const Nonce& nonce, const RevokeVc& req) {
  for (auto& held : credentials_) {
    if (held.vc.credential_id == req.credential_id) held.revocation_notified = true;
  }
  notify("credential " + req.credential_id + " revoked");
  send(conn, nonce, MessagePayload{RevokeVcResp{AckStatus::accepted}});
  return Verdict::ok();
}

void Wallet::dump_role_state(Json& out) const {
  Json creds = Json::array();
  for (const auto& h : credentials_) {
    Json attrs = Json::object();
    for (const auto& [k, v] : h.vc.attributes) attrs[k] = v;
    creds.push_back(Json{{"credential_id", h.vc.credential_id},
                         {"cred_def_id", h.vc.cred_def_id},
                         {"attributes", std::move(attrs)},
                         {"conn_id", h.conn_id},
                         {"revocation_notified", h.revocation_notified}});
  }
  out["credentials"] = std::move(creds);
  Json claiming = Json::array();
  for (const auto& d : claiming_data_) {
    Json j;
    j["tid"] = d.tid.hex();
    j["role"] = d.role == ClaimRole::selling ? "selling" : "buying";
    j["counterparty"] = d.counterparty;
    j["pin"] = d.pin ? Json(d.pin->str()) : Json();
    j["key"] = d.key ? Json(to_hex(d.key->key_bytes)) : Json();
    j["encrypted_pin"] = d.encrypted_pin ? Json(to_hex(*d.encrypted_pin)) : Json();
    claiming.push_back(std::move(j));
  }
  out["ownership_claiming_data"] = std::move(claiming);
  Json flows = Json::array();
  for (const auto& [n, f] : flows_) {
    flows.push_back(Json{{"nonce", to_hex(n.value)},
                         {"opened_with", std::string(to_string(f.opened_with))},
                         {"status", std::string(to_string(f.status))},
                         {"detail", f.detail}});
  }
  out["flows"] = std::move(flows);
  Json awaiting = Json::object();
  for (const auto& [c, list] : awaiting_used_vc_) {
    for (const auto& n : list) awaiting[c].push_back(to_hex(n.value));
  }
  out["awaiting_used_vc"] = std::move(awaiting);
}

}  // namespace ssiown
