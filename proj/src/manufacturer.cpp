#include "ssiown/manufacturer.hpp"

#include <algorithm>

#include "ssiown/world.hpp"

namespace ssiown {

namespace {

MessagePayload claim_resp(AckStatus s, std::optional<VerifiableCredential> vc = std::nullopt) {
  return MessagePayload{OwnershipClaimResp{s, std::move(vc)}};
}

Json product_json(const ProductRecord& p) {
  Json j;
  for (const auto& [name, value] : p.attributes()) j[name] = value;
  j["current_credential_id"] = p.current_credential_id ? Json(*p.current_credential_id) : Json();
  return j;
}

}  // namespace

bool challenge_accepts(const Bytes& encrypted_pin, const SymmetricKey& key,
                       std::uint32_t challenge_by, ChallengeOp op, const Rational& answer) {
  Bytes plain;
  try {
    plain = sym_decrypt(key, encrypted_pin);
  } catch (const CryptoError&) {
    return false;
  }
  auto pin = Pin::parse(std::string(plain.begin(), plain.end()));
  if (!pin) return false;
  return evaluate_challenge(pin_numeric(pin->str()), challenge_by, op) == answer;
}

Manufacturer::Manufacturer(World& world, std::string id, std::string email,
                           const std::vector<std::string>& catalog)
    : Agent(world, std::move(id), std::move(email), AgentRole::manufacturer),
      root_keys_(generate_keypair(world.rng(), KeyPurpose::did_root)),
      did_(derive_did(root_keys_.public_key)) {
  auto& vdr = world.vdr();
  vdr.publish_did(did_, id_);
  schema_ = publish_product_schema(vdr, did_.to_string());
  cred_def_ = publish_cred_def(vdr, schema_, did_);
  rev_reg_id_ = vdr.create_revocation_registry(did_.to_string());
  for (const auto& code : catalog) {
    ProductRecord p;
    p.product_code = code;
    products_.emplace(code, std::move(p));
  }
}

const ProductRecord* Manufacturer::product(const std::string& code) const {
  auto it = products_.find(code);
  return it == products_.end() ? nullptr : &it->second;
}

std::vector<ClaimantAttribute>::iterator Manufacturer::find_claimant(
    const std::string& product_code) {
  return std::find_if(claimants_.begin(), claimants_.end(),
                      [&](const auto& c) { return c.product_code == product_code; });
}

bool Manufacturer::may_open_flow(const Connection&, MessageKind kind) const {
  return kind == MessageKind::ownership_claim_req || kind == MessageKind::ownership_transfer_req;
}

Verdict Manufacturer::on_https(const std::string& from, const HttpsMessage& msg) {
  if (const auto* req = msg.payload.as<ProductSellingReq>()) {
    return handle_selling_req(from, msg.nonce, *req);
  }
  return Verdict::reject("unsupported-kind");
}

Verdict Manufacturer::on_message(Connection& conn, const OpenedMessage& msg) {
  const auto& p = msg.payload;
  if (const auto* m = p.as<OwnershipClaimReq>()) {
    return m->is_new_product() ? handle_new_product_claim(conn, msg.nonce, *m)
                               : handle_used_product_claim(conn, msg.nonce, *m);
  }
  if (const auto* m = p.as<OwnershipTransferReq>()) return handle_transfer_req(conn, msg.nonce, *m);
  if (const auto* m = p.as<OwnershipProofResp>()) return handle_proof_resp(conn, msg.nonce, *m);
  if (const auto* m = p.as<PinChallengeResp>()) return handle_challenge_resp(conn, msg.nonce, *m);
  if (const auto* m = p.as<RevokeVcResp>()) return handle_revoke_resp(conn, msg.nonce, *m);
  if (const auto* m = p.as<OwnershipClaimAck>()) return handle_claim_ack(conn, msg.nonce, *m);
  return Verdict::reject("unsupported-kind");
}

Verdict Manufacturer::handle_selling_req(const std::string& from, const Nonce& nonce,
                                         const ProductSellingReq& req) {
  auto reply = [&](AckStatus s, std::optional<Tid> tid) {
    send_https(from, nonce, MessagePayload{ProductSellingResp{s, tid}});
  };
  auto it = products_.find(req.product.product_code);
  if (it == products_.end()) {
    reply(AckStatus::rejected, std::nullopt);
    return Verdict::reject("unknown-product");
  }
  ProductRecord& product = it->second;
  if (product.status != ProductStatus::registered ||
      find_claimant(product.product_code) != claimants_.end()) {
    reply(AckStatus::rejected, std::nullopt);
    return Verdict::reject("already-sold");
  }
  if (req.product.email.empty()) {
    reply(AckStatus::rejected, std::nullopt);
    return Verdict::reject("missing-email");
  }
  product.distributor_id = req.product.distributor_id.empty() ? from : req.product.distributor_id;
  product.email = req.product.email;
  product.first_purchase_date = world_.now();
  product.last_purchase_date = world_.now();
  product.previously_sold_count = 0;

  ClaimantAttribute entry;
  entry.product_code = product.product_code;
  entry.tid = Tid::generate(world_.rng());
  entry.pin = Pin::generate(world_.rng());
  const Pin pin = std::get<Pin>(entry.pin);
  const Tid tid = entry.tid;
  claimants_.push_back(std::move(entry));

  reply(AckStatus::accepted, tid);
  world_.send_email(id_, OobMessage{product.email, "PIN", nonce, pin.str()});
  world_.audit("secret-generated", Json{{"owner", id_},
                                        {"product", product.product_code},
                                        {"pin", pin.str()}});
  return Verdict::ok();
}

VerifiableCredential Manufacturer::issue(ProductRecord& product) {
  auto vc = generate_vc(product, cred_def_, root_keys_.private_key, world_.vdr(), rev_reg_id_,
                        world_.now());
  product.current_credential_id = vc.credential_id;
  issued_.push_back(IssuedCredential{product.product_code, vc.credential_id, world_.now()});
  world_.audit("vc-issued", Json{{"product", product.product_code},
                                 {"credential_id", vc.credential_id},
                                 {"holder_conn", product.conn_id}});
  return vc;
}

void Manufacturer::reject_claim(Connection& conn, const Nonce& nonce) {
  send(conn, nonce, claim_resp(AckStatus::rejected));
}

Verdict Manufacturer::handle_new_product_claim(Connection& conn, const Nonce& nonce,
                                               const OwnershipClaimReq& req) {
  const Pin& pin = std::get<Pin>(req.secret);
  auto entry = std::find_if(claimants_.begin(), claimants_.end(), [&](const auto& c) {
    return c.is_new_product() && c.tid == req.tid;
  });
  if (entry == claimants_.end() || std::get<Pin>(entry->pin) != pin) {
    reject_claim(conn, nonce);
    return Verdict::reject("claim-invalid");
  }
  auto it = products_.find(entry->product_code);
  if (it == products_.end()) {
    reject_claim(conn, nonce);
    return Verdict::reject("unknown-product");
  }
  ProductRecord& product = it->second;
  product.conn_id = conn.conn_id;
  product.status = ProductStatus::sold;
  claimants_.erase(entry);
  auto vc = issue(product);
  conn.session.expect(nonce, MessageKind::ownership_claim_ack);
  send(conn, nonce, claim_resp(AckStatus::accepted, std::move(vc)));
  return Verdict::ok();
}

Verdict Manufacturer::handle_transfer_req(Connection& conn, const Nonce& nonce,
                                          const OwnershipTransferReq& req) {
  auto refuse = [&](std::string why) {
    send(conn, nonce, MessagePayload{OwnershipTransferResp{AckStatus::rejected}});
    return Verdict::reject(std::move(why));
  };
  auto it = products_.find(req.product_code);
  if (it == products_.end()) return refuse("unknown-product");
  if (find_claimant(req.product_code) != claimants_.end()) return refuse("duplicate-transfer");
  if (it->second.status != ProductStatus::sold) return refuse("not-transferable");

  ClaimantAttribute entry;
  entry.product_code = req.product_code;
  entry.tid = req.tid;
  entry.pin = req.encrypted_pin;
  entry.seller_conn = conn.conn_id;
  entry.transfer_nonce = nonce;
  entry.proof_challenge = generate_nonce(world_.rng());
  ProofRequest pr{product_attribute_names(), entry.proof_challenge};
  claimants_.push_back(std::move(entry));
  it->second.status = ProductStatus::transfer_pending;

  conn.session.expect(nonce, MessageKind::ownership_proof_resp);
  send(conn, nonce, MessagePayload{OwnershipProofReq{pr}});
  ++proof_requests_sent_;
  return Verdict::ok();
}

void Manufacturer::rollback(std::vector<ClaimantAttribute>::iterator entry) {
  auto it = products_.find(entry->product_code);
  if (it != products_.end() && it->second.status == ProductStatus::transfer_pending) {
    it->second.status = ProductStatus::sold;
  }
  claimants_.erase(entry);
}

Verdict Manufacturer::handle_proof_resp(Connection& conn, const Nonce& nonce,
                                        const OwnershipProofResp& resp) {
  auto entry = std::find_if(claimants_.begin(), claimants_.end(), [&](const auto& c) {
    return !c.is_new_product() && !c.authorized && c.seller_conn == conn.conn_id &&
           c.transfer_nonce == nonce;
  });
  if (entry == claimants_.end()) return Verdict::reject("no-pending-transfer");

  const auto& p = resp.presentation;
  const ProductRecord& product = products_.at(entry->product_code);
  std::string why;
  auto report = verify_presentation(p, entry->proof_challenge, world_.vdr());
  if (!report.valid) {
    why = "proof-" + std::string(to_string(report.reasons.front()));
  } else if (p.credential.cred_def_id != cred_def_.cred_def_id) {
    why = "proof-foreign-issuer";
  } else if (p.holder_did != conn.remote_did) {
    why = "proof-holder-not-connection";
  } else if (p.credential.attribute("productCode") != entry->product_code) {
    why = "proof-wrong-product";
  } else if (p.credential.attribute("ConnID") != conn.conn_id) {
    why = "proof-wrong-connection";
  } else if (product.current_credential_id != p.credential.credential_id) {
    why = "proof-stale-credential";
  }
  if (!why.empty()) {
    rollback(entry);
    send(conn, nonce, MessagePayload{OwnershipTransferResp{AckStatus::rejected}});
    return Verdict::reject(why);
  }
  entry->authorized = true;
  send(conn, nonce, MessagePayload{OwnershipTransferResp{AckStatus::accepted}});
  return Verdict::ok();
}

Verdict Manufacturer::handle_used_product_claim(Connection& conn, const Nonce& nonce,
                                                const OwnershipClaimReq& req) {
  auto entry = std::find_if(claimants_.begin(), claimants_.end(), [&](const auto& c) {
    return !c.is_new_product() && c.authorized && c.tid == req.tid;
  });
  if (entry == claimants_.end() || entry->key) {
    reject_claim(conn, nonce);
    return Verdict::reject(entry == claimants_.end() ? "unknown-tid" : "already-claimed");
  }
  auto challenge = PinChallenge::draw(world_.rng(), req.tid);
  entry->key = std::get<SymmetricKey>(req.secret);
  entry->challenge_by = challenge.challenge_by;
  entry->challenge_type = challenge.challenge_type;
  entry->buyer_conn = conn.conn_id;
  entry->claim_nonce = nonce;
  conn.session.expect(nonce, MessageKind::pin_challenge_resp);
  send(conn, nonce,
       MessagePayload{PinChallengeReq{req.tid, challenge.challenge_by, challenge.challenge_type}});
  return Verdict::ok();
}

Verdict Manufacturer::handle_challenge_resp(Connection& conn, const Nonce& nonce,
                                            const PinChallengeResp& resp) {
  auto entry = std::find_if(claimants_.begin(), claimants_.end(), [&](const auto& c) {
    return !c.is_new_product() && c.key && c.buyer_conn == conn.conn_id &&
           c.claim_nonce == nonce;
  });
  if (entry == claimants_.end() || entry->tid != resp.tid) {
    return Verdict::reject("no-pending-challenge");
  }
  if (!challenge_accepts(std::get<Bytes>(entry->pin), *entry->key, *entry->challenge_by,
                         *entry->challenge_type, resp.challenge_result)) {
    rollback(entry);
    reject_claim(conn, nonce);
    return Verdict::reject("challenge-failed");
  }

  ProductRecord& product = products_.at(entry->product_code);
  Connection* seller = connection(entry->seller_conn);
  if (product.current_credential_id) {
    world_.vdr().revoke_credential(did_.to_string(), rev_reg_id_, *product.current_credential_id);
    world_.audit("vc-revoked", Json{{"product", product.product_code},
                                    {"credential_id", *product.current_credential_id}});
  }
  const std::string old_id = product.current_credential_id.value_or("");
  product.status = ProductStatus::transferred;
  product.conn_id = conn.conn_id;
  product.previously_sold_count += 1;
  product.last_purchase_date = world_.now();
  product.email = conn.peer_label;
  product.current_credential_id.reset();
  world_.audit("transfer-committed", Json{{"product", product.product_code},
                                          {"buyer_conn", conn.conn_id}});
  world_.audit("sold-count", Json{{"product", product.product_code},
                                  {"count", product.previously_sold_count}});

  const std::string seller_conn = entry->seller_conn;
  const Nonce revoke_nonce = entry->transfer_nonce;
  claimants_.erase(entry);
  if (seller && !old_id.empty()) {
    seller->session.expect(revoke_nonce, MessageKind::revoke_vc_resp);
    send(*seller, revoke_nonce, MessagePayload{RevokeVc{old_id, product.product_code}});
    notices_.push_back(RevocationNotice{product.product_code, old_id, seller_conn, revoke_nonce});
  }

  product.status = ProductStatus::sold;
  auto vc = issue(product);
  const Nonce n2 = generate_nonce(world_.rng());
  conn.session.expect(n2, MessageKind::ownership_claim_ack);
  send(conn, n2, claim_resp(AckStatus::accepted, std::move(vc)));
  return Verdict::ok();
}

Verdict Manufacturer::handle_revoke_resp(Connection& conn, const Nonce& nonce,
                                         const RevokeVcResp&) {
  auto it = std::find_if(notices_.begin(), notices_.end(), [&](const auto& n) {
    return n.seller_conn == conn.conn_id && n.revoke_nonce == nonce;
  });
  if (it == notices_.end()) return Verdict::reject("no-pending-revocation");
  notices_.erase(it);
  return Verdict::ok();
}

Verdict Manufacturer::handle_claim_ack(Connection&, const Nonce&, const OwnershipClaimAck& ack) {
  return ack.status == AckStatus::accepted ? Verdict::ok() : Verdict::reject("holder-declined");
}

void Manufacturer::dump_role_state(Json& out) const {
  out["did"] = did_.to_string();
  out["cred_def_id"] = cred_def_.cred_def_id;
  out["revocation_registry_id"] = rev_reg_id_;
  Json products = Json::object();
  for (const auto& [code, p] : products_) products[code] = product_json(p);
  out["products"] = std::move(products);
  Json claimants = Json::array();
  for (const auto& c : claimants_) {
    Json j;
    j["productCode"] = c.product_code;
    j["tid"] = c.tid.hex();
    if (const auto* pin = std::get_if<Pin>(&c.pin)) {
      j["pin"] = pin->str();
    } else {
      j["encrypted_pin"] = to_hex(std::get<Bytes>(c.pin));
    }
    j["key"] = c.key ? Json(to_hex(c.key->key_bytes)) : Json();
    j["challengeBy"] = c.challenge_by ? Json(*c.challenge_by) : Json();
    j["challengeType"] =
        c.challenge_type ? Json(std::string(1, symbol(*c.challenge_type))) : Json();
    j["seller_conn"] = c.seller_conn;
    j["authorized"] = c.authorized;
    j["buyer_conn"] = c.buyer_conn;
    claimants.push_back(std::move(j));
  }
  out["claimants"] = std::move(claimants);
  Json notices = Json::array();
  for (const auto& n : notices_) {
    notices.push_back(Json{{"product", n.product_code},
                           {"credential_id", n.credential_id},
                           {"seller_conn", n.seller_conn}});
  }
  out["revocation_notices"] = std::move(notices);
  Json issued = Json::array();
  for (const auto& i : issued_) {
    issued.push_back(Json{{"product", i.product_code},
                          {"credential_id", i.credential_id},
                          {"issued_at", i.issued_at}});
  }
  out["issued"] = std::move(issued);
  out["proof_requests_sent"] = proof_requests_sent_;
}

}  // namespace ssiown
