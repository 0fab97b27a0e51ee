#include "ssiown/agent.hpp"

#include "ssiown/world.hpp"

namespace ssiown {

std::string_view to_string(AgentRole r) {
  switch (r) {
    case AgentRole::manufacturer: return "manufacturer";
    case AgentRole::distributor: return "distributor";
    case AgentRole::wallet: return "wallet";
    case AgentRole::adversary: return "adversary";
  }
  return "unknown";
}

std::string_view to_string(Channel c) {
  switch (c) {
    case Channel::ssi: return "ssi";
    case Channel::oob_email: return "oob-email";
    case Channel::https: return "https";
  }
  return "unknown";
}

Agent::Agent(World& world, std::string id, std::string email, AgentRole role)
    : world_(world),
      id_(std::move(id)),
      email_(std::move(email)),
      role_(role),
      mediator_keys_(generate_keypair(world.rng())) {}

Invitation Agent::create_invitation() const {
  return Invitation{id_, email_, std::string(kMediatorId)};
}

ConnectionRequest Agent::accept_invitation(const Invitation& invitation) {
  Connection c;
  c.local = generate_keypair(world_.rng());
  c.local_did = derive_did(c.local.public_key).to_string();
  c.peer = invitation.inviter;
  c.peer_label = invitation.label;
  ConnectionRequest req{id_, email_, c.local_did, c.local.public_key};
  pending_[invitation.inviter] = std::move(c);
  return req;
}

ConnectionResponse Agent::complete_invitation(const ConnectionRequest& request) {
  Connection c;
  c.conn_id = id_ + "-conn-" + std::to_string(next_conn_++);
  c.local = generate_keypair(world_.rng());
  c.local_did = derive_did(c.local.public_key).to_string();
  c.remote_key = request.key;
  c.remote_did = request.did;
  c.peer = request.invitee;
  c.peer_label = request.label;
  ConnectionResponse resp{c.local_did, c.local.public_key};
  connections_.emplace(c.conn_id, std::move(c));
  return resp;
}

Connection& Agent::finish_connection(const std::string& inviter,
                                     const ConnectionResponse& response) {
  auto it = pending_.find(inviter);
  if (it == pending_.end()) throw std::logic_error("no pending invitation from " + inviter);
  Connection c = std::move(it->second);
  pending_.erase(it);
  c.conn_id = id_ + "-conn-" + std::to_string(next_conn_++);
  c.remote_key = response.key;
  c.remote_did = response.did;
  auto [pos, _] = connections_.emplace(c.conn_id, std::move(c));
  return pos->second;
}

Connection* Agent::connection(const std::string& conn_id) {
  auto it = connections_.find(conn_id);
  return it == connections_.end() ? nullptr : &it->second;
}

const Connection* Agent::connection(const std::string& conn_id) const {
  auto it = connections_.find(conn_id);
  return it == connections_.end() ? nullptr : &it->second;
}

Connection* Agent::connection_by_local_did(const std::string& did) {
  for (auto& [id, c] : connections_) {
    if (c.local_did == did) return &c;
  }
  return nullptr;
}

Connection* Agent::connection_to(const std::string& peer) {
  Connection* best = nullptr;
  std::uint64_t best_n = 0;
  for (auto& [id, c] : connections_) {
    if (c.peer != peer) continue;
    // conn ids end in a counter; pick the newest
    std::uint64_t n = std::stoull(id.substr(id.rfind('-') + 1));
    if (!best || n > best_n) {
      best = &c;
      best_n = n;
    }
  }
  return best;
}

void Agent::send(Connection& conn, const Nonce& nonce, const MessagePayload& payload) {
  world_.send_ssi(*this, conn, nonce, payload);
}

void Agent::send_https(const std::string& to, const Nonce& nonce, const MessagePayload& payload) {
  world_.send_https(id_, to, nonce, payload);
}

Verdict Agent::on_https(const std::string&, const HttpsMessage&) {
  return Verdict::reject("unsupported-channel");
}

Verdict Agent::receive(const DeliveryEvent& event) {
  switch (event.channel) {
    case Channel::ssi:
      return receive_ssi(event);
    case Channel::oob_email:
      inbox_.push_back(std::get<OobMessage>(event.body));
      return Verdict::ok("delivered");
    case Channel::https: {
      const auto& msg = std::get<HttpsMessage>(event.body);
      const MessageKind kind = msg.payload.kind();
      if (auto bad = validate_nonce_echo(https_sessions_[event.from], msg.nonce, kind,
                                         may_open_https(kind))) {
        return Verdict::reject(std::string(to_string(*bad)));
      }
      return on_https(event.from, msg);
    }
  }
  return Verdict::reject("unknown-channel");
}

Verdict Agent::receive_ssi(const DeliveryEvent& event) {
  const auto* env = std::get_if<Envelope>(&event.body);
  if (!env) return Verdict::reject(std::string(to_string(Rejection::malformed)));
  auto routed = unseal_at_mediator(mediator_keys_.private_key, *env);
  if (!routed) return Verdict::reject(std::string(to_string(routed.error())));
  Connection* conn = connection_by_local_did(routed->recipient_did);
  if (!conn) return Verdict::reject(std::string(to_string(Rejection::unknown_sender)));
  auto opened = unseal_at_endpoint(conn->local.private_key, conn->remote_key, routed->inner);
  if (!opened) return Verdict::reject(std::string(to_string(opened.error())));
  const MessageKind kind = opened->payload.kind();
  if (auto bad = validate_nonce_echo(conn->session, opened->nonce, kind,
                                     may_open_flow(*conn, kind))) {
    return Verdict::reject(std::string(to_string(*bad)));
  }
  return on_message(*conn, *opened);
}

Json session_to_json(const SessionState& s) {
  auto pairs = [](const std::set<std::pair<Nonce, MessageKind>>& set) {
    Json arr = Json::array();
    for (const auto& [n, k] : set) {
      arr.push_back(Json::array({to_hex(n.value), std::string(to_string(k))}));
    }
    return arr;
  };
  return Json{{"expected", pairs(s.expected())}, {"consumed", pairs(s.consumed_pairs())}};
}

Json Agent::dump() const {
  Json out;
  out["id"] = id_;
  out["role"] = std::string(to_string(role_));
  out["email"] = email_;
  out["online"] = online_;
  out["mediator_facing_key"] = to_hex(mediator_keys_.public_key.bytes);
  Json conns = Json::array();
  for (const auto& [id, c] : connections_) {
    conns.push_back(Json{{"conn_id", c.conn_id},
                         {"local_did", c.local_did},
                         {"local_key", to_hex(c.local.public_key.bytes)},
                         {"remote_did", c.remote_did},
                         {"remote_key", to_hex(c.remote_key.bytes)},
                         {"peer", c.peer},
                         {"peer_label", c.peer_label},
                         {"session", session_to_json(c.session)}});
  }
  out["connections"] = std::move(conns);
  Json https = Json::object();
  for (const auto& [peer, s] : https_sessions_) https[peer] = session_to_json(s);
  out["https_sessions"] = std::move(https);
  Json inbox = Json::array();
  for (const auto& m : inbox_) {
    inbox.push_back(Json{{"to", m.to_email},
                         {"subject", m.subject},
                         {"nonce", to_hex(m.nonce.value)},
                         {"value", m.value}});
  }
  out["inbox"] = std::move(inbox);
  Json role_state = Json::object();
  dump_role_state(role_state);
  out["state"] = std::move(role_state);
  return out;
}

}  // namespace ssiown
