#include "ssiown/world.hpp"

#include <ostream>
#include <stdexcept>

#include "ssiown/adversary.hpp"
#include "ssiown/distributor.hpp"
#include "ssiown/manufacturer.hpp"
#include "ssiown/wallet.hpp"

namespace ssiown {

std::string_view to_string(AdversaryAction::Kind k) {
  switch (k) {
    case AdversaryAction::Kind::replay: return "replay";
    case AdversaryAction::Kind::tamper: return "tamper";
    case AdversaryAction::Kind::drop: return "drop";
    case AdversaryAction::Kind::spoof: return "spoof";
  }
  return "unknown";
}

// --- Mediator ---------------------------------------------------------------

PublicKey Mediator::register_agent(Rng& rng, const std::string& agent_id,
                                   const PublicKey& agent_key) {
  Registration reg{generate_keypair(rng), agent_key};
  PublicKey pk = reg.key_for_agent.public_key;
  registrations_[agent_id] = std::move(reg);
  return pk;
}

const Mediator::Registration* Mediator::registration(const std::string& agent_id) const {
  auto it = registrations_.find(agent_id);
  return it == registrations_.end() ? nullptr : &it->second;
}

void Mediator::add_route(const std::string& connection_did, const std::string& agent_id) {
  routes_[connection_did] = agent_id;
}

std::optional<std::string> Mediator::route(const std::string& connection_did) const {
  auto it = routes_.find(connection_did);
  if (it == routes_.end()) return std::nullopt;
  return it->second;
}

std::size_t Mediator::queued(const std::string& agent_id) const {
  auto it = queues_.find(agent_id);
  return it == queues_.end() ? 0 : it->second.size();
}

Json Mediator::dump() const {
  Json out;
  out["posture"] = posture_ == MediatorPosture::malicious ? "malicious" : "honest-but-curious";
  Json regs = Json::object();
  for (const auto& [id, r] : registrations_) {
    regs[id] = Json{{"mediator_key", to_hex(r.key_for_agent.public_key.bytes)},
                    {"agent_key", to_hex(r.agent_key.bytes)}};
  }
  out["registrations"] = std::move(regs);
  Json routes = Json::object();
  for (const auto& [did, id] : routes_) routes[did] = id;
  out["routes"] = std::move(routes);
  Json queues = Json::object();
  for (const auto& [id, q] : queues_) {
    Json arr = Json::array();
    for (const auto& e : q) arr.push_back(to_hex(e.envelope.ciphertext));
    queues[id] = std::move(arr);
  }
  out["queues"] = std::move(queues);
  return out;
}

Json Mediator::dump_full() const {
  Json out = dump();
  Json seen = Json::array();
  for (const auto& o : observations_) {
    seen.push_back(Json{{"seq", o.seq},
                        {"from", o.from},
                        {"recipient_did", o.recipient_did},
                        {"inner", to_hex(o.inner)}});
  }
  out["observations"] = std::move(seen);
  return out;
}

// --- World ------------------------------------------------------------------

World::World(WorldOptions options) : options_(options), rng_(options.seed) {
  mediator_.set_posture(options.posture);
}

World::~World() = default;

template <typename T>
T& World::add_agent(std::unique_ptr<T> a) {
  if (agents_.count(a->id()) != 0 || a->id() == kMediatorId) {
    throw std::invalid_argument("duplicate agent id " + a->id());
  }
  T& ref = *a;
  register_with_mediator(ref);
  agent_order_.push_back(ref.id());
  agents_.emplace(ref.id(), std::move(a));
  return ref;
}

void World::register_with_mediator(Agent& a) {
  a.set_mediator_key(mediator_.register_agent(rng_, a.id(), a.mediator_facing_keys().public_key));
}

Manufacturer& World::add_manufacturer(const std::string& id,
                                      const std::vector<std::string>& catalog) {
  return add_agent(std::make_unique<Manufacturer>(*this, id, id + "@mf.example", catalog));
}

Distributor& World::add_distributor(const std::string& id, const std::string& manufacturer_id) {
  return add_agent(std::make_unique<Distributor>(*this, id, id + "@ds.example", manufacturer_id));
}

Wallet& World::add_wallet(const std::string& id, const std::string& email) {
  return add_agent(std::make_unique<Wallet>(*this, id, email));
}

Adversary& World::add_adversary(const std::string& id, const std::string& email) {
  return add_agent(std::make_unique<Adversary>(*this, id, email));
}

Agent* World::agent(const std::string& id) {
  auto it = agents_.find(id);
  return it == agents_.end() ? nullptr : it->second.get();
}

const Agent* World::agent(const std::string& id) const {
  auto it = agents_.find(id);
  return it == agents_.end() ? nullptr : it->second.get();
}

namespace {
template <typename T>
T& checked_cast(Agent* a, const std::string& id, const char* what) {
  auto* t = dynamic_cast<T*>(a);
  if (!t) throw std::invalid_argument(id + " is not a " + what);
  return *t;
}
}  // namespace

Manufacturer& World::manufacturer(const std::string& id) {
  return checked_cast<Manufacturer>(agent(id), id, "manufacturer");
}
Distributor& World::distributor(const std::string& id) {
  return checked_cast<Distributor>(agent(id), id, "distributor");
}
Wallet& World::wallet(const std::string& id) { return checked_cast<Wallet>(agent(id), id, "wallet"); }
Adversary& World::adversary(const std::string& id) {
  return checked_cast<Adversary>(agent(id), id, "adversary");
}

std::vector<std::string> World::agent_ids() const { return agent_order_; }

std::optional<std::string> World::agent_by_email(const std::string& email) const {
  for (const auto& id : agent_order_) {
    if (agents_.at(id)->email() == email) return id;
  }
  return std::nullopt;
}

std::pair<std::string, std::string> World::connect(const std::string& inviter,
                                                   const std::string& invitee) {
  Agent* a = agent(inviter);
  Agent* b = agent(invitee);
  if (!a || !b) throw std::invalid_argument("connect: unknown agent");
  auto request = b->accept_invitation(a->create_invitation());
  auto response = a->complete_invitation(request);
  Connection& b_side = b->finish_connection(inviter, response);
  Connection* a_side = a->connection_by_local_did(response.did);
  mediator_.add_route(a_side->local_did, inviter);
  mediator_.add_route(b_side.local_did, invitee);
  const std::uint64_t seq = next_seq_++;
  Json line{{"seq", seq},            {"tick", now_},           {"from", invitee},
            {"to", inviter},         {"channel", "ssi"},       {"kind", "connection"},
            {"verdict", "accepted"}, {"conn", a_side->conn_id}};
  trace_.push_back(TraceRecord{seq, now_, std::move(line)});
  return {a_side->conn_id, b_side.conn_id};
}

std::uint64_t World::schedule(DeliveryEvent ev) {
  ev.seq = next_seq_++;
  if (ev.deliver_at <= now_) ev.deliver_at = now_ + 1;
  if (ev.cause != 0) children_[ev.cause].push_back(ev.seq);
  for (auto& armed : armed_) {
    if (!armed.target && armed.match(ev)) {
      armed.target = ev.seq;
      armed.action.target_seq = ev.seq;
      interceptors_[ev.seq] = armed.action;
      break;
    }
  }
  queue_.push(Pending{ev.deliver_at, ev.seq});
  wire_index_[ev.seq] = wire_log_.size();
  wire_log_.push_back(WireRecord{ev, std::nullopt});
  scheduled_.emplace(ev.seq, std::move(ev));
  return next_seq_ - 1;
}

void World::send_ssi(Agent& from, Connection& conn, const Nonce& nonce,
                     const MessagePayload& payload) {
  DeliveryEvent ev;
  ev.from = from.id();
  ev.to = std::string(kMediatorId);
  ev.channel = Channel::ssi;
  ev.body = seal(rng_, conn.local, conn.remote_key, from.mediator_key(), conn.remote_did, nonce,
                 payload);
  ev.label = std::string(to_string(payload.kind()));
  ev.cause = processing_ ? current_seq_ : 0;
  schedule(std::move(ev));
}

void World::send_https(const std::string& from, const std::string& to, const Nonce& nonce,
                       const MessagePayload& payload) {
  DeliveryEvent ev;
  ev.from = from;
  ev.to = to;
  ev.channel = Channel::https;
  ev.body = HttpsMessage{nonce, payload};
  ev.label = std::string(to_string(payload.kind()));
  ev.cause = processing_ ? current_seq_ : 0;
  schedule(std::move(ev));
}

void World::send_email(const std::string& from, const OobMessage& mail) {
  DeliveryEvent ev;
  ev.from = from;
  ev.to = agent_by_email(mail.to_email).value_or("");
  ev.channel = Channel::oob_email;
  ev.body = mail;
  ev.label = mail.subject;
  ev.cause = processing_ ? current_seq_ : 0;
  schedule(std::move(ev));
}

void World::set_online(const std::string& agent_id, bool online) {
  Agent* a = agent(agent_id);
  if (!a) throw std::invalid_argument("unknown agent " + agent_id);
  a->set_online(online);
  if (!online) return;
  auto& q = mediator_.queue(agent_id);
  while (!q.empty()) {
    DeliveryEvent ev;
    ev.from = std::string(kMediatorId);
    ev.to = agent_id;
    ev.channel = Channel::ssi;
    ev.body = std::move(q.front().envelope);
    ev.label = std::move(q.front().label);
    ev.cause = q.front().cause;
    ev.detail = "drained";
    q.pop_front();
    schedule(std::move(ev));
  }
}

Verdict World::process_at_mediator(const DeliveryEvent& ev) {
  const auto* env = std::get_if<Envelope>(&ev.body);
  if (!env || ev.channel != Channel::ssi) return Verdict::reject("malformed");
  const auto* reg = mediator_.registration(ev.from);
  if (!reg) return Verdict::reject("unregistered-sender");
  auto routed = unseal_at_mediator(reg->key_for_agent.private_key, *env);
  if (!routed) return Verdict::reject(std::string(to_string(routed.error())));
  auto target = mediator_.route(routed->recipient_did);
  const auto* target_reg = target ? mediator_.registration(*target) : nullptr;
  if (!target_reg) return Verdict::reject("dead-letter");
  mediator_.observe(Mediator::Observation{ev.seq, ev.from, routed->recipient_did, routed->inner});

  Envelope wrapped = wrap_for_delivery(rng_, target_reg->agent_key, *routed);
  Agent* recipient = agent(*target);
  if (!recipient->online()) {
    mediator_.queue(*target).push_back(Mediator::Queued{std::move(wrapped), ev.label, ev.seq});
    return Verdict::ok("queued");
  }
  DeliveryEvent out;
  out.from = std::string(kMediatorId);
  out.to = *target;
  out.channel = Channel::ssi;
  out.body = wrapped;
  out.label = ev.label;
  out.cause = ev.seq;
  out.injected = ev.injected;
  schedule(out);
  if (mediator_.posture() == MediatorPosture::malicious) {
    out.detail = "mediator-duplicate";
    out.injected = true;
    injected_.push_back(schedule(std::move(out)));
  }
  return Verdict::ok("forwarded");
}

bool World::step() {
  if (queue_.empty()) return false;
  const Pending next = queue_.top();
  queue_.pop();
  now_ = next.deliver_at;
  vdr_.set_clock(now_);
  current_seq_ = next.seq;
  DeliveryEvent ev = std::move(scheduled_.at(next.seq));
  scheduled_.erase(next.seq);

  processing_ = true;
  std::optional<Verdict> verdict;
  if (auto it = interceptors_.find(ev.seq); it != interceptors_.end()) {
    const AdversaryAction& a = it->second;
    if (a.kind == AdversaryAction::Kind::drop) {
      verdict = Verdict::reject("dropped");
      ev.detail = "dropped";
    } else if (a.kind == AdversaryAction::Kind::tamper) {
      if (auto* env = std::get_if<Envelope>(&ev.body); env && !env->ciphertext.empty()) {
        auto& byte = env->ciphertext[a.byte_index % env->ciphertext.size()];
        byte = a.new_byte ? *a.new_byte : static_cast<std::uint8_t>(byte ^ a.xor_mask);
        ev.detail = "tampered@" + std::to_string(a.byte_index % env->ciphertext.size());
        ev.injected = true;
      }
    }
  }
  if (!verdict) {
    if (ev.to == kMediatorId) {
      verdict = process_at_mediator(ev);
    } else if (Agent* a = agent(ev.to)) {
      verdict = a->receive(ev);
      if (ev.channel == Channel::oob_email && options_.weak_email) {
        const auto& mail = std::get<OobMessage>(ev.body);
        for (const auto& id : agent_order_) {
          Agent* eve = agents_.at(id).get();
          if (eve->role() == AgentRole::adversary && id != ev.to) {
            eve->deliver_mail(mail);
            intercepted_email_.push_back(mail);
          }
        }
      }
    } else {
      verdict = Verdict::reject("dead-letter");
    }
  }
  processing_ = false;

  wire_log_[wire_index_.at(ev.seq)].verdict = *verdict;
  record_trace(ev, *verdict);
  for (auto& line : pending_audits_) {
    trace_.push_back(TraceRecord{ev.seq, now_, std::move(line)});
  }
  pending_audits_.clear();
  for (const auto& hook : hooks_) hook(*this, ev, *verdict);
  return true;
}

RunReport World::run_until_quiescent(std::uint64_t max_ticks) {
  RunReport report;
  const std::uint64_t horizon = now_ + max_ticks;
  while (!queue_.empty()) {
    if (queue_.top().deliver_at > horizon) {
      report.timed_out = true;
      break;
    }
    step();
    ++report.events;
  }
  report.final_tick = now_;
  return report;
}

std::optional<std::uint64_t> World::next_seq() const {
  if (queue_.empty()) return std::nullopt;
  return queue_.top().seq;
}

std::optional<std::uint64_t> World::inject(AdversaryAction action) {
  const WireRecord* target = wire(action.target_seq);
  auto replay_copy = [&](std::string detail) {
    DeliveryEvent ev = target->event;
    ev.injected = true;
    ev.cause = 0;
    ev.detail = std::move(detail);
    ev.deliver_at = std::max(action.trigger_tick, now_ + 1);
    return ev;
  };
  std::optional<std::uint64_t> seq;
  switch (action.kind) {
    case AdversaryAction::Kind::replay:
      if (!target) throw std::invalid_argument("replay: no such event");
      seq = schedule(replay_copy("replay-of-" + std::to_string(action.target_seq)));
      break;
    case AdversaryAction::Kind::spoof: {
      DeliveryEvent ev;
      ev.from = action.forged_sender;
      ev.to = std::string(kMediatorId);
      ev.channel = Channel::ssi;
      ev.body = action.forged;
      ev.label = action.label;
      ev.injected = true;
      ev.detail = "spoof";
      ev.deliver_at = std::max(action.trigger_tick, now_ + 1);
      seq = schedule(std::move(ev));
      break;
    }
    case AdversaryAction::Kind::tamper:
      if (target && target->verdict) {
        DeliveryEvent ev = replay_copy("tampered-copy-of-" + std::to_string(action.target_seq));
        if (auto* env = std::get_if<Envelope>(&ev.body); env && !env->ciphertext.empty()) {
          auto& byte = env->ciphertext[action.byte_index % env->ciphertext.size()];
          byte = action.new_byte ? *action.new_byte
                                 : static_cast<std::uint8_t>(byte ^ action.xor_mask);
        }
        seq = schedule(std::move(ev));
        break;
      }
      [[fallthrough]];
    case AdversaryAction::Kind::drop:
      interceptors_[action.target_seq] = action;
      seq = action.target_seq;
      break;
  }
  if (seq) injected_.push_back(*seq);
  return seq;
}

std::size_t World::arm(std::function<bool(const DeliveryEvent&)> match, AdversaryAction action) {
  armed_.push_back(Armed{std::move(match), std::move(action), std::nullopt});
  return armed_.size() - 1;
}

std::optional<std::uint64_t> World::armed_target(std::size_t handle) const {
  if (handle >= armed_.size()) return std::nullopt;
  return armed_[handle].target;
}

std::optional<Verdict> World::final_verdict(std::uint64_t seq) const {
  const WireRecord* w = wire(seq);
  if (!w || !w->verdict) return std::nullopt;
  if (w->event.to == kMediatorId && w->verdict->accepted) {
    auto it = children_.find(seq);
    if (it == children_.end()) {
      if (w->verdict->reason == "queued") return std::nullopt;
      return w->verdict;
    }
    // first child is the forward; a malicious mediator's duplicate follows
    return final_verdict(it->second.front());
  }
  return w->verdict;
}

AdversaryAction World::make_spoof(const std::string& forged_sender,
                                  const std::string& recipient_did, const PublicKey& endpoint_key,
                                  const MessagePayload& payload) {
  const auto* reg = mediator_.registration(forged_sender);
  if (!reg) throw std::invalid_argument("spoof: sender has no mediator registration");
  const KeyPair throwaway = generate_keypair(rng_);
  AdversaryAction a;
  a.kind = AdversaryAction::Kind::spoof;
  a.forged_sender = forged_sender;
  a.forged = seal(rng_, throwaway, endpoint_key, reg->key_for_agent.public_key, recipient_did,
                  generate_nonce(rng_), payload);
  a.label = std::string(to_string(payload.kind()));
  return a;
}

const WireRecord* World::wire(std::uint64_t seq) const {
  auto it = wire_index_.find(seq);
  return it == wire_index_.end() ? nullptr : &wire_log_[it->second];
}

void World::record_trace(const DeliveryEvent& ev, const Verdict& v) {
  Json line;
  line["seq"] = ev.seq;
  line["tick"] = now_;
  line["from"] = ev.from;
  line["to"] = ev.to;
  line["channel"] = std::string(to_string(ev.channel));
  line["kind"] = ev.label;
  line["verdict"] = v.str();
  if (ev.cause != 0) line["cause"] = ev.cause;
  if (ev.injected) line["injected"] = true;
  if (!ev.detail.empty()) line["detail"] = ev.detail;
  if (const auto* env = std::get_if<Envelope>(&ev.body)) line["wire"] = to_hex(env->ciphertext);
  trace_.push_back(TraceRecord{ev.seq, now_, std::move(line)});
}

void World::audit(std::string what, Json fields) {
  Json line;
  line["seq"] = current_seq_;
  line["tick"] = now_;
  line["audit"] = std::move(what);
  for (auto& [k, v] : fields.items()) line[k] = v;
  if (processing_) {
    pending_audits_.push_back(std::move(line));
  } else {
    trace_.push_back(TraceRecord{current_seq_, now_, std::move(line)});
  }
}

void World::write_trace(std::ostream& out) const {
  for (const auto& r : trace_) out << r.line.dump() << '\n';
}

Json World::dump_state() const {
  Json out;
  Json agents = Json::object();
  for (const auto& id : agent_order_) agents[id] = agents_.at(id)->dump();
  out["agents"] = std::move(agents);
  out["mediator"] = mediator_.dump();
  Json revoked = Json::array();
  for (const auto& e : vdr_.entries()) {
    if (e.kind == EntryKind::revocation_event) revoked.push_back(e.entry_id);
  }
  out["vdr"] = Json{{"entries", vdr_.entries().size()}, {"revocation_events", revoked}};
  return out;
}

}  // namespace ssiown
