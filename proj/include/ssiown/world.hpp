#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "ssiown/agent.hpp"
#include "ssiown/crypto.hpp"
#include "ssiown/events.hpp"
#include "ssiown/vdr.hpp"

namespace ssiown {

class Manufacturer;
class Distributor;
class Wallet;
class Adversary;

enum class MediatorPosture { honest_but_curious, malicious };

/// Store-and-forward relay. Peels the sender hop, looks up the recipient
/// connection DID, and re-wraps for the recipient or queues while offline.
class Mediator {
 public:
  struct Registration {
    KeyPair key_for_agent;    // MD's key pair dedicated to this agent
    PublicKey agent_key;      // the agent's mediator-facing public key
  };

  PublicKey register_agent(Rng& rng, const std::string& agent_id, const PublicKey& agent_key);
  bool registered(const std::string& agent_id) const { return registrations_.count(agent_id) != 0; }
  const Registration* registration(const std::string& agent_id) const;

  void add_route(const std::string& connection_did, const std::string& agent_id);
  std::optional<std::string> route(const std::string& connection_did) const;

  struct Queued {
    Envelope envelope;
    std::string label;
    std::uint64_t cause = 0;
  };
  std::deque<Queued>& queue(const std::string& agent_id) { return queues_[agent_id]; }
  std::size_t queued(const std::string& agent_id) const;

  void set_posture(MediatorPosture p) { posture_ = p; }
  MediatorPosture posture() const { return posture_; }

  /// What an honest-but-curious mediator remembers about each forward.
  struct Observation {
    std::uint64_t seq;
    std::string from;
    std::string recipient_did;
    Bytes inner;
  };
  void observe(Observation o) { observations_.push_back(std::move(o)); }
  const std::vector<Observation>& observations() const { return observations_; }

  /// Routing state: registrations, routes and queues.
  Json dump() const;
  /// dump() plus everything the mediator has observed in transit.
  Json dump_full() const;

 private:
  std::map<std::string, Registration> registrations_;
  std::map<std::string, std::string> routes_;
  std::map<std::string, std::deque<Queued>> queues_;
  std::vector<Observation> observations_;
  MediatorPosture posture_ = MediatorPosture::honest_but_curious;
};

struct AdversaryAction {
  enum class Kind { replay, tamper, drop, spoof };

  Kind kind = Kind::replay;
  std::uint64_t target_seq = 0;
  std::uint64_t trigger_tick = 0;
  // tamper: byte_index is taken modulo the ciphertext length. With no
  // new_byte the byte is xor-ed with xor_mask.
  std::size_t byte_index = 0;
  std::optional<std::uint8_t> new_byte;
  std::uint8_t xor_mask = 0x01;
  // spoof: a ready-made wire hop and the sender it claims to come from.
  std::string forged_sender;
  Envelope forged;
  std::string label;

  static AdversaryAction replay(std::uint64_t seq) { return make(Kind::replay, seq); }
  static AdversaryAction drop(std::uint64_t seq) { return make(Kind::drop, seq); }
  static AdversaryAction tamper(std::uint64_t seq, std::size_t byte_index,
                                std::optional<std::uint8_t> new_byte = std::nullopt) {
    AdversaryAction a = make(Kind::tamper, seq);
    a.byte_index = byte_index;
    a.new_byte = new_byte;
    return a;
  }

 private:
  static AdversaryAction make(Kind kind, std::uint64_t seq) {
    AdversaryAction a;
    a.kind = kind;
    a.target_seq = seq;
    return a;
  }
};

std::string_view to_string(AdversaryAction::Kind k);

/// Every event ever scheduled, with its body as it was first put on the wire.
struct WireRecord {
  DeliveryEvent event;
  std::optional<Verdict> verdict;
};

struct TraceRecord {
  std::uint64_t seq;
  std::uint64_t tick;
  Json line;
};

struct RunReport {
  std::size_t events = 0;
  bool timed_out = false;
  std::uint64_t final_tick = 0;
};

struct WorldOptions {
  std::uint64_t seed = 1;
  bool weak_email = false;
  MediatorPosture posture = MediatorPosture::honest_but_curious;
};

class World {
 public:
  explicit World(WorldOptions options = {});
  ~World();
  World(const World&) = delete;
  World& operator=(const World&) = delete;

  Manufacturer& add_manufacturer(const std::string& id, const std::vector<std::string>& catalog);
  Distributor& add_distributor(const std::string& id, const std::string& manufacturer_id);
  Wallet& add_wallet(const std::string& id, const std::string& email);
  Adversary& add_adversary(const std::string& id, const std::string& email);

  Agent* agent(const std::string& id);
  const Agent* agent(const std::string& id) const;
  Manufacturer& manufacturer(const std::string& id);
  Distributor& distributor(const std::string& id);
  Wallet& wallet(const std::string& id);
  Adversary& adversary(const std::string& id);
  std::vector<std::string> agent_ids() const;
  std::optional<std::string> agent_by_email(const std::string& email) const;

  Rng& rng() { return rng_; }
  Registry& vdr() { return vdr_; }
  const Registry& vdr() const { return vdr_; }
  Mediator& mediator() { return mediator_; }
  const Mediator& mediator() const { return mediator_; }
  std::uint64_t now() const { return now_; }
  const WorldOptions& options() const { return options_; }

  /// Invitation handshake between two registered agents. Returns the
  /// connection ids on the inviter and invitee side.
  std::pair<std::string, std::string> connect(const std::string& inviter,
                                              const std::string& invitee);

  // Transport used by agents. Delivery happens at now() + 1.
  void send_ssi(Agent& from, Connection& conn, const Nonce& nonce, const MessagePayload& payload);
  void send_https(const std::string& from, const std::string& to, const Nonce& nonce,
                  const MessagePayload& payload);
  void send_email(const std::string& from, const OobMessage& mail);

  /// Brings an agent online or offline; going online drains its queue.
  void set_online(const std::string& agent_id, bool online);

  bool idle() const { return queue_.empty(); }
  /// Processes the next event. Returns false if nothing is scheduled.
  bool step();
  RunReport run_until_quiescent(std::uint64_t max_ticks = 10'000);
  std::optional<std::uint64_t> next_seq() const;

  /// Replay and spoof schedule a new hop and return its seq. Tamper and
  /// drop intercept the target when it is processed; a tamper against an
  /// already processed event re-sends a modified copy instead.
  std::optional<std::uint64_t> inject(AdversaryAction action);
  /// Arms `action` against the next scheduled event that `match` accepts.
  /// Returns a handle for armed_target().
  std::size_t arm(std::function<bool(const DeliveryEvent&)> match, AdversaryAction action);
  std::optional<std::uint64_t> armed_target(std::size_t handle) const;
  /// Verdict at the point an event stopped: follows mediator forwards to
  /// the endpoint. Empty while still in flight.
  std::optional<Verdict> final_verdict(std::uint64_t seq) const;
  /// Seq of the events scheduled by injected actions, in injection order.
  const std::vector<std::uint64_t>& injected() const { return injected_; }
  /// Builds a spoofed hop: `payload` signed with a throwaway key that is
  /// bound to no connection, addressed to `recipient_did`, claiming to come
  /// from `forged_sender`. Uses only public keys.
  AdversaryAction make_spoof(const std::string& forged_sender, const std::string& recipient_did,
                             const PublicKey& endpoint_key, const MessagePayload& payload);

  const std::vector<WireRecord>& wire_log() const { return wire_log_; }
  const WireRecord* wire(std::uint64_t seq) const;
  const std::vector<TraceRecord>& trace() const { return trace_; }
  std::vector<OobMessage> intercepted_email() const { return intercepted_email_; }

  /// Invariant audit line attached to the event being processed.
  void audit(std::string what, Json fields);
  void write_trace(std::ostream& out) const;

  /// Canonical dump of all agent, mediator and registry state.
  Json dump_state() const;

  using EventHook = std::function<void(const World&, const DeliveryEvent&, const Verdict&)>;
  void add_event_hook(EventHook hook) { hooks_.push_back(std::move(hook)); }

  std::uint64_t current_seq() const { return current_seq_; }

 private:
  struct Pending {
    std::uint64_t deliver_at;
    std::uint64_t seq;
    bool operator>(const Pending& o) const {
      return deliver_at != o.deliver_at ? deliver_at > o.deliver_at : seq > o.seq;
    }
  };

  void register_with_mediator(Agent& a);
  std::uint64_t schedule(DeliveryEvent ev);
  Verdict process_at_mediator(const DeliveryEvent& ev);
  void record_trace(const DeliveryEvent& ev, const Verdict& v);
  template <typename T>
  T& add_agent(std::unique_ptr<T> a);

  WorldOptions options_;
  Rng rng_;
  Registry vdr_;
  Mediator mediator_;
  std::map<std::string, std::unique_ptr<Agent>> agents_;
  std::vector<std::string> agent_order_;

  std::priority_queue<Pending, std::vector<Pending>, std::greater<>> queue_;
  std::map<std::uint64_t, DeliveryEvent> scheduled_;
  std::vector<WireRecord> wire_log_;
  std::map<std::uint64_t, std::size_t> wire_index_;  // seq -> wire_log_ slot
  std::map<std::uint64_t, AdversaryAction> interceptors_;
  struct Armed {
    std::function<bool(const DeliveryEvent&)> match;
    AdversaryAction action;
    std::optional<std::uint64_t> target;
  };
  std::vector<Armed> armed_;
  std::vector<std::uint64_t> injected_;
  std::map<std::uint64_t, std::vector<std::uint64_t>> children_;
  std::vector<Json> pending_audits_;
  bool processing_ = false;
  std::vector<TraceRecord> trace_;
  std::vector<OobMessage> intercepted_email_;
  std::vector<EventHook> hooks_;
  std::uint64_t next_seq_ = 1;
  std::uint64_t now_ = 0;
  std::uint64_t current_seq_ = 0;
};

}  // namespace ssiown
