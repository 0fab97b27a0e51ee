#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ssiown/crypto.hpp"
#include "ssiown/envelope.hpp"
#include "ssiown/events.hpp"

namespace ssiown {

class World;

/// Pairwise SSI connection as seen from one side.
struct Connection {
  std::string conn_id;
  KeyPair local;
  std::string local_did;
  PublicKey remote_key;
  std::string remote_did;
  std::string peer;        // agent id of the other side
  std::string peer_label;  // contact label the peer supplied (its email)
  SessionState session;
};

/// QR-code invitation reduced to the data it carries.
struct Invitation {
  std::string inviter;
  std::string label;
  std::string mediator;
};

struct ConnectionRequest {
  std::string invitee;
  std::string label;
  std::string did;
  PublicKey key;
};

struct ConnectionResponse {
  std::string did;
  PublicKey key;
};

enum class AgentRole { manufacturer, distributor, wallet, adversary };
std::string_view to_string(AgentRole r);

class Agent {
 public:
  Agent(World& world, std::string id, std::string email, AgentRole role);
  virtual ~Agent() = default;
  Agent(const Agent&) = delete;
  Agent& operator=(const Agent&) = delete;

  const std::string& id() const { return id_; }
  const std::string& email() const { return email_; }
  AgentRole role() const { return role_; }

  const KeyPair& mediator_facing_keys() const { return mediator_keys_; }
  void set_mediator_key(const PublicKey& key) { mediator_key_ = key; }
  const PublicKey& mediator_key() const { return mediator_key_; }

  bool online() const { return online_; }
  void set_online(bool online) { online_ = online; }

  Invitation create_invitation() const;
  /// Invitee side: fresh connection keys, pending until the response lands.
  ConnectionRequest accept_invitation(const Invitation& invitation);
  /// Inviter side: every accepted request gets its own fresh key pair.
  ConnectionResponse complete_invitation(const ConnectionRequest& request);
  Connection& finish_connection(const std::string& inviter, const ConnectionResponse& response);

  Connection* connection(const std::string& conn_id);
  const Connection* connection(const std::string& conn_id) const;
  Connection* connection_by_local_did(const std::string& did);
  /// Most recent connection to `peer`, if any.
  Connection* connection_to(const std::string& peer);
  const std::map<std::string, Connection>& connections() const { return connections_; }

  /// Entry point for every delivery addressed to this agent.
  Verdict receive(const DeliveryEvent& event);

  const std::vector<OobMessage>& inbox() const { return inbox_; }
  /// Email copies seen by an eavesdropper land here too.
  void deliver_mail(const OobMessage& mail) { inbox_.push_back(mail); }
  const std::vector<std::string>& notifications() const { return notifications_; }

  /// Canonical JSON of everything the agent holds, for diffing and scans.
  Json dump() const;

 protected:
  virtual Verdict on_message(Connection& conn, const OpenedMessage& msg) = 0;
  virtual Verdict on_https(const std::string& from, const HttpsMessage& msg);
  virtual bool may_open_https(MessageKind) const { return false; }
  /// Whether `kind` may arrive under a nonce this side never registered.
  virtual bool may_open_flow(const Connection& conn, MessageKind kind) const = 0;
  virtual void dump_role_state(Json& out) const = 0;

  void send(Connection& conn, const Nonce& nonce, const MessagePayload& payload);
  void send_https(const std::string& to, const Nonce& nonce, const MessagePayload& payload);
  SessionState& https_session(const std::string& peer) { return https_sessions_[peer]; }
  void notify(std::string text) { notifications_.push_back(std::move(text)); }

  World& world_;
  std::string id_;
  std::string email_;
  AgentRole role_;

 private:
  Verdict receive_ssi(const DeliveryEvent& event);

  KeyPair mediator_keys_;
  PublicKey mediator_key_;
  bool online_ = true;
  std::map<std::string, Connection> connections_;
  std::map<std::string, Connection> pending_;  // by inviter id
  std::map<std::string, SessionState> https_sessions_;
  std::vector<OobMessage> inbox_;
  std::vector<std::string> notifications_;
  std::uint64_t next_conn_ = 1;
};

Json session_to_json(const SessionState& s);

}  // namespace ssiown
