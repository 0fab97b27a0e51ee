#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>

#include "ssiown/bytes.hpp"
#include "ssiown/crypto.hpp"
#include "ssiown/messages.hpp"

namespace ssiown {

enum class Rejection : std::uint8_t {
  decrypt_failed,
  malformed,
  bad_signature,
  unknown_sender,
  replayed_nonce,
  unexpected_nonce,
};

std::string_view to_string(Rejection r);

/// One hop on the wire. Only the holder of the hop key can peel it.
struct Envelope {
  Bytes ciphertext;
  bool operator==(const Envelope&) const = default;
};

/// What a routing layer reveals: the recipient's connection DID and the
/// endpoint-encrypted inner ciphertext.
struct RoutedInner {
  std::string recipient_did;
  Bytes inner;
  bool operator==(const RoutedInner&) const = default;
};

struct OpenedMessage {
  Nonce nonce;
  MessagePayload payload;
};

/// Signs nonce||payload with the sender's connection key, encrypts
/// (nonce, payload, signature) to the endpoint, then wraps the result with
/// the recipient DID under the mediator's key.
Envelope seal(Rng& rng, const KeyPair& sender_keys, const PublicKey& endpoint_public_key,
              const PublicKey& mediator_public_key, const std::string& recipient_did,
              const Nonce& nonce, const MessagePayload& payload);

Expected<RoutedInner, Rejection> unseal_at_mediator(const PrivateKey& mediator_private_key,
                                                    const Envelope& envelope);

/// Re-wraps a routed inner for the mediator-to-recipient hop. The recipient
/// peels it with unseal_at_mediator using its mediator-facing key.
Envelope wrap_for_delivery(Rng& rng, const PublicKey& recipient_key, const RoutedInner& routed);

/// Decrypts and checks the sender signature before anything is surfaced.
Expected<OpenedMessage, Rejection> unseal_at_endpoint(const PrivateKey& endpoint_private_key,
                                                      const PublicKey& sender_public_key,
                                                      ByteView inner);

/// Per-connection nonce bookkeeping. A flow initiator mints a nonce and
/// registers the reply kinds it expects under it; every accepted
/// (nonce, kind) pair is consumed and rejected on any later delivery.
class SessionState {
 public:
  void expect(const Nonce& nonce, MessageKind kind) { expected_.emplace(nonce, kind); }
  bool expects(const Nonce& nonce, MessageKind kind) const {
    return expected_.count({nonce, kind}) != 0;
  }
  bool consumed(const Nonce& nonce, MessageKind kind) const {
    return consumed_.count({nonce, kind}) != 0;
  }

  const std::set<std::pair<Nonce, MessageKind>>& expected() const { return expected_; }
  const std::set<std::pair<Nonce, MessageKind>>& consumed_pairs() const { return consumed_; }

 private:
  friend std::optional<Rejection> validate_nonce_echo(SessionState&, const Nonce&, MessageKind,
                                                      bool);
  std::set<std::pair<Nonce, MessageKind>> expected_;
  std::set<std::pair<Nonce, MessageKind>> consumed_;
};

/// Accepts iff (nonce, kind) was never consumed and either the session
/// expects it or `may_open_flow` allows a fresh nonce. Accepting consumes.
std::optional<Rejection> validate_nonce_echo(SessionState& session, const Nonce& received,
                                             MessageKind kind, bool may_open_flow);

}  // namespace ssiown
