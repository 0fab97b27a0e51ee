#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "json.hpp"

#include "ssiown/crypto.hpp"
#include "ssiown/envelope.hpp"
#include "ssiown/messages.hpp"

namespace ssiown {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kMediatorId = "MD";

enum class Channel : std::uint8_t { ssi, oob_email, https };
std::string_view to_string(Channel c);

/// Out-of-band email. Nonce is carried as-is and only used to pair mails.
struct OobMessage {
  std::string to_email;
  std::string subject;  // "PIN" or "TID"
  Nonce nonce;
  std::string value;
};

/// DS <-> MF leg: a pre-secured channel, so the payload travels as-is.
struct HttpsMessage {
  Nonce nonce;
  MessagePayload payload;
};

using EventBody = std::variant<Envelope, OobMessage, HttpsMessage>;

struct DeliveryEvent {
  std::uint64_t seq = 0;
  std::uint64_t deliver_at = 0;
  std::string from;
  std::string to;
  Channel channel = Channel::ssi;
  EventBody body;
  // Simulator annotations; never part of the wire bytes.
  std::string label;
  std::string detail;
  bool injected = false;
  std::uint64_t cause = 0;  // seq of the event that led to this one
};

/// Result of handing an event to its destination; becomes the trace verdict.
struct Verdict {
  bool accepted = false;
  std::string reason;

  static Verdict ok(std::string note = "accepted") { return {true, std::move(note)}; }
  static Verdict reject(std::string why) { return {false, std::move(why)}; }
  std::string str() const { return accepted ? reason : "rejected:" + reason; }
};

}  // namespace ssiown
