#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "ssiown/bytes.hpp"
#include "ssiown/credential.hpp"
#include "ssiown/pin_challenge.hpp"
#include "ssiown/product.hpp"

namespace ssiown {

enum class MessageKind : std::uint8_t {
  product_selling_req,
  product_selling_resp,
  ownership_claim_req,
  ownership_claim_resp,
  ownership_claim_ack,
  pin_req,
  pin_resp,
  ownership_transfer_req,
  ownership_transfer_resp,
  ownership_proof_req,
  ownership_proof_resp,
  pin_challenge_req,
  pin_challenge_resp,
  revoke_vc,
  revoke_vc_resp,
};

inline constexpr std::size_t kMessageKindCount = 15;

/// Wire names: productSellingReq, PINReq, revokeVC, ...
std::string_view to_string(MessageKind kind);
std::optional<MessageKind> message_kind_from_string(std::string_view s);

enum class AckStatus : std::uint8_t { accepted, rejected };
std::string_view to_string(AckStatus s);

struct ProductSellingReq {
  ProductRecord product;  // current_credential_id is not carried
  bool operator==(const ProductSellingReq&) const = default;
};

struct ProductSellingResp {
  AckStatus status = AckStatus::accepted;
  std::optional<Tid> tid;
  bool operator==(const ProductSellingResp&) const = default;
};

/// New-product form carries (TID, PIN); used-product form (TID, key).
struct OwnershipClaimReq {
  Tid tid;
  std::variant<Pin, SymmetricKey> secret;

  bool is_new_product() const { return std::holds_alternative<Pin>(secret); }
  bool operator==(const OwnershipClaimReq&) const = default;
};

struct OwnershipClaimResp {
  AckStatus status = AckStatus::accepted;
  std::optional<VerifiableCredential> credential;
  bool operator==(const OwnershipClaimResp&) const = default;
};

struct OwnershipClaimAck {
  AckStatus status = AckStatus::accepted;
  bool operator==(const OwnershipClaimAck&) const = default;
};

struct PinReq {
  Tid tid;
  bool operator==(const PinReq&) const = default;
};

struct PinResp {
  Bytes encrypted_pin;
  Tid tid;
  bool operator==(const PinResp&) const = default;
};

struct OwnershipTransferReq {
  std::string product_code;
  Bytes encrypted_pin;
  Tid tid;
  bool operator==(const OwnershipTransferReq&) const = default;
};

struct OwnershipTransferResp {
  AckStatus status = AckStatus::accepted;
  bool operator==(const OwnershipTransferResp&) const = default;
};

struct OwnershipProofReq {
  ProofRequest request;
  bool operator==(const OwnershipProofReq&) const = default;
};

struct OwnershipProofResp {
  ProofPresentation presentation;
  bool operator==(const OwnershipProofResp&) const = default;
};

struct PinChallengeReq {
  Tid tid;
  std::uint32_t challenge_by = kChallengeByMin;
  ChallengeOp challenge_type = ChallengeOp::add;
  bool operator==(const PinChallengeReq&) const = default;
};

struct PinChallengeResp {
  Tid tid;
  Rational challenge_result;
  bool operator==(const PinChallengeResp&) const = default;
};

struct RevokeVc {
  std::string credential_id;
  std::string product_code;
  bool operator==(const RevokeVc&) const = default;
};

struct RevokeVcResp {
  AckStatus status = AckStatus::accepted;
  bool operator==(const RevokeVcResp&) const = default;
};

// Alternative order matches MessageKind.
using MessageBody =
    std::variant<ProductSellingReq, ProductSellingResp, OwnershipClaimReq, OwnershipClaimResp,
                 OwnershipClaimAck, PinReq, PinResp, OwnershipTransferReq, OwnershipTransferResp,
                 OwnershipProofReq, OwnershipProofResp, PinChallengeReq, PinChallengeResp,
                 RevokeVc, RevokeVcResp>;

struct MessagePayload {
  MessageBody body;

  MessageKind kind() const { return static_cast<MessageKind>(body.index()); }
  template <typename T>
  const T* as() const {
    return std::get_if<T>(&body);
  }
  bool operator==(const MessagePayload&) const = default;
};

/// Deterministic and injective; decode_payload(canonical_encode(p)) == p.
Bytes canonical_encode(const MessagePayload& payload);
/// Throws DecodeError on truncated, trailing or out-of-range input.
MessagePayload decode_payload(ByteView bytes);

/// The bytes the sender signs: nonce followed by the encoded payload.
Bytes signed_content(const Nonce& nonce, const MessagePayload& payload);

}  // namespace ssiown
