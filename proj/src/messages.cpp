#include "ssiown/messages.hpp"

#include "ssiown/codec.hpp"

namespace ssiown {

namespace {

constexpr std::string_view kKindNames[kMessageKindCount] = {
    "productSellingReq",    "productSellingResp",    "ownershipClaimReq",
    "ownershipClaimResp",   "ownershipClaimAck",     "PINReq",
    "PINResp",              "ownershipTransferReq",  "ownershipTransferResp",
    "ownershipProofReq",    "ownershipProofResp",    "pinChallengeReq",
    "pinChallengeResp",     "revokeVC",              "revokeVCResp",
};

constexpr std::uint8_t kFormatVersion = 1;

AckStatus read_status(Reader& r) {
  auto v = r.u8();
  if (v > 1) throw DecodeError("invalid acknowledgement status");
  return static_cast<AckStatus>(v);
}

Tid read_tid(Reader& r) { return Tid{r.fixed<16>()}; }

void write_product(Writer& w, const ProductRecord& p) {
  w.str(p.product_code)
      .str(p.distributor_id)
      .str(p.conn_id)
      .u8(static_cast<std::uint8_t>(p.status))
      .u64(p.previously_sold_count)
      .u64(p.first_purchase_date)
      .u64(p.last_purchase_date)
      .str(p.email);
}

ProductRecord read_product(Reader& r) {
  ProductRecord p;
  p.product_code = r.str();
  p.distributor_id = r.str();
  p.conn_id = r.str();
  auto status = r.u8();
  if (status > static_cast<std::uint8_t>(ProductStatus::transferred)) {
    throw DecodeError("invalid product status");
  }
  p.status = static_cast<ProductStatus>(status);
  p.previously_sold_count = r.u64();
  p.first_purchase_date = r.u64();
  p.last_purchase_date = r.u64();
  p.email = r.str();
  return p;
}

struct BodyWriter {
  Writer& w;

  void operator()(const ProductSellingReq& m) { write_product(w, m.product); }
  void operator()(const ProductSellingResp& m) {
    w.u8(static_cast<std::uint8_t>(m.status)).u8(m.tid ? 1 : 0);
    if (m.tid) w.fixed(m.tid->value);
  }
  void operator()(const OwnershipClaimReq& m) {
    w.fixed(m.tid.value);
    if (const auto* pin = std::get_if<Pin>(&m.secret)) {
      w.u8(0).str(pin->str());
    } else {
      w.u8(1).fixed(std::get<SymmetricKey>(m.secret).key_bytes);
    }
  }
  void operator()(const OwnershipClaimResp& m) {
    w.u8(static_cast<std::uint8_t>(m.status)).u8(m.credential ? 1 : 0);
    if (m.credential) w.bytes(m.credential->encode());
  }
  void operator()(const OwnershipClaimAck& m) { w.u8(static_cast<std::uint8_t>(m.status)); }
  void operator()(const PinReq& m) { w.fixed(m.tid.value); }
  void operator()(const PinResp& m) { w.bytes(m.encrypted_pin).fixed(m.tid.value); }
  void operator()(const OwnershipTransferReq& m) {
    w.str(m.product_code).bytes(m.encrypted_pin).fixed(m.tid.value);
  }
  void operator()(const OwnershipTransferResp& m) { w.u8(static_cast<std::uint8_t>(m.status)); }
  void operator()(const OwnershipProofReq& m) {
    w.u32(static_cast<std::uint32_t>(m.request.requested_attribute_names.size()));
    for (const auto& n : m.request.requested_attribute_names) w.str(n);
    w.fixed(m.request.challenge_nonce.value);
  }
  void operator()(const OwnershipProofResp& m) { w.bytes(m.presentation.encode()); }
  void operator()(const PinChallengeReq& m) {
    w.fixed(m.tid.value).u32(m.challenge_by).u8(static_cast<std::uint8_t>(m.challenge_type));
  }
  void operator()(const PinChallengeResp& m) {
    w.fixed(m.tid.value).i64(m.challenge_result.numerator).i64(m.challenge_result.denominator);
  }
  void operator()(const RevokeVc& m) { w.str(m.credential_id).str(m.product_code); }
  void operator()(const RevokeVcResp& m) { w.u8(static_cast<std::uint8_t>(m.status)); }
};

MessageBody read_body(MessageKind kind, Reader& r) {
  switch (kind) {
    case MessageKind::product_selling_req:
      return ProductSellingReq{read_product(r)};
    case MessageKind::product_selling_resp: {
      ProductSellingResp m;
      m.status = read_status(r);
      auto has_tid = r.u8();
      if (has_tid > 1) throw DecodeError("invalid option flag");
      if (has_tid) m.tid = read_tid(r);
      return m;
    }
    case MessageKind::ownership_claim_req: {
      Tid tid = read_tid(r);
      auto form = r.u8();
      if (form == 0) {
        auto pin = Pin::parse(r.str());
        if (!pin) throw DecodeError("malformed PIN");
        return OwnershipClaimReq{tid, *pin};
      }
      if (form == 1) return OwnershipClaimReq{tid, SymmetricKey{r.fixed<32>()}};
      throw DecodeError("invalid ownership claim form");
    }
    case MessageKind::ownership_claim_resp: {
      OwnershipClaimResp m;
      m.status = read_status(r);
      auto has_vc = r.u8();
      if (has_vc > 1) throw DecodeError("invalid option flag");
      if (has_vc) m.credential = VerifiableCredential::decode(r.bytes());
      return m;
    }
    case MessageKind::ownership_claim_ack:
      return OwnershipClaimAck{read_status(r)};
    case MessageKind::pin_req:
      return PinReq{read_tid(r)};
    case MessageKind::pin_resp: {
      PinResp m;
      m.encrypted_pin = r.bytes();
      m.tid = read_tid(r);
      return m;
    }
    case MessageKind::ownership_transfer_req: {
      OwnershipTransferReq m;
      m.product_code = r.str();
      m.encrypted_pin = r.bytes();
      m.tid = read_tid(r);
      return m;
    }
    case MessageKind::ownership_transfer_resp:
      return OwnershipTransferResp{read_status(r)};
    case MessageKind::ownership_proof_req: {
      OwnershipProofReq m;
      const std::uint32_t count = r.u32();
      // each name costs at least its 4-byte length prefix
      if (count > r.remaining() / 4) throw DecodeError("attribute count exceeds input");
      m.request.requested_attribute_names.resize(count);
      for (auto& n : m.request.requested_attribute_names) n = r.str();
      m.request.challenge_nonce.value = r.fixed<Nonce::kSize>();
      return m;
    }
    case MessageKind::ownership_proof_resp:
      return OwnershipProofResp{ProofPresentation::decode(r.bytes())};
    case MessageKind::pin_challenge_req: {
      PinChallengeReq m;
      m.tid = read_tid(r);
      m.challenge_by = r.u32();
      auto op = r.u8();
      if (op > static_cast<std::uint8_t>(ChallengeOp::div)) throw DecodeError("invalid operator");
      m.challenge_type = static_cast<ChallengeOp>(op);
      return m;
    }
    case MessageKind::pin_challenge_resp: {
      PinChallengeResp m;
      m.tid = read_tid(r);
      m.challenge_result.numerator = r.i64();
      m.challenge_result.denominator = r.i64();
      if (!m.challenge_result.is_reduced()) throw DecodeError("rational not in lowest terms");
      return m;
    }
    case MessageKind::revoke_vc: {
      RevokeVc m;
      m.credential_id = r.str();
      m.product_code = r.str();
      return m;
    }
    case MessageKind::revoke_vc_resp:
      return RevokeVcResp{read_status(r)};
  }
  throw DecodeError("unknown message kind");
}

}  // namespace

std::string_view to_string(MessageKind kind) {
  return kKindNames[static_cast<std::size_t>(kind)];
}

std::optional<MessageKind> message_kind_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kMessageKindCount; ++i) {
    if (kKindNames[i] == s) return static_cast<MessageKind>(i);
  }
  return std::nullopt;
}

std::string_view to_string(AckStatus s) {
  return s == AckStatus::accepted ? "accepted" : "rejected";
}

Bytes canonical_encode(const MessagePayload& payload) {
  Writer w;
  w.u8(kFormatVersion).u8(static_cast<std::uint8_t>(payload.kind()));
  std::visit(BodyWriter{w}, payload.body);
  return std::move(w).take();
}

MessagePayload decode_payload(ByteView bytes) {
  Reader r(bytes);
  if (r.u8() != kFormatVersion) throw DecodeError("unsupported message format");
  auto kind = r.u8();
  if (kind >= kMessageKindCount) throw DecodeError("unknown message kind");
  MessagePayload p{read_body(static_cast<MessageKind>(kind), r)};
  r.expect_done();
  return p;
}

Bytes signed_content(const Nonce& nonce, const MessagePayload& payload) {
  return Writer().fixed(nonce.value).bytes(canonical_encode(payload)).take();
}

}  // namespace ssiown
