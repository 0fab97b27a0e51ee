#include "ssiown/envelope.hpp"

#include "ssiown/codec.hpp"

namespace ssiown {

std::string_view to_string(Rejection r) {
  switch (r) {
    case Rejection::decrypt_failed: return "decrypt-failed";
    case Rejection::malformed: return "malformed";
    case Rejection::bad_signature: return "bad-signature";
    case Rejection::unknown_sender: return "unknown-sender";
    case Rejection::replayed_nonce: return "replayed-nonce";
    case Rejection::unexpected_nonce: return "unexpected-nonce";
  }
  return "unknown";
}

Envelope seal(Rng& rng, const KeyPair& sender_keys, const PublicKey& endpoint_public_key,
              const PublicKey& mediator_public_key, const std::string& recipient_did,
              const Nonce& nonce, const MessagePayload& payload) {
  Bytes encoded = canonical_encode(payload);
  auto signature =
      sign(sender_keys.private_key, Writer().fixed(nonce.value).bytes(encoded).data());
  Bytes plaintext = Writer().fixed(nonce.value).bytes(encoded).fixed(signature.bytes).take();
  Bytes inner = asym_encrypt(rng, endpoint_public_key, plaintext);
  Bytes routed = Writer().str(recipient_did).bytes(inner).take();
  return Envelope{asym_encrypt(rng, mediator_public_key, routed)};
}

Expected<RoutedInner, Rejection> unseal_at_mediator(const PrivateKey& mediator_private_key,
                                                    const Envelope& envelope) {
  Bytes routed;
  try {
    routed = asym_decrypt(mediator_private_key, envelope.ciphertext);
  } catch (const CryptoError&) {
    return Expected<RoutedInner, Rejection>::failure(Rejection::decrypt_failed);
  }
  try {
    Reader r(routed);
    RoutedInner out;
    out.recipient_did = r.str();
    out.inner = r.bytes();
    r.expect_done();
    return out;
  } catch (const DecodeError&) {
    return Expected<RoutedInner, Rejection>::failure(Rejection::malformed);
  }
}

Envelope wrap_for_delivery(Rng& rng, const PublicKey& recipient_key, const RoutedInner& routed) {
  Bytes plain = Writer().str(routed.recipient_did).bytes(routed.inner).take();
  return Envelope{asym_encrypt(rng, recipient_key, plain)};
}

Expected<OpenedMessage, Rejection> unseal_at_endpoint(const PrivateKey& endpoint_private_key,
                                                      const PublicKey& sender_public_key,
                                                      ByteView inner) {
  using Result = Expected<OpenedMessage, Rejection>;
  Bytes plaintext;
  try {
    plaintext = asym_decrypt(endpoint_private_key, inner);
  } catch (const CryptoError&) {
    return Result::failure(Rejection::decrypt_failed);
  }
  Nonce nonce;
  Bytes encoded;
  Signature signature;
  try {
    Reader r(plaintext);
    nonce.value = r.fixed<Nonce::kSize>();
    encoded = r.bytes();
    signature.bytes = r.fixed<64>();
    r.expect_done();
  } catch (const DecodeError&) {
    return Result::failure(Rejection::malformed);
  }
  if (!verify(sender_public_key, Writer().fixed(nonce.value).bytes(encoded).data(), signature)) {
    return Result::failure(Rejection::bad_signature);
  }
  try {
    return OpenedMessage{nonce, decode_payload(encoded)};
  } catch (const DecodeError&) {
    return Result::failure(Rejection::malformed);
  }
}

std::optional<Rejection> validate_nonce_echo(SessionState& session, const Nonce& received,
                                             MessageKind kind, bool may_open_flow) {
  const std::pair key{received, kind};
  if (session.consumed_.count(key) != 0) return Rejection::replayed_nonce;
  const bool expected = session.expected_.count(key) != 0;
  if (!expected && !may_open_flow) return Rejection::unexpected_nonce;
  session.expected_.erase(key);
  session.consumed_.insert(key);
  return std::nullopt;
}

}  // namespace ssiown
