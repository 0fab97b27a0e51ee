#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ssiown/bytes.hpp"
#include "ssiown/crypto.hpp"

namespace ssiown {

enum class EntryKind : std::uint8_t {
  did_doc,
  schema,
  cred_def,
  revocation_registry,
  revocation_event,
};

std::string_view to_string(EntryKind kind);
std::optional<EntryKind> entry_kind_from_string(std::string_view s);

struct LedgerEntry {
  std::uint64_t entry_id = 0;
  EntryKind kind = EntryKind::did_doc;
  Bytes payload;
  std::string author_did;
  std::uint64_t timestamp = 0;

  bool operator==(const LedgerEntry&) const = default;
};

struct DidDocument {
  std::string did;
  PublicKey verification_key;
  std::string label;

  Bytes encode() const;
  static DidDocument decode(ByteView payload);
  bool operator==(const DidDocument&) const = default;
};

struct RevocationRegistry {
  std::string registry_id;
  std::string issuer_did;
  std::set<std::string> revoked_ids;

  bool operator==(const RevocationRegistry&) const = default;
};

class RegistryError : public std::runtime_error {
 public:
  enum class Kind { authorization, not_found, already_revoked, malformed };
  RegistryError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// In-process verifiable data registry: an append-only log plus the indexes
/// derived from it. Every mutation goes through publish(), so replaying the
/// log through a fresh Registry reproduces the same state.
class Registry {
 public:
  /// Appends an entry. did-docs may be published by the DID they describe;
  /// everything else needs a resolvable author. Revocation events must name
  /// an existing registry owned by the author and a not-yet-revoked id.
  std::uint64_t publish(EntryKind kind, Bytes payload, const std::string& author_did);

  std::uint64_t publish_did(const Did& did, std::string label = {});
  std::optional<DidDocument> resolve_did(std::string_view did) const;

  std::string create_revocation_registry(const std::string& issuer_did);
  std::uint64_t revoke_credential(const std::string& issuer_did,
                                  const std::string& registry_id,
                                  const std::string& credential_id);
  bool is_revoked(std::string_view credential_id) const;
  const RevocationRegistry* revocation_registry(std::string_view registry_id) const;

  const LedgerEntry* entry(std::uint64_t entry_id) const;
  const std::vector<LedgerEntry>& entries() const { return entries_; }

  void set_clock(std::uint64_t tick) { clock_ = tick; }
  std::uint64_t clock() const { return clock_; }

  static Registry replay(std::span<const LedgerEntry> log);

  /// One JSON object per line: entry_id, kind, author_did, timestamp, payload.
  void write_ndjson(std::ostream& out) const;
  static Registry read_ndjson(std::istream& in);

  bool operator==(const Registry& other) const {
    return entries_ == other.entries_ && did_docs_ == other.did_docs_ &&
           registries_ == other.registries_ && revoked_ == other.revoked_;
  }

 private:
  void append(LedgerEntry e);

  std::vector<LedgerEntry> entries_;
  std::map<std::string, DidDocument, std::less<>> did_docs_;
  std::map<std::string, RevocationRegistry, std::less<>> registries_;
  std::set<std::string, std::less<>> revoked_;
  std::uint64_t clock_ = 0;
};

}  // namespace ssiown
