#include "ssiown/vdr.hpp"

#include <istream>
#include <ostream>

#include "json.hpp"

#include "ssiown/codec.hpp"

namespace ssiown {

namespace {

constexpr std::string_view kKindNames[] = {
    "did-doc", "schema", "cred-def", "revocation-registry", "revocation-event"};

struct RevocationEventBody {
  std::string registry_id;
  std::string credential_id;

  Bytes encode() const { return Writer().str(registry_id).str(credential_id).take(); }
  static RevocationEventBody decode(ByteView payload) {
    Reader r(payload);
    RevocationEventBody b{r.str(), r.str()};
    r.expect_done();
    return b;
  }
};

std::string registry_id_for(std::uint64_t entry_id) {
  return "revreg-" + std::to_string(entry_id);
}

}  // namespace

std::string_view to_string(EntryKind kind) {
  return kKindNames[static_cast<std::size_t>(kind)];
}

std::optional<EntryKind> entry_kind_from_string(std::string_view s) {
  for (std::size_t i = 0; i < std::size(kKindNames); ++i) {
    if (kKindNames[i] == s) return static_cast<EntryKind>(i);
  }
  return std::nullopt;
}

Bytes DidDocument::encode() const {
  return Writer().str(did).fixed(verification_key.bytes).str(label).take();
}

DidDocument DidDocument::decode(ByteView payload) {
  Reader r(payload);
  DidDocument doc;
  doc.did = r.str();
  doc.verification_key.bytes = r.fixed<32>();
  doc.label = r.str();
  r.expect_done();
  return doc;
}

std::uint64_t Registry::publish(EntryKind kind, Bytes payload, const std::string& author_did) {
  LedgerEntry e;
  e.entry_id = entries_.size() + 1;
  e.kind = kind;
  e.payload = std::move(payload);
  e.author_did = author_did;
  e.timestamp = clock_;
  append(std::move(e));
  return entries_.back().entry_id;
}

void Registry::append(LedgerEntry e) {
  if (e.entry_id != entries_.size() + 1) {
    throw RegistryError(RegistryError::Kind::malformed, "entry ids must be contiguous");
  }
  if (!entries_.empty() && e.timestamp < entries_.back().timestamp) {
    throw RegistryError(RegistryError::Kind::malformed, "timestamps must not decrease");
  }
  const bool author_known = did_docs_.count(e.author_did) != 0;

  try {
    switch (e.kind) {
      case EntryKind::did_doc: {
        auto doc = DidDocument::decode(e.payload);
        const bool exists = did_docs_.count(doc.did) != 0;
        if (exists ? doc.did != e.author_did : (!author_known && doc.did != e.author_did)) {
          throw RegistryError(RegistryError::Kind::authorization,
                              "did-doc author may not publish for this DID");
        }
        if (!exists && derive_did(doc.verification_key).to_string() != doc.did) {
          throw RegistryError(RegistryError::Kind::malformed,
                              "first did-doc must be self-certifying");
        }
        entries_.push_back(std::move(e));
        did_docs_[doc.did] = std::move(doc);
        return;
      }
      case EntryKind::schema:
      case EntryKind::cred_def:
        if (!author_known) {
          throw RegistryError(RegistryError::Kind::authorization, "unresolvable author");
        }
        entries_.push_back(std::move(e));
        return;
      case EntryKind::revocation_registry: {
        if (!author_known) {
          throw RegistryError(RegistryError::Kind::authorization, "unresolvable author");
        }
        RevocationRegistry reg{registry_id_for(e.entry_id), e.author_did, {}};
        entries_.push_back(std::move(e));
        registries_.emplace(reg.registry_id, std::move(reg));
        return;
      }
      case EntryKind::revocation_event: {
        if (!author_known) {
          throw RegistryError(RegistryError::Kind::authorization, "unresolvable author");
        }
        auto body = RevocationEventBody::decode(e.payload);
        auto it = registries_.find(body.registry_id);
        if (it == registries_.end()) {
          throw RegistryError(RegistryError::Kind::not_found, "unknown revocation registry");
        }
        if (it->second.issuer_did != e.author_did) {
          throw RegistryError(RegistryError::Kind::authorization,
                              "only the registry issuer may revoke");
        }
        if (revoked_.count(body.credential_id) != 0) {
          throw RegistryError(RegistryError::Kind::already_revoked,
                              "credential already revoked: " + body.credential_id);
        }
        entries_.push_back(std::move(e));
        it->second.revoked_ids.insert(body.credential_id);
        revoked_.insert(body.credential_id);
        return;
      }
    }
  } catch (const DecodeError& err) {
    throw RegistryError(RegistryError::Kind::malformed, err.what());
  }
  throw RegistryError(RegistryError::Kind::malformed, "unknown entry kind");
}

std::uint64_t Registry::publish_did(const Did& did, std::string label) {
  DidDocument doc{did.to_string(), did.verification_key, std::move(label)};
  return publish(EntryKind::did_doc, doc.encode(), doc.did);
}

std::optional<DidDocument> Registry::resolve_did(std::string_view did) const {
  auto it = did_docs_.find(did);
  if (it == did_docs_.end()) return std::nullopt;
  return it->second;
}

std::string Registry::create_revocation_registry(const std::string& issuer_did) {
  auto id = publish(EntryKind::revocation_registry, to_bytes("revocation-registry"), issuer_did);
  return registry_id_for(id);
}

std::uint64_t Registry::revoke_credential(const std::string& issuer_did,
                                          const std::string& registry_id,
                                          const std::string& credential_id) {
  return publish(EntryKind::revocation_event,
                 RevocationEventBody{registry_id, credential_id}.encode(), issuer_did);
}

bool Registry::is_revoked(std::string_view credential_id) const {
  return revoked_.find(credential_id) != revoked_.end();
}

const RevocationRegistry* Registry::revocation_registry(std::string_view registry_id) const {
  auto it = registries_.find(registry_id);
  return it == registries_.end() ? nullptr : &it->second;
}

const LedgerEntry* Registry::entry(std::uint64_t entry_id) const {
  if (entry_id == 0 || entry_id > entries_.size()) return nullptr;
  return &entries_[entry_id - 1];
}

Registry Registry::replay(std::span<const LedgerEntry> log) {
  Registry r;
  for (const auto& e : log) {
    r.clock_ = e.timestamp;
    r.append(e);
  }
  return r;
}

void Registry::write_ndjson(std::ostream& out) const {
  for (const auto& e : entries_) {
    nlohmann::ordered_json j;
    j["entry_id"] = e.entry_id;
    j["kind"] = to_string(e.kind);
    j["author_did"] = e.author_did;
    j["timestamp"] = e.timestamp;
    j["payload"] = to_hex(e.payload);
    out << j.dump() << '\n';
  }
}

Registry Registry::read_ndjson(std::istream& in) {
  std::vector<LedgerEntry> log;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    LedgerEntry e;
    e.entry_id = j.at("entry_id").get<std::uint64_t>();
    auto kind = entry_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) throw RegistryError(RegistryError::Kind::malformed, "unknown entry kind");
    e.kind = *kind;
    e.author_did = j.at("author_did").get<std::string>();
    e.timestamp = j.at("timestamp").get<std::uint64_t>();
    e.payload = from_hex(j.at("payload").get<std::string>());
    log.push_back(std::move(e));
  }
  return replay(log);
}

}  // namespace ssiown
