#include "ssiown/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ssiown/adversary.hpp"
#include "ssiown/distributor.hpp"
#include "ssiown/manufacturer.hpp"
#include "ssiown/wallet.hpp"

namespace ssiown {

// --- built-ins --------------------------------------------------------------

namespace {

constexpr const char* kCast = R"(
  {"id": "MF", "role": "manufacturer", "catalog": ["PC-100", "PC-200"]},
  {"id": "DS", "role": "distributor", "manufacturer": "MF"},
  {"id": "B1", "role": "wallet", "email": "b1@example.com"},
  {"id": "B2", "role": "wallet", "email": "b2@example.com"})";

constexpr const char* kPurchase = R"(
  {"op": "record_sale", "distributor": "DS", "product": "PC-100", "buyer": "B1", "expect": "accepted"},
  {"op": "connect", "inviter": "MF", "invitee": "B1", "expect": "accepted"},
  {"op": "claim_new", "wallet": "B1", "manufacturer": "MF", "expect": "accepted"})";

constexpr const char* kResale = R"(
  {"op": "connect", "inviter": "B1", "invitee": "B2", "expect": "accepted"},
  {"op": "sell", "seller": "B1", "buyer": "B2", "expect": "accepted"},
  {"op": "connect", "inviter": "MF", "invitee": "B2", "expect": "accepted"},
  {"op": "transfer", "seller": "B1", "manufacturer": "MF", "product": "PC-100", "buyer": "B2", "expect": "accepted"},
  {"op": "claim_used", "buyer": "B2", "manufacturer": "MF", "expect": "accepted"})";

constexpr const char* kOwnedByB2 = R"(
  {"op": "assert", "product": "PC-100", "owner": "B2", "revoked_holder": "B1",
   "status": "sold", "sold_count": 1, "expect": "accepted"})";

std::string doc(const std::string& name, int seed, const std::string& cast,
                const std::string& steps, const std::string& options = "{}") {
  return R"({"name": ")" + name + R"(", "seed": )" + std::to_string(seed) +
         R"(, "options": )" + options + R"(, "cast": [)" + cast + R"(], "script": [)" + steps +
         "]}";
}

std::string replay(const std::string& kind, const std::string& from, int nth = 1) {
  return R"(,
  {"op": "replay", "select": {"kind": ")" + kind + R"(", "from": ")" + from +
         R"(", "nth": )" + std::to_string(nth) + R"(}, "expect": "rejected"})";
}

const std::map<std::string, std::string>& builtins() {
  static const std::map<std::string, std::string> table = [] {
    std::map<std::string, std::string> t;
    t["new-purchase"] = doc("new-purchase", 7, kCast,
                            std::string(kPurchase) + R"(,
  {"op": "assert", "product": "PC-100", "owner": "B1", "status": "sold", "sold_count": 0, "expect": "accepted"},
  {"op": "claim_new", "wallet": "B1", "manufacturer": "MF", "expect": "rejected"})");

    t["full-lifecycle"] = doc("full-lifecycle", 11, kCast,
                              std::string(kPurchase) + "," + kResale + "," + kOwnedByB2);

    std::string replays;
    replays += replay("ownershipClaimReq", "B1");
    replays += replay("ownershipClaimResp", "MF");
    replays += replay("ownershipClaimAck", "B1");
    replays += replay("PINReq", "B1");
    replays += replay("PINResp", "B2");
    replays += replay("ownershipTransferReq", "B1");
    replays += replay("ownershipProofReq", "MF");
    replays += replay("ownershipProofResp", "B1");
    replays += replay("ownershipTransferResp", "MF");
    replays += replay("ownershipClaimReq", "B2");
    replays += replay("pinChallengeReq", "MF");
    replays += replay("pinChallengeResp", "B2");
    replays += replay("revokeVC", "MF");
    replays += replay("revokeVCResp", "B1");
    replays += replay("ownershipClaimResp", "MF", 2);
    replays += replay("ownershipClaimAck", "B2");
    t["replay-attack"] = doc("replay-attack", 13, kCast,
                             std::string(kPurchase) + "," + kResale + replays + "," + kOwnedByB2);

    t["tamper-attack"] = doc("tamper-attack", 17, kCast, std::string(kPurchase) + R"(,
  {"op": "connect", "inviter": "B1", "invitee": "B2", "expect": "accepted"},
  {"op": "sell", "seller": "B1", "buyer": "B2", "expect": "accepted"},
  {"op": "connect", "inviter": "MF", "invitee": "B2", "expect": "accepted"},
  {"op": "transfer", "seller": "B1", "manufacturer": "MF", "product": "PC-100", "buyer": "B2", "expect": "accepted"},
  {"op": "tamper", "when": {"kind": "pinChallengeResp", "from": "B2"}, "byte_index": 77, "expect": "rejected"},
  {"op": "claim_used", "buyer": "B2", "manufacturer": "MF", "expect": "no-response"},
  {"op": "tamper", "select": {"kind": "ownershipClaimReq", "from": "B2"}, "byte_index": 5, "expect": "rejected"},
  {"op": "assert", "product": "PC-100", "owner": "B1", "sold_count": 0, "expect": "accepted"})");

    t["spoof-attack"] =
        doc("spoof-attack", 19,
            std::string(kCast) + R"(,
  {"id": "EVE", "role": "adversary", "email": "eve@example.com"})",
            std::string(kPurchase) + R"(,
  {"op": "connect", "inviter": "MF", "invitee": "EVE", "expect": "accepted"},
  {"op": "attempt_transfer", "adversary": "EVE", "manufacturer": "MF", "product": "PC-100", "strategy": "self-signed", "expect": "rejected"},
  {"op": "attempt_transfer", "adversary": "EVE", "manufacturer": "MF", "product": "PC-100", "strategy": "foreign-issuer", "expect": "rejected"},
  {"op": "attempt_transfer", "adversary": "EVE", "manufacturer": "MF", "product": "PC-100", "strategy": "tampered", "expect": "rejected"},
  {"op": "attempt_transfer", "adversary": "EVE", "manufacturer": "MF", "product": "PC-100", "strategy": "stale-nonce", "expect": "rejected"},
  {"op": "attempt_transfer", "adversary": "EVE", "manufacturer": "MF", "product": "PC-100", "strategy": "wrong-holder", "expect": "rejected"},
  {"op": "spoof", "as": "B1", "peer": "MF", "kind": "ownershipTransferReq", "product": "PC-100", "expect": "rejected"},
  {"op": "assert", "product": "PC-100", "owner": "B1", "status": "sold", "sold_count": 0, "expect": "accepted"})");

    t["duplicate-transfer"] =
        doc("duplicate-transfer", 23,
            std::string(kCast) + R"(,
  {"id": "B3", "role": "wallet", "email": "b3@example.com"})",
            std::string(kPurchase) + R"(,
  {"op": "connect", "inviter": "B1", "invitee": "B2", "expect": "accepted"},
  {"op": "connect", "inviter": "B1", "invitee": "B3", "expect": "accepted"},
  {"op": "sell", "seller": "B1", "buyer": "B2", "expect": "accepted"},
  {"op": "sell", "seller": "B1", "buyer": "B3", "expect": "accepted"},
  {"op": "connect", "inviter": "MF", "invitee": "B2", "expect": "accepted"},
  {"op": "concurrent", "expect": "accepted", "steps": [
    {"op": "transfer", "seller": "B1", "manufacturer": "MF", "product": "PC-100", "buyer": "B2", "expect": "accepted"},
    {"op": "transfer", "seller": "B1", "manufacturer": "MF", "product": "PC-100", "buyer": "B3", "expect": "rejected"}]},
  {"op": "claim_used", "buyer": "B2", "manufacturer": "MF", "expect": "accepted"},
)" + std::string(kOwnedByB2).substr(1));

    t["weak-email"] =
        doc("weak-email", 29,
            std::string(kCast) + R"(,
  {"id": "EVE", "role": "adversary", "email": "eve@example.com"})",
            R"(
  {"op": "connect", "inviter": "MF", "invitee": "EVE", "expect": "accepted"},
  {"op": "record_sale", "distributor": "DS", "product": "PC-100", "buyer": "B1", "expect": "accepted"},
  {"op": "claim_new", "wallet": "EVE", "manufacturer": "MF", "tid": "00000000000000000000000000000000", "expect": "rejected"},
  {"op": "claim_new", "wallet": "EVE", "manufacturer": "MF", "expect": "accepted"},
  {"op": "connect", "inviter": "MF", "invitee": "B1", "expect": "accepted"},
  {"op": "claim_new", "wallet": "B1", "manufacturer": "MF", "expect": "rejected"},
  {"op": "assert", "product": "PC-100", "owner": "EVE", "expect": "accepted"})",
            R"({"weak_email": true})");

    t["offline-mediator"] = doc("offline-mediator", 31, kCast, std::string(kPurchase) + R"(,
  {"op": "connect", "inviter": "B1", "invitee": "B2", "expect": "accepted"},
  {"op": "offline", "agent": "B2", "expect": "accepted"},
  {"op": "sell", "seller": "B1", "buyer": "B2", "expect": "no-response"},
  {"op": "online", "agent": "B2", "expect": "accepted"},
  {"op": "connect", "inviter": "MF", "invitee": "B2", "expect": "accepted"},
  {"op": "transfer", "seller": "B1", "manufacturer": "MF", "product": "PC-100", "buyer": "B2", "expect": "accepted"},
  {"op": "offline", "agent": "MF", "expect": "accepted"},
  {"op": "claim_used", "buyer": "B2", "manufacturer": "MF", "expect": "no-response"},
  {"op": "online", "agent": "MF", "expect": "accepted"},)" + std::string(kOwnedByB2));

    t["malicious-mediator"] =
        doc("malicious-mediator", 37, kCast,
            std::string(kPurchase) + "," + kResale + "," + kOwnedByB2,
            R"({"mediator": "malicious"})");
    return t;
  }();
  return table;
}

}  // namespace

const std::vector<std::string>& builtin_scenario_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [k, v] : builtins()) n.push_back(k);
    return n;
  }();
  return names;
}

std::optional<std::string> builtin_scenario(const std::string& name) {
  auto it = builtins().find(name);
  if (it == builtins().end()) return std::nullopt;
  return it->second;
}

// --- parsing ----------------------------------------------------------------

namespace {

const std::map<std::string, std::vector<std::string>>& step_fields() {
  // op -> required agent-valued fields; other fields are checked below
  static const std::map<std::string, std::vector<std::string>> t{
      {"connect", {"inviter", "invitee"}},
      {"record_sale", {"distributor", "buyer"}},
      {"claim_new", {"wallet", "manufacturer"}},
      {"sell", {"seller", "buyer"}},
      {"transfer", {"seller", "manufacturer"}},
      {"claim_used", {"buyer", "manufacturer"}},
      {"attempt_transfer", {"adversary", "manufacturer"}},
      {"guess_claim", {"adversary", "manufacturer", "victim"}},
      {"replay", {}},
      {"tamper", {}},
      {"drop", {}},
      {"spoof", {"as", "peer"}},
      {"offline", {"agent"}},
      {"online", {"agent"}},
      {"assert", {}},
      {"concurrent", {}},
  };
  return t;
}

std::string require_string(const Json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ScenarioError(where + "." + key, "missing");
  if (!obj[key].is_string()) throw ScenarioError(where + "." + key, "expected a string");
  return obj[key].get<std::string>();
}

void check_selector(const Json& sel, const std::string& where) {
  if (!sel.is_object()) throw ScenarioError(where, "expected an object");
  for (const auto& [k, v] : sel.items()) {
    if (k == "nth") {
      if (!v.is_number_integer() || v.get<int>() == 0) {
        throw ScenarioError(where + ".nth", "expected a non-zero integer");
      }
    } else if (k == "kind" || k == "from" || k == "to") {
      if (!v.is_string()) throw ScenarioError(where + "." + k, "expected a string");
    } else {
      throw ScenarioError(where + "." + k, "unknown selector field");
    }
  }
}

ScenarioStep parse_step(const Json& j, const std::string& where, const std::set<std::string>& ids,
                        bool nested) {
  if (!j.is_object()) throw ScenarioError(where, "expected an object");
  ScenarioStep s;
  s.where = where;
  s.op = require_string(j, "op", where);
  auto spec = step_fields().find(s.op);
  if (spec == step_fields().end()) throw ScenarioError(where + ".op", "unknown op '" + s.op + "'");
  s.expect = require_string(j, "expect", where);
  if (s.expect != "accepted" && s.expect != "rejected" && s.expect != "no-response") {
    throw ScenarioError(where + ".expect", "must be accepted, rejected or no-response");
  }
  for (const auto& field : spec->second) {
    const auto id = require_string(j, field, where);
    if (ids.count(id) == 0) throw ScenarioError(where + "." + field, "undeclared agent '" + id + "'");
  }
  if (s.op == "record_sale" || s.op == "attempt_transfer") require_string(j, "product", where);
  if (s.op == "transfer") require_string(j, "product", where);
  if (s.op == "attempt_transfer") {
    const auto st = require_string(j, "strategy", where);
    if (!forge_strategy_from_string(st)) {
      throw ScenarioError(where + ".strategy", "unknown strategy '" + st + "'");
    }
  }
  if (s.op == "spoof") {
    const auto kind = require_string(j, "kind", where);
    if (kind != "ownershipTransferReq" && kind != "ownershipClaimReq") {
      throw ScenarioError(where + ".kind", "spoof supports ownershipTransferReq or ownershipClaimReq");
    }
  }
  if (s.op == "replay" || s.op == "tamper" || s.op == "drop") {
    const bool has_seq = j.contains("seq");
    const bool has_select = j.contains("select");
    const bool has_when = j.contains("when");
    if (s.op == "replay" && has_when) throw ScenarioError(where + ".when", "replay needs a past event");
    if (s.op == "drop" && (has_seq || has_select)) {
      throw ScenarioError(where, "drop needs 'when' (a future event)");
    }
    if (int(has_seq) + int(has_select) + int(has_when) != 1) {
      throw ScenarioError(where, "exactly one of seq, select, when is required");
    }
    if (has_seq && !j["seq"].is_number_unsigned()) throw ScenarioError(where + ".seq", "expected a positive integer");
    if (has_select) check_selector(j["select"], where + ".select");
    if (has_when) check_selector(j["when"], where + ".when");
    if (s.op == "tamper") {
      if (!j.contains("byte_index") || !j["byte_index"].is_number_unsigned()) {
        throw ScenarioError(where + ".byte_index", "expected a non-negative integer");
      }
      if (j.contains("new_byte") &&
          (!j["new_byte"].is_number_unsigned() || j["new_byte"].get<unsigned>() > 255)) {
        throw ScenarioError(where + ".new_byte", "expected 0..255");
      }
    }
  }
  if (s.op == "assert") {
    require_string(j, "product", where);
    for (const char* f : {"owner", "revoked_holder"}) {
      if (j.contains(f) && ids.count(require_string(j, f, where)) == 0) {
        throw ScenarioError(where + "." + f, "undeclared agent");
      }
    }
    if (j.contains("status") && !product_status_from_string(require_string(j, "status", where))) {
      throw ScenarioError(where + ".status", "unknown status");
    }
    if (j.contains("sold_count") && !j["sold_count"].is_number_unsigned()) {
      throw ScenarioError(where + ".sold_count", "expected a non-negative integer");
    }
  }
  if (s.op == "claim_new") {
    if (j.contains("tid") && !Tid::parse(require_string(j, "tid", where))) {
      throw ScenarioError(where + ".tid", "expected 32 hex characters");
    }
    if (j.contains("pin") && !Pin::is_valid(require_string(j, "pin", where))) {
      throw ScenarioError(where + ".pin", "expected 6-8 characters of [0-9A-Z]");
    }
  }
  if (s.op == "guess_claim" && !Pin::is_valid(require_string(j, "pin", where))) {
    throw ScenarioError(where + ".pin", "expected 6-8 characters of [0-9A-Z]");
  }
  if (s.op == "concurrent") {
    if (nested) throw ScenarioError(where, "concurrent steps cannot nest");
    if (!j.contains("steps") || !j["steps"].is_array() || j["steps"].empty()) {
      throw ScenarioError(where + ".steps", "expected a non-empty array");
    }
    for (std::size_t i = 0; i < j["steps"].size(); ++i) {
      s.children.push_back(
          parse_step(j["steps"][i], where + ".steps[" + std::to_string(i) + "]", ids, true));
    }
  }
  s.args = j;
  return s;
}

}  // namespace

ScenarioSpec ScenarioSpec::parse(const Json& doc) {
  if (!doc.is_object()) throw ScenarioError("$", "expected an object");
  ScenarioSpec spec;
  spec.name = require_string(doc, "name", "$");
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw ScenarioError("$.seed", "expected a non-negative integer");
    spec.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("options")) {
    const auto& o = doc["options"];
    if (!o.is_object()) throw ScenarioError("$.options", "expected an object");
    for (const auto& [k, v] : o.items()) {
      if (k == "weak_email") {
        if (!v.is_boolean()) throw ScenarioError("$.options.weak_email", "expected a boolean");
        spec.weak_email = v.get<bool>();
      } else if (k == "mediator") {
        const auto m = v.is_string() ? v.get<std::string>() : "";
        if (m == "honest-but-curious") {
          spec.posture = MediatorPosture::honest_but_curious;
        } else if (m == "malicious") {
          spec.posture = MediatorPosture::malicious;
        } else {
          throw ScenarioError("$.options.mediator", "expected honest-but-curious or malicious");
        }
      } else if (k == "max_ticks") {
        if (!v.is_number_unsigned()) throw ScenarioError("$.options.max_ticks", "expected a positive integer");
        spec.max_ticks = v.get<std::uint64_t>();
      } else {
        throw ScenarioError("$.options." + k, "unknown option");
      }
    }
  }
  if (!doc.contains("cast") || !doc["cast"].is_array()) {
    throw ScenarioError("$.cast", "expected an array");
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < doc["cast"].size(); ++i) {
    const std::string where = "cast[" + std::to_string(i) + "]";
    const auto& c = doc["cast"][i];
    if (!c.is_object()) throw ScenarioError(where, "expected an object");
    CastMember m;
    m.id = require_string(c, "id", where);
    if (m.id.empty() || m.id == kMediatorId || !ids.insert(m.id).second) {
      throw ScenarioError(where + ".id", "empty, reserved or duplicate id");
    }
    const auto role = require_string(c, "role", where);
    if (role == "manufacturer") {
      m.role = AgentRole::manufacturer;
      if (!c.contains("catalog") || !c["catalog"].is_array()) {
        throw ScenarioError(where + ".catalog", "expected an array of product codes");
      }
      for (const auto& p : c["catalog"]) {
        if (!p.is_string()) throw ScenarioError(where + ".catalog", "expected strings");
        m.catalog.push_back(p.get<std::string>());
      }
    } else if (role == "distributor") {
      m.role = AgentRole::distributor;
      m.manufacturer = require_string(c, "manufacturer", where);
      if (ids.count(m.manufacturer) == 0) {
        throw ScenarioError(where + ".manufacturer", "must name an earlier cast member");
      }
    } else if (role == "wallet" || role == "adversary") {
      m.role = role == "wallet" ? AgentRole::wallet : AgentRole::adversary;
      m.email = require_string(c, "email", where);
    } else {
      throw ScenarioError(where + ".role", "unknown role '" + role + "'");
    }
    spec.cast.push_back(std::move(m));
  }
  if (!doc.contains("script") || !doc["script"].is_array()) {
    throw ScenarioError("$.script", "expected an array");
  }
  for (std::size_t i = 0; i < doc["script"].size(); ++i) {
    spec.script.push_back(
        parse_step(doc["script"][i], "script[" + std::to_string(i) + "]", ids, false));
  }
  return spec;
}

ScenarioSpec ScenarioSpec::parse_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    // e.byte is 1-based; report the line and column of that byte
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ScenarioError("line " + std::to_string(line) + ", column " + std::to_string(column),
                        "invalid JSON");
  }
  return parse(doc);
}

ScenarioSpec load_scenario(const std::string& name_or_path) {
  if (auto text = builtin_scenario(name_or_path)) return ScenarioSpec::parse_text(*text);
  std::ifstream in(name_or_path);
  if (!in) throw ScenarioError(name_or_path, "no such built-in scenario or file");
  std::stringstream ss;
  ss << in.rdbuf();
  return ScenarioSpec::parse_text(ss.str());
}

// --- running ----------------------------------------------------------------

bool ScenarioResult::ok() const {
  return !timed_out && violations.empty() && first_divergence() == nullptr;
}

const StepResult* ScenarioResult::first_divergence() const {
  for (const auto& s : steps) {
    if (!s.ok()) return &s;
  }
  return nullptr;
}

struct ScenarioRunner::Pending {
  const ScenarioStep* step = nullptr;
  std::size_t index = 0;
  enum class Kind { immediate, flow, sale, event, armed } kind = Kind::immediate;
  bool lazy = false;
  std::string agent;
  Nonce nonce;
  std::uint64_t seq = 0;
  std::size_t handle = 0;
  std::string outcome;
  std::string detail;
};

ScenarioRunner::ScenarioRunner(ScenarioSpec spec) : spec_(std::move(spec)) {
  WorldOptions options;
  options.seed = spec_.seed;
  options.weak_email = spec_.weak_email;
  options.posture = spec_.posture;
  world_ = std::make_unique<World>(options);
  for (const auto& m : spec_.cast) {
    switch (m.role) {
      case AgentRole::manufacturer: world_->add_manufacturer(m.id, m.catalog); break;
      case AgentRole::distributor: world_->add_distributor(m.id, m.manufacturer); break;
      case AgentRole::wallet: world_->add_wallet(m.id, m.email); break;
      case AgentRole::adversary: world_->add_adversary(m.id, m.email); break;
    }
  }
  monitor_.attach(*world_);
}

ScenarioRunner::~ScenarioRunner() = default;

namespace {

std::string verdict_outcome(const std::optional<Verdict>& v) {
  if (!v) return "no-response";
  return v->accepted ? "accepted" : "rejected";
}

std::optional<std::uint64_t> select_event(const World& w, const Json& sel) {
  std::vector<std::uint64_t> hits;
  for (const auto& r : w.wire_log()) {
    const auto& ev = r.event;
    if (ev.injected) continue;
    if (sel.contains("kind") && ev.label != sel["kind"].get<std::string>()) continue;
    if (sel.contains("from") && ev.from != sel["from"].get<std::string>()) continue;
    if (sel.contains("to") && ev.to != sel["to"].get<std::string>()) continue;
    hits.push_back(ev.seq);
  }
  const int nth = sel.value("nth", 1);
  const auto n = static_cast<std::size_t>(nth > 0 ? nth : -nth);
  if (n == 0 || n > hits.size()) return std::nullopt;
  return nth > 0 ? hits[n - 1] : hits[hits.size() - n];
}

std::string conn_to(World& w, const std::string& from, const std::string& peer) {
  Connection* c = w.agent(from)->connection_to(peer);
  if (!c) throw std::invalid_argument(from + " has no connection to " + peer);
  return c->conn_id;
}

const HeldCredential* newest_for(const Wallet& w, const std::string& product) {
  const HeldCredential* found = nullptr;
  for (const auto& h : w.credentials()) {
    if (h.vc.attribute("productCode") == product) found = &h;
  }
  return found;
}

}  // namespace

void ScenarioRunner::start(const ScenarioStep& step, std::vector<Pending>& out) {
  World& w = *world_;
  const Json& a = step.args;
  Pending p;
  p.step = &step;
  auto str = [&](const char* k) { return a[k].get<std::string>(); };
  try {
    if (step.op == "connect") {
      w.connect(str("inviter"), str("invitee"));
      p.outcome = "accepted";
    } else if (step.op == "offline" || step.op == "online") {
      w.set_online(str("agent"), step.op == "online");
      p.outcome = "accepted";
    } else if (step.op == "record_sale") {
      const Agent* buyer = w.agent(str("buyer"));
      p.kind = Pending::Kind::sale;
      p.agent = str("distributor");
      p.nonce = w.distributor(p.agent).record_sale(str("product"), buyer->email());
    } else if (step.op == "claim_new") {
      Wallet& wallet = w.wallet(str("wallet"));
      auto emailed = wallet.emailed_claim();
      std::optional<Tid> tid = a.contains("tid") ? Tid::parse(str("tid"))
                                                 : (emailed ? std::optional(emailed->first)
                                                            : std::nullopt);
      std::optional<Pin> pin = a.contains("pin") ? Pin::parse(str("pin"))
                                                 : (emailed ? std::optional(emailed->second)
                                                            : std::nullopt);
      if (!tid || !pin) {
        p.outcome = "rejected";
        p.detail = "no TID and PIN in inbox";
      } else {
        p.kind = Pending::Kind::flow;
        p.agent = wallet.id();
        p.nonce = wallet.claim_new(conn_to(w, p.agent, str("manufacturer")), *tid, *pin);
      }
    } else if (step.op == "sell") {
      Wallet& seller = w.wallet(str("seller"));
      p.kind = Pending::Kind::flow;
      p.agent = seller.id();
      p.nonce = seller.sell(conn_to(w, p.agent, str("buyer")));
    } else if (step.op == "transfer") {
      Wallet& seller = w.wallet(str("seller"));
      std::optional<Tid> tid;
      for (const auto& d : seller.claiming_data()) {
        if (d.role != ClaimRole::selling || !d.encrypted_pin) continue;
        if (a.contains("buyer") && seller.connection(d.counterparty)->peer != str("buyer")) {
          continue;
        }
        tid = d.tid;
      }
      if (!tid) {
        p.outcome = "rejected";
        p.detail = "no encrypted PIN from the buyer";
      } else {
        p.kind = Pending::Kind::flow;
        p.agent = seller.id();
        p.nonce = seller.transfer(conn_to(w, p.agent, str("manufacturer")), str("product"), *tid);
      }
    } else if (step.op == "claim_used") {
      Wallet& buyer = w.wallet(str("buyer"));
      std::optional<Tid> tid;
      for (const auto& d : buyer.claiming_data()) {
        if (d.role == ClaimRole::buying && d.key) tid = d.tid;
      }
      if (!tid) {
        p.outcome = "rejected";
        p.detail = "no PIN shared for any sale";
      } else {
        p.kind = Pending::Kind::flow;
        p.agent = buyer.id();
        p.nonce = buyer.claim_used(conn_to(w, p.agent, str("manufacturer")), *tid);
      }
    } else if (step.op == "attempt_transfer") {
      Adversary& eve = w.adversary(str("adversary"));
      p.kind = Pending::Kind::flow;
      p.agent = eve.id();
      p.nonce = eve.attempt_transfer(conn_to(w, p.agent, str("manufacturer")), str("product"),
                                     *forge_strategy_from_string(str("strategy")));
    } else if (step.op == "guess_claim") {
      Adversary& eve = w.adversary(str("adversary"));
      const Wallet& victim = w.wallet(str("victim"));
      std::optional<Tid> tid;
      for (const auto& d : victim.claiming_data()) {
        if (d.role == ClaimRole::buying) tid = d.tid;
      }
      if (!tid) {
        p.outcome = "rejected";
        p.detail = "victim has no pending purchase";
      } else {
        p.kind = Pending::Kind::flow;
        p.agent = eve.id();
        p.nonce = eve.claim_with_guess(conn_to(w, p.agent, str("manufacturer")), *tid,
                                       *Pin::parse(str("pin")));
      }
    } else if (step.op == "replay" || step.op == "tamper" || step.op == "drop") {
      p.lazy = true;
      if (a.contains("when")) {
        const Json sel = a["when"];
        AdversaryAction action = step.op == "drop"
                                     ? AdversaryAction::drop(0)
                                     : AdversaryAction::tamper(0, a["byte_index"].get<std::size_t>());
        if (a.contains("new_byte")) action.new_byte = a["new_byte"].get<std::uint8_t>();
        p.kind = Pending::Kind::armed;
        p.handle = w.arm(
            [sel](const DeliveryEvent& ev) {
              if (ev.injected) return false;
              if (sel.contains("kind") && ev.label != sel["kind"].get<std::string>()) return false;
              if (sel.contains("from") && ev.from != sel["from"].get<std::string>()) return false;
              if (sel.contains("to") && ev.to != sel["to"].get<std::string>()) return false;
              return true;
            },
            action);
      } else {
        auto target = a.contains("seq") ? std::optional(a["seq"].get<std::uint64_t>())
                                        : select_event(w, a["select"]);
        if (!target || !w.wire(*target)) {
          p.outcome = "no-response";
          p.detail = "no such event";
        } else {
          AdversaryAction action = step.op == "replay"
                                       ? AdversaryAction::replay(*target)
                                       : AdversaryAction::tamper(*target,
                                                                 a["byte_index"].get<std::size_t>());
          if (a.contains("new_byte")) action.new_byte = a["new_byte"].get<std::uint8_t>();
          p.kind = Pending::Kind::event;
          p.seq = *w.inject(action);
          p.detail = "target seq " + std::to_string(*target);
        }
      }
    } else if (step.op == "spoof") {
      Connection* c = w.agent(str("as"))->connection_to(str("peer"));
      if (!c) throw std::invalid_argument("spoof: no connection to imitate");
      MessagePayload payload;
      if (str("kind") == "ownershipTransferReq") {
        const auto junk = w.rng().draw<48>();
        payload.body = OwnershipTransferReq{a.value("product", std::string("PC-100")),
                                            Bytes(junk.begin(), junk.end()), Tid::generate(w.rng())};
      } else {
        payload.body = OwnershipClaimReq{Tid::generate(w.rng()), generate_symmetric_key(w.rng())};
      }
      p.lazy = true;
      p.kind = Pending::Kind::event;
      p.seq = *w.inject(w.make_spoof(str("as"), c->remote_did, c->remote_key, payload));
    } else if (step.op == "assert") {
      p.outcome = "accepted";
      std::string mf_id;
      for (const auto& m : spec_.cast) {
        if (m.role == AgentRole::manufacturer) {
          mf_id = m.id;
          break;
        }
      }
      mf_id = a.value("manufacturer", mf_id);
      const auto* product = w.manufacturer(mf_id).product(str("product"));
      std::vector<std::string> failures;
      if (!product) {
        failures.push_back("unknown product");
      } else {
        if (a.contains("status") && to_string(product->status) != str("status")) {
          failures.push_back("status is " + std::string(to_string(product->status)));
        }
        if (a.contains("sold_count") &&
            product->previously_sold_count != a["sold_count"].get<std::uint64_t>()) {
          failures.push_back("previouslySoldCount is " +
                             std::to_string(product->previously_sold_count));
        }
        auto verify_held = [&](const std::string& holder) -> std::optional<VerificationReport> {
          Wallet& wallet = w.wallet(holder);
          const auto* held = newest_for(wallet, product->product_code);
          if (!held) return std::nullopt;
          const Connection* conn = wallet.connection(held->conn_id);
          const Nonce challenge = generate_nonce(w.rng());
          return verify_presentation(present_proof(held->vc, challenge, conn->local), challenge,
                                     w.vdr());
        };
        if (a.contains("owner")) {
          const auto owner = str("owner");
          auto report = verify_held(owner);
          const auto* held = newest_for(w.wallet(owner), product->product_code);
          if (!report || !report->valid) {
            failures.push_back(owner + " holds no valid credential");
          } else if (held->vc.credential_id != product->current_credential_id ||
                     held->vc.attribute("ConnID") != product->conn_id) {
            failures.push_back(owner + "'s credential is not the current one");
          }
        }
        if (a.contains("revoked_holder")) {
          auto report = verify_held(str("revoked_holder"));
          if (!report || !report->has(VerificationFailure::revoked)) {
            failures.push_back(str("revoked_holder") + "'s credential is not revoked");
          }
        }
      }
      if (!failures.empty()) {
        p.outcome = "rejected";
        for (const auto& f : failures) p.detail += (p.detail.empty() ? "" : "; ") + f;
      }
    }
  } catch (const std::exception& e) {
    p.kind = Pending::Kind::immediate;
    p.outcome = "rejected";
    p.detail = e.what();
  }
  out.push_back(std::move(p));
}

void ScenarioRunner::settle(Pending& p, ScenarioResult&) {
  World& w = *world_;
  switch (p.kind) {
    case Pending::Kind::immediate:
      break;
    case Pending::Kind::flow: {
      const auto* f = w.wallet(p.agent).flow(p.nonce);
      p.outcome = !f || f->status == FlowStatus::pending ? "no-response"
                                                         : std::string(to_string(f->status));
      if (f && !f->detail.empty()) p.detail = f->detail;
      break;
    }
    case Pending::Kind::sale: {
      const auto* s = w.distributor(p.agent).sale(p.nonce);
      p.outcome = !s || s->status == FlowStatus::pending ? "no-response"
                                                         : std::string(to_string(s->status));
      break;
    }
    case Pending::Kind::event: {
      auto v = w.final_verdict(p.seq);
      p.outcome = verdict_outcome(v);
      if (v) p.detail += (p.detail.empty() ? "" : "; ") + v->str();
      break;
    }
    case Pending::Kind::armed: {
      auto target = w.armed_target(p.handle);
      if (!target) {
        p.outcome = "no-response";
        p.detail = "no matching event was sent";
      } else {
        auto v = w.final_verdict(*target);
        p.outcome = verdict_outcome(v);
        p.detail = "seq " + std::to_string(*target) + (v ? "; " + v->str() : "");
      }
      break;
    }
  }
}

ScenarioResult ScenarioRunner::run() {
  ScenarioResult result;
  result.name = spec_.name;
  result.seed = spec_.seed;
  result.steps.resize(spec_.script.size());

  std::vector<Pending> lazy;
  auto record = [&](const Pending& p, std::size_t index) {
    result.steps[index] =
        StepResult{p.step->where, p.step->op, p.step->expect, p.outcome, p.detail};
  };
  for (std::size_t i = 0; i < spec_.script.size(); ++i) {
    const ScenarioStep& step = spec_.script[i];
    std::vector<Pending> started;
    if (step.op == "concurrent") {
      for (const auto& child : step.children) start(child, started);
    } else {
      start(step, started);
    }
    auto report = world_->run_until_quiescent(spec_.max_ticks);
    result.timed_out = result.timed_out || report.timed_out;

    if (step.op == "concurrent") {
      // the container passes iff every child met its own expectation
      std::string detail;
      for (auto& p : started) {
        settle(p, result);
        if (p.outcome != p.step->expect) {
          detail += p.step->where + " expected " + p.step->expect + " got " + p.outcome + "; ";
        }
      }
      result.steps[i] = StepResult{step.where, step.op, step.expect,
                                   detail.empty() ? "accepted" : "rejected", detail};
      continue;
    }
    Pending& p = started.front();
    p.index = i;
    if (p.lazy) {
      lazy.push_back(std::move(p));
    } else {
      settle(p, result);
      record(p, i);
    }
  }
  for (auto& p : lazy) {
    settle(p, result);
    record(p, p.index);
  }

  result.violations = monitor_.violations();
  result.invariant_checks = monitor_.checks();
  for (const auto& id : world_->agent_ids()) {
    const auto* wallet = dynamic_cast<const Wallet*>(world_->agent(id));
    if (!wallet) continue;
    for (const auto& d : wallet->claiming_data()) {
      if (d.role != ClaimRole::buying || !d.pin || !d.key) continue;
      Bytes key(d.key->key_bytes.begin(), d.key->key_bytes.end());
      for (auto& v : check_pin_secrecy(*world_, id, d.pin->str(), key)) {
        result.violations.push_back(std::move(v));
      }
    }
  }
  append_state_dumps(*world_);
  return result;
}

}  // namespace ssiown
