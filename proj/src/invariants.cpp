#include "ssiown/invariants.hpp"

#include <istream>
#include <set>

#include "ssiown/manufacturer.hpp"
#include "ssiown/world.hpp"

namespace ssiown {

Json to_json(const Violation& v) {
  return Json{{"seq", v.seq}, {"tick", v.tick}, {"invariant", v.invariant}, {"detail", v.detail}};
}

void LiveMonitor::attach(World& world) {
  world.add_event_hook(
      [this](const World& w, const DeliveryEvent& ev, const Verdict&) { check(w, ev.seq); });
}

void LiveMonitor::check(const World& world, std::uint64_t seq) {
  ++checks_;
  // audit lines of this event, to see whether a transfer committed
  std::set<std::string> committed;
  const auto& trace = world.trace();
  for (auto it = trace.rbegin(); it != trace.rend() && it->seq == seq; ++it) {
    if (it->line.value("audit", "") == "transfer-committed") {
      committed.insert(it->line.value("product", ""));
    }
  }
  for (const auto& id : world.agent_ids()) {
    const auto* mf = dynamic_cast<const Manufacturer*>(world.agent(id));
    if (!mf) continue;
    std::map<std::string, std::vector<std::string>> live;
    for (const auto& issued : mf->issued()) {
      if (!world.vdr().is_revoked(issued.credential_id)) {
        live[issued.product_code].push_back(issued.credential_id);
      }
    }
    for (const auto& [product, ids] : live) {
      if (ids.size() > 1) {
        violations_.push_back(Violation{seq, world.now(), "single-live-credential",
                                        product + " has " + std::to_string(ids.size()) +
                                            " unrevoked credentials"});
      }
    }
    for (const auto& [code, p] : mf->products()) {
      auto& last = last_count_[id + "/" + code];
      const auto now = p.previously_sold_count;
      if (now < last) {
        violations_.push_back(Violation{seq, world.now(), "counter-monotonicity",
                                        code + " count decreased"});
      } else if (now > last && (now != last + 1 || committed.count(code) == 0)) {
        violations_.push_back(Violation{seq, world.now(), "counter-monotonicity",
                                        code + " count rose without a committed transfer"});
      }
      last = now;
    }
  }
}

namespace {

bool contains_text(const std::string& hay, const std::string& needle) {
  return !needle.empty() && hay.find(needle) != std::string::npos;
}

// Hex needles only count on a byte boundary.
bool contains_hex(const std::string& hay, const std::string& needle) {
  if (needle.empty()) return false;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) {
    if (pos % 2 == 0) return true;
  }
  return false;
}

}  // namespace

std::vector<Violation> check_pin_secrecy(const World& world, const std::string& owner,
                                         const std::string& pin, const Bytes& key) {
  std::vector<Violation> out;
  const std::string key_hex = to_hex(key);
  const std::string pin_hex = to_hex(as_view(pin));
  auto scan_text = [&](const std::string& where, const std::string& text) {
    for (const auto& needle : {pin, key_hex, pin_hex}) {
      if (contains_text(text, needle)) {
        out.push_back(Violation{0, world.now(), "pin-secrecy", where + " exposes a secret"});
        return;
      }
    }
  };
  for (const auto& id : world.agent_ids()) {
    const Agent* a = world.agent(id);
    if (id == owner || a->role() == AgentRole::manufacturer) continue;
    scan_text("state of " + id, a->dump().dump());
  }
  scan_text("mediator state", world.mediator().dump_full().dump());
  for (const auto& w : world.wire_log()) {
    const auto* env = std::get_if<Envelope>(&w.event.body);
    if (!env) continue;
    if (contains_bytes(env->ciphertext, as_view(pin)) || contains_bytes(env->ciphertext, key)) {
      out.push_back(Violation{w.event.seq, w.event.deliver_at, "pin-secrecy",
                              "wire bytes expose a secret"});
    }
  }
  return out;
}

void append_state_dumps(World& world) {
  for (const auto& id : world.agent_ids()) {
    const Agent* a = world.agent(id);
    world.audit("state-dump", Json{{"agent", id},
                                   {"role", std::string(to_string(a->role()))},
                                   {"dump", a->dump()}});
  }
  world.audit("state-dump", Json{{"agent", std::string(kMediatorId)},
                                 {"role", "mediator"},
                                 {"dump", world.mediator().dump_full()}});
}

ScanReport scan_trace(std::istream& in) {
  ScanReport report;
  struct Secret {
    std::string owner;
    std::string pin;
    std::string key_hex;
  };
  std::vector<Secret> secrets;
  std::vector<std::pair<std::uint64_t, std::string>> wire;  // seq, hex
  struct DumpLine {
    std::uint64_t seq;
    std::string agent;
    std::string role;
    std::string text;
  };
  std::vector<DumpLine> dumps;
  std::map<std::string, std::set<std::string>> live;  // product -> credential ids
  std::map<std::string, std::string> product_of;
  std::map<std::string, std::uint64_t> counts;
  std::map<std::uint64_t, std::set<std::string>> committed;  // seq -> products

  std::vector<Json> lines;
  std::string text;
  std::size_t lineno = 0;
  while (std::getline(in, text)) {
    ++lineno;
    if (text.empty()) continue;
    try {
      lines.push_back(Json::parse(text));
    } catch (const Json::exception& e) {
      report.errors.push_back("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  report.lines = lines.size();
  for (const auto& l : lines) {
    if (l.contains("audit") && l["audit"] == "transfer-committed") {
      committed[l.value("seq", 0ull)].insert(l.value("product", ""));
    }
  }
  for (const auto& l : lines) {
    const std::uint64_t seq = l.value("seq", 0ull);
    const std::uint64_t tick = l.value("tick", 0ull);
    if (!l.contains("audit")) {
      ++report.events;
      if (l.contains("wire")) wire.emplace_back(seq, l["wire"].get<std::string>());
      continue;
    }
    const std::string what = l["audit"].get<std::string>();
    if (what == "vc-issued") {
      const std::string product = l.value("product", "");
      const std::string id = l.value("credential_id", "");
      product_of[id] = product;
      auto& set = live[product];
      set.insert(id);
      if (set.size() > 1) {
        report.violations.push_back(Violation{seq, tick, "single-live-credential",
                                              product + " has " + std::to_string(set.size()) +
                                                  " unrevoked credentials"});
      }
    } else if (what == "vc-revoked") {
      const std::string id = l.value("credential_id", "");
      live[product_of[id]].erase(id);
    } else if (what == "sold-count") {
      const std::string product = l.value("product", "");
      const std::uint64_t c = l.value("count", 0ull);
      const std::uint64_t last = counts[product];
      if (c < last || (c > last && (c != last + 1 || committed[seq].count(product) == 0))) {
        report.violations.push_back(
            Violation{seq, tick, "counter-monotonicity", product + " count " +
                                                             std::to_string(last) + " -> " +
                                                             std::to_string(c)});
      }
      counts[product] = c;
    } else if (what == "secret-generated" && l.contains("key")) {
      secrets.push_back(Secret{l.value("owner", ""), l.value("pin", ""), l.value("key", "")});
    } else if (what == "state-dump") {
      dumps.push_back(DumpLine{seq, l.value("agent", ""), l.value("role", ""),
                               l.contains("dump") ? l["dump"].dump() : std::string()});
    }
  }
  for (const auto& s : secrets) {
    const std::string pin_hex = to_hex(as_view(s.pin));
    for (const auto& [seq, hex] : wire) {
      if (contains_hex(hex, pin_hex) || contains_hex(hex, s.key_hex)) {
        report.violations.push_back(
            Violation{seq, 0, "pin-secrecy", "wire bytes expose a secret of " + s.owner});
      }
    }
    for (const auto& d : dumps) {
      if (d.agent == s.owner || d.role == "manufacturer") continue;
      if (contains_text(d.text, s.pin) || contains_text(d.text, s.key_hex) ||
          contains_text(d.text, pin_hex)) {
        report.violations.push_back(Violation{d.seq, 0, "pin-secrecy",
                                              "state of " + d.agent + " exposes a secret of " +
                                                  s.owner});
      }
    }
  }
  return report;
}

}  // namespace ssiown
