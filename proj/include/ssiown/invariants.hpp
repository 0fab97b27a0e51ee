#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ssiown/events.hpp"

namespace ssiown {

class World;

struct Violation {
  std::uint64_t seq = 0;
  std::uint64_t tick = 0;
  std::string invariant;  // single-live-credential, counter-monotonicity, pin-secrecy
  std::string detail;
};

/// Checks the ownership invariants after every processed event.
class LiveMonitor {
 public:
  /// Registers an event hook; the monitor must outlive the world's run.
  void attach(World& world);
  /// Runs every check against the world as it stands.
  void check(const World& world, std::uint64_t seq);

  const std::vector<Violation>& violations() const { return violations_; }
  std::size_t checks() const { return checks_; }

 private:
  std::map<std::string, std::uint64_t> last_count_;  // "MF/product" -> count
  std::vector<Violation> violations_;
  std::size_t checks_ = 0;
};

/// Substring scan for the buyer's PIN and key over every agent dump except
/// the owner's and the manufacturers', the mediator's full dump, and every
/// wire byte. Both raw bytes and hex renderings are searched.
std::vector<Violation> check_pin_secrecy(const World& world, const std::string& owner,
                                         const std::string& pin, const Bytes& key);

/// Emits a state-dump audit line per agent plus the mediator, so a trace
/// file is self-contained for scan_trace.
void append_state_dumps(World& world);

struct ScanReport {
  std::size_t lines = 0;
  std::size_t events = 0;
  std::vector<Violation> violations;
  std::vector<std::string> errors;  // unparseable lines

  bool ok() const { return violations.empty() && errors.empty(); }
};

/// Re-runs the global checks over a recorded NDJSON trace.
ScanReport scan_trace(std::istream& in);

Json to_json(const Violation& v);

}  // namespace ssiown
