#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssiown/events.hpp"
#include "ssiown/invariants.hpp"
#include "ssiown/world.hpp"

namespace ssiown {

/// Bad scenario document. `where` is a path like "script[3].product".
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

struct CastMember {
  std::string id;
  AgentRole role = AgentRole::wallet;
  std::string email;
  std::vector<std::string> catalog;  // manufacturer
  std::string manufacturer;          // distributor
};

struct ScenarioStep {
  std::string op;
  Json args;
  std::string expect;  // accepted | rejected | no-response
  std::string where;
  std::vector<ScenarioStep> children;  // concurrent
};

struct ScenarioSpec {
  std::string name;
  std::uint64_t seed = 1;
  bool weak_email = false;
  MediatorPosture posture = MediatorPosture::honest_but_curious;
  std::uint64_t max_ticks = 10'000;
  std::vector<CastMember> cast;
  std::vector<ScenarioStep> script;

  static ScenarioSpec parse(const Json& doc);
  static ScenarioSpec parse_text(const std::string& text);
};

const std::vector<std::string>& builtin_scenario_names();
std::optional<std::string> builtin_scenario(const std::string& name);
/// A built-in name or a path to a JSON file. Throws ScenarioError.
ScenarioSpec load_scenario(const std::string& name_or_path);

struct StepResult {
  std::string where;
  std::string op;
  std::string expected;
  std::string actual;
  std::string detail;

  bool ok() const { return expected == actual; }
};

struct ScenarioResult {
  std::string name;
  std::uint64_t seed = 0;
  std::vector<StepResult> steps;
  std::vector<Violation> violations;
  bool timed_out = false;
  std::size_t invariant_checks = 0;

  bool ok() const;
  /// First step whose verdict differs from the expectation.
  const StepResult* first_divergence() const;
};

/// Runs a parsed scenario to completion and keeps the world for inspection.
class ScenarioRunner {
 public:
  explicit ScenarioRunner(ScenarioSpec spec);
  ~ScenarioRunner();

  ScenarioResult run();
  World& world() { return *world_; }
  const ScenarioSpec& spec() const { return spec_; }

 private:
  struct Pending;
  void start(const ScenarioStep& step, std::vector<Pending>& out);
  void settle(Pending& p, ScenarioResult& result);

  ScenarioSpec spec_;
  std::unique_ptr<World> world_;
  LiveMonitor monitor_;
};

}  // namespace ssiown
