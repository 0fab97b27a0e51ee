#include <catch_amalgamated.hpp>

#include <sstream>

#include "ssiown/manufacturer.hpp"
#include "ssiown/scenario.hpp"

using namespace ssiown;

namespace {

std::string minimal(const std::string& script, const std::string& extra_cast = "") {
  return R"({"name": "t", "seed": 3, "cast": [
    {"id": "MF", "role": "manufacturer", "catalog": ["PC-100"]},
    {"id": "DS", "role": "distributor", "manufacturer": "MF"},
    {"id": "B1", "role": "wallet", "email": "b1@example.com"})" +
         extra_cast + R"(], "script": [)" + script + "]}";
}

std::string where_of(const std::string& text) {
  try {
    ScenarioSpec::parse_text(text);
  } catch (const ScenarioError& e) {
    return e.where();
  }
  return "<parsed>";
}

}  // namespace

TEST_CASE("parse errors name the offending location") {
  CHECK(where_of(minimal(R"({"op": "connect", "inviter": "MF", "invitee": "B1"})")) ==
        "script[0].expect");
  CHECK(where_of(minimal(R"({"op": "connect", "inviter": "MF", "invitee": "B1", "expect": "accepted"},
                            {"op": "fly", "expect": "accepted"})")) == "script[1].op");
  CHECK(where_of(minimal(R"({"op": "connect", "inviter": "MF", "invitee": "B9", "expect": "accepted"})")) ==
        "script[0].invitee");
  CHECK(where_of(minimal(R"({"op": "connect", "inviter": "MF", "invitee": "B1", "expect": "maybe"})")) ==
        "script[0].expect");
  CHECK(where_of(minimal(R"({"op": "tamper", "select": {"kind": "x"}, "expect": "rejected"})")) ==
        "script[0].byte_index");
  CHECK(where_of(minimal(R"({"op": "replay", "select": {"kind": "x", "colour": "red"}, "expect": "rejected"})")) ==
        "script[0].select.colour");
  CHECK(where_of(minimal(R"({"op": "concurrent", "expect": "accepted", "steps": [
                              {"op": "sell", "seller": "B1", "buyer": "B2", "expect": "accepted"}]})")) ==
        "script[0].steps[0].buyer");
  CHECK(where_of(minimal("", R"(, {"id": "MD", "role": "wallet", "email": "x"})")) == "cast[3].id");
  CHECK(where_of(minimal("", R"(, {"id": "X", "role": "wizard"})")) == "cast[3].role");
  CHECK(where_of(R"({"name": "t", "cast": [], "script": [], "options": {"turbo": true}})") ==
        "$.options.turbo");
  CHECK(where_of("{\"name\": \"t\",\n \"cast\": [}") == "line 2, column 11");
  CHECK(where_of(minimal("")) == "<parsed>");
}

TEST_CASE("load_scenario reads built-ins and reports missing files") {
  CHECK(load_scenario("full-lifecycle").name == "full-lifecycle");
  CHECK_THROWS_AS(load_scenario("/nonexistent/x.json"), ScenarioError);
}

TEST_CASE("every built-in scenario passes") {
  REQUIRE(builtin_scenario_names().size() >= 9);
  for (const auto& name : builtin_scenario_names()) {
    CAPTURE(name);
    ScenarioRunner runner(load_scenario(name));
    auto r = runner.run();
    if (const auto* d = r.first_divergence()) {
      FAIL_CHECK(d->where << " expected " << d->expected << " got " << d->actual << " ("
                          << d->detail << ")");
    }
    CHECK(r.violations.empty());
    CHECK_FALSE(r.timed_out);
    CHECK(r.invariant_checks > 0);
    CHECK(r.ok());
  }
}

TEST_CASE("a wrong expectation is the first divergence") {
  auto doc = Json::parse(*builtin_scenario("full-lifecycle"));
  // script[2] is the new-product claim
  REQUIRE(doc["script"][2]["op"] == "claim_new");
  doc["script"][2]["expect"] = "rejected";
  doc["script"][4]["expect"] = "no-response";
  ScenarioRunner runner(ScenarioSpec::parse(doc));
  auto r = runner.run();
  CHECK_FALSE(r.ok());
  const auto* d = r.first_divergence();
  REQUIRE(d);
  CHECK(d->where == "script[2]");
  CHECK(d->actual == "accepted");
}

TEST_CASE("runs are reproducible and the seed matters") {
  auto trace_of = [](std::uint64_t seed) {
    auto spec = load_scenario("full-lifecycle");
    spec.seed = seed;
    ScenarioRunner runner(spec);
    runner.run();
    std::ostringstream ss;
    runner.world().write_trace(ss);
    return ss.str();
  };
  CHECK(trace_of(5) == trace_of(5));
  CHECK(trace_of(5) != trace_of(6));
}

TEST_CASE("runner exposes the final world") {
  ScenarioRunner runner(load_scenario("full-lifecycle"));
  REQUIRE(runner.run().ok());
  const auto* p = runner.world().manufacturer("MF").product("PC-100");
  REQUIRE(p);
  CHECK(p->previously_sold_count == 1);
  CHECK(p->conn_id == runner.world().agent("MF")->connection_to("B2")->conn_id);
}
