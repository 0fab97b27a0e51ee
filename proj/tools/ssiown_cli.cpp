// ssiown-cli: scenario runner, interactive wallet and trace scanner.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "ssiown/adversary.hpp"
#include "ssiown/distributor.hpp"
#include "ssiown/manufacturer.hpp"
#include "ssiown/scenario.hpp"
#include "ssiown/wallet.hpp"

using namespace ssiown;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

bool write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "cannot write " << path << "\n";
    return false;
  }
  body(out);
  return true;
}

int cmd_run(const std::string& scenario, std::optional<std::uint64_t> seed,
            std::optional<std::uint64_t> max_ticks, const std::string& trace_path,
            const std::string& ledger_path) {
  ScenarioSpec spec;
  try {
    spec = load_scenario(scenario);
  } catch (const ScenarioError& e) {
    std::cerr << "parse error at " << e.what() << "\n";
    return kUsage;
  }
  if (seed) spec.seed = *seed;
  if (max_ticks) spec.max_ticks = *max_ticks;

  ScenarioRunner runner(spec);
  const ScenarioResult result = runner.run();
  for (const auto& s : result.steps) {
    std::cout << (s.ok() ? "ok   " : "FAIL ") << s.where << " " << s.op << ": expected "
              << s.expected << ", got " << s.actual;
    if (!s.detail.empty()) std::cout << " (" << s.detail << ")";
    std::cout << "\n";
  }
  for (const auto& v : result.violations) {
    std::cout << "violation " << to_json(v).dump() << "\n";
  }
  if (!trace_path.empty() &&
      !write_file(trace_path, [&](std::ostream& o) { runner.world().write_trace(o); })) {
    return kUsage;
  }
  if (!ledger_path.empty() &&
      !write_file(ledger_path, [&](std::ostream& o) { runner.world().vdr().write_ndjson(o); })) {
    return kUsage;
  }
  std::cout << result.name << " seed=" << result.seed << " events=" << runner.world().trace().size()
            << " invariant-checks=" << result.invariant_checks << "\n";
  if (result.timed_out) std::cout << "timed out after max ticks\n";
  if (const auto* d = result.first_divergence()) {
    std::cout << "first divergence: " << d->where << " (" << d->op << ") expected " << d->expected
              << ", got " << d->actual << "\n";
  }
  std::cout << (result.ok() ? "PASS" : "FAIL") << "\n";
  return result.ok() ? kPass : kFail;
}

int cmd_scan(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot read " << path << "\n";
    return kUsage;
  }
  const ScanReport report = scan_trace(in);
  for (const auto& e : report.errors) std::cout << "error " << e << "\n";
  for (const auto& v : report.violations) std::cout << "violation " << to_json(v).dump() << "\n";
  std::cout << report.lines << " lines, " << report.events << " events, "
            << report.violations.size() << " violations\n";
  if (!report.errors.empty()) return kUsage;
  return report.ok() ? kPass : kFail;
}

// --- wallet REPL -------------------------------------------------------------

class Repl {
 public:
  Repl(const std::string& agent, std::uint64_t seed) : world_(WorldOptions{seed}) {
    world_.add_manufacturer("MF", {"PC-100", "PC-200", "PC-300"});
    world_.add_distributor("DS", "MF");
    world_.add_wallet("B1", "b1@example.com");
    world_.add_wallet("B2", "b2@example.com");
    world_.add_wallet("B3", "b3@example.com");
    world_.add_adversary("EVE", "eve@example.com");
    use(agent);
  }

  bool use(const std::string& agent) {
    auto* a = world_.agent(agent);
    if (!a || (a->role() != AgentRole::wallet && a->role() != AgentRole::adversary)) {
      std::cout << "no wallet named " << agent << "\n";
      return false;
    }
    me_ = agent;
    return true;
  }

  int loop(std::istream& in) {
    std::string line;
    prompt();
    while (std::getline(in, line)) {
      std::istringstream words(line);
      std::vector<std::string> argv;
      for (std::string w; words >> w;) argv.push_back(w);
      if (!argv.empty()) {
        if (argv[0] == "quit" || argv[0] == "exit") break;
        try {
          dispatch(argv);
        } catch (const std::exception& e) {
          std::cout << "error: " << e.what() << "\n";
        }
      }
      prompt();
    }
    std::cout << "\n";
    return kPass;
  }

 private:
  void prompt() { std::cout << me_ << "> " << std::flush; }
  Wallet& me() { return world_.wallet(me_); }

  std::string conn_to(const std::string& peer) {
    if (auto* c = me().connection_to(peer)) return c->conn_id;
    world_.connect(peer == "MF" ? "MF" : me_, peer == "MF" ? me_ : peer);
    std::cout << "connected to " << peer << "\n";
    return me().connection_to(peer)->conn_id;
  }

  void settle(const Nonce& flow) {
    world_.run_until_quiescent();
    const auto* f = me().flow(flow);
    if (!f || f->status == FlowStatus::pending) {
      std::cout << "no response yet\n";
    } else {
      std::cout << to_string(f->status) << (f->detail.empty() ? "" : ": " + f->detail) << "\n";
    }
  }

  void dispatch(const std::vector<std::string>& argv) {
    const std::string& cmd = argv[0];
    auto arg = [&](std::size_t i) -> std::string {
      if (i >= argv.size()) throw std::invalid_argument("missing argument; try 'help'");
      return argv[i];
    };
    if (cmd == "help") {
      std::cout << "commands: use <wallet> | connect <peer> | buy <product> | inbox | "
                   "claim [<TID> <PIN>] | credentials | sell <buyer> | transfer <product> "
                   "[buyer] | claim-used | state | quit\n";
    } else if (cmd == "use") {
      use(arg(1));
    } else if (cmd == "connect") {
      conn_to(arg(1));
    } else if (cmd == "buy") {
      auto nonce = world_.distributor("DS").record_sale(arg(1), me().email());
      world_.run_until_quiescent();
      const auto* sale = world_.distributor("DS").sale(nonce);
      std::cout << "sale " << to_string(sale->status) << "\n";
    } else if (cmd == "inbox") {
      if (me().inbox().empty()) std::cout << "(empty)\n";
      for (const auto& m : me().inbox()) {
        std::cout << m.subject << " " << m.value << "  [" << to_hex(m.nonce.value) << "]\n";
      }
    } else if (cmd == "claim") {
      std::optional<Tid> tid;
      std::optional<Pin> pin;
      if (argv.size() >= 3) {
        tid = Tid::parse(argv[1]);
        pin = Pin::parse(argv[2]);
        if (!tid || !pin) throw std::invalid_argument("malformed TID or PIN");
      } else if (auto emailed = me().emailed_claim()) {
        tid = emailed->first;
        pin = emailed->second;
      } else {
        throw std::invalid_argument("no TID and PIN in the inbox");
      }
      settle(me().claim_new(conn_to("MF"), *tid, *pin));
    } else if (cmd == "credentials") {
      if (me().credentials().empty()) std::cout << "(none)\n";
      for (const auto& h : me().credentials()) {
        std::cout << h.vc.credential_id << " " << h.vc.attribute("productCode").value_or("?")
                  << " sold-count=" << h.vc.attribute("previouslySoldCount").value_or("?")
                  << (world_.vdr().is_revoked(h.vc.credential_id) ? " REVOKED" : " valid")
                  << "\n";
      }
    } else if (cmd == "sell") {
      settle(me().sell(conn_to(arg(1))));
    } else if (cmd == "transfer") {
      std::optional<Tid> tid;
      for (const auto& d : me().claiming_data()) {
        if (d.role != ClaimRole::selling || !d.encrypted_pin) continue;
        if (argv.size() > 2 && me().connection(d.counterparty)->peer != argv[2]) continue;
        tid = d.tid;
      }
      if (!tid) throw std::invalid_argument("no buyer has shared an encrypted PIN yet");
      settle(me().transfer(conn_to("MF"), arg(1), *tid));
    } else if (cmd == "claim-used") {
      std::optional<Tid> tid;
      for (const auto& d : me().claiming_data()) {
        if (d.role == ClaimRole::buying && d.key) tid = d.tid;
      }
      if (!tid) throw std::invalid_argument("no purchase in progress");
      settle(me().claim_used(conn_to("MF"), *tid));
    } else if (cmd == "state") {
      std::cout << me().dump().dump(2) << "\n";
    } else {
      std::cout << "unknown command '" << cmd << "'; try 'help'\n";
    }
  }

  World world_;
  std::string me_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Product ownership simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a built-in scenario or a scenario file");
  std::string scenario, trace_path, ledger_path;
  std::optional<std::uint64_t> seed, max_ticks;
  run->add_option("scenario", scenario, "built-in name or JSON path")->required();
  run->add_option("--seed", seed, "override the scenario seed");
  run->add_option("--max-ticks", max_ticks, "stop after this many ticks");
  run->add_option("--trace", trace_path, "write the NDJSON trace here");
  run->add_option("--ledger-out", ledger_path, "write the registry ledger here");

  auto* list = app.add_subcommand("list", "List built-in scenarios");
  auto* show = app.add_subcommand("show", "Print a built-in scenario as JSON");
  std::string show_name;
  show->add_option("name", show_name)->required();

  auto* wallet = app.add_subcommand("wallet", "Interactive wallet");
  std::string agent = "B1";
  std::uint64_t wallet_seed = 1;
  wallet->add_option("agent", agent, "wallet to act as (B1, B2, B3, EVE)");
  wallet->add_option("--seed", wallet_seed);

  auto* scan = app.add_subcommand("scan", "Check invariants over a trace file");
  std::string scan_path;
  scan->add_option("trace", scan_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kPass : kUsage;
  }

  if (*run) return cmd_run(scenario, seed, max_ticks, trace_path, ledger_path);
  if (*list) {
    for (const auto& n : builtin_scenario_names()) std::cout << n << "\n";
    return kPass;
  }
  if (*show) {
    auto text = builtin_scenario(show_name);
    if (!text) {
      std::cerr << "no built-in scenario '" << show_name << "'\n";
      return kUsage;
    }
    std::cout << Json::parse(*text).dump(2) << "\n";
    return kPass;
  }
  if (*wallet) {
    Repl repl(agent, wallet_seed);
    return repl.loop(std::cin);
  }
  if (*scan) return cmd_scan(scan_path);
  return kUsage;
}
