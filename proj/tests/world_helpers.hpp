#pragma once

#include "ssiown/distributor.hpp"
#include "ssiown/manufacturer.hpp"
#include "ssiown/wallet.hpp"
#include "ssiown/world.hpp"

namespace helpers {

using namespace ssiown;

inline void cast(World& w) {
  w.add_manufacturer("MF", {"PC-100", "PC-200"});
  w.add_distributor("DS", "MF");
  w.add_wallet("B1", "b1@example.com");
  w.add_wallet("B2", "b2@example.com");
}

/// Sale at DS plus the buyer's claim with the mailed TID and PIN.
inline Nonce purchase(World& w, const std::string& buyer, const std::string& product = "PC-100") {
  w.distributor("DS").record_sale(product, w.agent(buyer)->email());
  w.run_until_quiescent();
  if (!w.agent(buyer)->connection_to("MF")) w.connect("MF", buyer);
  auto mail = w.wallet(buyer).emailed_claim();
  if (!mail) throw std::runtime_error("no TID/PIN mail");
  auto n = w.wallet(buyer).claim_new(w.agent(buyer)->connection_to("MF")->conn_id, mail->first,
                                     mail->second);
  w.run_until_quiescent();
  return n;
}

/// seller -> buyer resale through the manufacturer. Returns the buyer's claim flow.
inline Nonce resale(World& w, const std::string& seller, const std::string& buyer,
                    const std::string& product = "PC-100") {
  if (!w.agent(seller)->connection_to(buyer)) w.connect(seller, buyer);
  auto& s = w.wallet(seller);
  s.sell(s.connection_to(buyer)->conn_id);
  w.run_until_quiescent();
  if (!w.agent(buyer)->connection_to("MF")) w.connect("MF", buyer);
  const OwnershipClaimingData* sale = nullptr;
  for (const auto& d : s.claiming_data()) {
    if (d.role == ClaimRole::selling && d.encrypted_pin) sale = &d;
  }
  if (!sale) throw std::runtime_error("buyer never shared a PIN");
  s.transfer(s.connection_to("MF")->conn_id, product, sale->tid);
  w.run_until_quiescent();
  auto& b = w.wallet(buyer);
  auto n = b.claim_used(b.connection_to("MF")->conn_id, sale->tid);
  w.run_until_quiescent();
  return n;
}

inline std::vector<Json> events(const World& w) {
  std::vector<Json> out;
  for (const auto& r : w.trace()) {
    if (!r.line.contains("audit")) out.push_back(r.line);
  }
  return out;
}

inline std::string trace_text(const World& w) {
  std::ostringstream ss;
  w.write_trace(ss);
  return ss.str();
}

}  // namespace helpers
