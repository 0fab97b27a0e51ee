#include "ssiown/distributor.hpp"

#include "ssiown/world.hpp"

namespace ssiown {

std::string_view to_string(FlowStatus s) {
  switch (s) {
    case FlowStatus::pending: return "pending";
    case FlowStatus::accepted: return "accepted";
    case FlowStatus::rejected: return "rejected";
  }
  return "unknown";
}

Distributor::Distributor(World& world, std::string id, std::string email,
                         std::string manufacturer_id)
    : Agent(world, std::move(id), std::move(email), AgentRole::distributor),
      manufacturer_id_(std::move(manufacturer_id)) {}

Nonce Distributor::record_sale(const std::string& product_code, const std::string& buyer_email) {
  ProductRecord p;
  p.product_code = product_code;
  p.distributor_id = id_;
  p.status = ProductStatus::sold;
  p.first_purchase_date = world_.now();
  p.last_purchase_date = world_.now();
  p.email = buyer_email;
  const Nonce n1 = generate_nonce(world_.rng());
  https_session(manufacturer_id_).expect(n1, MessageKind::product_selling_resp);
  sales_[n1] = Sale{product_code, buyer_email, FlowStatus::pending, std::nullopt};
  send_https(manufacturer_id_, n1, MessagePayload{ProductSellingReq{p}});
  return n1;
}

const Distributor::Sale* Distributor::sale(const Nonce& nonce) const {
  auto it = sales_.find(nonce);
  return it == sales_.end() ? nullptr : &it->second;
}

Verdict Distributor::on_message(Connection&, const OpenedMessage&) {
  return Verdict::reject("unsupported-kind");
}

Verdict Distributor::on_https(const std::string&, const HttpsMessage& msg) {
  const auto* resp = msg.payload.as<ProductSellingResp>();
  auto it = sales_.find(msg.nonce);
  if (!resp || it == sales_.end()) return Verdict::reject("unsupported-kind");
  Sale& sale = it->second;
  if (resp->status != AckStatus::accepted || !resp->tid) {
    sale.status = FlowStatus::rejected;
    notify("sale of " + sale.product_code + " refused");
    return Verdict::ok("sale-refused");
  }
  sale.status = FlowStatus::accepted;
  sale.tid = resp->tid;
  world_.send_email(id_, OobMessage{sale.buyer_email, "TID", msg.nonce, resp->tid->hex()});
  return Verdict::ok();
}

void Distributor::dump_role_state(Json& out) const {
  Json sales = Json::array();
  for (const auto& [n, s] : sales_) {
    sales.push_back(Json{{"nonce", to_hex(n.value)},
                         {"productCode", s.product_code},
                         {"buyer_email", s.buyer_email},
                         {"status", std::string(to_string(s.status))},
                         {"tid", s.tid ? Json(s.tid->hex()) : Json()}});
  }
  out["sales"] = std::move(sales);
}

}  // namespace ssiown
