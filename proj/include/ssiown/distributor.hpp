#pragma once

#include <map>
#include <optional>
#include <string>

#include "ssiown/agent.hpp"

namespace ssiown {

enum class FlowStatus { pending, accepted, rejected };
std::string_view to_string(FlowStatus s);

class Distributor : public Agent {
 public:
  struct Sale {
    std::string product_code;
    std::string buyer_email;
    FlowStatus status = FlowStatus::pending;
    std::optional<Tid> tid;
  };

  Distributor(World& world, std::string id, std::string email, std::string manufacturer_id);

  /// Sales clerk enters productCode and the buyer's email; the rest of the
  /// product attributes are filled in here. Returns the flow nonce.
  Nonce record_sale(const std::string& product_code, const std::string& buyer_email);

  const Sale* sale(const Nonce& nonce) const;
  const std::map<Nonce, Sale>& sales() const { return sales_; }

 protected:
  Verdict on_message(Connection& conn, const OpenedMessage& msg) override;
  Verdict on_https(const std::string& from, const HttpsMessage& msg) override;
  bool may_open_flow(const Connection&, MessageKind) const override { return false; }
  void dump_role_state(Json& out) const override;

 private:
  std::string manufacturer_id_;
  std::map<Nonce, Sale> sales_;
};

}  // namespace ssiown
