#include "ssiown/product.hpp"

namespace ssiown {

namespace {
constexpr std::string_view kStatusNames[] = {"registered", "sold", "transfer_pending",
                                             "transferred"};
}

std::string_view to_string(ProductStatus status) {
  return kStatusNames[static_cast<std::size_t>(status)];
}

std::optional<ProductStatus> product_status_from_string(std::string_view s) {
  for (std::size_t i = 0; i < std::size(kStatusNames); ++i) {
    if (kStatusNames[i] == s) return static_cast<ProductStatus>(i);
  }
  return std::nullopt;
}

const std::vector<std::string>& product_attribute_names() {
  static const std::vector<std::string> names = {
      "productCode",         "distributorID",    "ConnID",           "status",
      "previouslySoldCount", "firstPurchaseDate", "lastPurchaseDate", "email"};
  return names;
}

AttributeList ProductRecord::attributes() const {
  return {
      {"productCode", product_code},
      {"distributorID", distributor_id},
      {"ConnID", conn_id},
      {"status", std::string(to_string(status))},
      {"previouslySoldCount", std::to_string(previously_sold_count)},
      {"firstPurchaseDate", std::to_string(first_purchase_date)},
      {"lastPurchaseDate", std::to_string(last_purchase_date)},
      {"email", email},
  };
}

}  // namespace ssiown
