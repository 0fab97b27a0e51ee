#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ssiown {

enum class ProductStatus : std::uint8_t { registered, sold, transfer_pending, transferred };

std::string_view to_string(ProductStatus status);
std::optional<ProductStatus> product_status_from_string(std::string_view s);

using AttributeList = std::vector<std::pair<std::string, std::string>>;

/// Manufacturer-side product state. The first eight fields are the product
/// attributes carried in selling requests and credentials.
struct ProductRecord {
  std::string product_code;
  std::string distributor_id;
  std::string conn_id;
  ProductStatus status = ProductStatus::registered;
  std::uint64_t previously_sold_count = 0;
  std::uint64_t first_purchase_date = 0;
  std::uint64_t last_purchase_date = 0;
  std::string email;
  std::optional<std::string> current_credential_id;

  /// Attribute (name, value) pairs in schema order.
  AttributeList attributes() const;

  bool operator==(const ProductRecord&) const = default;
};

/// productCode, distributorID, ConnID, status, previouslySoldCount,
/// firstPurchaseDate, lastPurchaseDate, email.
const std::vector<std::string>& product_attribute_names();

}  // namespace ssiown
