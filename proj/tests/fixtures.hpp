#pragma once

#include "ssiown/credential.hpp"
#include "ssiown/crypto.hpp"
#include "ssiown/product.hpp"
#include "ssiown/vdr.hpp"

namespace fixtures {

using namespace ssiown;

// A manufacturer's ledger footprint without the rest of the world.
struct Issuer {
  Rng rng;
  Registry vdr;
  KeyPair root;
  Did did;
  CredentialSchema schema;
  CredentialDefinition cred_def;
  std::string revreg;

  explicit Issuer(std::uint64_t seed = 1)
      : rng(seed),
        root(generate_keypair(rng, KeyPurpose::did_root)),
        did(derive_did(root.public_key)) {
    vdr.publish_did(did, "MF");
    schema = publish_product_schema(vdr, did.to_string());
    cred_def = publish_cred_def(vdr, schema, did);
    revreg = vdr.create_revocation_registry(did.to_string());
  }

  static ProductRecord product(const std::string& code = "PC-100",
                               const std::string& conn = "MF-conn-1") {
    ProductRecord p;
    p.product_code = code;
    p.distributor_id = "DS";
    p.conn_id = conn;
    p.status = ProductStatus::sold;
    p.previously_sold_count = 0;
    p.first_purchase_date = 3;
    p.last_purchase_date = 3;
    p.email = "b1@example.com";
    return p;
  }

  VerifiableCredential issue(const ProductRecord& p, std::uint64_t at = 5) {
    return generate_vc(p, cred_def, root.private_key, vdr, revreg, at);
  }
};

}  // namespace fixtures
