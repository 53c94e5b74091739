#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "generators.hpp"
#include "schemashift/database.hpp"
#include "schemashift/instance.hpp"
#include "schemashift/schema.hpp"

namespace schemashift::testkit {

struct GeneratedCase {
    Schema full;        // the whole database
    Instance instance;  // relevant schema + random gold over it
    Database db;        // instance.schema populated with `populate_seed`
};

// Random database, a focus table with its FK neighbours as the relevant
// schema, and a query over the populated relevant schema as gold.
GeneratedCase random_case(std::mt19937_64& rng, int index, std::uint64_t populate_seed,
                          const SchemaGenConfig& schema_cfg = {}, const QueryGenConfig& query_cfg = {});

}  // namespace schemashift::testkit
