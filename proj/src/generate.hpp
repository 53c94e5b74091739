#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "schemashift/database.hpp"

namespace schemashift::detail {

// Random value for an ordinary column, following its shape and type.
Value random_value(const Column& column, std::mt19937_64& rng, bool allow_null);

// The k-th value of a unique key sequence for `column`.
Value key_value(const Column& column, std::int64_t k);

// Generates `rows` rows for each listed table of db.schema, parents first.
// Tables already present in db.rows serve as FK pools; foreign keys from
// them into a generated table force the referenced values to exist.
void fill_tables(Database& db, const std::vector<std::string>& tables, std::size_t rows, std::uint64_t seed);

}  // namespace schemashift::detail
