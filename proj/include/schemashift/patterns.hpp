#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "schemashift/evolution.hpp"
#include "schemashift/schema.hpp"

namespace schemashift {

// Value format a column is expected to follow, inferred from its name and
// declared type. Shaped columns never hold NULL in generated data, which
// keeps composite splits and merges lossless.
enum class ValueShape {
    Plain,
    FullName,    // "First Last"
    GivenName,
    FamilyName,
    Date,        // YYYY-MM-DD
    Address,     // "street, city, state"
    Street,
    City,
    State,
    Year,        // zero-padded text
    Month,
    Day,
};

ValueShape value_shape(const Column& column);

std::string_view delimiter_for(CompositeKind kind);

// A column that split_columns can decompose, with the component names it
// would receive.
struct SplitCandidate {
    CompositeKind kind;
    std::vector<std::string> components;
};
std::optional<SplitCandidate> split_candidate(const Column& column);

// Co-located components that merge_columns can fuse.
struct MergeCandidate {
    CompositeKind kind;
    std::vector<std::string> components;  // in composite order
    std::string merged;
};
std::vector<MergeCandidate> merge_candidates(const Table& table);

}  // namespace schemashift
