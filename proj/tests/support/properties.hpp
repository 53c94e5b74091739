#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "schemashift/evolution.hpp"

namespace schemashift::testkit {

struct PropertyResult {
    std::size_t trials = 0;
    std::size_t passed = 0;
    std::vector<std::string> failures;  // the first few, for diagnostics
    std::map<std::string, std::size_t> tally;
    std::chrono::milliseconds elapsed{0};

    bool ok() const { return trials > 0 && passed == trials; }
    void fail(std::string why);
};

// Random rename maps applied, then inverted: SqlRefs of the gold survive.
PropertyResult rename_round_trip(std::uint64_t seed, std::size_t maps);

// Random table splits migrated, then joined back on the key by hand.
PropertyResult split_rejoin(std::uint64_t seed, std::size_t splits);

// Embedded engine against SQLite on exported dumps.
PropertyResult engine_cross_check(std::uint64_t seed, std::size_t pairs);

// Generated instances under one preserving type: base gold on the base data
// equals evolved gold on the migrated data. Counts cases with
// needs_review=false until `cases` of them are checked.
PropertyResult semantic_preservation(std::uint64_t seed, PerturbationType type, std::size_t cases);

// Every type on every generated schema: emitted schemas validate, failures
// carry a typed reason. tally counts outcomes by type/reason.
PropertyResult integrity_totality(std::uint64_t seed, std::size_t schemas);

// Refusal types: every emitted gold equals the matching sentence.
PropertyResult refusal_exactness(std::uint64_t seed, std::size_t cases);

// set_prf against a naive list-based implementation, plus harmonic-mean and
// swap-symmetry identities.
PropertyResult metric_oracle(std::uint64_t seed, std::size_t trials);

}  // namespace schemashift::testkit
