#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "schemashift/evolution.hpp"
#include "schemashift/ident.hpp"
#include "schemashift/instance.hpp"
#include "schemashift/synth.hpp"

namespace schemashift {

// Inclusive range of requested item counts.
struct CountRange {
    int lo = 1;
    int hi = 1;
};

inline constexpr int kSynthAttempts = 5;

struct PerturbConfig {
    CountRange add_columns{1, 8};  // per table
    CountRange remove_columns{1, 6};
    CountRange remove_columns_in_sql{1, 3};
    CountRange rename_columns{1, 6};
    CountRange split_columns{1, 2};  // columns split
    CountRange merge_columns{1, 1};  // component groups merged
    std::vector<CompositeKind> patterns{CompositeKind::Name, CompositeKind::Date, CompositeKind::Address};
    CountRange add_tables{1, 3};
    CountRange rename_tables{1, 4};
};

// Full database schemas keyed by db_id; add_tables draws from these.
using SchemaPool = std::map<std::string, Schema, ILess>;

// Every operator requires a valid schema and SQL gold (InvalidArgument
// otherwise). Eligibility failures raise NoEligibleColumns / NoEligibleTables,
// proposal failures SynthesisExhausted; backend errors propagate.
PerturbedInstance perturb_add_columns(const Instance& in, CountRange per_table, Synthesizer& synth,
                                      std::mt19937_64& rng);
PerturbedInstance perturb_remove_columns(const Instance& in, CountRange count, std::mt19937_64& rng);
PerturbedInstance perturb_remove_columns_in_sql(const Instance& in, CountRange count, std::mt19937_64& rng);
PerturbedInstance perturb_rename_columns(const Instance& in, CountRange count, Synthesizer& synth,
                                         std::mt19937_64& rng);
PerturbedInstance perturb_split_columns(const Instance& in, const std::vector<CompositeKind>& patterns,
                                        CountRange count, std::mt19937_64& rng);
PerturbedInstance perturb_merge_columns(const Instance& in, const std::vector<CompositeKind>& patterns,
                                        CountRange count, std::mt19937_64& rng);
PerturbedInstance perturb_add_tables(const Instance& in, CountRange count, const SchemaPool& pool,
                                     std::mt19937_64& rng);
PerturbedInstance perturb_remove_tables(const Instance& in, std::mt19937_64& rng);
PerturbedInstance perturb_rename_tables(const Instance& in, CountRange count, Synthesizer& synth,
                                        std::mt19937_64& rng);
PerturbedInstance perturb_split_tables(const Instance& in, Synthesizer& synth, std::mt19937_64& rng);
PerturbedInstance perturb_merge_tables(const Instance& in, Synthesizer& synth, std::mt19937_64& rng);

PerturbedInstance perturb(const Instance& in, PerturbationType type, const PerturbConfig& cfg, Synthesizer& synth,
                          const SchemaPool& pool, std::mt19937_64& rng);

}  // namespace schemashift
