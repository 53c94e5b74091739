#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "schemashift/database.hpp"
#include "schemashift/evolution.hpp"
#include "schemashift/instance.hpp"
#include "schemashift/perturb.hpp"
#include "schemashift/synth.hpp"

namespace schemashift {

// One line of a corpus file.
struct CorpusRecord {
    std::string instance_id;
    std::string db_id;
    std::string nlq;
    std::string schema_ddl;
    std::string gold;                         // SQL or a refusal sentence
    std::string ptype = "original";           // or a perturbation type name
    std::optional<EvolutionRecord> evolution; // absent for originals
    bool needs_review = false;

    bool operator==(const CorpusRecord&) const = default;
};

// An instance/type pair the engine declined, with the error code as reason.
struct SkipRecord {
    std::string instance_id;
    std::string ptype;
    std::string reason;
    std::string detail;

    bool operator==(const SkipRecord&) const = default;
};

using Json = nlohmann::ordered_json;

Json to_json(const EvolutionRecord& record);
// Throws InvalidArgument on shape errors.
EvolutionRecord evolution_from_json(const Json& j);

Json to_json(const CorpusRecord& record);
Json to_json(const SkipRecord& skip);
CorpusRecord record_from_json(const Json& j);

CorpusRecord to_record(const Instance& instance);
CorpusRecord to_record(const PerturbedInstance& perturbed);
// Reparses the DDL. Throws SyntaxError / IntegrityError.
Instance to_instance(const CorpusRecord& record);

// Invariant violations: DDL that does not reparse or validate, SQL gold that
// does not bind, originals carrying an evolution, unknown ptypes.
std::vector<std::string> check_record(const CorpusRecord& record);

// Corpus files: UTF-8 JSON Lines. Readers throw FormatError with the file
// and 1-based line of the first bad record; writers throw std::runtime_error
// on I/O failure.
std::vector<CorpusRecord> read_corpus(const std::filesystem::path& path);
void write_corpus(const std::filesystem::path& path, const std::vector<CorpusRecord>& records);
void write_skips(const std::filesystem::path& path, const std::vector<SkipRecord>& skips);
std::vector<SkipRecord> read_skips(const std::filesystem::path& path);

// Tables reachable from `seeds` within `depth` foreign-key hops.
Schema relevant_schema(const Schema& full, const std::set<std::string>& seeds, int depth);

struct IngestReject {
    std::string instance_id;
    std::string db_id;
    std::string reason;
    std::string detail;
};

struct IngestResult {
    std::vector<Instance> instances;
    std::vector<IngestReject> rejects;
    SchemaPool databases;               // full schemas by db_id
    std::vector<std::string> warnings;  // repairs applied to the manifest
};

// Reads a tables manifest (JSON array with db_id, table_names_original,
// column_names_original, column_types, primary_keys, foreign_keys) or a
// directory of <db_id>.sql DDL dumps.
SchemaPool load_schemas(const std::filesystem::path& source, std::vector<std::string>* warnings = nullptr);

// Reads a questions file (JSON array of objects with db_id, question and SQL;
// question_id optional) against `schema_source`.
IngestResult ingest_bird(const std::filesystem::path& questions, const std::filesystem::path& schema_source,
                         int closure_depth = 1);

struct PerturbOutput {
    std::vector<CorpusRecord> records;
    std::vector<SkipRecord> skips;
};

// Every instance under every type, in parallel, each with its own stream
// make_stream(seed, instance_id, ptype). Output is ordered by instance_id,
// then by type order.
PerturbOutput run_perturb(const std::vector<Instance>& instances, const std::vector<PerturbationType>& types,
                          std::uint64_t seed, Synthesizer& synth, const SchemaPool& pool,
                          const PerturbConfig& cfg = {}, unsigned threads = 0);

// Originals plus the perturbed records, shuffled by `seed`. Records of the
// refusal types are dropped unless `include_oos`.
std::vector<CorpusRecord> emit_training_mix(const std::vector<CorpusRecord>& original,
                                            const std::vector<std::vector<CorpusRecord>>& perturbed,
                                            std::uint64_t seed, bool include_oos = true);

// Database a record is executed against: its schema populated with a seed
// derived from `seed` and the instance id.
Database record_database(const CorpusRecord& record, std::uint64_t seed, std::size_t rows_per_table = 16);

// Gold is SQL and executes on record_database.
bool gold_executes(const CorpusRecord& record, std::uint64_t seed);

}  // namespace schemashift
