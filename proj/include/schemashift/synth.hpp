#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "schemashift/evolution.hpp"
#include "schemashift/schema.hpp"

namespace schemashift {

enum class SynthKind { NewColumns, NewTableName, ColumnRename, TableRename, SplitPlan, MergePlan };

std::string_view to_string(SynthKind kind);

struct SynthRequest {
    SynthKind kind = SynthKind::NewColumns;
    std::string context;                 // DDL of the tables in scope
    std::vector<std::string> forbidden;  // names the answer must avoid
    std::size_t count = 1;
    // What to act on: [table] for new columns, table renames and splits,
    // [table, column] for column renames, [table, table] for merges.
    std::vector<std::string> targets;
    std::string feedback;  // why the previous answer was rejected

    // Sorted, case-insensitively deduplicated forbidden list.
    void normalize();
};

struct SynthResponse {
    std::vector<Column> columns;     // NewColumns
    std::vector<std::string> names;  // NewTableName, ColumnRename, TableRename
    std::optional<SplitPlan> split_plan;
    std::optional<MergePlan> merge_plan;
    std::string raw;
};

// Reads the fenced ```proposal block of `raw`. Throws MalformedProposal.
//
//   column: <name> <type>                 NewColumns, one per line
//   name: <name>                          NewTableName / renames
//   source: <table>                       SplitPlan
//   part: <name> = <col>, <col>           SplitPlan, anchor first
//   tables: <table>, <table>              MergePlan
//   merged_name: <name>
//   kept_pk: <table>                      whose primary key survives
//   link: <child>.<col> -> <parent>.<col>
//   rename: <table>.<col> -> <name>
//
// Identifiers may be double-quoted.
SynthResponse parse_proposal(SynthKind kind, const std::string& raw);

// Prompt text for `request`, from the embedded templates.
std::string render_prompt(const SynthRequest& request);

class Synthesizer {
public:
    virtual ~Synthesizer() = default;
    // Throws BackendUnavailable, MalformedProposal or Timeout.
    virtual SynthResponse propose(const SynthRequest& request) = 0;
};

// Deterministic offline backend.
class MockSynthesizer : public Synthesizer {
public:
    explicit MockSynthesizer(std::uint64_t seed) : seed_(seed) {}
    SynthResponse propose(const SynthRequest& request) override;
    // The proposal text propose() parses.
    std::string answer(const SynthRequest& request) const;

private:
    std::uint64_t seed_;
};

struct RemoteConfig {
    std::string base_url = "https://api.openai.com";
    std::string path = "/v1/chat/completions";
    std::string model = "gpt-4";
    std::string api_key_env = "SCHEMASHIFT_API_KEY";
    int max_in_flight = 4;
    int max_attempts = 5;  // on 429 / 5xx
    std::chrono::milliseconds initial_backoff{500};
    std::chrono::seconds timeout{60};
};

// Chat-completion client. The API key is read from the environment.
class RemoteSynthesizer : public Synthesizer {
public:
    explicit RemoteSynthesizer(RemoteConfig cfg);
    SynthResponse propose(const SynthRequest& request) override;

private:
    std::string complete(const std::string& prompt);

    RemoteConfig cfg_;
    std::string api_key_;
    std::mutex mu_;
    std::condition_variable slot_free_;
    int in_flight_ = 0;
};

}  // namespace schemashift
