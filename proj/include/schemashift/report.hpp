#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "schemashift/corpus.hpp"
#include "schemashift/metrics.hpp"

namespace schemashift {

struct Summary {
    double min = 0;
    double mean = 0;
    double median = 0;
    double max = 0;
};

std::optional<Summary> summarize(std::vector<double> values);

struct StatsRow {
    std::string ptype;  // "original" or a perturbation type name
    std::size_t train_count = 0;
    std::size_t eval_count = 0;
    std::optional<std::size_t> eval_exec_count;  // absent for refusal types
    std::optional<Summary> per_table;            // column-level types only
    std::optional<Summary> per_query;            // perturbed types only
};

// One row per ptype present, in canonical order (original first). Eval*
// counts eval records whose gold executes on record_database(r, exec_seed).
std::vector<StatsRow> compute_stats(const std::vector<CorpusRecord>& train, const std::vector<CorpusRecord>& eval,
                                    std::uint64_t exec_seed);

// Plain-text table with the Train / Eval / Eval* and per-table / per-query
// min, mean, median, max columns, grouped into column and table sections.
std::string render_stats(const std::vector<StatsRow>& rows);
std::string stats_json(const std::vector<StatsRow>& rows);

std::string display_name(std::string_view ptype);

// Prediction per (instance_id, ptype); an empty ptype matches any record
// with that id. Accepts JSON Lines objects {"instance_id", "ptype"?,
// "prediction"} or a single JSON object mapping id to text.
using Predictions = std::map<std::pair<std::string, std::string>, std::string>;
Predictions read_predictions(const std::filesystem::path& path);

std::vector<InstanceScore> score_records(const std::vector<CorpusRecord>& corpus, const Predictions& predictions,
                                         std::uint64_t exec_seed);

}  // namespace schemashift
