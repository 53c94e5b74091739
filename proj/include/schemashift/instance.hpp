#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "schemashift/evolution.hpp"
#include "schemashift/schema.hpp"

namespace schemashift {

enum class RefusalKind { Column, Table };

struct RefusalSentinel {
    RefusalKind kind = RefusalKind::Column;
    std::string_view text() const;
    bool operator==(const RefusalSentinel&) const = default;
};

inline constexpr std::string_view kColumnRefusal =
    "The given column information is insufficient to generate an SQL query to answer the question";
inline constexpr std::string_view kTableRefusal =
    "The given table information is insufficient to generate an SQL query to answer the question";

// Exact match against either sentence.
std::optional<RefusalSentinel> parse_sentinel(std::string_view text);

// Gold is either SQL text or a refusal.
using Gold = std::variant<std::string, RefusalSentinel>;

std::string gold_text(const Gold& gold);
inline bool gold_is_sql(const Gold& gold) { return std::holds_alternative<std::string>(gold); }
// Refusal sentences decode to sentinels, anything else is SQL.
Gold gold_from_text(std::string text);

struct Instance {
    std::string instance_id;
    std::string db_id;
    std::string nlq;
    Schema schema;
    Gold gold;
    bool operator==(const Instance&) const = default;
};

struct PerturbedInstance {
    Instance base;
    Instance evolved;
    EvolutionRecord record;
    bool needs_review = false;
    bool operator==(const PerturbedInstance&) const = default;
};

}  // namespace schemashift
