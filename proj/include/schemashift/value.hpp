#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace schemashift {

// A dynamically typed SQL value with SQLite storage classes.
struct Value {
    enum class Type { Null, Integer, Real, Text };

    std::variant<std::monostate, std::int64_t, double, std::string> data;

    Value() = default;
    Value(std::int64_t v) : data(v) {}
    Value(int v) : data(static_cast<std::int64_t>(v)) {}
    Value(double v) : data(v) {}
    Value(std::string v) : data(std::move(v)) {}
    Value(const char* v) : data(std::string(v)) {}

    Type type() const { return static_cast<Type>(data.index()); }
    bool is_null() const { return data.index() == 0; }
    bool is_integer() const { return data.index() == 1; }
    bool is_real() const { return data.index() == 2; }
    bool is_text() const { return data.index() == 3; }
    bool is_numeric() const { return is_integer() || is_real(); }

    std::int64_t as_integer() const { return std::get<std::int64_t>(data); }
    double as_real() const { return std::get<double>(data); }
    const std::string& as_text() const { return std::get<std::string>(data); }

    // Numeric value as a double (integers widened).
    double numeric() const { return is_integer() ? static_cast<double>(as_integer()) : as_real(); }

    bool operator==(const Value&) const = default;
};

using Row = std::vector<Value>;

enum class Affinity { None, Integer, Text, Real, Numeric };

// Affinity of a declared column type.
Affinity affinity_of(std::string_view declared_type);

// Conversion applied when a value is stored in a column of `affinity`.
Value apply_affinity(const Value& v, Affinity affinity);

// Parses a complete numeric literal ("12", " -3.5e2 "); nullopt otherwise.
std::optional<Value> parse_number(std::string_view text);

// Longest numeric prefix, 0 when none (arithmetic and CAST semantics).
Value numeric_prefix(std::string_view text, bool want_integer);

// Text rendering used by CAST(... AS TEXT) and concatenation.
std::string to_text(const Value& v);

// Renders a real so it reads back bit-identical.
std::string real_literal(double d);

// SQL literal for a value (dump export).
std::string sql_literal(const Value& v);

// Total order NULL < numbers < text; numbers compared by value, text bytewise.
int compare_values(const Value& a, const Value& b, bool nocase = false);

// Comparison after the affinity conversions SQLite applies to the operands
// of a comparison; nullopt when either side is NULL.
std::optional<int> compare_affinity(Value a, Affinity la, Value b, Affinity ra, bool nocase = false);

// Equality for grouping and DISTINCT (NULLs equal, 1 == 1.0).
bool same_value(const Value& a, const Value& b);

// Display form for reports and debugging.
std::string display(const Value& v);

}  // namespace schemashift
