#include "schemashift/value.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "schemashift/ident.hpp"

namespace schemashift {

Affinity affinity_of(std::string_view declared_type) {
    const std::string t = upper(declared_type);
    if (t.find("INT") != std::string::npos) return Affinity::Integer;
    if (t.find("CHAR") != std::string::npos || t.find("CLOB") != std::string::npos ||
        t.find("TEXT") != std::string::npos)
        return Affinity::Text;
    if (t.empty() || t.find("BLOB") != std::string::npos) return Affinity::None;
    if (t.find("REAL") != std::string::npos || t.find("FLOA") != std::string::npos ||
        t.find("DOUB") != std::string::npos)
        return Affinity::Real;
    return Affinity::Numeric;
}

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Length of the numeric literal starting at `s[0]`, and whether it is real.
std::size_t scan_number(std::string_view s, bool& real) {
    std::size_t i = 0;
    real = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    const std::size_t digits_start = i;
    while (i < s.size() && is_digit(s[i])) ++i;
    std::size_t mantissa_digits = i - digits_start;
    if (i < s.size() && s[i] == '.') {
        std::size_t j = i + 1;
        while (j < s.size() && is_digit(s[j])) ++j;
        mantissa_digits += j - i - 1;
        if (mantissa_digits == 0) return 0;
        real = true;
        i = j;
    }
    if (mantissa_digits == 0) return 0;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
        const std::size_t exp_start = j;
        while (j < s.size() && is_digit(s[j])) ++j;
        if (j > exp_start) {
            real = true;
            i = j;
        }
    }
    return i;
}

Value make_number(std::string_view literal, bool real) {
    const std::string s(literal);
    if (!real) {
        errno = 0;
        char* end = nullptr;
        const long long v = std::strtoll(s.c_str(), &end, 10);
        if (errno != ERANGE) return Value(static_cast<std::int64_t>(v));
    }
    return Value(std::strtod(s.c_str(), nullptr));
}

std::optional<std::int64_t> exact_integer(double d) {
    if (!std::isfinite(d)) return std::nullopt;
    if (d < -9223372036854775808.0 || d >= 9223372036854775808.0) return std::nullopt;
    const auto i = static_cast<std::int64_t>(d);
    if (static_cast<double>(i) != d) return std::nullopt;
    return i;
}

std::string format_real(double d) {
    if (std::isnan(d)) return "";
    if (std::isinf(d)) return d > 0 ? "Inf" : "-Inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", d);
    std::string s = buf;
    const auto e = s.find('e');
    if (e != std::string::npos) {
        if (s.find('.') == std::string::npos) s.insert(e, ".0");
    } else if (s.find('.') == std::string::npos) {
        s += ".0";
    }
    return s;
}

}  // namespace

std::optional<Value> parse_number(std::string_view text) {
    std::size_t b = 0, e = text.size();
    while (b < e && is_space(text[b])) ++b;
    while (e > b && is_space(text[e - 1])) --e;
    const std::string_view s = text.substr(b, e - b);
    if (s.empty()) return std::nullopt;
    bool real = false;
    const std::size_t n = scan_number(s, real);
    if (n == 0 || n != s.size()) return std::nullopt;
    return make_number(s, real);
}

Value numeric_prefix(std::string_view text, bool want_integer) {
    std::size_t b = 0;
    while (b < text.size() && is_space(text[b])) ++b;
    const std::string_view s = text.substr(b);
    bool real = false;
    const std::size_t n = scan_number(s, real);
    if (n == 0) return want_integer ? Value(std::int64_t{0}) : Value(std::int64_t{0});
    Value v = make_number(s.substr(0, n), real);
    if (want_integer && v.is_real()) {
        const double d = v.as_real();
        if (d >= 9223372036854775807.0) return Value(std::int64_t{INT64_MAX});
        if (d <= -9223372036854775808.0) return Value(std::int64_t{INT64_MIN});
        return Value(static_cast<std::int64_t>(d));
    }
    return v;
}

Value apply_affinity(const Value& v, Affinity affinity) {
    if (v.is_null()) return v;
    switch (affinity) {
        case Affinity::None: return v;
        case Affinity::Text: return v.is_text() ? v : Value(to_text(v));
        case Affinity::Real:
            if (v.is_integer()) return Value(static_cast<double>(v.as_integer()));
            if (v.is_text())
                if (auto n = parse_number(v.as_text())) return n->is_integer() ? Value(n->numeric()) : *n;
            return v;
        case Affinity::Integer:
        case Affinity::Numeric: {
            Value n = v;
            if (v.is_text()) {
                auto parsed = parse_number(v.as_text());
                if (!parsed) return v;
                n = *parsed;
            }
            if (n.is_real())
                if (auto i = exact_integer(n.as_real())) return Value(*i);
            return n;
        }
    }
    return v;
}

std::string to_text(const Value& v) {
    switch (v.type()) {
        case Value::Type::Null: return "";
        case Value::Type::Integer: return std::to_string(v.as_integer());
        case Value::Type::Real: return format_real(v.as_real());
        case Value::Type::Text: return v.as_text();
    }
    return "";
}

std::string real_literal(double d) {
    if (std::isnan(d)) return "NULL";
    if (std::isinf(d)) return d > 0 ? "1e999" : "-1e999";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    std::string s = buf;
    if (s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
}

std::string sql_literal(const Value& v) {
    switch (v.type()) {
        case Value::Type::Null: return "NULL";
        case Value::Type::Integer: return std::to_string(v.as_integer());
        case Value::Type::Real: return real_literal(v.as_real());
        case Value::Type::Text: {
            std::string out = "'";
            for (char c : v.as_text()) {
                if (c == '\'') out += '\'';
                out += c;
            }
            return out + "'";
        }
    }
    return "NULL";
}

int compare_values(const Value& a, const Value& b, bool nocase) {
    auto rank = [](const Value& v) { return v.is_null() ? 0 : v.is_text() ? 2 : 1; };
    const int ra = rank(a), rb = rank(b);
    if (ra != rb) return ra < rb ? -1 : 1;
    if (ra == 0) return 0;
    if (ra == 1) {
        if (a.is_integer() && b.is_integer()) {
            const auto x = a.as_integer(), y = b.as_integer();
            return x < y ? -1 : x > y ? 1 : 0;
        }
        const long double x = a.is_integer() ? static_cast<long double>(a.as_integer()) : a.as_real();
        const long double y = b.is_integer() ? static_cast<long double>(b.as_integer()) : b.as_real();
        return x < y ? -1 : x > y ? 1 : 0;
    }
    if (nocase) {
        const std::string x = lower(a.as_text()), y = lower(b.as_text());
        const int c = x.compare(y);
        return c < 0 ? -1 : c > 0 ? 1 : 0;
    }
    const int c = a.as_text().compare(b.as_text());
    return c < 0 ? -1 : c > 0 ? 1 : 0;
}

std::optional<int> compare_affinity(Value a, Affinity la, Value b, Affinity ra, bool nocase) {
    if (a.is_null() || b.is_null()) return std::nullopt;
    auto numeric = [](Affinity x) { return x == Affinity::Integer || x == Affinity::Real || x == Affinity::Numeric; };
    if (numeric(la) && (ra == Affinity::Text || ra == Affinity::None)) {
        b = apply_affinity(b, Affinity::Numeric);
    } else if (numeric(ra) && (la == Affinity::Text || la == Affinity::None)) {
        a = apply_affinity(a, Affinity::Numeric);
    } else if (la == Affinity::Text && ra == Affinity::None) {
        b = apply_affinity(b, Affinity::Text);
    } else if (ra == Affinity::Text && la == Affinity::None) {
        a = apply_affinity(a, Affinity::Text);
    }
    return compare_values(a, b, nocase);
}

bool same_value(const Value& a, const Value& b) { return compare_values(a, b) == 0; }

std::string display(const Value& v) { return v.is_null() ? "NULL" : to_text(v); }

}  // namespace schemashift
