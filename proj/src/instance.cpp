#include "schemashift/instance.hpp"

namespace schemashift {

std::string_view RefusalSentinel::text() const {
    return kind == RefusalKind::Column ? kColumnRefusal : kTableRefusal;
}

std::optional<RefusalSentinel> parse_sentinel(std::string_view text) {
    if (text == kColumnRefusal) return RefusalSentinel{RefusalKind::Column};
    if (text == kTableRefusal) return RefusalSentinel{RefusalKind::Table};
    return std::nullopt;
}

std::string gold_text(const Gold& gold) {
    if (const auto* sql = std::get_if<std::string>(&gold)) return *sql;
    return std::string(std::get<RefusalSentinel>(gold).text());
}

Gold gold_from_text(std::string text) {
    if (auto s = parse_sentinel(text)) return *s;
    return text;
}

}  // namespace schemashift
