#include "schemashift/patterns.hpp"

#include <array>

#include "schemashift/ident.hpp"
#include "schemashift/value.hpp"

namespace schemashift {

namespace {

constexpr std::array kPersonWords = {
    "customer", "patient", "employee", "person",  "author", "user",   "student", "player",
    "driver",   "member",  "client",   "owner",   "manager", "contact", "teacher", "doctor",
    "physician", "nurse",  "artist",   "director", "actor",  "coach",  "writer",  "buyer",
    "seller",   "guest",   "applicant", "candidate", "staff", "worker", "agent",   "holder",
};

bool texty(const Column& c) {
    const Affinity a = affinity_of(c.data_type);
    return a == Affinity::Text || a == Affinity::None;
}

bool ends_with(std::string_view s, std::string_view suffix) { return ends_with_ci(s, suffix); }

// Prefix before `suffix`, when the name is exactly `suffix` or ends with "_" + suffix.
std::optional<std::string> prefix_of(std::string_view name, std::string_view suffix) {
    if (iequals(name, suffix)) return std::string();
    if (name.size() > suffix.size() + 1 && ends_with(name, suffix) &&
        name[name.size() - suffix.size() - 1] == '_')
        return std::string(name.substr(0, name.size() - suffix.size()));
    return std::nullopt;
}

bool person_name(std::string_view n) {
    const std::string l = lower(n);
    if (l == "name" || l == "full_name" || l == "fullname") return true;
    if (ends_with(l, "_full_name") || ends_with(l, "_fullname")) return true;
    if (!ends_with(l, "_name")) return false;
    const std::string stem = l.substr(0, l.size() - 5);
    for (const char* w : kPersonWords)
        if (stem == w || ends_with(stem, std::string("_") + w)) return true;
    return false;
}

}  // namespace

ValueShape value_shape(const Column& c) {
    const std::string n = lower(c.name);
    const std::string type = upper(c.data_type);
    if (type.find("DATE") != std::string::npos || type.find("TIME") != std::string::npos) return ValueShape::Date;
    if (!texty(c)) return ValueShape::Plain;
    if (prefix_of(n, "date")) return ValueShape::Date;
    if (ends_with(n, "first_name") || ends_with(n, "firstname") || ends_with(n, "given_name"))
        return ValueShape::GivenName;
    if (ends_with(n, "last_name") || ends_with(n, "lastname") || ends_with(n, "surname") ||
        ends_with(n, "family_name"))
        return ValueShape::FamilyName;
    if (person_name(n)) return ValueShape::FullName;
    if (n.find("address") != std::string::npos && n.find("email") == std::string::npos &&
        n.find("ip") == std::string::npos && n.find("web") == std::string::npos)
        return ValueShape::Address;
    if (prefix_of(n, "street")) return ValueShape::Street;
    if (prefix_of(n, "city")) return ValueShape::City;
    if (prefix_of(n, "state")) return ValueShape::State;
    if (prefix_of(n, "year")) return ValueShape::Year;
    if (prefix_of(n, "month")) return ValueShape::Month;
    if (prefix_of(n, "day")) return ValueShape::Day;
    return ValueShape::Plain;
}

std::string_view delimiter_for(CompositeKind kind) {
    switch (kind) {
        case CompositeKind::Name: return " ";
        case CompositeKind::Date: return "-";
        case CompositeKind::Address: return ", ";
    }
    return " ";
}

std::optional<SplitCandidate> split_candidate(const Column& c) {
    const std::string n = c.name;
    switch (value_shape(c)) {
        case ValueShape::FullName: {
            std::string stem;
            if (auto p = prefix_of(n, "full_name")) stem = *p;
            else if (auto q = prefix_of(n, "fullname")) stem = *q;
            else if (auto r = prefix_of(n, "name")) stem = *r;
            return SplitCandidate{CompositeKind::Name, {stem + "first_name", stem + "last_name"}};
        }
        case ValueShape::Date: {
            std::string stem;
            if (auto p = prefix_of(n, "date")) stem = *p;
            else stem = n + "_";
            return SplitCandidate{CompositeKind::Date, {stem + "year", stem + "month", stem + "day"}};
        }
        case ValueShape::Address: {
            std::string stem;
            if (auto p = prefix_of(n, "address")) stem = *p;
            else stem = n + "_";
            return SplitCandidate{CompositeKind::Address, {stem + "street", stem + "city", stem + "state"}};
        }
        default: return std::nullopt;
    }
}

std::vector<MergeCandidate> merge_candidates(const Table& t) {
    std::vector<MergeCandidate> out;
    auto find = [&](const std::string& name, ValueShape shape) -> const Column* {
        const Column* c = t.find_column(name);
        if (!c || t.is_pk_member(c->name) || value_shape(*c) != shape) return nullptr;
        return c;
    };
    for (const auto& c : t.columns) {
        const ValueShape shape = value_shape(c);
        if (shape == ValueShape::GivenName) {
            const std::string& n = c.name;
            for (auto [given, family] : {std::pair{"first_name", "last_name"}, std::pair{"firstname", "lastname"}}) {
                if (!ends_with(n, given)) continue;
                const std::string stem = n.substr(0, n.size() - std::string_view(given).size());
                const Column* f = find(stem + family, ValueShape::FamilyName);
                if (f && !t.is_pk_member(c.name))
                    out.push_back({CompositeKind::Name, {c.name, f->name}, stem + "full_name"});
            }
        } else if (shape == ValueShape::Year) {
            const std::string stem = *prefix_of(c.name, "year");
            const Column* m = find(stem + "month", ValueShape::Month);
            const Column* d = find(stem + "day", ValueShape::Day);
            if (m && d && !t.is_pk_member(c.name))
                out.push_back({CompositeKind::Date, {c.name, m->name, d->name}, stem + "date"});
        } else if (shape == ValueShape::Street) {
            const std::string stem = *prefix_of(c.name, "street");
            const Column* ci = find(stem + "city", ValueShape::City);
            const Column* st = find(stem + "state", ValueShape::State);
            if (ci && st && !t.is_pk_member(c.name))
                out.push_back({CompositeKind::Address, {c.name, ci->name, st->name}, stem + "address"});
        }
    }
    return out;
}

}  // namespace schemashift
