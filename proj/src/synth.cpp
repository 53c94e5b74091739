#include "schemashift/synth.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <sstream>

#include "prompts.hpp"
#include "schemashift/ddl.hpp"
#include "schemashift/errors.hpp"
#include "schemashift/ident.hpp"
#include "schemashift/random.hpp"

namespace schemashift {

std::string_view to_string(SynthKind kind) {
    switch (kind) {
        case SynthKind::NewColumns: return "new_columns";
        case SynthKind::NewTableName: return "new_table_name";
        case SynthKind::ColumnRename: return "column_rename";
        case SynthKind::TableRename: return "table_rename";
        case SynthKind::SplitPlan: return "split_plan";
        case SynthKind::MergePlan: return "merge_plan";
    }
    return "new_columns";
}

void SynthRequest::normalize() {
    std::set<std::string, ILess> seen;
    std::vector<std::string> out;
    for (auto& f : forbidden)
        if (!f.empty() && seen.insert(f).second) out.push_back(std::move(f));
    std::sort(out.begin(), out.end(), ILess{});
    forbidden = std::move(out);
}

// ---------------------------------------------------------------- parsing

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

class Cursor {
public:
    Cursor(std::string_view text, const std::string& raw) : s_(text), raw_(raw) {}

    void skip_space() {
        while (!s_.empty() && std::isspace(static_cast<unsigned char>(s_.front()))) s_.remove_prefix(1);
    }
    bool done() {
        skip_space();
        return s_.empty();
    }
    bool accept(std::string_view token) {
        skip_space();
        if (s_.substr(0, token.size()) != token) return false;
        s_.remove_prefix(token.size());
        return true;
    }
    void expect(std::string_view token) {
        if (!accept(token)) fail("expected '" + std::string(token) + "'");
    }
    std::string ident() {
        skip_space();
        std::string out;
        if (!s_.empty() && s_.front() == '"') {
            s_.remove_prefix(1);
            while (true) {
                if (s_.empty()) fail("unterminated quoted identifier");
                const char c = s_.front();
                s_.remove_prefix(1);
                if (c == '"') {
                    if (!s_.empty() && s_.front() == '"') {
                        out += '"';
                        s_.remove_prefix(1);
                        continue;
                    }
                    break;
                }
                out += c;
            }
        } else {
            while (!s_.empty()) {
                const char c = s_.front();
                if (std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == '.' || c == '=' ||
                    c == '(' || c == ')' || s_.substr(0, 2) == "->")
                    break;
                out += c;
                s_.remove_prefix(1);
            }
        }
        if (out.empty()) fail("expected an identifier");
        return out;
    }
    std::pair<std::string, std::string> qualified() {
        std::string t = ident();
        expect(".");
        return {t, ident()};
    }
    std::string rest() {
        std::string out(trim(s_));
        s_ = {};
        return out;
    }
    [[noreturn]] void fail(const std::string& why) const {
        throw MalformedProposal(why + " near '" + std::string(s_.substr(0, 30)) + "'", raw_);
    }

private:
    std::string_view s_;
    const std::string& raw_;
};

// Body of the first ```proposal fence.
std::string_view proposal_block(const std::string& raw) {
    const std::string open = "```proposal";
    const auto start = raw.find(open);
    if (start == std::string::npos) throw MalformedProposal("no proposal block in the answer", raw);
    auto body = raw.find('\n', start);
    if (body == std::string::npos) throw MalformedProposal("unterminated proposal block", raw);
    ++body;
    const auto end = raw.find("```", body);
    if (end == std::string::npos) throw MalformedProposal("unterminated proposal block", raw);
    return std::string_view(raw).substr(body, end - body);
}

bool allowed(SynthKind kind, std::string_view key) {
    switch (kind) {
        case SynthKind::NewColumns: return key == "column";
        case SynthKind::NewTableName:
        case SynthKind::ColumnRename:
        case SynthKind::TableRename: return key == "name";
        case SynthKind::SplitPlan: return key == "source" || key == "part";
        case SynthKind::MergePlan:
            return key == "tables" || key == "merged_name" || key == "kept_pk" || key == "link" || key == "rename";
    }
    return false;
}

}  // namespace

SynthResponse parse_proposal(SynthKind kind, const std::string& raw) {
    SynthResponse out;
    out.raw = raw;
    SplitPlan split;
    MergePlan merge;

    std::istringstream lines{std::string(proposal_block(raw))};
    std::string line;
    while (std::getline(lines, line)) {
        const std::string_view l = trim(line);
        if (l.empty()) continue;
        const auto colon = l.find(':');
        if (colon == std::string_view::npos) throw MalformedProposal("line without a key: " + std::string(l), raw);
        const std::string key = lower(trim(l.substr(0, colon)));
        if (!allowed(kind, key))
            throw MalformedProposal("key '" + key + "' does not belong in a " + std::string(to_string(kind)) +
                                        " proposal",
                                    raw);
        Cursor c(l.substr(colon + 1), raw);

        if (key == "column") {
            Column col;
            col.name = c.ident();
            col.data_type = c.rest();
            if (col.data_type.empty()) c.fail("column " + col.name + " has no type");
            out.columns.push_back(std::move(col));
            continue;
        }
        if (key == "name") {
            out.names.push_back(c.ident());
        } else if (key == "source") {
            split.source_table = c.ident();
        } else if (key == "part") {
            SplitPart part;
            part.name = c.ident();
            c.expect("=");
            do part.columns.push_back(c.ident());
            while (c.accept(","));
            split.parts.push_back(std::move(part));
        } else if (key == "tables") {
            do merge.source_tables.push_back(c.ident());
            while (c.accept(","));
        } else if (key == "merged_name") {
            merge.merged_name = c.ident();
        } else if (key == "kept_pk") {
            merge.kept_pk_table = c.ident();
        } else if (key == "link") {
            auto [ct, cc] = c.qualified();
            c.expect("->");
            auto [pt, pc] = c.qualified();
            merge.join_links.push_back({ct, cc, pt, pc});
        } else if (key == "rename") {
            auto src = c.qualified();
            c.expect("->");
            merge.column_renames.push_back({src, c.ident()});
        }
        if (!c.done()) c.fail("trailing text");
    }

    switch (kind) {
        case SynthKind::NewColumns:
            if (out.columns.empty()) throw MalformedProposal("no columns proposed", raw);
            break;
        case SynthKind::NewTableName:
        case SynthKind::ColumnRename:
        case SynthKind::TableRename:
            if (out.names.empty()) throw MalformedProposal("no name proposed", raw);
            break;
        case SynthKind::SplitPlan:
            if (split.source_table.empty()) throw MalformedProposal("split proposal without a source", raw);
            if (split.parts.empty()) throw MalformedProposal("split proposal without parts", raw);
            out.split_plan = std::move(split);
            break;
        case SynthKind::MergePlan:
            if (merge.source_tables.size() < 2) throw MalformedProposal("merge proposal needs two tables", raw);
            if (merge.merged_name.empty()) throw MalformedProposal("merge proposal without a merged name", raw);
            out.merge_plan = std::move(merge);
            break;
    }
    return out;
}

// ---------------------------------------------------------------- prompts

std::string render_prompt(const SynthRequest& request) {
    std::string text(detail::prompt_template(to_string(request.kind)));
    std::string forbidden;
    for (const auto& f : request.forbidden) forbidden += (forbidden.empty() ? "" : ", ") + f;
    if (forbidden.empty()) forbidden = "(none)";
    std::string target;
    if (request.kind == SynthKind::ColumnRename && request.targets.size() == 2)
        target = request.targets[0] + "." + request.targets[1];
    else
        for (const auto& t : request.targets) target += (target.empty() ? "" : " and ") + t;
    const std::string feedback =
        request.feedback.empty() ? "" : "\nYour previous answer was rejected: " + request.feedback + "\n";

    const std::pair<std::string_view, std::string> vars[] = {
        {"{{context}}", request.context},       {"{{forbidden}}", forbidden},
        {"{{count}}", std::to_string(request.count)}, {"{{target}}", target},
        {"{{feedback}}", feedback},
    };
    for (const auto& [key, value] : vars) {
        std::size_t at = 0;
        while ((at = text.find(key, at)) != std::string::npos) {
            text.replace(at, key.size(), value);
            at += value.size();
        }
    }
    return text;
}

// ---------------------------------------------------------------- mock

namespace {

struct Synonyms {
    const char* word;
    std::array<const char*, 2> alts;
};

constexpr Synonyms kLexicon[] = {
    {"patient", {"person", "client"}},      {"person", {"individual", "people"}},
    {"customer", {"client", "buyer"}},      {"client", {"customer", "account"}},
    {"employee", {"staff", "worker"}},      {"student", {"pupil", "learner"}},
    {"teacher", {"instructor", "tutor"}},   {"author", {"writer", "creator"}},
    {"user", {"member", "account"}},        {"member", {"participant", "user"}},
    {"name", {"title", "label"}},           {"title", {"heading", "caption"}},
    {"city", {"town", "municipality"}},     {"country", {"nation", "state"}},
    {"region", {"area", "zone"}},           {"address", {"location", "residence"}},
    {"amount", {"total", "sum"}},           {"price", {"cost", "charge"}},
    {"cost", {"price", "expense"}},         {"code", {"identifier", "tag"}},
    {"severity", {"seriousness", "gravity"}}, {"description", {"details", "summary"}},
    {"type", {"kind", "category"}},         {"category", {"class", "group"}},
    {"status", {"state", "condition"}},     {"score", {"rating", "points"}},
    {"rating", {"score", "grade"}},         {"salary", {"pay", "wage"}},
    {"order", {"purchase", "request"}},     {"product", {"item", "good"}},
    {"item", {"article", "entry"}},         {"movie", {"film", "picture"}},
    {"film", {"movie", "picture"}},         {"team", {"squad", "club"}},
    {"player", {"athlete", "competitor"}},  {"game", {"match", "fixture"}},
    {"match", {"game", "contest"}},         {"school", {"institution", "academy"}},
    {"department", {"division", "unit"}},   {"company", {"firm", "business"}},
    {"book", {"volume", "publication"}},    {"diagnosis", {"finding", "assessment"}},
    {"billing", {"invoice", "charge"}},     {"bill", {"invoice", "charge"}},
    {"birth", {"born", "birthday"}},        {"date", {"day", "time"}},
    {"phone", {"telephone", "contact"}},    {"email", {"mail", "contact"}},
    {"driver", {"pilot", "racer"}},         {"car", {"vehicle", "auto"}},
    {"race", {"contest", "event"}},         {"year", {"yr", "season"}},
    {"number", {"num", "count"}},           {"count", {"total", "tally"}},
    {"quantity", {"qty", "volume"}},        {"total", {"sum", "overall"}},
    {"start", {"begin", "opening"}},        {"end", {"finish", "closing"}},
    {"event", {"occasion", "happening"}},   {"account", {"profile", "ledger"}},
    {"district", {"borough", "county"}},
    {"league", {"competition", "division"}}, {"loan", {"credit", "advance"}},
    {"card", {"pass", "ticket"}},           {"transaction", {"transfer", "payment"}},
};

struct ThemedColumn {
    const char* name;
    const char* type;
};

constexpr std::array<std::array<ThemedColumn, 12>, 6> kThemes = {{
    {{{"nickname", "TEXT"}, {"phone_number", "TEXT"}, {"email", "TEXT"}, {"gender", "TEXT"},
      {"nationality", "TEXT"}, {"occupation", "TEXT"}, {"height", "REAL"}, {"weight", "REAL"},
      {"marital_status", "TEXT"}, {"emergency_contact", "TEXT"}, {"preferred_language", "TEXT"},
      {"loyalty_points", "INTEGER"}}},
    {{{"discount_rate", "REAL"}, {"currency", "TEXT"}, {"tax_amount", "REAL"}, {"payment_method", "TEXT"},
      {"invoice_number", "TEXT"}, {"shipping_fee", "REAL"}, {"order_status", "TEXT"},
      {"quantity_in_stock", "INTEGER"}, {"supplier_code", "TEXT"}, {"warranty_months", "INTEGER"},
      {"return_policy", "TEXT"}, {"unit_weight", "REAL"}}},
    {{{"start_time", "DATETIME"}, {"end_time", "DATETIME"}, {"venue", "TEXT"}, {"attendance", "INTEGER"},
      {"organizer", "TEXT"}, {"ticket_price", "REAL"}, {"duration_minutes", "INTEGER"},
      {"is_cancelled", "INTEGER"}, {"weather_condition", "TEXT"}, {"broadcast_channel", "TEXT"},
      {"season", "TEXT"}, {"round_number", "INTEGER"}}},
    {{{"latitude", "REAL"}, {"longitude", "REAL"}, {"postal_code", "TEXT"}, {"region", "TEXT"},
      {"country_code", "TEXT"}, {"population", "INTEGER"}, {"area_sq_km", "REAL"}, {"time_zone", "TEXT"},
      {"elevation", "REAL"}, {"district", "TEXT"}, {"climate_zone", "TEXT"}, {"founded_year", "INTEGER"}}},
    {{{"created_at", "DATETIME"}, {"updated_at", "DATETIME"}, {"status_note", "TEXT"},
      {"version_number", "INTEGER"}, {"source_system", "TEXT"}, {"review_score", "REAL"},
      {"is_active", "INTEGER"}, {"priority_level", "INTEGER"}, {"remarks", "TEXT"}, {"approved_by", "TEXT"},
      {"category_code", "TEXT"}, {"reference_code", "TEXT"}}},
    {{{"blood_type", "TEXT"}, {"allergy_notes", "TEXT"}, {"insurance_provider", "TEXT"},
      {"attending_physician", "TEXT"}, {"ward_number", "INTEGER"}, {"admission_date", "DATE"},
      {"discharge_date", "DATE"}, {"dosage_mg", "REAL"}, {"treatment_plan", "TEXT"},
      {"follow_up_date", "DATE"}, {"risk_score", "REAL"}, {"visit_count", "INTEGER"}}},
}};

using NameSet = std::set<std::string, ILess>;

NameSet forbidden_set(const SynthRequest& r) { return NameSet(r.forbidden.begin(), r.forbidden.end()); }

std::string first_free(const std::string& base, const NameSet& taken) {
    if (!taken.count(base)) return base;
    for (int i = 2;; ++i) {
        std::string c = base + std::to_string(i);
        if (!taken.count(c)) return c;
    }
}

std::string match_case(std::string_view original, std::string word) {
    if (!original.empty() && std::isupper(static_cast<unsigned char>(original.front()))) {
        const bool all_upper = std::none_of(original.begin(), original.end(),
                                            [](char c) { return std::islower(static_cast<unsigned char>(c)); });
        if (all_upper) return upper(word);
        word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
    }
    return word;
}

// Lexicon substitutions of one word at a time, then "_alt" fallbacks.
std::vector<std::string> rename_candidates(const std::string& name, std::size_t fallbacks) {
    std::vector<std::pair<std::size_t, std::size_t>> words;  // (start, length)
    for (std::size_t i = 0; i < name.size();) {
        if (name[i] == '_' || name[i] == ' ') {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < name.size() && name[j] != '_' && name[j] != ' ') ++j;
        words.push_back({i, j - i});
        i = j;
    }
    std::vector<std::string> out;
    for (const auto& [start, len] : words) {
        const std::string_view w = std::string_view(name).substr(start, len);
        for (const auto& entry : kLexicon) {
            if (!iequals(entry.word, w)) continue;
            for (const char* alt : entry.alts)
                out.push_back(name.substr(0, start) + match_case(w, alt) + name.substr(start + len));
        }
    }
    const std::string sep = name.find(' ') != std::string::npos ? " " : "_";
    out.push_back(name + sep + "alt");
    for (std::size_t i = 2; i < fallbacks + 2; ++i) out.push_back(name + sep + "alt" + std::to_string(i));
    return out;
}

std::string q(std::string_view name) { return quote_ident(name); }

std::string fenced(const std::string& body) { return "```proposal\n" + body + "```\n"; }

}  // namespace

std::string MockSynthesizer::answer(const SynthRequest& request) const {
    Schema ctx;
    try {
        ctx = parse_ddl(request.context);
    } catch (const Error& e) {
        throw InvalidArgument(std::string("synthesis context is not valid DDL: ") + e.what());
    }
    NameSet taken = forbidden_set(request);
    const std::string target = request.targets.empty() ? "" : request.targets[0];
    auto target_table = [&]() -> const Table& {
        if (const Table* t = ctx.find_table(target)) return *t;
        if (ctx.tables.empty()) throw InvalidArgument("synthesis context has no tables");
        return ctx.tables.front();
    };
    std::ostringstream body;

    switch (request.kind) {
        case SynthKind::NewColumns: {
            const Table& t = target_table();
            for (const auto& c : t.columns) taken.insert(c.name);
            auto rng = make_stream(seed_, "new_columns", t.name);
            const std::size_t theme = stable_hash(t.name) % kThemes.size();
            std::vector<ThemedColumn> pool;
            for (std::size_t k = 0; k < kThemes.size(); ++k) {
                auto block = std::vector<ThemedColumn>(kThemes[(theme + k) % kThemes.size()].begin(),
                                                       kThemes[(theme + k) % kThemes.size()].end());
                const auto offset = static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(block.size()) - 1));
                std::rotate(block.begin(), block.begin() + static_cast<std::ptrdiff_t>(offset), block.end());
                pool.insert(pool.end(), block.begin(), block.end());
            }
            std::size_t produced = 0;
            for (const auto& c : pool) {
                if (produced == request.count) break;
                if (!taken.insert(c.name).second) continue;
                body << "column: " << q(c.name) << ' ' << c.type << '\n';
                ++produced;
            }
            for (int i = 1; produced < request.count; ++i) {
                const std::string name = first_free(lower(t.name) + "_attr" + std::to_string(i), taken);
                taken.insert(name);
                body << "column: " << q(name) << " TEXT\n";
                ++produced;
            }
            break;
        }
        case SynthKind::ColumnRename:
        case SynthKind::TableRename: {
            std::string name;
            if (request.kind == SynthKind::ColumnRename) {
                const Table& t = target_table();
                name = request.targets.size() > 1 ? request.targets[1] : t.columns.front().name;
                for (const auto& c : t.columns) taken.insert(c.name);
            } else {
                name = target_table().name;
                for (const auto& t : ctx.tables) taken.insert(t.name);
            }
            std::size_t produced = 0;
            for (const auto& c : rename_candidates(name, request.count + taken.size())) {
                if (produced == request.count) break;
                if (!taken.insert(c).second) continue;
                body << "name: " << q(c) << '\n';
                ++produced;
            }
            break;
        }
        case SynthKind::NewTableName: {
            for (const auto& t : ctx.tables) taken.insert(t.name);
            const std::string base = target.empty() ? "entity" : target;
            std::size_t produced = 0;
            for (const char* suffix : {"_info", "_details", "_extra", "_archive", "_log"}) {
                if (produced == request.count) break;
                if (!taken.insert(base + suffix).second) continue;
                body << "name: " << q(base + suffix) << '\n';
                ++produced;
            }
            while (produced < request.count) {
                const std::string name = first_free(base + "_alt", taken);
                taken.insert(name);
                body << "name: " << q(name) << '\n';
                ++produced;
            }
            break;
        }
        case SynthKind::SplitPlan: {
            const Table* t = ctx.find_table(target);
            if (!t)
                for (const auto& cand : ctx.tables)
                    if (!cand.primary_key.empty() && cand.non_pk_columns().size() >= 2) {
                        t = &cand;
                        break;
                    }
            if (!t) throw InvalidArgument("no splittable table in the synthesis context");
            for (const auto& other : ctx.tables) taken.insert(other.name);
            const auto cols = t->non_pk_columns();
            const std::size_t half = (cols.size() + 1) / 2;
            body << "source: " << q(t->name) << '\n';
            const std::string first = first_free(t->name + "_info", taken);
            taken.insert(first);
            const std::string second = first_free(t->name + "_details", taken);
            auto emit = [&](const std::string& name, std::size_t from, std::size_t to) {
                body << "part: " << q(name) << " =";
                for (std::size_t i = from; i < to; ++i) body << (i == from ? " " : ", ") << q(cols[i]);
                body << '\n';
            };
            emit(first, 0, half);
            if (half < cols.size()) emit(second, half, cols.size());
            break;
        }
        case SynthKind::MergePlan: {
            std::optional<ForeignKey> link;
            auto connects = [&](const ForeignKey& fk) {
                if (iequals(fk.child_table, fk.parent_table)) return false;
                if (request.targets.size() < 2) return true;
                return (iequals(fk.child_table, request.targets[0]) && iequals(fk.parent_table, request.targets[1])) ||
                       (iequals(fk.child_table, request.targets[1]) && iequals(fk.parent_table, request.targets[0]));
            };
            for (const auto& fk : ctx.foreign_keys)
                if (connects(fk)) {
                    link = fk;
                    break;
                }
            if (!link && request.targets.size() >= 2) {
                const Table* a = ctx.find_table(request.targets[0]);
                const Table* b = ctx.find_table(request.targets[1]);
                if (a && b && a->primary_key.size() == 1 && b->primary_key.size() == 1 &&
                    iequals(a->primary_key[0], b->primary_key[0]))
                    link = ForeignKey{b->name, b->primary_key[0], a->name, a->primary_key[0]};
            }
            if (!link) throw MalformedProposal("no linked pair of tables to merge", "");
            const Table* parent = ctx.find_table(link->parent_table);
            const Table* child = ctx.find_table(link->child_table);
            for (const auto& other : ctx.tables) taken.insert(other.name);
            body << "tables: " << q(parent->name) << ", " << q(child->name) << '\n';
            body << "merged_name: " << q(first_free(parent->name + "_record", taken)) << '\n';
            body << "kept_pk: " << q(child->name) << '\n';
            body << "link: " << q(child->name) << '.' << q(link->child_column) << " -> " << q(parent->name) << '.'
                 << q(link->parent_column) << '\n';
            NameSet used;
            for (const auto& c : parent->columns) used.insert(c.name);
            const bool collapses = iequals(link->child_column, link->parent_column);
            for (const auto& c : child->columns) {
                if (collapses && iequals(c.name, link->child_column)) continue;
                if (!used.count(c.name)) {
                    used.insert(c.name);
                    continue;
                }
                const std::string renamed = first_free(child->name + "_" + c.name, used);
                used.insert(renamed);
                body << "rename: " << q(child->name) << '.' << q(c.name) << " -> " << q(renamed) << '\n';
            }
            break;
        }
    }
    return fenced(body.str());
}

SynthResponse MockSynthesizer::propose(const SynthRequest& request) {
    return parse_proposal(request.kind, answer(request));
}

}  // namespace schemashift
