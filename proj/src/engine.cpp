#include <algorithm>
#include <cctype>
#include <climits>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <cstdio>
#include <map>
#include <set>

#include "schemashift/binder.hpp"
#include "schemashift/database.hpp"
#include "schemashift/errors.hpp"
#include "schemashift/sql_ast.hpp"

namespace schemashift {

using namespace sql;

const std::vector<Row>& Database::table_rows(std::string_view table) const {
    auto it = rows.find(table);
    if (it == rows.end()) throw ExecError("no such table: " + std::string(table));
    return it->second;
}

namespace {

using State = std::vector<const Row*>;

struct Frame {
    const SelectCore* core = nullptr;
    const State* state = nullptr;
    const std::vector<const State*>* group = nullptr;
};

struct RowLess {
    bool operator()(const Row& a, const Row& b) const {
        for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
            const int c = compare_values(a[i], b[i]);
            if (c) return c < 0;
        }
        return a.size() < b.size();
    }
};

struct OutRow {
    Row values;
    Row keys;
};

std::optional<bool> truth(const Value& v) {
    if (v.is_null()) return std::nullopt;
    if (v.is_integer()) return v.as_integer() != 0;
    if (v.is_real()) return v.as_real() != 0.0;
    return numeric_prefix(v.as_text(), false).numeric() != 0.0;
}

Value from_truth(std::optional<bool> b) {
    if (!b) return Value();
    return Value(std::int64_t{*b ? 1 : 0});
}

Value to_numeric(const Value& v) {
    if (v.is_text()) return numeric_prefix(v.as_text(), false);
    return v;
}

std::int64_t to_int(const Value& v) {
    const Value n = to_numeric(v);
    if (n.is_integer()) return n.as_integer();
    const double d = n.as_real();
    if (!std::isfinite(d)) return 0;
    if (d >= 9223372036854775807.0) return INT64_MAX;
    if (d <= -9223372036854775808.0) return INT64_MIN;
    return static_cast<std::int64_t>(d);
}

double to_double(const Value& v) { return to_numeric(v).numeric(); }

// UTF-8 aware character helpers.
std::vector<std::size_t> char_starts(const std::string& s) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < s.size(); ++i)
        if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) out.push_back(i);
    return out;
}

std::string ascii_case(std::string s, bool up) {
    for (char& c : s)
        if (static_cast<unsigned char>(c) < 128) c = static_cast<char>(up ? std::toupper(c) : std::tolower(c));
    return s;
}

bool like_match(const std::string& pat, std::size_t pi, const std::string& str, std::size_t si, int escape) {
    while (pi < pat.size()) {
        const char p = pat[pi];
        if (escape >= 0 && p == static_cast<char>(escape)) {
            if (pi + 1 >= pat.size()) return false;
            if (si >= str.size() || std::tolower(static_cast<unsigned char>(pat[pi + 1])) !=
                                         std::tolower(static_cast<unsigned char>(str[si])))
                return false;
            pi += 2;
            ++si;
            continue;
        }
        if (p == '%') {
            while (pi < pat.size() && pat[pi] == '%') ++pi;
            if (pi == pat.size()) return true;
            for (std::size_t k = si; k <= str.size(); ++k)
                if (like_match(pat, pi, str, k, escape)) return true;
            return false;
        }
        if (si >= str.size()) return false;
        if (p == '_') {
            ++si;
            while (si < str.size() && (static_cast<unsigned char>(str[si]) & 0xC0) == 0x80) ++si;
            ++pi;
            continue;
        }
        if (std::tolower(static_cast<unsigned char>(p)) != std::tolower(static_cast<unsigned char>(str[si])))
            return false;
        ++pi;
        ++si;
    }
    return si == str.size();
}

bool glob_match(const std::string& pat, std::size_t pi, const std::string& str, std::size_t si) {
    while (pi < pat.size()) {
        const char p = pat[pi];
        if (p == '*') {
            while (pi < pat.size() && pat[pi] == '*') ++pi;
            if (pi == pat.size()) return true;
            for (std::size_t k = si; k <= str.size(); ++k)
                if (glob_match(pat, pi, str, k)) return true;
            return false;
        }
        if (si >= str.size()) return false;
        if (p == '?') {
            ++pi;
            ++si;
            continue;
        }
        if (p == '[') {
            std::size_t j = pi + 1;
            bool invert = false;
            if (j < pat.size() && pat[j] == '^') {
                invert = true;
                ++j;
            }
            bool matched = false;
            bool first = true;
            while (j < pat.size() && (first || pat[j] != ']')) {
                first = false;
                if (j + 2 < pat.size() && pat[j + 1] == '-' && pat[j + 2] != ']') {
                    if (str[si] >= pat[j] && str[si] <= pat[j + 2]) matched = true;
                    j += 3;
                } else {
                    if (str[si] == pat[j]) matched = true;
                    ++j;
                }
            }
            if (j >= pat.size()) return false;
            if (matched == invert) return false;
            pi = j + 1;
            ++si;
            continue;
        }
        if (p != str[si]) return false;
        ++pi;
        ++si;
    }
    return si == str.size();
}

std::optional<std::string> strftime_subset(const std::string& fmt, const std::string& when) {
    // Accepts YYYY-MM-DD with an optional HH:MM[:SS] part.
    auto digits = [&](std::size_t pos, std::size_t n) {
        if (pos + n > when.size()) return false;
        for (std::size_t i = pos; i < pos + n; ++i)
            if (!std::isdigit(static_cast<unsigned char>(when[i]))) return false;
        return true;
    };
    if (!digits(0, 4) || when.size() < 10 || when[4] != '-' || !digits(5, 2) || when[7] != '-' || !digits(8, 2))
        return std::nullopt;
    std::string hh = "00", mi = "00", ss = "00";
    if (when.size() > 10) {
        if ((when[10] != ' ' && when[10] != 'T') || !digits(11, 2) || when.size() < 16 || when[13] != ':' ||
            !digits(14, 2))
            return std::nullopt;
        hh = when.substr(11, 2);
        mi = when.substr(14, 2);
        if (when.size() >= 19 && when[16] == ':' && digits(17, 2)) ss = when.substr(17, 2);
    }
    const int month = std::stoi(when.substr(5, 2));
    const int day = std::stoi(when.substr(8, 2));
    if (month < 1 || month > 12 || day < 1 || day > 31) return std::nullopt;
    std::string out;
    for (std::size_t i = 0; i < fmt.size(); ++i) {
        if (fmt[i] != '%') {
            out += fmt[i];
            continue;
        }
        if (++i >= fmt.size()) return std::nullopt;
        switch (fmt[i]) {
            case 'Y': out += when.substr(0, 4); break;
            case 'm': out += when.substr(5, 2); break;
            case 'd': out += when.substr(8, 2); break;
            case 'H': out += hh; break;
            case 'M': out += mi; break;
            case 'S': out += ss; break;
            case '%': out += '%'; break;
            default: return std::nullopt;
        }
    }
    return out;
}

double sqlite_round(double r, std::int64_t n) {
    if (n < 0) n = 0;
    if (n > 30) n = 30;
    if (n == 0 && r >= 0 && r < 9223372036854775806.0) return static_cast<double>(static_cast<std::int64_t>(r + 0.5));
    if (n == 0 && r < 0 && -r < 9223372036854775806.0)
        return -static_cast<double>(static_cast<std::int64_t>(-r + 0.5));
    char buf[400];
    std::snprintf(buf, sizeof buf, "%.*f", static_cast<int>(n), r);
    return std::strtod(buf, nullptr);
}

class Executor {
public:
    explicit Executor(const Database& db) : db_(db) {}

    std::vector<Row> run_query(const Query& q) {
        std::vector<OutRow> rows;
        if (!q.is_compound()) {
            rows = run_core(q.cores[0], &q.order_by);
        } else {
            rows = run_core(q.cores[0], nullptr);
            for (std::size_t i = 1; i < q.cores.size(); ++i) {
                auto rhs = run_core(q.cores[i], nullptr);
                rows = combine(std::move(rows), std::move(rhs), q.ops[i - 1]);
            }
            for (auto& r : rows) {
                r.keys.clear();
                for (const auto& o : q.order_by) {
                    if (o.ordinal < 0 || static_cast<std::size_t>(o.ordinal) >= r.values.size())
                        throw ExecError("ORDER BY term does not match a result column");
                    r.keys.push_back(r.values[o.ordinal]);
                }
            }
        }
        if (!q.order_by.empty()) {
            std::stable_sort(rows.begin(), rows.end(), [&](const OutRow& a, const OutRow& b) {
                for (std::size_t k = 0; k < q.order_by.size(); ++k) {
                    const OrderItem& o = q.order_by[k];
                    const Value& x = a.keys[k];
                    const Value& y = b.keys[k];
                    if (x.is_null() != y.is_null()) {
                        bool nulls_first = !o.desc;
                        if (o.nulls == 1) nulls_first = true;
                        if (o.nulls == 2) nulls_first = false;
                        return x.is_null() == nulls_first;
                    }
                    int c = compare_values(x, y, nocase_expr(*o.expr));
                    if (o.desc) c = -c;
                    if (c) return c < 0;
                }
                return false;
            });
        }
        std::size_t offset = 0;
        std::size_t limit = rows.size();
        if (q.limit) {
            const std::int64_t l = to_int(eval_const(*q.limit));
            if (l >= 0) limit = static_cast<std::size_t>(l);
        }
        if (q.offset) {
            const std::int64_t o = to_int(eval_const(*q.offset));
            if (o > 0) offset = static_cast<std::size_t>(o);
        }
        std::vector<Row> out;
        for (std::size_t i = offset; i < rows.size() && out.size() < limit; ++i) out.push_back(std::move(rows[i].values));
        return out;
    }

private:
    static bool nocase_expr(const Expr& e) { return e.kind == ExprKind::Collate && iequals(e.text, "NOCASE"); }

    Value eval_const(const Expr& e) {
        Frame f;
        State empty;
        f.state = &empty;
        frames_.push_back(f);
        try {
            Value v = eval(e);
            frames_.pop_back();
            return v;
        } catch (...) {
            frames_.pop_back();
            throw;
        }
    }

    std::vector<OutRow> combine(std::vector<OutRow> lhs, std::vector<OutRow> rhs, SetOp op) {
        for (const auto& r : rhs)
            if (!lhs.empty() && r.values.size() != lhs.front().values.size())
                throw ExecError("SELECTs to the left and right of a compound operator do not have the same number of result columns");
        auto dedupe = [](std::vector<OutRow> rows) {
            std::set<Row, RowLess> seen;
            std::vector<OutRow> out;
            for (auto& r : rows)
                if (seen.insert(r.values).second) out.push_back(std::move(r));
            return out;
        };
        switch (op) {
            case SetOp::UnionAll:
                for (auto& r : rhs) lhs.push_back(std::move(r));
                return lhs;
            case SetOp::Union:
                for (auto& r : rhs) lhs.push_back(std::move(r));
                return dedupe(std::move(lhs));
            case SetOp::Intersect:
            case SetOp::Except: {
                std::set<Row, RowLess> right;
                for (auto& r : rhs) right.insert(r.values);
                std::vector<OutRow> out;
                for (auto& r : dedupe(std::move(lhs))) {
                    const bool in_right = right.count(r.values) > 0;
                    if (in_right == (op == SetOp::Intersect)) out.push_back(std::move(r));
                }
                return out;
            }
        }
        return lhs;
    }

    static bool has_aggregate(const Expr& e) {
        bool found = false;
        visit_exprs_shallow(const_cast<Expr&>(e), [&](Expr& x) {
            if (x.kind == ExprKind::Function && is_aggregate_function(x.text, x.args.size())) found = true;
        });
        return found;
    }

    std::vector<OutRow> run_core(const SelectCore& core, const std::vector<OrderItem>* order_by) {
        // Materialize sources.
        std::vector<std::vector<Row>> owned(core.from.size());
        std::vector<const std::vector<Row>*> sources(core.from.size());
        for (std::size_t i = 0; i < core.from.size(); ++i) {
            const FromEntry& e = core.from[i];
            if (e.subquery) {
                owned[i] = run_query(*e.subquery);
                sources[i] = &owned[i];
            } else {
                sources[i] = &db_.table_rows(e.table);
            }
        }

        State working;
        Frame frame;
        frame.core = &core;
        frame.state = &working;
        frames_.push_back(frame);
        struct Pop {
            std::vector<Frame>& f;
            ~Pop() { f.pop_back(); }
        } pop{frames_};

        std::vector<State> states(1);
        for (std::size_t i = 0; i < core.from.size(); ++i) {
            const FromEntry& entry = core.from[i];
            std::vector<std::string> shared = entry.using_columns;
            if (entry.natural) shared = natural_join_columns(core, i);
            std::vector<State> next;
            for (const State& st : states) {
                bool matched = false;
                for (const Row& r : *sources[i]) {
                    working = st;
                    working.push_back(&r);
                    if (join_passes(core, i, shared)) {
                        next.push_back(working);
                        matched = true;
                    }
                }
                if (!matched && entry.join == JoinKind::Left) {
                    State s = st;
                    s.push_back(nullptr);
                    next.push_back(std::move(s));
                }
            }
            states = std::move(next);
        }

        if (core.where) {
            std::vector<State> kept;
            for (const State& st : states) {
                frames_.back().state = &st;
                if (truth(eval(*core.where)).value_or(false)) kept.push_back(st);
            }
            states = std::move(kept);
        }

        bool aggregate = !core.group_by.empty() || (core.having && has_aggregate(*core.having));
        for (const auto& item : core.items)
            if (item.expr && has_aggregate(*item.expr)) aggregate = true;
        if (order_by)
            for (const auto& o : *order_by)
                if (o.ordinal < 0 && has_aggregate(*o.expr)) aggregate = true;

        std::vector<OutRow> out;
        auto emit = [&]() {
            OutRow row;
            for (const auto& item : core.items) {
                if (!item.star) {
                    row.values.push_back(eval(*item.expr));
                    continue;
                }
                const State& st = *frames_.back().state;
                for (const auto& sc : expand_star(core, item)) {
                    const std::size_t idx = static_cast<std::size_t>(sc.entry - core.from.data());
                    const Row* r = idx < st.size() ? st[idx] : nullptr;
                    row.values.push_back(r ? (*r)[sc.column] : Value());
                }
            }
            if (order_by)
                for (const auto& o : *order_by)
                    row.keys.push_back(o.ordinal >= 0 ? row.values.at(o.ordinal) : eval(*o.expr));
            out.push_back(std::move(row));
        };

        if (!aggregate) {
            for (const State& st : states) {
                frames_.back().state = &st;
                emit();
            }
        } else {
            std::vector<std::vector<const State*>> groups;
            if (core.group_by.empty()) {
                groups.emplace_back();
                for (const State& st : states) groups.back().push_back(&st);
            } else {
                std::map<Row, std::size_t, RowLess> index;
                for (const State& st : states) {
                    frames_.back().state = &st;
                    Row key;
                    for (const auto& g : core.group_by) key.push_back(eval_group_term(core, *g));
                    auto [it, inserted] = index.emplace(std::move(key), groups.size());
                    if (inserted) groups.emplace_back();
                    groups[it->second].push_back(&st);
                }
                // SQLite walks groups in key order.
                std::vector<std::vector<const State*>> ordered;
                for (auto& [key, idx] : index) ordered.push_back(std::move(groups[idx]));
                groups = std::move(ordered);
            }
            const State null_state(core.from.size(), nullptr);
            for (const auto& members : groups) {
                frames_.back().group = &members;
                frames_.back().state = members.empty() ? &null_state : members.back();
                if (core.having && !truth(eval(*core.having)).value_or(false)) continue;
                emit();
            }
            frames_.back().group = nullptr;
        }

        if (core.distinct) {
            std::set<Row, RowLess> seen;
            std::vector<OutRow> kept;
            for (auto& r : out)
                if (seen.insert(r.values).second) kept.push_back(std::move(r));
            out = std::move(kept);
        }
        return out;
    }

    Value eval_group_term(const SelectCore& core, const Expr& g) {
        if (g.kind == ExprKind::Literal && g.literal == LiteralKind::Integer) {
            const long k = std::stol(g.text);
            if (k < 1 || static_cast<std::size_t>(k) > core.items.size() || !core.items[k - 1].expr)
                throw ExecError("GROUP BY term out of range");
            return eval(*core.items[k - 1].expr);
        }
        return eval(g);
    }

    bool join_passes(const SelectCore& core, std::size_t i, const std::vector<std::string>& shared) {
        const State& st = *frames_.back().state;
        const FromEntry& right = core.from[i];
        for (const auto& name : shared) {
            int rc = -1;
            for (std::size_t c = 0; c < right.columns.size(); ++c)
                if (iequals(right.columns[c], name)) rc = static_cast<int>(c);
            for (std::size_t j = 0; j < i; ++j) {
                const FromEntry& left = core.from[j];
                int lc = -1;
                for (std::size_t c = 0; c < left.columns.size(); ++c)
                    if (iequals(left.columns[c], name)) lc = static_cast<int>(c);
                if (lc < 0) continue;
                const Value lv = st[j] ? (*st[j])[lc] : Value();
                const Value rv = (*st[i])[rc];
                const auto eq = compare_aff(lv, affinity_of(left.column_types[lc]), rv,
                                            affinity_of(right.column_types[rc]), false);
                if (!eq || *eq != 0) return false;
                break;
            }
        }
        if (right.on) return truth(eval(*right.on)).value_or(false);
        return true;
    }

    // ---------------------------------------------------------------- expressions

    Affinity expr_affinity(const Expr& e) {
        switch (e.kind) {
            case ExprKind::Column:
                if (e.binding.kind == ColumnBinding::Kind::Source) {
                    const FromEntry& src = *e.binding.source;
                    return affinity_of(src.column_types[e.binding.column]);
                }
                if (e.binding.kind == ColumnBinding::Kind::SelectItem) {
                    for (auto it = frames_.rbegin(); it != frames_.rend(); ++it)
                        if (it->core) {
                            const auto& item = it->core->items[e.binding.item];
                            return item.expr ? expr_affinity(*item.expr) : Affinity::None;
                        }
                }
                return Affinity::None;
            case ExprKind::Cast: return affinity_of(e.text);
            case ExprKind::Collate: return expr_affinity(*e.args[0]);
            case ExprKind::Subquery: {
                const auto& items = e.subquery->cores[0].items;
                if (!items.empty() && items[0].expr) return expr_affinity(*items[0].expr);
                return Affinity::None;
            }
            default: return Affinity::None;
        }
    }

    static std::optional<int> compare_aff(Value a, Affinity la, Value b, Affinity ra, bool nocase) {
        return compare_affinity(std::move(a), la, std::move(b), ra, nocase);
    }

    std::optional<int> compare_exprs(const Expr& l, const Expr& r) {
        return compare_aff(eval(l), expr_affinity(l), eval(r), expr_affinity(r), nocase_expr(l) || nocase_expr(r));
    }

    Value column_value(const Expr& e) {
        const FromEntry* src = e.binding.source;
        for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) {
            if (!it->core) continue;
            const auto& from = it->core->from;
            for (std::size_t i = 0; i < from.size(); ++i) {
                if (&from[i] != src) continue;
                const State& st = *it->state;
                if (i >= st.size()) throw ExecError("column " + e.name + " referenced before its table is joined");
                const Row* r = st[i];
                return r ? (*r)[e.binding.column] : Value();
            }
        }
        throw ExecError("no such column: " + e.name);
    }

    Value eval(const Expr& e) {
        switch (e.kind) {
            case ExprKind::Literal:
                switch (e.literal) {
                    case LiteralKind::Null: return Value();
                    case LiteralKind::Integer: {
                        auto n = parse_number(e.text);
                        return n ? *n : Value();
                    }
                    case LiteralKind::Real: return Value(std::strtod(e.text.c_str(), nullptr));
                    case LiteralKind::String: return Value(e.text);
                }
                return Value();
            case ExprKind::Column:
                switch (e.binding.kind) {
                    case ColumnBinding::Kind::Source: return column_value(e);
                    case ColumnBinding::Kind::StringLiteral: return Value(e.name);
                    case ColumnBinding::Kind::SelectItem:
                        for (auto it = frames_.rbegin(); it != frames_.rend(); ++it)
                            if (it->core) return eval(*it->core->items[e.binding.item].expr);
                        break;
                    case ColumnBinding::Kind::Unbound: break;
                }
                throw ExecError("no such column: " + e.name);
            case ExprKind::Unary: return eval_unary(e);
            case ExprKind::Binary: return eval_binary(e);
            case ExprKind::Function: return eval_function(e);
            case ExprKind::Case: return eval_case(e);
            case ExprKind::Cast: return cast(eval(*e.args[0]), e.text);
            case ExprKind::Between: {
                const auto lo = compare_exprs(*e.args[0], *e.args[1]);
                const auto hi = compare_exprs(*e.args[0], *e.args[2]);
                std::optional<bool> ge = lo ? std::optional<bool>(*lo >= 0) : std::nullopt;
                std::optional<bool> le = hi ? std::optional<bool>(*hi <= 0) : std::nullopt;
                std::optional<bool> r;
                if ((ge && !*ge) || (le && !*le)) r = false;
                else if (ge && le) r = true;
                if (e.negated && r) r = !*r;
                return from_truth(r);
            }
            case ExprKind::InList: {
                const Value lhs = eval(*e.args[0]);
                const Affinity la = expr_affinity(*e.args[0]);
                if (lhs.is_null()) return Value();
                bool saw_null = false;
                for (std::size_t i = 1; i < e.args.size(); ++i) {
                    const auto c = compare_aff(lhs, la, eval(*e.args[i]), expr_affinity(*e.args[i]), false);
                    if (!c) saw_null = true;
                    else if (*c == 0) return from_truth(!e.negated);
                }
                if (saw_null) return Value();
                return from_truth(e.negated);
            }
            case ExprKind::InSelect: {
                const Value lhs = eval(*e.args[0]);
                if (lhs.is_null()) return Value();
                const Affinity la = expr_affinity(*e.args[0]);
                Affinity ra = Affinity::None;
                const auto& items = e.subquery->cores[0].items;
                if (!items.empty() && items[0].expr) ra = expr_affinity(*items[0].expr);
                const auto rows = run_query(*e.subquery);
                bool saw_null = false;
                for (const auto& r : rows) {
                    if (r.size() != 1) throw ExecError("sub-select returns " + std::to_string(r.size()) + " columns - expected 1");
                    const auto c = compare_aff(lhs, la, r[0], ra, false);
                    if (!c) saw_null = true;
                    else if (*c == 0) return from_truth(!e.negated);
                }
                if (saw_null) return Value();
                return from_truth(e.negated);
            }
            case ExprKind::Exists: {
                const bool any = !run_query(*e.subquery).empty();
                return from_truth(e.negated ? !any : any);
            }
            case ExprKind::Subquery: {
                const auto rows = run_query(*e.subquery);
                if (rows.empty()) return Value();
                return rows.front().at(0);
            }
            case ExprKind::IsNull: {
                const bool n = eval(*e.args[0]).is_null();
                return from_truth(e.negated ? !n : n);
            }
            case ExprKind::Like: {
                const Value s = eval(*e.args[0]);
                const Value p = eval(*e.args[1]);
                if (s.is_null() || p.is_null()) return Value();
                int escape = -1;
                if (e.args.size() > 2) {
                    const Value esc = eval(*e.args[2]);
                    if (esc.is_null()) return Value();
                    const std::string t = to_text(esc);
                    if (t.size() != 1) throw ExecError("ESCAPE expression must be a single character");
                    escape = static_cast<unsigned char>(t[0]);
                }
                const bool m = e.text == "GLOB" ? glob_match(to_text(p), 0, to_text(s), 0)
                                                : like_match(to_text(p), 0, to_text(s), 0, escape);
                return from_truth(e.negated ? !m : m);
            }
            case ExprKind::Collate: return eval(*e.args[0]);
        }
        throw ExecError("unsupported expression");
    }

    Value eval_unary(const Expr& e) {
        const Value v = eval(*e.args[0]);
        if (e.text == "NOT") {
            const auto t = truth(v);
            return t ? from_truth(!*t) : Value();
        }
        if (v.is_null()) return v;
        if (e.text == "+") return v;
        if (e.text == "~") return Value(~to_int(v));
        const Value n = to_numeric(v);
        if (n.is_integer()) {
            if (n.as_integer() == INT64_MIN) return Value(-static_cast<double>(n.as_integer()));
            return Value(-n.as_integer());
        }
        return Value(-n.as_real());
    }

    Value eval_binary(const Expr& e) {
        const std::string& op = e.text;
        if (op == "AND") {
            const auto a = truth(eval(*e.args[0]));
            if (a && !*a) return from_truth(false);
            const auto b = truth(eval(*e.args[1]));
            if (b && !*b) return from_truth(false);
            if (a && b) return from_truth(true);
            return Value();
        }
        if (op == "OR") {
            const auto a = truth(eval(*e.args[0]));
            if (a && *a) return from_truth(true);
            const auto b = truth(eval(*e.args[1]));
            if (b && *b) return from_truth(true);
            if (a && b) return from_truth(false);
            return Value();
        }
        if (op == "=" || op == "<>" || op == "!=" || op == "<" || op == "<=" || op == ">" || op == ">=") {
            const auto c = compare_exprs(*e.args[0], *e.args[1]);
            if (!c) return Value();
            bool r = false;
            if (op == "=") r = *c == 0;
            else if (op == "<>" || op == "!=") r = *c != 0;
            else if (op == "<") r = *c < 0;
            else if (op == "<=") r = *c <= 0;
            else if (op == ">") r = *c > 0;
            else r = *c >= 0;
            return from_truth(r);
        }
        if (op == "IS" || op == "IS NOT") {
            const Value a = eval(*e.args[0]);
            const Value b = eval(*e.args[1]);
            bool same;
            if (a.is_null() || b.is_null()) same = a.is_null() && b.is_null();
            else same = *compare_aff(a, expr_affinity(*e.args[0]), b, expr_affinity(*e.args[1]), false) == 0;
            return from_truth(op == "IS" ? same : !same);
        }
        const Value a = eval(*e.args[0]);
        const Value b = eval(*e.args[1]);
        if (a.is_null() || b.is_null()) return Value();
        if (op == "||") return Value(to_text(a) + to_text(b));
        if (op == "&") return Value(to_int(a) & to_int(b));
        if (op == "|") return Value(to_int(a) | to_int(b));
        if (op == "<<" || op == ">>") {
            std::int64_t x = to_int(a), n = to_int(b);
            bool left = op == "<<";
            if (n < 0) {
                left = !left;
                n = -n;
            }
            if (n >= 64) return Value(left || x >= 0 ? std::int64_t{0} : std::int64_t{-1});
            return Value(left ? static_cast<std::int64_t>(static_cast<std::uint64_t>(x) << n) : (x >> n));
        }
        const Value x = to_numeric(a);
        const Value y = to_numeric(b);
        if (op == "%") {
            if (x.is_integer() && y.is_integer()) {
                if (y.as_integer() == 0) return Value();
                if (y.as_integer() == -1) return Value(std::int64_t{0});
                return Value(x.as_integer() % y.as_integer());
            }
            const double dy = y.numeric();
            const auto iy = static_cast<std::int64_t>(dy);
            if (iy == 0) return Value();
            const auto ix = static_cast<std::int64_t>(x.numeric());
            return Value(std::fmod(static_cast<double>(ix), static_cast<double>(iy)));
        }
        if (x.is_integer() && y.is_integer()) {
            const std::int64_t i = x.as_integer(), j = y.as_integer();
            std::int64_t r;
            if (op == "+") {
                if (!__builtin_add_overflow(i, j, &r)) return Value(r);
                return Value(static_cast<double>(i) + static_cast<double>(j));
            }
            if (op == "-") {
                if (!__builtin_sub_overflow(i, j, &r)) return Value(r);
                return Value(static_cast<double>(i) - static_cast<double>(j));
            }
            if (op == "*") {
                if (!__builtin_mul_overflow(i, j, &r)) return Value(r);
                return Value(static_cast<double>(i) * static_cast<double>(j));
            }
            if (op == "/") {
                if (j == 0) return Value();
                if (i == INT64_MIN && j == -1) return Value(-static_cast<double>(i));
                return Value(i / j);
            }
        }
        const double dx = x.numeric(), dy = y.numeric();
        if (op == "+") return Value(dx + dy);
        if (op == "-") return Value(dx - dy);
        if (op == "*") return Value(dx * dy);
        if (op == "/") {
            if (dy == 0.0) return Value();
            return Value(dx / dy);
        }
        throw ExecError("unsupported operator " + op);
    }

    Value eval_case(const Expr& e) {
        std::size_t i = 0;
        const std::size_t end = e.has_else ? e.args.size() - 1 : e.args.size();
        const Expr* operand = nullptr;
        if (e.has_operand) operand = e.args[i++].get();
        for (; i + 1 < end; i += 2) {
            bool hit;
            if (operand) {
                const auto c = compare_exprs(*operand, *e.args[i]);
                hit = c && *c == 0;
            } else {
                hit = truth(eval(*e.args[i])).value_or(false);
            }
            if (hit) return eval(*e.args[i + 1]);
        }
        if (e.has_else) return eval(*e.args.back());
        return Value();
    }

    Value cast(const Value& v, const std::string& type) {
        if (v.is_null()) return v;
        switch (affinity_of(type)) {
            case Affinity::Text: return Value(to_text(v));
            case Affinity::Integer:
                if (v.is_text()) return numeric_prefix(v.as_text(), true);
                return Value(to_int(v));
            case Affinity::Real:
                if (v.is_text()) return Value(numeric_prefix(v.as_text(), false).numeric());
                return Value(v.numeric());
            case Affinity::Numeric: {
                Value n = v.is_text() ? numeric_prefix(v.as_text(), false) : v;
                return apply_affinity(n, Affinity::Numeric);
            }
            case Affinity::None: return v;
        }
        return v;
    }

    Value eval_aggregate(const Expr& e, const std::string& name) {
        const Frame& f = frames_.back();
        if (!f.group) throw ExecError("misuse of aggregate function " + name + "()");
        const auto* group = f.group;
        const State* saved = f.state;
        std::vector<Value> values;
        if (!e.star_arg) {
            if (e.args.empty()) {
                if (name != "COUNT") throw ExecError("wrong number of arguments to function " + name + "()");
            } else {
                frames_.back().group = nullptr;
                for (const State* st : *group) {
                    frames_.back().state = st;
                    values.push_back(eval(*e.args[0]));
                }
                frames_.back().group = group;
                frames_.back().state = saved;
            }
        }
        if (name == "COUNT" && (e.star_arg || e.args.empty())) return Value(static_cast<std::int64_t>(group->size()));
        std::vector<Value> nonnull;
        for (auto& v : values)
            if (!v.is_null()) nonnull.push_back(std::move(v));
        if (e.distinct) {
            std::vector<Value> uniq;
            for (auto& v : nonnull) {
                bool seen = false;
                for (const auto& u : uniq) seen = seen || same_value(u, v);
                if (!seen) uniq.push_back(std::move(v));
            }
            nonnull = std::move(uniq);
        }
        if (name == "COUNT") return Value(static_cast<std::int64_t>(nonnull.size()));
        if (name == "SUM" || name == "TOTAL" || name == "AVG") {
            double rsum = 0;
            std::int64_t isum = 0;
            bool approx = false, overflow = false;
            for (const auto& v : nonnull) {
                if (v.is_integer()) {
                    rsum += static_cast<double>(v.as_integer());
                    if (!approx && !overflow && __builtin_add_overflow(isum, v.as_integer(), &isum)) overflow = true;
                } else {
                    rsum += to_double(v);
                    approx = true;
                }
            }
            if (name == "TOTAL") return Value(rsum);
            if (nonnull.empty()) return Value();
            if (name == "AVG") return Value(rsum / static_cast<double>(nonnull.size()));
            if (overflow) throw ExecError("integer overflow");
            if (approx) return Value(rsum);
            return Value(isum);
        }
        if (name == "MIN" || name == "MAX") {
            if (nonnull.empty()) return Value();
            Value best = nonnull.front();
            const bool nocase = !e.args.empty() && nocase_expr(*e.args[0]);
            for (const auto& v : nonnull) {
                const int c = compare_values(v, best, nocase);
                if ((name == "MIN" && c < 0) || (name == "MAX" && c > 0)) best = v;
            }
            return best;
        }
        if (name == "GROUP_CONCAT") {
            std::string sep = ",";
            if (e.args.size() > 1) sep = to_text(eval(*e.args[1]));
            if (nonnull.empty()) return Value();
            std::string out;
            for (std::size_t i = 0; i < nonnull.size(); ++i) {
                if (i) out += sep;
                out += to_text(nonnull[i]);
            }
            return Value(out);
        }
        throw ExecError("unknown aggregate " + name);
    }

    Value eval_function(const Expr& e) {
        const std::string name = upper(e.text);
        if (is_aggregate_function(name, e.args.size()) || e.star_arg) return eval_aggregate(e, name);
        auto arity = [&](std::size_t lo, std::size_t hi) {
            if (e.args.size() < lo || e.args.size() > hi)
                throw ExecError("wrong number of arguments to function " + name + "()");
        };
        if (name == "COALESCE" || name == "IFNULL") {
            if (name == "IFNULL") arity(2, 2);
            else arity(2, 1000);
            for (const auto& a : e.args) {
                Value v = eval(*a);
                if (!v.is_null()) return v;
            }
            return Value();
        }
        if (name == "IIF") {
            arity(3, 3);
            return truth(eval(*e.args[0])).value_or(false) ? eval(*e.args[1]) : eval(*e.args[2]);
        }
        std::vector<Value> a;
        for (const auto& arg : e.args) a.push_back(eval(*arg));
        if (name == "NULLIF") {
            arity(2, 2);
            const auto c = compare_aff(a[0], expr_affinity(*e.args[0]), a[1], expr_affinity(*e.args[1]), false);
            if (c && *c == 0) return Value();
            return a[0];
        }
        if (name == "MIN" || name == "MAX") {
            arity(2, 1000);
            Value best = a[0];
            for (const auto& v : a) {
                if (v.is_null()) return Value();
                const int c = compare_values(v, best);
                if ((name == "MIN" && c < 0) || (name == "MAX" && c > 0)) best = v;
            }
            return best;
        }
        if (name == "TYPEOF") {
            arity(1, 1);
            switch (a[0].type()) {
                case Value::Type::Null: return Value("null");
                case Value::Type::Integer: return Value("integer");
                case Value::Type::Real: return Value("real");
                case Value::Type::Text: return Value("text");
            }
        }
        for (const auto& v : a)
            if (v.is_null() && name != "STRFTIME" && name != "REPLACE") return Value();
        if (name == "ABS") {
            arity(1, 1);
            const Value n = to_numeric(a[0]);
            if (n.is_integer()) {
                if (n.as_integer() == INT64_MIN) throw ExecError("integer overflow");
                return Value(n.as_integer() < 0 ? -n.as_integer() : n.as_integer());
            }
            return Value(std::fabs(n.as_real()));
        }
        if (name == "LENGTH") {
            arity(1, 1);
            if (a[0].is_text()) return Value(static_cast<std::int64_t>(char_starts(a[0].as_text()).size()));
            return Value(static_cast<std::int64_t>(to_text(a[0]).size()));
        }
        if (name == "UPPER" || name == "LOWER") {
            arity(1, 1);
            return Value(ascii_case(to_text(a[0]), name == "UPPER"));
        }
        if (name == "SUBSTR" || name == "SUBSTRING") {
            arity(2, 3);
            const std::string s = to_text(a[0]);
            const auto starts = char_starts(s);
            const auto len = static_cast<std::int64_t>(starts.size());
            std::int64_t p1 = to_int(a[1]);
            std::int64_t p2 = a.size() == 3 ? to_int(a[2]) : 1000000000;
            bool neg = false;
            if (p2 < 0) {
                p2 = -p2;
                neg = true;
            }
            if (p1 < 0) {
                p1 += len;
                if (p1 < 0) {
                    p2 += p1;
                    if (p2 < 0) p2 = 0;
                    p1 = 0;
                }
            } else if (p1 > 0) {
                --p1;
            } else if (p2 > 0) {
                --p2;
            }
            if (neg) {
                p1 -= p2;
                if (p1 < 0) {
                    p2 += p1;
                    p1 = 0;
                }
            }
            if (p1 + p2 > len) {
                p2 = len - p1;
                if (p2 < 0) p2 = 0;
            }
            if (p2 <= 0 || p1 >= len) return Value(std::string());
            const std::size_t b = starts[p1];
            const std::size_t end = p1 + p2 >= len ? s.size() : starts[p1 + p2];
            return Value(s.substr(b, end - b));
        }
        if (name == "INSTR") {
            arity(2, 2);
            const std::string h = to_text(a[0]), n = to_text(a[1]);
            const auto pos = h.find(n);
            if (pos == std::string::npos) return Value(std::int64_t{0});
            std::int64_t chars = 0;
            for (std::size_t i = 0; i < pos; ++i)
                if ((static_cast<unsigned char>(h[i]) & 0xC0) != 0x80) ++chars;
            return Value(chars + 1);
        }
        if (name == "ROUND") {
            arity(1, 2);
            const std::int64_t n = a.size() == 2 ? to_int(a[1]) : 0;
            return Value(sqlite_round(to_double(a[0]), n));
        }
        if (name == "REPLACE") {
            arity(3, 3);
            if (a[0].is_null() || a[1].is_null() || a[2].is_null()) return Value();
            std::string s = to_text(a[0]);
            const std::string from = to_text(a[1]), to = to_text(a[2]);
            if (from.empty()) return Value(s);
            std::string out;
            std::size_t i = 0;
            while (true) {
                const auto p = s.find(from, i);
                if (p == std::string::npos) break;
                out += s.substr(i, p - i);
                out += to;
                i = p + from.size();
            }
            out += s.substr(i);
            return Value(out);
        }
        if (name == "TRIM" || name == "LTRIM" || name == "RTRIM") {
            arity(1, 2);
            const std::string s = to_text(a[0]);
            const std::string set = a.size() == 2 ? to_text(a[1]) : " ";
            std::size_t b = 0, en = s.size();
            if (name != "RTRIM")
                while (b < en && set.find(s[b]) != std::string::npos) ++b;
            if (name != "LTRIM")
                while (en > b && set.find(s[en - 1]) != std::string::npos) --en;
            return Value(s.substr(b, en - b));
        }
        if (name == "STRFTIME") {
            arity(2, 2);
            if (a[0].is_null() || a[1].is_null()) return Value();
            auto r = strftime_subset(to_text(a[0]), to_text(a[1]));
            return r ? Value(*r) : Value();
        }
        if (name == "DATE") {
            arity(1, 1);
            auto r = strftime_subset("%Y-%m-%d", to_text(a[0]));
            return r ? Value(*r) : Value();
        }
        throw ExecError("no such function: " + name);
    }

    const Database& db_;
    std::vector<Frame> frames_;
};

bool values_close(const Value& a, const Value& b, double rel_tol) {
    if (a.is_numeric() && b.is_numeric() && (a.is_real() || b.is_real())) {
        const double x = a.numeric(), y = b.numeric();
        if (x == y) return true;
        return std::fabs(x - y) <= rel_tol * std::max({1.0, std::fabs(x), std::fabs(y)});
    }
    return compare_values(a, b) == 0 && a.is_null() == b.is_null();
}

// Sort key that rounds reals so near-equal values land together.
Row canonical(const Row& r) {
    Row out;
    for (const auto& v : r) {
        if (v.is_real()) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.10g", v.as_real());
            out.emplace_back(std::strtod(buf, nullptr));
        } else {
            out.push_back(v);
        }
    }
    return out;
}

}  // namespace

ResultSet execute(std::string_view text, const Database& db) {
    QueryPtr q;
    try {
        q = parse_query(text);
        bind(*q, db.schema);
    } catch (const ExecError&) {
        throw;
    } catch (const Error& e) {
        throw ExecError(e.what());
    }
    ResultSet rs;
    rs.labels = output_columns(*q);
    rs.ordered = !q->order_by.empty();
    rs.rows = Executor(db).run_query(*q);
    return rs;
}

bool rows_equal(const Row& a, const Row& b, double rel_tol) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!values_close(a[i], b[i], rel_tol)) return false;
    return true;
}

bool multiset_equal(const ResultSet& a, const ResultSet& b, double rel_tol) {
    if (a.rows.size() != b.rows.size()) return false;
    std::vector<std::pair<Row, const Row*>> x, y;
    for (const auto& r : a.rows) x.emplace_back(canonical(r), &r);
    for (const auto& r : b.rows) y.emplace_back(canonical(r), &r);
    auto less = [](const auto& p, const auto& q) { return RowLess{}(p.first, q.first); };
    std::sort(x.begin(), x.end(), less);
    std::sort(y.begin(), y.end(), less);
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!rows_equal(*x[i].second, *y[i].second, rel_tol)) return false;
    return true;
}

bool results_match(const ResultSet& gold, const ResultSet& pred, double rel_tol) {
    if (!gold.ordered) return multiset_equal(gold, pred, rel_tol);
    if (gold.rows.size() != pred.rows.size()) return false;
    for (std::size_t i = 0; i < gold.rows.size(); ++i)
        if (!rows_equal(gold.rows[i], pred.rows[i], rel_tol)) return false;
    return true;
}

}  // namespace schemashift
