#include "schemashift/perturb.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <set>

#include "schemashift/ddl.hpp"
#include "schemashift/errors.hpp"
#include "schemashift/patterns.hpp"
#include "schemashift/random.hpp"
#include "schemashift/sql_refs.hpp"
#include "schemashift/sql_rewrite.hpp"

namespace schemashift {

namespace {

using NameSet = std::set<std::string, ILess>;

const std::string& sql_of(const Instance& in) {
    const auto* sql = std::get_if<std::string>(&in.gold);
    if (!sql) throw InvalidArgument("instance " + in.instance_id + " has no SQL gold");
    return *sql;
}

PerturbedInstance start(const Instance& in, PerturbationType type) {
    if (auto v = validate(in.schema); !v.empty())
        throw InvalidArgument("instance " + in.instance_id + " has an invalid schema (" +
                              std::string(to_string(v.front().code)) + " at " + v.front().path + ")");
    sql_of(in);
    PerturbedInstance p;
    p.base = in;
    p.evolved = in;
    p.record.ptype = type;
    return p;
}

PerturbedInstance finish(PerturbedInstance p) {
    p.evolved.schema = apply_to_schema(p.base.schema, p.record);
    if (auto v = validate(p.evolved.schema); !v.empty())
        throw IntegrityError("evolved schema breaks " + std::string(to_string(v.front().code)) + " at " +
                                 v.front().path,
                             v.front().subject);
    if (const auto* sql = std::get_if<std::string>(&p.evolved.gold); sql && !p.needs_review)
        parse_and_bind(*sql, p.evolved.schema);
    return p;
}

int draw(std::mt19937_64& rng, CountRange range, std::size_t cap) {
    const int lo = std::max(0, range.lo);
    const int hi = std::max(lo, range.hi);
    return static_cast<int>(std::min<std::int64_t>(uniform(rng, lo, hi), static_cast<std::int64_t>(cap)));
}

template <typename T>
std::vector<T> sample(std::vector<T> pool, int k, std::mt19937_64& rng) {
    std::vector<std::size_t> idx(pool.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    shuffle(idx, rng);
    idx.resize(static_cast<std::size_t>(std::max(0, k)));
    std::sort(idx.begin(), idx.end());
    std::vector<T> out;
    for (auto i : idx) out.push_back(std::move(pool[i]));
    return out;
}

NameSet column_names(const Schema& s) {
    NameSet out;
    for (const auto& t : s.tables)
        for (const auto& c : t.columns) out.insert(c.name);
    return out;
}

NameSet table_names(const Schema& s) {
    NameSet out;
    for (const auto& t : s.tables) out.insert(t.name);
    return out;
}

bool fk_endpoint(const Schema& s, std::string_view table, std::string_view column) {
    return std::any_of(s.foreign_keys.begin(), s.foreign_keys.end(), [&](const ForeignKey& fk) {
        return (iequals(fk.child_table, table) && iequals(fk.child_column, column)) ||
               (iequals(fk.parent_table, table) && iequals(fk.parent_column, column));
    });
}

std::string first_free(const std::string& base, const NameSet& taken) {
    if (!taken.count(base)) return base;
    for (int i = 2;; ++i)
        if (std::string c = base + "_" + std::to_string(i); !taken.count(c)) return c;
}

void count_table(EvolutionRecord& r, const std::string& table, int n) {
    for (auto& [t, k] : r.manipulated_per_table)
        if (iequals(t, table)) {
            k += n;
            return;
        }
    r.manipulated_per_table.push_back({table, n});
}

// Asks `synth` until `accept` returns a value, feeding rejections back.
template <typename T>
T negotiate(Synthesizer& synth, SynthRequest req,
            const std::function<std::optional<T>(const SynthResponse&, std::string&)>& accept) {
    req.normalize();
    std::string last;
    for (int attempt = 0; attempt < kSynthAttempts; ++attempt) {
        SynthResponse resp;
        try {
            resp = synth.propose(req);
        } catch (const MalformedProposal& e) {
            req.feedback = last = e.what();
            continue;
        }
        std::string problem;
        if (auto v = accept(resp, problem)) return *v;
        req.feedback = last = problem;
    }
    throw SynthesisExhausted(std::string(to_string(req.kind)) + " gave no acceptable proposal in " +
                             std::to_string(kSynthAttempts) + " attempts: " + last);
}

// A proposed column survives a DDL round trip unchanged.
bool well_formed(const Column& c) {
    if (c.name.empty() || c.data_type.empty()) return false;
    try {
        const Schema s = parse_ddl("CREATE TABLE t (" + quote_ident(c.name) + " " + c.data_type + ")");
        return s.tables.size() == 1 && s.tables[0].columns.size() == 1 && s.tables[0].columns[0].name == c.name &&
               s.tables[0].columns[0].data_type == c.data_type;
    } catch (const Error&) {
        return false;
    }
}

bool star_touches(const std::string& sql, const Schema& schema, const std::vector<std::pair<std::string, int>>& tables) {
    return std::any_of(tables.begin(), tables.end(),
                       [&](const auto& t) { return star_covers_table(sql, t.first, schema); });
}

}  // namespace

PerturbedInstance perturb_add_columns(const Instance& in, CountRange per_table, Synthesizer& synth,
                                      std::mt19937_64& rng) {
    PerturbedInstance p = start(in, PerturbationType::AddColumns);
    const Schema& s = in.schema;
    const std::string context = render_ddl(s);
    NameSet taken = column_names(s);
    for (const auto& t : s.tables) {
        const int k = draw(rng, per_table, t.columns.size());
        if (k == 0) continue;
        std::vector<Column> accepted;
        SynthRequest req;
        req.kind = SynthKind::NewColumns;
        req.context = context;
        req.targets = {t.name};
        std::string last;
        for (int attempt = 0; attempt < kSynthAttempts && accepted.size() < static_cast<std::size_t>(k); ++attempt) {
            req.forbidden.assign(taken.begin(), taken.end());
            req.count = static_cast<std::size_t>(k) - accepted.size();
            req.normalize();
            SynthResponse resp;
            try {
                resp = synth.propose(req);
            } catch (const MalformedProposal& e) {
                req.feedback = last = e.what();
                continue;
            }
            std::vector<std::string> rejected;
            for (auto c : resp.columns) {
                if (accepted.size() == static_cast<std::size_t>(k)) break;
                c.nullable = true;
                if (!well_formed(c) || taken.count(c.name)) {
                    rejected.push_back(c.name);
                    continue;
                }
                taken.insert(c.name);
                accepted.push_back(std::move(c));
            }
            std::string problem;
            for (const auto& r : rejected) problem += (problem.empty() ? "" : ", ") + r;
            if (!problem.empty()) req.feedback = last = "already taken or malformed: " + problem;
        }
        if (accepted.size() < static_cast<std::size_t>(k))
            throw SynthesisExhausted("new_columns for " + t.name + " supplied " + std::to_string(accepted.size()) +
                                     " of " + std::to_string(k) + " names: " + last);
        std::size_t width = t.columns.size();
        for (auto& c : accepted) {
            const auto pos = static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(width)));
            p.record.added_columns.push_back({t.name, std::move(c), pos});
            ++width;
        }
        count_table(p.record, t.name, k);
        p.record.manipulated_count += k;
    }
    p.needs_review = star_touches(sql_of(in), s, p.record.manipulated_per_table);
    return finish(std::move(p));
}

PerturbedInstance perturb_remove_columns(const Instance& in, CountRange count, std::mt19937_64& rng) {
    PerturbedInstance p = start(in, PerturbationType::RemoveColumns);
    const SqlRefs refs = extract_refs(sql_of(in), in.schema);
    std::vector<RemovedItem> pool;
    for (const auto& t : in.schema.tables)
        for (const auto& c : t.columns)
            if (!t.is_pk_member(c.name) && !refs.columns.count({lower(t.name), lower(c.name)}))
                pool.push_back({t.name, c.name});
    if (pool.empty()) throw NoEligibleColumns("every column is a key or appears in the gold SQL");
    p.record.removed = sample(pool, draw(rng, count, pool.size()), rng);
    for (const auto& r : p.record.removed) count_table(p.record, r.table, 1);
    p.record.manipulated_count = static_cast<int>(p.record.removed.size());
    p.needs_review = star_touches(sql_of(in), in.schema, p.record.manipulated_per_table);
    return finish(std::move(p));
}

PerturbedInstance perturb_remove_columns_in_sql(const Instance& in, CountRange count, std::mt19937_64& rng) {
    PerturbedInstance p = start(in, PerturbationType::RemoveColumnsInSql);
    const SqlRefs refs = extract_refs(sql_of(in), in.schema);
    std::vector<RemovedItem> pool;
    for (const auto& t : in.schema.tables)
        for (const auto& c : t.columns)
            if (!t.is_pk_member(c.name) && refs.columns.count({lower(t.name), lower(c.name)}))
                pool.push_back({t.name, c.name});
    if (pool.empty()) throw NoEligibleColumns("the gold SQL references no removable column");
    p.record.removed = sample(pool, std::max(1, draw(rng, count, pool.size())), rng);
    for (const auto& r : p.record.removed) count_table(p.record, r.table, 1);
    p.record.manipulated_count = static_cast<int>(p.record.removed.size());
    p.evolved.gold = RefusalSentinel{RefusalKind::Column};
    return finish(std::move(p));
}

PerturbedInstance perturb_rename_columns(const Instance& in, CountRange count, Synthesizer& synth,
                                         std::mt19937_64& rng) {
    PerturbedInstance p = start(in, PerturbationType::RenameColumns);
    const Schema& s = in.schema;
    std::vector<std::pair<std::string, std::string>> pool;
    for (const auto& t : s.tables)
        for (const auto& c : t.columns) pool.push_back({t.name, c.name});
    const auto chosen = sample(pool, draw(rng, count, pool.size()), rng);
    const std::string context = render_ddl(s);
    NameSet taken = column_names(s);
    RenameMap renames;
    for (const auto& [table, column] : chosen) {
        SynthRequest req;
        req.kind = SynthKind::ColumnRename;
        req.context = context;
        req.targets = {table, column};
        req.forbidden.assign(taken.begin(), taken.end());
        const std::string name = negotiate<std::string>(
            synth, req, [&](const SynthResponse& r, std::string& why) -> std::optional<std::string> {
                for (const auto& n : r.names)
                    if (!n.empty() && !taken.count(n)) return n;
                why = "every proposed name is already taken";
                return std::nullopt;
            });
        taken.insert(name);
        renames.rename_column(table, column, name);
        count_table(p.record, table, 1);
    }
    if (auto problems = renames.check(s); !problems.empty()) throw IntegrityError(problems.front(), "");
    p.record.manipulated_count = static_cast<int>(chosen.size());
    p.record.renames = renames;
    p.evolved.gold = rewrite_identifiers(sql_of(in), renames, s);
    return finish(std::move(p));
}

PerturbedInstance perturb_split_columns(const Instance& in, const std::vector<CompositeKind>& patterns,
                                        CountRange count, std::mt19937_64& rng) {
    PerturbedInstance p = start(in, PerturbationType::SplitColumns);
    struct Pick {
        std::string table;
        std::string column;
        SplitCandidate cand;
    };
    std::vector<Pick> pool;
    for (const auto& t : in.schema.tables)
        for (const auto& c : t.columns) {
            if (t.is_pk_member(c.name) || fk_endpoint(in.schema, t.name, c.name)) continue;
            auto cand = split_candidate(c);
            if (cand && std::find(patterns.begin(), patterns.end(), cand->kind) != patterns.end())
                pool.push_back({t.name, c.name, *cand});
        }
    if (pool.empty()) throw NoEligibleColumns("no column matches a split pattern");
    const auto chosen = sample(pool, std::max(1, draw(rng, count, pool.size())), rng);

    Schema current = in.schema;
    std::string gold = sql_of(in);
    for (const auto& pick : chosen) {
        NameSet taken = column_names(current);
        ColumnSplitSpec spec{pick.table, pick.column, {}, std::string(delimiter_for(pick.cand.kind)), pick.cand.kind};
        for (const auto& comp : pick.cand.components) {
            std::string name = comp;
            if (taken.count(name)) name = first_free(pick.column + "_" + comp, taken);
            taken.insert(name);
            spec.components.push_back(name);
        }
        if (!p.needs_review) {
            try {
                gold = rewrite_for_column_split(gold, spec, current);
            } catch (const NeedsReview&) {
                p.needs_review = true;
            }
        }
        EvolutionRecord step;
        step.ptype = PerturbationType::SplitColumns;
        step.column_splits = {spec};
        current = apply_to_schema(current, step);
        p.record.column_splits.push_back(std::move(spec));
        count_table(p.record, pick.table, 1);
    }
    p.record.manipulated_count = static_cast<int>(chosen.size());
    if (!p.needs_review) p.evolved.gold = gold;
    return finish(std::move(p));
}

PerturbedInstance perturb_merge_columns(const Instance& in, const std::vector<CompositeKind>& patterns,
                                        CountRange count, std::mt19937_64& rng) {
    PerturbedInstance p = start(in, PerturbationType::MergeColumns);
    std::vector<std::pair<std::string, MergeCandidate>> pool;
    for (const auto& t : in.schema.tables)
        for (auto& cand : merge_candidates(t)) {
            if (std::find(patterns.begin(), patterns.end(), cand.kind) == patterns.end()) continue;
            if (std::any_of(cand.components.begin(), cand.components.end(),
                            [&](const std::string& c) { return fk_endpoint(in.schema, t.name, c); }))
                continue;
            pool.push_back({t.name, std::move(cand)});
        }
    if (pool.empty()) throw NoEligibleColumns("no co-located columns match a merge pattern");
    const auto chosen = sample(pool, std::max(1, draw(rng, count, pool.size())), rng);

    Schema current = in.schema;
    std::string gold = sql_of(in);
    for (const auto& [table, cand] : chosen) {
        NameSet taken = column_names(current);
        for (const auto& c : cand.components) taken.erase(c);
        std::string merged = cand.merged;
        if (taken.count(merged)) merged = first_free(table + "_" + cand.merged, taken);
        ColumnMergeSpec spec{table, cand.components, merged, std::string(delimiter_for(cand.kind)), cand.kind};
        if (!p.needs_review) {
            try {
                gold = rewrite_for_column_merge(gold, spec, current);
            } catch (const NeedsReview&) {
                p.needs_review = true;
            }
        }
        EvolutionRecord step;
        step.ptype = PerturbationType::MergeColumns;
        step.column_merges = {spec};
        current = apply_to_schema(current, step);
        count_table(p.record, table, static_cast<int>(spec.components.size()));
        p.record.manipulated_count += static_cast<int>(spec.components.size());
        p.record.column_merges.push_back(std::move(spec));
    }
    if (!p.needs_review) p.evolved.gold = gold;
    return finish(std::move(p));
}

PerturbedInstance perturb_add_tables(const Instance& in, CountRange count, const SchemaPool& pool,
                                     std::mt19937_64& rng) {
    PerturbedInstance p = start(in, PerturbationType::AddTables);
    auto it = pool.find(in.db_id);
    if (it == pool.end()) throw NoEligibleTables("no full schema for database " + in.db_id);
    const Schema& full = it->second;
    std::vector<Table> extras;
    for (const auto& t : full.tables)
        if (!in.schema.has_table(t.name)) extras.push_back(t);
    if (extras.empty()) throw NoEligibleTables("database " + in.db_id + " has no tables beyond the relevant ones");
    const auto chosen = sample(extras, std::max(1, draw(rng, count, extras.size())), rng);

    auto present = [&](std::string_view table, std::string_view column) {
        const Table* t = in.schema.find_table(table);
        if (!t)
            for (const auto& c : chosen)
                if (iequals(c.name, table)) t = &c;
        return t && t->has_column(column);
    };
    std::vector<bool> used(full.foreign_keys.size(), false);
    for (const auto& t : chosen) {
        AddedTable added{t, {}};
        for (std::size_t i = 0; i < full.foreign_keys.size(); ++i) {
            const ForeignKey& fk = full.foreign_keys[i];
            if (used[i] || (!iequals(fk.child_table, t.name) && !iequals(fk.parent_table, t.name))) continue;
            if (!present(fk.child_table, fk.child_column) || !present(fk.parent_table, fk.parent_column)) continue;
            used[i] = true;
            added.foreign_keys.push_back(fk);
        }
        p.record.added_tables.push_back(std::move(added));
    }
    p.record.manipulated_count = static_cast<int>(chosen.size());
    return finish(std::move(p));
}

PerturbedInstance perturb_remove_tables(const Instance& in, std::mt19937_64& rng) {
    PerturbedInstance p = start(in, PerturbationType::RemoveTables);
    const SqlRefs refs = extract_refs(sql_of(in), in.schema);
    std::vector<std::string> pool;
    for (const auto& t : in.schema.tables)
        if (refs.tables.count(lower(t.name))) pool.push_back(t.name);
    if (pool.empty()) throw NoEligibleTables("the gold SQL references no table");
    const auto pick = static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(pool.size()) - 1));
    p.record.removed.push_back({pool[pick], ""});
    p.record.manipulated_count = 1;
    p.evolved.gold = RefusalSentinel{RefusalKind::Table};
    return finish(std::move(p));
}

PerturbedInstance perturb_rename_tables(const Instance& in, CountRange count, Synthesizer& synth,
                                        std::mt19937_64& rng) {
    PerturbedInstance p = start(in, PerturbationType::RenameTables);
    const Schema& s = in.schema;
    std::vector<std::string> pool;
    for (const auto& t : s.tables) pool.push_back(t.name);
    const auto chosen = sample(pool, draw(rng, count, pool.size()), rng);
    const std::string context = render_ddl(s);
    NameSet taken = table_names(s);
    RenameMap renames;
    for (const auto& table : chosen) {
        SynthRequest req;
        req.kind = SynthKind::TableRename;
        req.context = context;
        req.targets = {table};
        req.forbidden.assign(taken.begin(), taken.end());
        const std::string name = negotiate<std::string>(
            synth, req, [&](const SynthResponse& r, std::string& why) -> std::optional<std::string> {
                for (const auto& n : r.names)
                    if (!n.empty() && !taken.count(n)) return n;
                why = "every proposed name is already taken";
                return std::nullopt;
            });
        taken.insert(name);
        renames.rename_table(table, name);
    }
    if (auto problems = renames.check(s); !problems.empty()) throw IntegrityError(problems.front(), "");
    p.record.manipulated_count = static_cast<int>(chosen.size());
    p.record.renames = renames;
    p.evolved.gold = rewrite_identifiers(sql_of(in), renames, s);
    return finish(std::move(p));
}

PerturbedInstance perturb_split_tables(const Instance& in, Synthesizer& synth, std::mt19937_64& rng) {
    PerturbedInstance p = start(in, PerturbationType::SplitTables);
    const Schema& s = in.schema;
    std::vector<const Table*> pool;
    for (const auto& t : s.tables)
        if (!t.primary_key.empty() && t.non_pk_columns().size() >= 2) pool.push_back(&t);
    if (pool.empty()) throw NoEligibleTables("no table has a primary key and two other columns");
    const Table& target = *pool[static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(pool.size()) - 1))];

    SynthRequest req;
    req.kind = SynthKind::SplitPlan;
    req.context = render_ddl(s);
    req.targets = {target.name};
    const NameSet taken = table_names(s);
    req.forbidden.assign(taken.begin(), taken.end());
    SplitPlan plan = negotiate<SplitPlan>(
        synth, req, [&](const SynthResponse& r, std::string& why) -> std::optional<SplitPlan> {
            if (!r.split_plan) {
                why = "no split plan";
                return std::nullopt;
            }
            SplitPlan candidate = *r.split_plan;
            if (!iequals(candidate.source_table, target.name)) {
                why = "the plan must split " + target.name;
                return std::nullopt;
            }
            candidate.source_table = target.name;
            candidate.pk = target.primary_key;
            if (auto problems = candidate.check(s); !problems.empty()) {
                why = problems.front();
                return std::nullopt;
            }
            return candidate;
        });

    try {
        p.evolved.gold = rewrite_for_split(sql_of(in), plan, s);
    } catch (const UnsupportedShape&) {
        p.needs_review = true;
    } catch (const NeedsReview&) {
        p.needs_review = true;
    }
    p.record.manipulated_count = static_cast<int>(plan.parts.size());
    p.record.split_plan = std::move(plan);
    return finish(std::move(p));
}

PerturbedInstance perturb_merge_tables(const Instance& in, Synthesizer& synth, std::mt19937_64& rng) {
    PerturbedInstance p = start(in, PerturbationType::MergeTables);
    const Schema& s = in.schema;
    // (parent, child) pairs joined by a foreign key or an identical key column.
    std::vector<std::pair<std::string, std::string>> pool;
    auto add_pair = [&](const std::string& parent, const std::string& child) {
        for (const auto& [a, b] : pool)
            if ((iequals(a, parent) && iequals(b, child)) || (iequals(a, child) && iequals(b, parent))) return;
        pool.push_back({parent, child});
    };
    for (const auto& fk : s.foreign_keys)
        if (!iequals(fk.child_table, fk.parent_table)) add_pair(fk.parent_table, fk.child_table);
    for (std::size_t i = 0; i < s.tables.size(); ++i)
        for (std::size_t j = i + 1; j < s.tables.size(); ++j) {
            const Table& a = s.tables[i];
            const Table& b = s.tables[j];
            if (a.primary_key.size() == 1 && b.primary_key.size() == 1 && iequals(a.primary_key[0], b.primary_key[0]))
                add_pair(a.name, b.name);
        }
    if (pool.empty()) throw NoEligibleTables("no two tables are linked by a key");
    shuffle(pool, rng);

    // First pair whose gold rewrites cleanly; otherwise the first pair, flagged.
    std::optional<PerturbedInstance> flagged;
    std::optional<MergePlan> flagged_plan;
    for (const auto& [parent, child] : pool) {
        SynthRequest req;
        req.kind = SynthKind::MergePlan;
        req.context = render_ddl(s);
        req.targets = {parent, child};
        const NameSet taken = table_names(s);
        req.forbidden.assign(taken.begin(), taken.end());
        MergePlan plan = negotiate<MergePlan>(
            synth, req, [&](const SynthResponse& r, std::string& why) -> std::optional<MergePlan> {
                if (!r.merge_plan) {
                    why = "no merge plan";
                    return std::nullopt;
                }
                MergePlan candidate = *r.merge_plan;
                if (candidate.source_tables.size() != 2) {
                    why = "a merge combines exactly two tables";
                    return std::nullopt;
                }
                if (candidate.kept_pk_table.empty()) candidate.kept_pk_table = candidate.source_tables.front();
                const Table* kept = s.find_table(candidate.kept_pk_table);
                if (!kept) {
                    why = "unknown kept primary key table " + candidate.kept_pk_table;
                    return std::nullopt;
                }
                candidate.kept_pk_table = kept->name;
                candidate.kept_pk = kept->primary_key;
                if (auto problems = candidate.check(s); !problems.empty()) {
                    why = problems.front();
                    return std::nullopt;
                }
                return candidate;
            });

        PerturbedInstance q = p;
        try {
            q.evolved.gold = rewrite_for_merge(sql_of(in), plan, s);
        } catch (const UnsupportedShape&) {
            q.needs_review = true;
        } catch (const NeedsReview&) {
            q.needs_review = true;
        }
        if (!q.needs_review) {
            q.record.manipulated_count = static_cast<int>(plan.source_tables.size());
            q.record.merge_plan = std::move(plan);
            return finish(std::move(q));
        }
        if (!flagged) {
            flagged = std::move(q);
            flagged_plan = std::move(plan);
        }
    }
    p = std::move(*flagged);
    MergePlan plan = std::move(*flagged_plan);
    p.record.manipulated_count = static_cast<int>(plan.source_tables.size());
    p.record.merge_plan = std::move(plan);
    return finish(std::move(p));
}

PerturbedInstance perturb(const Instance& in, PerturbationType type, const PerturbConfig& cfg, Synthesizer& synth,
                          const SchemaPool& pool, std::mt19937_64& rng) {
    switch (type) {
        case PerturbationType::AddColumns: return perturb_add_columns(in, cfg.add_columns, synth, rng);
        case PerturbationType::RemoveColumns: return perturb_remove_columns(in, cfg.remove_columns, rng);
        case PerturbationType::RemoveColumnsInSql:
            return perturb_remove_columns_in_sql(in, cfg.remove_columns_in_sql, rng);
        case PerturbationType::RenameColumns: return perturb_rename_columns(in, cfg.rename_columns, synth, rng);
        case PerturbationType::SplitColumns:
            return perturb_split_columns(in, cfg.patterns, cfg.split_columns, rng);
        case PerturbationType::MergeColumns:
            return perturb_merge_columns(in, cfg.patterns, cfg.merge_columns, rng);
        case PerturbationType::AddTables: return perturb_add_tables(in, cfg.add_tables, pool, rng);
        case PerturbationType::RemoveTables: return perturb_remove_tables(in, rng);
        case PerturbationType::RenameTables: return perturb_rename_tables(in, cfg.rename_tables, synth, rng);
        case PerturbationType::SplitTables: return perturb_split_tables(in, synth, rng);
        case PerturbationType::MergeTables: return perturb_merge_tables(in, synth, rng);
    }
    throw InvalidArgument("unknown perturbation type");
}

}  // namespace schemashift
