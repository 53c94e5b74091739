#include "schemashift/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "schemashift/ddl.hpp"
#include "schemashift/errors.hpp"
#include "schemashift/random.hpp"
#include "schemashift/sql_ast.hpp"
#include "schemashift/sql_refs.hpp"

namespace schemashift {

// ---------------------------------------------------------------- JSON

namespace {

Json fk_json(const ForeignKey& fk) {
    return {{"child_table", fk.child_table},
            {"child_column", fk.child_column},
            {"parent_table", fk.parent_table},
            {"parent_column", fk.parent_column}};
}

ForeignKey fk_from(const Json& j) {
    return {j.at("child_table").get<std::string>(), j.at("child_column").get<std::string>(),
            j.at("parent_table").get<std::string>(), j.at("parent_column").get<std::string>()};
}

Json column_json(const Column& c) { return {{"name", c.name}, {"type", c.data_type}, {"nullable", c.nullable}}; }

Column column_from(const Json& j) {
    return {j.at("name").get<std::string>(), j.at("type").get<std::string>(), j.at("nullable").get<bool>()};
}

Json table_json(const Table& t) {
    Json cols = Json::array();
    for (const auto& c : t.columns) cols.push_back(column_json(c));
    return {{"name", t.name}, {"columns", cols}, {"primary_key", t.primary_key}};
}

Table table_from(const Json& j) {
    Table t;
    t.name = j.at("name").get<std::string>();
    for (const auto& c : j.at("columns")) t.columns.push_back(column_from(c));
    t.primary_key = j.at("primary_key").get<std::vector<std::string>>();
    return t;
}

std::vector<std::string> strings(const Json& j) { return j.get<std::vector<std::string>>(); }

CompositeKind kind_from(const Json& j) {
    auto k = parse_composite_kind(j.get<std::string>());
    if (!k) throw InvalidArgument("unknown composite kind " + j.get<std::string>());
    return *k;
}

}  // namespace

Json to_json(const EvolutionRecord& r) {
    Json j;
    j["ptype"] = std::string(to_string(r.ptype));
    if (!r.renames.empty()) {
        Json tables = Json::object();
        for (const auto& [from, to] : r.renames.tables()) tables[from] = to;
        Json columns = Json::array();
        for (const auto& [key, to] : r.renames.columns())
            columns.push_back({{"table", key.first}, {"column", key.second}, {"to", to}});
        j["renames"] = {{"tables", tables}, {"columns", columns}};
    }
    if (r.split_plan) {
        Json parts = Json::array();
        for (const auto& p : r.split_plan->parts) parts.push_back({{"name", p.name}, {"columns", p.columns}});
        j["split_plan"] = {{"source_table", r.split_plan->source_table}, {"parts", parts}, {"pk", r.split_plan->pk}};
    }
    if (r.merge_plan) {
        const MergePlan& m = *r.merge_plan;
        Json renames = Json::array();
        for (const auto& [key, to] : m.column_renames)
            renames.push_back({{"table", key.first}, {"column", key.second}, {"to", to}});
        Json links = Json::array();
        for (const auto& l : m.join_links) links.push_back(fk_json(l));
        j["merge_plan"] = {{"source_tables", m.source_tables}, {"merged_name", m.merged_name},
                           {"kept_pk_table", m.kept_pk_table},   {"kept_pk", m.kept_pk},
                           {"column_renames", renames},         {"join_links", links}};
    }
    if (!r.column_splits.empty()) {
        Json a = Json::array();
        for (const auto& s : r.column_splits)
            a.push_back({{"table", s.table},
                         {"column", s.column},
                         {"components", s.components},
                         {"delimiter", s.delimiter},
                         {"kind", std::string(to_string(s.kind))}});
        j["column_splits"] = a;
    }
    if (!r.column_merges.empty()) {
        Json a = Json::array();
        for (const auto& m : r.column_merges)
            a.push_back({{"table", m.table},
                         {"components", m.components},
                         {"merged", m.merged},
                         {"delimiter", m.delimiter},
                         {"kind", std::string(to_string(m.kind))}});
        j["column_merges"] = a;
    }
    if (!r.added_columns.empty()) {
        Json a = Json::array();
        for (const auto& c : r.added_columns)
            a.push_back({{"table", c.table}, {"column", column_json(c.column)}, {"position", c.position}});
        j["added_columns"] = a;
    }
    if (!r.added_tables.empty()) {
        Json a = Json::array();
        for (const auto& t : r.added_tables) {
            Json fks = Json::array();
            for (const auto& fk : t.foreign_keys) fks.push_back(fk_json(fk));
            a.push_back({{"table", table_json(t.table)}, {"foreign_keys", fks}});
        }
        j["added_tables"] = a;
    }
    if (!r.removed.empty()) {
        Json a = Json::array();
        for (const auto& x : r.removed) a.push_back({{"table", x.table}, {"column", x.column}});
        j["removed"] = a;
    }
    j["manipulated_count"] = r.manipulated_count;
    if (is_column_level(r.ptype)) {
        Json a = Json::array();
        for (const auto& [t, n] : r.manipulated_per_table) a.push_back({{"table", t}, {"count", n}});
        j["manipulated_per_table"] = a;
    }
    return j;
}

EvolutionRecord evolution_from_json(const Json& j) {
    try {
        EvolutionRecord r;
        auto type = parse_perturbation_type(j.at("ptype").get<std::string>());
        if (!type) throw InvalidArgument("unknown ptype " + j.at("ptype").get<std::string>());
        r.ptype = *type;
        if (j.contains("renames")) {
            for (const auto& [from, to] : j["renames"].at("tables").items()) r.renames.rename_table(from, to.get<std::string>());
            for (const auto& c : j["renames"].at("columns"))
                r.renames.rename_column(c.at("table").get<std::string>(), c.at("column").get<std::string>(),
                                        c.at("to").get<std::string>());
        }
        if (j.contains("split_plan")) {
            const Json& s = j["split_plan"];
            SplitPlan plan;
            plan.source_table = s.at("source_table").get<std::string>();
            for (const auto& p : s.at("parts")) plan.parts.push_back({p.at("name").get<std::string>(), strings(p.at("columns"))});
            plan.pk = strings(s.at("pk"));
            r.split_plan = std::move(plan);
        }
        if (j.contains("merge_plan")) {
            const Json& m = j["merge_plan"];
            MergePlan plan;
            plan.source_tables = strings(m.at("source_tables"));
            plan.merged_name = m.at("merged_name").get<std::string>();
            plan.kept_pk_table = m.at("kept_pk_table").get<std::string>();
            plan.kept_pk = strings(m.at("kept_pk"));
            for (const auto& c : m.at("column_renames"))
                plan.column_renames.push_back(
                    {{c.at("table").get<std::string>(), c.at("column").get<std::string>()}, c.at("to").get<std::string>()});
            for (const auto& l : m.at("join_links")) plan.join_links.push_back(fk_from(l));
            r.merge_plan = std::move(plan);
        }
        if (j.contains("column_splits"))
            for (const auto& s : j["column_splits"])
                r.column_splits.push_back({s.at("table").get<std::string>(), s.at("column").get<std::string>(),
                                           strings(s.at("components")), s.at("delimiter").get<std::string>(),
                                           kind_from(s.at("kind"))});
        if (j.contains("column_merges"))
            for (const auto& m : j["column_merges"])
                r.column_merges.push_back({m.at("table").get<std::string>(), strings(m.at("components")),
                                           m.at("merged").get<std::string>(), m.at("delimiter").get<std::string>(),
                                           kind_from(m.at("kind"))});
        if (j.contains("added_columns"))
            for (const auto& c : j["added_columns"])
                r.added_columns.push_back({c.at("table").get<std::string>(), column_from(c.at("column")),
                                           c.at("position").get<std::size_t>()});
        if (j.contains("added_tables"))
            for (const auto& t : j["added_tables"]) {
                AddedTable a{table_from(t.at("table")), {}};
                for (const auto& fk : t.at("foreign_keys")) a.foreign_keys.push_back(fk_from(fk));
                r.added_tables.push_back(std::move(a));
            }
        if (j.contains("removed"))
            for (const auto& x : j["removed"])
                r.removed.push_back({x.at("table").get<std::string>(), x.at("column").get<std::string>()});
        r.manipulated_count = j.at("manipulated_count").get<int>();
        if (j.contains("manipulated_per_table"))
            for (const auto& x : j["manipulated_per_table"])
                r.manipulated_per_table.push_back({x.at("table").get<std::string>(), x.at("count").get<int>()});
        return r;
    } catch (const Json::exception& e) {
        throw InvalidArgument(std::string("malformed evolution record: ") + e.what());
    }
}

Json to_json(const CorpusRecord& r) {
    Json j;
    j["instance_id"] = r.instance_id;
    j["db_id"] = r.db_id;
    j["nlq"] = r.nlq;
    j["schema_ddl"] = r.schema_ddl;
    j["gold"] = r.gold;
    j["ptype"] = r.ptype;
    j["evolution"] = r.evolution ? to_json(*r.evolution) : Json::object();
    j["needs_review"] = r.needs_review;
    return j;
}

Json to_json(const SkipRecord& s) {
    return {{"instance_id", s.instance_id}, {"ptype", s.ptype}, {"reason", s.reason}, {"detail", s.detail}};
}

CorpusRecord record_from_json(const Json& j) {
    try {
        CorpusRecord r;
        r.instance_id = j.at("instance_id").get<std::string>();
        r.db_id = j.at("db_id").get<std::string>();
        r.nlq = j.at("nlq").get<std::string>();
        r.schema_ddl = j.at("schema_ddl").get<std::string>();
        r.gold = j.at("gold").get<std::string>();
        r.ptype = j.at("ptype").get<std::string>();
        const Json& ev = j.at("evolution");
        if (!ev.is_object()) throw InvalidArgument("evolution must be an object");
        if (!ev.empty()) r.evolution = evolution_from_json(ev);
        r.needs_review = j.at("needs_review").get<bool>();
        return r;
    } catch (const Json::exception& e) {
        throw InvalidArgument(std::string("malformed corpus record: ") + e.what());
    }
}

// ---------------------------------------------------------------- records

CorpusRecord to_record(const Instance& in) {
    CorpusRecord r;
    r.instance_id = in.instance_id;
    r.db_id = in.db_id;
    r.nlq = in.nlq;
    r.schema_ddl = render_ddl(in.schema);
    r.gold = gold_text(in.gold);
    return r;
}

CorpusRecord to_record(const PerturbedInstance& p) {
    CorpusRecord r = to_record(p.evolved);
    r.ptype = std::string(to_string(p.record.ptype));
    r.evolution = p.record;
    r.needs_review = p.needs_review;
    return r;
}

Instance to_instance(const CorpusRecord& r) {
    Instance in;
    in.instance_id = r.instance_id;
    in.db_id = r.db_id;
    in.nlq = r.nlq;
    in.schema = parse_ddl(r.schema_ddl, r.db_id);
    in.gold = gold_from_text(r.gold);
    return in;
}

std::vector<std::string> check_record(const CorpusRecord& r) {
    std::vector<std::string> problems;
    if (r.instance_id.empty()) problems.push_back("empty instance_id");
    const bool original = r.ptype == "original";
    if (!original && !parse_perturbation_type(r.ptype)) problems.push_back("unknown ptype " + r.ptype);
    if (original && r.evolution) problems.push_back("original record carries an evolution");
    if (!original && (!r.evolution || to_string(r.evolution->ptype) != r.ptype))
        problems.push_back("evolution does not match ptype " + r.ptype);
    Schema schema;
    try {
        schema = parse_ddl(r.schema_ddl, r.db_id);
    } catch (const Error& e) {
        problems.push_back(std::string("schema_ddl: ") + e.what());
        return problems;
    }
    for (const auto& v : validate(schema))
        problems.push_back("schema_ddl: " + std::string(to_string(v.code)) + " at " + v.path);
    if (!parse_sentinel(r.gold)) {
        try {
            if (r.needs_review)
                sql::parse_query(r.gold);
            else
                parse_and_bind(r.gold, schema);
        } catch (const Error& e) {
            problems.push_back(std::string("gold: ") + e.what());
        }
    }
    return problems;
}

// ---------------------------------------------------------------- files

namespace {

template <typename T, typename Parse>
std::vector<T> read_lines(const std::filesystem::path& path, Parse parse) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open file", path.string(), 0);
    std::vector<T> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const Json j = Json::parse(line, nullptr, false);
        if (j.is_discarded()) throw FormatError("invalid JSON", path.string(), n);
        try {
            out.push_back(parse(j));
        } catch (const Error& e) {
            throw FormatError(e.what(), path.string(), n);
        }
    }
    return out;
}

template <typename T>
void write_lines(const std::filesystem::path& path, const std::vector<T>& items) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (const auto& item : items) out << to_json(item).dump() << '\n';
    if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

}  // namespace

std::vector<CorpusRecord> read_corpus(const std::filesystem::path& path) {
    return read_lines<CorpusRecord>(path, [](const Json& j) {
        CorpusRecord r = record_from_json(j);
        if (auto problems = check_record(r); !problems.empty()) throw InvalidArgument(problems.front());
        return r;
    });
}

void write_corpus(const std::filesystem::path& path, const std::vector<CorpusRecord>& records) {
    for (const auto& r : records)
        if (auto problems = check_record(r); !problems.empty())
            throw InvalidArgument("record " + r.instance_id + "/" + r.ptype + ": " + problems.front());
    write_lines(path, records);
}

void write_skips(const std::filesystem::path& path, const std::vector<SkipRecord>& skips) { write_lines(path, skips); }

std::vector<SkipRecord> read_skips(const std::filesystem::path& path) {
    return read_lines<SkipRecord>(path, [](const Json& j) {
        try {
            return SkipRecord{j.at("instance_id").get<std::string>(), j.at("ptype").get<std::string>(),
                              j.at("reason").get<std::string>(), j.at("detail").get<std::string>()};
        } catch (const Json::exception& e) {
            throw InvalidArgument(e.what());
        }
    });
}

// ---------------------------------------------------------------- ingest

Schema relevant_schema(const Schema& full, const std::set<std::string>& seeds, int depth) {
    std::set<std::string, ILess> keep;
    for (const auto& s : seeds)
        if (const Table* t = full.find_table(s)) keep.insert(t->name);
    for (int d = 0; d < depth; ++d) {
        std::set<std::string, ILess> next = keep;
        for (const auto& fk : full.foreign_keys) {
            if (keep.count(fk.child_table)) next.insert(fk.parent_table);
            if (keep.count(fk.parent_table)) next.insert(fk.child_table);
        }
        if (next.size() == keep.size()) break;
        keep = std::move(next);
    }
    Schema out = subschema(full, std::vector<std::string>(keep.begin(), keep.end()));
    out.db_id = full.db_id;
    return out;
}

namespace {

Json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open file", path.string(), 0);
    std::stringstream buf;
    buf << in.rdbuf();
    Json j = Json::parse(buf.str(), nullptr, false);
    if (j.is_discarded()) throw FormatError("invalid JSON", path.string(), 0);
    if (!j.is_array()) throw FormatError("expected a JSON array", path.string(), 0);
    return j;
}

// Drops foreign keys that break the schema invariants, reporting each.
void repair(Schema& s, std::vector<std::string>* warnings) {
    std::vector<ForeignKey> kept;
    for (const auto& fk : s.foreign_keys) {
        if (std::find(kept.begin(), kept.end(), fk) != kept.end()) continue;
        Schema probe = s;
        probe.foreign_keys = {fk};
        if (validate(probe).empty()) {
            kept.push_back(fk);
        } else if (warnings) {
            warnings->push_back(s.db_id + ": dropped foreign key " + fk.child_table + "." + fk.child_column + " -> " +
                                fk.parent_table + "." + fk.parent_column);
        }
    }
    s.foreign_keys = std::move(kept);
}

std::string upper_type(std::string t) {
    for (auto& c : t) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return t;
}

Schema manifest_schema(const Json& db, const std::string& file, std::size_t record) {
    try {
        Schema s;
        s.db_id = db.at("db_id").get<std::string>();
        const auto table_names = db.at("table_names_original").get<std::vector<std::string>>();
        const Json& cols = db.at("column_names_original");
        const Json& types = db.at("column_types");
        if (cols.size() != types.size()) throw FormatError("column_types length differs from columns", file, record);
        for (const auto& t : table_names) s.tables.push_back({t, {}, {}});
        // Flat column index -> (table, column name).
        std::vector<std::pair<int, std::string>> flat;
        for (std::size_t i = 0; i < cols.size(); ++i) {
            const int t = cols[i].at(0).get<int>();
            std::string name = cols[i].at(1).get<std::string>();
            flat.push_back({t, name});
            if (t < 0) continue;
            if (static_cast<std::size_t>(t) >= s.tables.size()) throw FormatError("column table index out of range", file, record);
            s.tables[static_cast<std::size_t>(t)].columns.push_back({name, upper_type(types[i].get<std::string>()), true});
        }
        auto column_at = [&](int idx) -> const std::pair<int, std::string>& {
            if (idx < 0 || static_cast<std::size_t>(idx) >= flat.size() || flat[static_cast<std::size_t>(idx)].first < 0)
                throw FormatError("column index " + std::to_string(idx) + " out of range", file, record);
            return flat[static_cast<std::size_t>(idx)];
        };
        for (const auto& pk : db.at("primary_keys")) {
            std::vector<int> members;
            if (pk.is_array())
                members = pk.get<std::vector<int>>();
            else
                members.push_back(pk.get<int>());
            if (members.empty()) continue;
            const int table = column_at(members.front()).first;
            Table& t = s.tables[static_cast<std::size_t>(table)];
            for (int m : members) {
                const auto& [mt, name] = column_at(m);
                if (mt != table) throw FormatError("composite primary key spans tables", file, record);
                t.primary_key.push_back(name);
                for (auto& c : t.columns)
                    if (iequals(c.name, name)) c.nullable = false;
            }
        }
        for (const auto& fk : db.at("foreign_keys")) {
            const auto& [ct, cc] = column_at(fk.at(0).get<int>());
            const auto& [pt, pc] = column_at(fk.at(1).get<int>());
            s.foreign_keys.push_back({s.tables[static_cast<std::size_t>(ct)].name, cc,
                                      s.tables[static_cast<std::size_t>(pt)].name, pc});
        }
        return s;
    } catch (const Json::exception& e) {
        throw FormatError(e.what(), file, record);
    }
}

std::string format_id(const Json& q, std::size_t index) {
    char buf[32];
    if (q.contains("question_id")) {
        const Json& id = q["question_id"];
        if (id.is_number_integer()) {
            std::snprintf(buf, sizeof buf, "q%06lld", static_cast<long long>(id.get<std::int64_t>()));
            return buf;
        }
        if (id.is_string()) return id.get<std::string>();
    }
    std::snprintf(buf, sizeof buf, "q%06zu", index);
    return buf;
}

}  // namespace

SchemaPool load_schemas(const std::filesystem::path& source, std::vector<std::string>* warnings) {
    SchemaPool pool;
    auto add = [&](Schema s) {
        repair(s, warnings);
        if (auto v = validate(s); !v.empty()) {
            if (warnings)
                warnings->push_back(s.db_id + ": skipped, " + std::string(to_string(v.front().code)) + " at " +
                                    v.front().path);
            return;
        }
        const std::string id = s.db_id;
        pool[id] = std::move(s);
    };
    if (std::filesystem::is_directory(source)) {
        std::vector<std::filesystem::path> files;
        for (const auto& e : std::filesystem::directory_iterator(source))
            if (e.path().extension() == ".sql") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            std::ifstream in(f);
            std::stringstream buf;
            buf << in.rdbuf();
            try {
                add(parse_ddl(buf.str(), f.stem().string()));
            } catch (const SyntaxError& e) {
                throw FormatError(e.what(), f.string(), e.line());
            } catch (const IntegrityError& e) {
                if (warnings) warnings->push_back(f.stem().string() + ": skipped, " + e.what());
            }
        }
        return pool;
    }
    const Json dbs = load_json(source);
    for (std::size_t i = 0; i < dbs.size(); ++i) add(manifest_schema(dbs[i], source.string(), i + 1));
    return pool;
}

IngestResult ingest_bird(const std::filesystem::path& questions, const std::filesystem::path& schema_source,
                         int closure_depth) {
    IngestResult out;
    out.databases = load_schemas(schema_source, &out.warnings);
    const Json qs = load_json(questions);
    std::set<std::string> seen;
    for (std::size_t i = 0; i < qs.size(); ++i) {
        const Json& q = qs[i];
        std::string db_id, nlq, sql;
        try {
            db_id = q.at("db_id").get<std::string>();
            nlq = q.at("question").get<std::string>();
            sql = q.contains("SQL") ? q.at("SQL").get<std::string>() : q.at("query").get<std::string>();
        } catch (const Json::exception& e) {
            throw FormatError(e.what(), questions.string(), i + 1);
        }
        const std::string id = format_id(q, i);
        if (!seen.insert(id).second) throw FormatError("duplicate question id " + id, questions.string(), i + 1);
        auto db = out.databases.find(db_id);
        if (db == out.databases.end()) {
            out.rejects.push_back({id, db_id, "UnknownDatabase", "no schema for database " + db_id});
            continue;
        }
        try {
            const SqlRefs refs = extract_refs(sql, db->second);
            Instance in;
            in.instance_id = id;
            in.db_id = db_id;
            in.nlq = nlq;
            in.schema = relevant_schema(db->second, refs.tables, closure_depth);
            in.gold = sql;
            parse_and_bind(sql, in.schema);
            out.instances.push_back(std::move(in));
        } catch (const Error& e) {
            out.rejects.push_back({id, db_id, e.code(), e.what()});
        }
    }
    std::sort(out.instances.begin(), out.instances.end(),
              [](const Instance& a, const Instance& b) { return a.instance_id < b.instance_id; });
    return out;
}

// ---------------------------------------------------------------- pipelines

PerturbOutput run_perturb(const std::vector<Instance>& instances, const std::vector<PerturbationType>& types,
                          std::uint64_t seed, Synthesizer& synth, const SchemaPool& pool, const PerturbConfig& cfg,
                          unsigned threads) {
    std::vector<std::size_t> order(instances.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return instances[a].instance_id < instances[b].instance_id; });

    struct Slot {
        std::optional<CorpusRecord> record;
        std::optional<SkipRecord> skip;
    };
    const std::size_t jobs = instances.size() * types.size();
    std::vector<Slot> slots(jobs);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t j; (j = next.fetch_add(1)) < jobs;) {
            const Instance& in = instances[order[j / types.size()]];
            const PerturbationType type = types[j % types.size()];
            const std::string name(to_string(type));
            auto rng = make_stream(seed, in.instance_id, name);
            try {
                slots[j].record = to_record(perturb(in, type, cfg, synth, pool, rng));
            } catch (const Error& e) {
                slots[j].skip = SkipRecord{in.instance_id, name, e.code(), e.what()};
            } catch (const std::exception& e) {
                slots[j].skip = SkipRecord{in.instance_id, name, "InternalError", e.what()};
            }
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(jobs, 1)));
    std::vector<std::thread> workers;
    for (unsigned t = 1; t < threads; ++t) workers.emplace_back(work);
    work();
    for (auto& w : workers) w.join();

    PerturbOutput out;
    for (auto& s : slots) {
        if (s.record) out.records.push_back(std::move(*s.record));
        if (s.skip) out.skips.push_back(std::move(*s.skip));
    }
    return out;
}

std::vector<CorpusRecord> emit_training_mix(const std::vector<CorpusRecord>& original,
                                            const std::vector<std::vector<CorpusRecord>>& perturbed,
                                            std::uint64_t seed, bool include_oos) {
    std::vector<CorpusRecord> out = original;
    for (const auto& set : perturbed)
        for (const auto& r : set) {
            const auto type = parse_perturbation_type(r.ptype);
            if (!include_oos && type && is_refusal_type(*type)) continue;
            out.push_back(r);
        }
    auto rng = make_stream(seed, "training_mix");
    shuffle(out, rng);
    return out;
}

Database record_database(const CorpusRecord& record, std::uint64_t seed, std::size_t rows_per_table) {
    PopulateConfig cfg;
    cfg.rows_per_table = rows_per_table;
    cfg.seed = mix(seed, stable_hash(record.instance_id));
    return populate(parse_ddl(record.schema_ddl, record.db_id), cfg);
}

bool gold_executes(const CorpusRecord& record, std::uint64_t seed) {
    if (parse_sentinel(record.gold)) return false;
    try {
        execute(record.gold, record_database(record, seed));
        return true;
    } catch (const Error&) {
        return false;
    }
}

}  // namespace schemashift
