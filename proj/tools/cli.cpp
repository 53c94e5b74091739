#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>

#include "schemashift/corpus.hpp"
#include "schemashift/ddl.hpp"
#include "schemashift/errors.hpp"
#include "schemashift/report.hpp"

namespace schemashift::cli {

namespace {

struct Globals {
    std::uint64_t seed = 1;
    std::string backend = "mock";
    std::vector<std::string> types;
    std::string out;
    RemoteConfig remote;
};

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

std::string sibling(const std::string& out, const std::string& suffix) {
    std::filesystem::path p(out);
    const std::string stem = p.extension() == ".jsonl" ? p.replace_extension().string() : out;
    return stem + suffix;
}

std::vector<PerturbationType> resolve_types(const std::vector<std::string>& names) {
    std::vector<PerturbationType> out;
    if (names.empty() || (names.size() == 1 && names[0] == "all"))
        return {std::begin(kAllPerturbationTypes), std::end(kAllPerturbationTypes)};
    for (const auto& n : names) {
        if (n.empty()) continue;
        const auto t = parse_perturbation_type(n);
        if (!t) throw InvalidArgument("unknown perturbation type '" + n + "'");
        if (std::find(out.begin(), out.end(), *t) == out.end()) out.push_back(*t);
    }
    return out;
}

std::unique_ptr<Synthesizer> make_synth(const Globals& g) {
    if (g.backend == "mock") return std::make_unique<MockSynthesizer>(g.seed);
    if (!std::getenv(g.remote.api_key_env.c_str()))
        throw BackendUnavailable("environment variable " + g.remote.api_key_env + " is not set");
    return std::make_unique<RemoteSynthesizer>(g.remote);
}

// Same-database tables seen anywhere in the corpus, for add_tables.
SchemaPool pool_from_instances(const std::vector<Instance>& instances) {
    SchemaPool pool;
    for (const auto& inst : instances) {
        Schema& s = pool[inst.db_id];
        s.db_id = inst.db_id;
        for (const auto& t : inst.schema.tables)
            if (!s.has_table(t.name)) s.tables.push_back(t);
        for (const auto& fk : inst.schema.foreign_keys)
            if (std::find(s.foreign_keys.begin(), s.foreign_keys.end(), fk) == s.foreign_keys.end())
                s.foreign_keys.push_back(fk);
    }
    for (auto& [_, s] : pool) {
        prune_dangling_fks(s);
        canonicalize_fk_order(s);
    }
    return pool;
}

std::string rejects_jsonl(const std::vector<IngestReject>& rejects) {
    std::string out;
    for (const auto& r : rejects) {
        Json j;
        j["instance_id"] = r.instance_id;
        j["db_id"] = r.db_id;
        j["reason"] = r.reason;
        j["detail"] = r.detail;
        out += j.dump() + "\n";
    }
    return out;
}

std::string safe_file_name(std::string s) {
    for (char& c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') c = '_';
    return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Schema evolution and text-to-SQL evaluation toolkit", "schemashift"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--seed", g.seed, "Seed for every random choice")->capture_default_str();
    app.add_option("--backend", g.backend, "Proposal backend")
        ->check(CLI::IsMember({"mock", "remote"}))
        ->capture_default_str();
    app.add_option("--types", g.types, "Perturbation types, comma separated, or 'all'")->delimiter(',');
    app.add_option("--out", g.out, "Output file (or directory for populate)");
    app.add_option("--endpoint", g.remote.base_url, "Remote backend base URL")->capture_default_str();
    app.add_option("--model", g.remote.model, "Remote backend model")->capture_default_str();
    app.add_option("--key-env", g.remote.api_key_env, "Variable holding the API key")->capture_default_str();

    auto* ingest = app.add_subcommand("ingest", "Read a BIRD-style questions file into a corpus");
    std::string questions, schemas;
    int depth = 1;
    ingest->add_option("--questions", questions, "Questions JSON")->required()->check(CLI::ExistingFile);
    ingest->add_option("--schemas", schemas, "Tables manifest or directory of DDL dumps")
        ->required()
        ->check(CLI::ExistingPath);
    ingest->add_option("--depth", depth, "Foreign-key closure depth of the relevant schema")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();

    auto* perturb = app.add_subcommand("perturb", "Apply perturbations to a corpus of originals");
    std::string corpus, pool_source;
    unsigned threads = 0;
    perturb->add_option("--corpus", corpus, "Corpus of originals")->required()->check(CLI::ExistingFile);
    perturb->add_option("--schemas", pool_source, "Full database schemas for add_tables")
        ->check(CLI::ExistingPath);
    perturb->add_option("--threads", threads, "Worker threads (0 = hardware)");

    auto* stats = app.add_subcommand("stats", "Corpus statistics per perturbation type");
    std::string train, eval, json_out;
    stats->add_option("--train", train, "Training corpus")->check(CLI::ExistingFile);
    stats->add_option("--eval", eval, "Evaluation corpus")->check(CLI::ExistingFile);
    stats->add_option("--json", json_out, "Also write the rows as JSON");

    auto* emit = app.add_subcommand("emit-train", "Shuffle originals and perturbed corpora into one");
    std::string original;
    std::vector<std::string> perturbed;
    bool no_oos = false;
    emit->add_option("--original", original, "Corpus of originals")->required()->check(CLI::ExistingFile);
    emit->add_option("--perturbed", perturbed, "Perturbed corpora")->check(CLI::ExistingFile);
    emit->add_flag("--no-oos", no_oos, "Drop remove_columns_in_sql and remove_tables records");

    auto* populate_cmd = app.add_subcommand("populate", "Write a SQL dump of each record's database");
    std::size_t rows = 16;
    populate_cmd->add_option("--corpus", corpus, "Corpus")->required()->check(CLI::ExistingFile);
    populate_cmd->add_option("--rows", rows, "Rows per table")->capture_default_str();

    auto* score = app.add_subcommand("score", "Score predictions against a corpus");
    std::string predictions;
    score->add_option("--corpus", corpus, "Corpus")->required()->check(CLI::ExistingFile);
    score->add_option("--predictions", predictions, "Predictions file")->required()->check(CLI::ExistingFile);

    auto* validate_cmd = app.add_subcommand("validate", "Check every record of a corpus");
    validate_cmd->add_option("--corpus", corpus, "Corpus")->required()->check(CLI::ExistingFile);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInvalidConfig;
    }

    auto need_out = [&](const char* verb) {
        if (g.out.empty()) throw InvalidArgument(std::string(verb) + " requires --out");
    };

    try {
        if (ingest->parsed()) {
            need_out("ingest");
            const IngestResult r = ingest_bird(questions, schemas, depth);
            for (const auto& w : r.warnings) err << "warning: " << w << "\n";
            std::vector<CorpusRecord> records;
            for (const auto& inst : r.instances) records.push_back(to_record(inst));
            write_corpus(g.out, records);
            write_text(sibling(g.out, ".rejects.jsonl"), rejects_jsonl(r.rejects));
            out << records.size() << " instances, " << r.rejects.size() << " rejects\n";
        } else if (perturb->parsed()) {
            need_out("perturb");
            const auto types = resolve_types(g.types);
            auto synth = make_synth(g);
            std::vector<Instance> instances;
            for (const auto& rec : read_corpus(corpus)) {
                if (rec.ptype != "original") throw InvalidArgument("perturb expects originals, got " + rec.ptype);
                instances.push_back(to_instance(rec));
            }
            const SchemaPool pool = pool_source.empty() ? pool_from_instances(instances) : load_schemas(pool_source);
            const PerturbOutput r = run_perturb(instances, types, g.seed, *synth, pool, {}, threads);
            write_corpus(g.out, r.records);
            write_skips(sibling(g.out, ".skips.jsonl"), r.skips);
            out << r.records.size() << " records, " << r.skips.size() << " skips\n";
        } else if (stats->parsed()) {
            if (train.empty() && eval.empty()) throw InvalidArgument("stats needs --train or --eval");
            const auto tr = train.empty() ? std::vector<CorpusRecord>{} : read_corpus(train);
            const auto ev = eval.empty() ? std::vector<CorpusRecord>{} : read_corpus(eval);
            const auto table = compute_stats(tr, ev, g.seed);
            const std::string text = render_stats(table);
            if (g.out.empty())
                out << text;
            else
                write_text(g.out, text);
            if (!json_out.empty()) write_text(json_out, stats_json(table));
        } else if (emit->parsed()) {
            need_out("emit-train");
            std::vector<std::vector<CorpusRecord>> sets;
            for (const auto& p : perturbed) sets.push_back(read_corpus(p));
            const auto mix = emit_training_mix(read_corpus(original), sets, g.seed, !no_oos);
            write_corpus(g.out, mix);
            out << mix.size() << " records\n";
        } else if (populate_cmd->parsed()) {
            need_out("populate");
            std::filesystem::create_directories(g.out);
            std::size_t n = 0;
            for (const auto& rec : read_corpus(corpus)) {
                const Database db = record_database(rec, g.seed, rows);
                const auto name = safe_file_name(rec.instance_id + "." + rec.ptype) + ".sql";
                write_text(std::filesystem::path(g.out) / name, export_sql_dump(db));
                ++n;
            }
            out << n << " dumps\n";
        } else if (score->parsed()) {
            const auto records = read_corpus(corpus);
            const MetricReport report = aggregate(score_records(records, read_predictions(predictions), g.seed));
            const std::string text = report_text(report);
            if (g.out.empty()) {
                out << text;
            } else {
                write_text(sibling(g.out, ".jsonl"), report_jsonl(report));
                write_text(sibling(g.out, ".txt"), text);
            }
        } else if (validate_cmd->parsed()) {
            std::ifstream in(corpus);
            if (!in) throw std::runtime_error("cannot open " + corpus);
            std::string line;
            std::size_t n = 0, bad = 0;
            while (std::getline(in, line)) {
                ++n;
                if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
                std::vector<std::string> problems;
                try {
                    problems = check_record(record_from_json(Json::parse(line)));
                } catch (const std::exception& e) {
                    problems.push_back(e.what());
                }
                for (const auto& p : problems) out << corpus << ":" << n << ": " << p << "\n";
                bad += !problems.empty();
            }
            out << (n - bad) << " valid, " << bad << " invalid\n";
            if (bad) return kIoFailure;
        }
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return kInvalidConfig;
    } catch (const BackendUnavailable& e) {
        err << "error: " << e.what() << "\n";
        return kInvalidConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kIoFailure;
    }
    return kOk;
}

}  // namespace schemashift::cli
