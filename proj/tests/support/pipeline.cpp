#include "pipeline.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "fixtures.hpp"
#include "schemashift/corpus.hpp"

namespace schemashift::testkit {

namespace {

void call(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    if (code != cli::kOk) {
        std::string joined;
        for (const auto& a : args) joined += a + " ";
        throw std::runtime_error(joined + "exited " + std::to_string(code) + ": " + err.str());
    }
}

}  // namespace

std::map<std::string, std::string> run_pipeline(const std::filesystem::path& dir, std::uint64_t seed) {
    namespace fs = std::filesystem;
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string s = std::to_string(seed);
    const auto at = [&](const char* name) { return (dir / name).string(); };

    call({"--seed", s, "--out", at("original.jsonl"), "ingest", "--questions", fixture_path("mini_questions.json"),
          "--schemas", fixture_path("mini_tables.json")});
    call({"--seed", s, "--types", "all", "--out", at("eval.jsonl"), "perturb", "--corpus", at("original.jsonl"),
          "--schemas", fixture_path("mini_tables.json"), "--threads", "4"});
    call({"--seed", s, "--out", at("train.jsonl"), "emit-train", "--original", at("original.jsonl"), "--perturbed",
          at("eval.jsonl")});
    call({"--seed", s, "--out", at("stats.txt"), "stats", "--train", at("train.jsonl"), "--eval", at("eval.jsonl"),
          "--json", at("stats.json")});

    // Gold for even lines, nothing for odd ones.
    {
        std::ofstream preds(at("predictions.jsonl"));
        std::size_t i = 0;
        for (const auto& r : read_corpus(at("eval.jsonl"))) {
            if (i++ % 2) continue;
            nlohmann::ordered_json j;
            j["instance_id"] = r.instance_id;
            j["ptype"] = r.ptype;
            j["prediction"] = r.gold;
            preds << j.dump() << "\n";
        }
    }
    call({"--seed", s, "--out", at("scores.jsonl"), "score", "--corpus", at("eval.jsonl"), "--predictions",
          at("predictions.jsonl")});

    std::map<std::string, std::string> files;
    for (const auto& e : fs::directory_iterator(dir)) files[e.path().filename().string()] = slurp(e.path().string());
    return files;
}

}  // namespace schemashift::testkit
