#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

namespace schemashift::testkit {

// ingest -> perturb -> emit-train -> stats -> score on the bundled fixtures,
// all through cli::run, writing into `dir`. Returns every output file by
// name. Throws std::runtime_error when a verb exits non-zero.
std::map<std::string, std::string> run_pipeline(const std::filesystem::path& dir, std::uint64_t seed);

}  // namespace schemashift::testkit
