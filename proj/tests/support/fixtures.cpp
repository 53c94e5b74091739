#include "fixtures.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "schemashift/ddl.hpp"

namespace schemashift::testkit {

std::string fixture_path(const std::string& name) { return std::string(SCHEMASHIFT_FIXTURES) + "/" + name; }

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Schema clinic() { return parse_ddl(slurp(fixture_path("clinic.sql")), "clinic"); }

Instance clinic_instance(const std::string& gold, const std::vector<std::string>& tables) {
    Instance in;
    in.instance_id = "c1";
    in.db_id = "clinic";
    in.nlq = "How many patients have a severe diagnosis?";
    in.schema = subschema(clinic(), tables);
    in.gold = gold;
    return in;
}

}  // namespace schemashift::testkit
