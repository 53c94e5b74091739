#pragma once

#include <string>

#include "schemashift/instance.hpp"
#include "schemashift/schema.hpp"

namespace schemashift::testkit {

std::string fixture_path(const std::string& name);
std::string slurp(const std::string& path);

// patient, diagnosis and billing.
Schema clinic();
// The clinic subset named by `tables`, with `gold` as SQL.
Instance clinic_instance(const std::string& gold, const std::vector<std::string>& tables = {"patient", "diagnosis"});

inline constexpr const char* kClinicGold =
    "SELECT COUNT(DISTINCT T1.patient_id) FROM patient AS T1 JOIN diagnosis AS T2 ON T1.patient_id = "
    "T2.patient_id WHERE T2.severity > 3";

}  // namespace schemashift::testkit
