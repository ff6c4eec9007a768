#pragma once

#include <string>

#include <json.hpp>

#include "rfa/experiments.hpp"

namespace rfa {

// Machine-readable report. Deterministic for a given report except for the
// "generated_at" field.
nlohmann::ordered_json report_to_json(const ExperimentReport& report);

void write_report_json(const ExperimentReport& report, const std::string& path);

// Aligned-column text table of per-model metrics.
std::string report_table(const ExperimentReport& report);
void write_report_table(const ExperimentReport& report, const std::string& path);

// Sweep curve rows as CSV: param,value,label,mean_r2.
void write_curves_csv(const ExperimentReport& report, const std::string& path);

}  // namespace rfa
