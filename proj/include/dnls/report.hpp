#ifndef DNLS_REPORT_HPP
#define DNLS_REPORT_HPP

#include <filesystem>
#include <string>

#include "dnls/estimates.hpp"

namespace dnls {

// Reports are written atomically (temp file + rename) so partial output
// never lands under the final name. Double formatting is %.17g throughout,
// which round-trips and keeps reruns byte-identical.

void atomic_write(const std::filesystem::path& path, const std::string& content);

std::string estimate_csv(const EstimateReport& report);

// JSON summary, schema 1: inequality, ratios, refinement trend, pass flag,
// and the resolved configuration for provenance.
std::string estimate_json(const EstimateReport& report, const std::string& extra_config = "");

void write_estimate_report(const std::filesystem::path& out_dir, const EstimateReport& report,
                           const std::string& extra_config = "");

std::string format_double(double v);

} // namespace dnls

#endif
