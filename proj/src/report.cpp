#include "dnls/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace dnls {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open " + tmp.string());
        os << content;
        if (!os.flush()) throw IoError("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename to " + path.string() + " failed: " + ec.message());
}

std::string estimate_csv(const EstimateReport& report) {
    std::ostringstream os;
    os << "member,params,lhs,rhs,ratio,included\n";
    for (const MemberResult& m : report.members) {
        os << m.id << ",\"" << m.params << "\"," << format_double(m.lhs) << ","
           << format_double(m.rhs) << ","
           << (m.included ? format_double(m.ratio()) : std::string("nan")) << ","
           << (m.included ? 1 : 0) << "\n";
    }
    return os.str();
}

std::string estimate_json(const EstimateReport& report, const std::string& extra_config) {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["inequality"] = report.inequality;
    j["config"] = report.config;
    if (!extra_config.empty()) j["run_config"] = extra_config;
    j["members"] = report.members.size();
    int included = 0;
    for (const MemberResult& m : report.members) included += m.included ? 1 : 0;
    j["included"] = included;
    j["max_ratio"] = report.max_ratio;
    j["median_ratio"] = report.median_ratio;
    j["refinement"] = {{"base_max", report.trend.base_max},
                       {"refined_max", report.trend.refined_max},
                       {"growth", report.trend.growth}};
    j["pass"] = report.pass;
    return j.dump(2) + "\n";
}

void write_estimate_report(const std::filesystem::path& out_dir, const EstimateReport& report,
                           const std::string& extra_config) {
    atomic_write(out_dir / (report.inequality + ".csv"), estimate_csv(report));
    atomic_write(out_dir / (report.inequality + ".json"), estimate_json(report, extra_config));
}

} // namespace dnls
