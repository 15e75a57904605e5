#pragma once

// Named verification suites and their machine-readable reports.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace tubekit {

enum class ReportFormat { Json, Csv };

struct SuiteConfig {
    std::string manifold;              // catalog name or manifest path
    std::string suite = "all";
    std::optional<double> tol;         // replaces every upper-bound tolerance
    std::size_t samples = 50;
    std::uint64_t seed = 1;
    std::optional<std::string> out;
    ReportFormat format = ReportFormat::Json;
    friend bool operator==(const SuiteConfig&, const SuiteConfig&) = default;
};

// sasaki, h-cases, deformation, kaehler-tube, hyper, classify, all
const std::vector<std::string>& suite_ids();
// Throws UnknownSuite.
void validate_suite(const std::string& id);

enum class Bound { Max, Min };  // residual ≤ tolerance, or residual ≥ tolerance

struct CheckRecord {
    std::string suite;
    std::string name;
    std::string anchor;   // which formula or statement the check exercises
    double residual = 0.0;
    double tolerance = 0.0;
    Bound bound = Bound::Max;
    bool pass = false;
    friend bool operator==(const CheckRecord&, const CheckRecord&) = default;
};

// Plot-ready sample of a deformed component along a transverse ray.
struct SeriesPoint {
    std::string series;
    std::string region;
    double t = 0.0;
    double value = 0.0;
    double residual = 0.0;  // |deformed − source| at the same point
    friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

// Measured quantity that is reported but not asserted.
struct Note {
    std::string suite;
    std::string name;
    double value = 0.0;
    std::string detail;
    friend bool operator==(const Note&, const Note&) = default;
};

struct RunReport {
    std::string suite;
    std::string manifold;
    std::vector<CheckRecord> records;
    std::vector<SeriesPoint> series;
    std::vector<Note> notes;
    nlohmann::json classification;  // null unless the classify suite ran
    double wall_time = 0.0;
    std::string engine_version;
    SuiteConfig config;

    bool pass() const;
    friend bool operator==(const RunReport&, const RunReport&) = default;
};

std::string engine_version();

// Throws ManifestError, UnknownSuite, InvariantViolation. Writes cfg.out when set.
RunReport run_suite(const SuiteConfig& cfg);

struct GHClassReport;
nlohmann::json to_json(const GHClassReport& report);
nlohmann::json to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& j);
std::string to_csv(const RunReport& report);
ReportFormat parse_format(const std::string& s);
// Throws IOError.
void export_table(const RunReport& report, ReportFormat format, const std::filesystem::path& path);

}  // namespace tubekit
