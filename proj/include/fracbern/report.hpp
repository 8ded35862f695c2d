#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace fracbern {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

/// One result line. Fields that do not apply to a task are NaN; they print as
/// empty CSV cells and JSON nulls.
struct ReportRow {
    std::string task;
    double alpha = 0.0;
    int dim = 0;
    double q = 0.0;
    double N = 0.0;
    double t = 0.0;
    std::string quantity;
    double value = 0.0;
    double error_bound = 0.0;
    std::string witness;
    std::uint64_t seed = 0;

    bool operator==(const ReportRow&) const;
};

struct Provenance {
    std::string bump_profile;
    std::size_t grid_n = 0;
    double box_len = 1.0;
    std::string tool_version = kToolVersion;

    bool operator==(const Provenance&) const = default;
};

struct ReportTable {
    Provenance provenance;
    std::vector<ReportRow> rows;
};

enum class ReportFormat { csv, json };

ReportFormat report_format_from_string(const std::string& name);
/// csv for *.csv, json for *.json; throws otherwise.
ReportFormat report_format_from_path(const std::string& path);

/// Column order of the CSV body.
inline constexpr const char* kReportColumns = "task,alpha,dim,q,N,t,quantity,value,error_bound,witness,seed";

std::string bump_provenance_id();

void write_csv(std::ostream& out, const ReportTable& table);
void write_json(std::ostream& out, const ReportTable& table);
ReportTable read_csv(std::istream& in);
ReportTable read_json(std::istream& in);

/// Writes the table to `path`; I/O failures name the path.
void emit_report(const ReportTable& table, ReportFormat format, const std::string& path);
ReportTable load_report(const std::string& path);

/// Shortest-to-read form that still round-trips: printf %.17g.
std::string format_double(double v);

} // namespace fracbern
