#include "fracbern/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "fracbern/bump.hpp"

namespace fracbern {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool same(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + '"';
}

std::string csv_number(double v) { return std::isnan(v) ? std::string() : format_double(v); }

// JSON has no infinities; they travel as the strings "inf" and "-inf".
std::string json_number(double v) {
    if (std::isnan(v))
        return "null";
    return std::isinf(v) ? "\"" + format_double(v) + "\"" : format_double(v);
}

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

// Splits one CSV record; quoted fields may not span lines.
std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted)
        throw std::runtime_error("unterminated quoted CSV field");
    out.push_back(std::move(cur));
    return out;
}

double parse_number(const std::string& s) {
    if (s.empty())
        return kNaN;
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size())
        throw std::runtime_error("malformed number '" + s + "'");
    return v;
}

double json_to_double(const nlohmann::json& j) {
    if (j.is_null())
        return kNaN;
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf")
            return std::numeric_limits<double>::infinity();
        if (s == "-inf")
            return -std::numeric_limits<double>::infinity();
        throw std::runtime_error("malformed number '" + s + "'");
    }
    return j.get<double>();
}

} // namespace

bool ReportRow::operator==(const ReportRow& o) const {
    return task == o.task && same(alpha, o.alpha) && dim == o.dim && same(q, o.q) && same(N, o.N) && same(t, o.t) &&
           quantity == o.quantity && same(value, o.value) && same(error_bound, o.error_bound) &&
           witness == o.witness && seed == o.seed;
}

std::string format_double(double v) {
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string bump_provenance_id() {
    const BumpProfile phi = make_bump(BumpKind::lp_phi);
    const BumpProfile phi1 = make_bump(BumpKind::perturb_phi1);
    return std::string(BumpProfile::transition_id) + ";lp_phi=[" + format_double(phi.inner_radius) + "," +
           format_double(phi.outer_radius) + "];perturb_phi1=[" + format_double(phi1.inner_radius) + "," +
           format_double(phi1.outer_radius) + "]";
}

ReportFormat report_format_from_string(const std::string& name) {
    if (name == "csv")
        return ReportFormat::csv;
    if (name == "json")
        return ReportFormat::json;
    throw std::invalid_argument("unknown report format '" + name + "'");
}

ReportFormat report_format_from_path(const std::string& path) {
    const auto dot = path.rfind('.');
    if (dot == std::string::npos)
        throw std::invalid_argument("cannot infer report format of '" + path + "'");
    return report_format_from_string(path.substr(dot + 1));
}

void write_csv(std::ostream& out, const ReportTable& table) {
    const Provenance& p = table.provenance;
    out << "# tool_version=" << p.tool_version << '\n'
        << "# bump_profile=" << p.bump_profile << '\n'
        << "# grid_n=" << p.grid_n << '\n'
        << "# box_len=" << format_double(p.box_len) << '\n'
        << kReportColumns << '\n';
    for (const auto& r : table.rows) {
        out << csv_field(r.task) << ',' << csv_number(r.alpha) << ',' << r.dim << ',' << csv_number(r.q) << ','
            << csv_number(r.N) << ',' << csv_number(r.t) << ',' << csv_field(r.quantity) << ','
            << csv_number(r.value) << ',' << csv_number(r.error_bound) << ',' << csv_field(r.witness) << ','
            << r.seed << '\n';
    }
}

void write_json(std::ostream& out, const ReportTable& table) {
    const Provenance& p = table.provenance;
    out << "{\n  \"schema_version\": " << kReportSchemaVersion << ",\n  \"provenance\": {"
        << "\"tool_version\": " << json_string(p.tool_version) << ", \"bump_profile\": " << json_string(p.bump_profile)
        << ", \"grid_n\": " << p.grid_n << ", \"box_len\": " << json_number(p.box_len) << "},\n  \"rows\": [";
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const ReportRow& r = table.rows[i];
        out << (i ? ",\n    " : "\n    ") << "{\"task\": " << json_string(r.task)
            << ", \"alpha\": " << json_number(r.alpha) << ", \"dim\": " << r.dim << ", \"q\": " << json_number(r.q)
            << ", \"N\": " << json_number(r.N) << ", \"t\": " << json_number(r.t)
            << ", \"quantity\": " << json_string(r.quantity) << ", \"value\": " << json_number(r.value)
            << ", \"error_bound\": " << json_number(r.error_bound) << ", \"witness\": " << json_string(r.witness)
            << ", \"seed\": " << r.seed << "}";
    }
    out << (table.rows.empty() ? "]\n}\n" : "\n  ]\n}\n");
}

ReportTable read_csv(std::istream& in) {
    ReportTable table;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                continue;
            const std::string key = line.substr(2, eq - 2), val = line.substr(eq + 1);
            if (key == "tool_version")
                table.provenance.tool_version = val;
            else if (key == "bump_profile")
                table.provenance.bump_profile = val;
            else if (key == "grid_n")
                table.provenance.grid_n = std::stoul(val);
            else if (key == "box_len")
                table.provenance.box_len = parse_number(val);
            continue;
        }
        if (!header_seen) {
            if (line != kReportColumns)
                throw std::runtime_error("unexpected CSV header '" + line + "'");
            header_seen = true;
            continue;
        }
        const auto f = split_csv(line);
        if (f.size() != 11)
            throw std::runtime_error("CSV row has " + std::to_string(f.size()) + " fields, expected 11");
        ReportRow r;
        r.task = f[0];
        r.alpha = parse_number(f[1]);
        r.dim = std::stoi(f[2]);
        r.q = parse_number(f[3]);
        r.N = parse_number(f[4]);
        r.t = parse_number(f[5]);
        r.quantity = f[6];
        r.value = parse_number(f[7]);
        r.error_bound = parse_number(f[8]);
        r.witness = f[9];
        r.seed = std::stoull(f[10]);
        table.rows.push_back(std::move(r));
    }
    if (!header_seen)
        throw std::runtime_error("CSV report has no column header");
    return table;
}

ReportTable read_json(std::istream& in) {
    const nlohmann::json doc = nlohmann::json::parse(in);
    if (doc.value("schema_version", 0) != kReportSchemaVersion)
        throw std::runtime_error("unsupported report schema_version");
    ReportTable table;
    const auto& p = doc.at("provenance");
    table.provenance.tool_version = p.at("tool_version").get<std::string>();
    table.provenance.bump_profile = p.at("bump_profile").get<std::string>();
    table.provenance.grid_n = p.at("grid_n").get<std::size_t>();
    table.provenance.box_len = json_to_double(p.at("box_len"));
    for (const auto& j : doc.at("rows")) {
        ReportRow r;
        r.task = j.at("task").get<std::string>();
        r.alpha = json_to_double(j.at("alpha"));
        r.dim = j.at("dim").get<int>();
        r.q = json_to_double(j.at("q"));
        r.N = json_to_double(j.at("N"));
        r.t = json_to_double(j.at("t"));
        r.quantity = j.at("quantity").get<std::string>();
        r.value = json_to_double(j.at("value"));
        r.error_bound = json_to_double(j.at("error_bound"));
        r.witness = j.at("witness").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        table.rows.push_back(std::move(r));
    }
    return table;
}

void emit_report(const ReportTable& table, ReportFormat format, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open report file '" + path + "' for writing");
    if (format == ReportFormat::csv)
        write_csv(out, table);
    else
        write_json(out, table);
    out.flush();
    if (!out)
        throw std::runtime_error("failed writing report file '" + path + "'");
}

ReportTable load_report(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open report file '" + path + "'");
    try {
        return report_format_from_path(path) == ReportFormat::csv ? read_csv(in) : read_json(in);
    } catch (const std::exception& e) {
        throw std::runtime_error("'" + path + "': " + e.what());
    }
}

} // namespace fracbern
