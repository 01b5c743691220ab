#include "dmglue/report.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dmglue/errors.hpp"

namespace dmglue {

bool operator==(const ReportPoint& a, const ReportPoint& b) {
    return a.param == b.param && a.value == b.value;
}

bool operator==(const ReportMeta& a, const ReportMeta& b) {
    return a.seed == b.seed && a.grid == b.grid && a.p == b.p &&
           a.delta == b.delta && a.version == b.version && a.note == b.note;
}

bool operator==(const ConvergenceReport& a, const ConvergenceReport& b) {
    return a.quantity == b.quantity && a.points == b.points &&
           a.slope == b.slope && a.expected_slope == b.expected_slope &&
           a.tolerance == b.tolerance && a.residual == b.residual &&
           a.one_sided == b.one_sided && a.pass == b.pass && a.meta == b.meta;
}

namespace {

// 17 significant digits round-trip every finite double exactly
std::string fmt17(double x) {
    if (!std::isfinite(x)) throw ReportError("report contains a nonfinite value");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_double(const std::string& s) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const double x = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw ReportError("malformed number: '" + s + "'");
    return x;
}

std::uint64_t parse_seed(const std::string& s) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const unsigned long long x = std::strtoull(begin, &end, 10);
    if (end == begin || *end != '\0')
        throw ReportError("malformed seed: '" + s + "'");
    return x;
}

std::string json_quote(const std::string& s) {
    std::string out = "\"";
    for (const char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", ch);
                    out += buf;
                } else {
                    out += ch;
                }
        }
    }
    out += '"';
    return out;
}

void require_points(const ConvergenceReport& r) {
    if (r.points.empty()) throw ReportError("report has no points");
}

// keys and numeric text are emitted in a fixed order so a given report has
// exactly one JSON rendering
std::string emit_json(const ConvergenceReport& r) {
    require_points(r);
    std::ostringstream os;
    os << "{\n";
    os << "  \"quantity\": " << json_quote(r.quantity) << ",\n";
    os << "  \"points\": [";
    for (std::size_t i = 0; i < r.points.size(); ++i) {
        if (i) os << ", ";
        os << "{\"param\": " << fmt17(r.points[i].param)
           << ", \"value\": " << fmt17(r.points[i].value) << "}";
    }
    os << "],\n";
    os << "  \"slope\": " << fmt17(r.slope) << ",\n";
    os << "  \"expected_slope\": " << fmt17(r.expected_slope) << ",\n";
    os << "  \"tolerance\": " << fmt17(r.tolerance) << ",\n";
    os << "  \"residual\": " << fmt17(r.residual) << ",\n";
    os << "  \"one_sided\": " << (r.one_sided ? "true" : "false") << ",\n";
    os << "  \"pass\": " << (r.pass ? "true" : "false") << ",\n";
    os << "  \"meta\": {\"seed\": " << r.meta.seed
       << ", \"grid\": " << json_quote(r.meta.grid)
       << ", \"p\": " << fmt17(r.meta.p)
       << ", \"delta\": " << fmt17(r.meta.delta)
       << ", \"version\": " << json_quote(r.meta.version)
       << ", \"note\": " << json_quote(r.meta.note) << "}\n";
    os << "}\n";
    return os.str();
}

ConvergenceReport parse_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ReportError(std::string("malformed report JSON: ") + e.what());
    }
    try {
        ConvergenceReport r;
        r.quantity = j.at("quantity").get<std::string>();
        for (const auto& pt : j.at("points")) {
            r.points.push_back(
                {pt.at("param").get<double>(), pt.at("value").get<double>()});
        }
        r.slope = j.at("slope").get<double>();
        r.expected_slope = j.at("expected_slope").get<double>();
        r.tolerance = j.at("tolerance").get<double>();
        r.residual = j.at("residual").get<double>();
        r.one_sided = j.at("one_sided").get<bool>();
        r.pass = j.at("pass").get<bool>();
        const auto& m = j.at("meta");
        r.meta.seed = m.at("seed").get<std::uint64_t>();
        r.meta.grid = m.at("grid").get<std::string>();
        r.meta.p = m.at("p").get<double>();
        r.meta.delta = m.at("delta").get<double>();
        r.meta.version = m.at("version").get<std::string>();
        r.meta.note = m.at("note").get<std::string>();
        if (r.points.empty()) throw ReportError("report has no points");
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ReportError(std::string("report JSON missing fields: ") + e.what());
    }
}

// CSV cells are not quoted, so the few free-text fields must stay delimiter
// free
void check_csv_field(const std::string& s, const char* what) {
    if (s.find_first_of(",\n\r=") != std::string::npos)
        throw ReportError(std::string(what) +
                          " may not contain ',', '=', or newlines in CSV");
}

std::string emit_csv(const ConvergenceReport& r) {
    require_points(r);
    check_csv_field(r.quantity, "quantity");
    check_csv_field(r.meta.grid, "meta.grid");
    check_csv_field(r.meta.version, "meta.version");
    check_csv_field(r.meta.note, "meta.note");
    std::ostringstream os;
    os << "quantity,param,value\n";
    for (const auto& pt : r.points)
        os << r.quantity << ',' << fmt17(pt.param) << ',' << fmt17(pt.value)
           << '\n';
    os << "summary"
       << ",slope=" << fmt17(r.slope)
       << ",expected_slope=" << fmt17(r.expected_slope)
       << ",tolerance=" << fmt17(r.tolerance)
       << ",residual=" << fmt17(r.residual)
       << ",one_sided=" << (r.one_sided ? 1 : 0)
       << ",pass=" << (r.pass ? 1 : 0)
       << ",seed=" << r.meta.seed
       << ",grid=" << r.meta.grid
       << ",p=" << fmt17(r.meta.p)
       << ",delta=" << fmt17(r.meta.delta)
       << ",version=" << r.meta.version
       << ",note=" << r.meta.note << '\n';
    return os.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

ConvergenceReport parse_csv(const std::string& text) {
    std::vector<std::string> lines;
    for (auto& line : split(text, '\n')) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(std::move(line));
    }
    if (lines.size() < 3 || lines.front() != "quantity,param,value")
        throw ReportError("malformed report CSV: bad header");
    if (lines.back().rfind("summary,", 0) != 0)
        throw ReportError("malformed report CSV: missing summary row");

    ConvergenceReport r;
    for (std::size_t i = 1; i + 1 < lines.size(); ++i) {
        const auto cells = split(lines[i], ',');
        if (cells.size() != 3)
            throw ReportError("malformed report CSV: bad point row");
        if (i == 1)
            r.quantity = cells[0];
        else if (cells[0] != r.quantity)
            throw ReportError("malformed report CSV: mixed quantities");
        r.points.push_back({parse_double(cells[1]), parse_double(cells[2])});
    }

    for (const auto& cell : split(lines.back().substr(8), ',')) {
        const std::size_t eq = cell.find('=');
        if (eq == std::string::npos)
            throw ReportError("malformed report CSV: summary cell '" + cell +
                              "'");
        const std::string key = cell.substr(0, eq);
        const std::string val = cell.substr(eq + 1);
        if (key == "slope") r.slope = parse_double(val);
        else if (key == "expected_slope") r.expected_slope = parse_double(val);
        else if (key == "tolerance") r.tolerance = parse_double(val);
        else if (key == "residual") r.residual = parse_double(val);
        else if (key == "one_sided") r.one_sided = val == "1";
        else if (key == "pass") r.pass = val == "1";
        else if (key == "seed") r.meta.seed = parse_seed(val);
        else if (key == "grid") r.meta.grid = val;
        else if (key == "p") r.meta.p = parse_double(val);
        else if (key == "delta") r.meta.delta = parse_double(val);
        else if (key == "version") r.meta.version = val;
        else if (key == "note") r.meta.note = val;
        else throw ReportError("malformed report CSV: unknown key '" + key + "'");
    }
    return r;
}

}  // namespace

std::string emit_report(const ConvergenceReport& report, ReportFormat format) {
    return format == ReportFormat::json ? emit_json(report) : emit_csv(report);
}

ConvergenceReport parse_report(const std::string& text, ReportFormat format) {
    return format == ReportFormat::json ? parse_json(text) : parse_csv(text);
}

void write_report(const ConvergenceReport& report, const std::string& path,
                  ReportFormat format) {
    const std::string body = emit_report(report, format);
    const std::filesystem::path target(path);
    std::error_code ec;
    if (target.has_parent_path())
        std::filesystem::create_directories(target.parent_path(), ec);
    std::ofstream out(target, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << body;
    out.flush();
    if (!out) throw IoError("failed writing '" + path + "'");
}

ConvergenceReport read_report(const std::string& path, ReportFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("failed reading '" + path + "'");
    return parse_report(buf.str(), format);
}

}  // namespace dmglue
