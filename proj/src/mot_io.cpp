#include "pixeltrack/mot_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pixeltrack {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_num(const std::string& s, int line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("mot parse error at line " + std::to_string(line_no) +
                                    ": bad field '" + s + "'");
    }
}

// Shortest representation that survives a text round trip.
std::string format_num(double v) {
    char buf[64];
    for (int prec : {1, 6, 17}) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::stod(buf) == v) break;
    }
    return buf;
}

}  // namespace

std::vector<MotRow> parse_mot(std::istream& in) {
    std::vector<MotRow> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = split_csv(line);
        if (fields.size() < 6)
            throw std::invalid_argument("mot parse error at line " + std::to_string(line_no) +
                                        ": expected at least 6 fields");
        MotRow row;
        row.frame = static_cast<int>(parse_num(fields[0], line_no));
        row.id = static_cast<int>(parse_num(fields[1], line_no));
        row.left = parse_num(fields[2], line_no);
        row.top = parse_num(fields[3], line_no);
        row.width = parse_num(fields[4], line_no);
        row.height = parse_num(fields[5], line_no);
        if (fields.size() > 6) row.conf = parse_num(fields[6], line_no);
        if (fields.size() > 7) row.class_id = static_cast<int>(parse_num(fields[7], line_no));
        if (fields.size() > 8) row.visibility = parse_num(fields[8], line_no);
        if (row.frame < 1)
            throw std::invalid_argument("mot parse error at line " + std::to_string(line_no) +
                                        ": frame must be >= 1");
        if (row.width <= 0 || row.height <= 0)
            throw std::invalid_argument("mot parse error at line " + std::to_string(line_no) +
                                        ": non-positive box");
        rows.push_back(row);
    }
    std::stable_sort(rows.begin(), rows.end(), [](const MotRow& a, const MotRow& b) {
        if (a.frame != b.frame) return a.frame < b.frame;
        return a.id < b.id;
    });
    return rows;
}

std::vector<MotRow> parse_mot_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path);
    return parse_mot(f);
}

void write_mot(std::ostream& out, const std::vector<MotRow>& rows) {
    for (const MotRow& r : rows) {
        out << r.frame << ',' << r.id << ',' << format_num(r.left) << ','
            << format_num(r.top) << ',' << format_num(r.width) << ','
            << format_num(r.height) << ',' << format_num(r.conf) << ',' << r.class_id
            << ',' << format_num(r.visibility);
        if (r.class_id < 0 && r.visibility < 0) out << ",-1";  // result-row trailer
        out << '\n';
    }
}

void write_mot_file(const std::string& path, const std::vector<MotRow>& rows) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    write_mot(f, rows);
}

std::map<int, std::vector<MotRow>> group_by_frame(const std::vector<MotRow>& rows) {
    std::map<int, std::vector<MotRow>> frames;
    for (const MotRow& r : rows) frames[r.frame].push_back(r);
    return frames;
}

}  // namespace pixeltrack
