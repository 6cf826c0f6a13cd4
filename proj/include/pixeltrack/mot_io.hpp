#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace pixeltrack {

/// One MOTChallenge text row. Boxes use the top-left origin convention.
/// Result rows carry -1 in the class/visibility trailer; gt rows carry a
/// real class id and a visibility fraction.
struct MotRow {
    int frame = 0;  // 1-based
    int id = -1;    // -1 for raw detections
    double left = 0.0;
    double top = 0.0;
    double width = 0.0;
    double height = 0.0;
    double conf = 1.0;
    int class_id = -1;
    double visibility = -1.0;

    bool operator==(const MotRow&) const = default;
};

/// Parse comma-separated MOT rows. Rows are returned sorted by frame then
/// id (non-monotone input is allowed). Malformed rows raise an error naming
/// the line number.
std::vector<MotRow> parse_mot(std::istream& in);
std::vector<MotRow> parse_mot_file(const std::string& path);

void write_mot(std::ostream& out, const std::vector<MotRow>& rows);
void write_mot_file(const std::string& path, const std::vector<MotRow>& rows);

/// Rows regrouped per frame.
std::map<int, std::vector<MotRow>> group_by_frame(const std::vector<MotRow>& rows);

}  // namespace pixeltrack
