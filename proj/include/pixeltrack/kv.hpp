#pragma once

#include <map>
#include <string>
#include <vector>

namespace pixeltrack {

/// Flat key=value text files (config echoes, scene manifests, reports).
/// Lines starting with '#' and blank lines are ignored; order is preserved
/// on write via the vector form.
using KvPairs = std::vector<std::pair<std::string, std::string>>;

KvPairs read_kv_file(const std::string& path);
std::map<std::string, std::string> kv_to_map(const KvPairs& pairs);
void write_kv_file(const std::string& path, const KvPairs& pairs);

}  // namespace pixeltrack
