#include "pixeltrack/kv.hpp"

#include <fstream>
#include <stdexcept>

namespace pixeltrack {

KvPairs read_kv_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path);
    KvPairs pairs;
    std::string line;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("bad key=value line in " + path + ": " + line);
        pairs.emplace_back(line.substr(0, eq), line.substr(eq + 1));
    }
    return pairs;
}

std::map<std::string, std::string> kv_to_map(const KvPairs& pairs) {
    std::map<std::string, std::string> m;
    for (const auto& [k, v] : pairs) m[k] = v;
    return m;
}

void write_kv_file(const std::string& path, const KvPairs& pairs) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    for (const auto& [k, v] : pairs) f << k << '=' << v << '\n';
}

}  // namespace pixeltrack
