#include "cliffstat/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace cliffstat {

std::string format_double(double v) {
    char buf[64];
    // %.17g round-trips any double; trim to the shortest representation that
    // still round-trips so files stay readable.
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v) return buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_table(const Table& table, const std::string& path, const std::string& format) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_table: cannot open " + path);
    if (format == "csv") {
        for (size_t i = 0; i < table.header.size(); ++i)
            f << table.header[i] << (i + 1 < table.header.size() ? "," : "\n");
        for (const auto& row : table.rows)
            for (size_t i = 0; i < row.size(); ++i) f << row[i] << (i + 1 < row.size() ? "," : "\n");
    } else if (format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& row : table.rows) {
            nlohmann::json obj;
            for (size_t i = 0; i < table.header.size(); ++i) obj[table.header[i]] = row[i];
            arr.push_back(obj);
        }
        f << arr.dump(2) << "\n";
    } else {
        throw std::invalid_argument("write_table: format must be csv or json");
    }
}

void write_sidecar(const std::string& data_path, const std::string& experiment,
                   const std::string& config_json, double wall_clock_seconds) {
    nlohmann::json j;
    j["experiment"] = experiment;
    j["config"] = nlohmann::json::parse(config_json);
    j["library_version"] = library_version();
    j["wall_clock_seconds"] = wall_clock_seconds;
    std::ofstream f(data_path + ".meta.json", std::ios::binary);
    if (!f) throw std::runtime_error("write_sidecar: cannot open " + data_path + ".meta.json");
    f << j.dump(2) << "\n";
}

std::string library_version() { return "cliffstat 0.1.0"; }

}  // namespace cliffstat
