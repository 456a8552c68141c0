#include "miuralab/field_io.hpp"

#include <charconv>
#include <fstream>

#include "miuralab/errors.hpp"

namespace miuralab {

nlohmann::json field_to_json(const Field& f) {
    return {{"L", f.grid().L}, {"N", f.grid().N}, {"samples", f.samples()}};
}

Field field_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("field JSON must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (it.key() != "L" && it.key() != "N" && it.key() != "samples")
            throw ValidationError("unknown key in field JSON: " + it.key());
    if (!j.contains("L") || !j.contains("N") || !j.contains("samples"))
        throw ValidationError("field JSON needs L, N and samples");
    Grid g = make_grid(j.at("L").get<double>(), j.at("N").get<int>());
    return Field(g, j.at("samples").get<std::vector<double>>());
}

Field read_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open field file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("malformed field file " + path + ": " + e.what());
    }
    return field_from_json(j);
}

void write_field_json(const Field& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    out << field_to_json(f).dump() << '\n';
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_field_csv(const Field& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    out << "x,value\n";
    for (int j = 0; j < f.size(); ++j)
        out << format_double(f.grid().x(j)) << ',' << format_double(f[j]) << '\n';
}

}  // namespace miuralab
