#include "uqp/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace uqp {

std::string matrix_to_json(const HermitianMatrix& m) {
    nlohmann::json j;
    j["n"] = m.size();
    nlohmann::json entries = nlohmann::json::array();
    for (int k = 0; k < m.size(); ++k)
        for (int l = 0; l < m.size(); ++l)
            entries.push_back({m(k, l).real(), m(k, l).imag()});
    j["entries_row_major"] = std::move(entries);
    return j.dump(2) + "\n";
}

HermitianMatrix matrix_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("matrix JSON parse error: ") + e.what());
    }
    if (!j.is_object() || !j.contains("n") || !j.contains("entries_row_major"))
        throw ValidationError("matrix JSON must contain \"n\" and \"entries_row_major\"");
    if (!j["n"].is_number_integer() || j["n"].get<long long>() <= 0)
        throw ValidationError("matrix JSON: \"n\" must be a positive integer");
    const int n = j["n"].get<int>();
    const auto& entries = j["entries_row_major"];
    if (!entries.is_array() || entries.size() != static_cast<size_t>(n) * n)
        throw ValidationError("matrix JSON: expected n*n [re, im] pairs");

    std::vector<Complex> data;
    data.reserve(entries.size());
    for (const auto& e : entries) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw ValidationError("matrix JSON: entries must be [re, im] number pairs");
        const double re = e[0].get<double>();
        const double im = e[1].get<double>();
        if (!std::isfinite(re) || !std::isfinite(im))
            throw ValidationError("matrix JSON: entries must be finite");
        data.emplace_back(re, im);
    }
    return HermitianMatrix::from_entries(n, data);
}

void save_matrix(const HermitianMatrix& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open file for writing: " + path);
    out << matrix_to_json(m);
    if (!out) throw ValidationError("failed writing matrix to: " + path);
}

HermitianMatrix load_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open matrix file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return matrix_from_json(ss.str());
}

}  // namespace uqp
