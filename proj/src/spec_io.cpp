#include "mcb/spec_io.hpp"

#include <fstream>
#include <set>

#include "mcb/error.hpp"

namespace mcb {

namespace {

Matrix parse_matrix(const nlohmann::json& j, const char* what) {
    if (!j.is_array() || j.empty()) throw Error(ErrorCode::BadInput, std::string(what) + " must be a non-empty array");
    const int n = static_cast<int>(j.size());
    Matrix m(n);
    for (int r = 0; r < n; ++r) {
        if (!j[r].is_array() || static_cast<int>(j[r].size()) != n)
            throw Error(ErrorCode::NotSquare, std::string(what) + " row " + std::to_string(r));
        for (int c = 0; c < n; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}

Vec parse_vec(const nlohmann::json& j, int n, const char* what) {
    if (!j.is_array() || static_cast<int>(j.size()) != n)
        throw Error(ErrorCode::BadInput, std::string(what) + " must have " + std::to_string(n) + " entries");
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = j[i].get<double>();
    return v;
}

nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < m.dim(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < m.dim(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

ChainSpec load_spec(const nlohmann::json& j) {
    ChainSpec spec;
    if (!j.contains("matrix")) throw Error(ErrorCode::BadInput, "spec needs a matrix");
    spec.w = TransitionMatrix::validate(parse_matrix(j["matrix"], "matrix"));
    const int n = spec.w.dim();

    if (j.contains("states")) {
        for (const auto& s : j["states"]) spec.states.push_back(s.get<std::string>());
        if (static_cast<int>(spec.states.size()) != n)
            throw Error(ErrorCode::BadInput, "states and matrix sizes differ");
        std::set<std::string> uniq(spec.states.begin(), spec.states.end());
        if (static_cast<int>(uniq.size()) != n) throw Error(ErrorCode::BadInput, "state labels not unique");
    } else {
        for (int i = 0; i < n; ++i) spec.states.push_back(std::to_string(i));
    }

    spec.initial = j.contains("initial") ? parse_vec(j["initial"], n, "initial") : stationary(spec.w);

    if (j.contains("generator")) {
        const auto& g = j["generator"];
        if (!g.contains("g")) throw Error(ErrorCode::BadInput, "generator needs g");
        GeneratorSpec gen;
        gen.g = parse_matrix(g["g"], "generator.g");
        if (gen.g.dim() != n) throw Error(ErrorCode::BadInput, "generator dimension mismatch");
        gen.h = g.contains("h") ? parse_vec(g["h"], n, "generator.h") : Vec(n, 0.0);
        if (g.contains("label")) gen.label = g["label"].get<std::string>();
        spec.gen = std::move(gen);
    }

    if (j.contains("second_chain")) {
        const auto& s = j["second_chain"];
        if (!s.contains("matrix")) throw Error(ErrorCode::BadInput, "second_chain needs a matrix");
        SecondChainSpec sc;
        sc.w = TransitionMatrix::validate(parse_matrix(s["matrix"], "second_chain.matrix"));
        if (sc.w.dim() != n) throw Error(ErrorCode::BadInput, "second_chain dimension mismatch");
        sc.initial = s.contains("initial") ? parse_vec(s["initial"], n, "second_chain.initial")
                                           : stationary(sc.w);
        spec.second = std::move(sc);
    }
    return spec;
}

nlohmann::json save_spec(const ChainSpec& spec) {
    nlohmann::json j;
    j["states"] = spec.states;
    j["matrix"] = matrix_to_json(spec.w.matrix());
    j["initial"] = spec.initial;
    if (spec.gen) {
        j["generator"]["g"] = matrix_to_json(spec.gen->g);
        j["generator"]["h"] = spec.gen->h;
        if (!spec.gen->label.empty()) j["generator"]["label"] = spec.gen->label;
    }
    if (spec.second) {
        j["second_chain"]["matrix"] = matrix_to_json(spec.second->w.matrix());
        j["second_chain"]["initial"] = spec.second->initial;
    }
    return j;
}

ChainSpec load_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::BadInput, "cannot open " + path);
    nlohmann::json j;
    in >> j;
    return load_spec(j);
}

}  // namespace mcb
