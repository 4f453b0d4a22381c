// conelp - conic linear programming sensitivity toolkit
// Licensed under Apache 2.0

#ifndef CONELP_JSON_IO_HPP
#define CONELP_JSON_IO_HPP

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "conelp/extreal.hpp"
#include "conelp/problem.hpp"

namespace conelp {

using json = nlohmann::ordered_json;

namespace io {

namespace detail {

inline MatrixXd parse_matrix(const json& j, const std::string& name) {
    if (!j.is_array() || j.empty() || !j.front().is_array())
        throw SchemaError("field '" + name + "' must be a non-empty array of rows");
    const size_t rows = j.size();
    const size_t cols = j.front().size();
    MatrixXd M(rows, cols);
    for (size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols)
            throw SchemaError("field '" + name + "' row " + std::to_string(i) + " has inconsistent length");
        for (size_t k = 0; k < cols; ++k) {
            if (!j[i][k].is_number())
                throw SchemaError("field '" + name + "' entry (" + std::to_string(i) + "," + std::to_string(k) +
                                  ") is not a number");
            M(i, k) = j[i][k].get<double>();
        }
    }
    return M;
}

inline VectorXd parse_vector(const json& j, const std::string& name) {
    if (!j.is_array()) throw SchemaError("field '" + name + "' must be an array");
    VectorXd v(j.size());
    for (size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number())
            throw SchemaError("field '" + name + "' entry " + std::to_string(i) + " is not a number");
        v(i) = j[i].get<double>();
    }
    return v;
}

inline json matrix_to_json(const MatrixXd& M) {
    json rows = json::array();
    for (int i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (int k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json vector_to_json(const VectorXd& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

} // namespace detail

inline Cone parse_cone(const json& j) {
    if (!j.is_object() || !j.contains("blocks") || !j["blocks"].is_array() || j["blocks"].empty())
        throw SchemaError("cone must be an object with a non-empty 'blocks' array");
    std::vector<ConeBlock> blocks;
    for (const auto& bj : j["blocks"]) {
        if (!bj.is_object() || !bj.contains("type") || !bj["type"].is_string())
            throw SchemaError("cone block missing string field 'type'");
        const std::string type = bj["type"].get<std::string>();
        if (type == "orthant") {
            if (!bj.contains("dim") || !bj["dim"].is_number_integer())
                throw SchemaError("orthant block missing integer field 'dim'");
            blocks.push_back(OrthantBlock{bj["dim"].get<int>()});
        } else if (type == "soc") {
            if (!bj.contains("dim") || !bj["dim"].is_number_integer())
                throw SchemaError("soc block missing integer field 'dim'");
            blocks.push_back(SecondOrderBlock{bj["dim"].get<int>()});
        } else if (type == "polyhedral") {
            if (!bj.contains("B")) throw SchemaError("polyhedral block missing field 'B'");
            blocks.push_back(PolyhedralHBlock{detail::parse_matrix(bj["B"], "B")});
        } else if (type == "generated") {
            if (!bj.contains("G")) throw SchemaError("generated block missing field 'G'");
            blocks.push_back(GeneratedVBlock{detail::parse_matrix(bj["G"], "G")});
        } else {
            throw SchemaError("unknown cone block type '" + type + "'");
        }
    }
    try {
        return Cone(std::move(blocks));
    } catch (const DimensionError& e) {
        throw SchemaError(std::string("invalid cone: ") + e.what());
    }
}

inline json cone_to_json(const Cone& K) {
    json blocks = json::array();
    for (const auto& b : K.blocks()) {
        json bj;
        if (const auto* o = std::get_if<OrthantBlock>(&b)) {
            bj["type"] = "orthant";
            bj["dim"] = o->dim;
        } else if (const auto* s = std::get_if<SecondOrderBlock>(&b)) {
            bj["type"] = "soc";
            bj["dim"] = s->dim;
        } else if (const auto* p = std::get_if<PolyhedralHBlock>(&b)) {
            bj["type"] = "polyhedral";
            bj["B"] = detail::matrix_to_json(p->B);
        } else {
            bj["type"] = "generated";
            bj["G"] = detail::matrix_to_json(std::get<GeneratedVBlock>(b).G);
        }
        blocks.push_back(std::move(bj));
    }
    return json{{"blocks", std::move(blocks)}};
}

// Problem document:
//   {"n":int, "m":int, "A":[[row],...], "b":[...], "c":[...], "cone":{...}}
inline ConicProgram parse_problem(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError("problem document must be a JSON object");
    for (const char* field : {"n", "m", "A", "b", "c", "cone"})
        if (!j.contains(field)) throw SchemaError(std::string("missing field '") + field + "'");
    if (!j["n"].is_number_integer() || !j["m"].is_number_integer())
        throw SchemaError("fields 'n' and 'm' must be integers");
    const int n = j["n"].get<int>();
    const int m = j["m"].get<int>();
    if (n < 1 || m < 1) throw SchemaError("'n' and 'm' must be positive");
    MatrixXd A = detail::parse_matrix(j["A"], "A");
    VectorXd b = detail::parse_vector(j["b"], "b");
    VectorXd c = detail::parse_vector(j["c"], "c");
    Cone K = parse_cone(j["cone"]);
    if (A.rows() != m || A.cols() != n) throw DimensionError("A must be m x n");
    if (b.size() != m) throw DimensionError("len(b) must equal m");
    if (c.size() != n) throw DimensionError("len(c) must equal n");
    if (K.dim() != m) throw DimensionError("cone dimension must equal m = rows(A)");
    if (!A.allFinite() || !b.allFinite() || !c.allFinite()) throw SchemaError("non-finite numeric entries");
    return ConicProgram(std::move(A), std::move(b), std::move(c), std::move(K));
}

inline std::string serialize_problem(const ConicProgram& P) {
    json j;
    j["n"] = P.n();
    j["m"] = P.m();
    j["A"] = detail::matrix_to_json(P.A());
    j["b"] = detail::vector_to_json(P.b());
    j["c"] = detail::vector_to_json(P.c());
    j["cone"] = cone_to_json(P.cone());
    return j.dump(2);
}

inline ConicProgram load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open problem file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_problem(ss.str());
}

// Extended reals serialize as numbers, with infinities as the strings
// "+inf" / "-inf".
inline json extreal_to_json(const ExtReal& v) {
    if (v.is_plus_inf()) return json("+inf");
    if (v.is_minus_inf()) return json("-inf");
    return json(v.value());
}

inline ExtReal extreal_from_json(const json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "+inf" || s == "inf") return ExtReal::plus_inf();
        if (s == "-inf") return ExtReal::minus_inf();
        throw SchemaError("invalid extended-real string '" + s + "'");
    }
    if (!j.is_number()) throw SchemaError("extended-real field must be a number or '+inf'/'-inf'");
    return ExtReal::finite(j.get<double>());
}

} // namespace io

} // namespace conelp

#endif
