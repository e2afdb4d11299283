#pragma once

/*
 * File formats.
 *
 * Matrix file (JSON):
 *   {
 *     "partition": [d1, d2, ...],
 *     "matrix": [ [[re, im], [re, im], ...],    // row 0
 *                 ... ]                          // side = sum(partition) rows
 *   }
 * Complex entries are always [re, im] pairs, even when purely real.
 * The matrix must be Hermitian within 1e-9 (max norm, relative).
 *
 * Report files serialize a MarkovReport plus tool version, seed,
 * tolerances and timing; serialization round-trips losslessly.
 */

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "linalg.hpp"
#include "markov.hpp"
#include "version.hpp"

namespace ccr::io {

using json = nlohmann::ordered_json;

inline json complex_to_json(const cxd& z) { return json::array({z.real(), z.imag()}); }

inline json matrix_to_json_entries(const Matrix& M) {
    json rows = json::array();
    for (Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < M.cols(); ++j) row.push_back(complex_to_json(M(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json matrix_to_json(const linalg::PartitionedMatrix& pm) {
    json j;
    j["partition"] = pm.dims();
    j["matrix"] = matrix_to_json_entries(pm.entries());
    return j;
}

inline cxd complex_from_json(const json& v) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ParseError("complex entries must be [re, im] pairs");
    return cxd(v[0].get<double>(), v[1].get<double>());
}

inline Matrix matrix_from_json_entries(const json& rows) {
    if (!rows.is_array() || rows.empty()) throw ParseError("\"matrix\" must be a nonempty array of rows");
    const auto n = static_cast<Index>(rows.size());
    Matrix M(n, n);
    for (Index i = 0; i < n; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Index>(row.size()) != n)
            throw ParseError("matrix rows must all have length equal to the row count");
        for (Index j = 0; j < n; ++j) M(i, j) = complex_from_json(row[static_cast<std::size_t>(j)]);
    }
    return M;
}

inline linalg::PartitionedMatrix parse_matrix_json(const json& j) {
    if (!j.is_object() || !j.contains("partition") || !j.contains("matrix"))
        throw ParseError("matrix file needs \"partition\" and \"matrix\" fields");
    std::vector<Index> dims;
    for (const auto& d : j["partition"]) {
        if (!d.is_number_integer() || d.get<Index>() <= 0)
            throw ParseError("partition entries must be positive integers");
        dims.push_back(d.get<Index>());
    }
    const Matrix M = matrix_from_json_entries(j["matrix"]);
    Index side = 0;
    for (Index d : dims) side += d;
    if (M.rows() != side)
        throw DimensionError("matrix side " + std::to_string(M.rows()) +
                             " does not equal the partition total " + std::to_string(side));
    try {
        return linalg::PartitionedMatrix(dims, M, 1e-9);
    } catch (const DimensionMismatch& e) {
        throw DimensionError(e.what());
    }
}

inline linalg::PartitionedMatrix parse_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("malformed JSON in " + path + ": " + e.what());
    }
    return parse_matrix_json(j);
}

inline std::string serialize_matrix(const linalg::PartitionedMatrix& pm) {
    return matrix_to_json(pm).dump(2) + "\n";
}

inline void write_matrix_file(const std::string& path, const linalg::PartitionedMatrix& pm) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    out << serialize_matrix(pm);
}

inline json report_to_json(const markov::MarkovReport& rep) {
    json j;
    j["tool"] = "ccr";
    j["version"] = kVersion;
    j["tolerances"] = {{"tol", rep.tol}, {"t_samples", rep.t_samples}};
    j["psd"] = {{"positive", rep.psd}, {"lambda_min", rep.lambda_min}};
    j["gap_nats"] = rep.gap;
    j["flow"] = {{"applicable", rep.flow_applicable},
                 {"pass", rep.flow_pass},
                 {"max_deviation", rep.flow_max_deviation},
                 {"deviations", rep.flow_deviations},
                 {"reason", rep.flow_reason}};
    j["bmc2"] = {{"applicable", rep.bmc2_applicable},
                 {"pass", rep.bmc2_pass},
                 {"residual", rep.bmc2_residual},
                 {"reason", rep.bmc2_reason}};
    j["felk"] = {{"applicable", rep.felk_applicable},
                 {"pass", rep.felk_pass},
                 {"r1", rep.felk_r1},
                 {"r2", rep.felk_r2},
                 {"inv13_norm", rep.inv13_norm},
                 {"invI13_norm", rep.invI13_norm},
                 {"reason", rep.felk_reason}};
    json structural = {{"found", rep.structural_found}};
    if (rep.structural_found) {
        structural["dim_ka"] = rep.dim_ka;
        structural["dim_kb"] = rep.dim_kb;
        structural["projection"] = matrix_to_json_entries(rep.projection);
    }
    j["structural"] = structural;
    j["det_identity"] = {{"applicable", rep.det_applicable},
                         {"lhs", rep.det_lhs},
                         {"rhs", rep.det_rhs},
                         {"reason", rep.det_reason}};
    j["classical"] = {{"pass", rep.classical_pass},
                      {"residual", rep.classical_residual},
                      {"independence_pass", rep.independence_pass},
                      {"a13_norm", rep.a13_norm}};
    j["weyl_sign_convention"] = rep.weyl_sign_convention;
    return j;
}

inline markov::MarkovReport report_from_json(const json& j) {
    markov::MarkovReport rep;
    rep.tol = j.at("tolerances").at("tol").get<double>();
    rep.t_samples = j.at("tolerances").at("t_samples").get<std::vector<double>>();
    rep.psd = j.at("psd").at("positive").get<bool>();
    rep.lambda_min = j.at("psd").at("lambda_min").get<double>();
    rep.gap = j.at("gap_nats").get<double>();
    const auto& fl = j.at("flow");
    rep.flow_applicable = fl.at("applicable").get<bool>();
    rep.flow_pass = fl.at("pass").get<bool>();
    rep.flow_max_deviation = fl.at("max_deviation").get<double>();
    rep.flow_deviations = fl.at("deviations").get<std::vector<double>>();
    rep.flow_reason = fl.at("reason").get<std::string>();
    const auto& bc = j.at("bmc2");
    rep.bmc2_applicable = bc.at("applicable").get<bool>();
    rep.bmc2_pass = bc.at("pass").get<bool>();
    rep.bmc2_residual = bc.at("residual").get<double>();
    rep.bmc2_reason = bc.at("reason").get<std::string>();
    const auto& fe = j.at("felk");
    rep.felk_applicable = fe.at("applicable").get<bool>();
    rep.felk_pass = fe.at("pass").get<bool>();
    rep.felk_r1 = fe.at("r1").get<double>();
    rep.felk_r2 = fe.at("r2").get<double>();
    rep.inv13_norm = fe.at("inv13_norm").get<double>();
    rep.invI13_norm = fe.at("invI13_norm").get<double>();
    rep.felk_reason = fe.at("reason").get<std::string>();
    const auto& st = j.at("structural");
    rep.structural_found = st.at("found").get<bool>();
    if (rep.structural_found) {
        rep.dim_ka = st.at("dim_ka").get<Index>();
        rep.dim_kb = st.at("dim_kb").get<Index>();
        rep.projection = matrix_from_json_entries(st.at("projection"));
    }
    const auto& di = j.at("det_identity");
    rep.det_applicable = di.at("applicable").get<bool>();
    rep.det_lhs = di.at("lhs").get<double>();
    rep.det_rhs = di.at("rhs").get<double>();
    rep.det_reason = di.at("reason").get<std::string>();
    const auto& cl = j.at("classical");
    rep.classical_pass = cl.at("pass").get<bool>();
    rep.classical_residual = cl.at("residual").get<double>();
    rep.independence_pass = cl.at("independence_pass").get<bool>();
    rep.a13_norm = cl.at("a13_norm").get<double>();
    rep.weyl_sign_convention = j.at("weyl_sign_convention").get<std::string>();
    return rep;
}

}  // namespace ccr::io
