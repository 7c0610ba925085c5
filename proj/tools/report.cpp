#include "report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "bmprior/error.hpp"

namespace bmprior::report {
namespace {

// JSON has no representation for non-finite numbers.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double get_number(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw FormatError(std::string("JSON field '") + key + "' is missing or not a number");
    return j.at(key).get<double>();
}

Eigen::MatrixXd matrix_from_json(const json& rows, Eigen::Index n, const char* what) {
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n)
        throw FormatError(std::string("JSON field '") + what + "' must have " + std::to_string(n) + " rows");
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const json& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
            throw FormatError(std::string("JSON field '") + what + "' has a malformed row");
        for (Eigen::Index k = 0; k < n; ++k) {
            const json& v = row[static_cast<std::size_t>(k)];
            if (!v.is_number()) throw FormatError(std::string("JSON field '") + what + "' holds a non-number");
            m(i, k) = v.get<double>();
        }
    }
    return m;
}

Eigen::VectorXd vector_from_json(const json& arr, const char* what) {
    if (!arr.is_array()) throw FormatError(std::string("JSON field '") + what + "' must be an array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number()) throw FormatError(std::string("JSON field '") + what + "' holds a non-number");
        v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
    }
    return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_to_json(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

}  // namespace

json model_to_json(const IsingModel& model) {
    return {{"schema", kSchemaVersion}, {"L", model.side}, {"N", model.size()},
            {"h", vector_to_json(model.h)}, {"w", matrix_to_json(model.w)}};
}

IsingModel model_from_json(const json& j) {
    if (!j.is_object()) throw FormatError("model file must hold a JSON object");
    IsingModel m;
    m.side = static_cast<int>(get_number(j, "L"));
    m.h = vector_from_json(j.value("h", json()), "h");
    m.w = matrix_from_json(j.value("w", json()), m.h.size(), "w");
    m.validate();
    return m;
}

json moments_to_json(const EmpiricalMoments& m) {
    return {{"schema", kSchemaVersion}, {"L", m.side}, {"B", m.count},
            {"mu", vector_to_json(m.mu)}, {"gamma", matrix_to_json(m.gamma)}};
}

EmpiricalMoments moments_from_json(const json& j) {
    if (!j.is_object()) throw FormatError("moments file must hold a JSON object");
    EmpiricalMoments m;
    m.side = static_cast<int>(get_number(j, "L"));
    m.count = static_cast<std::uint64_t>(get_number(j, "B"));
    m.mu = vector_from_json(j.value("mu", json()), "mu");
    m.gamma = matrix_from_json(j.value("gamma", json()), m.mu.size(), "gamma");
    if (m.side > 0 && static_cast<Eigen::Index>(m.side) * m.side != m.mu.size())
        throw FormatError("moments file: L^2 does not match the length of mu");
    return m;
}

json prior_to_json(const PriorParams& p, double h0, double r_cut) {
    return {{"w_nn_1", number(p.w_nn_1)}, {"w_nn_2", number(p.w_nn_2)}, {"w_nnn_1", number(p.w_nnn_1)},
            {"w_nnn_2", number(p.w_nnn_2)}, {"a", number(p.a)}, {"b", number(p.b)},
            {"h0", number(h0)}, {"r_cut", number(r_cut)}};
}

PriorFile prior_from_json(const json& j) {
    if (!j.is_object()) throw FormatError("prior file must hold a JSON object");
    PriorFile f;
    f.params.w_nn_1 = get_number(j, "w_nn_1");
    f.params.w_nn_2 = get_number(j, "w_nn_2");
    f.params.w_nnn_1 = get_number(j, "w_nnn_1");
    f.params.w_nnn_2 = get_number(j, "w_nnn_2");
    f.params.a = get_number(j, "a");
    f.params.b = get_number(j, "b");
    if (j.contains("h0")) f.h0 = get_number(j, "h0");
    if (j.contains("r_cut")) f.r_cut = get_number(j, "r_cut");
    return f;
}

json histogram_to_json(const Histogram& h) {
    return {{"lo", h.lo}, {"width", h.width}, {"counts", h.counts}, {"samples", h.samples}, {"mean", h.mean}};
}

json profile_to_json(const DistanceProfile& p) {
    return {{"origin", {p.origin.x, p.origin.y}}, {"r", p.r_values}, {"w_bar", p.w_bar}, {"stderr", p.std_error}};
}

json fit_to_json(const ExpFit& f) {
    return {{"a", number(f.a)}, {"b", number(f.b)}, {"a_err", number(f.a_err)}, {"b_err", number(f.b_err)},
            {"r_range", {f.r_min, f.r_max}}, {"ok", f.ok}};
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
}

void write_text(const std::string& path, const std::string& text, std::ostream& console) {
    if (path.empty() || path == "-") {
        console << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
    if (!out) throw Error("write failed: " + path);
}

}  // namespace bmprior::report
