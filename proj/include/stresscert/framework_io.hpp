#pragma once

#include <json.hpp>

#include <string>
#include <variant>
#include <vector>

#include "stresscert/framework.hpp"

namespace stresscert {

template <class T>
using Instance = std::variant<Framework<T>, AnchoredNetwork<T>>;

namespace detail {

template <class T>
inline T number_from_json(const nlohmann::json& v, const std::string& where) {
    if (v.is_string()) {
        Rat r = Rat::parse(v.get<std::string>());
        if constexpr (is_exact_backend<T>) return r;
        else return r.to_double();
    }
    if (v.is_number_integer()) {
        long long n = v.get<long long>();
        if constexpr (is_exact_backend<T>) return Rat(n);
        else return static_cast<double>(n);
    }
    if (v.is_number_float()) {
        double x = v.get<double>();
        if constexpr (is_exact_backend<T>) return Rat::from_decimal_double(x);
        else return x;
    }
    throw ParseError("expected a number at " + where);
}

inline nlohmann::json number_to_json(double x) { return x; }

inline nlohmann::json number_to_json(const Rat& x) {
    if (x.is_integer()) {
        mpz_class n = x.numerator();
        if (mpz_fits_slong_p(n.get_mpz_t())) {
            long v = n.get_si();
            if (v >= -(1L << 53) && v <= (1L << 53)) return v;
        }
    }
    return x.to_string();
}

inline const nlohmann::json& require_field(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(std::string("missing field '") + key + "'");
    return *it;
}

template <class T>
inline Matrix<T> positions_from_json(const nlohmann::json& arr, int d, const std::string& what) {
    if (!arr.is_array() || arr.empty()) throw ParseError(what + " must be a non-empty array");
    int n = static_cast<int>(arr.size());
    Matrix<T> P(d, n);
    for (int j = 0; j < n; ++j) {
        const auto& row = arr[static_cast<size_t>(j)];
        if (!row.is_array() || static_cast<int>(row.size()) != d)
            throw ParseError(what + "[" + std::to_string(j + 1) + "] must list exactly " +
                             std::to_string(d) + " coordinates");
        for (int i = 0; i < d; ++i)
            P(i, j) = number_from_json<T>(row[static_cast<size_t>(i)],
                                          what + "[" + std::to_string(j + 1) + "]");
    }
    return P;
}

inline std::vector<std::pair<int, int>> pairs_from_json(const nlohmann::json& arr, const char* what,
                                                        int lo1, int hi1, int lo2, int hi2) {
    if (!arr.is_array()) throw ParseError(std::string(what) + " must be an array");
    std::vector<std::pair<int, int>> out;
    for (const auto& e : arr) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
            throw ParseError(std::string(what) + " entries must be integer pairs");
        int a = e[0].get<int>(), b = e[1].get<int>();
        if (a < lo1 || a > hi1 || b < lo2 || b > hi2)
            throw IndexError(std::string(what) + " index out of range: [" + std::to_string(a) + "," +
                             std::to_string(b) + "]");
        out.emplace_back(a, b);
    }
    return out;
}

}  // namespace detail

template <class T>
inline Instance<T> read_instance(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("top-level value must be an object");

    const auto& dim = detail::require_field(j, "dim");
    if (!dim.is_number_integer() || dim.get<int>() < 0) throw ParseError("'dim' must be a non-negative integer");
    int d = dim.get<int>();

    Matrix<T> P = detail::positions_from_json<T>(detail::require_field(j, "positions"), d, "positions");
    int total = P.cols;

    int m = 0;
    bool anchored = j.contains("anchors");
    if (anchored) {
        const auto& a = j.at("anchors");
        if (!a.is_number_integer() || a.get<int>() < 1) throw ParseError("'anchors' must be a positive integer");
        m = a.get<int>();
        if (m < d + 1) throw ParseError("'anchors' must be at least dim+1");
        if (m > total) throw IndexError("'anchors' exceeds the number of positions");
        if (!j.contains("anchor_edges")) throw ParseError("'anchor_edges' is required when 'anchors' is present");
    } else if (j.contains("anchor_edges")) {
        throw ParseError("'anchor_edges' requires the 'anchors' field");
    }

    if (!anchored) {
        if (d > total - 1) throw ParseError("'dim' must be at most n-1");
        Framework<T> F;
        F.d = d;
        F.n = total;
        F.positions = std::move(P);
        for (auto [a, b] : detail::pairs_from_json(detail::require_field(j, "edges"), "edges", 1, total, 1, total)) {
            if (a == b) throw ParseError("self-loop in edges at vertex " + std::to_string(a));
            if (F.edges.has(a, b)) throw ParseError("duplicate edge [" + std::to_string(a) + "," + std::to_string(b) + "]");
            F.edges.add(a, b);
        }
        if (j.contains("order")) {
            const auto& o = j.at("order");
            if (!o.is_array() || static_cast<int>(o.size()) != total) throw ParseError("'order' must list every vertex once");
            std::vector<int> ord;
            std::vector<bool> seen(static_cast<size_t>(total) + 1, false);
            for (const auto& v : o) {
                if (!v.is_number_integer()) throw ParseError("'order' entries must be integers");
                int x = v.get<int>();
                if (x < 1 || x > total) throw IndexError("'order' vertex out of range: " + std::to_string(x));
                if (seen[static_cast<size_t>(x)]) throw ParseError("'order' repeats vertex " + std::to_string(x));
                seen[static_cast<size_t>(x)] = true;
                ord.push_back(x);
            }
            F.order = std::move(ord);
        }
        return F;
    }

    AnchoredNetwork<T> N;
    N.d = d;
    N.m = m;
    N.n = total - m;
    N.anchors = Matrix<T>(d, m);
    N.sensors = Matrix<T>(d, N.n);
    for (int j2 = 0; j2 < m; ++j2)
        for (int i = 0; i < d; ++i) N.anchors(i, j2) = P(i, j2);
    for (int j2 = 0; j2 < N.n; ++j2)
        for (int i = 0; i < d; ++i) N.sensors(i, j2) = P(i, m + j2);

    for (auto [a, b] : detail::pairs_from_json(detail::require_field(j, "edges"), "edges", 1, N.n, 1, N.n)) {
        if (a == b) throw ParseError("self-loop in edges at sensor " + std::to_string(a));
        if (N.sensor_edges.has(a, b)) throw ParseError("duplicate edge [" + std::to_string(a) + "," + std::to_string(b) + "]");
        N.sensor_edges.add(a, b);
    }
    for (auto [k, s] : detail::pairs_from_json(j.at("anchor_edges"), "anchor_edges", 1, m, 1, N.n)) {
        if (!N.anchor_edges.emplace(k, s).second)
            throw ParseError("duplicate anchor edge [" + std::to_string(k) + "," + std::to_string(s) + "]");
    }

    if (j.contains("order")) {
        const auto& o = j.at("order");
        if (!o.is_array() || static_cast<int>(o.size()) != total)
            throw ParseError("'order' must list every point once (anchors first)");
        std::vector<int> ord;
        std::vector<bool> seen(static_cast<size_t>(total) + 1, false);
        for (const auto& v : o) {
            if (!v.is_number_integer()) throw ParseError("'order' entries must be integers");
            int x = v.get<int>();
            if (x < 1 || x > total) throw IndexError("'order' point out of range: " + std::to_string(x));
            if (seen[static_cast<size_t>(x)]) throw ParseError("'order' repeats point " + std::to_string(x));
            seen[static_cast<size_t>(x)] = true;
            ord.push_back(x);
        }
        for (int t = 0; t < m; ++t)
            if (ord[static_cast<size_t>(t)] > m)
                throw ParseError("'order' must place all anchors before sensors");
        std::vector<int> sord;
        for (int t = m; t < total; ++t) sord.push_back(ord[static_cast<size_t>(t)] - m);
        N.sensor_order = std::move(sord);
    }
    return N;
}

template <class T>
inline std::string write_instance(const Instance<T>& inst) {
    nlohmann::json j;
    if (std::holds_alternative<Framework<T>>(inst)) {
        const auto& F = std::get<Framework<T>>(inst);
        j["dim"] = F.d;
        nlohmann::json pos = nlohmann::json::array();
        for (int c = 0; c < F.n; ++c) {
            nlohmann::json row = nlohmann::json::array();
            for (int i = 0; i < F.d; ++i) row.push_back(detail::number_to_json(F.positions(i, c)));
            pos.push_back(std::move(row));
        }
        j["positions"] = std::move(pos);
        nlohmann::json edges = nlohmann::json::array();
        for (auto [a, b] : F.edges.sorted()) edges.push_back(nlohmann::json::array({a, b}));
        j["edges"] = std::move(edges);
        if (F.order) j["order"] = *F.order;
    } else {
        const auto& N = std::get<AnchoredNetwork<T>>(inst);
        j["dim"] = N.d;
        j["anchors"] = N.m;
        nlohmann::json pos = nlohmann::json::array();
        for (int c = 0; c < N.m; ++c) {
            nlohmann::json row = nlohmann::json::array();
            for (int i = 0; i < N.d; ++i) row.push_back(detail::number_to_json(N.anchors(i, c)));
            pos.push_back(std::move(row));
        }
        for (int c = 0; c < N.n; ++c) {
            nlohmann::json row = nlohmann::json::array();
            for (int i = 0; i < N.d; ++i) row.push_back(detail::number_to_json(N.sensors(i, c)));
            pos.push_back(std::move(row));
        }
        j["positions"] = std::move(pos);
        nlohmann::json edges = nlohmann::json::array();
        for (auto [a, b] : N.sensor_edges.sorted()) edges.push_back(nlohmann::json::array({a, b}));
        j["edges"] = std::move(edges);
        nlohmann::json aedges = nlohmann::json::array();
        for (auto [k, s] : N.anchor_edges) aedges.push_back(nlohmann::json::array({k, s}));
        j["anchor_edges"] = std::move(aedges);
        if (N.sensor_order) {
            std::vector<int> ord;
            for (int k = 1; k <= N.m; ++k) ord.push_back(k);
            for (int s : *N.sensor_order) ord.push_back(N.m + s);
            j["order"] = ord;
        }
    }
    return j.dump(2) + "\n";
}

// Dense matrix as a JSON object {"rows", "cols", "entries": [[...],...]},
// numerals following the same conventions as instance files.
template <class T>
inline Matrix<T> read_matrix_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("matrix file must be a JSON object");
    const auto& r = detail::require_field(j, "rows");
    const auto& c = detail::require_field(j, "cols");
    if (!r.is_number_integer() || !c.is_number_integer() || r.get<int>() < 0 || c.get<int>() < 0)
        throw ParseError("'rows'/'cols' must be non-negative integers");
    Matrix<T> M(r.get<int>(), c.get<int>());
    const auto& entries = detail::require_field(j, "entries");
    if (!entries.is_array() || static_cast<int>(entries.size()) != M.rows)
        throw ParseError("'entries' must list one row per matrix row");
    for (int i = 0; i < M.rows; ++i) {
        const auto& row = entries[static_cast<size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != M.cols)
            throw ParseError("matrix row " + std::to_string(i + 1) + " has the wrong length");
        for (int k = 0; k < M.cols; ++k)
            M(i, k) = detail::number_from_json<T>(row[static_cast<size_t>(k)],
                                                  "entries[" + std::to_string(i + 1) + "]");
    }
    return M;
}

template <class T>
inline std::string write_matrix_json(const Matrix<T>& M) {
    nlohmann::json j;
    j["rows"] = M.rows;
    j["cols"] = M.cols;
    nlohmann::json entries = nlohmann::json::array();
    for (int i = 0; i < M.rows; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int k = 0; k < M.cols; ++k) row.push_back(detail::number_to_json(M(i, k)));
        entries.push_back(std::move(row));
    }
    j["entries"] = std::move(entries);
    return j.dump(2) + "\n";
}

}  // namespace stresscert
