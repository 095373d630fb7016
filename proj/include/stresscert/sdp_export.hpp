#pragma once

#include <cctype>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "stresscert/framework.hpp"
#include "stresscert/graph.hpp"
#include "stresscert/numerics.hpp"

namespace stresscert {

// One nonzero of a symmetric coefficient matrix, upper triangle only.
template <class T>
struct SdpEntry {
    int block = 1;
    int i = 1;
    int j = 1;
    T value{};

    bool operator==(const SdpEntry&) const = default;
};

// Sparse SDP data: matrix 0 is the objective, matrices 1..m are equality
// constraints A_k . X = rhs_k over a block-diagonal PSD variable.
template <class T>
struct SdpProblem {
    std::vector<int> block_sizes;
    std::vector<T> rhs;
    std::vector<SdpEntry<T>> objective;
    std::vector<std::vector<SdpEntry<T>>> constraints;

    bool operator==(const SdpProblem&) const = default;

    int constraint_count() const { return static_cast<int>(constraints.size()); }
    int total_size() const {
        int s = 0;
        for (int b : block_sizes) s += b;
        return s;
    }
};

struct SdpExportOptions {
    // Replaces the zero objective with the identity (a maximum-trace
    // surrogate) for solvers asked to look for high-rank solutions. Off by
    // default: with equality constraints fixed, any feasible point already
    // attains the zero objective.
    bool trace_objective = false;
};

namespace detail {

template <class T>
inline T squared_distance(const Matrix<T>& A, int ca, const Matrix<T>& B, int cb) {
    T s(0);
    for (int i = 0; i < A.rows; ++i) {
        T diff = A(i, ca) - B(i, cb);
        s += diff * diff;
    }
    return s;
}

template <class T>
inline void append_identity_objective(SdpProblem<T>& prob) {
    for (int b = 0; b < static_cast<int>(prob.block_sizes.size()); ++b)
        for (int i = 1; i <= prob.block_sizes[static_cast<size_t>(b)]; ++i)
            prob.objective.push_back({b + 1, i, i, T(1)});
}

template <class T>
inline T overridden(const std::map<std::pair<int, int>, T>* overrides, int a, int b, T fallback) {
    if (overrides) {
        auto it = overrides->find({a, b});
        if (it != overrides->end()) return it->second;
    }
    return fallback;
}

}  // namespace detail

// Relaxed realization problem: find an n x n PSD Gram-like matrix matching
// every squared edge length. Squared distances come from the positions unless
// overridden (keyed by the sorted edge pair).
template <class T>
inline SdpProblem<T> export_realization_sdp(const Framework<T>& F, const SdpExportOptions& opt = {},
                                            const std::map<std::pair<int, int>, T>* dist_overrides = nullptr) {
    SdpProblem<T> prob;
    prob.block_sizes = {F.n};
    for (auto [i, j] : F.edges.sorted()) {
        std::vector<SdpEntry<T>> rows;
        rows.push_back({1, i, i, T(1)});
        rows.push_back({1, i, j, T(-1)});
        rows.push_back({1, j, j, T(1)});
        prob.constraints.push_back(std::move(rows));
        prob.rhs.push_back(detail::overridden(dist_overrides, i, j,
                                              detail::squared_distance(F.positions, i - 1, F.positions, j - 1)));
    }
    if (opt.trace_objective) detail::append_identity_objective(prob);
    return prob;
}

// Anchored localization problem over one (d+n) block: the first d(d+1)/2
// constraints pin the top-left block to the identity, then one constraint per
// sensor-sensor edge and one per anchor-sensor edge.
template <class T>
inline SdpProblem<T> export_anchored_sdp(const AnchoredNetwork<T>& N, const SdpExportOptions& opt = {},
                                         const std::map<std::pair<int, int>, T>* sensor_overrides = nullptr,
                                         const std::map<std::pair<int, int>, T>* anchor_overrides = nullptr) {
    SdpProblem<T> prob;
    int d = N.d;
    prob.block_sizes = {d + N.n};
    for (int a = 1; a <= d; ++a)
        for (int b = a; b <= d; ++b) {
            // Value 1/2 off the diagonal makes the inner product read the
            // entry itself, so the right-hand side is literally delta_ab.
            std::vector<SdpEntry<T>> rows{{1, a, b, a == b ? T(1) : T(1) / T(2)}};
            prob.constraints.push_back(std::move(rows));
            prob.rhs.push_back(a == b ? T(1) : T(0));
        }
    for (auto [i, j] : N.sensor_edges.sorted()) {
        std::vector<SdpEntry<T>> rows;
        rows.push_back({1, d + i, d + i, T(1)});
        rows.push_back({1, d + i, d + j, T(-1)});
        rows.push_back({1, d + j, d + j, T(1)});
        prob.constraints.push_back(std::move(rows));
        prob.rhs.push_back(detail::overridden(sensor_overrides, i, j,
                                              detail::squared_distance(N.sensors, i - 1, N.sensors, j - 1)));
    }
    for (const auto& [k, j] : N.anchor_edges) {
        std::vector<SdpEntry<T>> rows;
        for (int a = 1; a <= d; ++a)
            for (int b = a; b <= d; ++b)
                rows.push_back({1, a, b, N.anchors(a - 1, k - 1) * N.anchors(b - 1, k - 1)});
        for (int a = 1; a <= d; ++a) rows.push_back({1, a, d + j, -N.anchors(a - 1, k - 1)});
        rows.push_back({1, d + j, d + j, T(1)});
        prob.constraints.push_back(std::move(rows));
        prob.rhs.push_back(detail::overridden(anchor_overrides, k, j,
                                              detail::squared_distance(N.anchors, k - 1, N.sensors, j - 1)));
    }
    if (opt.trace_objective) detail::append_identity_objective(prob);
    return prob;
}

namespace detail {

// Exact decimal when the denominator allows one, otherwise a 17-digit float
// rendering; exports built from integer or decimal coordinates stay exact.
inline std::string sdpa_number(const Rat& v) {
    if (auto dec = v.to_exact_decimal()) return *dec;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", to_double(v));
    return buf;
}

inline std::string sdpa_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T>
inline T sdpa_parse_number(const std::string& tok) {
    if constexpr (is_exact_backend<T>) {
        return Rat::parse(tok);
    } else {
        size_t used = 0;
        double v = 0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw ParseError("bad numeral in problem file: '" + tok + "'");
        }
        if (used != tok.size()) throw ParseError("bad numeral in problem file: '" + tok + "'");
        return v;
    }
}

}  // namespace detail

template <class T>
inline std::string write_sdpa(const SdpProblem<T>& prob) {
    std::ostringstream out;
    out << prob.constraint_count() << "\n";
    out << prob.block_sizes.size() << "\n";
    for (size_t b = 0; b < prob.block_sizes.size(); ++b)
        out << (b ? " " : "") << prob.block_sizes[b];
    out << "\n";
    for (size_t c = 0; c < prob.rhs.size(); ++c)
        out << (c ? " " : "") << detail::sdpa_number(prob.rhs[c]);
    out << "\n";
    auto emit = [&](int idx, const std::vector<SdpEntry<T>>& entries) {
        for (const auto& e : entries)
            out << idx << " " << e.block << " " << e.i << " " << e.j << " "
                << detail::sdpa_number(e.value) << "\n";
    };
    emit(0, prob.objective);
    for (int c = 0; c < prob.constraint_count(); ++c) emit(c + 1, prob.constraints[static_cast<size_t>(c)]);
    return out.str();
}

template <class T>
inline SdpProblem<T> parse_sdpa(const std::string& text) {
    // Comment lines open with '"' or '*'; commas, braces and parentheses are
    // legal separators in the header lines.
    std::vector<std::string> tokens;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '"' || line[first] == '*') continue;
        for (char& ch : line)
            if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')') ch = ' ';
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) tokens.push_back(tok);
    }
    size_t pos = 0;
    auto next_token = [&]() -> const std::string& {
        if (pos >= tokens.size()) throw ParseError("problem file ended early");
        return tokens[pos++];
    };
    auto next_int = [&](const char* what) {
        const std::string& tok = next_token();
        try {
            size_t used = 0;
            int v = std::stoi(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            return v;
        } catch (const std::exception&) {
            throw ParseError(std::string("bad ") + what + " in problem file: '" + tok + "'");
        }
    };

    SdpProblem<T> prob;
    int m = next_int("constraint count");
    if (m < 0) throw ParseError("negative constraint count");
    int nblock = next_int("block count");
    if (nblock < 1) throw ParseError("block count must be positive");
    for (int b = 0; b < nblock; ++b) {
        int size = next_int("block size");
        if (size == 0) throw ParseError("zero block size");
        // Diagonal blocks are conventionally flagged by a negative size; this
        // reader treats them as dense of the same width.
        prob.block_sizes.push_back(size < 0 ? -size : size);
    }
    for (int c = 0; c < m; ++c) prob.rhs.push_back(detail::sdpa_parse_number<T>(next_token()));
    prob.constraints.resize(static_cast<size_t>(m));
    while (pos < tokens.size()) {
        int cons = next_int("constraint index");
        int block = next_int("block index");
        int i = next_int("row index");
        int j = next_int("column index");
        T value = detail::sdpa_parse_number<T>(next_token());
        if (cons < 0 || cons > m) throw IndexError("constraint index out of range");
        if (block < 1 || block > nblock) throw IndexError("block index out of range");
        int size = prob.block_sizes[static_cast<size_t>(block - 1)];
        if (i < 1 || j < 1 || i > size || j > size) throw IndexError("matrix index out of range");
        if (i > j) std::swap(i, j);
        SdpEntry<T> e{block, i, j, value};
        if (cons == 0)
            prob.objective.push_back(e);
        else
            prob.constraints[static_cast<size_t>(cons - 1)].push_back(e);
    }
    return prob;
}

// Dense certificate format: "rows cols" header line, then row-major entries.
template <class T>
inline std::string write_certificate(const Matrix<T>& M) {
    std::ostringstream out;
    out << M.rows << " " << M.cols << "\n";
    for (int i = 0; i < M.rows; ++i) {
        for (int j = 0; j < M.cols; ++j) {
            if (j) out << " ";
            if constexpr (is_exact_backend<T>) {
                if (auto dec = M(i, j).to_exact_decimal())
                    out << *dec;
                else
                    out << M(i, j).to_string();
            } else {
                out << detail::sdpa_number(M(i, j));
            }
        }
        out << "\n";
    }
    return out.str();
}

template <class T>
inline Matrix<T> read_certificate(const std::string& text) {
    std::istringstream in(text);
    long long r = 0, c = 0;
    if (!(in >> r >> c) || r < 0 || c < 0 || r > 100000 || c > 100000)
        throw ParseError("certificate header must be 'rows cols'");
    Matrix<T> M(static_cast<int>(r), static_cast<int>(c));
    std::string tok;
    for (int i = 0; i < M.rows; ++i)
        for (int j = 0; j < M.cols; ++j) {
            if (!(in >> tok)) throw ParseError("certificate body ended early");
            if constexpr (is_exact_backend<T>)
                M(i, j) = Rat::parse(tok);
            else
                M(i, j) = detail::sdpa_parse_number<double>(tok);
        }
    if (in >> tok) throw ParseError("trailing data after certificate body");
    return M;
}

template <class T>
struct CertificateReport {
    bool feasible_ok = false;
    bool primal_psd_ok = false;
    bool dual_psd_ok = false;
    bool complementarity_ok = false;
    bool strict_ok = false;
    int primal_rank = 0;
    int dual_rank = 0;
    double max_residual = 0;
    int worst_constraint = 0;  // 1-based; 0 when all residuals vanish

    bool pass() const {
        return feasible_ok && primal_psd_ok && dual_psd_ok && complementarity_ok && strict_ok;
    }
};

// Checks a primal/dual certificate pair against an exported problem:
// equality-constraint residuals, PSD of both matrices, a vanishing matrix
// product, and the full-rank split rank(primal) + rank(dual) = block size.
template <class T>
inline CertificateReport<T> check_certificate(const Matrix<T>& primal, const Matrix<T>& dual,
                                              const SdpProblem<T>& prob, const Tolerances& tol) {
    if (prob.block_sizes.size() != 1)
        throw DimensionMismatch("certificate checking expects a single-block problem");
    int n = prob.block_sizes[0];
    if (primal.rows != n || primal.cols != n || dual.rows != n || dual.cols != n)
        throw DimensionMismatch("certificate shape does not match the problem block");

    CertificateReport<T> rep;
    rep.feasible_ok = true;
    for (int c = 0; c < prob.constraint_count(); ++c) {
        T val(0);
        for (const auto& e : prob.constraints[static_cast<size_t>(c)]) {
            T term = e.value * primal(e.i - 1, e.j - 1);
            val += e.i == e.j ? term : term + term;
        }
        T resid = val - prob.rhs[static_cast<size_t>(c)];
        double mag = std::abs(to_double(resid));
        if (mag > rep.max_residual) {
            rep.max_residual = mag;
            rep.worst_constraint = c + 1;
        }
        bool ok;
        if constexpr (is_exact_backend<T>)
            ok = resid.is_zero();
        else
            ok = mag <= tol.tol_solve * std::max(1.0, std::abs(to_double(prob.rhs[static_cast<size_t>(c)])));
        if (!ok) rep.feasible_ok = false;
    }
    if (rep.feasible_ok) rep.worst_constraint = 0;

    auto psd_or_false = [&](const Matrix<T>& M) {
        try {
            return psd_check(M, tol).ok;
        } catch (const NotSymmetric&) {
            return false;
        }
    };
    rep.primal_psd_ok = psd_or_false(primal);
    rep.dual_psd_ok = psd_or_false(dual);

    Matrix<T> prod = primal * dual;
    if constexpr (is_exact_backend<T>) {
        rep.complementarity_ok = true;
        for (const auto& v : prod.a)
            if (!v.is_zero()) {
                rep.complementarity_ok = false;
                break;
            }
    } else {
        double scale = std::max(1.0, max_abs(primal) * max_abs(dual) * n);
        rep.complementarity_ok = max_abs(prod) <= tol.tol_solve * scale;
    }

    rep.primal_rank = matrix_rank(primal, tol);
    rep.dual_rank = matrix_rank(dual, tol);
    rep.strict_ok = rep.primal_rank + rep.dual_rank == n;
    return rep;
}

}  // namespace stresscert
