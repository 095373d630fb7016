#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stresscert/errors.hpp"
#include "stresscert/framework.hpp"
#include "stresscert/graph.hpp"
#include "stresscert/numerics.hpp"

namespace stresscert {

// Pipeline frame convention: gale_matrix, pre_stress, purify_column and
// purify all index rows/columns by *construction position* (position t holds
// vertex order[t-1]). compute_stress_matrix translates the final matrix back
// to original vertex labels. Under the natural order the two frames agree.

template <class T>
struct GaleMatrix {
    Matrix<T> L;              // n x (n-d-1), unit staircase
    std::vector<int> order;   // position -> original vertex label
};

enum class StressKind { pre_stress, stress };

template <class T>
struct StressMatrix {
    Matrix<T> S;
    StressKind kind = StressKind::pre_stress;
    int rank_by_construction = 0;  // n-d-1, maintained by every pipeline step
};

template <class T>
struct PurifyStep {
    int position = 0;  // column position k
    int vertex = 0;    // original label of the vertex at that position
    bool skipped = false;
    std::vector<T> s;           // position frame; empty when skipped
    std::vector<int> selected;  // original labels of the d+1 predecessors used
    bool reselected = false;    // a lexicographically earlier subset was singular
    std::optional<int> rank_after;
};

template <class T>
struct PurificationTrace {
    std::vector<PurifyStep<T>> steps;

    int modifications() const {
        int c = 0;
        for (const auto& st : steps)
            if (!st.skipped) ++c;
        return c;
    }
};

struct PipelineOptions {
    bool skip_rule = true;    // skip columns whose off-edge entries are already zero
    bool check_steps = false;  // record the rank after every modification (slow)
    bool full_gp_scan = false;
    bool run_verify = true;
    std::optional<std::vector<int>> order_override;
    long finder_budget = 1'000'000;
};

template <class T>
struct VerifyReport {
    bool sym_ok = false;
    bool null_ok = false;
    bool offedge_ok = false;
    bool psd_ok = false;
    bool rank_ok = false;
    bool complementarity_ok = false;
    bool dual_obj_ok = false;
    int rank = -1;
    int gram_rank = -1;
    T dual_obj = T(0);
    std::optional<T> psd_witness;
    std::optional<std::pair<int, int>> offedge_witness;  // original labels, 1-based

    bool pass() const {
        return sym_ok && null_ok && offedge_ok && psd_ok && rank_ok && complementarity_ok &&
               dual_obj_ok;
    }
};

template <class T>
struct CertifyResult {
    StressMatrix<T> stress;  // original vertex labels
    GaleMatrix<T> gale;
    PurificationTrace<T> trace;
    std::vector<int> order;
    bool order_from_search = false;
    bool tree_instance = false;
    VerifyReport<T> report;
};

namespace detail {

// Shared position-frame view of a framework under a construction order.
template <class T>
struct Frame {
    int d = 0, n = 0;
    std::vector<int> order;
    Matrix<T> A;                          // (d+1) x n, columns by position
    std::vector<std::vector<char>> adj;   // position adjacency, 1-based
};

template <class T>
inline Frame<T> make_frame(const Framework<T>& F, const std::vector<int>& order, const Tolerances& tol) {
    Frame<T> fr;
    fr.d = F.d;
    fr.n = F.n;
    fr.order = order;
    Matrix<T> P(F.d, F.n);
    for (int t = 0; t < F.n; ++t) {
        int v = order[static_cast<size_t>(t)] - 1;
        for (int i = 0; i < F.d; ++i) P(i, t) = F.positions(i, v);
    }
    fr.A = extended_position_matrix(P, tol);
    fr.adj.assign(static_cast<size_t>(F.n) + 1, std::vector<char>(static_cast<size_t>(F.n) + 1, 0));
    for (auto [a, b] : F.edges.pairs) {
        // map original labels to positions
        int pa = 0, pb = 0;
        for (int t = 0; t < F.n; ++t) {
            if (order[static_cast<size_t>(t)] == a) pa = t + 1;
            if (order[static_cast<size_t>(t)] == b) pb = t + 1;
        }
        fr.adj[static_cast<size_t>(pa)][static_cast<size_t>(pb)] = 1;
        fr.adj[static_cast<size_t>(pb)][static_cast<size_t>(pa)] = 1;
    }
    return fr;
}

}  // namespace detail

// Orthogonal projector onto the nullspace of A: a PSD pre-stress of rank
// n-d-1 regardless of the graph.
template <class T>
inline StressMatrix<T> projection_prestress(const Matrix<T>& A, const Tolerances& tol) {
    int n = A.cols, d1 = A.rows;
    Matrix<T> B(d1, d1);
    for (int i = 0; i < d1; ++i)
        for (int j = 0; j < d1; ++j) {
            T acc(0);
            for (int k = 0; k < n; ++k) acc += A(i, k) * A(j, k);
            B(i, j) = acc;
        }
    // X = B^{-1} A, solved column by column
    Matrix<T> X(d1, n);
    for (int j = 0; j < n; ++j) {
        std::vector<T> col(static_cast<size_t>(d1));
        for (int i = 0; i < d1; ++i) col[static_cast<size_t>(i)] = A(i, j);
        std::vector<T> x;
        try {
            x = solve_square(B, col, tol);
        } catch (const SingularMatrix&) {
            throw DegenerateSpan("extended position matrix does not have full row rank");
        }
        for (int i = 0; i < d1; ++i) X(i, j) = x[static_cast<size_t>(i)];
    }
    Matrix<T> S(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            T acc(0);
            for (int k = 0; k < d1; ++k) acc += A(k, i) * X(k, j);
            S(i, j) = (i == j ? T(1) : T(0)) - acc;
        }
    if constexpr (!is_exact_backend<T>) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                double v = 0.5 * (S(i, j) + S(j, i));
                S(i, j) = v;
                S(j, i) = v;
            }
    }
    return StressMatrix<T>{std::move(S), StressKind::pre_stress, n - d1};
}

// Column k solves the predecessor system so that A L_k = 0 with the unit
// staircase normalization.
template <class T>
inline GaleMatrix<T> gale_matrix(const Framework<T>& F, const std::vector<int>& order,
                                 const Tolerances& tol) {
    auto val = validate_lateration_order(F.edges, order, F.d, F.n);
    if (!val.ok)
        throw OrderNotFound("supplied order is not a valid construction order (fails at vertex " +
                            std::to_string(val.failing_vertex) + ")");
    detail::Frame<T> fr = detail::make_frame(F, order, tol);
    int n = F.n, d = F.d, cols = n - d - 1;
    GaleMatrix<T> G;
    G.order = order;
    G.L = Matrix<T>(n, cols);
    for (int k = 1; k <= cols; ++k) {
        int vpos = d + 1 + k;  // position whose column this is
        std::vector<int> nb;
        for (int t = 1; t < vpos; ++t)
            if (fr.adj[static_cast<size_t>(t)][static_cast<size_t>(vpos)]) nb.push_back(t);
        Matrix<T> C(d + 1, static_cast<int>(nb.size()));
        for (int j = 0; j < static_cast<int>(nb.size()); ++j)
            for (int i = 0; i <= d; ++i) C(i, j) = fr.A(i, nb[static_cast<size_t>(j)] - 1);
        std::vector<int> sel;
        try {
            sel = detail::select_independent_columns(C, d + 1, tol).first;
        } catch (const SingularMatrix&) {
            std::vector<int> labels;
            for (int t : nb) labels.push_back(order[static_cast<size_t>(t) - 1]);
            throw SingularMatrix("general-position violation among the predecessors of vertex " +
                                     std::to_string(order[static_cast<size_t>(vpos) - 1]),
                                 labels);
        }
        Matrix<T> M(d + 1, d + 1);
        for (int j = 0; j <= d; ++j)
            for (int i = 0; i <= d; ++i) M(i, j) = C(i, sel[static_cast<size_t>(j)]);
        std::vector<T> rhs(static_cast<size_t>(d) + 1);
        for (int i = 0; i <= d; ++i) rhs[static_cast<size_t>(i)] = -fr.A(i, vpos - 1);
        std::vector<T> x = solve_square(M, rhs, tol);
        for (int j = 0; j <= d; ++j)
            G.L(nb[static_cast<size_t>(sel[static_cast<size_t>(j)])] - 1, k - 1) = x[static_cast<size_t>(j)];
        G.L(vpos - 1, k - 1) = T(1);
    }
    return G;
}

template <class T>
inline StressMatrix<T> pre_stress(const GaleMatrix<T>& G) {
    Matrix<T> S = G.L * G.L.transpose();
    return StressMatrix<T>{std::move(S), StressKind::pre_stress, G.L.cols};
}

namespace detail {

template <class T>
inline bool column_offedge_clean(const Matrix<T>& S, const Frame<T>& fr, int k) {
    for (int i = 1; i < k; ++i)
        if (!fr.adj[static_cast<size_t>(i)][static_cast<size_t>(k)] && !(S(i - 1, k - 1) == T(0)))
            return false;
    return true;
}

template <class T>
struct ColumnResult {
    std::vector<T> s;
    std::vector<int> selected_positions;
    bool reselected = false;
};

// Builds s^k and applies the rank-one update in place.
template <class T>
inline ColumnResult<T> purify_column_in_place(Matrix<T>& S, const Frame<T>& fr, int k,
                                              const Tolerances& tol) {
    int d = fr.d, n = fr.n;
    std::vector<T> s(static_cast<size_t>(n), T(0));
    s[static_cast<size_t>(k) - 1] = T(1);

    std::vector<int> nb;
    for (int t = 1; t < k; ++t)
        if (fr.adj[static_cast<size_t>(t)][static_cast<size_t>(k)]) nb.push_back(t);

    // off-edge predecessors cancel their current entries
    std::vector<int> off;
    for (int t = 1; t < k; ++t)
        if (!fr.adj[static_cast<size_t>(t)][static_cast<size_t>(k)]) {
            off.push_back(t);
            s[static_cast<size_t>(t) - 1] = -S(t - 1, k - 1);
        }

    Matrix<T> C(d + 1, static_cast<int>(nb.size()));
    for (int j = 0; j < static_cast<int>(nb.size()); ++j)
        for (int i = 0; i <= d; ++i) C(i, j) = fr.A(i, nb[static_cast<size_t>(j)] - 1);
    ColumnResult<T> res;
    std::vector<int> sel;
    try {
        auto pick = select_independent_columns(C, d + 1, tol);
        sel = pick.first;
        res.reselected = pick.second;
    } catch (const SingularMatrix&) {
        std::vector<int> labels;
        for (int t : nb) labels.push_back(fr.order[static_cast<size_t>(t) - 1]);
        throw SingularMatrix("general-position violation among the predecessors of vertex " +
                                 std::to_string(fr.order[static_cast<size_t>(k) - 1]),
                             labels);
    }

    // rhs = -(a_k + sum over cancelled entries s_i a_i)
    std::vector<T> rhs(static_cast<size_t>(d) + 1);
    for (int i = 0; i <= d; ++i) {
        T acc = fr.A(i, k - 1);
        for (int t : off) acc += s[static_cast<size_t>(t) - 1] * fr.A(i, t - 1);
        rhs[static_cast<size_t>(i)] = -acc;
    }
    Matrix<T> M(d + 1, d + 1);
    for (int j = 0; j <= d; ++j)
        for (int i = 0; i <= d; ++i) M(i, j) = C(i, sel[static_cast<size_t>(j)]);
    std::vector<T> x = solve_square(M, rhs, tol);
    for (int j = 0; j <= d; ++j) {
        int pos = nb[static_cast<size_t>(sel[static_cast<size_t>(j)])];
        s[static_cast<size_t>(pos) - 1] = x[static_cast<size_t>(j)];
        res.selected_positions.push_back(pos);
    }
    add_outer(S, s);
    res.s = std::move(s);
    return res;
}

}  // namespace detail

// One purification step at column position k. S must already satisfy the
// sweep's inductive hypothesis for columns > k.
template <class T>
inline std::pair<std::vector<T>, StressMatrix<T>> purify_column(const StressMatrix<T>& S, int k,
                                                                const Framework<T>& F,
                                                                const std::vector<int>& order,
                                                                const Tolerances& tol) {
    detail::Frame<T> fr = detail::make_frame(F, order, tol);
    Matrix<T> W = S.S;
    auto res = detail::purify_column_in_place(W, fr, k, tol);
    return {res.s, StressMatrix<T>{std::move(W), S.kind, S.rank_by_construction}};
}

// Reverse column sweep k = n .. d+3.
template <class T>
inline std::pair<StressMatrix<T>, PurificationTrace<T>> purify(const StressMatrix<T>& S0,
                                                               const Framework<T>& F,
                                                               const std::vector<int>& order,
                                                               const PipelineOptions& opts,
                                                               const Tolerances& tol) {
    detail::Frame<T> fr = detail::make_frame(F, order, tol);
    Matrix<T> S = S0.S;
    PurificationTrace<T> trace;
    for (int k = F.n; k >= F.d + 3; --k) {
        PurifyStep<T> step;
        step.position = k;
        step.vertex = order[static_cast<size_t>(k) - 1];
        if (opts.skip_rule && detail::column_offedge_clean(S, fr, k)) {
            step.skipped = true;
            trace.steps.push_back(std::move(step));
            continue;
        }
        auto res = detail::purify_column_in_place(S, fr, k, tol);
        step.s = std::move(res.s);
        step.reselected = res.reselected;
        for (int pos : res.selected_positions)
            step.selected.push_back(order[static_cast<size_t>(pos) - 1]);
        if (opts.check_steps) step.rank_after = matrix_rank(S, tol);
        trace.steps.push_back(std::move(step));
    }
    return {StressMatrix<T>{std::move(S), StressKind::stress, S0.rank_by_construction},
            std::move(trace)};
}

template <class T>
inline VerifyReport<T> verify_stress(const Matrix<T>& S, const Framework<T>& F, const Tolerances& tol) {
    if (S.rows != F.n || S.cols != F.n)
        throw DimensionMismatch("stress matrix must be n x n for the framework's n");
    VerifyReport<T> rep;
    rep.sym_ok = is_symmetric(S, tol);

    Matrix<T> A = detail::build_extended(F.positions);
    Matrix<T> R = A * S;
    if constexpr (is_exact_backend<T>) {
        rep.null_ok = max_abs(R).is_zero();
    } else {
        double scale = std::max(1.0, max_abs(A) * max_abs(S) * F.n);
        rep.null_ok = max_abs(R) <= tol.tol_solve * scale;
    }

    rep.offedge_ok = true;
    for (int i = 1; i <= F.n && rep.offedge_ok; ++i)
        for (int j = i + 1; j <= F.n; ++j) {
            if (F.edges.has(i, j)) continue;
            bool zero;
            if constexpr (is_exact_backend<T>) {
                zero = S(i - 1, j - 1).is_zero();
            } else {
                zero = std::fabs(S(i - 1, j - 1)) <= tol.tol_solve * std::max(1.0, max_abs(S));
            }
            if (!zero) {
                rep.offedge_ok = false;
                rep.offedge_witness = {i, j};
                break;
            }
        }

    if (rep.sym_ok) {
        auto psd = psd_check(S, tol);
        rep.psd_ok = psd.ok;
        rep.psd_witness = psd.witness;
    }

    if constexpr (is_exact_backend<T>) {
        // rank(A^T A) = rank(A) over the rationals, and A is only (d+1) x n.
        rep.gram_rank = matrix_rank(A, tol);
        // Certified rank sandwich: AS=0 bounds rank(S) from above by the
        // nullity of A, a mod-p rank bounds it from below. The bounds meet on
        // every valid certificate, sparing Bareiss the post-purification
        // coefficient sizes; any other input falls back to the direct rank.
        int target = F.n - rep.gram_rank;
        auto lower = rank_mod_p(S);
        if (rep.null_ok && lower && *lower == target)
            rep.rank = target;
        else
            rep.rank = matrix_rank(S, tol);
    } else {
        rep.rank = matrix_rank(S, tol);
        Matrix<T> G = A.transpose() * A;
        rep.gram_rank = matrix_rank(G, tol);
    }
    rep.rank_ok = rep.rank == F.n - F.d - 1;
    rep.complementarity_ok = rep.gram_rank + rep.rank == F.n;

    T dual(0);
    T maxterm(0);
    for (auto [i, j] : F.edges.pairs) {
        T d2(0);
        for (int t = 0; t < F.d; ++t) {
            T diff = F.positions(t, i - 1) - F.positions(t, j - 1);
            d2 += diff * diff;
        }
        T term = (T(0) - S(i - 1, j - 1)) * d2;
        dual += term;
        T a = term < T(0) ? T(0) - term : term;
        if (maxterm < a) maxterm = a;
    }
    rep.dual_obj = dual;
    if constexpr (is_exact_backend<T>) {
        rep.dual_obj_ok = dual.is_zero();
    } else {
        rep.dual_obj_ok = std::fabs(dual) <= tol.tol_solve * std::max(1.0, maxterm * F.edges.size());
    }
    return rep;
}

// Full pipeline: order -> Gale -> pre-stress -> purification -> verification.
template <class T>
inline CertifyResult<T> compute_stress_matrix(const Framework<T>& F, const PipelineOptions& opts,
                                              const Tolerances& tol) {
    CertifyResult<T> out;

    std::vector<int> order;
    if (opts.order_override) {
        order = *opts.order_override;
    } else if (F.order) {
        order = *F.order;
    } else {
        FindResult fr = find_lateration_order(F.edges, F.d, F.n, opts.finder_budget);
        if (fr.status == FindStatus::budget_exhausted)
            throw OrderNotFound("order search budget exhausted before finding a construction order",
                                true);
        if (fr.status == FindStatus::not_found)
            throw OrderNotFound("the graph admits no construction order for this dimension");
        order = fr.order.order;
        out.order_from_search = true;
    }
    auto val = validate_lateration_order(F.edges, order, F.d, F.n);
    if (!val.ok)
        throw OrderNotFound("supplied order is not a valid construction order (fails at vertex " +
                            std::to_string(val.failing_vertex) + ")");
    out.order = order;
    out.tree_instance = is_dplus1_tree(F.edges, order, F.d);

    if (opts.full_gp_scan) {
        GpReport gp = check_general_position(F.positions, tol);
        if (!gp.ok) {
            std::string msg = "general-position scan failed at points {";
            for (size_t i = 0; i < gp.failing.size(); ++i)
                msg += (i ? "," : "") + std::to_string(gp.failing[i]);
            msg += "}";
            throw DegenerateSpan(msg);
        }
    }

    out.gale = gale_matrix(F, order, tol);
    StressMatrix<T> pre = pre_stress(out.gale);
    auto [S_pos, trace] = purify(pre, F, order, opts, tol);
    out.trace = std::move(trace);

    // translate back to original vertex labels
    Matrix<T> S(F.n, F.n);
    for (int i = 0; i < F.n; ++i)
        for (int j = 0; j < F.n; ++j)
            S(order[static_cast<size_t>(i)] - 1, order[static_cast<size_t>(j)] - 1) = S_pos.S(i, j);
    out.stress = StressMatrix<T>{std::move(S), StressKind::stress, F.n - F.d - 1};

    if (opts.run_verify) out.report = verify_stress(out.stress.S, F, tol);
    return out;
}

}  // namespace stresscert
