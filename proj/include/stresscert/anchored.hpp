#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "stresscert/errors.hpp"
#include "stresscert/framework.hpp"
#include "stresscert/numerics.hpp"

namespace stresscert {

// The anchored pipeline works on a (d+n)x(d+n) matrix whose first d
// rows/columns belong to the ambient-space block and whose row d+l belongs to
// sensor l. As in the bar-framework pipeline, the construction relabels
// sensors by their order; anchored_stress translates results back.

template <class T>
struct AnchoredStress {
    Matrix<T> S;  // (d+n) x (d+n), original sensor labels
    // Dual-variable block: top-left of S minus the anchor rank-one terms
    // sum w̄_{kj} p̄_k p̄_k^T. The zero-duality-gap identity uses its trace.
    Matrix<T> V;
    std::map<std::pair<int, int>, T> sensor_weights;  // (i<j) on sensor edges
    std::map<std::pair<int, int>, T> anchor_weights;  // (anchor k, sensor j)
};

template <class T>
struct AnchoredStep {
    int position = 0;  // order position of the processed sensor
    int sensor = 0;    // original sensor label
    std::vector<T> s;  // length d+n, order frame
    std::vector<int> selected_anchors;  // anchor labels used as unknowns
    std::vector<int> selected_sensors;  // original sensor labels used as unknowns
    bool reselected = false;
    std::optional<int> rank_after;
};

template <class T>
struct AnchoredTrace {
    std::vector<AnchoredStep<T>> steps;
};

template <class T>
struct AnchoredVerifyReport {
    bool sym_ok = false;
    bool znull_ok = false;
    bool psd_ok = false;
    bool rank_ok = false;
    bool offedge_ok = false;
    bool weights_ok = false;
    bool gap_ok = false;
    int rank = -1;
    T gap = T(0);
    std::optional<T> psd_witness;
    std::optional<std::pair<int, int>> offedge_witness;  // sensor labels
    std::optional<int> weights_witness;                  // sensor whose recovery failed

    bool pass() const {
        return sym_ok && znull_ok && psd_ok && rank_ok && offedge_ok && weights_ok && gap_ok;
    }
};

struct AnchoredOptions {
    bool check_steps = false;
    bool run_verify = true;
    std::optional<std::vector<int>> order_override;  // sensor order (1..n)
    long finder_budget = 1'000'000;
};

template <class T>
struct AnchoredResult {
    AnchoredStress<T> stress;
    AnchoredTrace<T> trace;
    std::vector<int> sensor_order;
    bool order_from_search = false;
    AnchoredVerifyReport<T> report;
};

// Validation of a sensor processing order: every sensor needs at least d+1
// predecessors among its anchor edges plus earlier sensors. Anchors always
// precede all sensors and are mutually visible by convention.
inline OrderValidation validate_anchored_order(const std::set<std::pair<int, int>>& anchor_edges,
                                               const EdgeSet& sensor_edges,
                                               const std::vector<int>& sensor_order, int d, int m,
                                               int n) {
    OrderValidation res;
    res.exact_sizes = true;
    if (m < d + 1) return res;
    if (static_cast<int>(sensor_order.size()) != n) return res;
    std::vector<bool> seen(static_cast<size_t>(n) + 1, false);
    for (int v : sensor_order) {
        if (v < 1 || v > n || seen[static_cast<size_t>(v)]) return res;
        seen[static_cast<size_t>(v)] = true;
    }
    std::vector<bool> placed(static_cast<size_t>(n) + 1, false);
    for (int t = 0; t < n; ++t) {
        int v = sensor_order[static_cast<size_t>(t)];
        int cnt = 0;
        for (int k = 1; k <= m; ++k)
            if (anchor_edges.count({k, v})) ++cnt;
        for (int u = 1; u <= n; ++u)
            if (placed[static_cast<size_t>(u)] && sensor_edges.has(u, v)) ++cnt;
        if (cnt < d + 1) {
            res.failing_vertex = v;
            return res;
        }
        if (cnt != d + 1) res.exact_sizes = false;
        placed[static_cast<size_t>(v)] = true;
    }
    res.ok = true;
    return res;
}

inline FindResult find_anchored_order(const std::set<std::pair<int, int>>& anchor_edges,
                                      const EdgeSet& sensor_edges, int d, int m, int n,
                                      long budget = 1'000'000) {
    FindResult res;
    if (m < d + 1) {
        res.status = FindStatus::not_found;
        return res;
    }
    std::vector<int> chosen;
    std::vector<bool> used(static_cast<size_t>(n) + 1, false);
    long states = 0;
    bool exhausted = false;

    auto anchor_deg = [&](int v) {
        int c = 0;
        for (int k = 1; k <= m; ++k)
            if (anchor_edges.count({k, v})) ++c;
        return c;
    };

    std::function<bool()> dfs = [&]() -> bool {
        if (static_cast<int>(chosen.size()) == n) return true;
        for (int v = 1; v <= n; ++v) {
            if (used[static_cast<size_t>(v)]) continue;
            if (++states > budget) {
                exhausted = true;
                return false;
            }
            int cnt = anchor_deg(v);
            for (int u : chosen)
                if (sensor_edges.has(u, v)) ++cnt;
            if (cnt < d + 1) continue;
            used[static_cast<size_t>(v)] = true;
            chosen.push_back(v);
            if (dfs()) return true;
            chosen.pop_back();
            used[static_cast<size_t>(v)] = false;
            if (exhausted) return false;
        }
        return false;
    };
    bool found = dfs();
    res.states_explored = states;
    if (found) {
        res.status = FindStatus::found;
        res.order = LaterationOrder{chosen, d};
    } else {
        res.status = exhausted ? FindStatus::budget_exhausted : FindStatus::not_found;
    }
    return res;
}

// [[PP^T, -P], [-P^T, I]]: PSD of rank n with Z S = 0 built in.
template <class T>
inline Matrix<T> anchored_prestress(const Matrix<T>& sensors) {
    int d = sensors.rows, n = sensors.cols;
    Matrix<T> S(d + n, d + n);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            T acc(0);
            for (int k = 0; k < n; ++k) acc += sensors(i, k) * sensors(j, k);
            S(i, j) = acc;
        }
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < n; ++j) {
            S(i, d + j) = -sensors(i, j);
            S(d + j, i) = -sensors(i, j);
        }
    for (int j = 0; j < n; ++j) S(d + j, d + j) = T(1);
    return S;
}

// The matrix the dual certificate must annihilate.
template <class T>
inline Matrix<T> anchored_gram(const Matrix<T>& sensors) {
    int d = sensors.rows, n = sensors.cols;
    Matrix<T> Z(d + n, d + n);
    for (int i = 0; i < d; ++i) Z(i, i) = T(1);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < n; ++j) {
            Z(i, d + j) = sensors(i, j);
            Z(d + j, i) = sensors(i, j);
        }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            T acc(0);
            for (int t = 0; t < d; ++t) acc += sensors(t, i) * sensors(t, j);
            Z(d + i, d + j) = acc;
        }
    return Z;
}

namespace detail {

template <class T>
struct AnchoredFrame {
    int d = 0, m = 0, n = 0;
    std::vector<int> order;     // position -> original sensor label
    Matrix<T> anchors;          // d x m (labels unchanged)
    Matrix<T> sensors;          // d x n, columns by position
    std::vector<std::vector<char>> sadj;           // sensor-position adjacency
    std::vector<std::vector<char>> aadj;           // aadj[k][pos]: anchor k ~ sensor position
};

template <class T>
inline AnchoredFrame<T> make_anchored_frame(const AnchoredNetwork<T>& N,
                                            const std::vector<int>& order) {
    AnchoredFrame<T> fr;
    fr.d = N.d;
    fr.m = N.m;
    fr.n = N.n;
    fr.order = order;
    fr.anchors = N.anchors;
    fr.sensors = Matrix<T>(N.d, N.n);
    std::vector<int> pos_of(static_cast<size_t>(N.n) + 1, 0);
    for (int t = 0; t < N.n; ++t) {
        int v = order[static_cast<size_t>(t)];
        pos_of[static_cast<size_t>(v)] = t + 1;
        for (int i = 0; i < N.d; ++i) fr.sensors(i, t) = N.sensors(i, v - 1);
    }
    fr.sadj.assign(static_cast<size_t>(N.n) + 1, std::vector<char>(static_cast<size_t>(N.n) + 1, 0));
    for (auto [a, b] : N.sensor_edges.pairs) {
        int pa = pos_of[static_cast<size_t>(a)], pb = pos_of[static_cast<size_t>(b)];
        fr.sadj[static_cast<size_t>(pa)][static_cast<size_t>(pb)] = 1;
        fr.sadj[static_cast<size_t>(pb)][static_cast<size_t>(pa)] = 1;
    }
    fr.aadj.assign(static_cast<size_t>(N.m) + 1, std::vector<char>(static_cast<size_t>(N.n) + 1, 0));
    for (auto [k, s] : N.anchor_edges) fr.aadj[static_cast<size_t>(k)][static_cast<size_t>(pos_of[static_cast<size_t>(s)])] = 1;
    return fr;
}

template <class T>
struct AnchoredColumnResult {
    std::vector<T> s;
    std::vector<std::pair<int, T>> anchor_w;  // (anchor label, weight), selected unknowns
    std::vector<std::pair<int, T>> sensor_w;  // (sensor position, weight), selected unknowns
    bool reselected = false;
};

// Column d+l: solve the d+1 unknown edge stresses of sensor position l, then
// apply the rank-one update.
template <class T>
inline AnchoredColumnResult<T> anchored_column_in_place(Matrix<T>& S, const AnchoredFrame<T>& fr,
                                                        int l, const Tolerances& tol) {
    int d = fr.d, n = fr.n;
    int col = d + l - 1;  // 0-based column of sensor position l

    // candidate predecessor columns: anchors first, then earlier sensors
    std::vector<int> cand_anchor, cand_sensor;
    for (int k = 1; k <= fr.m; ++k)
        if (fr.aadj[static_cast<size_t>(k)][static_cast<size_t>(l)]) cand_anchor.push_back(k);
    for (int i = 1; i < l; ++i)
        if (fr.sadj[static_cast<size_t>(i)][static_cast<size_t>(l)]) cand_sensor.push_back(i);
    int q = static_cast<int>(cand_anchor.size() + cand_sensor.size());

    Matrix<T> C(d + 1, q);
    for (int j = 0; j < static_cast<int>(cand_anchor.size()); ++j) {
        for (int i = 0; i < d; ++i) C(i, j) = fr.anchors(i, cand_anchor[static_cast<size_t>(j)] - 1);
        C(d, j) = T(1);
    }
    for (int j = 0; j < static_cast<int>(cand_sensor.size()); ++j) {
        int cj = static_cast<int>(cand_anchor.size()) + j;
        for (int i = 0; i < d; ++i) C(i, cj) = fr.sensors(i, cand_sensor[static_cast<size_t>(j)] - 1);
        C(d, cj) = T(1);
    }

    AnchoredColumnResult<T> res;
    std::vector<int> sel;
    try {
        auto pick = select_independent_columns(C, d + 1, tol);
        sel = pick.first;
        res.reselected = pick.second;
    } catch (const SingularMatrix&) {
        std::vector<int> labels;
        for (int k : cand_anchor) labels.push_back(-k);  // negative marks anchors
        for (int i : cand_sensor) labels.push_back(fr.order[static_cast<size_t>(i) - 1]);
        throw SingularMatrix("general-position violation among the predecessors of sensor " +
                                 std::to_string(fr.order[static_cast<size_t>(l) - 1]),
                             labels);
    }

    // rhs rows 1..d: p_l - S_{1:d,col} - sum_{i<l} S_{d+i,col} p_i
    // rhs row d+1: 1 + S_{col,col} + sum_{i>l} S_{d+i,col}
    std::vector<T> rhs(static_cast<size_t>(d) + 1);
    for (int i = 0; i < d; ++i) {
        T acc = fr.sensors(i, l - 1) - S(i, col);
        for (int t = 1; t < l; ++t) acc -= S(d + t - 1, col) * fr.sensors(i, t - 1);
        rhs[static_cast<size_t>(i)] = acc;
    }
    {
        T acc = T(1) + S(col, col);
        for (int t = l + 1; t <= n; ++t) acc += S(d + t - 1, col);
        rhs[static_cast<size_t>(d)] = acc;
    }

    Matrix<T> M(d + 1, d + 1);
    for (int j = 0; j <= d; ++j)
        for (int i = 0; i <= d; ++i) M(i, j) = C(i, sel[static_cast<size_t>(j)]);
    std::vector<T> x = solve_square(M, rhs, tol);

    std::vector<T> wbar(static_cast<size_t>(fr.m) + 1, T(0));       // by anchor label
    std::vector<T> wsel(static_cast<size_t>(n) + 1, T(0));          // by sensor position
    for (int j = 0; j <= d; ++j) {
        int c = sel[static_cast<size_t>(j)];
        if (c < static_cast<int>(cand_anchor.size())) {
            int k = cand_anchor[static_cast<size_t>(c)];
            wbar[static_cast<size_t>(k)] = x[static_cast<size_t>(j)];
            res.anchor_w.emplace_back(k, x[static_cast<size_t>(j)]);
        } else {
            int i = cand_sensor[static_cast<size_t>(c) - cand_anchor.size()];
            wsel[static_cast<size_t>(i)] = x[static_cast<size_t>(j)];
            res.sensor_w.emplace_back(i, x[static_cast<size_t>(j)]);
        }
    }

    std::vector<T> s(static_cast<size_t>(d + n), T(0));
    for (int i = 0; i < d; ++i) {
        T acc = T(0) - S(i, col);
        for (auto& [k, w] : res.anchor_w) acc -= w * fr.anchors(i, k - 1);
        s[static_cast<size_t>(i)] = acc;
    }
    for (int i = 1; i < l; ++i)
        s[static_cast<size_t>(d + i) - 1] = T(0) - wsel[static_cast<size_t>(i)] - S(d + i - 1, col);
    s[static_cast<size_t>(col)] = T(1);

    add_outer(S, s);
    res.s = std::move(s);
    return res;
}

}  // namespace detail

// Single-column public entry point (order frame).
template <class T>
inline std::pair<std::vector<T>, Matrix<T>> anchored_purify_column(const Matrix<T>& S, int l,
                                                                   const AnchoredNetwork<T>& N,
                                                                   const std::vector<int>& sensor_order,
                                                                   const Tolerances& tol) {
    detail::AnchoredFrame<T> fr = detail::make_anchored_frame(N, sensor_order);
    Matrix<T> W = S;
    auto res = detail::anchored_column_in_place(W, fr, l, tol);
    return {std::move(res.s), std::move(W)};
}

template <class T>
inline AnchoredVerifyReport<T> verify_anchored_stress(const Matrix<T>& S, const AnchoredNetwork<T>& N,
                                                      const Tolerances& tol) {
    int d = N.d, n = N.n, m = N.m;
    if (S.rows != d + n || S.cols != d + n)
        throw DimensionMismatch("anchored stress matrix must be (d+n) x (d+n)");
    AnchoredVerifyReport<T> rep;
    rep.sym_ok = is_symmetric(S, tol);

    Matrix<T> Z = anchored_gram(N.sensors);
    Matrix<T> R = Z * S;
    if constexpr (is_exact_backend<T>) {
        rep.znull_ok = max_abs(R).is_zero();
    } else {
        double scale = std::max(1.0, max_abs(Z) * max_abs(S) * (d + n));
        rep.znull_ok = max_abs(R) <= tol.tol_solve * scale;
    }

    if (rep.sym_ok) {
        auto psd = psd_check(S, tol);
        rep.psd_ok = psd.ok;
        rep.psd_witness = psd.witness;
    }

    if constexpr (is_exact_backend<T>) {
        // Same certified sandwich as the framework verifier: ZS=0 caps
        // rank(S) at (d+n) - rank(Z), the mod-p rank raises the floor.
        int target = d + n - matrix_rank(Z, tol);
        auto lower = rank_mod_p(S);
        if (rep.znull_ok && lower && *lower == target)
            rep.rank = target;
        else
            rep.rank = matrix_rank(S, tol);
    } else {
        rep.rank = matrix_rank(S, tol);
    }
    rep.rank_ok = rep.rank == n;

    rep.offedge_ok = true;
    for (int i = 1; i <= n && rep.offedge_ok; ++i)
        for (int j = i + 1; j <= n; ++j) {
            if (N.sensor_edges.has(i, j)) continue;
            bool zero;
            if constexpr (is_exact_backend<T>) {
                zero = S(d + i - 1, d + j - 1).is_zero();
            } else {
                zero = std::fabs(S(d + i - 1, d + j - 1)) <= tol.tol_solve * std::max(1.0, max_abs(S));
            }
            if (!zero) {
                rep.offedge_ok = false;
                rep.offedge_witness = {i, j};
                break;
            }
        }

    // weight recovery: sensor-sensor weights read off the matrix, per-sensor
    // anchor weights solved from the top-block and diagonal equations jointly
    rep.weights_ok = true;
    std::map<std::pair<int, int>, T> wbar;
    for (int j = 1; j <= n && rep.weights_ok; ++j) {
        std::vector<int> ak;
        for (int k = 1; k <= m; ++k)
            if (N.anchor_edges.count({k, j})) ak.push_back(k);
        Matrix<T> C(d + 1, static_cast<int>(ak.size()));
        for (int c = 0; c < static_cast<int>(ak.size()); ++c) {
            for (int i = 0; i < d; ++i) C(i, c) = N.anchors(i, ak[static_cast<size_t>(c)] - 1);
            C(d, c) = T(1);
        }
        std::vector<T> rhs(static_cast<size_t>(d) + 1);
        for (int i = 0; i < d; ++i) rhs[static_cast<size_t>(i)] = T(0) - S(i, d + j - 1);
        T diag = S(d + j - 1, d + j - 1);
        for (int i = 1; i <= n; ++i) {
            if (i == j || !N.sensor_edges.has(i, j)) continue;
            diag -= T(0) - S(d + i - 1, d + j - 1);  // subtract w_ij
        }
        rhs[static_cast<size_t>(d)] = diag;
        auto sol = solve_consistent(C, rhs, tol);
        if (!sol) {
            rep.weights_ok = false;
            rep.weights_witness = j;
            break;
        }
        for (int c = 0; c < static_cast<int>(ak.size()); ++c)
            wbar[{ak[static_cast<size_t>(c)], j}] = (*sol)[static_cast<size_t>(c)];
    }

    // zero duality gap: tr(V) + sum w d^2 + sum w̄ d̄^2 with V the dual block
    if (rep.weights_ok) {
        T trV(0);
        for (int i = 0; i < d; ++i) trV += S(i, i);
        for (auto& [kj, w] : wbar) {
            auto [k, j] = kj;
            T norm2(0);
            for (int i = 0; i < d; ++i) norm2 += N.anchors(i, k - 1) * N.anchors(i, k - 1);
            trV -= w * norm2;
        }
        T gap = trV;
        T maxterm(1);
        for (auto [i, j] : N.sensor_edges.pairs) {
            T dij2(0);
            for (int t = 0; t < d; ++t) {
                T diff = N.sensors(t, i - 1) - N.sensors(t, j - 1);
                dij2 += diff * diff;
            }
            T w = T(0) - S(d + i - 1, d + j - 1);
            T term = w * dij2;
            gap += term;
            T a = term < T(0) ? T(0) - term : term;
            if (maxterm < a) maxterm = a;
        }
        for (auto& [kj, w] : wbar) {
            auto [k, j] = kj;
            T dkj2(0);
            for (int t = 0; t < d; ++t) {
                T diff = N.anchors(t, k - 1) - N.sensors(t, j - 1);
                dkj2 += diff * diff;
            }
            T term = w * dkj2;
            gap += term;
            T a = term < T(0) ? T(0) - term : term;
            if (maxterm < a) maxterm = a;
        }
        rep.gap = gap;
        if constexpr (is_exact_backend<T>) {
            rep.gap_ok = gap.is_zero();
        } else {
            int terms = static_cast<int>(N.sensor_edges.size() + wbar.size()) + 1;
            rep.gap_ok = std::fabs(gap) <= tol.tol_solve * std::max(1.0, to_double(maxterm) * terms);
        }
    }
    return rep;
}

// Full anchored pipeline: prestress, then one uniform pass over every sensor
// column from the last position down to the first.
template <class T>
inline AnchoredResult<T> anchored_stress(const AnchoredNetwork<T>& N, const AnchoredOptions& opts,
                                         const Tolerances& tol) {
    AnchoredResult<T> out;
    int d = N.d, n = N.n;

    std::vector<int> order;
    if (opts.order_override) {
        order = *opts.order_override;
    } else if (N.sensor_order) {
        order = *N.sensor_order;
    } else {
        FindResult fr = find_anchored_order(N.anchor_edges, N.sensor_edges, d, N.m, n, opts.finder_budget);
        if (fr.status == FindStatus::budget_exhausted)
            throw OrderNotFound("order search budget exhausted before finding a construction order",
                                true);
        if (fr.status == FindStatus::not_found)
            throw OrderNotFound("the network admits no construction order for this dimension");
        order = fr.order.order;
        out.order_from_search = true;
    }
    auto val = validate_anchored_order(N.anchor_edges, N.sensor_edges, order, d, N.m, n);
    if (!val.ok)
        throw OrderNotFound("supplied sensor order is not a valid construction order (fails at sensor " +
                            std::to_string(val.failing_vertex) + ")");
    out.sensor_order = order;

    detail::AnchoredFrame<T> fr = detail::make_anchored_frame(N, order);
    Matrix<T> S = anchored_prestress(fr.sensors);

    AnchoredStress<T> result;
    for (auto [i, j] : N.sensor_edges.pairs) result.sensor_weights[{i, j}] = T(0);
    for (auto [k, j] : N.anchor_edges) result.anchor_weights[{k, j}] = T(0);

    for (int l = n; l >= 1; --l) {
        auto res = detail::anchored_column_in_place(S, fr, l, tol);
        AnchoredStep<T> step;
        step.position = l;
        step.sensor = order[static_cast<size_t>(l) - 1];
        step.s = res.s;
        step.reselected = res.reselected;
        for (auto& [k, w] : res.anchor_w) {
            step.selected_anchors.push_back(k);
            result.anchor_weights[{k, step.sensor}] = w;
        }
        for (auto& [ipos, w] : res.sensor_w) {
            int u = order[static_cast<size_t>(ipos) - 1];
            step.selected_sensors.push_back(u);
            int a = std::min(u, step.sensor), b = std::max(u, step.sensor);
            result.sensor_weights[{a, b}] = w;
        }
        if (opts.check_steps) step.rank_after = matrix_rank(S, tol);
        out.trace.steps.push_back(std::move(step));
    }

    // translate sensor indices back to original labels
    Matrix<T> Sout(d + n, d + n);
    auto glob = [&](int idx) {  // frame row -> original row
        if (idx < d) return idx;
        return d + order[static_cast<size_t>(idx - d)] - 1;
    };
    for (int i = 0; i < d + n; ++i)
        for (int j = 0; j < d + n; ++j) Sout(glob(i), glob(j)) = S(i, j);
    result.S = std::move(Sout);

    result.V = Matrix<T>(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) result.V(i, j) = result.S(i, j);
    for (auto& [kj, w] : result.anchor_weights) {
        int k = kj.first;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                result.V(i, j) -= w * N.anchors(i, k - 1) * N.anchors(j, k - 1);
    }

    out.stress = std::move(result);
    if (opts.run_verify) out.report = verify_anchored_stress(out.stress.S, N, tol);
    return out;
}

}  // namespace stresscert
