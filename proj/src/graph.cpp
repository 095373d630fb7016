#include "stresscert/graph.hpp"

#include <algorithm>

#include "stresscert/errors.hpp"

namespace stresscert {

void EdgeSet::add(int i, int j) {
    if (i == j) throw ParseError("self-loop at vertex " + std::to_string(i));
    if (i > j) std::swap(i, j);
    pairs.emplace(i, j);
}

bool EdgeSet::has(int i, int j) const {
    if (i == j) return false;
    if (i > j) std::swap(i, j);
    return pairs.count({i, j}) > 0;
}

std::vector<int> neighbors_before(const EdgeSet& edges, const std::vector<int>& order, int k) {
    std::vector<int> out;
    int v = order.at(static_cast<size_t>(k) - 1);
    for (int t = 0; t + 1 < k; ++t) {
        int u = order[static_cast<size_t>(t)];
        if (edges.has(u, v)) out.push_back(u);
    }
    std::sort(out.begin(), out.end());
    return out;
}

OrderValidation validate_lateration_order(const EdgeSet& edges, const std::vector<int>& order, int d,
                                          int n) {
    OrderValidation res;
    res.exact_sizes = true;
    if (static_cast<int>(order.size()) != n) return res;
    std::vector<bool> seen(static_cast<size_t>(n) + 1, false);
    for (int v : order) {
        if (v < 1 || v > n || seen[static_cast<size_t>(v)]) return res;
        seen[static_cast<size_t>(v)] = true;
    }
    int head = std::min(n, d + 1);
    for (int t = 1; t < head; ++t)
        for (int u = 0; u < t; ++u)
            if (!edges.has(order[static_cast<size_t>(u)], order[static_cast<size_t>(t)])) {
                res.failing_vertex = order[static_cast<size_t>(t)];
                return res;
            }
    for (int k = d + 2; k <= n; ++k) {
        auto nb = neighbors_before(edges, order, k);
        if (static_cast<int>(nb.size()) < d + 1) {
            res.failing_vertex = order[static_cast<size_t>(k) - 1];
            return res;
        }
        if (static_cast<int>(nb.size()) != d + 1) res.exact_sizes = false;
    }
    res.ok = true;
    return res;
}

namespace {

struct Search {
    const EdgeSet& edges;
    int d, n;
    long budget;
    long states = 0;
    std::vector<int> chosen;
    std::vector<bool> used;
    bool exhausted = false;

    bool admissible(int v) const {
        int t = static_cast<int>(chosen.size());  // position index (0-based) v would take
        if (t < d + 1) {
            for (int u : chosen)
                if (!edges.has(u, v)) return false;
            return true;
        }
        int cnt = 0;
        for (int u : chosen)
            if (edges.has(u, v) && ++cnt > d) return true;
        return false;
    }

    bool dfs() {
        if (static_cast<int>(chosen.size()) == n) return true;
        for (int v = 1; v <= n; ++v) {
            if (used[static_cast<size_t>(v)]) continue;
            if (++states > budget) {
                exhausted = true;
                return false;
            }
            if (!admissible(v)) continue;
            used[static_cast<size_t>(v)] = true;
            chosen.push_back(v);
            if (dfs()) return true;
            chosen.pop_back();
            used[static_cast<size_t>(v)] = false;
            if (exhausted) return false;
        }
        return false;
    }
};

}  // namespace

FindResult find_lateration_order(const EdgeSet& edges, int d, int n, long budget) {
    FindResult res;
    Search s{edges, d, n, budget, 0, {}, std::vector<bool>(static_cast<size_t>(n) + 1, false), false};
    bool found = s.dfs();
    res.states_explored = s.states;
    if (found) {
        res.status = FindStatus::found;
        res.order = LaterationOrder{s.chosen, d};
    } else {
        res.status = s.exhausted ? FindStatus::budget_exhausted : FindStatus::not_found;
    }
    return res;
}

bool is_dplus1_tree(const EdgeSet& edges, const std::vector<int>& order, int d) {
    int n = static_cast<int>(order.size());
    for (int k = d + 2; k <= n; ++k) {
        auto nb = neighbors_before(edges, order, k);
        for (size_t a = 0; a < nb.size(); ++a)
            for (size_t b = a + 1; b < nb.size(); ++b)
                if (!edges.has(nb[a], nb[b])) return false;
    }
    return true;
}

}  // namespace stresscert
