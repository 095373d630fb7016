#pragma once

#include <set>
#include <utility>
#include <vector>

namespace stresscert {

// Undirected simple graph on vertices 1..n, edges normalized to i < j.
struct EdgeSet {
    std::set<std::pair<int, int>> pairs;

    void add(int i, int j);
    bool has(int i, int j) const;
    std::size_t size() const { return pairs.size(); }
    std::vector<std::pair<int, int>> sorted() const { return {pairs.begin(), pairs.end()}; }
};

// A construction order: position t (1-based) holds vertex order[t-1]. The
// first d+1 positions must form a clique and every later vertex needs at
// least d+1 neighbors among its predecessors.
struct LaterationOrder {
    std::vector<int> order;
    int d = 0;
};

// Neighbors of the vertex at position k (1-based) among positions 1..k-1,
// reported as sorted vertex labels.
std::vector<int> neighbors_before(const EdgeSet& edges, const std::vector<int>& order, int k);

struct OrderValidation {
    bool ok = false;
    int failing_vertex = 0;  // vertex at the first violating position (0 when ok)
    bool exact_sizes = false;  // every later vertex has exactly d+1 predecessors
};

OrderValidation validate_lateration_order(const EdgeSet& edges, const std::vector<int>& order, int d,
                                          int n);

enum class FindStatus { found, not_found, budget_exhausted };

struct FindResult {
    FindStatus status = FindStatus::not_found;
    LaterationOrder order;
    long states_explored = 0;
};

// Depth-first search for a valid order, trying candidate vertices in
// ascending label order, so a successful search returns the
// lexicographically smallest valid order. Each candidate placement counts
// one unit of budget; running out yields budget_exhausted, which is weaker
// than not_found.
FindResult find_lateration_order(const EdgeSet& edges, int d, int n, long budget = 1'000'000);

// True when every later vertex's predecessor neighborhood is itself a
// clique (the purification sweep then has nothing to do).
bool is_dplus1_tree(const EdgeSet& edges, const std::vector<int>& order, int d);

}  // namespace stresscert
