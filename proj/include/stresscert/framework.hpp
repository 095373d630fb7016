#pragma once

#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "stresscert/errors.hpp"
#include "stresscert/graph.hpp"
#include "stresscert/numerics.hpp"

namespace stresscert {

// A bar framework: n points in R^d (columns of positions) plus a graph on
// vertex labels 1..n. Requires d <= n-1 so the points can affinely span.
template <class T>
struct Framework {
    int d = 0, n = 0;
    Matrix<T> positions;  // d x n
    EdgeSet edges;
    std::optional<std::vector<int>> order;
};

// Anchored network: m anchors at known positions, n sensors, anchor-sensor
// edges and sensor-sensor edges kept separately. Anchors are pairwise
// "visible" by assumption, so no anchor-anchor edges are stored. In any
// combined ordering the anchors come first.
template <class T>
struct AnchoredNetwork {
    int d = 0, m = 0, n = 0;
    Matrix<T> anchors;  // d x m
    Matrix<T> sensors;  // d x n
    std::set<std::pair<int, int>> anchor_edges;  // (anchor 1..m, sensor 1..n)
    EdgeSet sensor_edges;                        // sensor pairs
    std::optional<std::vector<int>> sensor_order;  // permutation of 1..n
};

// The (d+1) x n matrix whose column j is the position of vertex j with a 1
// appended. Throws DegenerateSpan unless it has full row rank, i.e. the
// points affinely span R^d.
template <class T>
inline Matrix<T> extended_position_matrix(const Matrix<T>& positions, const Tolerances& tol) {
    int d = positions.rows, n = positions.cols;
    Matrix<T> A(d + 1, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < d; ++i) A(i, j) = positions(i, j);
        A(d, j) = T(1);
    }
    if (matrix_rank(A, tol) != d + 1)
        throw DegenerateSpan("points do not affinely span the ambient space");
    return A;
}

template <class T>
inline Matrix<T> extended_position_matrix(const Framework<T>& F, const Tolerances& tol) {
    return extended_position_matrix(F.positions, tol);
}

struct GpReport {
    bool ok = true;
    std::vector<int> failing;  // 1-based point labels of a dependent (d+1)-subset
};

enum class GpMode { lazy, full };

namespace detail {

// Extended position matrix without the span check; the verifier uses this so
// it can report degeneracy instead of throwing.
template <class T>
inline Matrix<T> build_extended(const Matrix<T>& positions) {
    Matrix<T> A(positions.rows + 1, positions.cols);
    for (int j = 0; j < positions.cols; ++j) {
        for (int i = 0; i < positions.rows; ++i) A(i, j) = positions(i, j);
        A(positions.rows, j) = T(1);
    }
    return A;
}

template <class T>
inline bool affinely_independent(const Matrix<T>& positions, const std::vector<int>& subset,
                                 const Tolerances& tol) {
    int d = positions.rows;
    Matrix<T> A(d + 1, static_cast<int>(subset.size()));
    for (int c = 0; c < static_cast<int>(subset.size()); ++c) {
        int p = subset[static_cast<size_t>(c)] - 1;
        for (int i = 0; i < d; ++i) A(i, c) = positions(i, p);
        A(d, c) = T(1);
    }
    return matrix_rank(A, tol) == static_cast<int>(subset.size());
}

}  // namespace detail

// Full scan over all (d+1)-subsets is exponential in d+1; the lazy mode is
// what the pipeline uses (it checks exactly the subsets it solves on).
template <class T>
inline GpReport check_general_position(const Matrix<T>& positions, const Tolerances& tol) {
    GpReport rep;
    int d = positions.rows, n = positions.cols;
    if (n < d + 1) return rep;
    std::vector<int> subset(static_cast<size_t>(d) + 1);
    for (int i = 0; i <= d; ++i) subset[static_cast<size_t>(i)] = i + 1;
    while (true) {
        if (!detail::affinely_independent(positions, subset, tol)) {
            rep.ok = false;
            rep.failing = subset;
            return rep;
        }
        int i = d;
        while (i >= 0 && subset[static_cast<size_t>(i)] == n - d + i) --i;
        if (i < 0) break;
        ++subset[static_cast<size_t>(i)];
        for (int j = i + 1; j <= d; ++j) subset[static_cast<size_t>(j)] = subset[static_cast<size_t>(j) - 1] + 1;
    }
    return rep;
}

}  // namespace stresscert
