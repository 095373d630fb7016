#include "stresscert/gen.hpp"

#include <set>
#include <string>
#include <utility>
#include <vector>

namespace stresscert {

namespace {

void check_common(const GenOptions& opt) {
    if (opt.d < 1) throw ParseError("generator requires dim >= 1");
    if (opt.coord_min >= opt.coord_max) throw ParseError("generator coordinate range is empty");
    if (opt.max_resamples < 1) throw ParseError("generator resample budget must be positive");
}

Matrix<Rat> sample_coords(Rng& rng, const GenOptions& opt, int count) {
    Matrix<Rat> P(opt.d, count);
    for (int j = 0; j < count; ++j)
        for (int i = 0; i < opt.d; ++i) P(i, j) = Rat(rng.range(opt.coord_min, opt.coord_max));
    return P;
}

// Every subset here feeds a (d+1)-column linear system later, so reject any
// coordinate draw that leaves one of them affinely dependent.
bool subsets_in_general_position(const Matrix<Rat>& P, const std::vector<std::vector<int>>& subsets) {
    Tolerances tol;
    for (const auto& s : subsets)
        if (!detail::affinely_independent(P, s, tol)) return false;
    return true;
}

}  // namespace

Framework<Rat> generate_framework(const GenOptions& opt) {
    check_common(opt);
    if (opt.n < opt.d + 1) throw ParseError("generator requires n >= dim+1");
    if (opt.extra_edges < 0) throw ParseError("extra edge count must be non-negative");
    if (opt.tree && opt.extra_edges > 0)
        throw ParseError("tree mode admits no extra edges");

    Rng rng(opt.seed);
    int d = opt.d, n = opt.n;

    EdgeSet edges;
    for (int i = 1; i <= std::min(n, d + 1); ++i)
        for (int j = i + 1; j <= std::min(n, d + 1); ++j) edges.add(i, j);

    std::vector<std::vector<int>> attach_sets;  // predecessor set per vertex > d+1
    std::vector<std::vector<int>> cliques;      // tree mode bookkeeping
    if (opt.tree) {
        std::vector<int> seed_clique;
        for (int i = 1; i <= std::min(n, d + 1); ++i) seed_clique.push_back(i);
        cliques.push_back(seed_clique);
    }
    for (int k = d + 2; k <= n; ++k) {
        std::vector<int> preds;
        if (opt.tree) {
            // Copy before growing: push_back below may reallocate the clique list.
            std::vector<int> base = cliques[rng.below(cliques.size())];
            preds = base;
            for (size_t drop = 0; drop < base.size(); ++drop) {
                std::vector<int> grown;
                for (size_t i = 0; i < base.size(); ++i)
                    if (i != drop) grown.push_back(base[i]);
                grown.push_back(k);
                cliques.push_back(std::move(grown));
            }
        } else {
            for (int i : rng.sample(k - 1, d + 1)) preds.push_back(i + 1);
        }
        for (int i : preds) edges.add(i, k);
        attach_sets.push_back(std::move(preds));
    }

    if (opt.extra_edges > 0) {
        std::vector<std::pair<int, int>> missing;
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j)
                if (!edges.has(i, j)) missing.emplace_back(i, j);
        if (static_cast<int>(missing.size()) < opt.extra_edges)
            throw ParseError("not enough vertex pairs for the requested extra edges");
        for (int i : rng.sample(static_cast<int>(missing.size()), opt.extra_edges))
            edges.add(missing[static_cast<size_t>(i)].first, missing[static_cast<size_t>(i)].second);
    }

    std::vector<std::vector<int>> touched;
    std::vector<int> seed_pts;
    for (int i = 1; i <= std::min(n, d + 1); ++i) seed_pts.push_back(i);
    touched.push_back(seed_pts);
    for (const auto& s : attach_sets) touched.push_back(s);

    for (int attempt = 0; attempt < opt.max_resamples; ++attempt) {
        Matrix<Rat> P = sample_coords(rng, opt, n);
        if (!subsets_in_general_position(P, touched)) continue;
        Framework<Rat> F;
        F.d = d;
        F.n = n;
        F.positions = std::move(P);
        F.edges = std::move(edges);
        std::vector<int> order(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i + 1;
        F.order = std::move(order);
        return F;
    }
    throw ResampleBudgetExhausted("no coordinate draw passed the general-position scan after " +
                                  std::to_string(opt.max_resamples) + " attempts");
}

AnchoredNetwork<Rat> generate_anchored(const GenOptions& opt) {
    check_common(opt);
    if (opt.anchors < opt.d + 1) throw ParseError("generator requires anchors >= dim+1");
    if (opt.n < 0) throw ParseError("sensor count must be non-negative");
    if (opt.tree || opt.extra_edges > 0)
        throw ParseError("tree mode and extra edges apply to plain frameworks only");

    Rng rng(opt.seed);
    int d = opt.d, m = opt.anchors, n = opt.n;

    // Predecessor pool for sensor j is anchors 1..m then sensors 1..j-1, so a
    // sampled index < m is an anchor edge and the rest are sensor edges.
    std::set<std::pair<int, int>> anchor_edges;
    EdgeSet sensor_edges;
    std::vector<std::vector<int>> touched;  // global labels: anchor k, sensor j -> m+j
    for (int j = 1; j <= n; ++j) {
        std::vector<int> subset;
        for (int i : rng.sample(m + j - 1, d + 1)) {
            if (i < m) {
                anchor_edges.emplace(i + 1, j);
                subset.push_back(i + 1);
            } else {
                sensor_edges.add(i - m + 1, j);
                subset.push_back(i + 1);  // global label m + (i - m + 1)
            }
        }
        touched.push_back(std::move(subset));
    }

    for (int attempt = 0; attempt < opt.max_resamples; ++attempt) {
        Matrix<Rat> all = sample_coords(rng, opt, m + n);
        if (!subsets_in_general_position(all, touched)) continue;
        AnchoredNetwork<Rat> N;
        N.d = d;
        N.m = m;
        N.n = n;
        N.anchors = Matrix<Rat>(d, m);
        N.sensors = Matrix<Rat>(d, n);
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < d; ++i) N.anchors(i, j) = all(i, j);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < d; ++i) N.sensors(i, j) = all(i, m + j);
        N.anchor_edges = std::move(anchor_edges);
        N.sensor_edges = std::move(sensor_edges);
        std::vector<int> order(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i + 1;
        N.sensor_order = std::move(order);
        return N;
    }
    throw ResampleBudgetExhausted("no coordinate draw passed the general-position scan after " +
                                  std::to_string(opt.max_resamples) + " attempts");
}

Instance<Rat> generate_instance(const GenOptions& opt) {
    if (opt.anchors > 0) return generate_anchored(opt);
    return generate_framework(opt);
}

}  // namespace stresscert
