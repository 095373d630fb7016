#pragma once

#include <cstdint>

#include "stresscert/framework.hpp"
#include "stresscert/framework_io.hpp"
#include "stresscert/rng.hpp"

namespace stresscert {

// Settings for the seeded instance generator. Coordinates are integers so the
// rational backend starts from denominator-1 data; the range keeps Bareiss
// intermediates small.
struct GenOptions {
    int d = 2;
    int n = 7;              // vertex count; with anchors > 0 this is the sensor count
    int anchors = 0;        // 0 generates a plain framework
    bool tree = false;      // attach every new vertex to an existing clique
    int extra_edges = 0;    // additional random non-lateration edges (framework only)
    std::uint64_t seed = 1;
    long long coord_min = -1000;
    long long coord_max = 1000;
    int max_resamples = 100;  // whole-coordinate-set retries before giving up
};

// Both generators sample the adjacency first (uniform (d+1)-subset of the
// predecessors per vertex, or a uniform existing clique in tree mode), then
// draw integer coordinates and resample the whole set until every subset the
// pipeline will feed to a linear solve is affinely independent. Throws
// ResampleBudgetExhausted when max_resamples draws all fail.
Framework<Rat> generate_framework(const GenOptions& opt);
AnchoredNetwork<Rat> generate_anchored(const GenOptions& opt);

// Dispatches on opt.anchors and wraps the result.
Instance<Rat> generate_instance(const GenOptions& opt);

}  // namespace stresscert
