#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "../golden.hpp"
#include "stresscert/anchored.hpp"
#include "stresscert/framework_io.hpp"
#include "stresscert/gen.hpp"

using namespace stresscert;

namespace {

const Tolerances tol;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <class T>
AnchoredNetwork<T> fixture() {
    auto inst = read_instance<T>(slurp(std::string(STRESSCERT_DATA_DIR) + "/ex2_anchored.json"));
    return std::get<AnchoredNetwork<T>>(inst);
}

// Two anchors on the line and one sensor to their right: small enough that
// every quantity has a short closed form.
AnchoredNetwork<Rat> two_anchor_line() {
    AnchoredNetwork<Rat> N;
    N.d = 1;
    N.m = 2;
    N.n = 1;
    N.anchors = Matrix<Rat>(1, 2);
    N.anchors(0, 1) = Rat(1);
    N.sensors = Matrix<Rat>(1, 1);
    N.sensors(0, 0) = Rat(2);
    N.anchor_edges = {{1, 1}, {2, 1}};
    return N;
}

}  // namespace

TEST_CASE("anchored pre-stress has the block closed form") {
    Matrix<Rat> P(1, 1);
    P(0, 0) = Rat(2);
    auto S = anchored_prestress(P);
    REQUIRE(S.rows == 2);
    CHECK(S(0, 0) == Rat(4));
    CHECK(S(0, 1) == Rat(-2));
    CHECK(S(1, 0) == Rat(-2));
    CHECK(S(1, 1) == Rat(1));

    auto N = fixture<Rat>();
    auto S6 = anchored_prestress(N.sensors);
    REQUIRE(S6.rows == 6);
    // Bottom-right block is the identity, top-right is minus the positions.
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(S6(2 + i, 2 + j) == (i == j ? Rat(1) : Rat(0)));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 4; ++j) CHECK(S6(i, 2 + j) == -N.sensors(i, j));

    CHECK(psd_check(S6, tol).ok);
    CHECK(matrix_rank(S6, tol) == 4);
    CHECK(max_abs(anchored_gram(N.sensors) * S6).is_zero());
}

TEST_CASE("anchored gram matrix is the position gram") {
    auto N = fixture<Rat>();
    Matrix<Rat> B(2, 6);
    for (int i = 0; i < 2; ++i) {
        B(i, i) = Rat(1);
        for (int j = 0; j < 4; ++j) B(i, 2 + j) = N.sensors(i, j);
    }
    CHECK(anchored_gram(N.sensors) == B.transpose() * B);
    CHECK(matrix_rank(anchored_gram(N.sensors), tol) == 2);
}

TEST_CASE("two anchors and one sensor: every value in closed form") {
    auto N = two_anchor_line();
    auto r = anchored_stress(N, AnchoredOptions{}, tol);

    Matrix<Rat> want(2, 2);
    want(0, 0) = Rat(8);
    want(0, 1) = Rat(-4);
    want(1, 0) = Rat(-4);
    want(1, 1) = Rat(2);
    CHECK(r.stress.S == want);

    REQUIRE(r.trace.steps.size() == 1);
    const auto& step = r.trace.steps[0];
    CHECK(step.sensor == 1);
    CHECK(step.selected_anchors == std::vector<int>{1, 2});
    CHECK(step.selected_sensors.empty());
    CHECK(step.s == std::vector<Rat>{Rat(-2), Rat(1)});

    CHECK(r.stress.anchor_weights.at({1, 1}) == Rat(-2));
    CHECK(r.stress.anchor_weights.at({2, 1}) == Rat(4));
    CHECK(r.stress.sensor_weights.empty());

    // Dual block: top-left entry minus the anchor rank-one terms.
    REQUIRE(r.stress.V.rows == 1);
    CHECK(r.stress.V(0, 0) == Rat(4));

    CHECK(r.report.pass());
    CHECK(r.report.rank == 1);
    CHECK(r.report.gap == Rat(0));

    // The same step through the single-column entry point.
    auto S0 = anchored_prestress(N.sensors);
    auto [s, W] = anchored_purify_column(S0, 1, N, {1}, tol);
    CHECK(s == std::vector<Rat>{Rat(-2), Rat(1)});
    CHECK(W == want);
}

TEST_CASE("anchored fixture certifies exactly") {
    auto N = fixture<Rat>();
    AnchoredOptions opts;
    opts.check_steps = true;
    auto r = anchored_stress(N, opts, tol);

    CHECK(r.report.pass());
    CHECK(r.report.rank == 4);
    CHECK(r.report.gap == Rat(0));
    CHECK_FALSE(r.order_from_search);
    CHECK(r.sensor_order == std::vector<int>{1, 2, 3, 4});

    // Every sensor column is processed, clean or not: four steps, each with a
    // frame vector and the certified rank.
    REQUIRE(r.trace.steps.size() == 4);
    for (const auto& st : r.trace.steps) {
        CHECK(st.s.size() == 6);
        CHECK(st.rank_after == 4);
        CHECK(st.selected_anchors.size() + st.selected_sensors.size() == 3);
    }
    CHECK(r.trace.steps[0].position == 4);
    CHECK(r.trace.steps[3].position == 1);

    // Weight bookkeeping matches the matrix entries.
    CHECK(r.stress.sensor_weights.size() == 4);
    CHECK(r.stress.anchor_weights.size() == 8);
    const auto& S = r.stress.S;
    for (const auto& [e, w] : r.stress.sensor_weights)
        CHECK(S(2 + e.first - 1, 2 + e.second - 1) == -w);
    // Column identity: top block row i of sensor column j accumulates
    // -sum w̄_kj anchor_k[i].
    for (int j = 1; j <= 4; ++j) {
        for (int i = 0; i < 2; ++i) {
            Rat acc(0);
            for (const auto& [kj, w] : r.stress.anchor_weights)
                if (kj.second == j) acc += w * N.anchors(i, kj.first - 1);
            CHECK(S(i, 2 + j - 1) == -acc);
        }
        // Diagonal: total weight incident to the sensor.
        Rat diag(0);
        for (const auto& [e, w] : r.stress.sensor_weights)
            if (e.first == j || e.second == j) diag += w;
        for (const auto& [kj, w] : r.stress.anchor_weights)
            if (kj.second == j) diag += w;
        CHECK(S(2 + j - 1, 2 + j - 1) == diag);
    }

    // Float backend on the same instance.
    auto Nf = fixture<double>();
    auto rf = anchored_stress(Nf, AnchoredOptions{}, tol);
    CHECK(rf.report.pass());
    CHECK(rf.report.rank == 4);
    CHECK(std::fabs(rf.report.gap) < 1e-12);
}

TEST_CASE("anchored verification isolates defects") {
    auto N = fixture<Rat>();
    SUBCASE("the pre-stress alone is not optimal: weight recovery fails") {
        auto rep = verify_anchored_stress(anchored_prestress(N.sensors), N, tol);
        CHECK(rep.sym_ok);
        CHECK(rep.znull_ok);
        CHECK(rep.psd_ok);
        CHECK(rep.rank_ok);
        CHECK(rep.offedge_ok);  // identity block has no off-edge entries
        CHECK_FALSE(rep.weights_ok);
        CHECK(rep.weights_witness == 2);  // sensor 2 sees only anchors 1 and 3
        CHECK_FALSE(rep.pass());
    }
    SUBCASE("an off-edge perturbation is pinpointed") {
        auto r = anchored_stress(N, AnchoredOptions{}, tol);
        auto S = r.stress.S;
        S(2, 5) += Rat(1);  // sensors 1 and 4 share no edge
        S(5, 2) += Rat(1);
        auto rep = verify_anchored_stress(S, N, tol);
        CHECK_FALSE(rep.offedge_ok);
        CHECK(rep.offedge_witness == std::pair<int, int>{1, 4});
        CHECK_FALSE(rep.znull_ok);
        CHECK_FALSE(rep.pass());
    }
    SUBCASE("a diagonal nudge breaks the nullspace identity") {
        auto r = anchored_stress(N, AnchoredOptions{}, tol);
        auto S = r.stress.S;
        S(2, 2) += Rat(1);
        auto rep = verify_anchored_stress(S, N, tol);
        CHECK_FALSE(rep.znull_ok);
        CHECK(rep.sym_ok);
        CHECK_FALSE(rep.pass());
    }
    SUBCASE("shape mismatch throws") {
        CHECK_THROWS_AS(verify_anchored_stress(Matrix<Rat>(5, 5), N, tol), DimensionMismatch);
    }
}

TEST_CASE("sensor order validation and search") {
    auto N = fixture<Rat>();
    SUBCASE("natural order is valid and tight") {
        auto v = validate_anchored_order(N.anchor_edges, N.sensor_edges, {1, 2, 3, 4}, 2, 3, 4);
        CHECK(v.ok);
        CHECK(v.exact_sizes);
    }
    SUBCASE("sensor 4 cannot come first") {
        auto v = validate_anchored_order(N.anchor_edges, N.sensor_edges, {4, 3, 2, 1}, 2, 3, 4);
        CHECK_FALSE(v.ok);
        CHECK(v.failing_vertex == 4);
    }
    SUBCASE("too few anchors can never work") {
        CHECK_FALSE(validate_anchored_order(N.anchor_edges, N.sensor_edges, {1, 2, 3, 4}, 3, 3, 4).ok);
    }
    SUBCASE("search finds the natural order") {
        auto f = find_anchored_order(N.anchor_edges, N.sensor_edges, 2, 3, 4);
        REQUIRE(f.status == FindStatus::found);
        CHECK(f.order.order == std::vector<int>{1, 2, 3, 4});
    }
    SUBCASE("edgeless sensors are unorderable") {
        EdgeSet none;
        auto f = find_anchored_order({}, none, 2, 3, 2);
        CHECK(f.status == FindStatus::not_found);
        auto g = find_anchored_order({}, none, 2, 3, 50, 10);
        CHECK(g.status == FindStatus::budget_exhausted);
    }
    SUBCASE("the pipeline refuses an invalid override") {
        AnchoredOptions opts;
        opts.order_override = std::vector<int>{4, 3, 2, 1};
        CHECK_THROWS_AS(anchored_stress(N, opts, tol), OrderNotFound);
    }
}

TEST_CASE("surplus anchors get zero weight") {
    AnchoredNetwork<Rat> N;
    N.d = 2;
    N.m = 4;
    N.n = 1;
    N.anchors = Matrix<Rat>(2, 4);
    N.anchors(0, 1) = Rat(2);
    N.anchors(1, 2) = Rat(2);
    N.anchors(0, 3) = Rat(5);
    N.anchors(1, 3) = Rat(7);
    N.sensors = Matrix<Rat>(2, 1);
    N.sensors(0, 0) = Rat(1);
    N.sensors(1, 0) = Rat(1);
    for (int k = 1; k <= 4; ++k) N.anchor_edges.emplace(k, 1);

    auto r = anchored_stress(N, AnchoredOptions{}, tol);
    CHECK(r.report.pass());
    CHECK(r.report.rank == 1);
    CHECK(r.trace.steps[0].selected_anchors == std::vector<int>{1, 2, 3});
    CHECK(r.stress.anchor_weights.at({4, 1}) == Rat(0));
    CHECK(r.report.gap == Rat(0));
}

TEST_CASE("a network with no sensors certifies trivially") {
    AnchoredNetwork<Rat> N;
    N.d = 2;
    N.m = 3;
    N.n = 0;
    N.anchors = Matrix<Rat>(2, 3);
    N.anchors(0, 1) = Rat(1);
    N.anchors(1, 2) = Rat(1);
    N.sensors = Matrix<Rat>(2, 0);
    auto r = anchored_stress(N, AnchoredOptions{}, tol);
    CHECK(r.trace.steps.empty());
    CHECK(r.report.pass());
    CHECK(r.report.rank == 0);
}

TEST_CASE("generated anchored instances certify on both backends") {
    GenOptions g;
    g.d = 2;
    g.n = 6;  // sensors; anchors come on top
    g.anchors = 3;
    g.seed = 77;
    auto N = generate_anchored(g);
    REQUIRE(N.n == 6);

    auto r = anchored_stress(N, AnchoredOptions{}, tol);
    CHECK(r.report.pass());
    CHECK(r.report.rank == 6);
    CHECK(r.report.gap == Rat(0));
    CHECK(r.trace.steps.size() == 6);

    AnchoredNetwork<double> Nf;
    Nf.d = N.d;
    Nf.m = N.m;
    Nf.n = N.n;
    Nf.anchors = to_float(N.anchors);
    Nf.sensors = to_float(N.sensors);
    Nf.anchor_edges = N.anchor_edges;
    Nf.sensor_edges = N.sensor_edges;
    Nf.sensor_order = N.sensor_order;
    auto rf = anchored_stress(Nf, AnchoredOptions{}, tol);
    CHECK(rf.report.pass());
    CHECK(rf.report.rank == 6);
}
