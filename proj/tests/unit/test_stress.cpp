#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "../golden.hpp"
#include "stresscert/gen.hpp"
#include "stresscert/stress.hpp"

using namespace stresscert;

namespace {

const Tolerances tol;

template <class T>
Matrix<T> pts(int d, const std::vector<std::string>& cells) {
    int n = static_cast<int>(cells.size()) / d;
    Matrix<T> P(d, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < d; ++i) P(i, j) = golden::cell<T>(cells[static_cast<size_t>(j) * d + i]);
    return P;
}

// Three collinear-free points on the line, fully connected: the smallest
// framework with a one-dimensional stress space.
template <class T>
Framework<T> k3_line() {
    Framework<T> F;
    F.d = 1;
    F.n = 3;
    F.positions = pts<T>(1, {"0", "1", "2"});
    F.edges.add(1, 2);
    F.edges.add(2, 3);
    F.edges.add(1, 3);
    F.order = std::vector<int>{1, 2, 3};
    return F;
}

}  // namespace

TEST_CASE("projection pre-stress is the nullspace projector") {
    SUBCASE("collinear triple: rank one, known closed form") {
        auto F = k3_line<Rat>();
        auto A = extended_position_matrix(F.positions, tol);
        auto S = projection_prestress(A, tol);
        CHECK(S.rank_by_construction == 1);
        // Projector onto span{(1,-2,1)}: (1/6) u u^T.
        Matrix<Rat> want(3, 3);
        add_outer(want, {Rat(1), Rat(-2), Rat(1)});
        for (auto& v : want.a) v /= Rat(6);
        CHECK(S.S == want);
    }
    SUBCASE("a simplex has no stress at all") {
        auto P = pts<Rat>(2, {"0", "0", "1", "0", "0", "1"});
        auto S = projection_prestress(extended_position_matrix(P, tol), tol);
        CHECK(S.S == Matrix<Rat>(3, 3));
        CHECK(S.rank_by_construction == 0);
    }
    SUBCASE("trace equals the nullity of the extended matrix") {
        auto F = golden::framework<Rat>(1);
        auto A = extended_position_matrix(F.positions, tol);
        auto S = projection_prestress(A, tol);
        Rat trace(0);
        for (int i = 0; i < 7; ++i) trace += S.S(i, i);
        CHECK(trace == Rat(4));
        CHECK(max_abs(A * S.S).is_zero());
        CHECK(psd_check(S.S, tol).ok);
        CHECK(matrix_rank(S.S, tol) == 4);
    }
    SUBCASE("float backend agrees") {
        auto F = golden::framework<double>(1);
        auto A = extended_position_matrix(F.positions, tol);
        auto S = projection_prestress(A, tol);
        CHECK(matrix_rank(S.S, tol) == 4);
        CHECK(max_abs(A * S.S) < 1e-12);
    }
}

TEST_CASE("basis matrix construction") {
    SUBCASE("smallest case has the classic dependence vector") {
        auto F = k3_line<Rat>();
        auto G = gale_matrix(F, *F.order, tol);
        REQUIRE(G.L.rows == 3);
        REQUIRE(G.L.cols == 1);
        CHECK(G.L(0, 0) == Rat(1));
        CHECK(G.L(1, 0) == Rat(-2));
        CHECK(G.L(2, 0) == Rat(1));
    }
    SUBCASE("worked examples, exact") {
        auto F1 = golden::framework<Rat>(1);
        CHECK(gale_matrix(F1, *F1.order, tol).L == golden::L_ex1<Rat>());
        auto F2 = golden::framework<Rat>(2);
        CHECK(gale_matrix(F2, *F2.order, tol).L == golden::L_ex2<Rat>());
    }
    SUBCASE("staircase shape") {
        auto F = golden::framework<Rat>(2);
        auto L = gale_matrix(F, *F.order, tol).L;
        for (int k = 0; k < 4; ++k) {
            CHECK(L(3 + k, k) == Rat(1));
            for (int i = 3 + k + 1; i < 7; ++i) CHECK(L(i, k).is_zero());
        }
        // Column support stays inside the predecessor neighborhood.
        CHECK(L(1, 3).is_zero());  // vertex 7 of example 2 is not adjacent to 2
        CHECK(L(4, 3).is_zero());  // nor to 5
    }
    SUBCASE("columns are extended-matrix null vectors") {
        auto F = golden::framework<Rat>(2);
        auto A = extended_position_matrix(F.positions, tol);
        auto L = gale_matrix(F, *F.order, tol).L;
        CHECK(max_abs(A * L).is_zero());
    }
    SUBCASE("an invalid order is refused") {
        auto F = golden::framework<Rat>(1);
        CHECK_THROWS_AS(gale_matrix(F, {7, 6, 5, 4, 3, 2, 1}, tol), OrderNotFound);
    }
}

TEST_CASE("worked example 1: clique attachments need no purification") {
    SUBCASE("exact backend") {
        auto F = golden::framework<Rat>(1);
        auto r = compute_stress_matrix(F, PipelineOptions{}, tol);
        CHECK(r.gale.L == golden::L_ex1<Rat>());
        CHECK(r.stress.S == golden::S7_ex1<Rat>());
        CHECK(r.tree_instance);
        CHECK_FALSE(r.order_from_search);
        CHECK(r.order == std::vector<int>{1, 2, 3, 4, 5, 6, 7});
        REQUIRE(r.trace.steps.size() == 3);
        for (const auto& st : r.trace.steps) CHECK(st.skipped);
        CHECK(r.trace.modifications() == 0);
        CHECK(r.report.pass());
        CHECK(r.report.rank == 4);
        CHECK(r.report.gram_rank == 3);
        CHECK(r.report.complementarity_ok);
        CHECK(r.report.dual_obj == Rat(0));
    }
    SUBCASE("float backend lands on the same matrix") {
        auto F = golden::framework<double>(1);
        auto r = compute_stress_matrix(F, PipelineOptions{}, tol);
        std::vector<double> want;
        auto W = golden::S7_ex1<double>();
        want.assign(W.a.begin(), W.a.end());
        CHECK(golden::worst_diff(r.stress.S, want) < 1e-9);
        CHECK(r.report.pass());
        CHECK(r.trace.modifications() == 0);
    }
}

TEST_CASE("worked example 2: two columns get modified") {
    SUBCASE("exact backend reproduces every published value") {
        auto F = golden::framework<Rat>(2);
        PipelineOptions opts;
        opts.check_steps = true;
        auto r = compute_stress_matrix(F, opts, tol);

        CHECK_FALSE(r.tree_instance);
        REQUIRE(r.trace.steps.size() == 3);

        const auto& s7 = r.trace.steps[0];
        CHECK(s7.position == 7);
        CHECK(s7.skipped);

        const auto& s6 = r.trace.steps[1];
        CHECK(s6.position == 6);
        CHECK_FALSE(s6.skipped);
        CHECK(s6.selected == std::vector<int>{2, 4, 5});
        CHECK_FALSE(s6.reselected);
        CHECK(s6.s == golden::s6_ex2<Rat>());
        CHECK(s6.rank_after == 4);

        const auto& s5 = r.trace.steps[2];
        CHECK(s5.position == 5);
        CHECK(s5.selected == std::vector<int>{1, 3, 4});
        CHECK(s5.s == golden::s5_ex2_exact<Rat>());
        CHECK(s5.rank_after == 4);

        CHECK(r.trace.modifications() == 2);
        CHECK(golden::worst_diff(r.stress.S, golden::S4_ex2_4dp()) <= 5.0e-5 + 1e-12);
        CHECK(r.report.pass());
        CHECK(r.report.rank == 4);

        // Edge entries the rounded print pinned exactly.
        CHECK(r.stress.S(5, 6) == Rat::parse("-0.75"));
        CHECK(r.stress.S(0, 6) == Rat::parse("-1.25"));
    }
    SUBCASE("float backend matches the same prints") {
        auto F = golden::framework<double>(2);
        auto r = compute_stress_matrix(F, PipelineOptions{}, tol);
        CHECK(golden::worst_diff(r.stress.S, golden::S4_ex2_4dp()) <= tol.tol_match);
        CHECK(r.report.pass());
        CHECK(r.trace.modifications() == 2);
    }
}

TEST_CASE("single purification steps chain through the worked example") {
    auto F = golden::framework<Rat>(2);
    auto order = *F.order;
    auto pre = pre_stress(gale_matrix(F, order, tol));
    CHECK(pre.S == golden::S7_ex2<Rat>());

    auto [s6, after6] = purify_column(pre, 6, F, order, tol);
    CHECK(s6 == golden::s6_ex2<Rat>());
    CHECK(golden::worst_diff(after6.S, golden::S5_ex2_4dp()) <= 5.0e-5 + 1e-12);

    auto [s5, after5] = purify_column(after6, 5, F, order, tol);
    CHECK(s5 == golden::s5_ex2_exact<Rat>());
    CHECK(golden::worst_diff(after5.S, golden::S4_ex2_4dp()) <= 5.0e-5 + 1e-12);

    // Each update is a rank-one addition that stays inside the nullspace.
    auto A = extended_position_matrix(F.positions, tol);
    CHECK(max_abs(A * after5.S).is_zero());
    CHECK(matrix_rank(after5.S, tol) == 4);
}

TEST_CASE("verification catches specific defects") {
    auto F2 = golden::framework<Rat>(2);
    SUBCASE("pre-stress of example 2 fails only the off-edge test") {
        auto rep = verify_stress(golden::S7_ex2<Rat>(), F2, tol);
        CHECK(rep.sym_ok);
        CHECK(rep.null_ok);
        CHECK(rep.psd_ok);
        CHECK(rep.rank_ok);
        CHECK_FALSE(rep.offedge_ok);
        REQUIRE(rep.offedge_witness.has_value());
        CHECK(*rep.offedge_witness == std::pair<int, int>{1, 6});
        CHECK_FALSE(rep.pass());
    }
    SUBCASE("zero matrix has the wrong rank") {
        auto rep = verify_stress(Matrix<Rat>(7, 7), F2, tol);
        CHECK(rep.null_ok);
        CHECK(rep.offedge_ok);
        CHECK(rep.psd_ok);
        CHECK_FALSE(rep.rank_ok);
        CHECK(rep.rank == 0);
        CHECK_FALSE(rep.complementarity_ok);
        CHECK_FALSE(rep.pass());
    }
    SUBCASE("identity is not in the nullspace") {
        auto rep = verify_stress(Matrix<Rat>::identity(7), F2, tol);
        CHECK_FALSE(rep.null_ok);
        CHECK_FALSE(rep.rank_ok);
        CHECK_FALSE(rep.pass());
    }
    SUBCASE("an edge perturbation breaks the dual objective") {
        auto S = golden::S7_ex1<Rat>();
        S(0, 1) += Rat(1);
        S(1, 0) += Rat(1);
        auto rep = verify_stress(S, golden::framework<Rat>(1), tol);
        CHECK_FALSE(rep.null_ok);
        CHECK_FALSE(rep.dual_obj_ok);
        CHECK(rep.dual_obj == Rat(-4));  // the moved entry sits on an edge of length 2
        CHECK(rep.offedge_ok);
        CHECK_FALSE(rep.pass());
    }
    SUBCASE("shape mismatch is an error, not a failure") {
        CHECK_THROWS_AS(verify_stress(Matrix<Rat>(6, 6), F2, tol), DimensionMismatch);
    }
}

TEST_CASE("skip rule is an optimization, not a correctness device") {
    auto F = golden::framework<Rat>(1);
    PipelineOptions opts;
    opts.skip_rule = false;
    auto r = compute_stress_matrix(F, opts, tol);
    // Every column is processed, yet the result still verifies at full rank.
    CHECK(r.trace.modifications() == 3);
    CHECK(r.report.pass());
    CHECK(r.report.rank == 4);

    auto with_skip = compute_stress_matrix(F, PipelineOptions{}, tol);
    CHECK(with_skip.trace.modifications() == 0);
    CHECK(with_skip.stress.S == golden::S7_ex1<Rat>());
}

TEST_CASE("smallest nontrivial instance: one column of slack") {
    Framework<Rat> F;
    F.d = 2;
    F.n = 4;
    F.positions = pts<Rat>(2, {"0", "0", "2", "0", "0", "2", "3", "3"});
    for (int i = 1; i <= 4; ++i)
        for (int j = i + 1; j <= 4; ++j) F.edges.add(i, j);
    auto r = compute_stress_matrix(F, PipelineOptions{}, tol);
    // n = d+2: the sweep range is empty and the pre-stress already verifies.
    CHECK(r.trace.steps.empty());
    CHECK(r.report.pass());
    CHECK(r.report.rank == 1);
    Matrix<Rat> want(4, 4);
    add_outer(want, {Rat(2), Rat::parse("-3/2"), Rat::parse("-3/2"), Rat(1)});
    CHECK(r.stress.S == want);
}

TEST_CASE("order handling in the pipeline") {
    SUBCASE("missing order triggers the search") {
        auto F = golden::framework<Rat>(1, false);
        auto r = compute_stress_matrix(F, PipelineOptions{}, tol);
        CHECK(r.order_from_search);
        CHECK(r.order == std::vector<int>{1, 2, 3, 4, 5, 6, 7});
        CHECK(r.report.pass());
    }
    SUBCASE("an override beats the stored order") {
        auto F = golden::framework<Rat>(1);
        PipelineOptions opts;
        opts.order_override = std::vector<int>{7, 6, 5, 4, 3, 2, 1};
        CHECK_THROWS_AS(compute_stress_matrix(F, opts, tol), OrderNotFound);
    }
    SUBCASE("graphs without any order") {
        Framework<Rat> F;
        F.d = 2;
        F.n = 5;
        F.positions = pts<Rat>(2, {"0", "0", "1", "0", "0", "1", "3", "1", "2", "5"});
        for (int i = 1; i < 5; ++i) F.edges.add(i, i + 1);
        CHECK_THROWS_AS(compute_stress_matrix(F, PipelineOptions{}, tol), OrderNotFound);
    }
}

TEST_CASE("degenerate positions are reported with their subset") {
    // Example-1 graph, but the seed triangle squashed onto a line.
    auto F = golden::framework<Rat>(1);
    F.positions(0, 0) = Rat(0);
    F.positions(1, 0) = Rat(0);
    F.positions(0, 1) = Rat(1);
    F.positions(1, 1) = Rat(0);
    F.positions(0, 2) = Rat(2);
    F.positions(1, 2) = Rat(0);
    SUBCASE("the lazy path hits the singular solve") {
        try {
            compute_stress_matrix(F, PipelineOptions{}, tol);
            FAIL("expected SingularMatrix");
        } catch (const SingularMatrix& e) {
            CHECK(e.subset() == std::vector<int>{1, 2, 3});
        }
    }
    SUBCASE("the full scan rejects before any algebra") {
        PipelineOptions opts;
        opts.full_gp_scan = true;
        CHECK_THROWS_AS(compute_stress_matrix(F, opts, tol), DegenerateSpan);
    }
}

// Kept deliberately small: every purification step roughly doubles the
// coefficient sizes on the exact backend and squares the entry magnitudes on
// the float one, so a fully sparse instance is only tractable at modest n.
TEST_CASE("generated instances certify on both backends") {
    GenOptions g;
    g.d = 2;
    g.n = 10;
    g.seed = 20240817;
    auto F = generate_framework(g);
    auto r = compute_stress_matrix(F, PipelineOptions{}, tol);
    CHECK(r.report.pass());
    CHECK(r.report.rank == 7);

    // Exact certificates for the two identities behind the verifier.
    auto A = extended_position_matrix(F.positions, tol);
    CHECK(max_abs(A * r.stress.S).is_zero());
    CHECK(r.report.dual_obj == Rat(0));

    Framework<double> Fd;
    Fd.d = F.d;
    Fd.n = F.n;
    Fd.positions = to_float(F.positions);
    Fd.edges = F.edges;
    Fd.order = F.order;
    auto rd = compute_stress_matrix(Fd, PipelineOptions{}, tol);
    CHECK(rd.report.pass());
    CHECK(rd.report.rank == 7);

    // The two backends must agree entrywise far inside the float tolerance.
    double worst = 0;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
            worst = std::max(worst,
                             std::fabs(to_double(r.stress.S(i, j)) - rd.stress.S(i, j)) /
                                 std::max(1.0, std::fabs(to_double(r.stress.S(i, j)))));
    CHECK(worst < 1e-6);
}
