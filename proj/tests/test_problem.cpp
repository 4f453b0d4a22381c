#include <doctest.h>

#include <random>

#include "conelp/json_io.hpp"
#include "conelp/problem.hpp"
#include "conelp/solver.hpp"
#include "lp_oracle.hpp"

using namespace conelp;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("build_dual produces the transposed data with the dual cone") {
    MatrixXd A(2, 2);
    A << 1, 0, 0, 0;
    VectorXd b(2), c(2);
    b << 1, -1;
    c << 1, 0;
    ConicProgram P(A, b, c, Cone::orthant(2));
    const ConicProgram D = problem::build_dual(P);
    CHECK(D.form() == ProgramForm::Dual);
    CHECK(D.A().isApprox(A.transpose()));
    CHECK(D.b().isApprox(c));  // equality right-hand side
    CHECK(D.c().isApprox(b));  // objective
    // y0 = (1,1) satisfies A'y = c and lies in the dual cone
    const VectorXd y0 = (VectorXd(2) << 1, 1).finished();
    CHECK((D.A() * y0 - D.b()).lpNorm<Eigen::Infinity>() <= 1e-14);
    CHECK(cones::contains(D.cone(), y0, 0.0));
}

TEST_CASE("weak duality on sampled feasible pairs") {
    std::mt19937 rng(23);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.1, 1.5);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2, m = 4;
        MatrixXd A(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = gauss(rng);
        VectorXd xf(n);
        for (int j = 0; j < n; ++j) xf(j) = gauss(rng);
        VectorXd s(m), y(m);
        for (int i = 0; i < m; ++i) s(i) = unif(rng);
        for (int i = 0; i < m; ++i) y(i) = unif(rng);
        const VectorXd b = A * xf - s;      // xf is feasible
        const VectorXd c = A.transpose() * y;  // y is dual feasible
        CHECK(c.dot(xf) - b.dot(y) >= -1e-10);
    }
}

TEST_CASE("polyhedral reduction") {
    SUBCASE("pure orthant program is returned unchanged") {
        ConicProgram P(MatrixXd::Identity(2, 2), VectorXd::Ones(2), VectorXd::Ones(2), Cone::orthant(2));
        const ConicProgram R = problem::reduce_polyhedral(P);
        CHECK(R.A().isApprox(P.A()));
        CHECK(R.b().isApprox(P.b()));
        CHECK(std::holds_alternative<OrthantBlock>(R.cone().blocks()[0]));
    }
    SUBCASE("identity polyhedral block reduces to the orthant") {
        ConicProgram P(MatrixXd::Identity(2, 2), VectorXd::Ones(2), VectorXd::Ones(2),
                       Cone::polyhedral(MatrixXd::Identity(2, 2)));
        const ConicProgram R = problem::reduce_polyhedral(P);
        CHECK(R.A().isApprox(P.A()));
        CHECK(std::holds_alternative<OrthantBlock>(R.cone().blocks()[0]));
    }
    SUBCASE("worked example: rows (1,0) and (1,1)") {
        MatrixXd B(2, 2);
        B << 1, 0, 1, 1;
        VectorXd b(2), c(2);
        b << 1, 0;
        c << 1, 1;
        ConicProgram P(MatrixXd::Identity(2, 2), b, c, Cone::polyhedral(B));
        const ConicProgram R = problem::reduce_polyhedral(P);
        // reduced constraints: x1 >= 1, x1 + x2 >= 1
        CHECK(R.A().isApprox(B));
        CHECK(R.b().isApprox((VectorXd(2) << 1, 1).finished()));
        const auto s = solver::solve(R);
        REQUIRE(s.status == solver::SolveStatus::Optimal);
        CHECK(s.value.value() == doctest::Approx(1.0).epsilon(1e-7));
        const auto o = lp_oracle::minimize(R.A(), R.b(), R.c());
        CHECK(o.value == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("second-order blocks are rejected") {
        MatrixXd A(3, 1);
        A << 1, 0, 0;
        ConicProgram P(A, VectorXd::Zero(3), VectorXd::Ones(1), Cone::second_order(3));
        CHECK_THROWS_AS(problem::reduce_polyhedral(P), NotPolyhedral);
    }
    SUBCASE("reduction preserves optimal values on random mixed instances") {
        std::mt19937 rng(29);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::uniform_real_distribution<double> unif(0.5, 1.5);
        for (int trial = 0; trial < 20; ++trial) {
            const int n = 2, d = 3, k = 4;
            MatrixXd B(k, d);
            VectorXd w0(d);
            // build a polyhedral block with certified interior
            while (true) {
                for (int i = 0; i < k; ++i)
                    for (int j = 0; j < d; ++j) B(i, j) = gauss(rng);
                bool ok = true;
                for (int i = 0; i < k; ++i)
                    if (B.row(i).norm() < 1e-3) ok = false;
                if (!ok) continue;
                try {
                    w0 = cones::canonical_interior_point(Cone::polyhedral(B));
                    break;
                } catch (const EmptyInterior&) {
                }
            }
            Cone K({OrthantBlock{2}, PolyhedralHBlock{B}});
            MatrixXd A(2 + d, n);
            for (int i = 0; i < A.rows(); ++i)
                for (int j = 0; j < n; ++j) A(i, j) = gauss(rng);
            // strictly feasible b: subtract an interior point of each block
            VectorXd xhat(n);
            for (int j = 0; j < n; ++j) xhat(j) = gauss(rng);
            VectorXd sint(2 + d);
            sint(0) = unif(rng);
            sint(1) = unif(rng);
            sint.tail(d) = w0 * unif(rng);
            VectorXd b = A * xhat - sint;
            // bounded below: c = A' y for y in the dual cone interior
            VectorXd ylift(2 + d);
            ylift(0) = unif(rng);
            ylift(1) = unif(rng);
            VectorXd lam(k);
            for (int i = 0; i < k; ++i) lam(i) = unif(rng);
            ylift.tail(d) = B.transpose() * lam;
            VectorXd c = A.transpose() * ylift;
            ConicProgram P(A, b, c, K);
            const ConicProgram R = problem::reduce_polyhedral(P);
            const auto s = solver::solve(R);
            REQUIRE(s.status == solver::SolveStatus::Optimal);
            const auto o = lp_oracle::minimize(R.A(), R.b(), R.c());
            REQUIRE(o.status == lp_oracle::Status::Optimal);
            CHECK(std::abs(s.value.value() - o.value) <= 1e-7 * (1.0 + std::abs(o.value)));
            // a feasible point of the original is feasible for the reduced one
            CHECK(cones::contains(R.cone(), VectorXd(R.A() * xhat - R.b()), 1e-9));
        }
    }
}

TEST_CASE("perturbation constructors") {
    MatrixXd A(3, 2);
    A << 0, 0, 0, 1, 1, 0;
    VectorXd b(3), c(2);
    b << -1, 0, 0;
    c << 1, 0;
    ConicProgram P(A, b, c, Cone::second_order(3));

    SUBCASE("zero step is the identity") {
        const auto Q = problem::perturb(P, Perturbation::rhs((VectorXd(3) << 1, 2, 3).finished(), 0.0));
        CHECK(Q.b().isApprox(P.b()));
    }
    SUBCASE("rhs step moves b") {
        const auto Q = problem::perturb(P, Perturbation::rhs((VectorXd(3) << 1, 0, 0).finished(), 0.1));
        CHECK(Q.b().isApprox((VectorXd(3) << -0.9, 0, 0).finished()));
    }
    SUBCASE("objective step moves c") {
        const auto Q = problem::perturb(P, Perturbation::obj((VectorXd(2) << 0, -1).finished(), 0.5));
        CHECK(Q.c().isApprox((VectorXd(2) << 1, -0.5).finished()));
    }
    SUBCASE("steps compose additively along a fixed direction") {
        const VectorXd d = (VectorXd(3) << 0.3, -0.2, 0.9).finished();
        const auto once = problem::perturb(P, Perturbation::rhs(d, 0.7));
        const auto twice = problem::perturb(problem::perturb(P, Perturbation::rhs(d, 0.3)),
                                            Perturbation::rhs(d, 0.4));
        CHECK(once.b().isApprox(twice.b(), 1e-15));
    }
    SUBCASE("dimension mismatches are rejected") {
        CHECK_THROWS_AS(problem::perturb(P, Perturbation::rhs(VectorXd::Ones(2), 0.1)), DimensionError);
        CHECK_THROWS_AS(problem::perturb(P, Perturbation::obj(VectorXd::Ones(3), 0.1)), DimensionError);
    }
}

TEST_CASE("problem json round trip") {
    SUBCASE("minimal document parses") {
        const std::string doc = R"({"n":1,"m":1,"A":[[1]],"b":[0],"c":[1],)"
                                R"("cone":{"blocks":[{"type":"orthant","dim":1}]}})";
        const auto P = io::parse_problem(doc);
        CHECK(P.n() == 1);
        CHECK(P.m() == 1);
    }
    SUBCASE("dimension mismatch raises DimensionError") {
        const std::string doc = R"({"n":1,"m":2,"A":[[1],[0]],"b":[0,0],"c":[1],)"
                                R"("cone":{"blocks":[{"type":"orthant","dim":1}]}})";
        CHECK_THROWS_AS(io::parse_problem(doc), DimensionError);
    }
    SUBCASE("schema violations raise SchemaError") {
        CHECK_THROWS_AS(io::parse_problem("[1,2,3]"), SchemaError);
        CHECK_THROWS_AS(io::parse_problem("{\"n\":1}"), SchemaError);
        CHECK_THROWS_AS(io::parse_problem("not json at all"), SchemaError);
        const std::string bad_block = R"({"n":1,"m":1,"A":[[1]],"b":[0],"c":[1],)"
                                      R"("cone":{"blocks":[{"type":"simplex","dim":1}]}})";
        CHECK_THROWS_AS(io::parse_problem(bad_block), SchemaError);
    }
    SUBCASE("round trip is exact for awkward doubles") {
        std::mt19937 rng(31);
        std::normal_distribution<double> gauss(0.0, 1.0);
        MatrixXd A(3, 2);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 2; ++j) A(i, j) = gauss(rng) * std::pow(10.0, int(rng() % 7) - 3);
        VectorXd b(3), c(2);
        for (int i = 0; i < 3; ++i) b(i) = gauss(rng) / 3.0;
        for (int j = 0; j < 2; ++j) c(j) = gauss(rng) * (1.0 / 7.0);
        std::vector<ConeBlock> blocks{OrthantBlock{1}, SecondOrderBlock{2}};
        ConicProgram P(A, b, c, Cone(blocks));
        const auto Q = io::parse_problem(io::serialize_problem(P));
        CHECK(Q.A() == P.A());
        CHECK(Q.b() == P.b());
        CHECK(Q.c() == P.c());
        // serialize again: byte-identical
        CHECK(io::serialize_problem(Q) == io::serialize_problem(P));
    }
    SUBCASE("extended reals to and from json") {
        CHECK(io::extreal_to_json(ExtReal::plus_inf()) == json("+inf"));
        CHECK(io::extreal_to_json(ExtReal::minus_inf()) == json("-inf"));
        CHECK(io::extreal_from_json(json(1.5)).value() == 1.5);
        CHECK(io::extreal_from_json(json("+inf")).is_plus_inf());
    }
}

TEST_CASE("extended real arithmetic guards") {
    const ExtReal pi = ExtReal::plus_inf();
    const ExtReal mi = ExtReal::minus_inf();
    CHECK((pi + ExtReal::finite(3)).is_plus_inf());
    CHECK((0.0 * mi).value() == 0.0);
    CHECK((2.0 * mi).is_minus_inf());
    CHECK_THROWS_AS((void)(pi + mi), NumericalFailureError);
    CHECK_THROWS_AS((void)(pi - pi), NumericalFailureError);
}

TEST_CASE("dual form of the ice-cream program describes the expected segment") {
    MatrixXd A(3, 2);
    A << 0, 0, 0, 1, 1, 0;
    VectorXd b(3), c(2);
    b << -1, 0, 0;
    c << 1, 0;
    ConicProgram P(A, b, c, Cone::second_order(3));
    const ConicProgram D = problem::build_dual(P);
    // F(D) = { (y1, 0, 1) : -1 <= y1 <= 1 }
    for (double y1 : {-1.0, -0.5, 0.0, 0.7, 1.0}) {
        const VectorXd y = (VectorXd(3) << y1, 0, 1).finished();
        CHECK((D.A() * y - D.b()).lpNorm<Eigen::Infinity>() <= 1e-14);
        CHECK(cones::contains(D.cone(), y, 1e-12));
    }
    const VectorXd outside = (VectorXd(3) << 1.5, 0, 1).finished();
    CHECK_FALSE(cones::contains(D.cone(), outside, 1e-9));
}

TEST_CASE("json round trip covers polyhedral and generated blocks") {
    MatrixXd B(3, 2);
    B << 1, 0, 1, 1, 0, 1;
    MatrixXd G(2, 3);
    G << 1, 0, 2, 0, 1, 1;
    std::vector<ConeBlock> blocks{PolyhedralHBlock{B}, GeneratedVBlock{G}};
    const int m = 4;
    MatrixXd A = MatrixXd::Identity(m, m) * 1.25;
    ConicProgram P(A, VectorXd::LinSpaced(m, -1.0, 2.0), VectorXd::LinSpaced(m, 0.1, 1.3), Cone(blocks));
    const auto Q = io::parse_problem(io::serialize_problem(P));
    CHECK(Q.A() == P.A());
    REQUIRE(std::holds_alternative<PolyhedralHBlock>(Q.cone().blocks()[0]));
    CHECK(std::get<PolyhedralHBlock>(Q.cone().blocks()[0]).B == B);
    REQUIRE(std::holds_alternative<GeneratedVBlock>(Q.cone().blocks()[1]));
    CHECK(std::get<GeneratedVBlock>(Q.cone().blocks()[1]).G == G);
}
