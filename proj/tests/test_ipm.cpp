#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "conelp/ipm.hpp"

using namespace conelp;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd random_interior(const ipm::BlockList& bl, std::mt19937& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.2, 2.0);
    VectorXd v(ipm::detail::total_dim(bl));
    int off = 0;
    for (const auto& b : bl) {
        if (b.kind == ipm::BlockSpec::Kind::Orthant) {
            for (int i = 0; i < b.dim; ++i) v(off + i) = unif(rng);
        } else {
            for (int i = 0; i < b.dim - 1; ++i) v(off + i) = gauss(rng);
            v(off + b.dim - 1) = v.segment(off, b.dim - 1).norm() + unif(rng);
        }
        off += b.dim;
    }
    return v;
}

} // namespace

TEST_CASE("nesterov-todd scaling satisfies W y = W^{-1} s") {
    std::mt19937 rng(7);
    ipm::BlockList bl{{ipm::BlockSpec::Kind::Orthant, 3},
                      {ipm::BlockSpec::Kind::Soc, 4},
                      {ipm::BlockSpec::Kind::Soc, 2}};
    for (int trial = 0; trial < 50; ++trial) {
        VectorXd s = random_interior(bl, rng);
        VectorXd y = random_interior(bl, rng);
        auto sc = ipm::detail::compute_scaling(bl, s, y);
        VectorXd Wy = sc.apply_W(bl, y);
        VectorXd Wis = sc.apply_Winv(bl, s);
        CHECK((Wy - Wis).lpNorm<Eigen::Infinity>() <= 1e-10 * (1.0 + s.norm() + y.norm()));
        CHECK((Wy - sc.lambda).lpNorm<Eigen::Infinity>() <= 1e-12 * (1.0 + Wy.norm()));
        // mu consistency: lambda'lambda = s'y
        CHECK(sc.lambda.squaredNorm() == doctest::Approx(s.dot(y)).epsilon(1e-10));
        // W^{-1} really inverts W
        VectorXd z = random_interior(bl, rng);
        CHECK((sc.apply_Winv(bl, sc.apply_W(bl, z)) - z).lpNorm<Eigen::Infinity>() <= 1e-9 * (1.0 + z.norm()));
    }
}

TEST_CASE("jordan division inverts the product") {
    std::mt19937 rng(11);
    ipm::BlockList bl{{ipm::BlockSpec::Kind::Orthant, 2}, {ipm::BlockSpec::Kind::Soc, 3}};
    for (int trial = 0; trial < 20; ++trial) {
        VectorXd lam = random_interior(bl, rng);
        VectorXd d = random_interior(bl, rng);
        VectorXd x = ipm::detail::jordan_div(bl, lam, d);
        VectorXd back = ipm::detail::jordan_prod(bl, lam, x);
        CHECK((back - d).lpNorm<Eigen::Infinity>() <= 1e-10 * (1.0 + d.norm()));
    }
}

TEST_CASE("max_step matches bisection on random second-order data") {
    std::mt19937 rng(13);
    std::normal_distribution<double> gauss(0.0, 1.0);
    ipm::BlockList bl{{ipm::BlockSpec::Kind::Soc, 3}};
    for (int trial = 0; trial < 200; ++trial) {
        VectorXd v = random_interior(bl, rng);
        VectorXd dv(3);
        for (int i = 0; i < 3; ++i) dv(i) = gauss(rng);
        const double step = ipm::detail::max_step(bl, v, dv);
        if (step < 1e8) {
            VectorXd inside = v + 0.999 * step * dv;
            VectorXd outside = v + 1.001 * step * dv;
            CHECK(ipm::detail::cone_margin(bl, inside) >= -1e-9);
            CHECK(ipm::detail::cone_margin(bl, outside) <= 1e-9);
        } else {
            CHECK(ipm::detail::cone_margin(bl, v + 1e6 * dv) >= 0.0);
        }
    }
}

TEST_CASE("tiny lp: min x st x >= 1") {
    MatrixXd A(1, 1);
    A << 1.0;
    VectorXd b(1), c(1);
    b << 1.0;
    c << 1.0;
    auto r = ipm::solve(A, b, c, {{ipm::BlockSpec::Kind::Orthant, 1}});
    REQUIRE(r.status == ipm::Status::Optimal);
    CHECK(r.primal_obj == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("box lp with known vertex") {
    // min x1 + x2 st x >= (1,2) componentwise
    MatrixXd A = MatrixXd::Identity(2, 2);
    VectorXd b(2), c(2);
    b << 1.0, 2.0;
    c << 1.0, 1.0;
    auto r = ipm::solve(A, b, c, {{ipm::BlockSpec::Kind::Orthant, 2}});
    REQUIRE(r.status == ipm::Status::Optimal);
    CHECK(r.primal_obj == doctest::Approx(3.0).epsilon(1e-8));
    CHECK(r.rel_gap <= 1e-8);
}

TEST_CASE("unbounded lp yields a ray") {
    // min -x st x >= 0
    MatrixXd A(1, 1);
    A << 1.0;
    VectorXd b(1), c(1);
    b << 0.0;
    c << -1.0;
    auto r = ipm::solve(A, b, c, {{ipm::BlockSpec::Kind::Orthant, 1}});
    REQUIRE(r.status == ipm::Status::DualInfeasible);
    CHECK(r.cert_x(0) > 0.0);
}

TEST_CASE("infeasible lp yields a certificate") {
    // x >= 1 and -x >= 1
    MatrixXd A(2, 1);
    A << 1.0, -1.0;
    VectorXd b(2), c(1);
    b << 1.0, 1.0;
    c << 1.0;
    auto r = ipm::solve(A, b, c, {{ipm::BlockSpec::Kind::Orthant, 2}});
    REQUIRE(r.status == ipm::Status::PrimalInfeasible);
    // certificate: y >= 0, A'y ~ 0, b'y = 1
    CHECK(r.cert_y.minCoeff() >= -1e-9);
    CHECK(std::abs(r.cert_y(0) - r.cert_y(1)) <= 1e-6);
    CHECK(b.dot(r.cert_y) == doctest::Approx(1.0));
}

TEST_CASE("golden soc program: min x1 with ice-cream constraint") {
    // A = [[0,0],[0,1],[1,0]], b = (-1,0,0), c = (1,0); value 1 at (1,0),
    // dual solution (-1,0,1)
    MatrixXd A(3, 2);
    A << 0, 0, 0, 1, 1, 0;
    VectorXd b(3), c(2);
    b << -1, 0, 0;
    c << 1, 0;
    auto r = ipm::solve(A, b, c, {{ipm::BlockSpec::Kind::Soc, 3}});
    REQUIRE(r.status == ipm::Status::Optimal);
    CHECK(r.primal_obj == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(r.x(1)) <= 1e-6);
    CHECK(r.y(0) == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(std::abs(r.y(1)) <= 1e-6);
    CHECK(r.y(2) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("golden soc program: interval feasible set") {
    // A = [1;0;0], b = (0,0,-1), c = 1; feasible set [-1,1], value -1
    MatrixXd A(3, 1);
    A << 1, 0, 0;
    VectorXd b(3), c(1);
    b << 0, 0, -1;
    c << 1;
    auto r = ipm::solve(A, b, c, {{ipm::BlockSpec::Kind::Soc, 3}});
    REQUIRE(r.status == ipm::Status::Optimal);
    CHECK(r.primal_obj == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(r.x(0) == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("random strictly feasible lps reach tight tolerances") {
    std::mt19937 rng(21);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.5, 1.5);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 4);
        const int m = n + 1 + static_cast<int>(rng() % 4);
        MatrixXd A(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = gauss(rng);
        VectorXd xhat(n), sint(m), yint(m);
        for (int j = 0; j < n; ++j) xhat(j) = gauss(rng);
        for (int i = 0; i < m; ++i) sint(i) = unif(rng);
        for (int i = 0; i < m; ++i) yint(i) = unif(rng);
        VectorXd b = A * xhat - sint;
        VectorXd c = A.transpose() * yint;
        ipm::Options o;
        o.tol_feas = 1e-10;
        o.tol_gap = 1e-10;
        auto r = ipm::solve(A, b, c, {{ipm::BlockSpec::Kind::Orthant, m}}, o);
        REQUIRE(r.status == ipm::Status::Optimal);
        CHECK(r.rel_gap <= 1e-10);
        CHECK(r.rel_pres <= 1e-10);
        // weak duality sanity: c'x >= b'y up to tolerance
        CHECK(r.primal_obj >= r.dual_obj - 1e-7 * (1.0 + std::abs(r.primal_obj)));
    }
}

TEST_CASE("random strictly feasible socps solve to high accuracy") {
    std::mt19937 rng(33);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.5, 1.5);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 3);
        ipm::BlockList bl{{ipm::BlockSpec::Kind::Orthant, 2}, {ipm::BlockSpec::Kind::Soc, 3}};
        const int m = 5;
        MatrixXd A(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = gauss(rng);
        VectorXd xhat(n);
        for (int j = 0; j < n; ++j) xhat(j) = gauss(rng);
        VectorXd sint = random_interior(bl, rng);
        VectorXd yint = random_interior(bl, rng);
        VectorXd b = A * xhat - sint;
        VectorXd c = A.transpose() * yint;
        ipm::Options o;
        o.tol_feas = 1e-9;
        o.tol_gap = 1e-9;
        auto r = ipm::solve(A, b, c, bl, o);
        REQUIRE(r.status == ipm::Status::Optimal);
        CHECK(r.rel_gap <= 1e-9);
    }
}
