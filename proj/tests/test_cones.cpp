#include <doctest.h>

#include <random>

#include "conelp/cone.hpp"

using namespace conelp;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// random point of the cone (for polyhedral-H by rejection, generated-V by
// construction)
VectorXd sample_member(const Cone& K, std::mt19937& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    VectorXd y(K.dim());
    int off = 0;
    for (const auto& b : K.blocks()) {
        const int d = block_dim(b);
        if (std::holds_alternative<OrthantBlock>(b)) {
            for (int i = 0; i < d; ++i) y(off + i) = std::abs(gauss(rng));
        } else if (std::holds_alternative<SecondOrderBlock>(b)) {
            for (int i = 0; i < d - 1; ++i) y(off + i) = gauss(rng);
            y(off + d - 1) = y.segment(off, d - 1).norm() + unif(rng);
        } else if (const auto* ph = std::get_if<PolyhedralHBlock>(&b)) {
            // rejection from gaussian, fall back to zero
            VectorXd v(d);
            bool found = false;
            for (int tr = 0; tr < 200 && !found; ++tr) {
                for (int i = 0; i < d; ++i) v(i) = gauss(rng);
                found = ((ph->B * v).array() >= 0).all();
            }
            y.segment(off, d) = found ? v : VectorXd::Zero(d);
        } else {
            const auto& G = std::get<GeneratedVBlock>(b).G;
            VectorXd lam(G.cols());
            for (int i = 0; i < G.cols(); ++i) lam(i) = std::abs(gauss(rng));
            y.segment(off, d) = G * lam;
        }
        off += d;
    }
    return y;
}

} // namespace

TEST_CASE("dual cone structural mapping") {
    CHECK(std::holds_alternative<OrthantBlock>(cones::dual(Cone::orthant(2)).blocks()[0]));
    CHECK(std::holds_alternative<SecondOrderBlock>(cones::dual(Cone::second_order(3)).blocks()[0]));
    MatrixXd B = MatrixXd::Identity(2, 2);
    const Cone d1 = cones::dual(Cone::polyhedral(B));
    REQUIRE(std::holds_alternative<GeneratedVBlock>(d1.blocks()[0]));
    CHECK(std::get<GeneratedVBlock>(d1.blocks()[0]).G.isApprox(B.transpose()));
    const Cone d2 = cones::dual(d1);
    REQUIRE(std::holds_alternative<PolyhedralHBlock>(d2.blocks()[0]));
}

TEST_CASE("dual of the identity polyhedral cone matches the orthant as a set") {
    std::mt19937 rng(5);
    MatrixXd B = MatrixXd::Identity(2, 2);
    const Cone gen = cones::dual(Cone::polyhedral(B));  // generated by e1, e2
    const Cone orth = Cone::orthant(2);
    for (int i = 0; i < 50; ++i) {
        const VectorXd y = sample_member(orth, rng);
        CHECK(cones::contains(gen, y, 1e-8 * (1.0 + y.norm())));
    }
}

TEST_CASE("second-order dual pairing on random members") {
    std::mt19937 rng(7);
    const Cone K = Cone::second_order(3);
    const Cone Kd = cones::dual(K);
    for (int i = 0; i < 1000; ++i) {
        const VectorXd y = sample_member(K, rng);
        const VectorXd v = sample_member(Kd, rng);
        CHECK(v.dot(y) >= -1e-8);
    }
}

TEST_CASE("membership examples") {
    SUBCASE("soc axis point and a strictly outside point") {
        const Cone K = Cone::second_order(3);
        CHECK(cones::contains(K, (VectorXd(3) << 0, 0, 1).finished(), 0.0));
        CHECK_FALSE(cones::contains(K, (VectorXd(3) << 1, 0, 0.5).finished(), 1e-9));
    }
    SUBCASE("generated cone membership through nonnegative least squares") {
        MatrixXd G(2, 2);
        G << 1, 1, 0, 1;  // columns (1,0) and (1,1)
        const Cone K = Cone::generated(G);
        CHECK(cones::contains(K, (VectorXd(2) << 2, 1).finished(), 1e-9));  // lambda = (1,1)
        CHECK_FALSE(cones::contains(K, (VectorXd(2) << -1, 0).finished(), 1e-9));
        CHECK_FALSE(cones::contains(K, (VectorXd(2) << 1, 2).finished(), 1e-9));
    }
    SUBCASE("dimension mismatch is rejected") {
        CHECK_THROWS_AS(cones::contains(Cone::orthant(2), VectorXd::Zero(3), 0.0), DimensionError);
    }
    SUBCASE("cone property: members stay members under nonnegative scaling") {
        std::mt19937 rng(11);
        std::vector<Cone> cones_list;
        cones_list.push_back(Cone::orthant(3));
        cones_list.push_back(Cone::second_order(4));
        MatrixXd B(3, 2);
        B << 1, 0, 1, 1, 0, 1;
        cones_list.push_back(Cone::polyhedral(B));
        for (const auto& K : cones_list) {
            for (int i = 0; i < 20; ++i) {
                const VectorXd y = sample_member(K, rng);
                for (double t : {0.0, 0.5, 2.0, 10.0})
                    CHECK(cones::contains(K, VectorXd(t * y), 1e-9 * (1.0 + t * y.norm())));
            }
        }
    }
}

TEST_CASE("interior tests") {
    CHECK(cones::interior_contains(Cone::orthant(2), (VectorXd(2) << 1, 1).finished(), 0.5));
    // boundary point of the soc: ||(0.6, 0.8)|| = 1.0
    CHECK_FALSE(cones::interior_contains(Cone::second_order(3), (VectorXd(3) << 0.6, 0.8, 1.0).finished(), 1e-6));
    CHECK(cones::interior_contains(Cone::polyhedral(MatrixXd::Identity(2, 2)),
                                   (VectorXd(2) << 1, 2).finished(), 0.5));
    MatrixXd G = MatrixXd::Identity(2, 2);
    CHECK_THROWS_AS(cones::interior_contains(Cone::generated(G), VectorXd::Ones(2), 0.1),
                    InteriorTestUnsupported);
}

TEST_CASE("canonical interior points") {
    CHECK(cones::canonical_interior_point(Cone::orthant(3)).isApprox(VectorXd::Ones(3)));
    const VectorXd u = cones::canonical_interior_point(Cone::second_order(3));
    CHECK(u(2) == 1.0);
    CHECK(u.head(2).norm() == 0.0);

    SUBCASE("polyhedral block with interior") {
        MatrixXd B(3, 2);
        B << 1, 0, 0, 1, 1, 1;
        const Cone K = Cone::polyhedral(B);
        const VectorXd w = cones::canonical_interior_point(K);
        CHECK(cones::interior_contains(K, w, 1e-6));
    }
    SUBCASE("flat polyhedral cone has empty interior") {
        MatrixXd B(2, 2);
        B << 1, 0, -1, 0;  // forces y1 = 0
        CHECK_THROWS_AS(cones::canonical_interior_point(Cone::polyhedral(B)), EmptyInterior);
    }
}

TEST_CASE("barrier values, gradients and hessians") {
    SUBCASE("one-dimensional orthant at 1") {
        auto [v, g, H] = cones::barrier_value_grad_hess(Cone::orthant(1), VectorXd::Ones(1));
        CHECK(v == doctest::Approx(0.0));
        CHECK(g(0) == doctest::Approx(-1.0));
        CHECK(H(0, 0) == doctest::Approx(1.0));
    }
    SUBCASE("two-dimensional second-order block at the axis") {
        auto [v, g, H] = cones::barrier_value_grad_hess(Cone::second_order(2), (VectorXd(2) << 0, 1).finished());
        CHECK(v == doctest::Approx(0.0));
        CHECK(g(0) == doctest::Approx(0.0));
        CHECK(g(1) == doctest::Approx(-2.0));
        (void)H;
    }
    SUBCASE("gradient and hessian match central finite differences") {
        std::mt19937 rng(13);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::uniform_real_distribution<double> unif(0.5, 1.5);
        const Cone K({OrthantBlock{2}, SecondOrderBlock{3}});
        const double hstep = 1e-5;
        for (int trial = 0; trial < 100; ++trial) {
            VectorXd y(5);
            y(0) = unif(rng);
            y(1) = unif(rng);
            y(2) = gauss(rng);
            y(3) = gauss(rng);
            y(4) = y.segment(2, 2).norm() + unif(rng);
            auto [v, g, H] = cones::barrier_value_grad_hess(K, y);
            for (int i = 0; i < 5; ++i) {
                VectorXd yp = y, ym = y;
                yp(i) += hstep;
                ym(i) -= hstep;
                const double vp = std::get<0>(cones::barrier_value_grad_hess(K, yp));
                const double vm = std::get<0>(cones::barrier_value_grad_hess(K, ym));
                const double fd = (vp - vm) / (2 * hstep);
                CHECK(std::abs(g(i) - fd) <= 1e-6 * (1.0 + std::abs(fd)));
                const auto gp = std::get<1>(cones::barrier_value_grad_hess(K, yp));
                const auto gm = std::get<1>(cones::barrier_value_grad_hess(K, ym));
                for (int j = 0; j < 5; ++j) {
                    const double fdH = (gp(j) - gm(j)) / (2 * hstep);
                    CHECK(std::abs(H(i, j) - fdH) <= 1e-5 * (1.0 + std::abs(fdH)));
                }
            }
        }
    }
    SUBCASE("unsupported blocks and non-interior points are rejected") {
        CHECK_THROWS_AS(cones::barrier_value_grad_hess(Cone::polyhedral(MatrixXd::Identity(2, 2)),
                                                       VectorXd::Ones(2)),
                        BarrierUnsupported);
        CHECK_THROWS_AS(cones::barrier_value_grad_hess(Cone::orthant(1), VectorXd::Zero(1)), NotInterior);
    }
}

TEST_CASE("construction guards") {
    CHECK_THROWS_AS(Cone::second_order(1), DimensionError);
    CHECK_THROWS_AS(Cone::orthant(0), DimensionError);
    MatrixXd Bz(2, 2);
    Bz << 1, 0, 0, 0;
    CHECK_THROWS_AS(Cone::polyhedral(Bz), DimensionError);  // zero row
    MatrixXd Gz(2, 2);
    Gz << 1, 0, 1, 0;
    CHECK_THROWS_AS(Cone::generated(Gz), DimensionError);  // zero column
}

TEST_CASE("polyhedral double dual contains the same sampled members") {
    std::mt19937 rng(17);
    MatrixXd B(3, 2);
    B << 1, 0, 1, 1, 0, 1;
    const Cone K = Cone::polyhedral(B);
    const Cone Kdd = cones::dual(cones::dual(K));
    for (int i = 0; i < 40; ++i) {
        const VectorXd y = sample_member(K, rng);
        CHECK(cones::contains(Kdd, y, 1e-8 * (1.0 + y.norm())));
        const VectorXd z = sample_member(Kdd, rng);
        CHECK(cones::contains(K, z, 1e-8 * (1.0 + z.norm())));
    }
}
