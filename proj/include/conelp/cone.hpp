// conelp - conic linear programming sensitivity toolkit
// Licensed under Apache 2.0

#ifndef CONELP_CONE_HPP
#define CONELP_CONE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "conelp/detail/nnls.hpp"
#include "conelp/errors.hpp"
#include "conelp/ipm.hpp"

namespace conelp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Block-structured closed convex cone.  Supported block families:
//   Orthant(d)        nonnegative orthant of R^d
//   SecondOrder(d)    { y : y_d >= ||y_1..y_{d-1}|| },  d >= 2
//   PolyhedralH(B)    { y : B y >= 0 componentwise }    (B is k x d)
//   GeneratedV(G)     { G lam : lam >= 0 }              (G is d x k)
// A Cone is a finite product of blocks; its ambient dimension is the sum
// of the block dimensions.

struct OrthantBlock {
    int dim = 0;
};
struct SecondOrderBlock {
    int dim = 0;
};
struct PolyhedralHBlock {
    MatrixXd B;  // k x d, no all-zero rows
};
struct GeneratedVBlock {
    MatrixXd G;  // d x k, no all-zero columns
};

using ConeBlock = std::variant<OrthantBlock, SecondOrderBlock, PolyhedralHBlock, GeneratedVBlock>;

inline int block_dim(const ConeBlock& b) {
    return std::visit(
        [](const auto& blk) -> int {
            using T = std::decay_t<decltype(blk)>;
            if constexpr (std::is_same_v<T, OrthantBlock> || std::is_same_v<T, SecondOrderBlock>)
                return blk.dim;
            else if constexpr (std::is_same_v<T, PolyhedralHBlock>)
                return static_cast<int>(blk.B.cols());
            else
                return static_cast<int>(blk.G.rows());
        },
        b);
}

class Cone {
  public:
    Cone() = default;
    explicit Cone(std::vector<ConeBlock> blocks) : blocks_(std::move(blocks)) { validate(); }

    static Cone orthant(int dim) { return Cone({OrthantBlock{dim}}); }
    static Cone second_order(int dim) { return Cone({SecondOrderBlock{dim}}); }
    static Cone polyhedral(MatrixXd B) { return Cone({PolyhedralHBlock{std::move(B)}}); }
    static Cone generated(MatrixXd G) { return Cone({GeneratedVBlock{std::move(G)}}); }

    const std::vector<ConeBlock>& blocks() const { return blocks_; }

    int dim() const {
        int m = 0;
        for (const auto& b : blocks_) m += block_dim(b);
        return m;
    }

    bool is_solver_supported() const {
        for (const auto& b : blocks_)
            if (!std::holds_alternative<OrthantBlock>(b) && !std::holds_alternative<SecondOrderBlock>(b))
                return false;
        return true;
    }
    bool is_polyhedral() const {
        for (const auto& b : blocks_)
            if (!std::holds_alternative<OrthantBlock>(b) && !std::holds_alternative<PolyhedralHBlock>(b))
                return false;
        return true;
    }

    // Block descriptors for the interior-point core; requires a
    // solver-supported cone.
    ipm::BlockList ipm_blocks() const {
        ipm::BlockList bl;
        for (const auto& b : blocks_) {
            if (std::holds_alternative<OrthantBlock>(b))
                bl.push_back({ipm::BlockSpec::Kind::Orthant, block_dim(b)});
            else if (std::holds_alternative<SecondOrderBlock>(b))
                bl.push_back({ipm::BlockSpec::Kind::Soc, block_dim(b)});
            else
                throw BarrierUnsupported("cone has polyhedral/generated blocks; reduce first");
        }
        return bl;
    }

  private:
    void validate() const {
        if (blocks_.empty()) throw DimensionError("Cone: at least one block required");
        for (const auto& b : blocks_) {
            if (const auto* o = std::get_if<OrthantBlock>(&b)) {
                if (o->dim < 1) throw DimensionError("Orthant block dim must be >= 1");
            } else if (const auto* s = std::get_if<SecondOrderBlock>(&b)) {
                if (s->dim < 2) throw DimensionError("SecondOrder block dim must be >= 2");
            } else if (const auto* p = std::get_if<PolyhedralHBlock>(&b)) {
                if (p->B.rows() < 1 || p->B.cols() < 1) throw DimensionError("PolyhedralH block must be nonempty");
                if (!p->B.allFinite()) throw DimensionError("PolyhedralH block has non-finite entries");
                for (int i = 0; i < p->B.rows(); ++i)
                    if (p->B.row(i).lpNorm<Eigen::Infinity>() == 0.0)
                        throw DimensionError("PolyhedralH block has an all-zero row");
            } else if (const auto* g = std::get_if<GeneratedVBlock>(&b)) {
                if (g->G.rows() < 1 || g->G.cols() < 1) throw DimensionError("GeneratedV block must be nonempty");
                if (!g->G.allFinite()) throw DimensionError("GeneratedV block has non-finite entries");
                for (int j = 0; j < g->G.cols(); ++j)
                    if (g->G.col(j).lpNorm<Eigen::Infinity>() == 0.0)
                        throw DimensionError("GeneratedV block has an all-zero column");
            }
        }
    }

    std::vector<ConeBlock> blocks_;
};

namespace cones {

// Dual cone, mapped blockwise: orthant and second-order blocks are
// self-dual; PolyhedralH(B) <-> GeneratedV(B').
inline Cone dual(const Cone& K) {
    std::vector<ConeBlock> out;
    for (const auto& b : K.blocks()) {
        if (const auto* o = std::get_if<OrthantBlock>(&b))
            out.push_back(OrthantBlock{o->dim});
        else if (const auto* s = std::get_if<SecondOrderBlock>(&b))
            out.push_back(SecondOrderBlock{s->dim});
        else if (const auto* p = std::get_if<PolyhedralHBlock>(&b))
            out.push_back(GeneratedVBlock{p->B.transpose()});
        else
            out.push_back(PolyhedralHBlock{std::get<GeneratedVBlock>(b).G.transpose()});
    }
    return Cone(std::move(out));
}

// Membership within slack tol.  Orthant/second-order blocks use absolute
// slack; polyhedral rows are scaled by row and point norms; generated
// blocks solve a nonnegative least-squares problem.
inline bool contains(const Cone& K, const VectorXd& y, double tol) {
    if (y.size() != K.dim()) throw DimensionError("contains: vector/cone dimension mismatch");
    int off = 0;
    for (const auto& b : K.blocks()) {
        const int p = block_dim(b);
        const auto seg = y.segment(off, p);
        if (std::holds_alternative<OrthantBlock>(b)) {
            if (seg.minCoeff() < -tol) return false;
        } else if (std::holds_alternative<SecondOrderBlock>(b)) {
            if (seg(p - 1) - seg.head(p - 1).norm() < -tol) return false;
        } else if (const auto* ph = std::get_if<PolyhedralHBlock>(&b)) {
            const VectorXd By = ph->B * seg;
            const double yn = seg.norm();
            for (int i = 0; i < By.size(); ++i)
                if (By(i) < -tol * (1.0 + ph->B.row(i).norm() * yn)) return false;
        } else {
            const auto& G = std::get<GeneratedVBlock>(b).G;
            const VectorXd lam = detail::nnls(G, seg);
            if ((G * lam - seg).norm() > tol * (1.0 + seg.norm()) + 1e-14) return false;
        }
        off += p;
    }
    return true;
}

// Smallest blockwise interior slack; requires every block to carry a usable
// interior characterization (GeneratedV blocks do not).
inline double interior_margin(const Cone& K, const VectorXd& y) {
    if (y.size() != K.dim()) throw DimensionError("interior_margin: dimension mismatch");
    double margin = std::numeric_limits<double>::infinity();
    int off = 0;
    for (const auto& b : K.blocks()) {
        const int p = block_dim(b);
        const auto seg = y.segment(off, p);
        if (std::holds_alternative<OrthantBlock>(b)) {
            margin = std::min(margin, seg.minCoeff());
        } else if (std::holds_alternative<SecondOrderBlock>(b)) {
            margin = std::min(margin, seg(p - 1) - seg.head(p - 1).norm());
        } else if (const auto* ph = std::get_if<PolyhedralHBlock>(&b)) {
            margin = std::min(margin, (ph->B * seg).minCoeff());
        } else {
            throw InteriorTestUnsupported(
                "interior test of a GeneratedV block requires its PolyhedralH dual description");
        }
        off += p;
    }
    return margin;
}

inline bool interior_contains(const Cone& K, const VectorXd& y, double margin) {
    return interior_margin(K, y) > margin;
}

// Canonical strictly interior point: all-ones for orthants, the cone axis
// for second-order blocks.  For PolyhedralH(B) solves
//     max { t : B y >= t 1, ||y||_inf <= 1 }
// and requires the optimum t* to be positive.
inline VectorXd canonical_interior_point(const Cone& K) {
    VectorXd u(K.dim());
    int off = 0;
    for (const auto& b : K.blocks()) {
        const int p = block_dim(b);
        if (std::holds_alternative<OrthantBlock>(b)) {
            u.segment(off, p).setOnes();
        } else if (std::holds_alternative<SecondOrderBlock>(b)) {
            u.segment(off, p).setZero();
            u(off + p - 1) = 1.0;
        } else if (const auto* ph = std::get_if<PolyhedralHBlock>(&b)) {
            const auto& B = ph->B;
            const int k = static_cast<int>(B.rows());
            const int d = static_cast<int>(B.cols());
            // variables (y, t); rows: B y - t 1 >= 0, 1 - y >= 0, 1 + y >= 0
            MatrixXd A(k + 2 * d, d + 1);
            A.setZero();
            A.topLeftCorner(k, d) = B;
            A.topRightCorner(k, 1).setConstant(-1.0);
            A.block(k, 0, d, d) = -MatrixXd::Identity(d, d);
            A.block(k + d, 0, d, d) = MatrixXd::Identity(d, d);
            VectorXd rhs = VectorXd::Zero(k + 2 * d);
            rhs.segment(k, d).setConstant(-1.0);
            rhs.segment(k + d, d).setConstant(-1.0);
            VectorXd obj = VectorXd::Zero(d + 1);
            obj(d) = -1.0;  // maximize t
            ipm::BlockList bl{{ipm::BlockSpec::Kind::Orthant, k + 2 * d}};
            const auto r = ipm::solve(A, rhs, obj, bl);
            if (r.status != ipm::Status::Optimal)
                throw EmptyInterior("PolyhedralH interior program did not solve cleanly");
            const double tstar = r.x(d);
            if (tstar <= 1e-9) throw EmptyInterior("PolyhedralH block has empty interior");
            u.segment(off, p) = r.x.head(d);
        } else {
            throw InteriorTestUnsupported("GeneratedV blocks have no canonical interior point");
        }
        off += p;
    }
    return u;
}

// Standard logarithmic barrier value/gradient/Hessian for solver-supported
// blocks: -sum log y_i on orthants, -log(y_p^2 - ||y_bar||^2) on
// second-order blocks; products sum blockwise.
inline std::tuple<double, VectorXd, MatrixXd> barrier_value_grad_hess(const Cone& K, const VectorXd& y) {
    if (y.size() != K.dim()) throw DimensionError("barrier: dimension mismatch");
    const int m = K.dim();
    double val = 0.0;
    VectorXd grad = VectorXd::Zero(m);
    MatrixXd hess = MatrixXd::Zero(m, m);
    int off = 0;
    for (const auto& b : K.blocks()) {
        const int p = block_dim(b);
        const auto seg = y.segment(off, p);
        if (std::holds_alternative<OrthantBlock>(b)) {
            if (seg.minCoeff() <= 0) throw NotInterior("barrier: point not strictly inside orthant block");
            val -= seg.array().log().sum();
            grad.segment(off, p) = -seg.cwiseInverse();
            hess.block(off, off, p, p).diagonal() = seg.cwiseAbs2().cwiseInverse();
        } else if (std::holds_alternative<SecondOrderBlock>(b)) {
            const double delta = seg(p - 1) * seg(p - 1) - seg.head(p - 1).squaredNorm();
            if (delta <= 0 || seg(p - 1) <= 0) throw NotInterior("barrier: point not strictly inside soc block");
            val -= std::log(delta);
            // with J = diag(-I, 1):  grad = -(2/delta) J y,  hess = -(2/delta) J + (4/delta^2) (Jy)(Jy)'
            VectorXd Jy = -seg;
            Jy(p - 1) = seg(p - 1);
            grad.segment(off, p) = -(2.0 / delta) * Jy;
            MatrixXd J = -MatrixXd::Identity(p, p);
            J(p - 1, p - 1) = 1.0;
            hess.block(off, off, p, p) = -(2.0 / delta) * J + (4.0 / (delta * delta)) * Jy * Jy.transpose();
        } else {
            throw BarrierUnsupported("barrier defined only for orthant/second-order blocks");
        }
        off += p;
    }
    return {val, grad, hess};
}

} // namespace cones

} // namespace conelp

#endif
