// conelp - conic linear programming sensitivity toolkit
// Licensed under Apache 2.0

#ifndef CONELP_PROBLEM_HPP
#define CONELP_PROBLEM_HPP

#include <Eigen/Dense>
#include <utility>

#include "conelp/cone.hpp"
#include "conelp/errors.hpp"
#include "conelp/extreal.hpp"

namespace conelp {

// Primal program:   min c'x  s.t.  A x >=_K b        (x in R^n, K in R^m)
// Dual program:     max b'y  s.t.  A'y = c, y >=_K* 0
//
// Both share this container.  A primal-form program stores (A, b, c, K); a
// dual-form program (produced by build_dual) stores (A', c, b, K*) with the
// matrix transposed, the equality right-hand side in the b slot and the
// objective in the c slot.

enum class ProgramForm { Primal, Dual };

class ConicProgram {
  public:
    ConicProgram(MatrixXd A, VectorXd b, VectorXd c, Cone K, ProgramForm form = ProgramForm::Primal)
        : A_(std::move(A)), b_(std::move(b)), c_(std::move(c)), K_(std::move(K)), form_(form) {
        validate();
    }

    const MatrixXd& A() const { return A_; }
    const VectorXd& b() const { return b_; }
    const VectorXd& c() const { return c_; }
    const Cone& cone() const { return K_; }
    ProgramForm form() const { return form_; }

    int m() const { return static_cast<int>(A_.rows()); }
    int n() const { return static_cast<int>(A_.cols()); }

    ConicProgram with_b(VectorXd b_new) const {
        return ConicProgram(A_, std::move(b_new), c_, K_, form_);
    }
    ConicProgram with_c(VectorXd c_new) const {
        return ConicProgram(A_, b_, std::move(c_new), K_, form_);
    }

  private:
    void validate() const {
        if (!A_.allFinite() || !b_.allFinite() || !c_.allFinite())
            throw DimensionError("ConicProgram: non-finite entries");
        if (form_ == ProgramForm::Primal) {
            if (b_.size() != A_.rows() || c_.size() != A_.cols())
                throw DimensionError("ConicProgram: A/b/c dimensions inconsistent");
            if (K_.dim() != A_.rows()) throw DimensionError("ConicProgram: cone dimension != rows(A)");
        } else {
            // dual form: matrix is n x m, equality rhs has length n, objective m
            if (b_.size() != A_.rows() || c_.size() != A_.cols())
                throw DimensionError("ConicProgram (dual form): dimensions inconsistent");
            if (K_.dim() != A_.cols()) throw DimensionError("ConicProgram (dual form): cone dimension != cols");
        }
    }

    MatrixXd A_;
    VectorXd b_;
    VectorXd c_;
    Cone K_;
    ProgramForm form_;
};

// Linear perturbation: b + t d of the constraint right-hand side, or
// c + t h of the objective.
struct Perturbation {
    enum class Kind { RhsDirection, ObjDirection };
    Kind kind = Kind::RhsDirection;
    VectorXd direction;
    double step = 0.0;

    static Perturbation rhs(VectorXd d, double t = 0.0) {
        if (!d.allFinite()) throw DimensionError("Perturbation: non-finite direction");
        if (t < 0) throw DimensionError("Perturbation: step must be >= 0");
        return Perturbation{Kind::RhsDirection, std::move(d), t};
    }
    static Perturbation obj(VectorXd h, double t = 0.0) {
        if (!h.allFinite()) throw DimensionError("Perturbation: non-finite direction");
        if (t < 0) throw DimensionError("Perturbation: step must be >= 0");
        return Perturbation{Kind::ObjDirection, std::move(h), t};
    }
};

namespace problem {

// Dual of a primal-form program, as data: max b'y s.t. A'y = c, y in K*.
inline ConicProgram build_dual(const ConicProgram& P) {
    if (P.form() != ProgramForm::Primal) throw DimensionError("build_dual expects a primal-form program");
    return ConicProgram(P.A().transpose(), P.c(), P.b(), cones::dual(P.cone()), ProgramForm::Dual);
}

namespace detail {

struct Reduction {
    ConicProgram program;
    MatrixXd B;      // stacked row description, K = { y : B y >= 0 }
    bool identity;   // true when the input was already pure-orthant
};

inline Reduction reduce_polyhedral_with_map(const ConicProgram& P) {
    if (!P.cone().is_polyhedral())
        throw NotPolyhedral("reduce_polyhedral requires orthant/polyhedral blocks only");
    bool pure_orthant = true;
    int k_total = 0;
    for (const auto& blk : P.cone().blocks()) {
        if (const auto* ph = std::get_if<PolyhedralHBlock>(&blk)) {
            pure_orthant = false;
            k_total += static_cast<int>(ph->B.rows());
        } else {
            k_total += block_dim(blk);
        }
    }
    if (pure_orthant)
        return Reduction{P, MatrixXd::Identity(P.m(), P.m()), true};

    MatrixXd B = MatrixXd::Zero(k_total, P.m());
    int row = 0, col = 0;
    for (const auto& blk : P.cone().blocks()) {
        const int d = block_dim(blk);
        if (const auto* ph = std::get_if<PolyhedralHBlock>(&blk)) {
            B.block(row, col, ph->B.rows(), d) = ph->B;
            row += static_cast<int>(ph->B.rows());
        } else {
            B.block(row, col, d, d).setIdentity();
            row += d;
        }
        col += d;
    }
    ConicProgram reduced(B * P.A(), B * P.b(), P.c(), Cone::orthant(k_total), P.form());
    return Reduction{std::move(reduced), std::move(B), false};
}

} // namespace detail

// Rewrite a program whose cone has orthant/PolyhedralH blocks as an
// equivalent pure-orthant program (same optimal value, same feasible x).
inline ConicProgram reduce_polyhedral(const ConicProgram& P) {
    return detail::reduce_polyhedral_with_map(P).program;
}

inline ConicProgram perturb(const ConicProgram& P, const Perturbation& pert) {
    if (pert.kind == Perturbation::Kind::RhsDirection) {
        if (pert.direction.size() != P.m()) throw DimensionError("perturb: rhs direction length != m");
        return P.with_b(P.b() + pert.step * pert.direction);
    }
    if (pert.direction.size() != P.n()) throw DimensionError("perturb: objective direction length != n");
    return P.with_c(P.c() + pert.step * pert.direction);
}

} // namespace problem

} // namespace conelp

#endif
