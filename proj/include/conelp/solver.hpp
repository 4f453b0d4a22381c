// conelp - conic linear programming sensitivity toolkit
// Licensed under Apache 2.0

#ifndef CONELP_SOLVER_HPP
#define CONELP_SOLVER_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "conelp/cone.hpp"
#include "conelp/errors.hpp"
#include "conelp/extreal.hpp"
#include "conelp/ipm.hpp"
#include "conelp/problem.hpp"

namespace conelp::solver {

struct SolveOptions {
    double tol_feas = 1e-8;
    double tol_gap = 1e-8;
    int max_iter = 200;
    // Support/level programs are solved inside a large bounding box so that
    // finite-but-unattained optima stay well-posed; iterates that march to
    // the box are resolved through the horizon relaxation below.
    double box_radius = 1e6;
    double unattained_norm_threshold = 1e6;
    double eps_level_scale = 1e-6;  // eps_level = scale * (1 + |v|), witness extraction only
};

enum class SolveStatus { Optimal, PrimalInfeasible, Unbounded, NearOptimalUnattained, NumericalFailure };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "Optimal";
        case SolveStatus::PrimalInfeasible: return "PrimalInfeasible";
        case SolveStatus::Unbounded: return "Unbounded";
        case SolveStatus::NearOptimalUnattained: return "NearOptimalUnattained";
        default: return "NumericalFailure";
    }
}

struct Solution {
    SolveStatus status = SolveStatus::NumericalFailure;
    ExtReal value = ExtReal::finite(0.0);
    std::optional<VectorXd> x_opt;
    std::optional<VectorXd> y_opt;
    double primal_residual = std::numeric_limits<double>::infinity();
    double dual_residual = std::numeric_limits<double>::infinity();
    double gap = std::numeric_limits<double>::infinity();
    int iterations = 0;
    std::optional<VectorXd> infeasibility_certificate;  // y in K*, A'y ~ 0, b'y = 1
    std::optional<VectorXd> unbounded_ray;              // A x in K, c'x = -1
    bool attained = true;
};

struct StrictFeasibilityCertificate {
    enum class Side { Primal, Dual };
    Side side = Side::Primal;
    double t_star = -std::numeric_limits<double>::infinity();
    VectorXd witness;
    VectorXd interior_direction;
    bool strictly_feasible() const { return t_star >= 1e-6; }
};

namespace detail {

using ipm::BlockList;
using ipm::BlockSpec;

struct IneqProgram {
    MatrixXd A;
    VectorXd b, c;
    BlockList blocks;
};

inline void append_rows(IneqProgram& p, const MatrixXd& rows, const VectorXd& rhs, BlockSpec::Kind kind) {
    const int old_m = static_cast<int>(p.A.rows());
    const int add = static_cast<int>(rows.rows());
    p.A.conservativeResize(old_m + add, Eigen::NoChange);
    p.A.bottomRows(add) = rows;
    p.b.conservativeResize(old_m + add);
    p.b.tail(add) = rhs;
    if (kind == BlockSpec::Kind::Orthant && !p.blocks.empty() && p.blocks.back().kind == kind)
        p.blocks.back().dim += add;
    else
        p.blocks.push_back({kind, add});
}

// rows  -R <= v_i <= R  for every variable, as one orthant block
inline IneqProgram with_box(const IneqProgram& p0, double R) {
    IneqProgram p = p0;
    const int nv = static_cast<int>(p.A.cols());
    MatrixXd rows(2 * nv, nv);
    rows.topRows(nv) = MatrixXd::Identity(nv, nv);
    rows.bottomRows(nv) = -MatrixXd::Identity(nv, nv);
    append_rows(p, rows, VectorXd::Constant(2 * nv, -R), BlockSpec::Kind::Orthant);
    return p;
}

inline ipm::Options make_ipm_options(const SolveOptions& o) {
    ipm::Options io;
    io.tol_feas = o.tol_feas;
    io.tol_gap = o.tol_gap;
    io.max_iter = o.max_iter;
    return io;
}

inline ipm::Result run(const IneqProgram& p, const SolveOptions& o) {
    return ipm::solve(p.A, p.b, p.c, p.blocks, make_ipm_options(o));
}

// Support and certificate programs carry box rows with large right-hand
// sides, which makes loose duality gaps uninformative; solve them tighter
// and accept near-converged stalls.
inline SolveOptions aux_options(const SolveOptions& o) {
    SolveOptions a = o;
    a.tol_feas = std::min(o.tol_feas, 1e-11);
    a.tol_gap = std::min(o.tol_gap, 1e-11);
    a.max_iter = std::max(o.max_iter, 300);
    return a;
}

inline bool acceptable(const ipm::Result& r) {
    if (r.status == ipm::Status::Optimal) return true;
    return r.status == ipm::Status::Indeterminate && r.x.size() > 0 && r.rel_pres <= 1e-7 &&
           r.rel_dres <= 1e-7 && r.rel_gap <= 1e-6;
}

// --- horizon relaxation ---------------------------------------------------
//
// A bounded conic program whose optimum is finite but unattained pushes its
// iterates along a recession direction r with c'r = 0.  The translate-limit
// of the feasible set along r is an explicit relaxation: orthant rows whose
// slack grows along r become vacuous, and a second-order block whose slack
// direction q = (A r)_block lies on the cone boundary flattens into the
// tangent halfspace { s : (Jq)'s >= 0 }, J = diag(-I, 1).  The relaxed
// program is attained and well-posed, and its value upper-bounds the true
// infimum from below (min form): v_limit <= v_true <= v_boxed.  When the
// two sides agree, the limit value is exact.

inline IneqProgram build_limit_program(const IneqProgram& p, const VectorXd& rhat) {
    IneqProgram lim;
    const int nv = static_cast<int>(p.A.cols());
    lim.A.resize(0, nv);
    lim.b.resize(0);
    lim.c = p.c;
    const VectorXd shat = p.A * rhat;
    int off = 0;
    for (const auto& blk : p.blocks) {
        const int d = blk.dim;
        if (blk.kind == BlockSpec::Kind::Orthant) {
            std::vector<int> keep;
            for (int i = 0; i < d; ++i)
                if (shat(off + i) <= 1e-7 * (1.0 + p.A.row(off + i).norm())) keep.push_back(i);
            if (!keep.empty()) {
                MatrixXd rows(keep.size(), nv);
                VectorXd rhs(keep.size());
                for (size_t i = 0; i < keep.size(); ++i) {
                    rows.row(i) = p.A.row(off + keep[i]);
                    rhs(i) = p.b(off + keep[i]);
                }
                append_rows(lim, rows, rhs, BlockSpec::Kind::Orthant);
            }
        } else {
            const VectorXd q = shat.segment(off, d);
            const double nq = q.norm();
            if (nq <= 1e-7) {
                append_rows(lim, p.A.middleRows(off, d), p.b.segment(off, d), BlockSpec::Kind::Soc);
            } else {
                const double margin = (q(d - 1) - q.head(d - 1).norm()) / nq;
                if (margin > 1e-7) {
                    // slack direction strictly inside: the block vanishes
                } else {
                    VectorXd Jq = -q / nq;
                    Jq(d - 1) = q(d - 1) / nq;
                    MatrixXd row = Jq.transpose() * p.A.middleRows(off, d);
                    VectorXd rhs(1);
                    rhs(0) = Jq.dot(p.b.segment(off, d));
                    append_rows(lim, row, rhs, BlockSpec::Kind::Orthant);
                }
            }
        }
        off += d;
    }
    if (lim.A.rows() == 0) {
        // fully vacuous constraints; keep a trivial row so the program stays
        // well-formed (0'x >= -1)
        append_rows(lim, MatrixXd::Zero(1, nv), VectorXd::Constant(1, -1.0), BlockSpec::Kind::Orthant);
    }
    return lim;
}

// Minimize c'x over the cone rows of p (no box rows yet) with full status
// handling: infeasible / unbounded detection and horizon resolution of
// finite-but-unattained values.
struct BoxedOutcome {
    enum class Kind { Value, Infeasible, Unbounded, Failure };
    Kind kind = Kind::Failure;
    double value = 0.0;
    bool attained = false;
    VectorXd x;  // feasible point achieving ~value when attained
    VectorXd y;  // dual multipliers of the boxed run (cone rows first)
    std::string note;
};

inline BoxedOutcome minimize_with_horizon(const IneqProgram& p, const SolveOptions& o) {
    BoxedOutcome out;
    const SolveOptions ao = aux_options(o);
    const auto r1 = run(with_box(p, o.box_radius), ao);
    if (r1.status == ipm::Status::PrimalInfeasible) {
        out.kind = BoxedOutcome::Kind::Infeasible;
        return out;
    }
    if (!acceptable(r1)) {
        out.kind = BoxedOutcome::Kind::Failure;
        out.note = "boxed program did not converge: " + r1.note;
        return out;
    }
    const double v_boxed = 0.5 * (r1.primal_obj + r1.dual_obj);
    out.x = r1.x;
    out.y = r1.y;
    const double scale = 1.0 + std::abs(v_boxed);

    const double march_norm = r1.x.lpNorm<Eigen::Infinity>();
    if (march_norm <= 1e3 * (1.0 + p.b.lpNorm<Eigen::Infinity>() / (1.0 + o.box_radius))) {
        out.kind = BoxedOutcome::Kind::Value;
        out.value = v_boxed;
        out.attained = true;
        return out;
    }

    // iterates marched: find the flat recession direction
    IneqProgram rec = p;
    rec.b.setZero();
    SolveOptions ro = o;
    ro.box_radius = 1.0;
    const auto r2 = run(with_box(rec, 1.0), ao);
    if (!acceptable(r2)) {
        out.kind = BoxedOutcome::Kind::Value;
        out.value = v_boxed;
        out.attained = false;
        out.note = "recession probe failed; boxed value reported";
        return out;
    }
    const double rec_val = 0.5 * (r2.primal_obj + r2.dual_obj);
    if (rec_val < -1e-7 * (1.0 + p.c.norm())) {
        out.kind = BoxedOutcome::Kind::Unbounded;
        return out;
    }
    VectorXd rhat = r2.x;
    if (rhat.lpNorm<Eigen::Infinity>() < 0.1) {
        // no usable flat direction: treat the boxed value as the answer
        out.kind = BoxedOutcome::Kind::Value;
        out.value = v_boxed;
        out.attained = true;
        return out;
    }
    rhat /= rhat.norm();

    const auto r3 = run(with_box(build_limit_program(p, rhat), o.box_radius), ao);
    if (!acceptable(r3)) {
        out.kind = BoxedOutcome::Kind::Value;
        out.value = v_boxed;
        out.attained = false;
        out.note = "horizon program failed; boxed value reported";
        return out;
    }
    const double v_limit = 0.5 * (r3.primal_obj + r3.dual_obj);
    // v_limit <= v_true <= v_boxed up to solver error
    if (v_boxed - v_limit <= std::max(1e-4 * scale, 20.0 * (1.0 + p.b.lpNorm<Eigen::Infinity>()) / o.box_radius) &&
        v_boxed - v_limit >= -1e-6 * scale) {
        out.kind = BoxedOutcome::Kind::Value;
        out.value = v_limit;
        out.attained = std::abs(v_boxed - v_limit) <= 5e-8 * scale;
        return out;
    }
    out.kind = BoxedOutcome::Kind::Value;
    out.value = v_boxed;
    out.attained = false;
    out.note = "horizon bracket inconsistent; boxed value reported";
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Plain solve of a primal-form program (cone blocks must be orthant or
// second-order; apply problem::reduce_polyhedral first otherwise).
// ---------------------------------------------------------------------------

inline bool verify_infeasibility_certificate(const ConicProgram& P, const VectorXd& y, double tol = 1e-6) {
    if (y.size() != P.m()) return false;
    const double sc = 1.0 + y.lpNorm<Eigen::Infinity>();
    return (P.A().transpose() * y).lpNorm<Eigen::Infinity>() <= tol * sc &&
           cones::contains(cones::dual(P.cone()), y, tol * sc) && P.b().dot(y) > 0;
}

inline bool verify_unbounded_ray(const ConicProgram& P, const VectorXd& x, double tol = 1e-6) {
    if (x.size() != P.n()) return false;
    const VectorXd Ax = P.A() * x;
    return cones::contains(P.cone(), Ax, tol * (1.0 + Ax.lpNorm<Eigen::Infinity>())) && P.c().dot(x) < 0;
}

namespace detail {

// max(0, infeasibility) of the system Ax >=_K b: solves
// min r s.t. Ax + r e >=_K b, r >= 0 inside the box.  Zero means feasible.
inline double primal_infeasibility_gap(const ConicProgram& P, const SolveOptions& o) {
    const int n = P.n();
    const auto blocks = P.cone().ipm_blocks();
    const VectorXd e = ipm::detail::cone_identity(blocks);
    IneqProgram p;
    p.A.resize(P.m(), n + 1);
    p.A.leftCols(n) = P.A();
    p.A.rightCols(1) = e;
    p.b = P.b();
    p.blocks = blocks;
    MatrixXd trow = MatrixXd::Zero(1, n + 1);
    trow(0, n) = 1.0;
    append_rows(p, trow, VectorXd::Zero(1), BlockSpec::Kind::Orthant);
    p.c = VectorXd::Zero(n + 1);
    p.c(n) = 1.0;
    const auto out = minimize_with_horizon(p, o);
    if (out.kind != BoxedOutcome::Kind::Value)
        throw NumericalFailureError("feasibility probe did not converge: " + out.note);
    return out.value;
}

inline std::optional<VectorXd> farkas_certificate(const ConicProgram& P, const SolveOptions& o);

}  // namespace detail

inline Solution solve(const ConicProgram& P, const SolveOptions& opts = {}) {
    if (P.form() != ProgramForm::Primal) throw DimensionError("solve expects a primal-form program");
    const auto blocks = P.cone().ipm_blocks();  // throws BarrierUnsupported on polyhedral blocks
    const auto r = ipm::solve(P.A(), P.b(), P.c(), blocks, detail::make_ipm_options(opts));

    Solution s;
    s.iterations = r.iterations;
    switch (r.status) {
        case ipm::Status::Optimal: {
            s.status = SolveStatus::Optimal;
            s.value = ExtReal::finite(0.5 * (r.primal_obj + r.dual_obj));
            s.x_opt = r.x;
            s.y_opt = r.y;
            s.primal_residual = r.rel_pres;
            s.dual_residual = r.rel_dres;
            s.gap = std::abs(r.primal_obj - r.dual_obj);
            return s;
        }
        case ipm::Status::PrimalInfeasible: {
            s.status = SolveStatus::PrimalInfeasible;
            s.value = ExtReal::plus_inf();
            s.infeasibility_certificate = r.cert_y;
            return s;
        }
        case ipm::Status::DualInfeasible: {
            // an improving ray exists; the value is -inf only if the problem
            // is feasible at all (inf over the empty set is +inf)
            const double gap = detail::primal_infeasibility_gap(P, opts);
            if (gap <= 1e-6 * (1.0 + P.b().lpNorm<Eigen::Infinity>())) {
                s.status = SolveStatus::Unbounded;
                s.value = ExtReal::minus_inf();
                s.unbounded_ray = r.cert_x;
                return s;
            }
            if (auto cert = detail::farkas_certificate(P, opts)) {
                s.status = SolveStatus::PrimalInfeasible;
                s.value = ExtReal::plus_inf();
                s.infeasibility_certificate = *cert;
                return s;
            }
            s.status = SolveStatus::NumericalFailure;
            return s;
        }
        case ipm::Status::Indeterminate:
        default: {
            // a request tighter than attainable still counts as optimal when
            // the best iterate clears the library baseline accuracy
            const double base_feas = std::max(opts.tol_feas, 1e-9);
            const double base_gap = std::max(opts.tol_gap, 1e-9);
            if (r.x.size() > 0 && r.rel_pres <= base_feas && r.rel_dres <= base_feas &&
                r.rel_gap <= base_gap) {
                s.status = SolveStatus::Optimal;
                s.value = ExtReal::finite(0.5 * (r.primal_obj + r.dual_obj));
                s.x_opt = r.x;
                s.y_opt = r.y;
                s.primal_residual = r.rel_pres;
                s.dual_residual = r.rel_dres;
                s.gap = std::abs(r.primal_obj - r.dual_obj);
                return s;
            }
            if (r.value_stabilized && r.iterate_inf_norm > opts.unattained_norm_threshold) {
                s.status = SolveStatus::NearOptimalUnattained;
                s.value = ExtReal::finite(r.stabilized_value);
                s.attained = false;
                if (r.y.size() > 0) s.y_opt = r.y;
                return s;
            }
            s.status = SolveStatus::NumericalFailure;
            if (r.x.size() > 0) {
                s.x_opt = r.x;
                s.y_opt = r.y;
                s.value = ExtReal::finite(0.5 * (r.primal_obj + r.dual_obj));
                s.primal_residual = r.rel_pres;
                s.dual_residual = r.rel_dres;
                s.gap = std::abs(r.primal_obj - r.dual_obj);
            }
            return s;
        }
    }
}

// ---------------------------------------------------------------------------
// Support values over the dual feasible set / solution sets.
//
// The level programs are evaluated through their conic duals rather than by
// relaxing the level constraint:
//   sup { w'y : y in F(D) }                    = inf { c'x : A x >=_K w }
//   sup { w'y : y in F(D), b'y >= v }          = inf { c'x - v t : A x - t b >=_K w, t >= 0 }
//   inf { h'x : x in F(P), c'x <= v }          = sup { b'y - v s : A'y - s c = h, y in K*, s >= 0 }
// Each program is solved inside the bounding box with horizon resolution,
// so the reported values carry no level-relaxation error.
// ---------------------------------------------------------------------------

struct SupportResult {
    enum class Outcome { Ok, EmptySet, Failure };
    Outcome outcome = Outcome::Failure;
    ExtReal value = ExtReal::finite(0.0);
    bool attained = false;
    std::optional<VectorXd> witness;  // a point of the set achieving the value, when attained
    std::string note;
};

namespace detail {

// sup { w'y : T'y = rhs, y in C, E y >= f } with C solver-supported, via
// the null-space parametrization y = y_p + N v.  The optional linear rows
// E y >= f carry level constraints.
inline SupportResult sup_eliminated(const MatrixXd& T, const VectorXd& rhs, const Cone& C, const VectorXd& w,
                                    const SolveOptions& o, const MatrixXd& E = MatrixXd(),
                                    const VectorXd& f = VectorXd()) {
    SupportResult out;
    const int m = static_cast<int>(T.rows());
    Eigen::BDCSVD<MatrixXd> svd(T, Eigen::ComputeFullU | Eigen::ComputeThinV);
    svd.setThreshold(1e-11);
    const int r = static_cast<int>(svd.rank());

    // particular solution of T'y = rhs: with T = U S V', the least-squares
    // solution is yp = U S^+ V' rhs, and null(T') is spanned by the trailing
    // columns of U
    VectorXd yp = VectorXd::Zero(m);
    {
        const auto& U = svd.matrixU();
        const auto& V = svd.matrixV();
        const auto& S = svd.singularValues();
        VectorXd tmp = V.transpose() * rhs;
        for (int i = 0; i < r; ++i) tmp(i) /= S(i);
        yp = U.leftCols(r) * tmp.head(r);
    }
    if ((T.transpose() * yp - rhs).norm() > 1e-8 * (1.0 + rhs.norm())) {
        out.outcome = SupportResult::Outcome::EmptySet;
        out.value = ExtReal::minus_inf();
        out.note = "equality system inconsistent";
        return out;
    }
    const MatrixXd N = svd.matrixU().rightCols(m - r);

    if (N.cols() == 0) {
        const bool extra_ok = E.rows() == 0 || ((E * yp - f).array() >= -1e-9 * (1.0 + f.norm())).all();
        if (extra_ok && cones::contains(C, yp, 1e-7 * (1.0 + yp.norm()))) {
            out.outcome = SupportResult::Outcome::Ok;
            out.value = ExtReal::finite(w.dot(yp));
            out.attained = true;
            out.witness = yp;
        } else {
            out.outcome = SupportResult::Outcome::EmptySet;
            out.value = ExtReal::minus_inf();
        }
        return out;
    }

    IneqProgram p;
    p.A = N;
    p.b = -yp;
    p.blocks = C.ipm_blocks();
    p.c = -N.transpose() * w;
    if (E.rows() > 0) append_rows(p, MatrixXd(E * N), VectorXd(f - E * yp), BlockSpec::Kind::Orthant);
    const auto bo = minimize_with_horizon(p, o);
    switch (bo.kind) {
        case BoxedOutcome::Kind::Infeasible:
            out.outcome = SupportResult::Outcome::EmptySet;
            out.value = ExtReal::minus_inf();
            return out;
        case BoxedOutcome::Kind::Unbounded:
            out.outcome = SupportResult::Outcome::Ok;
            out.value = ExtReal::plus_inf();
            out.attained = false;
            return out;
        case BoxedOutcome::Kind::Value: {
            out.outcome = SupportResult::Outcome::Ok;
            out.value = ExtReal::finite(w.dot(yp) - bo.value);
            out.attained = bo.attained;
            out.note = bo.note;
            if (bo.attained) out.witness = yp + N * bo.x;
            return out;
        }
        default:
            out.outcome = SupportResult::Outcome::Failure;
            out.note = bo.note;
            return out;
    }
}

inline std::optional<VectorXd> farkas_certificate(const ConicProgram& P, const SolveOptions& o) {
    // sup { b'y : A'y = 0, y in K* } over the unit box; positive means a
    // primal infeasibility certificate exists
    SolveOptions ro = o;
    ro.box_radius = 1.0;
    auto rec = sup_eliminated(P.A(), VectorXd::Zero(P.n()), cones::dual(P.cone()), P.b(), ro);
    if (rec.outcome != SupportResult::Outcome::Ok || !rec.value.is_finite() || !rec.witness) return std::nullopt;
    if (rec.value.value() <= 1e-7 * (1.0 + P.b().norm())) return std::nullopt;
    VectorXd y = *rec.witness / P.b().dot(*rec.witness);
    if (!verify_infeasibility_certificate(P, y)) return std::nullopt;
    return y;
}

}  // namespace detail

// sup { w'y : y in F(D) } = sup { w'y : A'y = c, y in K* }.
inline SupportResult support_dual_feasible(const ConicProgram& P, const VectorXd& w,
                                           const SolveOptions& opts = {}) {
    if (w.size() != P.m()) throw DimensionError("support_dual_feasible: direction length != m");
    return detail::sup_eliminated(P.A(), P.c(), cones::dual(P.cone()), w, opts);
}

namespace detail {

// Fallback for the level programs: the explicit relaxation of the level
// constraint, b'y >= v - eps_level resp. c'x <= v + eps_level with
// eps_level = eps_level_scale * (1 + |v|).  The relaxation inflates the set
// slightly, so the primary route is the exact dual reformulation; these are
// consulted only when it fails.
inline SupportResult dual_level_relaxed(const ConicProgram& P, const VectorXd& w, double v,
                                        const SolveOptions& opts) {
    const double eps = opts.eps_level_scale * (1.0 + std::abs(v));
    MatrixXd E = P.b().transpose();
    VectorXd f(1);
    f(0) = v - eps;
    SupportResult r = sup_eliminated(P.A(), P.c(), cones::dual(P.cone()), w, opts, E, f);
    r.note = r.note.empty() ? "relaxed level route" : r.note + "; relaxed level route";
    return r;
}

inline SupportResult primal_level_relaxed(const ConicProgram& P, const VectorXd& w, double v,
                                          const SolveOptions& opts) {
    IneqProgram p;
    p.A = P.A();
    p.b = P.b();
    p.blocks = P.cone().ipm_blocks();
    p.c = w;
    const double eps = opts.eps_level_scale * (1.0 + std::abs(v));
    MatrixXd row = -P.c().transpose();
    VectorXd rhs(1);
    rhs(0) = -(v + eps);
    append_rows(p, row, rhs, BlockSpec::Kind::Orthant);
    SupportResult out;
    const auto bo = minimize_with_horizon(p, opts);
    switch (bo.kind) {
        case BoxedOutcome::Kind::Infeasible:
            out.outcome = SupportResult::Outcome::EmptySet;
            out.value = ExtReal::plus_inf();
            break;
        case BoxedOutcome::Kind::Unbounded:
            out.outcome = SupportResult::Outcome::Ok;
            out.value = ExtReal::minus_inf();
            break;
        case BoxedOutcome::Kind::Value:
            out.outcome = SupportResult::Outcome::Ok;
            out.value = ExtReal::finite(bo.value);
            out.attained = bo.attained;
            if (bo.attained) out.witness = bo.x;
            break;
        default:
            out.outcome = SupportResult::Outcome::Failure;
            break;
    }
    out.note = "relaxed level route";
    return out;
}

}  // namespace detail

// sup { w'y : y in S(D) }, evaluated as the conic dual
// inf { c'x - v t : A x - t b >=_K w, t >= 0 } with v just below the
// certified optimal value.  The dual multiplier of the cone block is a
// point of S(D), reported as witness when it re-verifies.
inline SupportResult support_dual_solutions(const ConicProgram& P, const VectorXd& w, const Solution& base,
                                            const SolveOptions& opts = {}) {
    if (w.size() != P.m()) throw DimensionError("support_dual_solutions: direction length != m");
    if (base.status != SolveStatus::Optimal || !base.value.is_finite())
        throw HypothesisViolation("finite_value", "base solve is not optimal");
    // The anchored level value inflates like sqrt(anchor slack) when the
    // solution set is a tangency point, so pin the anchor from a
    // tight re-solve of the base program.
    double v = base.value.value();
    double gap = base.gap;
    {
        SolveOptions tight = opts;
        tight.tol_feas = std::min(opts.tol_feas, 1e-12);
        tight.tol_gap = std::min(opts.tol_gap, 1e-12);
        tight.max_iter = std::max(opts.max_iter, 300);
        const Solution tb = solve(P, tight);
        if (tb.status == SolveStatus::Optimal) {
            v = tb.value.value();
            gap = tb.gap;
        }
    }
    const double v_anchor = v - (3.0 * gap + 1e-12 * (1.0 + std::abs(v)));

    const int n = P.n();
    const int m = P.m();
    detail::IneqProgram p;
    p.A.resize(m, n + 1);
    p.A.leftCols(n) = P.A();
    p.A.rightCols(1) = -P.b();
    p.b = w;
    p.blocks = P.cone().ipm_blocks();
    MatrixXd trow = MatrixXd::Zero(1, n + 1);
    trow(0, n) = 1.0;
    detail::append_rows(p, trow, VectorXd::Zero(1), detail::BlockSpec::Kind::Orthant);
    p.c.resize(n + 1);
    p.c.head(n) = P.c();
    p.c(n) = -v_anchor;

    SupportResult out;
    const auto bo = detail::minimize_with_horizon(p, opts);
    switch (bo.kind) {
        case detail::BoxedOutcome::Kind::Infeasible:
        case detail::BoxedOutcome::Kind::Unbounded:
            // under the strict-feasibility hypotheses the program is always
            // feasible with nonempty S(D); fall back to the relaxed route
            return detail::dual_level_relaxed(P, w, v, opts);
        case detail::BoxedOutcome::Kind::Value:
            break;
        default:
            return detail::dual_level_relaxed(P, w, v, opts);
    }
    out.outcome = SupportResult::Outcome::Ok;
    out.value = ExtReal::finite(bo.value);
    out.attained = true;  // S(D) is compact under the gated hypotheses
    if (bo.y.size() >= m) {
        VectorXd y_witness = bo.y.head(m);
        const double sc = 1.0 + y_witness.lpNorm<Eigen::Infinity>();
        const bool verified = (P.A().transpose() * y_witness - P.c()).lpNorm<Eigen::Infinity>() <=
                                  1e-5 * (1.0 + P.c().lpNorm<Eigen::Infinity>()) &&
                              cones::contains(cones::dual(P.cone()), y_witness, 1e-6 * sc) &&
                              P.b().dot(y_witness) >= v - 1e-5 * (1.0 + std::abs(v));
        if (verified) out.witness = y_witness;
    }
    return out;
}

// inf { w'x : x in S(P) }, evaluated as
// sup { b'y - v s : A'y - s c = w, y in K*, s >= 0 } with v just above the
// certified optimal value.
inline SupportResult inf_primal_solutions(const ConicProgram& P, const VectorXd& w, const Solution& base,
                                          const SolveOptions& opts = {}) {
    if (w.size() != P.n()) throw DimensionError("inf_primal_solutions: direction length != n");
    if (base.status != SolveStatus::Optimal || !base.value.is_finite())
        throw HypothesisViolation("finite_value", "base solve is not optimal");
    double v = base.value.value();
    double gap = base.gap;
    {
        SolveOptions tight = opts;
        tight.tol_feas = std::min(opts.tol_feas, 1e-12);
        tight.tol_gap = std::min(opts.tol_gap, 1e-12);
        tight.max_iter = std::max(opts.max_iter, 300);
        const Solution tb = solve(P, tight);
        if (tb.status == SolveStatus::Optimal) {
            v = tb.value.value();
            gap = tb.gap;
        }
    }
    const double v_anchor = v + 3.0 * gap + 1e-12 * (1.0 + std::abs(v));

    const int m = P.m();
    MatrixXd T(m + 1, P.n());
    T.topRows(m) = P.A();
    T.bottomRows(1) = -P.c().transpose();
    std::vector<ConeBlock> cb = cones::dual(P.cone()).blocks();
    cb.push_back(OrthantBlock{1});
    const Cone C(std::move(cb));
    VectorXd wt(m + 1);
    wt.head(m) = P.b();
    wt(m) = -v_anchor;

    SupportResult r = detail::sup_eliminated(T, w, C, wt, opts);
    if (r.outcome == SupportResult::Outcome::Ok && r.witness) {
        // the witness lives in the lifted multiplier space, not in x-space
        r.witness.reset();
    }
    if (r.outcome == SupportResult::Outcome::EmptySet) {
        // multiplier system infeasible: inf over S(P) degenerates to +inf
        // (empty solution set)
        r.outcome = SupportResult::Outcome::Ok;
        r.value = ExtReal::plus_inf();
        r.attained = false;
    }
    if (r.outcome == SupportResult::Outcome::Failure)
        return detail::primal_level_relaxed(P, w, v, opts);
    return r;
}

// inf { w'x : A x >=_K b }.
inline SupportResult inf_primal_feasible(const ConicProgram& P, const VectorXd& w,
                                         const SolveOptions& opts = {}) {
    if (w.size() != P.n()) throw DimensionError("inf_primal_feasible: direction length != n");
    detail::IneqProgram p;
    p.A = P.A();
    p.b = P.b();
    p.blocks = P.cone().ipm_blocks();
    p.c = w;
    SupportResult out;
    const auto bo = detail::minimize_with_horizon(p, opts);
    switch (bo.kind) {
        case detail::BoxedOutcome::Kind::Infeasible:
            out.outcome = SupportResult::Outcome::EmptySet;
            out.value = ExtReal::plus_inf();  // inf over the empty set
            return out;
        case detail::BoxedOutcome::Kind::Unbounded:
            out.outcome = SupportResult::Outcome::Ok;
            out.value = ExtReal::minus_inf();
            out.attained = false;
            return out;
        case detail::BoxedOutcome::Kind::Value:
            out.outcome = SupportResult::Outcome::Ok;
            out.value = ExtReal::finite(bo.value);
            out.attained = bo.attained;
            out.note = bo.note;
            if (bo.attained) out.witness = bo.x;
            return out;
        default:
            out.outcome = SupportResult::Outcome::Failure;
            out.note = bo.note;
            return out;
    }
}

// ---------------------------------------------------------------------------
// Level-set optimization over solution sets.
// ---------------------------------------------------------------------------

enum class LevelSide { OverDualSolutions, OverPrimalSolutions };
enum class Sense { Max, Min };

inline Solution solve_level_set(const ConicProgram& P, LevelSide side, const VectorXd& w, Sense sense,
                                const Solution& base, const SolveOptions& opts = {}) {
    const double flip = (side == LevelSide::OverDualSolutions) ? (sense == Sense::Max ? 1.0 : -1.0)
                                                               : (sense == Sense::Min ? 1.0 : -1.0);
    SupportResult r = (side == LevelSide::OverDualSolutions)
                          ? support_dual_solutions(P, flip * w, base, opts)
                          : inf_primal_solutions(P, flip * w, base, opts);
    Solution s;
    s.attained = r.attained;
    switch (r.outcome) {
        case SupportResult::Outcome::Ok: {
            if (!r.value.is_finite())
                s.status = SolveStatus::Unbounded;
            else
                s.status = r.attained ? SolveStatus::Optimal : SolveStatus::NearOptimalUnattained;
            s.value = (flip < 0) ? -r.value : r.value;
            if (r.witness) {
                if (side == LevelSide::OverDualSolutions)
                    s.y_opt = r.witness;
                else
                    s.x_opt = r.witness;
            }
            return s;
        }
        case SupportResult::Outcome::EmptySet: {
            s.status = SolveStatus::PrimalInfeasible;
            s.value = (side == LevelSide::OverDualSolutions) ? ExtReal::minus_inf() : ExtReal::plus_inf();
            if (flip < 0) s.value = -s.value;
            return s;
        }
        default: {
            s.status = SolveStatus::NumericalFailure;
            return s;
        }
    }
}

// ---------------------------------------------------------------------------
// Strict feasibility certification.
// ---------------------------------------------------------------------------

namespace detail {

// Rows expressing  (Ax - b - t u) in K  over variables (x, t), one cone
// block at a time; polyhedral blocks contribute their linear rows.
inline IneqProgram margin_program(const ConicProgram& P, const VectorXd& u) {
    const int n = P.n();
    IneqProgram p;
    p.A.resize(0, n + 1);
    p.b.resize(0);
    int off = 0;
    for (const auto& blk : P.cone().blocks()) {
        const int d = block_dim(blk);
        MatrixXd rows;
        VectorXd rhs;
        if (std::holds_alternative<OrthantBlock>(blk) || std::holds_alternative<SecondOrderBlock>(blk)) {
            rows.resize(d, n + 1);
            rows.leftCols(n) = P.A().middleRows(off, d);
            rows.rightCols(1) = -u.segment(off, d);
            rhs = P.b().segment(off, d);
            append_rows(p, rows, rhs,
                        std::holds_alternative<OrthantBlock>(blk) ? BlockSpec::Kind::Orthant
                                                                  : BlockSpec::Kind::Soc);
        } else if (const auto* ph = std::get_if<PolyhedralHBlock>(&blk)) {
            const auto& B = ph->B;
            rows.resize(B.rows(), n + 1);
            rows.leftCols(n) = B * P.A().middleRows(off, d);
            rows.rightCols(1) = -(B * u.segment(off, d));
            rhs = B * P.b().segment(off, d);
            append_rows(p, rows, rhs, BlockSpec::Kind::Orthant);
        } else {
            throw BarrierUnsupported("GeneratedV blocks are not supported on the primal side");
        }
        off += d;
    }
    return p;
}

}  // namespace detail

inline StrictFeasibilityCertificate certify_strict_primal(const ConicProgram& P, const SolveOptions& opts = {}) {
    const VectorXd u = cones::canonical_interior_point(P.cone());  // throws EmptyInterior
    const int n = P.n();

    detail::IneqProgram p = detail::margin_program(P, u);
    MatrixXd trow = MatrixXd::Zero(1, n + 1);
    trow(0, n) = -1.0;  // t <= 1
    detail::append_rows(p, trow, VectorXd::Constant(1, -1.0), detail::BlockSpec::Kind::Orthant);
    p.c = VectorXd::Zero(n + 1);
    p.c(n) = -1.0;  // maximize t

    const auto out = detail::minimize_with_horizon(p, opts);
    if (out.kind != detail::BoxedOutcome::Kind::Value)
        throw NumericalFailureError("strict primal feasibility program did not converge: " + out.note);

    StrictFeasibilityCertificate cert;
    cert.side = StrictFeasibilityCertificate::Side::Primal;
    cert.interior_direction = u;
    double t_star = -out.value;
    VectorXd witness = out.x.size() > 0 ? VectorXd(out.x.head(n)) : VectorXd::Zero(n);

    if (t_star > 1e-6 && out.x.size() > 0) {
        // re-solve for a least-norm witness at a slightly reduced margin and
        // report that margin, so the certificate re-verifies as stated
        const double t_hat = t_star * (1.0 - 1e-3);
        detail::IneqProgram q = detail::margin_program(P, u);
        detail::IneqProgram q2;  // variables (x, r)
        q2.A.resize(q.A.rows(), n + 1);
        q2.A.leftCols(n) = q.A.leftCols(n);
        q2.A.rightCols(1).setZero();
        q2.b = q.b - t_hat * q.A.col(n);
        q2.blocks = q.blocks;
        MatrixXd soc = MatrixXd::Zero(n + 1, n + 1);
        soc.topLeftCorner(n, n).setIdentity();
        soc(n, n) = 1.0;
        detail::append_rows(q2, soc, VectorXd::Zero(n + 1), detail::BlockSpec::Kind::Soc);
        q2.c = VectorXd::Zero(n + 1);
        q2.c(n) = 1.0;
        const auto res2 = detail::run(detail::with_box(q2, opts.box_radius), detail::aux_options(opts));
        if (detail::acceptable(res2)) {
            witness = res2.x.head(n);
            t_star = t_hat;
        }
    }
    cert.t_star = t_star;
    cert.witness = witness;
    return cert;
}

inline StrictFeasibilityCertificate certify_strict_dual(const ConicProgram& P, const SolveOptions& opts = {}) {
    const int m = P.m();
    StrictFeasibilityCertificate cert;
    cert.side = StrictFeasibilityCertificate::Side::Dual;

    // Blockwise lifted description of { y in K* } with a strict margin
    // direction: y = L w, margin constraints as linear/soc rows over (w, t).
    struct MarginRows {
        MatrixXd rows_w;
        VectorXd coef_t;
        detail::BlockSpec::Kind kind;
    };
    std::vector<MarginRows> margins;
    std::vector<MatrixXd> lifts;
    int W = 0;
    VectorXd u_star(m);
    int off = 0;
    for (const auto& blk : P.cone().blocks()) {
        const int d = block_dim(blk);
        MatrixXd L;
        if (std::holds_alternative<OrthantBlock>(blk)) {
            L = MatrixXd::Identity(d, d);
            margins.push_back({MatrixXd::Identity(d, d), VectorXd::Constant(d, -1.0),
                               detail::BlockSpec::Kind::Orthant});
            u_star.segment(off, d).setOnes();
        } else if (std::holds_alternative<SecondOrderBlock>(blk)) {
            L = MatrixXd::Identity(d, d);
            VectorXd ct = VectorXd::Zero(d);
            ct(d - 1) = -1.0;
            margins.push_back({MatrixXd::Identity(d, d), ct, detail::BlockSpec::Kind::Soc});
            u_star.segment(off, d).setZero();
            u_star(off + d - 1) = 1.0;
        } else if (const auto* ph = std::get_if<PolyhedralHBlock>(&blk)) {
            // dual block is generated by the rows of B; strict feasibility
            // requires the generated cone to be full-dimensional
            const auto& B = ph->B;
            Eigen::BDCSVD<MatrixXd> bsvd(B);
            bsvd.setThreshold(1e-11);
            if (bsvd.rank() < d) {
                cert.t_star = -std::numeric_limits<double>::infinity();
                return cert;
            }
            const int k = static_cast<int>(B.rows());
            L = B.transpose();
            margins.push_back({MatrixXd::Identity(k, k), VectorXd::Constant(k, -1.0),
                               detail::BlockSpec::Kind::Orthant});
            u_star.segment(off, d) = B.transpose() * VectorXd::Ones(k);
        } else {
            const auto& G = std::get<GeneratedVBlock>(blk).G;
            const Cone dual_blk = Cone::polyhedral(G.transpose());
            const VectorXd ub = cones::canonical_interior_point(dual_blk);  // throws EmptyInterior
            L = MatrixXd::Identity(d, d);
            margins.push_back({G.transpose(), -(G.transpose() * ub), detail::BlockSpec::Kind::Orthant});
            u_star.segment(off, d) = ub;
        }
        lifts.push_back(L);
        W += static_cast<int>(L.cols());
        off += d;
    }
    cert.interior_direction = u_star;

    MatrixXd Lfull = MatrixXd::Zero(m, W);
    {
        int ro = 0, co = 0;
        for (const auto& L : lifts) {
            Lfull.block(ro, co, L.rows(), L.cols()) = L;
            ro += static_cast<int>(L.rows());
            co += static_cast<int>(L.cols());
        }
    }

    // equality (A' L) w = c, eliminated through the SVD
    const MatrixXd Q = P.A().transpose() * Lfull;  // n x W
    Eigen::BDCSVD<MatrixXd> svd(Q, Eigen::ComputeFullV | Eigen::ComputeThinU);
    svd.setThreshold(1e-11);
    const int r = static_cast<int>(svd.rank());
    VectorXd w_p;
    {
        const auto& U = svd.matrixU();
        const auto& V = svd.matrixV();
        const auto& S = svd.singularValues();
        VectorXd tmp = U.transpose() * P.c();
        for (int i = 0; i < r; ++i) tmp(i) /= S(i);
        w_p = V.leftCols(r) * tmp.head(r);
    }
    if ((Q * w_p - P.c()).norm() > 1e-8 * (1.0 + P.c().norm())) {
        cert.t_star = -std::numeric_limits<double>::infinity();  // dual equality infeasible
        return cert;
    }
    const MatrixXd N = svd.matrixV().rightCols(W - r);
    const int nv = static_cast<int>(N.cols());

    auto margin_rows = [&](double fixed_t, int extra_cols) {
        // rows over variables (v [, extra]) expressing the margins at the
        // given fixed t (extra_cols appends zero columns), returned as a
        // ready-to-extend program
        detail::IneqProgram q;
        q.A.resize(0, nv + extra_cols);
        q.b.resize(0);
        int mo = 0;
        for (const auto& mr : margins) {
            const int rows = static_cast<int>(mr.rows_w.rows());
            const int cols = static_cast<int>(mr.rows_w.cols());
            MatrixXd rw = MatrixXd::Zero(rows, nv + extra_cols);
            if (nv > 0) rw.leftCols(nv) = mr.rows_w * N.middleRows(mo, cols);
            VectorXd rhs = -(mr.rows_w * w_p.segment(mo, cols)) - fixed_t * mr.coef_t;
            detail::append_rows(q, rw, rhs, mr.kind);
            mo += cols;
        }
        return q;
    };

    // variables (v, t): margins with t as a variable, t <= 1, maximize t
    detail::IneqProgram p;
    p.A.resize(0, nv + 1);
    p.b.resize(0);
    {
        int mo = 0;
        for (const auto& mr : margins) {
            const int rows = static_cast<int>(mr.rows_w.rows());
            const int cols = static_cast<int>(mr.rows_w.cols());
            MatrixXd rw(rows, nv + 1);
            rw.setZero();
            if (nv > 0) rw.leftCols(nv) = mr.rows_w * N.middleRows(mo, cols);
            rw.rightCols(1) = mr.coef_t;
            VectorXd rhs = -(mr.rows_w * w_p.segment(mo, cols));
            detail::append_rows(p, rw, rhs, mr.kind);
            mo += cols;
        }
    }
    MatrixXd trow = MatrixXd::Zero(1, nv + 1);
    trow(0, nv) = -1.0;
    detail::append_rows(p, trow, VectorXd::Constant(1, -1.0), detail::BlockSpec::Kind::Orthant);
    p.c = VectorXd::Zero(nv + 1);
    p.c(nv) = -1.0;

    const auto out = detail::minimize_with_horizon(p, opts);
    if (out.kind != detail::BoxedOutcome::Kind::Value)
        throw NumericalFailureError("strict dual feasibility program did not converge: " + out.note);
    double t_star = -out.value;
    VectorXd w_star = w_p + (nv > 0 && out.x.size() > 0 ? VectorXd(N * out.x.head(nv)) : VectorXd::Zero(W));
    VectorXd witness = Lfull * w_star;

    if (t_star > 1e-6) {
        // least-norm witness at a slightly reduced margin
        const double t_hat = t_star * (1.0 - 1e-3);
        detail::IneqProgram q = margin_rows(t_hat, 1);  // variables (v, rho)
        MatrixXd soc = MatrixXd::Zero(m + 1, nv + 1);
        if (nv > 0) soc.topLeftCorner(m, nv) = Lfull * N;
        soc(m, nv) = 1.0;
        VectorXd soc_rhs(m + 1);
        soc_rhs.head(m) = -(Lfull * w_p);
        soc_rhs(m) = 0.0;
        detail::append_rows(q, soc, soc_rhs, detail::BlockSpec::Kind::Soc);
        q.c = VectorXd::Zero(nv + 1);
        q.c(nv) = 1.0;
        const auto res2 = detail::run(detail::with_box(q, opts.box_radius), detail::aux_options(opts));
        if (detail::acceptable(res2)) {
            witness = Lfull * (w_p + (nv > 0 ? VectorXd(N * res2.x.head(nv)) : VectorXd::Zero(W)));
            t_star = t_hat;
        }
    }
    cert.t_star = t_star;
    cert.witness = witness;
    return cert;
}

// ---------------------------------------------------------------------------
// Cross-check path: solve the dual through the explicit inequality
// splitting  min { (-b)'y : M y >=_L (c, -c, 0) },  M = [A'; -A'; I],
// L = R^n_+ x R^n_+ x K*.  Used by tests as an independent route to v(D).
// ---------------------------------------------------------------------------

inline Solution solve_dual_via_splitting(const ConicProgram& P, const SolveOptions& opts = {}) {
    const int n = P.n(), m = P.m();
    const Cone Kstar = cones::dual(P.cone());
    MatrixXd M(2 * n + m, m);
    M.topRows(n) = P.A().transpose();
    M.middleRows(n, n) = -P.A().transpose();
    M.bottomRows(m) = MatrixXd::Identity(m, m);
    VectorXd ct(2 * n + m);
    ct.head(n) = P.c();
    ct.segment(n, n) = -P.c();
    ct.tail(m).setZero();
    std::vector<ConeBlock> blocks{OrthantBlock{2 * n}};
    for (const auto& b : Kstar.blocks()) blocks.push_back(b);
    ConicProgram split(std::move(M), std::move(ct), -P.b(), Cone(std::move(blocks)));
    Solution s = solve(split, opts);
    if (s.status == SolveStatus::Optimal) {
        s.value = -s.value;
        s.y_opt = s.x_opt;  // the variable of the split program is y itself
        s.x_opt.reset();
    } else if (s.status == SolveStatus::PrimalInfeasible) {
        s.value = ExtReal::minus_inf();  // F(D) empty: sup over empty set
    } else if (s.status == SolveStatus::Unbounded) {
        s.value = ExtReal::plus_inf();
    }
    return s;
}

}  // namespace conelp::solver

#endif
