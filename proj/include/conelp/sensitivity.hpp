// conelp - conic linear programming sensitivity toolkit
// Licensed under Apache 2.0

#ifndef CONELP_SENSITIVITY_HPP
#define CONELP_SENSITIVITY_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "conelp/errors.hpp"
#include "conelp/extreal.hpp"
#include "conelp/problem.hpp"
#include "conelp/solver.hpp"

// Sensitivity analysis of the two optimal value functions of the conic
// program  min { c'x : A x >=_K b }:
//
//   phi(b) = optimal value as a function of the right-hand side (convex),
//   psi(c) = optimal value as a function of the cost vector (concave).
//
// Under strict feasibility, phi has one-sided directional derivatives
// phi'(b; d) = max { d'y : y in S(D) }, subdifferential S(D), two-sided
// increment estimates built from S(D) and F(D) support values, and an
// exact first-order increment formula with a positive validity horizon in
// the polyhedral case.  psi mirrors these via S(P)/F(P), with the extra
// range test: directions outside range(A') have psi'(c; h) = -inf.

namespace conelp::sensitivity {

struct SensOptions {
    solver::SolveOptions solve;
    double strict_threshold = 1e-6;   // t* at or above this certifies strict feasibility
    double range_test_tol = 1e-8;     // residual scale for h in range(A')
    double tau_tol_scale = 1e-6;      // tolerance 1e-6 * (1 + |v|) in the horizon search
    int tau_grid_kmax = 20;           // grid {2^-k : k = 0..kmax}
    unsigned seed = 42;               // probes are seeded and reproducible
    double fd_tol = 1e-12;            // solve tolerance for difference quotients
};

struct FdEntry {
    double t = 0.0;
    ExtReal quotient = ExtReal::finite(0.0);
};

struct HypothesisBlock {
    bool primal_strict = false;
    bool dual_strict = false;
    double primal_margin = -std::numeric_limits<double>::infinity();
    double dual_margin = -std::numeric_limits<double>::infinity();
    bool finite_value = false;
};

struct SensitivityReport {
    ExtReal base_value = ExtReal::finite(0.0);
    Perturbation direction;
    std::optional<ExtReal> derivative;
    std::optional<ExtReal> lower_slope;
    std::optional<ExtReal> upper_slope;
    std::optional<double> tau;
    bool attained = true;
    bool upper_valid = true;
    std::vector<FdEntry> fd_table;
    HypothesisBlock hypotheses;
};

namespace detail {

inline ConicProgram reduced_if_polyhedral(const ConicProgram& P) {
    if (P.cone().is_solver_supported()) return P;
    return problem::reduce_polyhedral(P);  // throws NotPolyhedral on generated blocks
}

inline ExtReal value_of(const solver::Solution& s) {
    switch (s.status) {
        case solver::SolveStatus::Optimal:
        case solver::SolveStatus::PrimalInfeasible:
        case solver::SolveStatus::Unbounded:
        case solver::SolveStatus::NearOptimalUnattained:
            return s.value;
        default:
            throw NumericalFailureError("solver did not classify the program");
    }
}

}  // namespace detail

// phi(b_new): optimal value with the right-hand side replaced.
inline ExtReal phi(const ConicProgram& P, const VectorXd& b_new, const SensOptions& o = {}) {
    if (b_new.size() != P.m()) throw DimensionError("phi: right-hand side length != m");
    const ConicProgram Q = detail::reduced_if_polyhedral(P.with_b(b_new));
    return detail::value_of(solver::solve(Q, o.solve));
}

// psi(c_new): optimal value with the cost vector replaced.
inline ExtReal psi(const ConicProgram& P, const VectorXd& c_new, const SensOptions& o = {}) {
    if (c_new.size() != P.n()) throw DimensionError("psi: cost length != n");
    const ConicProgram Q = detail::reduced_if_polyhedral(P.with_c(c_new));
    return detail::value_of(solver::solve(Q, o.solve));
}

namespace detail {

struct Gate {
    solver::StrictFeasibilityCertificate primal;
    solver::StrictFeasibilityCertificate dual;
    solver::Solution base;  // solve of the reduced program
    ConicProgram reduced;
    MatrixXd B;  // reduction map (identity when no polyhedral blocks)
};

inline Gate gate_data(const ConicProgram& P, const SensOptions& o, bool need_primal, bool need_dual,
                      bool need_solve) {
    auto red = P.cone().is_solver_supported()
                   ? problem::detail::Reduction{P, MatrixXd::Identity(P.m(), P.m()), true}
                   : problem::detail::reduce_polyhedral_with_map(P);
    Gate g{solver::StrictFeasibilityCertificate{}, solver::StrictFeasibilityCertificate{},
           solver::Solution{}, red.program, red.B};
    if (need_primal) g.primal = solver::certify_strict_primal(P, o.solve);
    if (need_dual) g.dual = solver::certify_strict_dual(P, o.solve);
    if (need_solve) g.base = solver::solve(g.reduced, o.solve);
    return g;
}

}  // namespace detail

// phi'(b; d) = max { d'y : y in S(D) }; requires primal strict feasibility
// and an attained base optimum.
inline ExtReal phi_dir_deriv(const ConicProgram& P, const VectorXd& d, const SensOptions& o = {}) {
    if (d.size() != P.m()) throw DimensionError("phi_dir_deriv: direction length != m");
    const auto g = detail::gate_data(P, o, true, false, true);
    if (g.primal.t_star < o.strict_threshold)
        throw HypothesisViolation("primal_strict_feasibility",
                                  "certified margin t* = " + std::to_string(g.primal.t_star));
    if (g.base.status != solver::SolveStatus::Optimal)
        throw HypothesisViolation("finite_value",
                                  std::string("base solve status: ") + solver::to_string(g.base.status));
    const VectorXd w = g.B * d;  // direction mapped to the reduced dual space
    const auto r = solver::support_dual_solutions(g.reduced, w, g.base, o.solve);
    if (r.outcome != solver::SupportResult::Outcome::Ok)
        throw NumericalFailureError("directional derivative evaluation failed: " + r.note);
    return r.value;
}

// Membership test for the subdifferential of phi at b, which equals S(D):
// p must be dual-cone feasible, satisfy A'p = c, and attain the optimal
// value b'p = phi(b).
inline bool phi_subdiff_contains(const ConicProgram& P, const VectorXd& p, double tol,
                                 const SensOptions& o = {}) {
    if (p.size() != P.m()) throw DimensionError("phi_subdiff_contains: vector length != m");
    const auto g = detail::gate_data(P, o, true, false, true);
    if (g.primal.t_star < o.strict_threshold)
        throw HypothesisViolation("primal_strict_feasibility",
                                  "certified margin t* = " + std::to_string(g.primal.t_star));
    if (g.base.status != solver::SolveStatus::Optimal)
        throw HypothesisViolation("finite_value",
                                  std::string("base solve status: ") + solver::to_string(g.base.status));
    const double v = g.base.value.value();
    if (!cones::contains(cones::dual(P.cone()), p, tol)) return false;
    if ((P.A().transpose() * p - P.c()).norm() > tol * (1.0 + P.c().norm())) return false;
    return std::abs(P.b().dot(p) - v) <= tol * (1.0 + std::abs(v));
}

struct IncrementBounds {
    ExtReal lower = ExtReal::minus_inf();
    ExtReal upper = ExtReal::plus_inf();
    bool upper_valid = true;  // margin check certifies the upper estimate at this step
    ExtReal lower_slope = ExtReal::minus_inf();
    ExtReal upper_slope = ExtReal::plus_inf();
    bool upper_slope_attained = true;
};

// Two-sided increment estimate for phi at step t along d:
//   lower = phi(b) + t sup { d'y : y in S(D) }   (valid for all t > 0)
//   upper = phi(b) + t sup { d'y : y in F(D) }   (valid while the strict
//           witness survives the perturbation, reported in upper_valid)
inline IncrementBounds phi_increment_bounds(const ConicProgram& P, const VectorXd& d, double t,
                                            const SensOptions& o = {}) {
    if (d.size() != P.m()) throw DimensionError("phi_increment_bounds: direction length != m");
    if (!(t > 0)) throw DimensionError("phi_increment_bounds: step must be positive");
    const auto g = detail::gate_data(P, o, true, false, true);
    if (g.primal.t_star < o.strict_threshold)
        throw HypothesisViolation("primal_strict_feasibility",
                                  "certified margin t* = " + std::to_string(g.primal.t_star));
    if (g.base.status != solver::SolveStatus::Optimal)
        throw HypothesisViolation("finite_value",
                                  std::string("base solve status: ") + solver::to_string(g.base.status));
    const ExtReal v = g.base.value;

    IncrementBounds out;
    const VectorXd w = g.B * d;
    const auto lo = solver::support_dual_solutions(g.reduced, w, g.base, o.solve);
    if (lo.outcome != solver::SupportResult::Outcome::Ok)
        throw NumericalFailureError("lower estimate failed: " + lo.note);
    out.lower_slope = lo.value;
    out.lower = v + t * lo.value;

    const auto up = solver::support_dual_feasible(g.reduced, w, o.solve);
    if (up.outcome == solver::SupportResult::Outcome::Ok) {
        out.upper_slope = up.value;
        out.upper_slope_attained = up.attained;
        out.upper = v + t * up.value;
    } else if (up.outcome == solver::SupportResult::Outcome::EmptySet) {
        throw NumericalFailureError("dual feasible set empty despite optimal base solve");
    } else {
        throw NumericalFailureError("upper estimate failed: " + up.note);
    }

    // sufficient condition for t <= tau: the strict witness still clears the
    // perturbed right-hand side
    const VectorXd slack = P.A() * g.primal.witness - (P.b() + t * d);
    out.upper_valid = cones::interior_margin(P.cone(), slack) > 1e-9 * (1.0 + slack.lpNorm<Eigen::Infinity>());
    return out;
}

namespace detail {

// Largest grid step 2^-k (k = 0..kmax) at which |value(t') - linear model|
// stays within tol for every tested t' <= t, refined by bisection between
// the last passing and first failing grid points.
template <typename ValueAt>
std::optional<double> certify_horizon(ValueAt&& value_at, double v0, double slope, double tol, int kmax) {
    auto ok = [&](double t) {
        const ExtReal vt = value_at(t);
        if (!vt.is_finite()) return false;
        return std::abs(vt.value() - (v0 + t * slope)) <= tol;
    };
    std::vector<double> grid;
    for (int k = 0; k <= kmax; ++k) grid.push_back(std::ldexp(1.0, -k));
    // scan from the smallest step upward; all tested steps below tau must pass
    double tau = 0.0;
    double first_fail = 0.0;
    for (auto it = grid.rbegin(); it != grid.rend(); ++it) {
        if (ok(*it)) {
            tau = *it;
        } else {
            first_fail = *it;
            break;
        }
    }
    if (tau == 0.0) return std::nullopt;
    if (first_fail > 0.0) {
        double lo = tau, hi = first_fail;
        for (int i = 0; i < 12; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (ok(mid))
                lo = mid;
            else
                hi = mid;
        }
        tau = lo;
    }
    return tau;
}

}  // namespace detail

struct ExactIncrement {
    double slope = 0.0;
    std::optional<double> tau;  // numerically certified horizon
};

// Exact polyhedral increment for phi: slope = sup { d'y : y in S(D) }
// computed on the reduced orthant program, with a dyadic-grid horizon
// certification of phi(b + t d) = phi(b) + t slope.
inline ExactIncrement phi_increment_exact_polyhedral(const ConicProgram& P, const VectorXd& d,
                                                     const SensOptions& o = {}) {
    if (d.size() != P.m()) throw DimensionError("direction length != m");
    if (!P.cone().is_polyhedral()) throw NotPolyhedral("phi_increment_exact_polyhedral: cone not polyhedral");
    const auto red = problem::detail::reduce_polyhedral_with_map(P);
    const auto base = solver::solve(red.program, o.solve);
    if (base.status != solver::SolveStatus::Optimal)
        throw HypothesisViolation("finite_value",
                                  std::string("phi(b) is not finite: ") + solver::to_string(base.status));
    const double v0 = base.value.value();

    const auto sd = solver::support_dual_solutions(red.program, red.B * d, base, o.solve);
    if (sd.outcome != solver::SupportResult::Outcome::Ok || !sd.value.is_finite())
        throw NumericalFailureError("slope evaluation failed: " + sd.note);
    ExactIncrement out;
    out.slope = sd.value.value();

    const double tol = o.tau_tol_scale * (1.0 + std::abs(v0));
    SensOptions oq = o;
    oq.solve.tol_feas = std::min(o.solve.tol_feas, 1e-10);
    oq.solve.tol_gap = std::min(o.solve.tol_gap, 1e-10);
    out.tau = detail::certify_horizon(
        [&](double t) { return phi(P, VectorXd(P.b() + t * d), oq); }, v0, out.slope, tol, o.tau_grid_kmax);
    return out;
}

// psi'(c; h): inf { h'x : x in S(P) } when h lies in range(A'), -inf
// otherwise.  Requires both strict feasibility certificates.
inline ExtReal psi_dir_deriv(const ConicProgram& P, const VectorXd& h, const SensOptions& o = {}) {
    if (h.size() != P.n()) throw DimensionError("psi_dir_deriv: direction length != n");
    const auto g = detail::gate_data(P, o, true, true, true);
    if (g.primal.t_star < o.strict_threshold)
        throw HypothesisViolation("primal_strict_feasibility",
                                  "certified margin t* = " + std::to_string(g.primal.t_star));
    if (g.dual.t_star < o.strict_threshold)
        throw HypothesisViolation("dual_strict_feasibility",
                                  "certified margin t* = " + std::to_string(g.dual.t_star));

    // range test via least squares on A'v = h
    const VectorXd v_ls = P.A().transpose().bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(h);
    if ((P.A().transpose() * v_ls - h).norm() > o.range_test_tol * (1.0 + h.norm())) return ExtReal::minus_inf();

    if (g.base.status != solver::SolveStatus::Optimal)
        throw HypothesisViolation("finite_value",
                                  std::string("base solve status: ") + solver::to_string(g.base.status));
    const auto r = solver::inf_primal_solutions(g.reduced, h, g.base, o.solve);
    if (r.outcome != solver::SupportResult::Outcome::Ok)
        throw NumericalFailureError("psi directional derivative failed: " + r.note);
    return r.value;
}

// Two-sided increment estimate for psi at step t along h, valid for every
// t > 0:  psi(c) + t inf_{F(P)} h'x  <=  psi(c+th)  <=  psi(c) + t inf_{S(P)} h'x.
inline IncrementBounds psi_increment_bounds(const ConicProgram& P, const VectorXd& h, double t,
                                            const SensOptions& o = {}) {
    if (h.size() != P.n()) throw DimensionError("psi_increment_bounds: direction length != n");
    if (!(t > 0)) throw DimensionError("psi_increment_bounds: step must be positive");
    const auto g = detail::gate_data(P, o, false, false, true);
    if (g.base.status != solver::SolveStatus::Optimal)
        throw HypothesisViolation("finite_value",
                                  std::string("psi(c) is not finite: ") + solver::to_string(g.base.status));
    const ExtReal v = g.base.value;

    IncrementBounds out;
    const auto lo = solver::inf_primal_feasible(g.reduced, h, o.solve);
    if (lo.outcome != solver::SupportResult::Outcome::Ok)
        throw NumericalFailureError("lower estimate failed: " + lo.note);
    out.lower_slope = lo.value;
    out.lower = v + t * lo.value;

    const auto up = solver::inf_primal_solutions(g.reduced, h, g.base, o.solve);
    if (up.outcome != solver::SupportResult::Outcome::Ok)
        throw NumericalFailureError("upper estimate failed: " + up.note);
    out.upper_slope = up.value;
    out.upper_slope_attained = up.attained;
    out.upper = v + t * up.value;
    out.upper_valid = true;  // both estimates hold for every positive step
    return out;
}

// Exact polyhedral increment for psi: slope = inf { h'x : x in S(P) } with
// the same horizon certification against psi(c + t h).
inline ExactIncrement psi_increment_exact_polyhedral(const ConicProgram& P, const VectorXd& h,
                                                     const SensOptions& o = {}) {
    if (h.size() != P.n()) throw DimensionError("direction length != n");
    if (!P.cone().is_polyhedral()) throw NotPolyhedral("psi_increment_exact_polyhedral: cone not polyhedral");

    const VectorXd v_ls = P.A().transpose().bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(h);
    if ((P.A().transpose() * v_ls - h).norm() > o.range_test_tol * (1.0 + h.norm()))
        throw RangeTestFailed("direction lies outside range(A')");
    const auto dual_cert = solver::certify_strict_dual(P, o.solve);
    if (dual_cert.t_star < o.strict_threshold)
        throw HypothesisViolation("dual_strict_feasibility",
                                  "certified margin t* = " + std::to_string(dual_cert.t_star));

    const auto red = problem::detail::reduce_polyhedral_with_map(P);
    const auto base = solver::solve(red.program, o.solve);
    if (base.status == solver::SolveStatus::PrimalInfeasible)
        throw HypothesisViolation("finite_value", "the program is infeasible");
    if (base.status != solver::SolveStatus::Optimal)
        throw HypothesisViolation("finite_value",
                                  std::string("psi(c) is not finite: ") + solver::to_string(base.status));
    const double v0 = base.value.value();

    const auto sp = solver::inf_primal_solutions(red.program, h, base, o.solve);
    if (sp.outcome != solver::SupportResult::Outcome::Ok || !sp.value.is_finite())
        throw NumericalFailureError("slope evaluation failed: " + sp.note);
    ExactIncrement out;
    out.slope = sp.value.value();

    const double tol = o.tau_tol_scale * (1.0 + std::abs(v0));
    SensOptions oq = o;
    oq.solve.tol_feas = std::min(o.solve.tol_feas, 1e-10);
    oq.solve.tol_gap = std::min(o.solve.tol_gap, 1e-10);
    out.tau = detail::certify_horizon(
        [&](double t) { return psi(P, VectorXd(P.c() + t * h), oq); }, v0, out.slope, tol, o.tau_grid_kmax);
    return out;
}

// Difference quotients (value(t) - value(0)) / t over a decreasing step
// schedule; infinite values are recorded in the table rather than fatal.
inline std::vector<FdEntry> fd_verify(const ConicProgram& P, const Perturbation& pert,
                                      const std::vector<double>& t_schedule, const SensOptions& o = {}) {
    SensOptions oq = o;
    oq.solve.tol_feas = std::min(o.solve.tol_feas, o.fd_tol);
    oq.solve.tol_gap = std::min(o.solve.tol_gap, o.fd_tol);
    oq.solve.max_iter = std::max(o.solve.max_iter, 300);

    auto value_at = [&](double t) {
        Perturbation q = pert;
        q.step = t;
        const ConicProgram Q = problem::perturb(P, q);
        return (pert.kind == Perturbation::Kind::RhsDirection) ? phi(Q, Q.b(), oq) : psi(Q, Q.c(), oq);
    };
    const ExtReal v0 = value_at(0.0);
    if (!v0.is_finite()) throw HypothesisViolation("finite_value", "base value is not finite");

    std::vector<FdEntry> table;
    for (double t : t_schedule) {
        if (!(t > 0)) throw DimensionError("fd_verify: schedule must contain positive steps");
        FdEntry e;
        e.t = t;
        const ExtReal vt = value_at(t);
        if (vt.is_finite())
            e.quotient = ExtReal::finite((vt.value() - v0.value()) / t);
        else
            e.quotient = vt;  // recorded, not fatal
        table.push_back(e);
    }
    return table;
}

struct LipschitzProbeResult {
    bool finite_everywhere = true;
    double modulus_estimate = 0.0;
    double radius_used = 0.0;
    int samples = 0;
};

// Samples pairs in a ball around b (shrunk to half the certified interior
// margin) and reports the largest finite difference ratio of phi.
inline LipschitzProbeResult lipschitz_probe(const ConicProgram& P, double radius, int sample_count,
                                            const SensOptions& o = {}) {
    const auto g = detail::gate_data(P, o, true, false, true);
    if (g.primal.t_star < o.strict_threshold)
        throw HypothesisViolation("primal_strict_feasibility",
                                  "certified margin t* = " + std::to_string(g.primal.t_star));
    if (g.base.status != solver::SolveStatus::Optimal)
        throw HypothesisViolation("finite_value",
                                  std::string("phi(b) is not finite: ") + solver::to_string(g.base.status));

    // the witness satisfies A x0 - b - t* u in K; perturbing b by at most
    // half the l2 margin of that slack keeps x0 strictly feasible
    const VectorXd slack = P.A() * g.primal.witness - P.b();
    const double margin = cones::interior_margin(P.cone(), slack) / std::sqrt(2.0);
    LipschitzProbeResult out;
    out.radius_used = std::min(radius, 0.5 * std::max(margin, 0.0));
    out.samples = sample_count;
    if (sample_count <= 0 || out.radius_used <= 0.0) {
        out.radius_used = std::max(out.radius_used, 0.0);
        return out;  // vacuously finite over the empty pair set
    }

    std::mt19937 rng(o.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int m = P.m();
    auto sample_ball = [&]() {
        VectorXd u(m);
        for (int i = 0; i < m; ++i) u(i) = gauss(rng);
        u.normalize();
        const double r = out.radius_used * std::pow(unif(rng), 1.0 / m);
        return VectorXd(P.b() + r * u);
    };

    for (int k = 0; k < sample_count; ++k) {
        const VectorXd b1 = sample_ball();
        const VectorXd b2 = sample_ball();
        const ExtReal v1 = phi(P, b1, o);
        const ExtReal v2 = phi(P, b2, o);
        if (!v1.is_finite() || !v2.is_finite()) {
            out.finite_everywhere = false;
            continue;
        }
        const double dist = (b1 - b2).norm();
        if (dist > 1e-12)
            out.modulus_estimate = std::max(out.modulus_estimate, std::abs(v1.value() - v2.value()) / dist);
    }
    return out;
}

// Probes boundedness of the perturbed dual solution set by checking that
// its support function stays finite along the probe directions
// (default: +- unit axes).
inline bool dual_solution_boundedness_probe(const ConicProgram& P, const VectorXd& b_new,
                                            std::vector<VectorXd> probe_directions = {},
                                            const SensOptions& o = {}) {
    if (b_new.size() != P.m()) throw DimensionError("boundedness probe: right-hand side length != m");
    const ConicProgram Q = P.with_b(b_new);
    const auto g = detail::gate_data(Q, o, true, false, true);
    if (g.primal.t_star < o.strict_threshold)
        throw HypothesisViolation("primal_strict_feasibility",
                                  "certified margin t* = " + std::to_string(g.primal.t_star));
    if (g.base.status != solver::SolveStatus::Optimal)
        throw HypothesisViolation("finite_value",
                                  std::string("phi(b') is not finite: ") + solver::to_string(g.base.status));

    if (probe_directions.empty()) {
        for (int i = 0; i < Q.m(); ++i) {
            VectorXd e = VectorXd::Zero(Q.m());
            e(i) = 1.0;
            probe_directions.push_back(e);
            probe_directions.push_back(-e);
        }
    }
    for (const auto& w : probe_directions) {
        const auto r = solver::support_dual_solutions(g.reduced, g.B * w, g.base, o.solve);
        if (r.outcome != solver::SupportResult::Outcome::Ok) return false;
        if (!r.value.is_finite()) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Report assembly used by the command-line front end.
// ---------------------------------------------------------------------------

inline SensitivityReport analyze_rhs(const ConicProgram& P, const VectorXd& d,
                                     const std::vector<double>& t_grid, const SensOptions& o = {}) {
    SensitivityReport rep;
    rep.direction = Perturbation::rhs(d);
    const auto g = detail::gate_data(P, o, true, true, true);
    rep.hypotheses.primal_strict = g.primal.strictly_feasible();
    rep.hypotheses.dual_strict = g.dual.strictly_feasible();
    rep.hypotheses.primal_margin = g.primal.t_star;
    rep.hypotheses.dual_margin = g.dual.t_star;
    rep.base_value = detail::value_of(g.base);
    rep.hypotheses.finite_value = rep.base_value.is_finite();
    if (!rep.hypotheses.primal_strict)
        throw HypothesisViolation("primal_strict_feasibility",
                                  "certified margin t* = " + std::to_string(g.primal.t_star));
    if (!rep.hypotheses.finite_value)
        throw HypothesisViolation("finite_value", "phi(b) = " + rep.base_value.str());

    rep.derivative = phi_dir_deriv(P, d, o);
    const double t_probe = t_grid.empty() ? 0.125 : t_grid.front();
    const auto bounds = phi_increment_bounds(P, d, t_probe, o);
    rep.lower_slope = bounds.lower_slope;
    rep.upper_slope = bounds.upper_slope;
    rep.attained = bounds.upper_slope_attained;
    rep.upper_valid = bounds.upper_valid;
    if (P.cone().is_polyhedral()) {
        const auto ex = phi_increment_exact_polyhedral(P, d, o);
        rep.tau = ex.tau;
    }
    if (!t_grid.empty()) rep.fd_table = fd_verify(P, Perturbation::rhs(d), t_grid, o);
    return rep;
}

inline SensitivityReport analyze_obj(const ConicProgram& P, const VectorXd& h,
                                     const std::vector<double>& t_grid, const SensOptions& o = {}) {
    SensitivityReport rep;
    rep.direction = Perturbation::obj(h);
    const auto g = detail::gate_data(P, o, true, true, true);
    rep.hypotheses.primal_strict = g.primal.strictly_feasible();
    rep.hypotheses.dual_strict = g.dual.strictly_feasible();
    rep.hypotheses.primal_margin = g.primal.t_star;
    rep.hypotheses.dual_margin = g.dual.t_star;
    rep.base_value = detail::value_of(g.base);
    rep.hypotheses.finite_value = rep.base_value.is_finite();
    if (!rep.hypotheses.primal_strict)
        throw HypothesisViolation("primal_strict_feasibility",
                                  "certified margin t* = " + std::to_string(g.primal.t_star));
    if (!rep.hypotheses.dual_strict)
        throw HypothesisViolation("dual_strict_feasibility",
                                  "certified margin t* = " + std::to_string(g.dual.t_star));
    if (!rep.hypotheses.finite_value)
        throw HypothesisViolation("finite_value", "psi(c) = " + rep.base_value.str());

    rep.derivative = psi_dir_deriv(P, h, o);
    const double t_probe = t_grid.empty() ? 0.125 : t_grid.front();
    const auto bounds = psi_increment_bounds(P, h, t_probe, o);
    rep.lower_slope = bounds.lower_slope;
    rep.upper_slope = bounds.upper_slope;
    rep.attained = bounds.upper_slope_attained;
    rep.upper_valid = bounds.upper_valid;
    if (P.cone().is_polyhedral() && rep.derivative->is_finite()) {
        const auto ex = psi_increment_exact_polyhedral(P, h, o);
        rep.tau = ex.tau;
    }
    if (!t_grid.empty()) rep.fd_table = fd_verify(P, Perturbation::obj(h), t_grid, o);
    return rep;
}

}  // namespace conelp::sensitivity

#endif
