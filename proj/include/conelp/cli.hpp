// conelp - conic linear programming sensitivity toolkit
// Licensed under Apache 2.0

#ifndef CONELP_CLI_HPP
#define CONELP_CLI_HPP

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "conelp/json_io.hpp"
#include "conelp/sensitivity.hpp"

namespace conelp::cli {

// Command-line front end.  Commands:
//   solve        solution with status, value and certificates
//   certify      strict feasibility certificates for both sides
//   analyze-rhs  sensitivity report for right-hand-side perturbations
//   analyze-obj  sensitivity report for objective perturbations
//   verify       difference-quotient table checked against the derivative
//   probe        Lipschitz ball probe and dual-solution boundedness probe
// Exit codes: 0 success, 2 hypothesis violation, 3 schema error,
// 4 numerical failure.

struct AnalysisRequest {
    std::string command;
    std::string problem_path;
    std::string direction;          // inline JSON array or @file
    std::vector<double> t_grid;     // strictly decreasing positive steps
    std::string target = "rhs";     // verify: which value function
    unsigned seed = 42;
    double radius = 0.1;            // probe ball radius
    int samples = 50;               // probe sample pairs
    std::optional<double> tol_feas;
    std::optional<double> tol_gap;
    std::optional<double> eps_level;
    std::string format = "json";
};

namespace detail {

inline VectorXd parse_direction(const std::string& text, int expected_len) {
    std::string body = text;
    if (!body.empty() && body.front() == '@') {
        std::ifstream in(body.substr(1));
        if (!in) throw SchemaError("cannot open direction file '" + body.substr(1) + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        body = ss.str();
    }
    json j;
    try {
        j = json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(std::string("direction is not a JSON array: ") + e.what());
    }
    const VectorXd v = io::detail::parse_vector(j, "direction");
    if (v.size() != expected_len)
        throw DimensionError("direction length " + std::to_string(v.size()) + " does not match " +
                             std::to_string(expected_len));
    return v;
}

inline json vector_json(const VectorXd& v) { return io::detail::vector_to_json(v); }

inline json solution_json(const solver::Solution& s) {
    json j;
    j["status"] = solver::to_string(s.status);
    j["value"] = io::extreal_to_json(s.value);
    j["attained"] = s.attained;
    if (s.x_opt) j["x_opt"] = vector_json(*s.x_opt);
    if (s.y_opt) j["y_opt"] = vector_json(*s.y_opt);
    j["primal_residual"] = s.primal_residual;
    j["dual_residual"] = s.dual_residual;
    j["gap"] = s.gap;
    j["iterations"] = s.iterations;
    if (s.infeasibility_certificate) j["infeasibility_certificate"] = vector_json(*s.infeasibility_certificate);
    if (s.unbounded_ray) j["unbounded_ray"] = vector_json(*s.unbounded_ray);
    return j;
}

inline json certificate_json(const solver::StrictFeasibilityCertificate& c) {
    json j;
    j["side"] = (c.side == solver::StrictFeasibilityCertificate::Side::Primal) ? "primal" : "dual";
    j["strictly_feasible"] = c.strictly_feasible();
    if (std::isfinite(c.t_star))
        j["t_star"] = c.t_star;
    else
        j["t_star"] = "-inf";
    if (c.witness.size() > 0) j["witness"] = vector_json(c.witness);
    if (c.interior_direction.size() > 0) j["interior_direction"] = vector_json(c.interior_direction);
    return j;
}

inline json report_json(const sensitivity::SensitivityReport& rep) {
    json j;
    j["base_value"] = io::extreal_to_json(rep.base_value);
    if (rep.derivative) j["derivative"] = io::extreal_to_json(*rep.derivative);
    if (rep.lower_slope) j["lower_slope"] = io::extreal_to_json(*rep.lower_slope);
    if (rep.upper_slope) j["upper_slope"] = io::extreal_to_json(*rep.upper_slope);
    if (rep.tau)
        j["tau"] = *rep.tau;
    else
        j["tau"] = nullptr;
    j["attained"] = rep.attained;
    j["upper_valid"] = rep.upper_valid;
    json tab = json::array();
    for (const auto& e : rep.fd_table) tab.push_back(json::array({e.t, io::extreal_to_json(e.quotient)}));
    j["fd_table"] = std::move(tab);
    j["hypotheses"] = json{{"primal_strict", rep.hypotheses.primal_strict},
                           {"dual_strict", rep.hypotheses.dual_strict},
                           {"margins", json{{"primal", rep.hypotheses.primal_margin},
                                            {"dual", rep.hypotheses.dual_margin}}},
                           {"finite_value", rep.hypotheses.finite_value}};
    return j;
}

inline void print_report(std::ostream& out, const json& j, const std::string& format) {
    if (format == "text") {
        // flat key: value lines, one per top-level field
        for (const auto& [key, val] : j.items()) out << key << ": " << val.dump() << "\n";
    } else {
        out << j.dump(2) << "\n";
    }
}

inline sensitivity::SensOptions make_options(const AnalysisRequest& req) {
    sensitivity::SensOptions o;
    o.seed = req.seed;
    if (req.tol_feas) o.solve.tol_feas = *req.tol_feas;
    if (req.tol_gap) o.solve.tol_gap = *req.tol_gap;
    if (req.eps_level) o.solve.eps_level_scale = *req.eps_level;
    return o;
}

} // namespace detail

inline int run(const AnalysisRequest& req, std::ostream& out, std::ostream& err) {
    try {
        const ConicProgram P = io::load_problem(req.problem_path);
        const auto opts = detail::make_options(req);

        if (req.command == "solve") {
            const ConicProgram Q = sensitivity::detail::reduced_if_polyhedral(P);
            const auto s = solver::solve(Q, opts.solve);
            if (s.status == solver::SolveStatus::NumericalFailure) {
                err << "numerical failure after " << s.iterations << " iterations\n";
                return 4;
            }
            detail::print_report(out, detail::solution_json(s), req.format);
            return 0;
        }
        if (req.command == "certify") {
            json j;
            j["primal"] = detail::certificate_json(solver::certify_strict_primal(P, opts.solve));
            j["dual"] = detail::certificate_json(solver::certify_strict_dual(P, opts.solve));
            detail::print_report(out, j, req.format);
            return 0;
        }
        if (req.command == "analyze-rhs" || req.command == "analyze-obj") {
            const bool rhs = (req.command == "analyze-rhs");
            if (req.direction.empty()) throw SchemaError("--direction is required for " + req.command);
            const VectorXd dir = detail::parse_direction(req.direction, rhs ? P.m() : P.n());
            const auto rep = rhs ? sensitivity::analyze_rhs(P, dir, req.t_grid, opts)
                                 : sensitivity::analyze_obj(P, dir, req.t_grid, opts);
            detail::print_report(out, detail::report_json(rep), req.format);
            return 0;
        }
        if (req.command == "verify") {
            if (req.direction.empty()) throw SchemaError("--direction is required for verify");
            const bool rhs = (req.target != "obj");
            const VectorXd dir = detail::parse_direction(req.direction, rhs ? P.m() : P.n());
            std::vector<double> grid = req.t_grid;
            if (grid.empty()) grid = {1e-1, 1e-2, 1e-3, 1e-4};
            const Perturbation pert = rhs ? Perturbation::rhs(dir) : Perturbation::obj(dir);
            const auto tab = sensitivity::fd_verify(P, pert, grid, opts);
            const ExtReal deriv = rhs ? sensitivity::phi_dir_deriv(P, dir, opts)
                                      : sensitivity::psi_dir_deriv(P, dir, opts);
            // convexity of phi makes quotients nonincreasing as t decreases;
            // psi mirrors with nondecreasing quotients
            bool monotone = true;
            for (size_t i = 1; i < tab.size(); ++i) {
                if (!tab[i].quotient.is_finite() || !tab[i - 1].quotient.is_finite()) continue;
                const double qprev = tab[i - 1].quotient.value();
                const double qcur = tab[i].quotient.value();
                const double slack = 1e-6 * (1.0 + std::abs(qcur));
                if (rhs ? (qcur > qprev + slack) : (qcur < qprev - slack)) monotone = false;
            }
            bool converged = true;
            if (!tab.empty() && tab.back().quotient.is_finite() && deriv.is_finite())
                converged = std::abs(tab.back().quotient.value() - deriv.value()) <=
                            1e-4 * (1.0 + std::abs(deriv.value())) + 10.0 * tab.back().t;
            json j;
            j["derivative"] = io::extreal_to_json(deriv);
            json tj = json::array();
            for (const auto& e : tab) tj.push_back(json::array({e.t, io::extreal_to_json(e.quotient)}));
            j["fd_table"] = std::move(tj);
            j["monotone"] = monotone;
            j["converged"] = converged;
            j["pass"] = monotone && converged;
            detail::print_report(out, j, req.format);
            return 0;
        }
        if (req.command == "probe") {
            const auto lip = sensitivity::lipschitz_probe(P, req.radius, req.samples, opts);
            const bool bounded = sensitivity::dual_solution_boundedness_probe(P, P.b(), {}, opts);
            json j;
            j["lipschitz"] = json{{"finite_everywhere", lip.finite_everywhere},
                                  {"modulus_estimate", lip.modulus_estimate},
                                  {"radius_used", lip.radius_used},
                                  {"samples", lip.samples}};
            j["dual_solutions_bounded"] = bounded;
            j["seed"] = req.seed;
            detail::print_report(out, j, req.format);
            return 0;
        }
        err << "unknown command '" << req.command << "'\n";
        return 3;
    } catch (const HypothesisViolation& e) {
        json j;
        j["error"] = "hypothesis_violation";
        j["hypothesis"] = e.hypothesis();
        j["detail"] = e.what();
        out << j.dump(2) << "\n";
        err << "hypothesis violation: " << e.what() << "\n";
        return 2;
    } catch (const SchemaError& e) {
        err << "schema error: " << e.what() << "\n";
        return 3;
    } catch (const DimensionError& e) {
        err << "schema error: " << e.what() << "\n";
        return 3;
    } catch (const NumericalFailureError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 4;
    }
}

} // namespace conelp::cli

#endif
