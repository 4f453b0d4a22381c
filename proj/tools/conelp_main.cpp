// conelp - conic linear programming sensitivity toolkit
// Licensed under Apache 2.0

#include <CLI11.hpp>
#include <iostream>
#include <sstream>

#include "conelp/cli.hpp"

namespace {

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        grid.push_back(std::stod(item));
    }
    for (size_t i = 0; i + 1 < grid.size(); ++i)
        if (!(grid[i] > grid[i + 1]) || grid[i + 1] <= 0)
            throw conelp::SchemaError("--t-grid must be a strictly decreasing list of positive steps");
    if (!grid.empty() && grid.front() <= 0)
        throw conelp::SchemaError("--t-grid must be a strictly decreasing list of positive steps");
    return grid;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"conic linear program sensitivity toolkit"};
    app.require_subcommand(1);

    conelp::cli::AnalysisRequest req;
    std::string t_grid_text;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("problem", req.problem_path, "problem JSON file")->required();
        cmd->add_option("--tol-feas", [&](const CLI::results_t& r) {
            req.tol_feas = std::stod(r[0]);
            return true;
        }, "feasibility tolerance");
        cmd->add_option("--tol-gap", [&](const CLI::results_t& r) {
            req.tol_gap = std::stod(r[0]);
            return true;
        }, "duality gap tolerance");
        cmd->add_option("--eps-level", [&](const CLI::results_t& r) {
            req.eps_level = std::stod(r[0]);
            return true;
        }, "level-set relaxation scale");
        cmd->add_option("--seed", req.seed, "random seed for probes");
        cmd->add_option("--format", req.format, "output format: json or text")
            ->check(CLI::IsMember({"json", "text"}));
        return cmd;
    };

    auto* solve = add_common(app.add_subcommand("solve", "solve the program"));
    auto* certify = add_common(app.add_subcommand("certify", "strict feasibility certificates"));
    auto* arhs = add_common(app.add_subcommand("analyze-rhs", "right-hand-side sensitivity report"));
    arhs->add_option("--direction", req.direction, "perturbation direction (JSON array or @file)")->required();
    arhs->add_option("--t-grid", t_grid_text, "comma-separated decreasing steps");
    auto* aobj = add_common(app.add_subcommand("analyze-obj", "objective sensitivity report"));
    aobj->add_option("--direction", req.direction, "perturbation direction (JSON array or @file)")->required();
    aobj->add_option("--t-grid", t_grid_text, "comma-separated decreasing steps");
    auto* verify = add_common(app.add_subcommand("verify", "difference-quotient verification"));
    verify->add_option("--direction", req.direction, "perturbation direction (JSON array or @file)")->required();
    verify->add_option("--t-grid", t_grid_text, "comma-separated decreasing steps");
    verify->add_option("--target", req.target, "value function: rhs or obj")
        ->check(CLI::IsMember({"rhs", "obj"}));
    auto* probe = add_common(app.add_subcommand("probe", "Lipschitz and boundedness probes"));
    probe->add_option("--radius", req.radius, "probe ball radius");
    probe->add_option("--samples", req.samples, "number of sample pairs");
    (void)solve;
    (void)certify;

    CLI11_PARSE(app, argc, argv);

    for (auto* cmd : {solve, certify, arhs, aobj, verify, probe})
        if (cmd->parsed()) req.command = cmd->get_name();
    try {
        if (!t_grid_text.empty()) req.t_grid = parse_grid(t_grid_text);
    } catch (const conelp::SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return 3;
    }
    return conelp::cli::run(req, std::cout, std::cerr);
}
