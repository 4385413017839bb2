#pragma once

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <netprice/componentwise.hpp>
#include <netprice/feasibility.hpp>
#include <netprice/game.hpp>
#include <netprice/oracle.hpp>
#include <netprice/redistribution.hpp>
#include <netprice/scenario.hpp>
#include <netprice/solver_p.hpp>
#include <netprice/sweep.hpp>

namespace netprice::cli {

using nlohmann::json;

inline json to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline std::string kind_name(ErrorKind k) {
    switch (k) {
    case ErrorKind::InvalidInput: return "invalid_input";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::AssumptionViolation: return "assumption_violation";
    case ErrorKind::NumericalFailure: return "numerical_failure";
    }
    return "error";
}

inline json to_json(const EquilibriumCertificate& c) {
    return {{"branch", to_string(c.branch)},
            {"active_set", c.active_set},
            {"active_set_a", c.active_set_a},
            {"kkt_residual", c.kkt_residual},
            {"assumption3_warning", c.assumption3_warning}};
}

inline json to_json(const PolicyResult& r) {
    json j{{"policy_a", to_json(r.policy_a)},
           {"policy_b", to_json(r.policy_b)},
           {"welfare", r.welfare},
           {"agg_unsustainable", r.agg_unsustainable},
           {"certificate", to_string(r.certificate)},
           {"optimality_exact", r.optimality_exact},
           {"equilibrium", to_json(r.equilibrium)},
           {"notes", r.notes}};
    if (r.utility_change.size() > 0) j["utility_change"] = to_json(r.utility_change);
    return j;
}

struct Flags {
    std::string config;
    std::string network;
    std::string out;
    std::uint64_t seed = 1;
    int bruteforce_limit = 15;
    bool paper_literal = false;
    double tol = 1e-8;
    std::string problem;
    bool uniform_pricing = false;
};

struct Context {
    ScenarioConfig config;
    ResolvedScenario scenario;
    EquilibriumOptions eq;
    SolverPOptions p_opts;
};

inline Context load_context(const Flags& f) {
    if (f.config.empty()) throw invalid_input("--config is required");
    Context c;
    c.config = load_scenario(f.config);
    c.scenario = resolve_scenario(c.config, f.network);
    c.eq.kkt_tol = f.tol;
    c.p_opts.bruteforce_limit = f.bruteforce_limit;
    c.p_opts.equilibrium = c.eq;
    return c;
}

inline void emit(const json& j, const Flags& f, std::ostream& out) {
    out << j.dump(2) << '\n';
    if (!f.out.empty()) {
        std::ofstream file(f.out);
        if (!file) throw invalid_input("cannot write " + f.out);
        file << j.dump(2) << '\n';
    }
}

inline ProblemP problem_p(const ResolvedScenario& s) {
    if (s.p_max.size() == 0) throw invalid_input("problem needs 'p_max'");
    return {s.p_a0, s.p_max, s.p_b0, s.tau_b};
}

inline ProblemPR problem_pr(const ResolvedScenario& s) {
    if (s.rho_max.size() == 0) throw invalid_input("problem needs 'rho_max'");
    return {s.p_a0, s.p_b0, s.rho_max, s.budget, s.tau_b};
}

inline json relaxation_json(const PTildeResult& r) {
    const auto& x = r.relaxation;
    return {{"order", x.order},
            {"ell_prime", x.ell_prime},
            {"ell_star", x.ell_star},
            {"gamma", to_json(x.gamma)},
            {"bar_p", to_json(x.bar_p)},
            {"exact", x.exact},
            {"upper_bound", x.upper_bound},
            {"suggested_tau_b", x.suggested_tau_b},
            {"lambda_star", x.lambda_star},
            {"dual_value", x.dual_value}};
}

inline int cmd_feasibility(const Flags& f, std::ostream& out) {
    const auto c = load_context(f);
    const auto& s = c.scenario;
    const auto a1 = check_assumption1(s.network, s.params);
    const auto report = classify_regime(s.network, s.params, s.rho_max);
    json comps = json::array();
    for (const auto& comp : report.components)
        comps.push_back({{"vertices", comp.vertices}, {"regime", to_string(comp.regime)}, {"min_degree", comp.min_degree}});
    emit({{"regime", to_string(report.regime)},
          {"triggered_condition", report.triggered_condition},
          {"assumption1", {{"holds", a1.holds}, {"value", a1.value}}},
          {"assumption2", check_assumption2(s.params)},
          {"assumption2prime", check_assumption2prime(s.params)},
          {"b_delta_signs", report.b_delta_signs},
          {"essentially_feasible_p", report.essentially_feasible_p},
          {"essentially_feasible_pr", report.essentially_feasible_pr},
          {"components", comps}},
         f, out);
    return 0;
}

inline int cmd_equilibrium(const Flags& f, std::ostream& out) {
    const auto c = load_context(f);
    const auto& s = c.scenario;
    const auto bundle = leontief_bundle(s.network, s.params, s.p_b0);
    const PriceProfile prices{s.p_a0, s.p_b0};
    const auto eq = nonneg_equilibrium(bundle, prices, nullptr, c.eq);
    const Vector u = utilities(bundle.adjacency, s.params, prices, eq.efforts);
    json cert = to_json(eq.certificate);
    cert["assumption3_warning"] = eq.efforts.x_a.minCoeff() <= 0.0 || eq.efforts.x_b.minCoeff() <= 0.0;
    emit({{"x_a", to_json(eq.efforts.x_a)},
          {"x_b", to_json(eq.efforts.x_b)},
          {"utilities", to_json(u)},
          {"welfare", u.sum()},
          {"agg_unsustainable", aggregate_unsustainable(eq.efforts)},
          {"certificate", cert}},
         f, out);
    return 0;
}

inline int cmd_centrality(const Flags& f, std::ostream& out) {
    const auto c = load_context(f);
    const auto& s = c.scenario;
    const Vector b = centrality(leontief_bundle(s.network, s.params, s.p_b0));
    std::vector<int> idx(static_cast<std::size_t>(b.size()));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int z) { return b(a) > b(z); });
    json ranked = json::array();
    for (std::size_t k = 0; k < idx.size(); ++k)
        ranked.push_back({{"rank", k + 1}, {"agent", idx[k]}, {"b_delta", b(idx[k])}});
    emit({{"centrality", ranked}}, f, out);
    return 0;
}

inline int cmd_solve(const Flags& f, std::ostream& out) {
    const auto c = load_context(f);
    const auto& s = c.scenario;
    const std::string type = f.problem.empty() ? s.problem_type : f.problem;
    if (type.empty()) throw invalid_input("no problem type: pass p, p0, pr, or ptilde, or set problem.type");
    if (type == "p" || type == "p0") {
        const auto problem = problem_p(s);
        if (type == "p0") {
            emit(to_json(solve_p0(problem, s.params)), f, out);
        } else {
            emit(to_json(solve_p(s.network, s.params, problem, c.p_opts)), f, out);
        }
        return 0;
    }
    if (type == "pr") {
        const auto problem = problem_pr(s);
        const auto bundle = leontief_bundle(s.network, s.params, s.p_b0);
        SolverPROptions opts;
        opts.equilibrium = c.eq;
        json j = to_json(solve_pr(bundle, problem, opts));
        const auto check = budget_penalty_check(problem);
        j["budget_penalty_check"] = {{"overall", check.overall}, {"per_agent", check.per_agent}};
        const auto vanish = vanish_penalty(bundle, s.p_a0, s.p_b0, s.budget, f.paper_literal);
        j["vanish_penalty"] = {{"rho", to_json(vanish.rho)},
                               {"nonnegative", vanish.nonnegative},
                               {"residual", vanish.residual},
                               {"paper_literal", f.paper_literal}};
        emit(j, f, out);
        return 0;
    }
    if (type == "ptilde") {
        if (s.p_max.size() == 0) throw invalid_input("problem needs 'p_max'");
        const auto r = solve_ptilde(s.network, s.params, make_problem_ptilde(s.network, s.p_a0, s.p_max, s.p_b0, s.tau_b));
        json j = to_json(r.policy);
        j["policy_components"] = to_json(r.policy_components);
        j["relaxation"] = relaxation_json(r);
        emit(j, f, out);
        return 0;
    }
    throw invalid_input("unknown problem type '" + type + "'");
}

inline int cmd_sweep(const Flags& f, std::ostream& out, std::ostream& err) {
    const auto c = load_context(f);
    if (!c.config.sweep) throw invalid_input("missing field 'sweep'");
    const auto result = run_sweep(c.scenario, *c.config.sweep, f.seed, c.p_opts);
    const std::string path = f.out.empty() ? detail::resolve_path(c.config.base_dir, c.config.output) : f.out;
    if (path.empty()) {
        write_results(result.rows, out);
    } else {
        write_results(result.rows, path);
        out << "wrote " << result.rows.size() << " rows to " << path << '\n';
    }
    if (result.skipped_points > 0)
        err << "skipped " << result.skipped_points << " points below the average pre-intervention price\n";
    return 0;
}

inline int cmd_verify(const Flags& f, std::ostream& out) {
    const auto c = load_context(f);
    const auto& s = c.scenario;
    const int n = s.network.size();
    const auto bundle = leontief_bundle(s.network, s.params, s.p_b0);
    bool all_ok = true;
    auto report = [&](bool ok, const std::string& name, const std::string& detail) {
        out << (ok ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
        all_ok = all_ok && ok;
    };
    auto fmt = [](double x) {
        std::ostringstream os;
        os.precision(3);
        os << std::scientific << x;
        return os.str();
    };

    const PriceProfile pre{s.p_a0, s.p_b0};
    const auto eq = nonneg_equilibrium(bundle, pre, nullptr, c.eq);
    const auto br = best_response_fixed_point(bundle.adjacency, s.params, pre, 1e-12, 200000,
                                              safe_damping(s.params, spectral_radius(s.network)));
    const double scale = std::max(1.0, std::max(eq.efforts.x_a.cwiseAbs().maxCoeff(), eq.efforts.x_b.cwiseAbs().maxCoeff()));
    const double diff = std::max((eq.efforts.x_a - br.efforts.x_a).lpNorm<Eigen::Infinity>(),
                                 (eq.efforts.x_b - br.efforts.x_b).lpNorm<Eigen::Infinity>()) / scale;
    report(br.trace.converged && diff < 1e-7, "equilibrium_vs_best_response", "relative sup-norm gap " + fmt(diff));
    report(eq.certificate.kkt_residual <= c.eq.kkt_tol, "equilibrium_kkt", "residual " + fmt(eq.certificate.kkt_residual));
    if (n <= 12) {
        const auto s_min = subset_minimal_s(bundle, pre);
        const bool ok = eq.certificate.branch != EquilibriumBranch::MixedMinimalSet ||
                        s_min.size() == eq.certificate.active_set.size();
        report(ok, "minimal_set", "exhaustive size " + std::to_string(s_min.size()));
    }

    const double w_tol = 1e-8;
    if (s.problem_type == "p") {
        const auto problem = problem_p(s);
        const auto r = solve_p(bundle, problem, c.p_opts);
        if (n <= f.bruteforce_limit) {
            const auto brute = vertex_enumeration_p(bundle, problem, f.bruteforce_limit);
            const double gap = std::abs(r.welfare - brute.welfare) / std::max(1.0, std::abs(brute.welfare));
            report(gap <= w_tol, "solve_p_vs_vertices", to_string(r.certificate) + ", relative gap " + fmt(gap));
        }
    } else if (s.problem_type == "ptilde") {
        const auto problem = make_problem_ptilde(s.network, s.p_a0, s.p_max, s.p_b0, s.tau_b);
        const auto r = solve_ptilde(s.network, s.params, problem);
        if (problem.p_a0.size() <= f.bruteforce_limit) {
            const auto brute = vertex_enumeration_ptilde(s.network, s.params, problem);
            const double rel = std::max(1.0, std::abs(brute.welfare));
            const bool ok = r.relaxation.exact ? std::abs(r.policy.welfare - brute.welfare) <= w_tol * rel
                                               : brute.welfare <= r.relaxation.upper_bound + w_tol * rel;
            report(ok, "solve_ptilde_vs_vertices",
                   to_string(r.policy.certificate) + ", vertex optimum " + std::to_string(brute.welfare));
        }
    } else if (s.problem_type == "pr") {
        const auto problem = problem_pr(s);
        const auto r = solve_pr(bundle, problem);
        const auto grid = grid_search_pr(bundle, problem, n <= 2 ? 10 : 20, 200000);
        const double rel = std::max(1.0, std::abs(grid.welfare));
        if (r.certificate == Certificate::Thm5MaxRho || r.certificate == Certificate::Prop3StatusQuo)
            report(r.welfare >= grid.welfare - w_tol * rel, "solve_pr_vs_grid",
                   to_string(r.certificate) + " welfare " + std::to_string(r.welfare) + ", grid " +
                       std::to_string(grid.welfare));
        if (r.certificate == Certificate::Thm5MaxRho && r.utility_change.size() > 0)
            report(r.utility_change.minCoeff() >= -1e-9 * rel, "pareto_safe",
                   "least utility change " + fmt(r.utility_change.minCoeff()));
    }
    return all_ok ? 0 : 4;
}

inline int cmd_recommend(const Flags& f, std::ostream& out) {
    const auto c = load_context(f);
    const auto& s = c.scenario;
    const int n = s.network.size();
    ProblemPR pr;
    if (s.problem_type == "pr") {
        pr = problem_pr(s);
    } else if (s.problem_type == "p" || s.problem_type == "ptilde") {
        pr = {s.p_a0, s.p_b0, Vector::Zero(n), s.p_max - s.p_a0, s.tau_b};
    } else {
        throw invalid_input("recommend needs a problem with rho_max/budget or p_max");
    }
    const std::string max_policy = "set (p^A,p^B)=(p^A0+rho^max+b, p^B0-rho^max)";
    json j;
    const auto check = budget_penalty_check(pr);
    j["budget_penalty_condition"] = check.overall;
    j["unsustainable_effort_reduction"] = max_policy;
    j["maximal_policy"] = {{"policy_a", to_json(pr.p_a0 + pr.rho_max + pr.budget)},
                           {"policy_b", to_json(pr.p_b0 - pr.rho_max)}};
    if (check.overall) {
        j["welfare_improvement"] = max_policy;
    } else {
        // Spend the budget with the price-only problem, then re-check with the improved floor.
        const Vector pmax = pr.p_a0 + pr.budget;
        PolicyResult star;
        std::string via;
        if (f.uniform_pricing) {
            star = solve_ptilde(s.network, s.params, make_problem_ptilde(s.network, pr.p_a0, pmax, pr.p_b0, pr.tau_b)).policy;
            via = "P~";
        } else {
            star = solve_p(s.network, s.params, ProblemP{pr.p_a0, pmax, pr.p_b0, pr.tau_b}, c.p_opts);
            via = "P";
        }
        ProblemPR again = pr;
        again.p_a0 = star.policy_a;
        const bool recheck = budget_penalty_check(again).overall;
        j["solved"] = {{"problem", via}, {"certificate", to_string(star.certificate)}, {"p_star", to_json(star.policy_a)}};
        j["recheck_with_p_star"] = recheck;
        j["welfare_improvement"] = recheck ? max_policy
                                           : "solve " + via + " to obtain p*; set (p^A,p^B)=(p*, p^B0)";
    }
    emit(j, f, out);
    return 0;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Price interventions for sustainable production on networks"};
    app.require_subcommand(1);
    app.fallthrough();
    Flags f;
    app.add_option("--config", f.config, "Scenario JSON");
    app.add_option("--network", f.network, "Edge list (CSV src,dst or JSON) overriding the config");
    app.add_option("--out", f.out, "Output file");
    app.add_option("--seed", f.seed, "Seed for sweep jitter");
    app.add_option("--bruteforce-limit", f.bruteforce_limit, "Largest n for exhaustive vertex search");
    app.add_flag("--paper-literal", f.paper_literal, "Use the alternative vanishing-penalty formula, which does not zero x^B");
    app.add_option("--tol", f.tol, "KKT tolerance for equilibria");

    auto* feas = app.add_subcommand("feasibility", "Classify whether price raises can cut unsustainable effort");
    auto* equil = app.add_subcommand("equilibrium", "Equilibrium efforts at pre-intervention prices");
    auto* cent = app.add_subcommand("centrality", "Agents ranked by centrality");
    auto* solve = app.add_subcommand("solve", "Solve a policy problem");
    solve->add_option("problem", f.problem, "p, p0, pr, or ptilde (default: config problem.type)")
        ->check(CLI::IsMember({"p", "p0", "pr", "ptilde"}));
    auto* sweep = app.add_subcommand("sweep", "Sweep the average maximum price and write CSV");
    auto* verify = app.add_subcommand("verify", "Cross-check solvers against brute-force oracles");
    auto* recommend = app.add_subcommand("recommend", "Policy recommendation from the budget-penalty condition");
    recommend->add_flag("--uniform-pricing", f.uniform_pricing, "Use component-wise uniform prices");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }
    try {
        if (feas->parsed()) return cmd_feasibility(f, out);
        if (equil->parsed()) return cmd_equilibrium(f, out);
        if (cent->parsed()) return cmd_centrality(f, out);
        if (solve->parsed()) return cmd_solve(f, out);
        if (sweep->parsed()) return cmd_sweep(f, out, err);
        if (verify->parsed()) return cmd_verify(f, out);
        if (recommend->parsed()) return cmd_recommend(f, out);
    } catch (const Error& e) {
        err << json{{"error", kind_name(e.kind())}, {"message", e.what()}}.dump() << '\n';
        return exit_code(e.kind());
    } catch (const json::exception& e) {
        err << json{{"error", "invalid_input"}, {"message", e.what()}}.dump() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace netprice::cli
