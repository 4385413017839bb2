#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "game.hpp"
#include "network.hpp"
#include "oracle.hpp"
#include "policy.hpp"

namespace netprice {

struct BudgetPenaltyCheck {
    std::vector<bool> per_agent;
    bool overall = true;
};

// rho_max + b/2 >= p_b0 - p_a0, agent by agent.
inline BudgetPenaltyCheck budget_penalty_check(const ProblemPR& problem) {
    BudgetPenaltyCheck out;
    for (Eigen::Index i = 0; i < problem.p_a0.size(); ++i) {
        const bool ok = problem.rho_max(i) + 0.5 * problem.budget(i) >= problem.p_b0(i) - problem.p_a0(i);
        out.per_agent.push_back(ok);
        out.overall = out.overall && ok;
    }
    return out;
}

struct VanishPenalty {
    Vector rho;
    bool nonnegative = true;
    double residual = 0.0;  // max |interior x^B| at the resulting policy
};

// Penalty that drives every agent's interior unsustainable effort to zero when
// premiums rise by the same amount plus the budget:
//   2 M- rho = (M+ + M-) p_b0 - M_delta (p_a0 + b).
// paper_literal selects rho = M-^-1 (M+ p_b0 - p_a0 - M_delta b) / 2 instead, for comparison.
inline VanishPenalty vanish_penalty(const LeontiefBundle& bundle, const Vector& p_a0, const Vector& p_b0,
                                    const Vector& budget, bool paper_literal = false) {
    const auto lu = bundle.m_minus.partialPivLu();
    VanishPenalty out;
    if (paper_literal)
        out.rho = 0.5 * lu.solve(bundle.m_plus * p_b0 - p_a0 - bundle.m_delta * budget);
    else
        out.rho = lu.solve((bundle.m_plus + bundle.m_minus) * p_b0 - bundle.m_delta * (p_a0 + budget)) / 2.0;
    out.nonnegative = out.rho.minCoeff() >= 0.0;
    const auto x = interior_equilibrium(bundle, {p_a0 + out.rho + budget, p_b0 - out.rho}).efforts;
    out.residual = x.x_b.cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, p_b0.cwiseAbs().maxCoeff());
    if (!paper_literal && out.residual > 1e-8 * scale)
        throw numerical_failure("vanishing penalty leaves unsustainable effort " + std::to_string(out.residual));
    return out;
}

struct SolverPROptions {
    int grid_steps = 20;
    std::size_t grid_max_points = 200000;
    EquilibriumOptions equilibrium;
};

inline PolicyResult solve_pr(const LeontiefBundle& bundle, const ProblemPR& problem, const SolverPROptions& opts = {}) {
    const int n = bundle.size();
    problem.validate(n);
    if (bundle.p_b0 != problem.p_b0) throw invalid_input("bundle was built for a different p_b0");
    const Vector pa_max = problem.p_a0 + problem.rho_max + problem.budget;
    const Vector pb_min = problem.p_b0 - problem.rho_max;
    const double tau_tol = 1e-9 * std::max(1.0, problem.tau_b);

    auto max_policy = evaluate_policy(bundle, pa_max, pb_min, Certificate::Thm5MaxRho, true, opts.equilibrium);
    if (max_policy.agg_unsustainable > problem.tau_b + tau_tol)
        throw infeasible("tolerance unattainable even with maximal penalties and premiums (aggregate " +
                         std::to_string(max_policy.agg_unsustainable) + ")");
    std::ostringstream floor_note;
    floor_note.precision(12);
    floor_note << "maximal penalties and premiums give the least aggregate unsustainable effort: "
               << max_policy.agg_unsustainable;

    const PriceProfile pre_prices{problem.p_a0, problem.p_b0};
    const auto pre_eq = nonneg_equilibrium(bundle, pre_prices, nullptr, opts.equilibrium);
    const Vector pre_u = utilities(bundle.adjacency, bundle.params, pre_prices, pre_eq.efforts);
    const bool pre_positive = pre_eq.efforts.x_a.minCoeff() > 0.0 && pre_eq.efforts.x_b.minCoeff() > 0.0;

    if (budget_penalty_check(problem).overall) {
        const auto post_eq = nonneg_equilibrium(bundle, {pa_max, pb_min}, &pre_eq.efforts, opts.equilibrium);
        max_policy.utility_change =
            utilities(bundle.adjacency, bundle.params, {pa_max, pb_min}, post_eq.efforts) - pre_u;
        max_policy.notes.push_back(floor_note.str());
        if (!pre_positive)
            max_policy.notes.push_back("pre-intervention efforts not all positive; utility guarantee may not apply");
        if (max_policy.utility_change.minCoeff() < -1e-9 * std::max(1.0, pre_u.cwiseAbs().maxCoeff()))
            max_policy.notes.push_back("some agent's utility decreased");
        return max_policy;
    }

    const bool no_budget = (problem.budget.array() == 0.0).all();
    const bool weak_penalty = (problem.rho_max.array() < (problem.p_b0 - problem.p_a0).array()).all();
    if (no_budget && weak_penalty && aggregate_unsustainable(pre_eq.efforts) <= problem.tau_b + tau_tol) {
        auto r = evaluate_policy(bundle, problem.p_a0, problem.p_b0, Certificate::Prop3StatusQuo, true,
                                 opts.equilibrium);
        r.utility_change = Vector::Zero(n);
        r.notes.push_back(floor_note.str());
        return r;
    }

    auto r = grid_search_pr(bundle, problem, opts.grid_steps, opts.grid_max_points);
    r.notes.push_back(floor_note.str());
    r.notes.push_back("outside the closed-form regions; grid optimum, optimality not certified");
    return r;
}

inline PolicyResult solve_pr(const Network& g, const GameParams& params, const ProblemPR& problem,
                             const SolverPROptions& opts = {}) {
    return solve_pr(leontief_bundle(g, params, problem.p_b0), problem, opts);
}

}  // namespace netprice
