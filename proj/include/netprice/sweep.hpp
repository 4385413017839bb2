#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "componentwise.hpp"
#include "game.hpp"
#include "redistribution.hpp"
#include "scenario.hpp"
#include "solver_p.hpp"

namespace netprice {

// Seeded multiplicative spread 1 + jitter*U(-1,1), rescaled to mean one.
inline Vector jitter_factors(int n, double jitter, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector f(n);
    for (int i = 0; i < n; ++i) f(i) = 1.0 + jitter * u(rng);
    return f / f.mean();
}

// Gives the largest factor to the agent with the largest score; ties by index.
inline Vector assign_by_rank(const Vector& factors, const Vector& score) {
    const int n = static_cast<int>(factors.size());
    std::vector<double> sorted(factors.data(), factors.data() + n);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    std::vector<int> agents(n);
    std::iota(agents.begin(), agents.end(), 0);
    std::stable_sort(agents.begin(), agents.end(), [&](int a, int b) { return score(a) > score(b); });
    Vector out(n);
    for (int k = 0; k < n; ++k) out(agents[k]) = sorted[k];
    return out;
}

struct SweepOutcome {
    std::vector<ResultRecord> rows;
    int skipped_points = 0;  // points whose average raise would be negative
};

inline std::vector<double> sweep_points(const SweepSpec& spec, double scale) {
    std::vector<double> pts;
    for (int k = 0; k < spec.steps; ++k) {
        const double t = spec.steps == 1 ? 0.0 : static_cast<double>(k) / (spec.steps - 1);
        pts.push_back(scale * (spec.start + (spec.stop - spec.start) * t));
    }
    return pts;
}

// Varies the network-average maximum sustainable price, keeping the average
// raise equal across problems. Rows come out ordered by sweep value, then by
// the order of spec.problems.
inline SweepOutcome run_sweep(const ResolvedScenario& sc, const SweepSpec& spec, std::uint64_t seed,
                              const SolverPOptions& p_opts = {}) {
    const int n = sc.network.size();
    const auto bundle = leontief_bundle(sc.network, sc.params, sc.p_b0);
    const PriceProfile pre{sc.p_a0, sc.p_b0};
    const auto pre_eq = nonneg_equilibrium(bundle, pre);
    const double w0 = utilities(bundle.adjacency, sc.params, pre, pre_eq.efforts).sum();
    const double x0 = aggregate_unsustainable(pre_eq.efforts);
    const Vector factors = jitter_factors(n, spec.jitter, seed);
    const double mean_pa0 = sc.p_a0.mean();

    SweepOutcome out;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (double pbar : sweep_points(spec, spec.relative ? sc.p_b0.mean() : 1.0)) {
        const double raise = pbar - mean_pa0;
        if (raise < -1e-12 * std::max(1.0, std::abs(pbar))) {
            ++out.skipped_points;
            continue;
        }
        const double r = std::max(0.0, raise);
        for (const auto& problem : spec.problems) {
            ResultRecord row{sc.id, problem, pbar, nan, nan, nan, nan, ""};
            try {
                PolicyResult res;
                if (problem == "p") {
                    const Vector uniform = sc.p_a0.array() + r;
                    const Vector score = 2.0 * bundle.q_mat * uniform - bundle.v_vec;
                    const Vector w = spec.assignment == "gradient" ? assign_by_rank(factors, score) : factors;
                    res = solve_p(bundle, ProblemP{sc.p_a0, sc.p_a0 + r * w, sc.p_b0, sc.tau_b}, p_opts);
                } else if (problem == "ptilde") {
                    const Vector cap = sc.p_a0.array() + r;
                    res = solve_ptilde(sc.network, sc.params,
                                       make_problem_ptilde(sc.network, sc.p_a0, cap, sc.p_b0, sc.tau_b))
                              .policy;
                } else {
                    const Vector budget = Vector::Constant(n, spec.pr_budget);
                    Vector rho = spec.pr_rho_max ? Vector::Constant(n, *spec.pr_rho_max)
                                                 : Vector::Constant(n, std::max(0.0, r - spec.pr_budget));
                    rho = rho.cwiseMin(sc.p_b0);
                    res = solve_pr(bundle, ProblemPR{sc.p_a0, sc.p_b0, rho, budget, sc.tau_b});
                }
                row.welfare = res.welfare;
                row.welfare_gain_pct = 100.0 * (res.welfare - w0) / std::abs(w0);
                row.agg_xb = res.agg_unsustainable;
                row.agg_xb_reduction_pct = 100.0 * (x0 - res.agg_unsustainable) / x0;
                row.certificate = to_string(res.certificate);
            } catch (const Error& e) {
                switch (e.kind()) {
                case ErrorKind::Infeasible: row.certificate = "INFEASIBLE"; break;
                case ErrorKind::AssumptionViolation: row.certificate = "ASSUMPTION_VIOLATION"; break;
                case ErrorKind::NumericalFailure: row.certificate = "NUMERICAL_FAILURE"; break;
                case ErrorKind::InvalidInput: throw;
                }
            }
            out.rows.push_back(std::move(row));
        }
    }
    return out;
}

}  // namespace netprice
