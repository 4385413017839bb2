#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "game.hpp"
#include "network.hpp"
#include "policy.hpp"

namespace netprice {

struct IterationTrace {
    int iterations = 0;
    double final_residual = 0.0;
    bool converged = false;
};

struct BestResponseResult {
    EffortProfile efforts;
    IterationTrace trace;
};

// Largest damping for which the projected simultaneous update provably converges.
inline double safe_damping(const GameParams& params, double rho) {
    return std::min(1.0, 1.9 / (1.0 + params.beta + (params.delta + params.mu) * rho));
}

// Simultaneous best responses from zero effort. Each step moves a fraction
// `damping` toward the unconstrained best response and then projects onto x >= 0.
inline BestResponseResult best_response_fixed_point(const Matrix& adjacency, const GameParams& params,
                                                    const PriceProfile& prices, double tol = 1e-12,
                                                    int cap = 100000, double damping = 1.0) {
    const Eigen::Index n = prices.p_a.size();
    BestResponseResult out;
    Vector xa = Vector::Zero(n), xb = Vector::Zero(n);
    for (int it = 1; it <= cap; ++it) {
        const Vector gxa = adjacency * xa;
        const Vector gxb = adjacency * xb;
        const Vector ra = prices.p_a - params.beta * xb + params.delta * gxa + params.mu * gxb;
        const Vector rb = prices.p_b - params.beta * xa + params.delta * gxb + params.mu * gxa;
        const Vector na = ((1.0 - damping) * xa + damping * ra).cwiseMax(0.0);
        const Vector nb = ((1.0 - damping) * xb + damping * rb).cwiseMax(0.0);
        const double change = std::max((na - xa).lpNorm<Eigen::Infinity>(), (nb - xb).lpNorm<Eigen::Infinity>());
        xa = na;
        xb = nb;
        out.trace.iterations = it;
        out.trace.final_residual = change;
        if (!std::isfinite(change)) break;
        if (change < tol) {
            out.trace.converged = true;
            break;
        }
    }
    out.efforts = {xa, xb};
    return out;
}

inline BestResponseResult best_response_fixed_point(const Network& g, const GameParams& params,
                                                    const PriceProfile& prices, double tol = 1e-12,
                                                    int cap = 100000, double damping = 1.0) {
    return best_response_fixed_point(g.adjacency(), params, prices, tol, cap, damping);
}

// Vertices of {lower <= p <= upper, w'p >= k0}: feasible box corners plus
// points on the tolerance face with one coordinate strictly inside its range.
inline std::vector<Vector> polytope_vertices(const Vector& lower, const Vector& upper, const Vector& w, double k0,
                                             double feas_tol) {
    const int n = static_cast<int>(lower.size());
    if (n > 20) throw invalid_input("vertex enumeration limited to 20 coordinates");
    std::vector<Vector> out;
    const std::size_t corners = std::size_t{1} << n;
    Vector v(n);
    for (std::size_t mask = 0; mask < corners; ++mask) {
        for (int i = 0; i < n; ++i) v(i) = (mask >> i) & 1U ? upper(i) : lower(i);
        const double lhs = w.dot(v);
        if (lhs >= k0 - feas_tol) out.push_back(v);
        for (int k = 0; k < n; ++k) {
            if ((mask >> k) & 1U || w(k) <= 0.0 || upper(k) <= lower(k)) continue;
            const double pk = (k0 - (lhs - w(k) * v(k))) / w(k);
            const double margin = 1e-12 * std::max(1.0, std::abs(upper(k)));
            if (pk > lower(k) + margin && pk < upper(k) - margin) {
                Vector face = v;
                face(k) = pk;
                out.push_back(std::move(face));
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const Vector& a, const Vector& b) {
        return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
    });
    out.erase(std::unique(out.begin(), out.end(), [](const Vector& a, const Vector& b) { return a == b; }), out.end());
    return out;
}

inline double feasibility_tolerance(double k0) { return 1e-10 * std::max(1.0, std::abs(k0)); }

// Exhaustive optimum of problem P over the polytope's vertices, using the
// welfare of the constrained equilibrium at each vertex.
inline PolicyResult vertex_enumeration_p(const LeontiefBundle& bundle, const ProblemP& problem, int max_n = 15) {
    const int n = bundle.size();
    problem.validate(n);
    if (n > max_n) throw invalid_input("vertex enumeration limited to n <= " + std::to_string(max_n));
    const double k0 = k_zero(bundle, problem.p_b0, problem.tau_b);
    const auto vertices =
        polytope_vertices(problem.p_a0, problem.p_max, bundle.b_delta, k0, feasibility_tolerance(k0));
    if (vertices.empty()) throw infeasible("tolerance unattainable within the price bounds");
    PolicyResult best;
    bool have = false;
    for (const auto& v : vertices) {
        const double w = equilibrium_welfare(bundle, {v, problem.p_b0});
        if (!have || better_policy(w, v, best.welfare, best.policy_a)) {
            best.policy_a = v;
            best.welfare = w;
            have = true;
        }
    }
    return evaluate_policy(bundle, best.policy_a, problem.p_b0, Certificate::VertexEnumeration, true);
}

// Smallest subset of the agents with negative interior x^B whose pinning
// leaves every x^B non-negative. Subsets are tried by size, then lexicographically.
inline std::vector<int> subset_minimal_s(const LeontiefBundle& bundle, const PriceProfile& prices,
                                         double tol = 1e-9) {
    const int n = bundle.size();
    if (n > 12) throw invalid_input("exhaustive subset search limited to n <= 12");
    const auto interior = interior_equilibrium(bundle, prices, tol).efforts;
    std::vector<int> cand;
    for (int i = 0; i < n; ++i)
        if (interior.x_b(i) < -tol) cand.push_back(i);
    const int c = static_cast<int>(cand.size());
    Vector slack;
    for (int k = 0; k <= c; ++k) {
        std::vector<char> pick(c, 0);
        std::fill(pick.begin(), pick.begin() + k, 1);
        do {
            std::vector<int> s;
            for (int j = 0; j < c; ++j)
                if (pick[j]) s.push_back(cand[j]);
            const auto x = detail::pinned_efforts(bundle, prices, s, slack);
            if (x.x_b.minCoeff() >= -tol) return s;
        } while (std::prev_permutation(pick.begin(), pick.end()));
    }
    throw numerical_failure("no subset of the negative-effort agents yields non-negative efforts");
}

// Calls visit(p_a, p_b) on grid points of the redistribution feasible set.
// Per agent the penalty r runs over steps+1 levels of [0, rho_max] and the
// premium over steps+1 levels of [0, r + budget]. When the full per-agent grid
// exceeds max_points, every agent shares the same two fractions instead.
inline void for_each_grid_policy(const ProblemPR& problem, int steps, std::size_t max_points,
                                 const std::function<void(const Vector&, const Vector&)>& visit) {
    const int n = static_cast<int>(problem.p_a0.size());
    const int levels = steps + 1;
    const double per_agent = static_cast<double>(levels) * levels;
    const bool full = std::pow(per_agent, n) <= static_cast<double>(max_points);
    auto point = [&](int i, int r_idx, int t_idx, Vector& pa, Vector& pb) {
        const double r = problem.rho_max(i) * r_idx / steps;
        pb(i) = problem.p_b0(i) - r;
        pa(i) = problem.p_a0(i) + (r + problem.budget(i)) * t_idx / steps;
    };
    Vector pa(n), pb(n);
    if (steps == 0) {
        visit(problem.p_a0, problem.p_b0);
        return;
    }
    if (!full) {
        for (int r_idx = 0; r_idx <= steps; ++r_idx)
            for (int t_idx = 0; t_idx <= steps; ++t_idx) {
                for (int i = 0; i < n; ++i) point(i, r_idx, t_idx, pa, pb);
                visit(pa, pb);
            }
        return;
    }
    std::vector<int> digit(n, 0);
    for (;;) {
        for (int i = 0; i < n; ++i) point(i, digit[i] / levels, digit[i] % levels, pa, pb);
        visit(pa, pb);
        int i = 0;
        while (i < n && ++digit[i] == levels * levels) digit[i++] = 0;
        if (i == n) break;
    }
}

inline PolicyResult grid_search_pr(const LeontiefBundle& bundle, const ProblemPR& problem, int steps = 20,
                                   std::size_t max_points = 200000) {
    problem.validate(bundle.size());
    PolicyResult best;
    bool have = false;
    const double tau_tol = 1e-9 * std::max(1.0, problem.tau_b);
    for_each_grid_policy(problem, steps, max_points, [&](const Vector& pa, const Vector& pb) {
        const PriceProfile prices{pa, pb};
        const auto eq = nonneg_equilibrium(bundle, prices);
        if (aggregate_unsustainable(eq.efforts) > problem.tau_b + tau_tol) return;
        const double w = utilities(bundle.adjacency, bundle.params, prices, eq.efforts).sum();
        Vector key(2 * pa.size());
        key << pa, pb;
        Vector best_key(2 * pa.size());
        if (have) best_key << best.policy_a, best.policy_b;
        if (!have || better_policy(w, key, best.welfare, best_key)) {
            best.policy_a = pa;
            best.policy_b = pb;
            best.welfare = w;
            have = true;
        }
    });
    if (!have) throw infeasible("no grid point satisfies the tolerance constraint");
    return evaluate_policy(bundle, best.policy_a, best.policy_b, Certificate::GridSearch, false);
}

// Central differences with step h * max(1, |x_i|).
inline Vector finite_diff_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                                   double h = 1e-5) {
    Vector grad(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double step = h * std::max(1.0, std::abs(x(i)));
        Vector up = x, down = x;
        up(i) += step;
        down(i) -= step;
        grad(i) = (f(up) - f(down)) / (2.0 * step);
    }
    return grad;
}

}  // namespace netprice
