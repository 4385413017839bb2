#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "error.hpp"
#include "game.hpp"
#include "network.hpp"
#include "oracle.hpp"
#include "policy.hpp"

namespace netprice {

struct SolverPOptions {
    int bruteforce_limit = 15;
    int pruned_free_limit = 18;  // max coordinates left free after pruning
    EquilibriumOptions equilibrium;
};

// Network-free baseline: each agent compares its two price endpoints.
inline PolicyResult solve_p0(const ProblemP& problem, const GameParams& params) {
    params.validate();
    const int n = static_cast<int>(problem.p_a0.size());
    problem.validate(n);
    Vector p(n);
    for (int i = 0; i < n; ++i) {
        const double threshold = 2.0 * params.beta * problem.p_b0(i) - problem.p_a0(i);
        p(i) = problem.p_max(i) >= threshold ? problem.p_max(i) : problem.p_a0(i);
    }
    const auto bundle = leontief_bundle(Network::from_edges({}, n), params, problem.p_b0);
    return evaluate_policy(bundle, p, problem.p_b0, Certificate::P0Baseline, true);
}

enum class Ordering { GE, LT, Indeterminate };

inline std::string to_string(Ordering o) {
    switch (o) {
    case Ordering::GE: return "GE";
    case Ordering::LT: return "LT";
    case Ordering::Indeterminate: return "INDETERMINATE";
    }
    return "?";
}

struct Thm4Comparison {
    Ordering ordering = Ordering::Indeterminate;
    Vector psi1;
    Vector psi2;
};

// |Q p - v/2|; the ordering of two nested policies follows the ordering of psi.
inline Vector welfare_psi(const LeontiefBundle& bundle, const Vector& p) {
    return (bundle.q_mat * p - 0.5 * bundle.v_vec).cwiseAbs();
}

// Compares welfare of p1 >= p2 without evaluating it. The price ceiling
// p1 <= p_lim may be replaced by p2 >= p_b0.
inline Thm4Comparison thm4_compare(const LeontiefBundle& bundle, const Vector& p1, const Vector& p2,
                                   const Vector* p_a0 = nullptr) {
    const double tol = 1e-12 * std::max(1.0, p1.cwiseAbs().maxCoeff());
    if (((p2 - p1).array() > tol).any()) throw invalid_input("thm4_compare needs p2 <= p1 entrywise");
    if (p_a0 && ((*p_a0 - p2).array() > tol).any()) throw invalid_input("thm4_compare needs p_a0 <= p2 entrywise");
    const bool below_limit = ((p1 - bundle.p_lim).array() <= tol).all();
    const bool above_b = ((bundle.p_b0 - p2).array() <= tol).all();
    if (!below_limit && !above_b)
        throw invalid_input("thm4_compare needs p1 <= p_lim or p2 >= p_b0 entrywise");
    Thm4Comparison out;
    const Vector c = bundle.q_mat * (p1 + p2) - bundle.v_vec;
    if ((c.array() >= 0.0).all())
        out.ordering = Ordering::GE;
    else if ((c.array() < 0.0).all())
        out.ordering = Ordering::LT;
    out.psi1 = welfare_psi(bundle, p1);
    out.psi2 = welfare_psi(bundle, p2);
    return out;
}

namespace detail {

// +1 when p_max beats every policy between p and p_max, -1 when p beats
// them all, 0 otherwise.
inline int dominance(const LeontiefBundle& bundle, const Vector& p, const Vector& p_max) {
    const Vector c = bundle.q_mat * (p + p_max) - bundle.v_vec;
    if ((c.array() >= 0.0).all()) return 1;
    if ((c.array() < 0.0).all()) return -1;
    return 0;
}

struct PrunedCandidates {
    std::vector<Vector> points;
    bool complete = false;
};

// Drops extreme points with p_i = p_max_i for every index i whose reference
// policy is dominated by (or dominates) the segment up to p_max, then lists
// the remaining extreme points.
inline PrunedCandidates pruned_candidates(const LeontiefBundle& bundle, const ProblemP& problem, double k0,
                                          double feas_tol, int free_limit) {
    const int n = bundle.size();
    const Vector& w = bundle.b_delta;
    const Vector& lo = problem.p_a0;
    const Vector& hi = problem.p_max;
    PrunedCandidates out;
    out.points.push_back(hi);
    std::vector<char> pruned(n, 0);
    auto consider = [&](int i, const Vector& p) {
        const int d = dominance(bundle, p, hi);
        if (d == 0) return false;
        pruned[i] = 1;
        if (d < 0) out.points.push_back(p);
        return true;
    };

    // Reference policies with the tolerance face and all other lower bounds active.
    const double base = w.dot(lo);
    for (int i = 0; i < n; ++i) {
        if (w(i) <= 0.0) continue;
        const double pi = (k0 - (base - w(i) * lo(i))) / w(i);
        const double margin = 1e-12 * std::max(1.0, std::abs(hi(i)));
        if (pi < lo(i) - margin || pi > hi(i) + margin) continue;
        Vector p = lo;
        p(i) = std::clamp(pi, lo(i), hi(i));
        consider(i, p);
    }
    // Then single-coordinate raises to the ceiling, repeated until nothing new is pruned.
    for (bool changed = true; changed;) {
        changed = false;
        for (int i = 0; i < n; ++i) {
            if (pruned[i]) continue;
            Vector p = lo;
            p(i) = hi(i);
            if (w.dot(p) < k0 - feas_tol) continue;
            changed = consider(i, p) || changed;
        }
    }

    std::vector<int> free_idx;
    for (int i = 0; i < n; ++i)
        if (!pruned[i] && hi(i) > lo(i)) free_idx.push_back(i);
    if (static_cast<int>(free_idx.size()) > free_limit) return out;
    const std::size_t masks = std::size_t{1} << free_idx.size();
    for (std::size_t mask = 0; mask < masks; ++mask) {
        Vector v = lo;
        for (std::size_t b = 0; b < free_idx.size(); ++b)
            if ((mask >> b) & 1U) v(free_idx[b]) = hi(free_idx[b]);
        const double lhs = w.dot(v);
        if (lhs >= k0 - feas_tol) out.points.push_back(v);
        for (int k = 0; k < n; ++k) {
            if (v(k) != lo(k) || w(k) <= 0.0 || hi(k) <= lo(k)) continue;
            const double pk = (k0 - (lhs - w(k) * v(k))) / w(k);
            const double margin = 1e-12 * std::max(1.0, std::abs(hi(k)));
            if (pk > lo(k) + margin && pk < hi(k) - margin) {
                Vector face = v;
                face(k) = pk;
                out.points.push_back(std::move(face));
            }
        }
    }
    out.complete = true;
    return out;
}

// The tolerance constraint of the problem is the linear one in centrality,
// exact while every agent stays below its limit price.
inline void verify_policy(PolicyResult& r, const LeontiefBundle& bundle, const Vector& lo, const Vector& hi,
                          double k0, double tau_b) {
    const double tol = 1e-8;
    const double scale = std::max(1.0, hi.cwiseAbs().maxCoeff());
    if (((lo - r.policy_a).array() > tol * scale).any() || ((r.policy_a - hi).array() > tol * scale).any())
        throw numerical_failure("returned policy violates its price bounds");
    if (bundle.b_delta.dot(r.policy_a) < k0 - tol * std::max(1.0, std::abs(k0)))
        throw numerical_failure("returned policy violates the tolerance constraint");
    if (r.agg_unsustainable > tau_b + tol * std::max(1.0, tau_b))
        r.notes.push_back("above the limit price the equilibrium aggregate " + std::to_string(r.agg_unsustainable) +
                          " exceeds tau_b; the linear tolerance constraint is only a relaxation there");
}

}  // namespace detail

inline PolicyResult solve_p(const LeontiefBundle& bundle, const ProblemP& problem, const SolverPOptions& opts = {}) {
    const int n = bundle.size();
    problem.validate(n);
    if (bundle.p_b0 != problem.p_b0) throw invalid_input("bundle was built for a different p_b0");
    if (!check_assumption2(bundle.params)) throw assumption_violation("cross-activity effect mu must be below delta");
    if (bundle.b_delta.minCoeff() <= 0.0)
        throw assumption_violation(
            "raising sustainable prices does not lower unsustainable effort for every agent; "
            "use penalties (problem pr) instead");
    const double k0 = k_zero(bundle, problem.p_b0, problem.tau_b);
    const double feas_tol = feasibility_tolerance(k0);
    const Vector& pa0 = problem.p_a0;
    const Vector& pmax = problem.p_max;
    const Vector& pb0 = problem.p_b0;
    if (bundle.b_delta.dot(pmax) < k0 - feas_tol)
        throw infeasible("tolerance unattainable even at p_max");
    const bool pa0_feasible = bundle.b_delta.dot(pa0) >= k0 - feas_tol;

    auto done = [&](const Vector& p, Certificate cert, bool exact, std::vector<std::string> notes = {}) {
        auto r = evaluate_policy(bundle, p, pb0, cert, exact, opts.equilibrium);
        r.notes = std::move(notes);
        detail::verify_policy(r, bundle, pa0, pmax, k0, problem.tau_b);
        return r;
    };

    const double scale = std::max(1.0, pmax.cwiseAbs().maxCoeff());
    const bool below_limit = ((pmax - bundle.p_lim).array() <= 1e-12 * scale).all();
    const bool above_b = ((pa0 - pb0).array() >= 0.0).all();
    if (below_limit || above_b) {
        if (above_b) return done(pmax, Certificate::Cor1Ia, true);
        const Vector q_pa0 = bundle.q_mat * pa0;
        const Vector r_pb0 = bundle.r_mat * pb0;
        if ((q_pa0.array() > r_pb0.array()).all()) return done(pmax, Certificate::Cor1Ib, true);
        if (((pmax - pb0).array() >= (pb0 - pa0).array()).all()) return done(pmax, Certificate::Cor1Ic, true);
        if (pa0_feasible) {
            const Vector q1 = bundle.q_mat.rowwise().sum();
            const double ratio = (r_pb0.array() / q1.array()).minCoeff();
            if (pmax.maxCoeff() < ratio) return done(pa0, Certificate::Cor1II, true);
        }
        const Vector c = bundle.q_mat * (pmax + pa0) - bundle.v_vec;
        if ((c.array() >= 0.0).all()) return done(pmax, Certificate::Thm4Pmax, true);
        if ((c.array() < 0.0).all() && pa0_feasible) return done(pa0, Certificate::Thm4Pa0, true);

        const auto cand = detail::pruned_candidates(bundle, problem, k0, feas_tol, opts.pruned_free_limit);
        if (cand.complete) {
            const Vector* best = nullptr;
            double best_w = 0.0;
            for (const auto& p : cand.points) {
                const double w = equilibrium_welfare(bundle, {p, pb0}, opts.equilibrium);
                if (!best || better_policy(w, p, best_w, *best)) {
                    best = &p;
                    best_w = w;
                }
            }
            return done(*best, Certificate::PrunedSearch, true);
        }
    }

    std::vector<std::string> notes;
    if (!below_limit && !above_b)
        notes.push_back("p_max exceeds the limit price; searched with constrained-equilibrium welfare");
    if (n <= opts.bruteforce_limit) {
        const auto r = vertex_enumeration_p(bundle, problem, opts.bruteforce_limit);
        return done(r.policy_a, Certificate::BruteForce, true, notes);
    }
    // Too large to enumerate: best of the two natural candidates.
    Vector best = pmax;
    double best_w = equilibrium_welfare(bundle, {pmax, pb0}, opts.equilibrium);
    if (pa0_feasible) {
        const double w = equilibrium_welfare(bundle, {pa0, pb0}, opts.equilibrium);
        if (better_policy(w, pa0, best_w, best)) best = pa0;
    }
    notes.push_back("search space too large; optimality not certified");
    return done(best, Certificate::BestFound, false, notes);
}

inline PolicyResult solve_p(const Network& g, const GameParams& params, const ProblemP& problem,
                            const SolverPOptions& opts = {}) {
    return solve_p(leontief_bundle(g, params, problem.p_b0), problem, opts);
}

}  // namespace netprice
