#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "error.hpp"
#include "game.hpp"
#include "network.hpp"
#include "oracle.hpp"
#include "policy.hpp"

namespace netprice {

// Welfare with one price per connected component separates into
// sum_l (q_l p_l^2 - v_l p_l + const_l) / 4.
struct ComponentAggregates {
    std::vector<std::vector<int>> components;
    std::vector<int> label;
    Vector q;
    Vector v;
    Vector b_delta;
    Vector constant;
    Vector s;  // 1'(M+ + M-) p_b0 per component
    std::vector<std::string> warnings;

    int count() const { return static_cast<int>(components.size()); }

    Vector expand(const Vector& per_component) const {
        Vector out(static_cast<Eigen::Index>(label.size()));
        for (std::size_t i = 0; i < label.size(); ++i) out(static_cast<Eigen::Index>(i)) = per_component(label[i]);
        return out;
    }

    double welfare(const Vector& p) const {
        return 0.25 * ((q.array() * p.array().square() - v.array() * p.array()).sum() + constant.sum());
    }
};

inline ComponentAggregates component_aggregates(const Network& g, const GameParams& params, const Vector& p_b0) {
    if (p_b0.size() != g.size()) throw invalid_input("p_b0 length does not match the network size");
    auto decomposition = connected_components(g);
    ComponentAggregates agg;
    const int c = decomposition.count();
    agg.q.resize(c);
    agg.v.resize(c);
    agg.b_delta.resize(c);
    agg.constant.resize(c);
    agg.s.resize(c);
    for (int l = 0; l < c; ++l) {
        const auto& comp = decomposition.components[l];
        Vector pb(static_cast<Eigen::Index>(comp.size()));
        for (std::size_t k = 0; k < comp.size(); ++k) pb(static_cast<Eigen::Index>(k)) = p_b0(comp[k]);
        if (pb.maxCoeff() != pb.minCoeff())
            agg.warnings.push_back("p_b0 is not uniform in component " + std::to_string(l) +
                                   "; using the exact quadratic form");
        const auto local = leontief_bundle(g.induced(comp), params, pb);
        agg.q(l) = local.q_mat.sum();
        agg.v(l) = local.v_vec.sum();
        agg.b_delta(l) = local.b_delta.sum();
        agg.constant(l) = pb.dot(local.q_mat * pb);
        agg.s(l) = ((local.m_plus + local.m_minus) * pb).sum();
    }
    agg.components = std::move(decomposition.components);
    agg.label = std::move(decomposition.label);
    return agg;
}

// Per component: raise to the ceiling when that beats staying at the floor.
inline Vector p0_star(const ComponentAggregates& agg, const Vector& p_a0, const Vector& p_max) {
    Vector p(agg.count());
    for (int l = 0; l < agg.count(); ++l)
        p(l) = p_max(l) >= agg.v(l) / agg.q(l) - p_a0(l) ? p_max(l) : p_a0(l);
    return p;
}

// Prices are per component, in the order of connected_components.
struct ProblemPTilde {
    Vector p_a0;
    Vector p_max;
    Vector p_b0;  // per agent
    double tau_b = 0.0;
};

// Builds a component-wise problem from per-agent bounds that are uniform on each component.
inline ProblemPTilde make_problem_ptilde(const Network& g, const Vector& p_a0, const Vector& p_max,
                                         const Vector& p_b0, double tau_b) {
    const auto dec = connected_components(g);
    if (p_a0.size() != g.size() || p_max.size() != g.size())
        throw invalid_input("price bounds must have one entry per agent");
    ProblemPTilde p;
    p.p_a0.resize(dec.count());
    p.p_max.resize(dec.count());
    for (int l = 0; l < dec.count(); ++l) {
        const int first = dec.components[l].front();
        for (int i : dec.components[l])
            if (p_a0(i) != p_a0(first) || p_max(i) != p_max(first))
                throw invalid_input("p_a0 and p_max must be uniform within each component (component " +
                                    std::to_string(l) + ")");
        p.p_a0(l) = p_a0(first);
        p.p_max(l) = p_max(first);
    }
    p.p_b0 = p_b0;
    p.tau_b = tau_b;
    return p;
}

struct RelaxationResult {
    std::vector<int> order;  // components by descending gamma, ties by index
    int ell_prime = -1;      // first position in `order` with gamma <= 0; -1 when none
    int ell_star = -1;       // first position from ell_prime whose sweep policy is feasible; -1 when not needed
    Vector gamma;
    Vector bar_p;
    Vector p_ell_star;  // sweep policy at ell_star (equals bar_p when exact)
    bool exact = true;
    double upper_bound = 0.0;
    double suggested_tau_b = 0.0;
    // Dual certificate of the relaxation.
    Vector kappa;              // -gamma
    double lambda_star = 0.0;  // kappa at ell_star
    double dual_value = 0.0;
    Vector reduced_slopes;     // b_delta_l (gamma_l - gamma_ell_star) / 4
};

struct PTildeResult {
    PolicyResult policy;
    RelaxationResult relaxation;
    ComponentAggregates aggregates;
    Vector policy_components;
};

namespace detail {

inline double chord(double q, double v, double a, double b, double p) {
    auto f = [&](double x) { return q * x * x - v * x; };
    if (b <= a) return f(a);
    return f(a) + (f(b) - f(a)) / (b - a) * (p - a);
}

inline bool at_endpoint(double x, double end) { return std::abs(x - end) <= 1e-9 * std::max(1.0, std::abs(end)); }

}  // namespace detail

inline PTildeResult solve_ptilde(const Network& g, const GameParams& params, const ProblemPTilde& problem) {
    PTildeResult out;
    out.aggregates = component_aggregates(g, params, problem.p_b0);
    const auto& agg = out.aggregates;
    const int c = agg.count();
    if (problem.p_a0.size() != c || problem.p_max.size() != c)
        throw invalid_input("component bounds must have one entry per component (" + std::to_string(c) + ")");
    if (((problem.p_max - problem.p_a0).array() < 0.0).any()) throw invalid_input("p_max must be at least p_a0");
    if (!(problem.tau_b >= 0.0)) throw invalid_input("tau_b must be non-negative");
    if (agg.b_delta.minCoeff() <= 0.0)
        throw assumption_violation("a component's centrality sum is not positive; use penalties (problem pr) instead");
    const auto bundle = leontief_bundle(g, params, problem.p_b0);
    const Vector& lo = problem.p_a0;
    const Vector& hi = problem.p_max;
    const double s_total = agg.s.sum();
    const double k0 = s_total - 2.0 * problem.tau_b;
    const double ftol = feasibility_tolerance(k0);
    auto feasible = [&](const Vector& p) { return agg.b_delta.dot(p) >= k0 - ftol; };
    if (!feasible(hi)) throw infeasible("tolerance unattainable even at p_max");

    auto& rel = out.relaxation;
    rel.gamma.resize(c);
    for (int l = 0; l < c; ++l) {
        const double gap = lo(l) + hi(l) - agg.v(l) / agg.q(l);
        if (std::abs(gap) <= 1e-12 * std::max(1.0, std::abs(agg.v(l) / agg.q(l))))
            throw invalid_input("degenerate component " + std::to_string(l) +
                                ": p_a0 + p_max equals v/q; perturb p_max by 1e-9");
        rel.gamma(l) = agg.q(l) / agg.b_delta(l) * gap;
    }
    rel.kappa = -rel.gamma;
    rel.order.resize(c);
    std::iota(rel.order.begin(), rel.order.end(), 0);
    std::stable_sort(rel.order.begin(), rel.order.end(), [&](int a, int b) { return rel.gamma(a) > rel.gamma(b); });

    const Vector start = p0_star(agg, lo, hi);
    auto relaxed_value = [&](const Vector& p) {
        double sum = 0.0;
        for (int l = 0; l < c; ++l) sum += detail::chord(agg.q(l), agg.v(l), lo(l), hi(l), p(l)) + agg.constant(l);
        return 0.25 * sum;
    };

    Certificate cert = Certificate::Cor2P0Star;
    Vector policy;
    if (feasible(start)) {
        rel.bar_p = start;
        rel.p_ell_star = start;
        rel.exact = true;
        rel.suggested_tau_b = problem.tau_b;
        for (int pos = 0; pos < c; ++pos)
            if (rel.gamma(rel.order[pos]) <= 0.0) {
                rel.ell_prime = pos;
                break;
            }
        policy = start;
    } else {
        for (int pos = 0; pos < c && rel.ell_prime < 0; ++pos)
            if (rel.gamma(rel.order[pos]) <= 0.0) rel.ell_prime = pos;
        Vector sweep = start;
        for (int pos = rel.ell_prime; pos >= 0 && pos < c; ++pos) {
            sweep(rel.order[pos]) = hi(rel.order[pos]);
            if (feasible(sweep)) {
                rel.ell_star = pos;
                break;
            }
        }
        if (rel.ell_star < 0) throw numerical_failure("component sweep found no feasible policy");
        const int star = rel.order[rel.ell_star];
        rel.p_ell_star = sweep;
        rel.bar_p = sweep;
        const double others = agg.b_delta.dot(sweep) - agg.b_delta(star) * sweep(star);
        rel.bar_p(star) = std::clamp((k0 - others) / agg.b_delta(star), lo(star), hi(star));
        rel.exact = detail::at_endpoint(rel.bar_p(star), hi(star)) || detail::at_endpoint(rel.bar_p(star), lo(star));
        rel.suggested_tau_b = 0.5 * (s_total - agg.b_delta.dot(sweep));
        rel.lambda_star = rel.kappa(star);
        if (rel.exact) {
            rel.bar_p(star) = detail::at_endpoint(rel.bar_p(star), hi(star)) ? hi(star) : lo(star);
            policy = rel.bar_p;
            cert = Certificate::Thm6Exact;
        } else {
            policy = rel.bar_p;
            cert = Certificate::Thm6Relaxed;
        }
    }
    rel.upper_bound = relaxed_value(rel.bar_p);
    rel.reduced_slopes.resize(c);
    const double gamma_star = rel.ell_star >= 0 ? rel.gamma(rel.order[rel.ell_star]) : 0.0;
    for (int l = 0; l < c; ++l) rel.reduced_slopes(l) = 0.25 * agg.b_delta(l) * (rel.gamma(l) - gamma_star);
    // Lagrangian relaxation of the tolerance face, maximized over the box.
    Vector p_dual(c);
    for (int l = 0; l < c; ++l) {
        const double slope = rel.reduced_slopes(l);
        p_dual(l) = slope > 0.0 ? hi(l) : (slope < 0.0 ? lo(l) : rel.bar_p(l));
    }
    rel.dual_value = relaxed_value(p_dual) + 0.25 * rel.lambda_star * (agg.b_delta.dot(p_dual) - k0);

    out.policy_components = policy;
    out.policy = evaluate_policy(bundle, agg.expand(policy), problem.p_b0, cert, rel.exact);
    out.policy.notes = agg.warnings;
    if (((agg.expand(hi) - bundle.p_lim).array() > 1e-12 * std::max(1.0, hi.maxCoeff())).any())
        out.policy.notes.push_back("p_max exceeds the limit price; separable welfare is only an approximation");
    return out;
}

// Exhaustive optimum of the component-wise problem over its polytope's vertices.
inline PolicyResult vertex_enumeration_ptilde(const Network& g, const GameParams& params,
                                              const ProblemPTilde& problem, Vector* components_out = nullptr) {
    const auto agg = component_aggregates(g, params, problem.p_b0);
    const auto bundle = leontief_bundle(g, params, problem.p_b0);
    const double k0 = agg.s.sum() - 2.0 * problem.tau_b;
    const auto vertices = polytope_vertices(problem.p_a0, problem.p_max, agg.b_delta, k0, feasibility_tolerance(k0));
    if (vertices.empty()) throw infeasible("tolerance unattainable within the price bounds");
    const Vector* best = nullptr;
    double best_w = 0.0;
    for (const auto& v : vertices) {
        const double w = equilibrium_welfare(bundle, {agg.expand(v), problem.p_b0});
        if (!best || better_policy(w, v, best_w, *best)) {
            best = &v;
            best_w = w;
        }
    }
    if (components_out) *components_out = *best;
    return evaluate_policy(bundle, agg.expand(*best), problem.p_b0, Certificate::VertexEnumeration, true);
}

}  // namespace netprice
