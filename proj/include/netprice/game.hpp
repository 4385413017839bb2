#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "network.hpp"

namespace netprice {

struct GameParams {
    double beta = 0.0;   // substitutability between an agent's two activities, in (0,1)
    double delta = 0.0;  // same-activity network effect
    double mu = 0.0;     // cross-activity network effect

    void validate() const {
        if (!(beta > 0.0 && beta < 1.0)) throw invalid_input("beta must lie in (0,1)");
        if (!(delta > 0.0)) throw invalid_input("delta must be positive");
        if (!(mu > 0.0)) throw invalid_input("mu must be positive");
    }
};

struct PriceProfile {
    Vector p_a;
    Vector p_b;
};

struct EffortProfile {
    Vector x_a;
    Vector x_b;
};

struct AssumptionCheck {
    bool holds = false;
    double value = 0.0;
};

inline AssumptionCheck assumption1_for_radius(double rho, const GameParams& params) {
    const double c = std::max((params.delta + params.mu) / (1.0 + params.beta),
                              std::abs(params.delta - params.mu) / (1.0 - params.beta));
    const double value = c * rho;
    return {value < 1.0, value};
}

// Well-posedness: both Leontief inverses exist and are non-negative.
inline AssumptionCheck check_assumption1(const Network& g, const GameParams& params) {
    return assumption1_for_radius(spectral_radius(g), params);
}

inline bool check_assumption2(const GameParams& params) { return params.mu < params.delta; }

// A mu within rounding of beta*delta counts as the excluded boundary.
inline bool check_assumption2prime(const GameParams& params) {
    const double bd = params.beta * params.delta;
    return params.mu < bd - 4.0 * std::numeric_limits<double>::epsilon() * bd;
}

struct LeontiefBundle {
    GameParams params;
    Matrix adjacency;
    Matrix m_plus;   // ((1+beta)I - (delta+mu)G)^-1
    Matrix m_minus;  // ((1-beta)I - (delta-mu)G)^-1
    Matrix m_delta;  // m_minus - m_plus
    Matrix q_mat;    // (1+beta)M+^2 + (1-beta)M-^2
    Matrix r_mat;    // (1-beta)M-^2 - (1+beta)M+^2
    Vector p_b0;
    Vector v_vec;    // 2 R p_b0
    Vector b_delta;  // M_delta 1
    Vector p_lim;    // M_delta^-1 (M+ + M-) p_b0
    Eigen::PartialPivLU<Matrix> m_delta_lu;

    int size() const { return static_cast<int>(m_plus.rows()); }

    // Sustainable price at which interior unsustainable effort vanishes, for any p_b.
    Vector limit_price(const Vector& p_b) const { return m_delta_lu.solve((m_plus + m_minus) * p_b); }
};

inline LeontiefBundle leontief_bundle(const Network& g, const GameParams& params, const Vector& p_b0) {
    params.validate();
    const int n = g.size();
    if (p_b0.size() != n) throw invalid_input("p_b0 length does not match the network size");
    const auto a1 = check_assumption1(g, params);
    if (!a1.holds)
        throw assumption_violation("network effects too strong for a unique equilibrium (margin " +
                                   std::to_string(a1.value) + " >= 1)");
    LeontiefBundle b;
    b.params = params;
    b.adjacency = g.adjacency();
    const Matrix id = Matrix::Identity(n, n);
    const double beta = params.beta;
    b.m_plus = ((1.0 + beta) * id - (params.delta + params.mu) * b.adjacency).partialPivLu().inverse();
    b.m_minus = ((1.0 - beta) * id - (params.delta - params.mu) * b.adjacency).partialPivLu().inverse();
    b.m_delta = b.m_minus - b.m_plus;
    const Matrix mp2 = b.m_plus * b.m_plus;
    const Matrix mm2 = b.m_minus * b.m_minus;
    b.q_mat = (1.0 + beta) * mp2 + (1.0 - beta) * mm2;
    b.r_mat = (1.0 - beta) * mm2 - (1.0 + beta) * mp2;
    b.p_b0 = p_b0;
    b.v_vec = 2.0 * b.r_mat * p_b0;
    b.b_delta = b.m_delta.rowwise().sum();
    b.m_delta_lu = b.m_delta.partialPivLu();
    if (!(b.m_delta_lu.rcond() > 1e-13)) throw numerical_failure("M_delta is singular to working precision");
    b.p_lim = b.limit_price(p_b0);
    return b;
}

inline Vector centrality(const LeontiefBundle& bundle) { return bundle.b_delta; }

struct InteriorEquilibrium {
    EffortProfile efforts;
    bool nonnegative = false;
};

inline InteriorEquilibrium interior_equilibrium(const LeontiefBundle& bundle, const PriceProfile& prices,
                                                double tol = 1e-9) {
    const Matrix sum = bundle.m_plus + bundle.m_minus;
    const Matrix diff = bundle.m_plus - bundle.m_minus;
    InteriorEquilibrium out;
    out.efforts.x_a = 0.5 * (sum * prices.p_a + diff * prices.p_b);
    out.efforts.x_b = 0.5 * (diff * prices.p_a + sum * prices.p_b);
    out.nonnegative = out.efforts.x_a.minCoeff() >= -tol && out.efforts.x_b.minCoeff() >= -tol;
    return out;
}

// Marginal utilities of each agent's own efforts.
struct Marginals {
    Vector d_a;
    Vector d_b;
};

inline Marginals marginal_utilities(const Matrix& adjacency, const GameParams& params, const PriceProfile& prices,
                                    const EffortProfile& x) {
    const Vector gxa = adjacency * x.x_a;
    const Vector gxb = adjacency * x.x_b;
    Marginals m;
    m.d_a = prices.p_a - x.x_a - params.beta * x.x_b + params.delta * gxa + params.mu * gxb;
    m.d_b = prices.p_b - x.x_b - params.beta * x.x_a + params.delta * gxb + params.mu * gxa;
    return m;
}

// Largest violation of the agents' first-order conditions with x >= 0,
// divided by max(1, largest price) so it is comparable across price scales.
inline double kkt_residual(const Matrix& adjacency, const GameParams& params, const PriceProfile& prices,
                           const EffortProfile& x, double active_tol = 1e-9) {
    const Marginals m = marginal_utilities(adjacency, params, prices, x);
    double r = 0.0;
    auto check = [&](double xi, double di) {
        r = std::max(r, std::max(0.0, -xi));
        r = std::max(r, xi > active_tol ? std::abs(di) : std::max(0.0, di));
    };
    for (Eigen::Index i = 0; i < x.x_a.size(); ++i) {
        check(x.x_a(i), m.d_a(i));
        check(x.x_b(i), m.d_b(i));
    }
    const double scale = std::max({1.0, prices.p_a.cwiseAbs().maxCoeff(), prices.p_b.cwiseAbs().maxCoeff()});
    return r / scale;
}

// The first three follow the closed-form characterization, which assumes positive
// sustainable effort. GeneralComplementarity covers the rest of the price space.
enum class EquilibriumBranch { Interior, AllBZero, MixedMinimalSet, GeneralComplementarity };

inline std::string to_string(EquilibriumBranch b) {
    switch (b) {
    case EquilibriumBranch::Interior: return "INTERIOR";
    case EquilibriumBranch::AllBZero: return "ALL_B_ZERO";
    case EquilibriumBranch::MixedMinimalSet: return "MIXED_MINIMAL_SET";
    case EquilibriumBranch::GeneralComplementarity: return "GENERAL_LCP";
    }
    return "?";
}

struct EquilibriumCertificate {
    EquilibriumBranch branch = EquilibriumBranch::Interior;
    std::vector<int> active_set;  // agents with zero unsustainable effort forced by the price floor
    std::vector<int> active_set_a;  // agents with zero sustainable effort (GENERAL_LCP only)
    double kkt_residual = 0.0;
    bool assumption3_warning = false;  // reference profile not strictly positive
    int pivot_steps = 0;               // complementary pivots needed after the greedy growth
};

struct EquilibriumResult {
    EffortProfile efforts;
    EquilibriumCertificate certificate;
};

struct EquilibriumOptions {
    double nonneg_tol = 1e-9;
    double kkt_tol = 1e-8;
    int max_pivots = 100000;
};

namespace detail {

// Efforts when the agents in S are pinned to x^B = 0 and everyone else is
// interior. Returns the virtual price slack p_hat^B - p^B on S in `slack`.
inline EffortProfile pinned_efforts(const LeontiefBundle& bundle, const PriceProfile& prices,
                                    const std::vector<int>& s, Vector& slack) {
    const int n = bundle.size();
    Vector p_hat = prices.p_b;
    slack = Vector::Zero(n);
    if (!s.empty()) {
        std::vector<char> in_s(n, 0);
        for (int i : s) in_s[i] = 1;
        std::vector<int> t;
        for (int i = 0; i < n; ++i)
            if (!in_s[i]) t.push_back(i);
        const Matrix sum = bundle.m_plus + bundle.m_minus;
        const Vector md_pa = bundle.m_delta * prices.p_a;
        const int k = static_cast<int>(s.size());
        Matrix a(k, k);
        Vector rhs(k);
        for (int r = 0; r < k; ++r) {
            rhs(r) = md_pa(s[r]);
            for (int c = 0; c < k; ++c) a(r, c) = sum(s[r], s[c]);
            for (int j : t) rhs(r) -= sum(s[r], j) * prices.p_b(j);
        }
        const Vector sol = a.partialPivLu().solve(rhs);
        for (int r = 0; r < k; ++r) {
            p_hat(s[r]) = sol(r);
            slack(s[r]) = sol(r) - prices.p_b(s[r]);
        }
    }
    EffortProfile x = interior_equilibrium(bundle, {prices.p_a, p_hat}).efforts;
    for (int i : s) x.x_b(i) = 0.0;
    return x;
}

// Least-index principal pivoting on the full game: variables 0..n-1 are x^A,
// n..2n-1 are x^B, and zero[k] marks variables held at zero. The system matrix
// is the negative Hessian of the potential, positive definite under the
// well-posedness condition, so the pivoting terminates.
inline EffortProfile complementary_pivot(const LeontiefBundle& bundle, const PriceProfile& prices,
                                         std::vector<char>& zero, double tol, int max_pivots, int& pivots) {
    const int n = bundle.size();
    const auto& p = bundle.params;
    const Matrix id = Matrix::Identity(n, n);
    Matrix h(2 * n, 2 * n);
    h << id - p.delta * bundle.adjacency, p.beta * id - p.mu * bundle.adjacency,
        p.beta * id - p.mu * bundle.adjacency, id - p.delta * bundle.adjacency;
    Vector q(2 * n);
    q << prices.p_a, prices.p_b;
    const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
    Vector z = Vector::Zero(2 * n);
    for (;;) {
        std::vector<int> free_idx;
        for (int k = 0; k < 2 * n; ++k)
            if (!zero[k]) free_idx.push_back(k);
        const int f = static_cast<int>(free_idx.size());
        z.setZero();
        if (f > 0) {
            Matrix hf(f, f);
            Vector qf(f);
            for (int r = 0; r < f; ++r) {
                qf(r) = q(free_idx[r]);
                for (int c = 0; c < f; ++c) hf(r, c) = h(free_idx[r], free_idx[c]);
            }
            const Vector zf = hf.llt().solve(qf);
            for (int r = 0; r < f; ++r) z(free_idx[r]) = zf(r);
        }
        const Vector w = h * z - q;
        int flip = -1;
        for (int k = 0; k < 2 * n && flip < 0; ++k)
            if (zero[k] ? w(k) < -tol * scale : z(k) < -tol) flip = k;
        if (flip < 0) break;
        if (++pivots > max_pivots) throw numerical_failure("complementary pivoting did not terminate");
        zero[flip] = !zero[flip];
    }
    return {z.head(n), z.tail(n)};
}

inline void clamp_small_negatives(EffortProfile& x, double tol) {
    for (Eigen::Index i = 0; i < x.x_a.size(); ++i) {
        if (x.x_a(i) < 0.0 && x.x_a(i) >= -tol) x.x_a(i) = 0.0;
        if (x.x_b(i) < 0.0 && x.x_b(i) >= -tol) x.x_b(i) = 0.0;
    }
}

inline std::string describe(const std::vector<int>& s) {
    std::ostringstream os;
    os << '{';
    for (std::size_t k = 0; k < s.size(); ++k) os << (k ? "," : "") << s[k];
    os << '}';
    return os.str();
}

}  // namespace detail

inline EquilibriumResult nonneg_equilibrium(const LeontiefBundle& bundle, const PriceProfile& prices,
                                            const EffortProfile* x_ref = nullptr, const EquilibriumOptions& opts = {}) {
    const int n = bundle.size();
    if (prices.p_a.size() != n || prices.p_b.size() != n) throw invalid_input("price vectors must have length n");
    const double tol = opts.nonneg_tol;
    EquilibriumResult out;
    if (x_ref) out.certificate.assumption3_warning = x_ref->x_a.minCoeff() <= 0.0 || x_ref->x_b.minCoeff() <= 0.0;

    auto finish = [&](EffortProfile x, EquilibriumBranch branch, std::vector<int> s) {
        detail::clamp_small_negatives(x, tol);
        out.certificate.branch = branch;
        std::sort(s.begin(), s.end());
        out.certificate.active_set = std::move(s);
        out.certificate.kkt_residual = kkt_residual(bundle.adjacency, bundle.params, prices, x, tol);
        out.efforts = std::move(x);
        return out.certificate.kkt_residual <= opts.kkt_tol && out.efforts.x_a.minCoeff() >= 0.0 &&
               out.efforts.x_b.minCoeff() >= 0.0;
    };

    const InteriorEquilibrium interior = interior_equilibrium(bundle, prices, tol);
    if (interior.nonnegative) {
        if (finish(interior.efforts, EquilibriumBranch::Interior, {})) return out;
    }

    const Vector p_lim = bundle.limit_price(prices.p_b);
    if (((prices.p_a - p_lim).array() >= -tol * std::max(1.0, p_lim.cwiseAbs().maxCoeff())).all()) {
        const Matrix id = Matrix::Identity(n, n);
        EffortProfile x{(id - bundle.params.delta * bundle.adjacency).partialPivLu().solve(prices.p_a),
                        Vector::Zero(n)};
        std::vector<int> all(n);
        for (int i = 0; i < n; ++i) all[i] = i;
        if (finish(std::move(x), EquilibriumBranch::AllBZero, all)) return out;
    }

    // Greedy growth of the pinned set, preferring agents whose interior x^B is negative.
    std::vector<char> candidate(n, 0);
    for (int i = 0; i < n; ++i) candidate[i] = interior.efforts.x_b(i) < -tol;
    std::vector<char> in_s(n, 0);
    std::vector<int> s;
    Vector slack;
    EffortProfile x = detail::pinned_efforts(bundle, prices, s, slack);
    for (int step = 0; step < n; ++step) {
        int best = -1, best_cand = -1;
        for (int i = 0; i < n; ++i) {
            if (in_s[i] || x.x_b(i) >= -tol) continue;
            if (best < 0 || x.x_b(i) < x.x_b(best)) best = i;
            if (candidate[i] && (best_cand < 0 || x.x_b(i) < x.x_b(best_cand))) best_cand = i;
        }
        if (best < 0) break;
        const int pick = best_cand >= 0 ? best_cand : best;
        in_s[pick] = 1;
        s.push_back(pick);
        x = detail::pinned_efforts(bundle, prices, s, slack);
    }

    // Least-index complementary pivoting from the greedy set if any pinned
    // agent would still gain from positive x^B. Finite since the reduced
    // problem in x^B has a positive definite matrix.
    auto slack_tol = tol * std::max(1.0, prices.p_b.cwiseAbs().maxCoeff());
    for (;;) {
        int flip = -1;
        for (int i = 0; i < n && flip < 0; ++i) {
            if (in_s[i] ? slack(i) < -slack_tol : x.x_b(i) < -tol) flip = i;
        }
        if (flip < 0) break;
        if (++out.certificate.pivot_steps > opts.max_pivots)
            throw numerical_failure("complementary pivoting did not terminate; last pinned set " + detail::describe(s));
        in_s[flip] = !in_s[flip];
        s.clear();
        for (int i = 0; i < n; ++i)
            if (in_s[i]) s.push_back(i);
        x = detail::pinned_efforts(bundle, prices, s, slack);
    }

    if (x.x_a.minCoeff() >= -tol) {
        if (!finish(std::move(x), EquilibriumBranch::MixedMinimalSet, s))
            throw numerical_failure("no valid pinned set found: KKT residual " +
                                    std::to_string(out.certificate.kkt_residual) + " with pinned set " +
                                    detail::describe(out.certificate.active_set));
        return out;
    }

    // Sustainable effort would go negative too: pivot on both activities,
    // starting from the pinned set found above.
    std::vector<char> zero(2 * n, 0);
    for (int i : s) zero[n + i] = 1;
    x = detail::complementary_pivot(bundle, prices, zero, tol, opts.max_pivots, out.certificate.pivot_steps);
    std::vector<int> pinned_a;
    s.clear();
    for (int i = 0; i < n; ++i) {
        if (zero[i]) pinned_a.push_back(i);
        if (zero[n + i]) s.push_back(i);
    }
    out.certificate.active_set_a = pinned_a;
    if (!finish(std::move(x), EquilibriumBranch::GeneralComplementarity, s))
        throw numerical_failure("complementary pivoting ended with KKT residual " +
                                std::to_string(out.certificate.kkt_residual));
    return out;
}

inline EquilibriumResult nonneg_equilibrium(const Network& g, const GameParams& params, const PriceProfile& prices,
                                            const EffortProfile* x_ref = nullptr, const EquilibriumOptions& opts = {}) {
    return nonneg_equilibrium(leontief_bundle(g, params, prices.p_b), prices, x_ref, opts);
}

inline Vector utilities(const Matrix& adjacency, const GameParams& params, const PriceProfile& prices,
                        const EffortProfile& x) {
    const Vector gxa = adjacency * x.x_a;
    const Vector gxb = adjacency * x.x_b;
    const auto xa = x.x_a.array();
    const auto xb = x.x_b.array();
    return (prices.p_a.array() * xa + prices.p_b.array() * xb - 0.5 * xa.square() - 0.5 * xb.square() -
            params.beta * xa * xb + params.delta * (xa * gxa.array() + xb * gxb.array()) +
            params.mu * (xa * gxb.array() + xb * gxa.array()))
        .matrix();
}

inline Vector utilities(const Network& g, const GameParams& params, const PriceProfile& prices,
                        const EffortProfile& x) {
    return utilities(g.adjacency(), params, prices, x);
}

inline double aggregate_unsustainable(const EffortProfile& x) { return x.x_b.sum(); }

// Welfare at the constrained equilibrium, by summing utilities.
inline double equilibrium_welfare(const LeontiefBundle& bundle, const PriceProfile& prices,
                                  const EquilibriumOptions& opts = {}) {
    const auto eq = nonneg_equilibrium(bundle, prices, nullptr, opts);
    return utilities(bundle.adjacency, bundle.params, prices, eq.efforts).sum();
}

struct WelfareValue {
    double value = 0.0;
    bool closed_form = true;  // false when the interior premise failed and utilities were summed
};

// Quadratic welfare in the sustainable price, valid when the equilibrium is interior.
inline double welfare_quadratic(const LeontiefBundle& bundle, const Vector& p_a, const Vector& p_b0) {
    const Vector v = 2.0 * bundle.r_mat * p_b0;
    return 0.25 * (p_a.dot(bundle.q_mat * p_a) - v.dot(p_a) + p_b0.dot(bundle.q_mat * p_b0));
}

inline WelfareValue welfare_closed_form(const LeontiefBundle& bundle, const Vector& p_a, const Vector& p_b0) {
    const PriceProfile prices{p_a, p_b0};
    if (interior_equilibrium(bundle, prices).nonnegative) return {welfare_quadratic(bundle, p_a, p_b0), true};
    return {equilibrium_welfare(bundle, prices), false};
}

inline Vector welfare_gradient(const LeontiefBundle& bundle, const Vector& p_a) {
    return 0.25 * (2.0 * bundle.q_mat * p_a - bundle.v_vec);
}

// phi(p1) - phi(p2) for the quadratic welfare with the bundle's p_b0, without cancellation.
inline double welfare_difference(const LeontiefBundle& bundle, const Vector& p1, const Vector& p2) {
    return 0.25 * (p1 - p2).dot(bundle.q_mat * (p1 + p2) - bundle.v_vec);
}

inline double k_zero(const LeontiefBundle& bundle, const Vector& p_b0, double tau_b) {
    return ((bundle.m_plus + bundle.m_minus) * p_b0).sum() - 2.0 * tau_b;
}

// Aggregate interior x^B as a function of the sustainable price: (s - b_delta' p_a) / 2.
inline double interior_aggregate_unsustainable(const LeontiefBundle& bundle, const Vector& p_a) {
    return 0.5 * (((bundle.m_plus + bundle.m_minus) * bundle.p_b0).sum() - bundle.b_delta.dot(p_a));
}

}  // namespace netprice
