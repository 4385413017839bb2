#pragma once

#include <string>
#include <vector>

#include "error.hpp"
#include "game.hpp"

namespace netprice {

// Welfare maximization over sustainable prices only.
struct ProblemP {
    Vector p_a0;
    Vector p_max;
    Vector p_b0;
    double tau_b = 0.0;

    void validate(int n) const {
        if (p_a0.size() != n || p_max.size() != n || p_b0.size() != n)
            throw invalid_input("problem vectors must have length " + std::to_string(n));
        if (((p_max - p_a0).array() < 0.0).any()) throw invalid_input("p_max must be at least p_a0 entrywise");
        if ((p_a0.array() < 0.0).any() || (p_b0.array() < 0.0).any()) throw invalid_input("prices must be non-negative");
        if (!(tau_b >= 0.0)) throw invalid_input("tau_b must be non-negative");
    }
};

// Joint premiums and penalties under a per-agent budget.
struct ProblemPR {
    Vector p_a0;
    Vector p_b0;
    Vector rho_max;
    Vector budget;
    double tau_b = 0.0;

    void validate(int n) const {
        if (p_a0.size() != n || p_b0.size() != n || rho_max.size() != n || budget.size() != n)
            throw invalid_input("problem vectors must have length " + std::to_string(n));
        if ((rho_max.array() < 0.0).any() || ((rho_max - p_b0).array() > 0.0).any())
            throw invalid_input("rho_max must lie in [0, p_b0] entrywise");
        if ((budget.array() < 0.0).any()) throw invalid_input("budget must be non-negative");
        if ((p_a0.array() < 0.0).any()) throw invalid_input("prices must be non-negative");
        if (!(tau_b >= 0.0)) throw invalid_input("tau_b must be non-negative");
    }
};

enum class Certificate {
    P0Baseline,
    Thm4Pmax,
    Thm4Pa0,
    Cor1Ia,
    Cor1Ib,
    Cor1Ic,
    Cor1II,
    PrunedSearch,
    BruteForce,
    BestFound,
    Thm5MaxRho,
    Prop3StatusQuo,
    GridSearch,
    Cor2P0Star,
    Thm6Exact,
    Thm6Relaxed,
    VertexEnumeration,
};

inline std::string to_string(Certificate c) {
    switch (c) {
    case Certificate::P0Baseline: return "P0_BASELINE";
    case Certificate::Thm4Pmax: return "THM4_PMAX";
    case Certificate::Thm4Pa0: return "THM4_PA0";
    case Certificate::Cor1Ia: return "COR1_IA";
    case Certificate::Cor1Ib: return "COR1_IB";
    case Certificate::Cor1Ic: return "COR1_IC";
    case Certificate::Cor1II: return "COR1_II";
    case Certificate::PrunedSearch: return "PRUNED_SEARCH";
    case Certificate::BruteForce: return "BRUTE_FORCE";
    case Certificate::BestFound: return "BEST_FOUND";
    case Certificate::Thm5MaxRho: return "THM5_MAXRHO";
    case Certificate::Prop3StatusQuo: return "PROP3_STATUS_QUO";
    case Certificate::GridSearch: return "GRID_SEARCH";
    case Certificate::Cor2P0Star: return "COR2_P0STAR";
    case Certificate::Thm6Exact: return "THM6_EXACT";
    case Certificate::Thm6Relaxed: return "THM6_RELAXED";
    case Certificate::VertexEnumeration: return "VERTEX_ENUMERATION";
    }
    return "?";
}

struct PolicyResult {
    Vector policy_a;
    Vector policy_b;
    double welfare = 0.0;
    double agg_unsustainable = 0.0;
    Certificate certificate = Certificate::BruteForce;
    bool optimality_exact = false;
    EquilibriumCertificate equilibrium;
    Vector utility_change;  // post minus pre, per agent; empty unless reported
    std::vector<std::string> notes;
};

// Welfare and aggregate unsustainable effort at the constrained equilibrium.
inline PolicyResult evaluate_policy(const LeontiefBundle& bundle, const Vector& p_a, const Vector& p_b,
                                    Certificate cert, bool exact, const EquilibriumOptions& opts = {}) {
    PolicyResult r;
    r.policy_a = p_a;
    r.policy_b = p_b;
    const PriceProfile prices{p_a, p_b};
    const auto eq = nonneg_equilibrium(bundle, prices, nullptr, opts);
    r.welfare = utilities(bundle.adjacency, bundle.params, prices, eq.efforts).sum();
    r.agg_unsustainable = aggregate_unsustainable(eq.efforts);
    r.equilibrium = eq.certificate;
    r.certificate = cert;
    r.optimality_exact = exact;
    return r;
}

// Deterministic preference: higher welfare, then lexicographically smaller policy.
inline bool better_policy(double w1, const Vector& p1, double w2, const Vector& p2, double tie_tol = 0.0) {
    if (w1 > w2 + tie_tol) return true;
    if (w2 > w1 + tie_tol) return false;
    for (Eigen::Index i = 0; i < p1.size(); ++i) {
        if (p1(i) < p2(i)) return true;
        if (p1(i) > p2(i)) return false;
    }
    return false;
}

}  // namespace netprice
