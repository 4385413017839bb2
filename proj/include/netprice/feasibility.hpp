#pragma once

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "game.hpp"
#include "network.hpp"

namespace netprice {

// Ordered from weakest to strongest guarantee.
enum class Regime { SMinus, NetworkDependent, SPlus };

inline std::string to_string(Regime r) {
    switch (r) {
    case Regime::SPlus: return "S_PLUS";
    case Regime::SMinus: return "S_MINUS";
    case Regime::NetworkDependent: return "NETWORK_DEPENDENT";
    }
    return "?";
}

struct ComponentRegime {
    std::vector<int> vertices;
    Regime regime = Regime::SPlus;
    std::string triggered_condition;
    int min_degree = 0;
};

struct RegimeReport {
    Regime regime = Regime::SPlus;
    std::string triggered_condition;
    std::vector<int> b_delta_signs;  // -1, 0, +1 per agent
    Vector b_delta;
    bool essentially_feasible_p = false;
    bool essentially_feasible_pr = false;
    std::vector<ComponentRegime> components;
};

namespace detail {

inline ComponentRegime classify_component(const std::vector<int>& vertices, int dmin, const GameParams& p) {
    ComponentRegime c;
    c.vertices = vertices;
    c.min_degree = dmin;
    if (check_assumption2prime(p)) {
        c.regime = Regime::SPlus;
        c.triggered_condition = "mu < beta*delta";
        return c;
    }
    const double density_bound = dmin > 0 ? p.beta / dmin : std::numeric_limits<double>::infinity();
    const double threshold = std::max(2.0 * p.beta * p.delta / (1.0 + p.beta * p.beta), density_bound);
    if (p.mu > threshold) {
        c.regime = Regime::SMinus;
        c.triggered_condition = "mu > max(2*beta*delta/(1+beta^2), beta/d_min)";
    } else {
        c.regime = Regime::NetworkDependent;
        c.triggered_condition = "beta*delta <= mu <= max(2*beta*delta/(1+beta^2), beta/d_min)";
    }
    return c;
}

}  // namespace detail

// Each component is classified on its own; the aggregate is the weakest label.
// rho_max only feeds the redistribution verdict; an empty vector means no penalties allowed.
inline RegimeReport classify_regime(const Network& g, const GameParams& params, const Vector& rho_max = Vector()) {
    params.validate();
    if (!check_assumption2(params)) throw assumption_violation("cross-activity effect mu must be below delta");
    RegimeReport report;
    report.regime = Regime::SPlus;
    for (const auto& comp : connected_components(g).components) {
        auto c = detail::classify_component(comp, min_degree(g.induced(comp)), params);
        if (report.components.empty() || c.regime < report.regime) {
            report.regime = c.regime;
            report.triggered_condition = c.triggered_condition;
        }
        report.components.push_back(std::move(c));
    }
    const auto bundle = leontief_bundle(g, params, Vector::Ones(g.size()));
    report.b_delta = bundle.b_delta;
    for (Eigen::Index i = 0; i < report.b_delta.size(); ++i)
        report.b_delta_signs.push_back(report.b_delta(i) > 0 ? 1 : (report.b_delta(i) < 0 ? -1 : 0));
    switch (report.regime) {
    case Regime::SPlus: report.essentially_feasible_p = true; break;
    case Regime::SMinus: report.essentially_feasible_p = false; break;
    case Regime::NetworkDependent: report.essentially_feasible_p = report.b_delta.maxCoeff() > 0.0; break;
    }
    report.essentially_feasible_pr = rho_max.size() > 0 && rho_max.maxCoeff() > 0.0;
    return report;
}

}  // namespace netprice
