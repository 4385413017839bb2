#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "game.hpp"
#include "network.hpp"

namespace netprice {

using nlohmann::json;

// Market components of the two per-unit prices, in currency per metric ton.
struct PriceComponents {
    double base_price = 0.0;
    double premium_rate = 0.0;
    double cert_cost = 0.0;
    double op_cost = 0.0;
    double rep_cost = 0.0;
};

// Tons of fresh fruit bunches per ton of certified oil.
inline constexpr double kFfbPerTon = 5.0;

inline double cert_cost_from_ffb(double per_ffb_ton) { return kFfbPerTon * per_ffb_ton; }

// p^A = (1 + premium) base - certification, p^B = base - operational - reputational.
inline std::pair<double, double> price_from_components(const PriceComponents& pc) {
    const std::pair<const char*, double> fields[] = {{"base_price", pc.base_price},
                                                     {"premium_rate", pc.premium_rate},
                                                     {"cert_cost", pc.cert_cost},
                                                     {"op_cost", pc.op_cost},
                                                     {"rep_cost", pc.rep_cost}};
    for (const auto& [name, value] : fields)
        if (!(value >= 0.0)) throw invalid_input(std::string("price component ") + name + " must be non-negative");
    const double p_a = (1.0 + pc.premium_rate) * pc.base_price - pc.cert_cost;
    const double p_b = pc.base_price - pc.op_cost - pc.rep_cost;
    if (p_a < 0.0) throw invalid_input("cert_cost exceeds the premium-adjusted base price; sustainable price negative");
    if (p_b < 0.0) throw invalid_input("op_cost + rep_cost exceed base_price; unsustainable price negative");
    return {p_a, p_b};
}

inline PriceProfile prices_from_components(const std::vector<PriceComponents>& pcs) {
    PriceProfile p{Vector(static_cast<Eigen::Index>(pcs.size())), Vector(static_cast<Eigen::Index>(pcs.size()))};
    for (std::size_t i = 0; i < pcs.size(); ++i) {
        const auto [a, b] = price_from_components(pcs[i]);
        p.p_a(static_cast<Eigen::Index>(i)) = a;
        p.p_b(static_cast<Eigen::Index>(i)) = b;
    }
    return p;
}

struct SyntheticNetworkSpec {
    std::vector<int> component_sizes;
    double extra_edge_prob = 0.05;
    int max_degree = 4;
    std::uint64_t seed = 1;
};

inline Network synthetic_network(const SyntheticNetworkSpec& spec) {
    if (spec.component_sizes.empty()) throw invalid_input("network.synthetic.component_sizes must not be empty");
    std::mt19937_64 rng(spec.seed);
    std::vector<Network> parts;
    for (int size : spec.component_sizes) parts.push_back(random_connected(size, spec.extra_edge_prob, spec.max_degree, rng));
    return disjoint_union(parts);
}

struct SweepSpec {
    double start = 0.0;  // network-average maximum sustainable price
    double stop = 0.0;
    int steps = 0;
    bool relative = false;  // start/stop are multiples of mean p_b0
    std::vector<std::string> problems{"p", "ptilde", "pr"};
    double jitter = 0.2;                 // half-width of the multiplicative spread of P's bounds
    std::string assignment = "gradient";  // "gradient" or "random"
    std::optional<double> pr_rho_max;    // absolute per-agent penalty; matched average when unset
    double pr_budget = 0.0;
};

// Raw JSON is kept for vector fields so configs round-trip unchanged.
struct ScenarioConfig {
    std::string id = "scenario";
    json network;
    GameParams params;
    json prices;            // {"p_a0": ..., "p_b0": ...} or {"components": ...}
    std::optional<json> problem;
    std::optional<SweepSpec> sweep;
    std::string output;
    std::string base_dir;  // directory of the config file, for relative paths
};

namespace detail {

inline const json& require(const json& j, const std::string& key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) throw invalid_input("missing field '" + where + key + "'");
    return j.at(key);
}

template <class T>
T get_field(const json& j, const std::string& key, const std::string& where) {
    const json& v = require(j, key, where);
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw invalid_input("field '" + where + key + "' has the wrong type");
    }
}

}  // namespace detail

inline SweepSpec sweep_from_json(const json& j) {
    SweepSpec s;
    s.start = detail::get_field<double>(j, "start", "sweep.");
    s.stop = detail::get_field<double>(j, "stop", "sweep.");
    s.steps = detail::get_field<int>(j, "steps", "sweep.");
    if (s.steps < 0) throw invalid_input("field 'sweep.steps' must be non-negative");
    if (j.contains("relative")) s.relative = detail::get_field<bool>(j, "relative", "sweep.");
    if (j.contains("problems")) s.problems = detail::get_field<std::vector<std::string>>(j, "problems", "sweep.");
    for (const auto& p : s.problems)
        if (p != "p" && p != "ptilde" && p != "pr") throw invalid_input("field 'sweep.problems' has unknown problem '" + p + "'");
    if (j.contains("jitter")) s.jitter = detail::get_field<double>(j, "jitter", "sweep.");
    if (!(s.jitter >= 0.0 && s.jitter < 1.0)) throw invalid_input("field 'sweep.jitter' must lie in [0,1)");
    if (j.contains("assignment")) s.assignment = detail::get_field<std::string>(j, "assignment", "sweep.");
    if (s.assignment != "gradient" && s.assignment != "random")
        throw invalid_input("field 'sweep.assignment' must be 'gradient' or 'random'");
    if (j.contains("pr_rho_max") && !j.at("pr_rho_max").is_null())
        s.pr_rho_max = detail::get_field<double>(j, "pr_rho_max", "sweep.");
    if (j.contains("pr_budget")) s.pr_budget = detail::get_field<double>(j, "pr_budget", "sweep.");
    return s;
}

inline json sweep_to_json(const SweepSpec& s) {
    json j{{"start", s.start},   {"stop", s.stop},         {"steps", s.steps},
           {"relative", s.relative}, {"problems", s.problems}, {"jitter", s.jitter},
           {"assignment", s.assignment}, {"pr_budget", s.pr_budget}};
    j["pr_rho_max"] = s.pr_rho_max ? json(*s.pr_rho_max) : json(nullptr);
    return j;
}

inline ScenarioConfig scenario_from_json(const json& j, const std::string& base_dir = "") {
    if (!j.is_object()) throw invalid_input("scenario must be a JSON object");
    ScenarioConfig c;
    c.base_dir = base_dir;
    if (j.contains("id")) c.id = detail::get_field<std::string>(j, "id", "");
    c.network = detail::require(j, "network", "");
    if (!c.network.is_object() ||
        (!c.network.contains("path") && !c.network.contains("edges") && !c.network.contains("synthetic")))
        throw invalid_input("field 'network' needs one of 'path', 'edges' (with 'n'), or 'synthetic'");
    const json& params = detail::require(j, "params", "");
    c.params.beta = detail::get_field<double>(params, "beta", "params.");
    c.params.delta = detail::get_field<double>(params, "delta", "params.");
    c.params.mu = detail::get_field<double>(params, "mu", "params.");
    c.prices = detail::require(j, "prices", "");
    const bool explicit_prices = c.prices.contains("p_a0") || c.prices.contains("p_b0");
    const bool components = c.prices.contains("components");
    if (explicit_prices == components)
        throw invalid_input("field 'prices' needs exactly one source: 'p_a0'/'p_b0' or 'components'");
    if (explicit_prices) {
        detail::require(c.prices, "p_a0", "prices.");
        detail::require(c.prices, "p_b0", "prices.");
    }
    if (j.contains("problem")) {
        const json& p = j.at("problem");
        const auto type = detail::get_field<std::string>(p, "type", "problem.");
        if (type == "p" || type == "ptilde") {
            detail::require(p, "p_max", "problem.");
        } else if (type == "pr") {
            detail::require(p, "rho_max", "problem.");
        } else {
            throw invalid_input("field 'problem.type' must be p, pr, or ptilde");
        }
        detail::require(p, "tau_b", "problem.");
        c.problem = p;
    }
    if (j.contains("sweep")) c.sweep = sweep_from_json(j.at("sweep"));
    if (j.contains("output")) c.output = detail::get_field<std::string>(j, "output", "");
    return c;
}

inline json scenario_to_json(const ScenarioConfig& c) {
    json j{{"id", c.id},
           {"network", c.network},
           {"params", {{"beta", c.params.beta}, {"delta", c.params.delta}, {"mu", c.params.mu}}},
           {"prices", c.prices}};
    if (c.problem) j["problem"] = *c.problem;
    if (c.sweep) j["sweep"] = sweep_to_json(*c.sweep);
    if (!c.output.empty()) j["output"] = c.output;
    return j;
}

inline ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input("cannot open config " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw invalid_input("config " + path + " is not valid JSON: " + e.what());
    }
    return scenario_from_json(j, std::filesystem::path(path).parent_path().string());
}

// Scenario with every vector expanded to the network size.
struct ResolvedScenario {
    std::string id;
    Network network;
    GameParams params;
    Vector p_a0;
    Vector p_b0;
    std::string problem_type;  // empty when no problem given
    Vector p_max;
    Vector rho_max;
    Vector budget;
    double tau_b = 0.0;
};

namespace detail {

// Scalar broadcast or array of length n.
inline Vector vector_field(const json& j, int n, const std::string& name) {
    if (j.is_number()) return Vector::Constant(n, j.get<double>());
    if (!j.is_array()) throw invalid_input("field '" + name + "' must be a number or an array");
    if (static_cast<int>(j.size()) != n)
        throw invalid_input("field '" + name + "' has " + std::to_string(j.size()) + " entries, expected " +
                            std::to_string(n));
    Vector v(n);
    for (int i = 0; i < n; ++i) {
        if (!j[i].is_number()) throw invalid_input("field '" + name + "' must hold numbers");
        v(i) = j[i].get<double>();
    }
    return v;
}

inline std::string resolve_path(const std::string& base, const std::string& path) {
    if (path.empty() || std::filesystem::path(path).is_absolute() || base.empty()) return path;
    return (std::filesystem::path(base) / path).string();
}

}  // namespace detail

inline Network network_from_config(const ScenarioConfig& c, const std::string& override_path = "") {
    if (!override_path.empty()) return load_network_file(override_path);
    const json& n = c.network;
    if (n.contains("path"))
        return load_network_file(detail::resolve_path(c.base_dir, detail::get_field<std::string>(n, "path", "network.")));
    if (n.contains("synthetic")) {
        const json& s = n.at("synthetic");
        SyntheticNetworkSpec spec;
        spec.component_sizes = detail::get_field<std::vector<int>>(s, "component_sizes", "network.synthetic.");
        if (s.contains("extra_edge_prob"))
            spec.extra_edge_prob = detail::get_field<double>(s, "extra_edge_prob", "network.synthetic.");
        if (s.contains("max_degree")) spec.max_degree = detail::get_field<int>(s, "max_degree", "network.synthetic.");
        if (s.contains("seed")) spec.seed = detail::get_field<std::uint64_t>(s, "seed", "network.synthetic.");
        return synthetic_network(spec);
    }
    return network_from_json(n);
}

inline ResolvedScenario resolve_scenario(const ScenarioConfig& c, const std::string& network_override = "") {
    ResolvedScenario r;
    r.id = c.id;
    r.network = network_from_config(c, network_override);
    r.params = c.params;
    r.params.validate();
    const int n = r.network.size();
    if (c.prices.contains("components")) {
        const json& comp = c.prices.at("components");
        auto field = [&](const char* key, double fallback) {
            return comp.contains(key) ? detail::vector_field(comp.at(key), n, std::string("prices.components.") + key)
                                      : Vector::Constant(n, fallback);
        };
        const Vector base = detail::vector_field(detail::require(comp, "base_price", "prices.components."), n,
                                                 "prices.components.base_price");
        const Vector eta = field("premium_rate", 0.0);
        Vector cert = field("cert_cost", 0.0);
        if (comp.contains("cert_cost_ffb")) {
            if (comp.contains("cert_cost"))
                throw invalid_input("give either 'prices.components.cert_cost' or 'cert_cost_ffb', not both");
            cert = kFfbPerTon * field("cert_cost_ffb", 0.0);
        }
        const Vector op = field("op_cost", 0.0);
        const Vector rep = field("rep_cost", 0.0);
        std::vector<PriceComponents> pcs(n);
        for (int i = 0; i < n; ++i) pcs[i] = {base(i), eta(i), cert(i), op(i), rep(i)};
        const auto p = prices_from_components(pcs);
        r.p_a0 = p.p_a;
        r.p_b0 = p.p_b;
    } else {
        r.p_a0 = detail::vector_field(c.prices.at("p_a0"), n, "prices.p_a0");
        r.p_b0 = detail::vector_field(c.prices.at("p_b0"), n, "prices.p_b0");
    }
    if ((r.p_a0.array() < 0.0).any() || (r.p_b0.array() < 0.0).any())
        throw invalid_input("pre-intervention prices must be non-negative");
    if (c.problem) {
        const json& p = *c.problem;
        r.problem_type = p.at("type").get<std::string>();
        if (p.contains("p_max")) r.p_max = detail::vector_field(p.at("p_max"), n, "problem.p_max");
        if (p.contains("rho_max")) r.rho_max = detail::vector_field(p.at("rho_max"), n, "problem.rho_max");
        r.budget = p.contains("budget") ? detail::vector_field(p.at("budget"), n, "problem.budget") : Vector::Zero(n);
        const json& tau = p.at("tau_b");
        if (tau.is_number()) {
            r.tau_b = tau.get<double>();
        } else if (tau.is_object() && tau.contains("at_p_a_ratio")) {
            // Aggregate unsustainable effort when every sustainable price is a fixed multiple of p_b0.
            const double ratio = detail::get_field<double>(tau, "at_p_a_ratio", "problem.tau_b.");
            const auto eq = nonneg_equilibrium(r.network, r.params, {ratio * r.p_b0, r.p_b0});
            r.tau_b = aggregate_unsustainable(eq.efforts);
        } else {
            throw invalid_input("field 'problem.tau_b' must be a number or {\"at_p_a_ratio\": r}");
        }
    }
    return r;
}

struct ResultRecord {
    std::string scenario_id;
    std::string problem;
    double pbar_max = 0.0;
    double welfare = 0.0;
    double welfare_gain_pct = 0.0;
    double agg_xb = 0.0;
    double agg_xb_reduction_pct = 0.0;
    std::string certificate;

    friend bool operator==(const ResultRecord&, const ResultRecord&) = default;
};

inline const char* kResultHeader =
    "scenario_id,problem,pbar_max,welfare,welfare_gain_pct,agg_xb,agg_xb_reduction_pct,certificate";

inline void write_results(const std::vector<ResultRecord>& records, std::ostream& out) {
    out << kResultHeader << '\n';
    char buf[64];
    auto num = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return std::string(buf);
    };
    for (const auto& r : records)
        out << r.scenario_id << ',' << r.problem << ',' << num(r.pbar_max) << ',' << num(r.welfare) << ','
            << num(r.welfare_gain_pct) << ',' << num(r.agg_xb) << ',' << num(r.agg_xb_reduction_pct) << ','
            << r.certificate << '\n';
}

inline void write_results(const std::vector<ResultRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw invalid_input("cannot write results to " + path);
    write_results(records, out);
}

inline std::vector<ResultRecord> read_results(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kResultHeader) throw invalid_input("results CSV has an unexpected header");
    std::vector<ResultRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 8) throw invalid_input("results row has " + std::to_string(cells.size()) + " cells");
        ResultRecord r;
        r.scenario_id = cells[0];
        r.problem = cells[1];
        r.pbar_max = std::strtod(cells[2].c_str(), nullptr);
        r.welfare = std::strtod(cells[3].c_str(), nullptr);
        r.welfare_gain_pct = std::strtod(cells[4].c_str(), nullptr);
        r.agg_xb = std::strtod(cells[5].c_str(), nullptr);
        r.agg_xb_reduction_pct = std::strtod(cells[6].c_str(), nullptr);
        r.certificate = cells[7];
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace netprice
