#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "error.hpp"

namespace netprice {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Edge = std::pair<int, int>;

// Undirected simple graph stored as a dense 0/1 adjacency matrix.
class Network {
public:
    Network() = default;

    static Network from_edges(const std::vector<Edge>& edges, int n) {
        if (n < 1) throw invalid_input("network must have at least one node");
        Network g;
        g.adj_ = Matrix::Zero(n, n);
        for (auto [i, j] : edges) {
            if (i < 0 || j < 0 || i >= n || j >= n)
                throw invalid_input("edge (" + std::to_string(i) + "," + std::to_string(j) +
                                    ") out of range for n=" + std::to_string(n));
            if (i == j) throw invalid_input("self-loop at node " + std::to_string(i));
            g.adj_(i, j) = 1.0;
            g.adj_(j, i) = 1.0;
        }
        return g;
    }

    int size() const { return static_cast<int>(adj_.rows()); }
    const Matrix& adjacency() const { return adj_; }
    int degree(int i) const { return static_cast<int>(adj_.row(i).sum()); }
    bool has_edge(int i, int j) const { return adj_(i, j) != 0.0; }

    // Edges with i < j, in row-major order.
    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        for (int i = 0; i < size(); ++i)
            for (int j = i + 1; j < size(); ++j)
                if (has_edge(i, j)) out.emplace_back(i, j);
        return out;
    }

    Network induced(const std::vector<int>& vertices) const {
        Network g;
        const int m = static_cast<int>(vertices.size());
        g.adj_ = Matrix::Zero(m, m);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) g.adj_(a, b) = adj_(vertices[a], vertices[b]);
        return g;
    }

    // Relabels node i as perm[i].
    Network permuted(const std::vector<int>& perm) const {
        Network g;
        g.adj_ = Matrix::Zero(size(), size());
        for (int i = 0; i < size(); ++i)
            for (int j = 0; j < size(); ++j) g.adj_(perm[i], perm[j]) = adj_(i, j);
        return g;
    }

    friend bool operator==(const Network& a, const Network& b) { return a.adj_ == b.adj_; }

private:
    Matrix adj_;
};

inline Network load_network(const std::vector<Edge>& edges, int n) { return Network::from_edges(edges, n); }

struct ComponentDecomposition {
    std::vector<std::vector<int>> components;  // each sorted ascending
    std::vector<int> label;                    // node -> component index

    int count() const { return static_cast<int>(components.size()); }
};

// Components ordered by their smallest vertex.
inline ComponentDecomposition connected_components(const Network& g) {
    const int n = g.size();
    ComponentDecomposition out;
    out.label.assign(n, -1);
    for (int s = 0; s < n; ++s) {
        if (out.label[s] >= 0) continue;
        const int c = out.count();
        std::vector<int> members{s};
        out.label[s] = c;
        for (std::size_t k = 0; k < members.size(); ++k) {
            const int u = members[k];
            for (int w = 0; w < n; ++w) {
                if (g.has_edge(u, w) && out.label[w] < 0) {
                    out.label[w] = c;
                    members.push_back(w);
                }
            }
        }
        std::sort(members.begin(), members.end());
        out.components.push_back(std::move(members));
    }
    return out;
}

class SpectralRadiusError : public Error {
public:
    SpectralRadiusError(const std::string& what, double last_estimate, Vector last_iterate)
        : Error(ErrorKind::NumericalFailure, what), last_estimate_(last_estimate), last_iterate_(std::move(last_iterate)) {}
    double last_estimate() const { return last_estimate_; }
    const Vector& last_iterate() const { return last_iterate_; }

private:
    double last_estimate_;
    Vector last_iterate_;
};

namespace detail {

// Power iteration on A + I for a connected component. The shift keeps the
// Perron root strictly dominant on bipartite graphs, where A alone has -rho.
inline double component_spectral_radius(const Matrix& a, double tol, int max_iter) {
    const int n = static_cast<int>(a.rows());
    if (n == 1) return 0.0;
    Vector x = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
    double lambda = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Vector y = a * x + x;
        const double next = x.dot(y);
        const double norm = y.norm();
        if (norm == 0.0) return 0.0;
        y /= norm;
        const double step = (y - x).lpNorm<Eigen::Infinity>();
        x = std::move(y);
        if (std::abs(next - lambda) <= tol * std::max(1.0, next) && step <= std::sqrt(tol)) return next - 1.0;
        lambda = next;
    }
    throw SpectralRadiusError("power iteration did not converge in " + std::to_string(max_iter) + " iterations",
                              lambda - 1.0, x);
}

}  // namespace detail

inline double spectral_radius(const Network& g, double tol = 1e-10, int max_iter = 10000) {
    double rho = 0.0;
    for (const auto& comp : connected_components(g).components) {
        if (comp.size() < 2) continue;
        rho = std::max(rho, detail::component_spectral_radius(g.induced(comp).adjacency(), tol, max_iter));
    }
    return rho;
}

inline int min_degree(const Network& g) {
    int d = g.degree(0);
    for (int i = 1; i < g.size(); ++i) d = std::min(d, g.degree(i));
    return d;
}

inline Network disjoint_union(const std::vector<Network>& parts) {
    int n = 0;
    std::vector<Edge> edges;
    for (const auto& p : parts) {
        for (auto [i, j] : p.edges()) edges.emplace_back(i + n, j + n);
        n += p.size();
    }
    return Network::from_edges(edges, n);
}

// Random connected graph: a uniform random recursive tree plus extra edges
// with probability extra_prob, never exceeding max_degree.
inline Network random_connected(int n, double extra_prob, int max_degree, std::mt19937_64& rng) {
    if (n < 1) throw invalid_input("random_connected needs n >= 1");
    if (max_degree < 2 && n > 2) throw invalid_input("max_degree must be at least 2");
    std::vector<Edge> edges;
    std::vector<int> deg(n, 0);
    for (int v = 1; v < n; ++v) {
        std::vector<int> open;
        for (int u = 0; u < v; ++u)
            if (deg[u] < max_degree) open.push_back(u);
        std::uniform_int_distribution<std::size_t> pick(0, open.size() - 1);
        const int u = open[pick(rng)];
        edges.emplace_back(u, v);
        ++deg[u];
        ++deg[v];
    }
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    Network tree = Network::from_edges(edges, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (tree.has_edge(i, j) || deg[i] >= max_degree || deg[j] >= max_degree) continue;
            if (coin(rng) < extra_prob) {
                edges.emplace_back(i, j);
                ++deg[i];
                ++deg[j];
            }
        }
    return Network::from_edges(edges, n);
}

// Edge list as CSV with header "src,dst". Node count is max index + 1 unless n is given.
inline Network read_network_csv(std::istream& in, int n = 0) {
    std::string line;
    if (!std::getline(in, line)) throw invalid_input("empty edge list");
    auto trim = [](std::string s) {
        s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
        return s;
    };
    if (trim(line) != "src,dst") throw invalid_input("edge list header must be 'src,dst', got '" + line + "'");
    std::vector<Edge> edges;
    int max_index = -1;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        line = trim(line);
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw invalid_input("edge list row " + std::to_string(row) + " lacks a comma");
        try {
            std::size_t used_a = 0, used_b = 0;
            const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
            const int i = std::stoi(a, &used_a), j = std::stoi(b, &used_b);
            if (used_a != a.size() || used_b != b.size()) throw std::invalid_argument("trailing");
            edges.emplace_back(i, j);
            max_index = std::max({max_index, i, j});
        } catch (const std::exception&) {
            throw invalid_input("edge list row " + std::to_string(row) + " is not an integer pair: '" + line + "'");
        }
    }
    return Network::from_edges(edges, n > 0 ? n : max_index + 1);
}

inline Network network_from_json(const nlohmann::json& j) {
    if (!j.contains("n")) throw invalid_input("network JSON missing field 'n'");
    if (!j.contains("edges")) throw invalid_input("network JSON missing field 'edges'");
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2) throw invalid_input("network JSON field 'edges' must hold [i,j] pairs");
        edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    return Network::from_edges(edges, j.at("n").get<int>());
}

inline nlohmann::json network_to_json(const Network& g) {
    nlohmann::json edges = nlohmann::json::array();
    for (auto [i, j] : g.edges()) edges.push_back({i, j});
    return {{"n", g.size()}, {"edges", edges}};
}

// Dispatches on extension: .json or anything else as CSV.
inline Network load_network_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input("cannot open network file " + path);
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw invalid_input("network file " + path + " is not valid JSON: " + e.what());
        }
        return network_from_json(j);
    }
    return read_network_csv(in);
}

}  // namespace netprice
