#pragma once

#include <netprice/game.hpp>
#include <netprice/network.hpp>

namespace netprice::testing {

inline GameParams standard_params() { return {0.2, 0.1, 0.01}; }

inline Network path2() { return Network::from_edges({{0, 1}}, 2); }
inline Network path3() { return Network::from_edges({{0, 1}, {1, 2}}, 3); }
inline Network isolated(int n) { return Network::from_edges({}, n); }

inline Network complete(int n) {
    std::vector<Edge> e;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
    return Network::from_edges(e, n);
}

inline Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index k = 0;
    for (double x : xs) v(k++) = x;
    return v;
}

inline Vector ones(int n) { return Vector::Ones(n); }

}  // namespace netprice::testing
