#ifndef CRB_TEST_SUPPORT_HPP
#define CRB_TEST_SUPPORT_HPP

// Independent oracles used by the test suites. Everything here recomputes
// expected values through a different route than the library code under
// test: explicit normal equations, path-by-path separation checks,
// equivalence-class enumeration, and order statistics.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "crb/graph.hpp"
#include "crb/rng.hpp"

namespace crb::testing {

// Least squares through the explicit normal equations (X'X)^-1 X'y with an
// intercept column, trusting nothing but dense inversion.
inline Eigen::VectorXd normal_equation_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    Eigen::MatrixXd design(x.rows(), x.cols() + 1);
    design.col(0).setOnes();
    design.rightCols(x.cols()) = x;
    const Eigen::MatrixXd gram = design.transpose() * design;
    return gram.inverse() * design.transpose() * y;
}

// Path-blocking d-separation: enumerates every simple undirected path and
// applies the collider rule directly.
inline bool path_d_separated(const Dag& g, int x, int y, const std::vector<int>& cond) {
    const int n = g.n_vertices();
    std::vector<bool> in_z(n, false);
    for (int s : cond) in_z[s] = true;

    std::vector<bool> z_or_descendant_in_z(n, false);
    for (int v = 0; v < n; ++v) {
        if (!in_z[v]) continue;
        // every ancestor of a conditioned vertex has a descendant in Z
        std::vector<int> stack{v};
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            if (z_or_descendant_in_z[u]) continue;
            z_or_descendant_in_z[u] = true;
            for (int p : g.parents(u)) stack.push_back(p);
        }
    }

    std::vector<int> path{x};
    std::vector<bool> on_path(n, false);
    on_path[x] = true;
    bool connected = false;

    std::function<void(int)> walk = [&](int v) {
        if (connected) return;
        if (v == y) {
            // blocked iff some interior triple blocks it
            bool blocked = false;
            for (std::size_t k = 1; k + 1 < path.size(); ++k) {
                const int a = path[k - 1];
                const int b = path[k];
                const int c = path[k + 1];
                const bool collider = g.has_edge(a, b) && g.has_edge(c, b);
                if (collider) {
                    if (!z_or_descendant_in_z[b]) blocked = true;
                } else if (in_z[b]) {
                    blocked = true;
                }
            }
            if (!blocked) connected = true;
            return;
        }
        for (int w = 0; w < n; ++w) {
            if (on_path[w] || !g.adjacent(v, w)) continue;
            path.push_back(w);
            on_path[w] = true;
            walk(w);
            on_path[w] = false;
            path.pop_back();
        }
    };
    walk(x);
    return !connected;
}

// True when S renders the target independent of every vertex outside
// S + {target} (using the path oracle above).
inline bool separates_from_rest(const Dag& g, int target, const std::vector<int>& s) {
    std::vector<bool> in_s(static_cast<std::size_t>(g.n_vertices()), false);
    for (int v : s) in_s[static_cast<std::size_t>(v)] = true;
    for (int v = 0; v < g.n_vertices(); ++v) {
        if (v == target || in_s[static_cast<std::size_t>(v)]) continue;
        if (!path_d_separated(g, target, v, s)) return false;
    }
    return true;
}

// All minimal-cardinality subsets that d-separate the target from the rest.
inline std::vector<std::vector<int>> minimal_separating_supersets(const Dag& g, int target) {
    const int n = g.n_vertices();
    std::vector<int> others;
    for (int v = 0; v < n; ++v) {
        if (v != target) others.push_back(v);
    }
    const int m = static_cast<int>(others.size());
    std::vector<std::vector<int>> minimal;
    for (int size = 0; size <= m; ++size) {
        for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
            if (__builtin_popcount(mask) != size) continue;
            std::vector<int> s;
            for (int k = 0; k < m; ++k) {
                if (mask & (1u << k)) s.push_back(others[k]);
            }
            if (separates_from_rest(g, target, s)) minimal.push_back(std::move(s));
        }
        if (!minimal.empty()) break;
    }
    return minimal;
}

// Skeleton and v-structure signature; two DAGs are Markov equivalent exactly
// when the signatures agree.
struct MecSignature {
    std::set<std::pair<int, int>> skeleton;
    std::set<std::tuple<int, int, int>> v_structures;  // (low parent, child, high parent)

    bool operator==(const MecSignature&) const = default;
    bool operator<(const MecSignature& other) const {
        return std::tie(skeleton, v_structures) < std::tie(other.skeleton, other.v_structures);
    }
};

inline MecSignature mec_signature(const Dag& g) {
    MecSignature sig;
    for (const auto& [p, c] : g.edges()) sig.skeleton.insert({std::min(p, c), std::max(p, c)});
    for (int child = 0; child < g.n_vertices(); ++child) {
        const auto& parents = g.parents(child);
        for (std::size_t i = 0; i < parents.size(); ++i) {
            for (std::size_t j = i + 1; j < parents.size(); ++j) {
                if (!g.adjacent(parents[i], parents[j])) {
                    sig.v_structures.insert({std::min(parents[i], parents[j]), child,
                                             std::max(parents[i], parents[j])});
                }
            }
        }
    }
    return sig;
}

// Every DAG on n labelled vertices (pair status in {none, fwd, bwd}).
inline std::vector<Dag> all_dags(int n, const std::vector<std::string>& names) {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    }
    std::vector<Dag> dags;
    const auto total = static_cast<std::size_t>(std::pow(3.0, static_cast<double>(pairs.size())));
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t rest = code;
        std::vector<Edge> edges;
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            const int s = static_cast<int>(rest % 3);
            rest /= 3;
            if (s == 1) edges.emplace_back(pairs[k].first, pairs[k].second);
            if (s == 2) edges.emplace_back(pairs[k].second, pairs[k].first);
        }
        try {
            dags.emplace_back(names, edges);
        } catch (...) {
            // cyclic: skip
        }
    }
    return dags;
}

// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j]) {
            ++i;
        } else {
            ++j;
        }
        const double fa = static_cast<double>(i) / static_cast<double>(a.size());
        const double fb = static_cast<double>(j) / static_cast<double>(b.size());
        d = std::max(d, std::abs(fa - fb));
    }
    return d;
}

inline double ks_critical(double c_alpha, std::size_t n, std::size_t m) {
    return c_alpha * std::sqrt(static_cast<double>(n + m) /
                               (static_cast<double>(n) * static_cast<double>(m)));
}

inline Cpdag random_cpdag(int n, RngStream& rng) {
    std::vector<Edge> directed;
    std::vector<Edge> undirected;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            switch (rng.next_index(4)) {
                case 1: undirected.emplace_back(i, j); break;
                case 2: directed.emplace_back(i, j); break;
                case 3: directed.emplace_back(j, i); break;
                default: break;
            }
        }
    }
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("x" + std::to_string(i));
    return Cpdag(std::move(names), std::move(directed), std::move(undirected));
}

}  // namespace crb::testing

#endif
