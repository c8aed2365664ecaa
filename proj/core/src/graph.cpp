#include "crb/graph.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <unordered_set>

#include "crb/errors.hpp"
#include "crb/rng.hpp"

namespace crb {

std::vector<int> TopologicalOrder::positions() const {
    std::vector<int> pos(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) pos[order[k]] = static_cast<int>(k);
    return pos;
}

Dag::Dag(std::vector<std::string> vertices, std::vector<Edge> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)) {
    const int n = n_vertices();
    std::unordered_set<std::string> seen;
    for (const auto& name : vertices_) {
        if (!seen.insert(name).second) {
            throw Error(ErrorKind::InvalidConfig, "duplicate vertex name '" + name + "'");
        }
    }
    std::sort(edges_.begin(), edges_.end());
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const auto& [p, c] = edges_[i];
        if (p < 0 || p >= n || c < 0 || c >= n) {
            throw Error(ErrorKind::UnknownVertex, "edge endpoint out of range");
        }
        if (p == c) {
            throw Error(ErrorKind::InvalidConfig, "self-loop on vertex '" + vertices_[p] + "'");
        }
        if (i > 0 && edges_[i] == edges_[i - 1]) {
            throw Error(ErrorKind::InvalidConfig, "duplicate edge " + vertices_[p] + " -> " + vertices_[c]);
        }
    }
    parents_.assign(n, {});
    children_.assign(n, {});
    for (const auto& [p, c] : edges_) {
        parents_[c].push_back(p);
        children_[p].push_back(c);
    }
    topological_sort(n, edges_);  // rejects cycles
}

int Dag::index_of(const std::string& name) const {
    for (int i = 0; i < n_vertices(); ++i) {
        if (vertices_[i] == name) return i;
    }
    throw Error(ErrorKind::UnknownVertex, "unknown vertex '" + name + "'");
}

bool Dag::has_edge(int parent, int child) const {
    return std::binary_search(edges_.begin(), edges_.end(), Edge{parent, child});
}

Cpdag::Cpdag(std::vector<std::string> vertices, std::vector<Edge> directed,
             std::vector<Edge> undirected)
    : vertices_(std::move(vertices)), directed_(std::move(directed)),
      undirected_(std::move(undirected)) {
    const int n = n_vertices();
    for (auto& [a, b] : undirected_) {
        if (a > b) std::swap(a, b);
    }
    std::sort(directed_.begin(), directed_.end());
    directed_.erase(std::unique(directed_.begin(), directed_.end()), directed_.end());
    std::sort(undirected_.begin(), undirected_.end());
    undirected_.erase(std::unique(undirected_.begin(), undirected_.end()), undirected_.end());

    std::set<Edge> skeleton;
    for (const auto& [p, c] : directed_) {
        if (p < 0 || p >= n || c < 0 || c >= n) {
            throw Error(ErrorKind::UnknownVertex, "edge endpoint out of range");
        }
        if (p == c) throw Error(ErrorKind::InvalidConfig, "self-loop in partial graph");
        skeleton.insert({std::min(p, c), std::max(p, c)});
    }
    for (const auto& [a, b] : undirected_) {
        if (a < 0 || a >= n || b < 0 || b >= n) {
            throw Error(ErrorKind::UnknownVertex, "edge endpoint out of range");
        }
        if (a == b) throw Error(ErrorKind::InvalidConfig, "self-loop in partial graph");
        if (skeleton.count({a, b})) {
            throw Error(ErrorKind::InvalidConfig,
                        "pair (" + vertices_[a] + ", " + vertices_[b] +
                            ") appears both directed and undirected");
        }
    }
}

bool Cpdag::has_directed(int from, int to) const {
    return std::binary_search(directed_.begin(), directed_.end(), Edge{from, to});
}

bool Cpdag::has_undirected(int a, int b) const {
    if (a > b) std::swap(a, b);
    return std::binary_search(undirected_.begin(), undirected_.end(), Edge{a, b});
}

bool Cpdag::adjacent(int a, int b) const {
    return has_directed(a, b) || has_directed(b, a) || has_undirected(a, b);
}

TopologicalOrder topological_sort(int n_vertices, const std::vector<Edge>& edges) {
    std::vector<int> indegree(n_vertices, 0);
    std::vector<std::vector<int>> children(n_vertices);
    for (const auto& [p, c] : edges) {
        ++indegree[c];
        children[p].push_back(c);
    }
    std::priority_queue<int, std::vector<int>, std::greater<>> ready;
    for (int v = 0; v < n_vertices; ++v) {
        if (indegree[v] == 0) ready.push(v);
    }
    TopologicalOrder result;
    result.order.reserve(n_vertices);
    while (!ready.empty()) {
        const int v = ready.top();
        ready.pop();
        result.order.push_back(v);
        for (int c : children[v]) {
            if (--indegree[c] == 0) ready.push(c);
        }
    }
    if (static_cast<int>(result.order.size()) != n_vertices) {
        throw Error(ErrorKind::CycleDetected, "graph contains a directed cycle");
    }
    return result;
}

TopologicalOrder topological_sort(const Dag& g) {
    return topological_sort(g.n_vertices(), g.edges());
}

Dag random_er_dag(int n_vertices, double expected_edges, std::uint64_t rng_seed) {
    if (n_vertices < 1) {
        throw Error(ErrorKind::InvalidConfig, "random_er_dag needs at least one vertex");
    }
    const double max_edges = static_cast<double>(n_vertices) * (n_vertices - 1) / 2.0;
    if (expected_edges < 0.0 || expected_edges > max_edges) {
        throw Error(ErrorKind::InvalidDensity, "expected edge count exceeds n(n-1)/2");
    }
    RngStream rng(rng_seed);
    std::vector<int> perm(n_vertices);
    for (int i = 0; i < n_vertices; ++i) perm[i] = i;
    for (int i = n_vertices - 1; i > 0; --i) {
        const auto j = static_cast<int>(rng.next_index(static_cast<std::size_t>(i) + 1));
        std::swap(perm[i], perm[j]);
    }
    const double p = max_edges > 0.0 ? expected_edges / max_edges : 0.0;
    std::vector<Edge> edges;
    for (int a = 0; a < n_vertices; ++a) {
        for (int b = a + 1; b < n_vertices; ++b) {
            if (rng.next_unit() < p) edges.emplace_back(perm[a], perm[b]);
        }
    }
    std::vector<std::string> names(n_vertices);
    for (int i = 0; i < n_vertices; ++i) names[i] = "x" + std::to_string(i);
    return Dag(std::move(names), std::move(edges));
}

std::vector<int> markov_boundary(const Dag& g, int target) {
    if (target < 0 || target >= g.n_vertices()) {
        throw Error(ErrorKind::UnknownVertex, "markov_boundary: vertex index out of range");
    }
    std::set<int> boundary(g.parents(target).begin(), g.parents(target).end());
    for (int child : g.children(target)) {
        boundary.insert(child);
        for (int spouse : g.parents(child)) boundary.insert(spouse);
    }
    boundary.erase(target);
    return {boundary.begin(), boundary.end()};
}

std::vector<int> markov_boundary(const Dag& g, const std::string& target) {
    return markov_boundary(g, g.index_of(target));
}

namespace {

enum class PairStatus : std::uint8_t { None, Undirected, Forward, Backward };

PairStatus pair_status(const Cpdag& g, int a, int b) {
    if (g.has_undirected(a, b)) return PairStatus::Undirected;
    if (g.has_directed(a, b)) return PairStatus::Forward;
    if (g.has_directed(b, a)) return PairStatus::Backward;
    return PairStatus::None;
}

}  // namespace

int shd(const Cpdag& a, const Cpdag& b) {
    if (a.vertices() != b.vertices()) {
        throw Error(ErrorKind::VertexMismatch, "shd: graphs have different vertex sets");
    }
    int distance = 0;
    const int n = a.n_vertices();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (pair_status(a, i, j) != pair_status(b, i, j)) ++distance;
        }
    }
    return distance;
}

namespace {

// Mutable orientation state shared by dag_to_cpdag and meek_closure.
struct PartialGraph {
    int n = 0;
    std::vector<std::vector<bool>> directed;    // directed[a][b]: a -> b
    std::vector<std::vector<bool>> undirected;  // symmetric

    explicit PartialGraph(int n_vertices)
        : n(n_vertices),
          directed(n_vertices, std::vector<bool>(n_vertices, false)),
          undirected(n_vertices, std::vector<bool>(n_vertices, false)) {}

    bool adjacent(int a, int b) const {
        return directed[a][b] || directed[b][a] || undirected[a][b];
    }

    void orient(int a, int b) {  // a - b becomes a -> b
        undirected[a][b] = undirected[b][a] = false;
        directed[a][b] = true;
    }
};

PartialGraph to_partial(const Cpdag& g) {
    PartialGraph pg(g.n_vertices());
    for (const auto& [p, c] : g.directed_edges()) pg.directed[p][c] = true;
    for (const auto& [a, b] : g.undirected_edges()) pg.undirected[a][b] = pg.undirected[b][a] = true;
    return pg;
}

Cpdag to_cpdag(const PartialGraph& pg, const std::vector<std::string>& names) {
    std::vector<Edge> directed;
    std::vector<Edge> undirected;
    for (int a = 0; a < pg.n; ++a) {
        for (int b = 0; b < pg.n; ++b) {
            if (pg.directed[a][b]) directed.emplace_back(a, b);
            if (a < b && pg.undirected[a][b]) undirected.emplace_back(a, b);
        }
    }
    return Cpdag(names, std::move(directed), std::move(undirected));
}

// Meek rules R1-R3 to fixpoint. R4 only fires under background knowledge,
// which this pipeline never supplies.
void apply_meek_rules(PartialGraph& g) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (int a = 0; a < g.n; ++a) {
            for (int b = 0; b < g.n; ++b) {
                if (!g.undirected[a][b]) continue;
                // R1: c -> a, a - b, c and b nonadjacent => a -> b
                bool oriented = false;
                for (int c = 0; c < g.n && !oriented; ++c) {
                    if (g.directed[c][a] && !g.adjacent(c, b)) {
                        g.orient(a, b);
                        changed = oriented = true;
                    }
                }
                if (oriented) continue;
                // R2: a -> c -> b and a - b => a -> b
                for (int c = 0; c < g.n && !oriented; ++c) {
                    if (g.directed[a][c] && g.directed[c][b]) {
                        g.orient(a, b);
                        changed = oriented = true;
                    }
                }
                if (oriented) continue;
                // R3: a - c -> b, a - d -> b, c and d nonadjacent, a - b => a -> b
                for (int c = 0; c < g.n && !oriented; ++c) {
                    if (!(g.undirected[a][c] && g.directed[c][b])) continue;
                    for (int d = c + 1; d < g.n && !oriented; ++d) {
                        if (!(g.undirected[a][d] && g.directed[d][b])) continue;
                        if (!g.adjacent(c, d)) {
                            g.orient(a, b);
                            changed = oriented = true;
                        }
                    }
                }
            }
        }
    }
}

}  // namespace

Cpdag dag_to_cpdag(const Dag& g) {
    const int n = g.n_vertices();
    PartialGraph pg(n);
    for (const auto& [p, c] : g.edges()) pg.undirected[p][c] = pg.undirected[c][p] = true;
    // v-structures are the orientation seed
    for (int child = 0; child < n; ++child) {
        const auto& parents = g.parents(child);
        for (std::size_t i = 0; i < parents.size(); ++i) {
            for (std::size_t j = i + 1; j < parents.size(); ++j) {
                if (!g.adjacent(parents[i], parents[j])) {
                    pg.orient(parents[i], child);
                    pg.orient(parents[j], child);
                }
            }
        }
    }
    apply_meek_rules(pg);
    return to_cpdag(pg, g.vertices());
}

Cpdag meek_closure(const Cpdag& g) {
    PartialGraph pg = to_partial(g);
    apply_meek_rules(pg);
    return to_cpdag(pg, g.vertices());
}

Cpdag cpdag_from_dag_edges(const Dag& g) {
    return Cpdag(g.vertices(), g.edges(), {});
}

bool d_separated(const Dag& g, int x, int y, const std::vector<int>& conditioning) {
    const int n = g.n_vertices();
    if (x < 0 || x >= n || y < 0 || y >= n) {
        throw Error(ErrorKind::UnknownVertex, "d_separated: vertex index out of range");
    }
    if (x == y) return false;
    std::vector<bool> in_z(n, false);
    for (int s : conditioning) {
        if (s < 0 || s >= n) {
            throw Error(ErrorKind::UnknownVertex, "d_separated: conditioning vertex out of range");
        }
        in_z[s] = true;
    }
    if (in_z[x] || in_z[y]) {
        throw Error(ErrorKind::PreconditionViolated, "d_separated: endpoint inside conditioning set");
    }

    // Ancestral set of {x, y} + Z.
    std::vector<bool> keep(n, false);
    std::vector<int> stack{x, y};
    for (int s : conditioning) stack.push_back(s);
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        if (keep[v]) continue;
        keep[v] = true;
        for (int p : g.parents(v)) stack.push_back(p);
    }

    // Moralize the induced subgraph: keep edges, marry co-parents.
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    for (const auto& [p, c] : g.edges()) {
        if (keep[p] && keep[c]) adj[p][c] = adj[c][p] = true;
    }
    for (int child = 0; child < n; ++child) {
        if (!keep[child]) continue;
        const auto& parents = g.parents(child);
        for (std::size_t i = 0; i < parents.size(); ++i) {
            for (std::size_t j = i + 1; j < parents.size(); ++j) {
                if (keep[parents[i]] && keep[parents[j]]) {
                    adj[parents[i]][parents[j]] = adj[parents[j]][parents[i]] = true;
                }
            }
        }
    }

    // Reachability from x to y avoiding Z.
    std::vector<bool> visited(n, false);
    stack.assign(1, x);
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        if (visited[v] || in_z[v]) continue;
        visited[v] = true;
        if (v == y) return false;
        for (int w = 0; w < n; ++w) {
            if (adj[v][w] && keep[w] && !visited[w]) stack.push_back(w);
        }
    }
    return true;
}

std::vector<DSeparation> enumerate_d_separations(const Dag& g, int max_cond_size) {
    const int n = g.n_vertices();
    std::vector<DSeparation> found;
    std::vector<int> others;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            others.clear();
            for (int v = 0; v < n; ++v) {
                if (v != i && v != j) others.push_back(v);
            }
            const int m = static_cast<int>(others.size());
            for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
                if (static_cast<int>(__builtin_popcount(mask)) > max_cond_size) continue;
                std::vector<int> cond;
                for (int k = 0; k < m; ++k) {
                    if (mask & (1u << k)) cond.push_back(others[k]);
                }
                if (d_separated(g, i, j, cond)) found.push_back({i, j, std::move(cond)});
            }
        }
    }
    return found;
}

}  // namespace crb
