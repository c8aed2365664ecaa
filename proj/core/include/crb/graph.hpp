#ifndef CRB_GRAPH_HPP
#define CRB_GRAPH_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace crb {

using Edge = std::pair<int, int>;  // (parent index, child index)

struct TopologicalOrder {
    std::vector<int> order;  // order[k] = vertex index at position k

    // positions()[v] = position of vertex v.
    std::vector<int> positions() const;
};

// Immutable directed acyclic graph over named variables. Construction
// validates name uniqueness, absence of self-loops and duplicate edges, and
// acyclicity; afterwards instances are safe to share across threads.
class Dag {
public:
    Dag() = default;
    Dag(std::vector<std::string> vertices, std::vector<Edge> edges);

    int n_vertices() const { return static_cast<int>(vertices_.size()); }
    const std::vector<std::string>& vertices() const { return vertices_; }
    const std::vector<Edge>& edges() const { return edges_; }

    const std::string& name(int v) const { return vertices_.at(v); }
    // Throws UnknownVertex when absent.
    int index_of(const std::string& name) const;

    const std::vector<int>& parents(int v) const { return parents_.at(v); }
    const std::vector<int>& children(int v) const { return children_.at(v); }
    bool has_edge(int parent, int child) const;
    bool adjacent(int a, int b) const { return has_edge(a, b) || has_edge(b, a); }

private:
    std::vector<std::string> vertices_;
    std::vector<Edge> edges_;  // sorted lexicographically, unique
    std::vector<std::vector<int>> parents_;
    std::vector<std::vector<int>> children_;
};

// Partially directed graph representing a Markov equivalence class. The
// directed and undirected edge sets are disjoint on skeletons; undirected
// pairs are stored with the smaller index first.
class Cpdag {
public:
    Cpdag() = default;
    Cpdag(std::vector<std::string> vertices, std::vector<Edge> directed,
          std::vector<Edge> undirected);

    int n_vertices() const { return static_cast<int>(vertices_.size()); }
    const std::vector<std::string>& vertices() const { return vertices_; }
    const std::vector<Edge>& directed_edges() const { return directed_; }
    const std::vector<Edge>& undirected_edges() const { return undirected_; }

    bool has_directed(int from, int to) const;
    bool has_undirected(int a, int b) const;
    bool adjacent(int a, int b) const;

    bool operator==(const Cpdag& other) const = default;

private:
    std::vector<std::string> vertices_;
    std::vector<Edge> directed_;    // sorted, unique
    std::vector<Edge> undirected_;  // normalized (a < b), sorted, unique
};

// Deterministic Kahn sort; ties broken by ascending vertex index. Throws
// CycleDetected on cyclic edge sets (reachable only through raw edge lists,
// since Dag construction already rejects cycles).
TopologicalOrder topological_sort(const Dag& g);
TopologicalOrder topological_sort(int n_vertices, const std::vector<Edge>& edges);

// Erdos-Renyi DAG: a uniform vertex permutation is drawn first and each of
// the n(n-1)/2 permutation-forward pairs is kept independently with
// probability expected_edges / (n(n-1)/2), so the result is acyclic by
// construction and the expected edge count is exact.
Dag random_er_dag(int n_vertices, double expected_edges, std::uint64_t rng_seed);

// Pa(target) + Ch(target) + Pa(Ch(target)) \ {target}, sorted.
std::vector<int> markov_boundary(const Dag& g, int target);
std::vector<int> markov_boundary(const Dag& g, const std::string& target);

// Number of vertex pairs whose edge status (none / undirected / direction)
// differs; any mismatch, including orientation-only, costs exactly 1.
int shd(const Cpdag& a, const Cpdag& b);

// Skeleton with v-structure edges directed and Meek rules applied to
// closure; idempotent under re-completion.
Cpdag dag_to_cpdag(const Dag& g);

// Re-applies the orientation closure rules to an existing partial graph.
Cpdag meek_closure(const Cpdag& g);

Cpdag cpdag_from_dag_edges(const Dag& g);  // every edge kept directed

// Moralization-and-reachability d-separation test: true when x and y are
// separated given the conditioning set. Exposed for test support and the
// conditional-independence enforcement checks.
bool d_separated(const Dag& g, int x, int y, const std::vector<int>& conditioning);

// All d-separation statements (i, j | S) with |S| <= max_cond_size, i < j.
struct DSeparation {
    int i;
    int j;
    std::vector<int> conditioning;
};
std::vector<DSeparation> enumerate_d_separations(const Dag& g, int max_cond_size);

}  // namespace crb

#endif
