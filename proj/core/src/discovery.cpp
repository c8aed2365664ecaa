#include "crb/discovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>

#include "crb/errors.hpp"
#include "crb/parallel.hpp"
#include "crb/rng.hpp"

namespace crb {

void CiTestConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error(ErrorKind::InvalidConfig, "significance level must lie in (0, 1)");
    }
}

namespace {

Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& values) {
    const Eigen::Index n = values.rows();
    const Eigen::RowVectorXd mean = values.colwise().mean();
    Eigen::MatrixXd centered = values.rowwise() - mean;
    Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n);
    Eigen::VectorXd sd = cov.diagonal().cwiseSqrt();
    for (Eigen::Index i = 0; i < sd.size(); ++i) {
        if (!(sd(i) > 0.0)) {
            throw Error(ErrorKind::InsufficientVariation,
                        "column " + std::to_string(i) + " is constant");
        }
    }
    return sd.cwiseInverse().asDiagonal() * cov * sd.cwiseInverse().asDiagonal();
}

// Partial correlation from the inverse of the correlation submatrix over
// {i, j} + S.
double partial_correlation(const Eigen::MatrixXd& corr, int i, int j,
                           const std::vector<int>& cond) {
    const auto k = static_cast<Eigen::Index>(cond.size()) + 2;
    Eigen::MatrixXd sub(k, k);
    std::vector<int> idx{i, j};
    idx.insert(idx.end(), cond.begin(), cond.end());
    for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = 0; b < k; ++b) {
            sub(a, b) = corr(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
        }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
    if (!lu.isInvertible()) {
        throw Error(ErrorKind::DegenerateCorrelation,
                    "correlation submatrix is singular (duplicated columns?)");
    }
    const Eigen::MatrixXd inv = lu.inverse();
    return -inv(0, 1) / std::sqrt(inv(0, 0) * inv(1, 1));
}

CiTestResult fisher_z_test(const Eigen::MatrixXd& corr, Eigen::Index n, int i, int j,
                           const std::vector<int>& cond, const CiTestConfig& cfg) {
    if (n <= static_cast<Eigen::Index>(cond.size()) + 3) {
        throw Error(ErrorKind::InsufficientSamples,
                    "need more than |S| + 3 rows for the partial correlation test");
    }
    double rho = partial_correlation(corr, i, j, cond);
    if (std::abs(rho) >= 1.0 - 1e-10) {
        throw Error(ErrorKind::DegenerateCorrelation, "partial correlation rounds to +-1");
    }
    rho = std::clamp(rho, -1.0 + 1e-15, 1.0 - 1e-15);
    const double z = std::atanh(rho) *
                     std::sqrt(static_cast<double>(n) - static_cast<double>(cond.size()) - 3.0);
    CiTestResult result;
    result.statistic = z;
    result.p_value = std::erfc(std::abs(z) / std::sqrt(2.0));
    result.independent = result.p_value > cfg.alpha;
    return result;
}

}  // namespace

CiTestResult partial_correlation_test(const Dataset& data, const std::string& i,
                                      const std::string& j,
                                      const std::vector<std::string>& conditioning,
                                      const CiTestConfig& cfg) {
    cfg.validate();
    std::vector<std::string> names{i, j};
    names.insert(names.end(), conditioning.begin(), conditioning.end());
    const Eigen::MatrixXd sub = data.select(names);
    const Eigen::MatrixXd corr = correlation_matrix(sub);
    std::vector<int> cond(conditioning.size());
    for (std::size_t s = 0; s < conditioning.size(); ++s) cond[s] = static_cast<int>(s) + 2;
    return fisher_z_test(corr, data.n_rows(), 0, 1, cond, cfg);
}

namespace {

// Subsets of `pool` of the given size, lexicographic.
bool next_combination(std::vector<int>& pick, int pool_size) {
    const int k = static_cast<int>(pick.size());
    for (int i = k - 1; i >= 0; --i) {
        if (pick[i] < pool_size - (k - i)) {
            ++pick[i];
            for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
            return true;
        }
    }
    return false;
}

}  // namespace

Cpdag pc(const Dataset& data, const CiTestConfig& cfg) {
    cfg.validate();
    const int d = static_cast<int>(data.n_cols());
    const Eigen::MatrixXd corr = correlation_matrix(data.values);
    const Eigen::Index n = data.n_rows();

    std::vector<std::vector<bool>> adjacent(d, std::vector<bool>(d, false));
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) adjacent[i][j] = i != j;
    }
    std::map<std::pair<int, int>, std::vector<int>> sepsets;
    const int max_level = cfg.max_cond_size >= 0 ? cfg.max_cond_size : std::max(0, d - 2);

    for (int level = 0; level <= max_level; ++level) {
        const auto frozen = adjacent;  // stable variant: neighborhoods per level
        std::vector<std::pair<int, int>> removals;
        bool any_candidate = false;
        for (int i = 0; i < d; ++i) {
            for (int j = i + 1; j < d; ++j) {
                if (!frozen[i][j]) continue;
                bool separated = false;
                std::vector<int> sepset;
                for (const int anchor : {i, j}) {
                    const int other = anchor == i ? j : i;
                    std::vector<int> pool;
                    for (int v = 0; v < d; ++v) {
                        if (v != other && frozen[anchor][v]) pool.push_back(v);
                    }
                    if (static_cast<int>(pool.size()) < level) continue;
                    any_candidate = true;
                    std::vector<int> pick(level);
                    for (int s = 0; s < level; ++s) pick[s] = s;
                    bool more = true;
                    while (more && !separated) {
                        std::vector<int> cond;
                        for (int s : pick) cond.push_back(pool[static_cast<std::size_t>(s)]);
                        const CiTestResult test = fisher_z_test(corr, n, i, j, cond, cfg);
                        if (test.independent) {
                            separated = true;
                            sepset = cond;
                        }
                        more = level > 0 && next_combination(pick, static_cast<int>(pool.size()));
                        if (level == 0) more = false;
                    }
                    if (separated) break;
                }
                if (separated) {
                    removals.emplace_back(i, j);
                    sepsets[{i, j}] = sepset;
                }
            }
        }
        for (const auto& [i, j] : removals) adjacent[i][j] = adjacent[j][i] = false;
        if (!any_candidate) break;
    }

    // V-structures from the separating sets; conflicting demands cancel.
    std::set<std::pair<int, int>> demanded;
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < d; ++i) {
            if (i == j || !adjacent[i][j]) continue;
            for (int k = i + 1; k < d; ++k) {
                if (k == j || !adjacent[k][j] || adjacent[i][k]) continue;
                const auto it = sepsets.find({std::min(i, k), std::max(i, k)});
                if (it == sepsets.end()) continue;
                if (std::find(it->second.begin(), it->second.end(), j) == it->second.end()) {
                    demanded.insert({i, j});
                    demanded.insert({k, j});
                }
            }
        }
    }
    std::vector<Edge> directed;
    std::vector<Edge> undirected;
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            if (!adjacent[i][j]) continue;
            const bool fwd = demanded.count({i, j}) > 0;
            const bool bwd = demanded.count({j, i}) > 0;
            if (fwd && !bwd) {
                directed.emplace_back(i, j);
            } else if (bwd && !fwd) {
                directed.emplace_back(j, i);
            } else {
                undirected.emplace_back(i, j);
            }
        }
    }
    return meek_closure(Cpdag(data.columns, std::move(directed), std::move(undirected)));
}

namespace {

// Maximum-entropy approximation of the differential entropy of a
// standardized variable (log-cosh and gaussian-moment contrast).
double approximate_entropy(const Eigen::VectorXd& u) {
    constexpr double k1 = 79.047;
    constexpr double k2 = 7.4129;
    constexpr double gamma = 0.37457;
    const double n = static_cast<double>(u.size());
    // overflow-safe log cosh: |u| + log1p(exp(-2|u|)) - log 2
    const auto abs_u = u.array().abs();
    const double log_cosh =
        (abs_u + (-2.0 * abs_u).exp().log1p() - std::numbers::ln2).sum() / n;
    const double gauss_moment = (u.array() * (-u.array().square() / 2.0).exp()).sum() / n;
    const double base = (1.0 + std::log(2.0 * std::numbers::pi)) / 2.0;
    return base - k1 * (log_cosh - gamma) * (log_cosh - gamma) - k2 * gauss_moment * gauss_moment;
}

Eigen::VectorXd standardize(const Eigen::VectorXd& x) {
    const double mu = x.mean();
    const double sd = std::sqrt((x.array() - mu).square().sum() / static_cast<double>(x.size()));
    if (!(sd > 1e-12)) {
        throw Error(ErrorKind::InsufficientVariation, "column has (near-)zero variance");
    }
    return (x.array() - mu) / sd;
}

// Residual of a on b (both already centered through standardization).
Eigen::VectorXd regress_out(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const double slope = a.dot(b) / b.dot(b);
    return a - slope * b;
}

}  // namespace

Eigen::MatrixXd lingam_refit(const Dataset& data, const std::vector<int>& order) {
    const int d = static_cast<int>(data.n_cols());
    const Eigen::Index n = data.n_rows();
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(d, d);
    for (int pos = 1; pos < d; ++pos) {
        const int target = order[static_cast<std::size_t>(pos)];
        Eigen::MatrixXd design(n, pos + 1);
        design.col(0).setOnes();
        for (int q = 0; q < pos; ++q) {
            design.col(q + 1) = data.values.col(order[static_cast<std::size_t>(q)]);
        }
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
        qr.setThreshold(1e-10);
        if (qr.rank() < design.cols()) {
            throw Error(ErrorKind::RankDeficient, "predecessor design is rank deficient");
        }
        const Eigen::VectorXd coef = qr.solve(data.values.col(target));
        for (int q = 0; q < pos; ++q) {
            b(target, order[static_cast<std::size_t>(q)]) = coef(q + 1);
        }
    }
    return b;
}

LingamResult direct_lingam(const Dataset& data, double prune_threshold) {
    const int d = static_cast<int>(data.n_cols());
    if (d < 1) throw Error(ErrorKind::InvalidConfig, "empty dataset");
    const Eigen::Index n = data.n_rows();

    Eigen::MatrixXd work = data.values;
    std::vector<int> remaining(d);
    for (int i = 0; i < d; ++i) remaining[i] = i;
    std::vector<int> order;

    while (!remaining.empty()) {
        int best = remaining.front();
        if (remaining.size() > 1) {
            double best_score = -std::numeric_limits<double>::infinity();
            for (const int i : remaining) {
                const Eigen::VectorXd xi = standardize(work.col(i));
                const double h_xi = approximate_entropy(xi);
                double score = 0.0;
                for (const int j : remaining) {
                    if (j == i) continue;
                    const Eigen::VectorXd xj = standardize(work.col(j));
                    // likelihood-ratio contrast for i -> j versus j -> i
                    const Eigen::VectorXd ri = standardize(regress_out(xi, xj));
                    const Eigen::VectorXd rj = standardize(regress_out(xj, xi));
                    const double diff =
                        (approximate_entropy(xj) + approximate_entropy(ri)) -
                        (h_xi + approximate_entropy(rj));
                    score -= std::min(0.0, diff) * std::min(0.0, diff);
                }
                if (score > best_score) {  // ties: lowest index (remaining is sorted)
                    best_score = score;
                    best = i;
                }
            }
        }
        order.push_back(best);
        remaining.erase(std::find(remaining.begin(), remaining.end(), best));
        // regress the chosen variable out of everything still in play
        const Eigen::VectorXd chosen =
            work.col(best).array() - work.col(best).mean();
        const double var = chosen.squaredNorm();
        for (const int j : remaining) {
            const Eigen::VectorXd xj = work.col(j);
            const double mu = xj.mean();
            const double slope = var > 0.0 ? (xj.array() - mu).matrix().dot(chosen) / var : 0.0;
            work.col(j) = xj - slope * chosen;
        }
    }

    LingamResult result;
    result.causal_order = order;
    result.b_matrix = lingam_refit(data, order);
    result.small_sample = n < static_cast<Eigen::Index>(10) * d;

    std::vector<Edge> edges;
    std::vector<int> position(static_cast<std::size_t>(d));
    for (int pos = 0; pos < d; ++pos) position[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] = pos;
    for (int child = 0; child < d; ++child) {
        for (int parent = 0; parent < d; ++parent) {
            if (position[static_cast<std::size_t>(parent)] >=
                position[static_cast<std::size_t>(child)]) {
                continue;
            }
            // threshold 0 means no pruning: every predecessor edge is kept
            if (prune_threshold > 0.0 &&
                std::abs(result.b_matrix(child, parent)) <= prune_threshold) {
                continue;
            }
            edges.emplace_back(parent, child);
        }
    }
    result.graph = Dag(data.columns, std::move(edges));
    return result;
}

DiscoveryAlgorithm discovery_algorithm_from_string(const std::string& name) {
    if (name == "pc") return DiscoveryAlgorithm::Pc;
    if (name == "lingam") return DiscoveryAlgorithm::Lingam;
    throw Error(ErrorKind::InvalidConfig, "unknown discovery algorithm '" + name + "'");
}

std::string to_string(DiscoveryAlgorithm algorithm) {
    return algorithm == DiscoveryAlgorithm::Pc ? "pc" : "lingam";
}

ShdCurve shd_curve(const Dag& truth, const Dataset& base, const Augmenter& augmenter,
                   const std::vector<int>& added_points, const ShdCurveConfig& cfg) {
    if (!std::is_sorted(added_points.begin(), added_points.end())) {
        throw Error(ErrorKind::InvalidConfig, "added point counts must be ascending");
    }
    const Cpdag truth_cpdag = dag_to_cpdag(truth);
    const std::size_t n_counts = added_points.size();
    const auto n_cells = n_counts * static_cast<std::size_t>(cfg.replicates);
    std::vector<double> cell_shd(n_cells, 0.0);
    std::vector<char> cell_ok(n_cells, 0);

    parallel_for(n_cells, cfg.threads, [&](std::size_t cell) {
        const std::size_t count_index = cell / static_cast<std::size_t>(cfg.replicates);
        const int added = added_points[count_index];
        try {
            const Dataset augmented =
                added == 0 ? base : augmenter(base, added, derive_seed(cfg.rng_seed, 21, cell));
            Cpdag estimate;
            if (cfg.algorithm == DiscoveryAlgorithm::Pc) {
                estimate = pc(augmented, cfg.ci);
            } else {
                estimate = dag_to_cpdag(direct_lingam(augmented, cfg.lingam_prune_threshold).graph);
            }
            cell_shd[cell] = static_cast<double>(shd(estimate, truth_cpdag));
            cell_ok[cell] = 1;
        } catch (const Error&) {
            // degenerate cell: skipped, reported through the replicate count
        }
    });

    ShdCurve curve;
    curve.added_points = added_points;
    for (std::size_t c = 0; c < n_counts; ++c) {
        double sum = 0.0;
        double sum_sq = 0.0;
        int used = 0;
        for (int r = 0; r < cfg.replicates; ++r) {
            const std::size_t cell = c * static_cast<std::size_t>(cfg.replicates) +
                                     static_cast<std::size_t>(r);
            if (!cell_ok[cell]) continue;
            ++used;
            sum += cell_shd[cell];
            sum_sq += cell_shd[cell] * cell_shd[cell];
        }
        if (used == 0) {
            throw Error(ErrorKind::InsufficientData,
                        "no replicate completed at added = " +
                            std::to_string(added_points[c]));
        }
        const double mean = sum / used;
        const double var = used > 1 ? std::max(0.0, (sum_sq - used * mean * mean) / (used - 1)) : 0.0;
        curve.mean_shd.push_back(mean);
        curve.std_shd.push_back(std::sqrt(var));
        curve.replicates.push_back(used);
    }
    return curve;
}

}  // namespace crb
