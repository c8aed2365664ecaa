#include "crb/gaussian.hpp"

#include <algorithm>
#include <cmath>

#include "crb/errors.hpp"
#include "crb/parallel.hpp"
#include "crb/rng.hpp"

namespace crb {

Eigen::Index GaussianFit::name_index(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return static_cast<Eigen::Index>(i);
    }
    throw Error(ErrorKind::MissingColumn, "fit has no variable '" + name + "'");
}

Eigen::MatrixXd GaussianFit::covariance_in(const std::vector<std::string>& order) const {
    const auto d = static_cast<Eigen::Index>(order.size());
    Eigen::MatrixXd out(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            out(i, j) = covariance(name_index(order[static_cast<std::size_t>(i)]),
                                   name_index(order[static_cast<std::size_t>(j)]));
        }
    }
    return out;
}

UduFactors udu_decompose(const Eigen::MatrixXd& omega) {
    const Eigen::Index d = omega.rows();
    if (omega.cols() != d) {
        throw Error(ErrorKind::InvalidConfig, "udu_decompose needs a square matrix");
    }
    if (!omega.isApprox(omega.transpose(), 1e-10)) {
        throw Error(ErrorKind::InvalidConfig, "udu_decompose needs a symmetric matrix");
    }
    UduFactors f;
    f.u = Eigen::MatrixXd::Identity(d, d);
    f.d = Eigen::VectorXd::Zero(d);
    for (Eigen::Index i = d - 1; i >= 0; --i) {
        double pivot = omega(i, i);
        for (Eigen::Index k = i + 1; k < d; ++k) pivot -= f.u(i, k) * f.u(i, k) * f.d(k);
        if (!(pivot > 0.0)) {
            throw Error(ErrorKind::NotPositiveDefinite,
                        "pivot " + std::to_string(i) + " is not positive");
        }
        f.d(i) = pivot;
        for (Eigen::Index j = 0; j < i; ++j) {
            double acc = omega(j, i);
            for (Eigen::Index k = i + 1; k < d; ++k) acc -= f.u(j, k) * f.u(i, k) * f.d(k);
            f.u(j, i) = acc / pivot;
        }
    }
    return f;
}

namespace {

void check_spd(const Eigen::MatrixXd& sigma, const std::vector<std::string>& names) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(sigma);
    const double largest = eigen.eigenvalues().maxCoeff();
    const double smallest = eigen.eigenvalues().minCoeff();
    if (!(largest > 0.0) || smallest <= 1e-10 * largest) {
        std::string detail;
        for (Eigen::Index c = 0; c < sigma.rows(); ++c) {
            if (sigma(c, c) <= 1e-10 * largest) {
                detail += detail.empty() ? " degenerate column(s):" : ",";
                detail += " '" + names[static_cast<std::size_t>(c)] + "'";
            }
        }
        throw Error(ErrorKind::NotPositiveDefinite,
                    "covariance is not positive definite (eigenvalue range [" +
                        std::to_string(smallest) + ", " + std::to_string(largest) + "])" +
                        detail);
    }
}

}  // namespace

GaussianFit fit_unconstrained(const Dataset& data, CovDivisor divisor) {
    const Eigen::Index n = data.n_rows();
    const Eigen::Index d = data.n_cols();
    if (n < d + 1) {
        throw Error(ErrorKind::InsufficientData,
                    "need at least d + 1 rows for an unconstrained fit");
    }
    GaussianFit fit;
    fit.names = data.columns;
    fit.provenance = GaussianFit::Provenance::Unconstrained;
    fit.mean = data.values.colwise().mean();
    const Eigen::MatrixXd centered = data.values.rowwise() - fit.mean.transpose();
    const double denom =
        divisor == CovDivisor::MaximumLikelihood ? static_cast<double>(n)
                                                 : static_cast<double>(n - 1);
    fit.covariance = centered.transpose() * centered / denom;
    fit.covariance = ((fit.covariance + fit.covariance.transpose()) / 2.0).eval();
    check_spd(fit.covariance, fit.names);
    fit.precision = Eigen::LLT<Eigen::MatrixXd>(fit.covariance)
                        .solve(Eigen::MatrixXd::Identity(d, d));
    fit.precision = ((fit.precision + fit.precision.transpose()) / 2.0).eval();
    const UduFactors factors = udu_decompose(fit.precision);
    fit.factor_u = factors.u;
    fit.factor_d = factors.d;
    return fit;
}

GaussianFit fit_constrained(const Dataset& data, const Dag& g, CovDivisor divisor) {
    const Eigen::Index n = data.n_rows();
    const int d = g.n_vertices();
    const TopologicalOrder topo = topological_sort(g);
    const std::vector<int> position = topo.positions();

    GaussianFit fit;
    fit.provenance = GaussianFit::Provenance::DagConstrained;
    fit.graph = g;
    fit.names.reserve(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) fit.names.push_back(g.name(topo.order[static_cast<std::size_t>(k)]));

    fit.mean.resize(d);
    Eigen::MatrixXd strict_lower = Eigen::MatrixXd::Zero(d, d);  // coefficients in topo order
    Eigen::VectorXd noise_var(d);
    const double denom =
        divisor == CovDivisor::MaximumLikelihood ? static_cast<double>(n)
                                                 : static_cast<double>(n - 1);

    for (int v = 0; v < d; ++v) {
        const Eigen::VectorXd target = data.column(g.name(v));
        const auto pos_v = static_cast<Eigen::Index>(position[static_cast<std::size_t>(v)]);
        fit.mean(pos_v) = target.mean();
        const auto& parents = g.parents(v);
        const auto p = static_cast<Eigen::Index>(parents.size());
        if (n < p + 2) {
            throw Error(ErrorKind::InsufficientData,
                        "vertex '" + g.name(v) + "' needs at least " + std::to_string(p + 2) +
                            " rows");
        }
        Eigen::VectorXd resid;
        if (parents.empty()) {
            resid = target.array() - target.mean();
        } else {
            Eigen::MatrixXd design(n, p + 1);
            design.col(0).setOnes();
            for (Eigen::Index i = 0; i < p; ++i) {
                design.col(i + 1) = data.column(g.name(parents[static_cast<std::size_t>(i)]));
            }
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
            qr.setThreshold(1e-10);
            if (qr.rank() < p + 1) {
                throw Error(ErrorKind::RankDeficient,
                            "vertex '" + g.name(v) + "': parent design is rank deficient");
            }
            const Eigen::VectorXd coef = qr.solve(target);
            for (Eigen::Index i = 0; i < p; ++i) {
                const int parent = parents[static_cast<std::size_t>(i)];
                strict_lower(pos_v, position[static_cast<std::size_t>(parent)]) = coef(i + 1);
            }
            resid = target - design * coef;
        }
        const double variance = resid.squaredNorm() / denom;
        if (variance <= 1e-12) {
            throw Error(ErrorKind::ZeroResidualVariance,
                        "vertex '" + g.name(v) + "' has (near-)zero residual variance");
        }
        noise_var(pos_v) = variance;
    }

    // Omega = (I - B)' D^-1 (I - B); U = (I - B)' is unit upper-triangular in
    // topological order, the non-edge zeros are exact by construction.
    const Eigen::MatrixXd i_minus_b = Eigen::MatrixXd::Identity(d, d) - strict_lower;
    fit.factor_u = i_minus_b.transpose();
    fit.factor_d = noise_var.cwiseInverse();
    fit.precision = fit.factor_u * fit.factor_d.asDiagonal() * fit.factor_u.transpose();
    fit.precision = ((fit.precision + fit.precision.transpose()) / 2.0).eval();

    // Sigma = (I - B)^-1 D (I - B)^-T through triangular solves.
    const auto lower_view = i_minus_b.triangularView<Eigen::Lower>();
    Eigen::MatrixXd half = lower_view.solve(Eigen::MatrixXd::Identity(d, d));
    fit.covariance = half * noise_var.asDiagonal() * half.transpose();
    fit.covariance = ((fit.covariance + fit.covariance.transpose()) / 2.0).eval();
    return fit;
}

BetaModel regression_coefficients(const GaussianFit& fit, const std::string& target,
                                  const std::vector<std::string>& features) {
    if (features.empty()) {
        throw Error(ErrorKind::InvalidConfig, "feature set must be nonempty");
    }
    for (const auto& f : features) {
        if (f == target) {
            throw Error(ErrorKind::InvalidConfig, "target cannot appear among the features");
        }
    }
    const auto p = static_cast<Eigen::Index>(features.size());
    const Eigen::Index ty = fit.name_index(target);
    Eigen::MatrixXd sigma_xx(p, p);
    Eigen::VectorXd sigma_xy(p);
    Eigen::VectorXd mean_x(p);
    for (Eigen::Index i = 0; i < p; ++i) {
        const Eigen::Index fi = fit.name_index(features[static_cast<std::size_t>(i)]);
        sigma_xy(i) = fit.covariance(fi, ty);
        mean_x(i) = fit.mean(fi);
        for (Eigen::Index j = 0; j < p; ++j) {
            sigma_xx(i, j) =
                fit.covariance(fi, fit.name_index(features[static_cast<std::size_t>(j)]));
        }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(sigma_xx);
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorKind::SingularFeatureBlock, "feature covariance block is singular");
    }
    BetaModel model;
    model.target = target;
    model.features = features;
    model.beta = llt.solve(sigma_xy);
    model.intercept = fit.mean(ty) - model.beta.dot(mean_x);
    model.noise_variance = fit.covariance(ty, ty) - model.beta.dot(sigma_xy);
    return model;
}

double prediction_mse(const BetaModel& model, const Dataset& test) {
    const Eigen::VectorXd y = test.column(model.target);
    const Eigen::MatrixXd x = test.select(model.features);
    const Eigen::VectorXd fitted =
        (x * model.beta).array() + model.intercept;
    return (y - fitted).squaredNorm() / static_cast<double>(test.n_rows());
}

BetaModel mb_regression(const Dataset& data, const Dag& g, const std::string& target) {
    const int t = g.index_of(target);
    const std::vector<int> boundary = markov_boundary(g, t);
    if (boundary.empty()) {
        BetaModel model;
        model.target = target;
        model.intercept = data.column(target).mean();
        model.noise_variance = sample_variance(data.column(target));
        return model;
    }
    const Eigen::Index n = data.n_rows();
    const auto p = static_cast<Eigen::Index>(boundary.size());
    Eigen::MatrixXd design(n, p + 1);
    design.col(0).setOnes();
    BetaModel model;
    model.target = target;
    for (Eigen::Index i = 0; i < p; ++i) {
        model.features.push_back(g.name(boundary[static_cast<std::size_t>(i)]));
        design.col(i + 1) = data.column(model.features.back());
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < p + 1) {
        throw Error(ErrorKind::RankDeficient, "boundary design is rank deficient");
    }
    const Eigen::VectorXd coef = qr.solve(data.column(target));
    model.intercept = coef(0);
    model.beta = coef.tail(p);
    const Eigen::VectorXd resid = data.column(target) - design * coef;
    model.noise_variance = resid.squaredNorm() / static_cast<double>(n);
    return model;
}

MseGapResult run_mse_gap_experiment(const LinearScm& scm, const std::string& target,
                                    const std::vector<std::string>& features,
                                    const std::vector<int>& sizes, int replicates,
                                    int test_size, std::uint64_t rng_seed, int threads) {
    if (replicates < 2) {
        throw Error(ErrorKind::InvalidConfig, "need at least 2 replicates");
    }
    const int d = scm.dag().n_vertices();
    for (int n : sizes) {
        if (n < d + 2) {
            throw Error(ErrorKind::InvalidConfig,
                        "every size must be at least d + 2 = " + std::to_string(d + 2));
        }
    }

    struct Cell {
        double mse_full = 0.0;
        double mse_dag = 0.0;
        bool ok = false;
    };
    const std::size_t n_sizes = sizes.size();
    std::vector<Cell> cells(n_sizes * static_cast<std::size_t>(replicates));

    parallel_for(cells.size(), threads, [&](std::size_t cell_index) {
        const std::size_t size_index = cell_index / static_cast<std::size_t>(replicates);
        const int n = sizes[size_index];
        const std::uint64_t train_seed = derive_seed(rng_seed, 1, cell_index);
        const std::uint64_t test_seed = derive_seed(rng_seed, 2, cell_index);
        try {
            const Dataset train = sample(scm, n, train_seed);
            const Dataset test = sample(scm, test_size, test_seed);
            const BetaModel full =
                regression_coefficients(fit_unconstrained(train), target, features);
            const BetaModel dag =
                regression_coefficients(fit_constrained(train, scm.dag()), target, features);
            auto& cell = cells[cell_index];
            cell.mse_full = prediction_mse(full, test);
            cell.mse_dag = prediction_mse(dag, test);
            cell.ok = true;
        } catch (const Error&) {
            // degenerate replicate (e.g. rank-deficient draw): skip, keep count
        }
    });

    MseGapResult result;
    result.sizes = sizes;
    for (std::size_t s = 0; s < n_sizes; ++s) {
        double sum_full = 0.0;
        double sum_dag = 0.0;
        double sum_gap = 0.0;
        double sum_gap_sq = 0.0;
        int used = 0;
        for (int r = 0; r < replicates; ++r) {
            const auto& cell = cells[s * static_cast<std::size_t>(replicates) +
                                     static_cast<std::size_t>(r)];
            if (!cell.ok) continue;
            ++used;
            sum_full += cell.mse_full;
            sum_dag += cell.mse_dag;
            const double gap = cell.mse_full - cell.mse_dag;
            sum_gap += gap;
            sum_gap_sq += gap * gap;
        }
        if (used < 2) {
            throw Error(ErrorKind::InsufficientData,
                        "fewer than 2 completed replicates at size " + std::to_string(sizes[s]));
        }
        const double mean_gap = sum_gap / used;
        const double var_gap = (sum_gap_sq - used * mean_gap * mean_gap) / (used - 1);
        result.mse_full.push_back(sum_full / used);
        result.mse_dag.push_back(sum_dag / used);
        result.gap.push_back(mean_gap);
        result.ci_half_width.push_back(1.96 * std::sqrt(std::max(var_gap, 0.0) / used));
        result.replicates_used.push_back(used);
    }

    // log(gap) = log(C) - slope * log(N) over sizes with positive mean gap
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int m = 0;
    for (std::size_t s = 0; s < n_sizes; ++s) {
        if (result.gap[s] <= 0.0) continue;
        const double lx = std::log(static_cast<double>(sizes[s]));
        const double ly = std::log(result.gap[s]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++m;
    }
    if (m == 0) {
        throw Error(ErrorKind::AllGapsNonpositive, "no size produced a positive mean gap");
    }
    if (m == 1) {
        result.slope = 1.0;  // single usable point: assume the theoretical decay
        result.c_constant = std::exp(sy + sx);
    } else {
        const double slope = -(m * sxy - sx * sy) / (m * sxx - sx * sx);
        const double log_c = (sy + slope * sx) / m;
        result.slope = slope;
        result.c_constant = std::exp(log_c);
    }
    return result;
}

MbIrrelevanceReport markov_boundary_irrelevance_check(
    const Dag& g_base, const Dag& g_extra, const LinearScm& scm, const std::string& target,
    const std::vector<int>& sizes, int replicates, std::uint64_t rng_seed) {
    if (g_base.vertices() != g_extra.vertices()) {
        throw Error(ErrorKind::PreconditionViolated, "graphs have different vertex sets");
    }
    const int t = g_base.index_of(target);
    const std::vector<int> mb_base = markov_boundary(g_base, t);
    const std::vector<int> mb_extra = markov_boundary(g_extra, t);
    if (mb_base != mb_extra) {
        throw Error(ErrorKind::PreconditionViolated,
                    "graphs disagree on the Markov boundary of '" + target + "'");
    }
    std::vector<bool> protected_vertex(static_cast<std::size_t>(g_base.n_vertices()), false);
    protected_vertex[static_cast<std::size_t>(t)] = true;
    for (int v : mb_base) protected_vertex[static_cast<std::size_t>(v)] = true;
    auto incident_edges = [&](const Dag& g) {
        std::vector<Edge> edges;
        for (const auto& e : g.edges()) {
            if (protected_vertex[static_cast<std::size_t>(e.first)] ||
                protected_vertex[static_cast<std::size_t>(e.second)]) {
                edges.push_back(e);
            }
        }
        return edges;
    };
    if (incident_edges(g_base) != incident_edges(g_extra)) {
        throw Error(ErrorKind::PreconditionViolated,
                    "graphs differ on edges incident to the Markov boundary");
    }

    MbIrrelevanceReport report;
    report.sizes = sizes;
    report.replicates = replicates;
    report.identical = true;
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        for (int r = 0; r < replicates; ++r) {
            const std::uint64_t train_seed = derive_seed(rng_seed, 11, s, static_cast<std::uint64_t>(r));
            const std::uint64_t test_seed = derive_seed(rng_seed, 12, s, static_cast<std::uint64_t>(r));
            const Dataset train = sample(scm, sizes[s], train_seed);
            const Dataset test = sample(scm, 1000, test_seed);
            const BetaModel base = mb_regression(train, g_base, target);
            const BetaModel extra = mb_regression(train, g_extra, target);
            if (base.features != extra.features) report.identical = false;
            if (base.beta.size() != extra.beta.size()) {
                report.identical = false;
            } else {
                for (Eigen::Index i = 0; i < base.beta.size(); ++i) {
                    if (base.beta(i) != extra.beta(i)) report.identical = false;
                    report.max_coefficient_delta = std::max(
                        report.max_coefficient_delta, std::abs(base.beta(i) - extra.beta(i)));
                }
                if (base.intercept != extra.intercept) report.identical = false;
            }
            const double mse_base = prediction_mse(base, test);
            const double mse_extra = prediction_mse(extra, test);
            report.max_mse_delta =
                std::max(report.max_mse_delta, std::abs(mse_base - mse_extra));
            if (mse_base != mse_extra) report.identical = false;
        }
    }
    return report;
}

}  // namespace crb
