#include "iwaa/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

namespace iwaa {
namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Eigen::MatrixXd squared_distances(const FeatureMatrix& X) {
    const Eigen::VectorXd sq = X.rowwise().squaredNorm();
    Eigen::MatrixXd D = sq.replicate(1, X.rows()) + sq.transpose().replicate(X.rows(), 1) -
                        2.0 * X * X.transpose();
    return D.cwiseMax(0.0);
}

size_t count_distinct_rows(const FeatureMatrix& X) {
    std::set<std::vector<double>> rows;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        std::vector<double> r(X.cols());
        for (Eigen::Index j = 0; j < X.cols(); ++j) r[j] = X(i, j);
        rows.insert(std::move(r));
    }
    return rows.size();
}

int relabel_consecutive(std::vector<int>& labels) {
    // labels become 0..c-1 in first-appearance order
    std::map<int, int> remap;
    for (auto& l : labels) {
        auto [it, _] = remap.emplace(l, static_cast<int>(remap.size()));
        l = it->second;
    }
    return static_cast<int>(remap.size());
}

}  // namespace

KMeansResult kmeans(const FeatureMatrix& X, int k, uint64_t seed, int restarts,
                    int max_iter) {
    const Eigen::Index n = X.rows();
    if (k < 1 || n < k) throw ConfigError("kmeans: need at least k rows");

    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();

    for (int r = 0; r < restarts; ++r) {
        std::mt19937_64 rng(seed + static_cast<uint64_t>(r) * 0x9e3779b97f4a7c15ULL);

        // k-means++ seeding
        Eigen::MatrixXd centroids(k, X.cols());
        centroids.row(0) = X.row(static_cast<Eigen::Index>(uniform01(rng) * n));
        Eigen::VectorXd d2 =
            (X.rowwise() - centroids.row(0)).rowwise().squaredNorm();
        for (int c = 1; c < k; ++c) {
            const double total = d2.sum();
            Eigen::Index pick = 0;
            if (total > 0) {
                double target = uniform01(rng) * total, run = 0;
                for (Eigen::Index i = 0; i < n; ++i) {
                    run += d2(i);
                    if (run >= target) { pick = i; break; }
                }
            } else {
                pick = static_cast<Eigen::Index>(uniform01(rng) * n);
            }
            centroids.row(c) = X.row(pick);
            d2 = d2.cwiseMin((X.rowwise() - centroids.row(c)).rowwise().squaredNorm());
        }

        std::vector<int> labels(n, 0);
        for (int iter = 0; iter < max_iter; ++iter) {
            bool changed = false;
            for (Eigen::Index i = 0; i < n; ++i) {
                int bestc = 0;
                double bestd = std::numeric_limits<double>::infinity();
                for (int c = 0; c < k; ++c) {
                    const double d = (X.row(i) - centroids.row(c)).squaredNorm();
                    if (d < bestd) { bestd = d; bestc = c; }
                }
                if (labels[i] != bestc) { labels[i] = bestc; changed = true; }
            }
            Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, X.cols());
            Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
            for (Eigen::Index i = 0; i < n; ++i) {
                sums.row(labels[i]) += X.row(i);
                counts(labels[i]) += 1;
            }
            for (int c = 0; c < k; ++c) {
                if (counts(c) > 0) {
                    centroids.row(c) = sums.row(c) / counts(c);
                } else {
                    // re-seed an empty cluster on the farthest point
                    Eigen::Index far = 0;
                    double fard = -1;
                    for (Eigen::Index i = 0; i < n; ++i) {
                        const double d =
                            (X.row(i) - centroids.row(labels[i])).squaredNorm();
                        if (d > fard) { fard = d; far = i; }
                    }
                    centroids.row(c) = X.row(far);
                    labels[far] = c;
                    changed = true;
                }
            }
            if (!changed && iter > 0) break;
        }

        double inertia = 0;
        for (Eigen::Index i = 0; i < n; ++i)
            inertia += (X.row(i) - centroids.row(labels[i])).squaredNorm();
        if (inertia < best.inertia) {
            best.inertia = inertia;
            best.labels = labels;
            best.centroids = centroids;
        }
    }
    return best;
}

std::vector<int> spectral_cluster(const FeatureMatrix& X, int k, double gamma,
                                  uint64_t seed) {
    if (k < 2) throw ConfigError("spectral_cluster: k must be >= 2");
    if (gamma <= 0) throw ConfigError("spectral_cluster: gamma must be positive");
    const Eigen::Index n = X.rows();
    if (n < k) throw ConfigError("spectral_cluster: fewer rows than clusters");
    if (count_distinct_rows(X) < static_cast<size_t>(k))
        throw ConfigError("spectral_cluster: fewer distinct rows than clusters");

    Eigen::MatrixXd A = (-gamma * squared_distances(X)).array().exp().matrix();
    A.diagonal().setZero();

    Eigen::VectorXd deg = A.rowwise().sum();
    Eigen::VectorXd dinv_sqrt(n);
    for (Eigen::Index i = 0; i < n; ++i)
        dinv_sqrt(i) = deg(i) > 0 ? 1.0 / std::sqrt(deg(i)) : 0.0;
    Eigen::MatrixXd L = Eigen::MatrixXd::Identity(n, n) -
                        dinv_sqrt.asDiagonal() * A * dinv_sqrt.asDiagonal();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
    if (es.info() != Eigen::Success)
        throw ConfigError("spectral_cluster: eigendecomposition failed");
    Eigen::MatrixXd embed = es.eigenvectors().leftCols(k);  // ascending eigenvalues
    for (Eigen::Index i = 0; i < n; ++i) {
        const double norm = embed.row(i).norm();
        if (norm > 0) embed.row(i) /= norm;
    }
    return kmeans(embed, k, seed).labels;
}

std::vector<int> affinity_propagation(const FeatureMatrix& X, double damping,
                                      int max_iter, int convergence_iter) {
    if (damping < 0.5 || damping >= 1.0)
        throw ConfigError("affinity_propagation: damping must be in [0.5, 1)");
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd S = -squared_distances(X);

    // preference: median of the off-diagonal similarities
    std::vector<double> off;
    off.reserve(n * (n - 1));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j) off.push_back(S(i, j));
    std::sort(off.begin(), off.end());
    const double pref = off.empty() ? 0.0
                        : off.size() % 2 ? off[off.size() / 2]
                                         : 0.5 * (off[off.size() / 2 - 1] + off[off.size() / 2]);
    S.diagonal().setConstant(pref);

    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    std::vector<int> last_exemplars;
    int stable = 0;

    for (int iter = 0; iter < max_iter; ++iter) {
        // responsibilities
        Eigen::MatrixXd AS = A + S;
        Eigen::MatrixXd Rnew(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            double max1 = -std::numeric_limits<double>::infinity();
            double max2 = max1;
            Eigen::Index arg1 = 0;
            for (Eigen::Index kx = 0; kx < n; ++kx) {
                const double v = AS(i, kx);
                if (v > max1) { max2 = max1; max1 = v; arg1 = kx; }
                else if (v > max2) { max2 = v; }
            }
            for (Eigen::Index kx = 0; kx < n; ++kx)
                Rnew(i, kx) = S(i, kx) - (kx == arg1 ? max2 : max1);
        }
        R = damping * R + (1 - damping) * Rnew;

        // availabilities
        Eigen::MatrixXd Rp = R.cwiseMax(0.0);
        for (Eigen::Index kx = 0; kx < n; ++kx) Rp(kx, kx) = R(kx, kx);
        Eigen::RowVectorXd colsum = Rp.colwise().sum();
        Eigen::MatrixXd Anew(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index kx = 0; kx < n; ++kx) {
                const double v = colsum(kx) - Rp(i, kx);
                Anew(i, kx) = i == kx ? v : std::min(0.0, v);
            }
        A = damping * A + (1 - damping) * Anew;

        std::vector<int> exemplars;
        for (Eigen::Index i = 0; i < n; ++i)
            if (A(i, i) + R(i, i) > 0) exemplars.push_back(static_cast<int>(i));
        if (exemplars == last_exemplars && !exemplars.empty()) {
            if (++stable >= convergence_iter) break;
        } else {
            stable = 0;
            last_exemplars = exemplars;
        }
    }

    std::vector<int> exemplars = last_exemplars;
    if (exemplars.empty()) {
        // fall back to the single best exemplar
        Eigen::Index bestk = 0;
        (A.diagonal() + R.diagonal()).maxCoeff(&bestk);
        exemplars.push_back(static_cast<int>(bestk));
    }

    std::vector<int> labels(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        int bestc = 0;
        double bestv = -std::numeric_limits<double>::infinity();
        for (size_t c = 0; c < exemplars.size(); ++c) {
            const double v = S(i, exemplars[c]);
            if (v > bestv) { bestv = v; bestc = static_cast<int>(c); }
        }
        labels[i] = bestc;
    }
    for (size_t c = 0; c < exemplars.size(); ++c) labels[exemplars[c]] = static_cast<int>(c);
    relabel_consecutive(labels);
    return labels;
}

std::vector<int> mean_shift(const FeatureMatrix& X, double bandwidth, int max_iter) {
    if (bandwidth <= 0) throw ConfigError("mean_shift: bandwidth must be positive");
    const Eigen::Index n = X.rows();
    const double bw2 = bandwidth * bandwidth;

    // flat kernel: shift each point to the mean of its bandwidth ball
    Eigen::MatrixXd modes = X;
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::RowVectorXd p = X.row(i);
        for (int iter = 0; iter < max_iter; ++iter) {
            Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(X.cols());
            int count = 0;
            for (Eigen::Index j = 0; j < n; ++j)
                if ((X.row(j) - p).squaredNorm() <= bw2) {
                    sum += X.row(j);
                    ++count;
                }
            Eigen::RowVectorXd next = count > 0 ? (sum / count).eval() : p;
            if ((next - p).norm() < 1e-9) { p = next; break; }
            p = next;
        }
        modes.row(i) = p;
    }

    // deduplicate modes closer than the bandwidth, larger support first
    std::vector<int> support(n, 0);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if ((X.row(j) - modes.row(i)).squaredNorm() <= bw2) ++support[i];
    std::vector<Eigen::Index> order(n);
    for (Eigen::Index i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (support[a] != support[b]) return support[a] > support[b];
        return a < b;
    });
    std::vector<Eigen::Index> centers;
    for (Eigen::Index i : order) {
        bool close = false;
        for (Eigen::Index c : centers)
            if ((modes.row(i) - modes.row(c)).norm() <= bandwidth) { close = true; break; }
        if (!close) centers.push_back(i);
    }

    std::vector<int> labels(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        int bestc = 0;
        double bestd = std::numeric_limits<double>::infinity();
        for (size_t c = 0; c < centers.size(); ++c) {
            const double d = (modes.row(i) - modes.row(centers[c])).squaredNorm();
            if (d < bestd) { bestd = d; bestc = static_cast<int>(c); }
        }
        labels[i] = bestc;
    }
    relabel_consecutive(labels);
    return labels;
}

double silhouette(const FeatureMatrix& X, const std::vector<int>& labels) {
    const Eigen::Index n = X.rows();
    if (static_cast<size_t>(n) != labels.size())
        throw ConfigError("silhouette: label count mismatch");
    std::set<int> distinct(labels.begin(), labels.end());
    if (distinct.size() < 2) throw ConfigError("silhouette: fewer than 2 clusters");

    std::map<int, int> sizes;
    for (int l : labels) ++sizes[l];

    const Eigen::MatrixXd D2 = squared_distances(X);
    double total = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (sizes[labels[i]] == 1) continue;  // singleton contributes 0
        std::map<int, double> dist_sum;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            dist_sum[labels[j]] += std::sqrt(D2(i, j));
        }
        const double a = dist_sum[labels[i]] / (sizes[labels[i]] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (const auto& [l, s] : dist_sum)
            if (l != labels[i]) b = std::min(b, s / sizes[l]);
        const double denom = std::max(a, b);
        if (denom > 0) total += (b - a) / denom;
    }
    return total / static_cast<double>(n);
}

std::vector<GridEntry> default_grid() {
    std::vector<GridEntry> grid;
    for (int k = 3; k <= 10; ++k)
        grid.push_back({ClusterAlgorithm::KMeans, {{"k", static_cast<double>(k)}}});
    for (int k = 3; k <= 10; ++k)
        for (double g : {0.8, 0.6, 0.5, 0.4})
            grid.push_back({ClusterAlgorithm::Spectral,
                            {{"k", static_cast<double>(k)}, {"gamma", g}}});
    for (double d : {0.6, 0.7, 0.8, 0.9})
        grid.push_back({ClusterAlgorithm::AffinityPropagation, {{"damping", d}}});
    for (double b : {1.0, 0.8, 0.6, 0.5})
        grid.push_back({ClusterAlgorithm::MeanShift, {{"bandwidth", b}}});
    return grid;
}

ClusterModel cross_validate(const FeatureMatrix& X, const std::vector<GridEntry>& grid,
                            uint64_t seed, std::vector<CvRecord>* records) {
    if (grid.empty()) throw ConfigError("cross_validate: empty grid");

    ClusterModel best;
    bool have_best = false;

    for (const auto& entry : grid) {
        CvRecord rec;
        rec.entry = entry;
        std::vector<int> labels;
        try {
            switch (entry.algorithm) {
                case ClusterAlgorithm::KMeans:
                    labels = kmeans(X, static_cast<int>(entry.params.at("k")), seed).labels;
                    break;
                case ClusterAlgorithm::Spectral:
                    labels = spectral_cluster(X, static_cast<int>(entry.params.at("k")),
                                              entry.params.at("gamma"), seed);
                    break;
                case ClusterAlgorithm::AffinityPropagation:
                    labels = affinity_propagation(X, entry.params.at("damping"));
                    break;
                case ClusterAlgorithm::MeanShift:
                    labels = mean_shift(X, entry.params.at("bandwidth"));
                    break;
            }
            std::vector<int> copy = labels;
            rec.n_clusters = relabel_consecutive(copy);
            rec.silhouette_score = silhouette(X, labels);
        } catch (const std::exception& e) {
            rec.degenerate = true;
            rec.note = e.what();
            if (records) records->push_back(rec);
            continue;
        }
        if (records) records->push_back(rec);

        const bool better =
            !have_best || rec.silhouette_score > best.silhouette_score ||
            (rec.silhouette_score == best.silhouette_score && rec.n_clusters < best.n_clusters);
        if (better) {
            best.algorithm = entry.algorithm;
            best.params = entry.params;
            best.labels = labels;
            best.silhouette_score = rec.silhouette_score;
            best.n_clusters = rec.n_clusters;
            have_best = true;
        }
    }
    if (!have_best) throw ConfigError("cross_validate: all grid entries degenerate");
    return best;
}

}  // namespace iwaa
