#pragma once
// Seeker grouping: spectral clustering (symmetric normalized Laplacian,
// Ng-Jordan-Weiss embedding) plus the alternatives swept during model
// selection, scored by silhouette.

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "iwaa/errors.hpp"

namespace iwaa {

// rows = seekers, columns = features in [0, 1]
using FeatureMatrix = Eigen::MatrixXd;

enum class ClusterAlgorithm { KMeans, Spectral, AffinityPropagation, MeanShift };

inline const char* to_string(ClusterAlgorithm a) {
    switch (a) {
        case ClusterAlgorithm::KMeans: return "kmeans";
        case ClusterAlgorithm::Spectral: return "spectral";
        case ClusterAlgorithm::AffinityPropagation: return "affinity_propagation";
        case ClusterAlgorithm::MeanShift: return "mean_shift";
    }
    return "?";
}

struct KMeansResult {
    std::vector<int> labels;
    Eigen::MatrixXd centroids;
    double inertia = 0;
};

// Seeded k-means++ with `restarts` deterministic restarts, best inertia kept.
KMeansResult kmeans(const FeatureMatrix& X, int k, uint64_t seed, int restarts = 10,
                    int max_iter = 300);

// Fixed pipeline: RBF affinity exp(-gamma * ||xi-xj||^2), symmetric
// normalized Laplacian, embedding into the k smallest eigenvectors with row
// renormalization, then seeded k-means. Throws ConfigError when the input has
// fewer than k distinct rows.
std::vector<int> spectral_cluster(const FeatureMatrix& X, int k, double gamma,
                                  uint64_t seed);

std::vector<int> affinity_propagation(const FeatureMatrix& X, double damping,
                                      int max_iter = 200, int convergence_iter = 15);

std::vector<int> mean_shift(const FeatureMatrix& X, double bandwidth,
                            int max_iter = 300);

// Mean silhouette (Euclidean); singleton-cluster samples contribute 0.
// Throws ConfigError with fewer than 2 clusters.
double silhouette(const FeatureMatrix& X, const std::vector<int>& labels);

struct GridEntry {
    ClusterAlgorithm algorithm;
    std::map<std::string, double> params;  // k, gamma, damping, bandwidth
};

struct ClusterModel {
    ClusterAlgorithm algorithm = ClusterAlgorithm::Spectral;
    std::map<std::string, double> params;
    std::vector<int> labels;
    double silhouette_score = 0;
    int n_clusters = 0;
};

struct CvRecord {
    GridEntry entry;
    double silhouette_score = 0;
    int n_clusters = 0;
    bool degenerate = false;
    std::string note;
};

// The model-selection grid: k in 3..10 for k-means; k in 3..10 crossed with
// gamma in {0.8, 0.6, 0.5, 0.4} for spectral; damping in {0.6, 0.7, 0.8,
// 0.9} for affinity propagation; bandwidth in {1, 0.8, 0.6, 0.5} for mean
// shift.
std::vector<GridEntry> default_grid();

// Fits every entry, scores by silhouette, returns the argmax; ties broken by
// fewer clusters, then grid order. Throws ConfigError when every fit is
// degenerate.
ClusterModel cross_validate(const FeatureMatrix& X, const std::vector<GridEntry>& grid,
                            uint64_t seed, std::vector<CvRecord>* records = nullptr);

}  // namespace iwaa
