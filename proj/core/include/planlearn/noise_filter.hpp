#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "planlearn/dataset.hpp"

namespace planlearn {

struct FilterConfig {
  double logical_threshold = 0.05;  // statistical filter frequency threshold
  double alpha = 0.6;               // weight of the (1 - silhouette) term
  double beta = 0.4;                // weight of the normalised-std term
  double acceptance = 0.05;         // cluster acceptance criterion (lower quality is better)
  int kmeans_max_iter = 100;
  int kmeans_restarts = 5;
  std::uint64_t seed = 0;
};

struct Cluster {
  std::vector<double> members;
  double centroid = 0;

  void recompute_centroid();
};

struct ClusterSet {
  std::vector<Cluster> clusters;
  std::vector<double> outliers;

  bool operator==(const ClusterSet&) const;
};

struct LogicalFilterStats {
  int erased_cells = 0;
  // "pre-state (at ?arg0 ?arg1)=True" -> count erased
  std::map<std::string, int> erased;
};

// Statistical frequency filter over logical columns, each class independently:
// a value in strict minority whose frequency among observed cells does not
// exceed the threshold is replaced by Missing. The comparison carries a 0.1%
// relative slack so thresholds written as rounded decimals (0.1111 for 1/9)
// behave as intended.
Dataset filter_logical_noise(Dataset d, const FilterConfig& cfg,
                             LogicalFilterStats* stats = nullptr);

struct AttributeDiscretisation {
  struct AcceptedCluster {
    double centroid = 0;
    int size = 0;
    double quality = 0;
  };
  std::vector<AcceptedCluster> clusters;
  std::vector<double> outliers;
};

struct DiscretisationReport {
  std::map<std::string, AttributeDiscretisation> by_attribute;
  std::string to_json() const;
};

// Discretises every numeric column independently: values are replaced by
// their cluster centroid, outliers become Missing. Deterministic given
// cfg.seed; each attribute draws from its own derived RNG stream, so results
// do not depend on column order.
Dataset discretise_fluents(Dataset d, const FilterConfig& cfg,
                           DiscretisationReport* report = nullptr);

// Recursive divisive clustering: halve with k-means, accept a side when its
// quality passes the acceptance criterion, recurse otherwise; a side that
// cannot be split (all duplicates) is accepted whole. Groups of fewer than
// three members are outliers: states are shared between consecutive
// transitions, so a single corrupted reading already accounts for two cells.
// Every input value lands in exactly one cluster or in outliers.
ClusterSet divisive_cluster(const std::vector<double>& values, const FilterConfig& cfg);
ClusterSet divisive_cluster(const std::vector<double>& values, const FilterConfig& cfg,
                            std::mt19937_64& rng);

// Lloyd iteration on reals, seeded-random init with k distinct values, best
// of cfg.kmeans_restarts by within-cluster sum of squares. An emptied cluster
// is reseeded with the point farthest from its centroid when such a point
// exists. Returns the nonempty clusters (fewer than k only when the input
// has fewer than k distinct values). Throws PipelineError when k > |points|.
std::vector<Cluster> kmeans(const std::vector<double>& points, int k, const FilterConfig& cfg);
std::vector<Cluster> kmeans(const std::vector<double>& points, int k, const FilterConfig& cfg,
                            std::mt19937_64& rng);

// Silhouette of one member: (b - a) / max(a, b); 0 for singleton clusters,
// when no other cluster exists, or when both means vanish.
double silhouette(std::size_t member_index, std::size_t cluster_index,
                  const std::vector<Cluster>& clusters);

// Population standard deviation over the centroid magnitude; a near-zero
// centroid is guarded with a 1e-9 denominator (forcing a split).
double nstd(const Cluster& c);

// alpha * (1 - mean member silhouette) + beta * nstd; zero is best.
double quality(std::size_t cluster_index, const std::vector<Cluster>& clusters,
               const FilterConfig& cfg);

}  // namespace planlearn
