#include "planlearn/noise_filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "planlearn/errors.hpp"
#include "planlearn/rng.hpp"
#include "planlearn/text.hpp"

namespace planlearn {

void Cluster::recompute_centroid() {
  centroid = members.empty()
                 ? 0.0
                 : std::accumulate(members.begin(), members.end(), 0.0) / members.size();
}

bool ClusterSet::operator==(const ClusterSet& o) const {
  if (outliers != o.outliers || clusters.size() != o.clusters.size()) return false;
  for (std::size_t i = 0; i < clusters.size(); ++i)
    if (clusters[i].members != o.clusters[i].members ||
        clusters[i].centroid != o.clusters[i].centroid)
      return false;
  return true;
}

// ---------------------------------------------------------------------------
// Statistical filter

Dataset filter_logical_noise(Dataset d, const FilterConfig& cfg, LogicalFilterStats* stats) {
  // Slack so a frequency of 1/9 clears a threshold written as 0.1111.
  const double limit = cfg.logical_threshold * (1.0 + 1e-3);

  for (std::size_t col = 0; col < d.attributes.size(); ++col) {
    if (attribute_kind(d.attributes[col]) != AttrKind::Logical) continue;
    for (RowClass cls : {RowClass::PreState, RowClass::PostState}) {
      int t_count = 0, f_count = 0;
      for (const auto& row : d.rows) {
        if (row.cls != cls) continue;
        const Cell& cell = row.cells[col];
        if (cell.is_missing()) continue;
        (cell.as_logical() ? t_count : f_count)++;
      }
      int total = t_count + f_count;
      if (total == 0) continue;

      auto erase_value = [&](bool value, int count, int other) {
        // Only a strict-minority value can be an anomaly.
        if (count == 0 || count >= other) return;
        if (static_cast<double>(count) / total > limit) return;
        for (auto& row : d.rows) {
          if (row.cls != cls) continue;
          Cell& cell = row.cells[col];
          if (!cell.is_missing() && cell.as_logical() == value) {
            cell = Cell::missing();
            if (stats) {
              stats->erased_cells++;
              stats->erased[to_string(cls) + " " + attribute_name(d.attributes[col]) + "=" +
                            (value ? "True" : "False")]++;
            }
          }
        }
      };
      // Both decisions use the counts observed before any erasure.
      erase_value(true, t_count, f_count);
      erase_value(false, f_count, t_count);
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// K-means

std::vector<Cluster> kmeans(const std::vector<double>& points, int k, const FilterConfig& cfg,
                            std::mt19937_64& rng) {
  if (k < 1 || static_cast<std::size_t>(k) > points.size())
    throw PipelineError("kmeans: need at least k points (k=" + std::to_string(k) + ", n=" +
                        std::to_string(points.size()) + ")");

  const std::size_t n = points.size();
  std::vector<double> best_centroids;
  std::vector<int> best_assign;
  double best_wcss = std::numeric_limits<double>::infinity();

  // Lloyd's iteration only finds a local optimum per start; scale the number
  // of restarts with the number of distinct values so some start straddles
  // every gap worth splitting at.
  std::size_t distinct = 0;
  {
    std::vector<double> sorted(points);
    std::sort(sorted.begin(), sorted.end());
    distinct = std::unique(sorted.begin(), sorted.end()) - sorted.begin();
  }
  const int restarts =
      std::max<int>(std::max(1, cfg.kmeans_restarts), std::min<int>(24, static_cast<int>(distinct)));

  for (int restart = 0; restart < restarts; ++restart) {
    // Init: up to k distinct values drawn uniformly from the points.
    std::vector<double> centroids;
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t attempt = 0; attempt < 8 * n + 16 && static_cast<int>(centroids.size()) < k;
         ++attempt) {
      double v = points[pick(rng)];
      if (std::find(centroids.begin(), centroids.end(), v) == centroids.end())
        centroids.push_back(v);
    }
    if (static_cast<int>(centroids.size()) < k) {
      // Fewer distinct values than draws found; sweep to be exact.
      for (double v : points) {
        if (static_cast<int>(centroids.size()) >= k) break;
        if (std::find(centroids.begin(), centroids.end(), v) == centroids.end())
          centroids.push_back(v);
      }
    }
    const int live = static_cast<int>(centroids.size());  // may stay < k on duplicate data

    std::vector<int> assign(n, -1), prev;
    for (int iter = 0; iter < std::max(1, cfg.kmeans_max_iter); ++iter) {
      prev = assign;
      for (std::size_t i = 0; i < n; ++i) {
        int best_c = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int c = 0; c < live; ++c) {
          double dist = std::fabs(points[i] - centroids[c]);
          if (dist < best_d) {  // ties keep the lowest index
            best_d = dist;
            best_c = c;
          }
        }
        assign[i] = best_c;
      }

      // Reseed emptied clusters with the point farthest from its centroid,
      // when some point actually sits away from its centroid.
      std::vector<int> sizes(live, 0);
      for (int a : assign) sizes[a]++;
      for (int c = 0; c < live; ++c) {
        if (sizes[c] > 0) continue;
        double far_d = 0;
        std::size_t far_i = n;
        for (std::size_t i = 0; i < n; ++i) {
          if (sizes[assign[i]] <= 1) continue;  // do not empty a singleton
          double dist = std::fabs(points[i] - centroids[assign[i]]);
          if (dist > far_d) {
            far_d = dist;
            far_i = i;
          }
        }
        if (far_i == n) continue;  // all points coincide with their centroids
        sizes[assign[far_i]]--;
        assign[far_i] = c;
        sizes[c] = 1;
        centroids[c] = points[far_i];
      }

      // Update step.
      std::vector<double> sums(live, 0);
      std::fill(sizes.begin(), sizes.end(), 0);
      for (std::size_t i = 0; i < n; ++i) {
        sums[assign[i]] += points[i];
        sizes[assign[i]]++;
      }
      for (int c = 0; c < live; ++c)
        if (sizes[c] > 0) centroids[c] = sums[c] / sizes[c];

      if (assign == prev) break;
    }

    double wcss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double diff = points[i] - centroids[assign[i]];
      wcss += diff * diff;
    }
    if (wcss < best_wcss) {
      best_wcss = wcss;
      best_centroids = centroids;
      best_assign = assign;
    }
  }

  std::vector<Cluster> result(best_centroids.size());
  for (std::size_t i = 0; i < n; ++i) result[best_assign[i]].members.push_back(points[i]);
  for (auto& c : result) c.recompute_centroid();
  std::erase_if(result, [](const Cluster& c) { return c.members.empty(); });
  return result;
}

std::vector<Cluster> kmeans(const std::vector<double>& points, int k, const FilterConfig& cfg) {
  auto rng = rng_for(cfg.seed, "kmeans");
  return kmeans(points, k, cfg, rng);
}

// ---------------------------------------------------------------------------
// Cluster quality

double silhouette(std::size_t member_index, std::size_t cluster_index,
                  const std::vector<Cluster>& clusters) {
  const Cluster& own = clusters[cluster_index];
  const double t = own.members[member_index];
  if (own.members.size() <= 1) return 0.0;

  double a = 0;
  for (std::size_t j = 0; j < own.members.size(); ++j)
    if (j != member_index) a += std::fabs(t - own.members[j]);
  a /= static_cast<double>(own.members.size() - 1);

  double b = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    if (c == cluster_index || clusters[c].members.empty()) continue;
    double mean = 0;
    for (double x : clusters[c].members) mean += std::fabs(t - x);
    mean /= static_cast<double>(clusters[c].members.size());
    b = std::min(b, mean);
  }
  if (!std::isfinite(b)) return 0.0;  // no other cluster exists

  double denom = std::max(a, b);
  if (denom == 0.0) return 0.0;
  return (b - a) / denom;
}

double nstd(const Cluster& c) {
  if (c.members.empty()) return 0.0;
  double mu = std::accumulate(c.members.begin(), c.members.end(), 0.0) / c.members.size();
  double ss = 0;
  for (double x : c.members) ss += (x - mu) * (x - mu);
  double sd = std::sqrt(ss / c.members.size());
  return sd / std::max(std::fabs(mu), 1e-9);
}

double quality(std::size_t cluster_index, const std::vector<Cluster>& clusters,
               const FilterConfig& cfg) {
  const Cluster& c = clusters[cluster_index];
  double sil = 0;
  for (std::size_t i = 0; i < c.members.size(); ++i)
    sil += silhouette(i, cluster_index, clusters);
  if (!c.members.empty()) sil /= static_cast<double>(c.members.size());
  return cfg.alpha * (1.0 - sil) + cfg.beta * nstd(c);
}

// ---------------------------------------------------------------------------
// Divisive discretisation

namespace {

struct DivisiveState {
  std::vector<std::pair<Cluster, double>> accepted;  // cluster + quality at acceptance
  std::vector<double> outliers;
};

// A group needs at least this many members to count as attested: states are
// shared between consecutive transitions, so one corrupted reading shows up
// in two dataset rows and would otherwise pass as a two-member "cluster".
constexpr std::size_t kMinClusterSize = 3;

void divide(const std::vector<double>& values, const FilterConfig& cfg, std::mt19937_64& rng,
            DivisiveState& out) {
  if (values.empty()) return;
  if (values.size() == 1) {
    out.outliers.push_back(values[0]);
    return;
  }

  auto split = kmeans(values, 2, cfg, rng);
  if (split.size() < 2) {
    // All values identical; an unsplittable group is accepted as-is when
    // attested, discarded otherwise.
    if (values.size() >= kMinClusterSize) {
      Cluster whole;
      whole.members = values;
      whole.recompute_centroid();
      out.accepted.emplace_back(std::move(whole), 0.0);
    } else {
      out.outliers.insert(out.outliers.end(), values.begin(), values.end());
    }
    return;
  }

  for (std::size_t c = 0; c < split.size(); ++c) {
    double q = quality(c, split, cfg);
    if (split[c].members.size() < kMinClusterSize) {
      out.outliers.insert(out.outliers.end(), split[c].members.begin(),
                          split[c].members.end());
    } else if (q <= cfg.acceptance) {
      out.accepted.emplace_back(split[c], q);
    } else {
      divide(split[c].members, cfg, rng, out);
    }
  }
}

}  // namespace

ClusterSet divisive_cluster(const std::vector<double>& values, const FilterConfig& cfg,
                            std::mt19937_64& rng) {
  DivisiveState state;
  divide(values, cfg, rng, state);
  ClusterSet cs;
  for (auto& [cluster, q] : state.accepted) cs.clusters.push_back(std::move(cluster));
  cs.outliers = std::move(state.outliers);
  return cs;
}

ClusterSet divisive_cluster(const std::vector<double>& values, const FilterConfig& cfg) {
  auto rng = rng_for(cfg.seed, "divisive");
  return divisive_cluster(values, cfg, rng);
}

Dataset discretise_fluents(Dataset d, const FilterConfig& cfg, DiscretisationReport* report) {
  for (std::size_t col = 0; col < d.attributes.size(); ++col) {
    if (attribute_kind(d.attributes[col]) != AttrKind::Numeric) continue;
    const std::string name = attribute_name(d.attributes[col]);

    std::vector<double> values;
    for (const auto& row : d.rows)
      if (!row.cells[col].is_missing()) values.push_back(row.cells[col].as_numeric());
    if (values.empty()) continue;

    auto rng = rng_for(cfg.seed, "discretise:" + name);
    DivisiveState state;
    divide(values, cfg, rng, state);

    // Outliers become Missing; everything else maps to the centroid of the
    // nearest accepted cluster (its own cluster, except in degenerate ties).
    std::vector<double> outlier_pool = state.outliers;
    std::sort(outlier_pool.begin(), outlier_pool.end());

    auto nearest_centroid = [&](double v) {
      double best = 0, best_d = std::numeric_limits<double>::infinity();
      for (const auto& [cluster, q] : state.accepted) {
        double dist = std::fabs(v - cluster.centroid);
        if (dist < best_d) {
          best_d = dist;
          best = cluster.centroid;
        }
      }
      return best;
    };

    for (auto& row : d.rows) {
      Cell& cell = row.cells[col];
      if (cell.is_missing()) continue;
      double v = cell.as_numeric();
      auto it = std::lower_bound(outlier_pool.begin(), outlier_pool.end(), v);
      if (it != outlier_pool.end() && *it == v) {
        outlier_pool.erase(it);  // consume one outlier occurrence
        cell = Cell::missing();
      } else {
        cell = Cell::discrete(nearest_centroid(v));
      }
    }

    if (report) {
      AttributeDiscretisation rep;
      for (const auto& [cluster, q] : state.accepted)
        rep.clusters.push_back({cluster.centroid, static_cast<int>(cluster.members.size()), q});
      std::sort(rep.clusters.begin(), rep.clusters.end(),
                [](const auto& a, const auto& b) { return a.centroid < b.centroid; });
      rep.outliers = state.outliers;
      std::sort(rep.outliers.begin(), rep.outliers.end());
      report->by_attribute[name] = std::move(rep);
    }
  }
  return d;
}

std::string DiscretisationReport::to_json() const {
  std::ostringstream out;
  out << "{";
  bool first_attr = true;
  for (const auto& [name, rep] : by_attribute) {
    if (!first_attr) out << ",";
    first_attr = false;
    out << "\"" << name << "\":{\"clusters\":[";
    for (std::size_t i = 0; i < rep.clusters.size(); ++i) {
      if (i) out << ",";
      out << "{\"centroid\":" << format_number(rep.clusters[i].centroid)
          << ",\"size\":" << rep.clusters[i].size
          << ",\"quality\":" << format_number(rep.clusters[i].quality) << "}";
    }
    out << "],\"outliers\":[";
    for (std::size_t i = 0; i < rep.outliers.size(); ++i) {
      if (i) out << ",";
      out << format_number(rep.outliers[i]);
    }
    out << "]}";
  }
  out << "}";
  return out.str();
}

}  // namespace planlearn
