#pragma once

#include "attachnet/extract.hpp"
#include "attachnet/filter.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace attachnet {

/// Per-user multiset of attachment digests: each digest counts once per
/// surviving event the user participates in. The "bag of words" feature
/// vector for similarity queries.
struct UserBag {
    std::string user;
    std::map<std::string, int> counts; // digest -> positive count

    long total() const;
    friend bool operator==(const UserBag&, const UserBag&) = default;
};

/// One bag per user with at least one surviving event, sorted by user.
std::vector<UserBag> build_user_bags(const AttachmentIndex& index, const FilterConfig& filters);

/// 1 - sum(min)/sum(max) over the digest union; 0 when both bags are empty.
double weighted_jaccard_distance(const UserBag& a, const UserBag& b);

/// 1 - cosine similarity of the count vectors; mirrors the Jaccard edge
/// cases (0 for two empty bags, 1 when exactly one is empty).
double cosine_distance(const UserBag& a, const UserBag& b);

enum class BagMetric { weighted_jaccard, cosine };

/// The k nearest bags by the metric, ascending distance with lexicographic
/// tie-break. The target itself is included at distance 0, so k=6 returns
/// the query plus five neighbors. Throws UnknownUser; requires k <= bag
/// count.
std::vector<std::pair<std::string, double>> knn_query(const std::vector<UserBag>& bags,
                                                      const std::string& target, int k,
                                                      BagMetric metric = BagMetric::weighted_jaccard);

struct ClusterAssignment {
    int k = 0;
    std::uint64_t seed = 0;
    std::map<std::string, int> assignment; // user -> cluster id in [0, k)
    double inertia = 0.0;
    std::vector<int> empty_clusters; // populated when distinct rows < k
    std::vector<std::string> notes;  // one line per empty-cluster repair
};

/// Lloyd's algorithm over rows of the pairwise weighted-Jaccard distance
/// matrix (users sorted lexicographically), k-means++ seeding from the given
/// seed, Euclidean distance, at most 300 iterations. Bit-deterministic for a
/// fixed (bags, k, seed). Cluster ids are relabeled by first appearance in
/// user order. When fewer distinct rows than k exist the surplus clusters
/// stay empty and are reported.
ClusterAssignment kmeans_cluster(const std::vector<UserBag>& bags, int k = 15,
                                 std::uint64_t seed = 0);

} // namespace attachnet
