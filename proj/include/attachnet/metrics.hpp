#pragma once

#include "attachnet/extract.hpp"
#include "attachnet/network.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace attachnet {

/// Whole-network statistics. Path-based figures (diameter, radius,
/// characteristic path length) are hop counts on the largest connected
/// component; all degree-based figures use neighbor counts, not weights.
struct StatsReport {
    double clustering_coefficient = 0;
    int connected_components = 0;
    int diameter = 0;
    int radius = 0;
    double centralization = 0;
    double characteristic_path_length = 0;
    double avg_neighbors = 0;
    int node_count = 0;
    std::int64_t edge_count = 0;
    double density = 0;
    double heterogeneity = 0; // stddev(degree) / mean(degree)
};

/// Throws EmptyNetwork when the network has no nodes.
StatsReport network_statistics(const Network& net);

/// Mean local clustering coefficient; nodes with fewer than two neighbors
/// count as zero.
double average_clustering(const Network& net);

enum class CentralityMeasure { degree, eigenvector, betweenness, closeness, unique_ties };

const char* to_string(CentralityMeasure m);
std::optional<CentralityMeasure> centrality_measure_from_string(std::string_view name);

struct CentralityScores {
    CentralityMeasure measure;
    std::map<std::string, double> scores;
    std::map<std::string, int> ranks; // 1 = highest score; ties broken lexicographically
};

/// degree: sum of incident edge weights. unique_ties: neighbor count.
/// eigenvector: power iteration on the weighted adjacency (per component,
/// globally unit-normalized, tolerance 1e-10, at most 1000 iterations).
/// betweenness: Brandes over unordered pairs, unweighted. closeness:
/// (n-1)/sum-of-distances within the node's component, unweighted.
CentralityScores centrality(const Network& net, CentralityMeasure measure);

/// Aggregates per-measure rankings: sum of inverse ranks plus one for each
/// measure ranking the node within the top top_k. Descending, lexicographic
/// tie-break.
std::vector<std::pair<std::string, double>> overall_rank(const std::vector<CentralityScores>& scores,
                                                         int top_k = 10);

struct GainedTie {
    std::string a, b;                           // canonical order
    std::int64_t shared_attachments = 0;        // weight in the attachment network
    std::optional<std::string> friend_of_friend; // third-party sender with the largest contribution
    std::int64_t friend_contribution = 0;
};

struct LostTie {
    std::string a, b;
    std::int64_t communication_frequency = 0; // weight in the communication network
};

struct TieDiff {
    std::vector<GainedTie> gained; // edges of net_b absent from net_a, heaviest first
    std::vector<LostTie> lost;     // edges of net_a absent from net_b, heaviest first
};

TieDiff tie_diff(const Network& net_a, const Network& net_b, const AttachmentIndex& index);

} // namespace attachnet
