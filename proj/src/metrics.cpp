#include "attachnet/metrics.hpp"

#include "attachnet/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

namespace attachnet {

namespace {

struct Adjacency {
    std::vector<std::string> names; // sorted
    std::map<std::string, int> ids;
    std::vector<std::vector<int>> nbrs;
    std::vector<std::vector<double>> wts; // parallel to nbrs

    explicit Adjacency(const Network& net) {
        names.assign(net.nodes().begin(), net.nodes().end());
        for (int i = 0; i < static_cast<int>(names.size()); ++i)
            ids.emplace(names[i], i);
        nbrs.resize(names.size());
        wts.resize(names.size());
        for (const auto& [edge, w] : net.edges()) {
            int u = ids.at(edge.first);
            int v = ids.at(edge.second);
            nbrs[u].push_back(v);
            wts[u].push_back(static_cast<double>(w));
            nbrs[v].push_back(u);
            wts[v].push_back(static_cast<double>(w));
        }
    }

    int size() const { return static_cast<int>(names.size()); }

    std::vector<int> bfs_distances(int source) const {
        std::vector<int> dist(size(), -1);
        std::deque<int> queue{source};
        dist[source] = 0;
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            for (int w : nbrs[v]) {
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        return dist;
    }

    std::vector<int> component_labels() const {
        std::vector<int> comp(size(), -1);
        int next = 0;
        for (int s = 0; s < size(); ++s) {
            if (comp[s] >= 0)
                continue;
            comp[s] = next;
            std::deque<int> queue{s};
            while (!queue.empty()) {
                int v = queue.front();
                queue.pop_front();
                for (int w : nbrs[v]) {
                    if (comp[w] < 0) {
                        comp[w] = next;
                        queue.push_back(w);
                    }
                }
            }
            ++next;
        }
        return comp;
    }
};

double local_clustering(const Adjacency& adj, int v) {
    const auto& nv = adj.nbrs[v];
    std::size_t deg = nv.size();
    if (deg < 2)
        return 0.0;
    // neighbor lists are unsorted; use a membership mask
    std::vector<char> mark(adj.size(), 0);
    for (int w : nv)
        mark[w] = 1;
    long links = 0;
    for (int w : nv)
        for (int x : adj.nbrs[w])
            if (x > w && mark[x])
                ++links;
    return 2.0 * static_cast<double>(links) / (static_cast<double>(deg) * (deg - 1));
}

std::vector<double> brandes_betweenness(const Adjacency& adj) {
    int n = adj.size();
    std::vector<double> bc(n, 0.0);
    for (int s = 0; s < n; ++s) {
        std::vector<int> order;
        order.reserve(n);
        std::vector<std::vector<int>> preds(n);
        std::vector<double> sigma(n, 0.0);
        std::vector<int> dist(n, -1);
        sigma[s] = 1.0;
        dist[s] = 0;
        std::deque<int> queue{s};
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            order.push_back(v);
            for (int w : adj.nbrs[v]) {
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if (dist[w] == dist[v] + 1) {
                    sigma[w] += sigma[v];
                    preds[w].push_back(v);
                }
            }
        }
        std::vector<double> delta(n, 0.0);
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            int w = *it;
            for (int v : preds[w])
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            if (w != s)
                bc[w] += delta[w];
        }
    }
    for (double& v : bc)
        v /= 2.0; // each unordered pair was visited from both endpoints
    return bc;
}

std::vector<double> eigenvector_scores(const Adjacency& adj) {
    constexpr double kTolerance = 1e-10;
    constexpr int kMaxIterations = 1000;

    int n = adj.size();
    std::vector<double> scores(n, 0.0);
    std::vector<int> comp = adj.component_labels();
    int comp_count = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;

    for (int c = 0; c < comp_count; ++c) {
        std::vector<int> members;
        for (int i = 0; i < n; ++i)
            if (comp[i] == c)
                members.push_back(i);
        int m = static_cast<int>(members.size());
        if (m == 1) {
            scores[members[0]] = 1.0;
            continue;
        }
        std::vector<int> local(n, -1);
        for (int i = 0; i < m; ++i)
            local[members[i]] = i;

        Eigen::MatrixXd w = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            int v = members[i];
            for (std::size_t k = 0; k < adj.nbrs[v].size(); ++k)
                w(i, local[adj.nbrs[v][k]]) = adj.wts[v][k];
        }

        Eigen::VectorXd x = Eigen::VectorXd::Constant(m, 1.0 / std::sqrt(double(m)));
        bool converged = false;
        int iterations = 0;
        while (iterations < kMaxIterations) {
            // identity shift keeps bipartite components from oscillating
            Eigen::VectorXd y = w * x + x;
            double norm = y.norm();
            if (norm == 0.0)
                break;
            y /= norm;
            ++iterations;
            double change = (y - x).lpNorm<Eigen::Infinity>();
            x = y;
            if (change < kTolerance) {
                converged = true;
                break;
            }
        }
        if (!converged)
            throw ConvergenceFailure("eigenvector power iteration did not converge");

        // polish within the same budget until the eigenpair residual is tight
        while (iterations < kMaxIterations) {
            double lambda = x.dot(w * x);
            if ((w * x - lambda * x).lpNorm<Eigen::Infinity>() < 1e-9)
                break;
            Eigen::VectorXd y = w * x + x;
            double norm = y.norm();
            if (norm == 0.0)
                break;
            x = y / norm;
            ++iterations;
        }

        for (int i = 0; i < m; ++i)
            scores[members[i]] = std::abs(x[i]);
    }

    double total = 0.0;
    for (double s : scores)
        total += s * s;
    if (total > 0) {
        double inv = 1.0 / std::sqrt(total);
        for (double& s : scores)
            s *= inv;
    }
    return scores;
}

void fill_ranks(CentralityScores& cs) {
    std::vector<std::pair<std::string, double>> order(cs.scores.begin(), cs.scores.end());
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second)
            return a.second > b.second;
        return a.first < b.first;
    });
    int rank = 1;
    for (const auto& [name, score] : order)
        cs.ranks[name] = rank++;
}

} // namespace

const char* to_string(CentralityMeasure m) {
    switch (m) {
    case CentralityMeasure::degree:
        return "degree";
    case CentralityMeasure::eigenvector:
        return "eigenvector";
    case CentralityMeasure::betweenness:
        return "betweenness";
    case CentralityMeasure::closeness:
        return "closeness";
    case CentralityMeasure::unique_ties:
        return "unique_ties";
    }
    return "degree";
}

std::optional<CentralityMeasure> centrality_measure_from_string(std::string_view name) {
    for (CentralityMeasure m :
         {CentralityMeasure::degree, CentralityMeasure::eigenvector, CentralityMeasure::betweenness,
          CentralityMeasure::closeness, CentralityMeasure::unique_ties}) {
        if (name == to_string(m))
            return m;
    }
    return std::nullopt;
}

double average_clustering(const Network& net) {
    if (net.node_count() == 0)
        return 0.0;
    Adjacency adj(net);
    double sum = 0.0;
    for (int v = 0; v < adj.size(); ++v)
        sum += local_clustering(adj, v);
    return sum / adj.size();
}

StatsReport network_statistics(const Network& net) {
    if (net.node_count() == 0)
        throw EmptyNetwork("statistics requested on an empty network");

    Adjacency adj(net);
    int n = adj.size();
    StatsReport report;
    report.node_count = n;
    report.edge_count = static_cast<std::int64_t>(net.edge_count());

    std::vector<int> comp = adj.component_labels();
    int comp_count = *std::max_element(comp.begin(), comp.end()) + 1;
    report.connected_components = comp_count;

    // largest component (first one in node order wins ties)
    std::vector<int> comp_size(comp_count, 0);
    for (int c : comp)
        ++comp_size[c];
    int largest = static_cast<int>(std::max_element(comp_size.begin(), comp_size.end()) -
                                   comp_size.begin());

    std::int64_t pair_dist_sum = 0;
    std::int64_t pair_count = 0;
    int diameter = 0;
    int radius = comp_size[largest] > 1 ? std::numeric_limits<int>::max() : 0;
    for (int v = 0; v < n; ++v) {
        if (comp[v] != largest)
            continue;
        std::vector<int> dist = adj.bfs_distances(v);
        int ecc = 0;
        for (int u = 0; u < n; ++u) {
            if (u == v || comp[u] != largest)
                continue;
            pair_dist_sum += dist[u];
            ++pair_count;
            ecc = std::max(ecc, dist[u]);
        }
        diameter = std::max(diameter, ecc);
        radius = std::min(radius, ecc);
    }
    report.diameter = diameter;
    report.radius = radius;
    report.characteristic_path_length =
        pair_count > 0 ? static_cast<double>(pair_dist_sum) / static_cast<double>(pair_count) : 0.0;

    double clustering_sum = 0.0;
    double degree_sum = 0.0;
    double degree_sq_sum = 0.0;
    int max_degree = 0;
    for (int v = 0; v < n; ++v) {
        clustering_sum += local_clustering(adj, v);
        double d = static_cast<double>(adj.nbrs[v].size());
        degree_sum += d;
        degree_sq_sum += d * d;
        max_degree = std::max(max_degree, static_cast<int>(adj.nbrs[v].size()));
    }
    report.clustering_coefficient = clustering_sum / n;
    report.avg_neighbors = degree_sum / n;
    report.density = n > 1 ? degree_sum / (static_cast<double>(n) * (n - 1)) : 0.0;

    double mean_degree = degree_sum / n;
    double variance = degree_sq_sum / n - mean_degree * mean_degree;
    variance = std::max(variance, 0.0);
    report.heterogeneity = mean_degree > 0 ? std::sqrt(variance) / mean_degree : 0.0;

    report.centralization =
        n > 2 ? (static_cast<double>(n) / (n - 2)) *
                    (static_cast<double>(max_degree) / (n - 1) - report.density)
              : 0.0;
    return report;
}

CentralityScores centrality(const Network& net, CentralityMeasure measure) {
    Adjacency adj(net);
    int n = adj.size();
    std::vector<double> values(n, 0.0);

    switch (measure) {
    case CentralityMeasure::degree:
        for (int v = 0; v < n; ++v)
            values[v] = std::accumulate(adj.wts[v].begin(), adj.wts[v].end(), 0.0);
        break;
    case CentralityMeasure::unique_ties:
        for (int v = 0; v < n; ++v)
            values[v] = static_cast<double>(adj.nbrs[v].size());
        break;
    case CentralityMeasure::betweenness:
        values = brandes_betweenness(adj);
        break;
    case CentralityMeasure::closeness:
        for (int v = 0; v < n; ++v) {
            std::vector<int> dist = adj.bfs_distances(v);
            std::int64_t sum = 0;
            int reachable = 0;
            for (int u = 0; u < n; ++u) {
                if (u != v && dist[u] >= 0) {
                    sum += dist[u];
                    ++reachable;
                }
            }
            values[v] = sum > 0 ? static_cast<double>(reachable) / static_cast<double>(sum) : 0.0;
        }
        break;
    case CentralityMeasure::eigenvector:
        values = eigenvector_scores(adj);
        break;
    }

    CentralityScores out;
    out.measure = measure;
    for (int v = 0; v < n; ++v)
        out.scores.emplace(adj.names[v], values[v]);
    fill_ranks(out);
    return out;
}

std::vector<std::pair<std::string, double>> overall_rank(const std::vector<CentralityScores>& scores,
                                                         int top_k) {
    std::map<std::string, double> value;
    for (const auto& cs : scores) {
        for (const auto& [name, rank] : cs.ranks) {
            value[name] += 1.0 / static_cast<double>(rank);
            if (rank <= top_k)
                value[name] += 1.0;
        }
    }
    std::vector<std::pair<std::string, double>> out(value.begin(), value.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second)
            return a.second > b.second;
        return a.first < b.first;
    });
    return out;
}

TieDiff tie_diff(const Network& net_a, const Network& net_b, const AttachmentIndex& index) {
    // per-pair per-sender event contributions
    std::map<Network::Edge, std::map<std::string, std::int64_t>> contributions;
    for (const auto& [digest, entry] : index.entries) {
        for (const auto& ev : entry.events) {
            if (ev.sender.empty())
                continue;
            const auto& parts = ev.participants;
            for (std::size_t i = 0; i < parts.size(); ++i)
                for (std::size_t j = i + 1; j < parts.size(); ++j)
                    contributions[Network::edge_key(parts[i], parts[j])][ev.sender] += 1;
        }
    }

    TieDiff diff;
    for (const auto& [edge, weight] : net_b.edges()) {
        if (net_a.has_edge(edge.first, edge.second))
            continue;
        GainedTie tie;
        tie.a = edge.first;
        tie.b = edge.second;
        tie.shared_attachments = weight;
        if (auto it = contributions.find(edge); it != contributions.end()) {
            // ascending sender order, so the first maximum is the
            // lexicographic tie-break winner
            for (const auto& [sender, count] : it->second) {
                if (sender == edge.first || sender == edge.second)
                    continue;
                if (count > tie.friend_contribution) {
                    tie.friend_of_friend = sender;
                    tie.friend_contribution = count;
                }
            }
        }
        diff.gained.push_back(std::move(tie));
    }
    for (const auto& [edge, weight] : net_a.edges()) {
        if (net_b.has_edge(edge.first, edge.second))
            continue;
        diff.lost.push_back(LostTie{edge.first, edge.second, weight});
    }

    std::sort(diff.gained.begin(), diff.gained.end(), [](const GainedTie& x, const GainedTie& y) {
        if (x.shared_attachments != y.shared_attachments)
            return x.shared_attachments > y.shared_attachments;
        return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });
    std::sort(diff.lost.begin(), diff.lost.end(), [](const LostTie& x, const LostTie& y) {
        if (x.communication_frequency != y.communication_frequency)
            return x.communication_frequency > y.communication_frequency;
        return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });
    return diff;
}

} // namespace attachnet
