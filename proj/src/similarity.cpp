#include "attachnet/similarity.hpp"

#include "attachnet/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace attachnet {

long UserBag::total() const {
    long sum = 0;
    for (const auto& [digest, count] : counts)
        sum += count;
    return sum;
}

std::vector<UserBag> build_user_bags(const AttachmentIndex& index, const FilterConfig& filters) {
    AttachmentIndex surviving = apply_filters(index, filters);
    std::map<std::string, UserBag> bags;
    for (const auto& [digest, entry] : surviving.entries) {
        for (const auto& ev : entry.events) {
            for (const auto& user : ev.participants) {
                UserBag& bag = bags[user];
                bag.user = user;
                bag.counts[digest] += 1;
            }
        }
    }
    std::vector<UserBag> out;
    out.reserve(bags.size());
    for (auto& [user, bag] : bags)
        out.push_back(std::move(bag));
    return out;
}

double weighted_jaccard_distance(const UserBag& a, const UserBag& b) {
    if (a.counts.empty() && b.counts.empty())
        return 0.0;
    long min_sum = 0;
    long max_sum = 0;
    auto ia = a.counts.begin();
    auto ib = b.counts.begin();
    while (ia != a.counts.end() || ib != b.counts.end()) {
        if (ib == b.counts.end() || (ia != a.counts.end() && ia->first < ib->first)) {
            max_sum += ia->second;
            ++ia;
        } else if (ia == a.counts.end() || ib->first < ia->first) {
            max_sum += ib->second;
            ++ib;
        } else {
            min_sum += std::min(ia->second, ib->second);
            max_sum += std::max(ia->second, ib->second);
            ++ia;
            ++ib;
        }
    }
    if (max_sum == 0)
        return 0.0;
    return 1.0 - static_cast<double>(min_sum) / static_cast<double>(max_sum);
}

double cosine_distance(const UserBag& a, const UserBag& b) {
    if (a.counts.empty() && b.counts.empty())
        return 0.0;
    if (a.counts.empty() || b.counts.empty())
        return 1.0;
    double dot = 0.0;
    for (const auto& [digest, count] : a.counts) {
        auto it = b.counts.find(digest);
        if (it != b.counts.end())
            dot += static_cast<double>(count) * it->second;
    }
    double na = 0.0, nb = 0.0;
    for (const auto& [digest, count] : a.counts)
        na += static_cast<double>(count) * count;
    for (const auto& [digest, count] : b.counts)
        nb += static_cast<double>(count) * count;
    return 1.0 - dot / std::sqrt(na * nb);
}

std::vector<std::pair<std::string, double>> knn_query(const std::vector<UserBag>& bags,
                                                      const std::string& target, int k,
                                                      BagMetric metric) {
    const UserBag* query = nullptr;
    for (const auto& bag : bags)
        if (bag.user == target)
            query = &bag;
    if (!query)
        throw UnknownUser("no bag for user: " + target);
    if (k < 0 || static_cast<std::size_t>(k) > bags.size())
        throw std::invalid_argument("k exceeds bag count");

    std::vector<std::pair<std::string, double>> ranked;
    ranked.reserve(bags.size());
    for (const auto& bag : bags) {
        double d = metric == BagMetric::weighted_jaccard ? weighted_jaccard_distance(*query, bag)
                                                         : cosine_distance(*query, bag);
        ranked.emplace_back(bag.user, d);
    }
    // the query itself outranks any identical bag so it always holds rank 1
    std::sort(ranked.begin(), ranked.end(), [&target](const auto& a, const auto& b) {
        if (a.second != b.second)
            return a.second < b.second;
        if ((a.first == target) != (b.first == target))
            return a.first == target;
        return a.first < b.first;
    });
    ranked.resize(static_cast<std::size_t>(k));
    return ranked;
}

namespace {

// Platform-stable uniform double in [0,1); the standard distributions are
// implementation-defined, which would break bit-determinism claims.
double next_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t pick_weighted(std::mt19937_64& rng, const std::vector<double>& weights, double total) {
    double r = next_unit(rng) * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (r < acc)
            return i;
    }
    // numeric tail: last positive weight
    for (std::size_t i = weights.size(); i-- > 0;)
        if (weights[i] > 0)
            return i;
    return 0;
}

} // namespace

ClusterAssignment kmeans_cluster(const std::vector<UserBag>& bags, int k, std::uint64_t seed) {
    if (k <= 0)
        throw std::invalid_argument("cluster count must be positive");
    if (static_cast<std::size_t>(k) > bags.size())
        throw std::invalid_argument("cluster count exceeds user count");

    std::vector<const UserBag*> sorted;
    sorted.reserve(bags.size());
    for (const auto& bag : bags)
        sorted.push_back(&bag);
    std::sort(sorted.begin(), sorted.end(),
              [](const UserBag* a, const UserBag* b) { return a->user < b->user; });

    const int n = static_cast<int>(sorted.size());
    Eigen::MatrixXd dist(n, n);
    for (int i = 0; i < n; ++i) {
        dist(i, i) = 0.0;
        for (int j = i + 1; j < n; ++j) {
            double d = weighted_jaccard_distance(*sorted[i], *sorted[j]);
            dist(i, j) = d;
            dist(j, i) = d;
        }
    }

    ClusterAssignment result;
    result.k = k;
    result.seed = seed;

    // k-means++ seeding on the rows
    std::mt19937_64 rng(seed);
    std::vector<int> centers;
    centers.push_back(static_cast<int>(next_unit(rng) * n) % n);
    std::vector<double> nearest_sq(n);
    while (static_cast<int>(centers.size()) < k) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::max();
            for (int c : centers)
                best = std::min(best, (dist.row(i) - dist.row(c)).squaredNorm());
            nearest_sq[i] = best;
            total += best;
        }
        if (total <= 0.0) {
            // fewer distinct rows than clusters; the surplus stays empty
            break;
        }
        centers.push_back(static_cast<int>(pick_weighted(rng, nearest_sq, total)));
    }

    Eigen::MatrixXd centroids(k, n);
    int seeded = static_cast<int>(centers.size());
    for (int c = 0; c < seeded; ++c)
        centroids.row(c) = dist.row(centers[c]);
    for (int c = seeded; c < k; ++c)
        centroids.row(c).setConstant(std::numeric_limits<double>::infinity());

    std::vector<int> assign(n, -1);
    auto assign_points = [&] {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                if (!centroids.row(c).allFinite())
                    continue;
                double d = (dist.row(i) - centroids.row(c)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        return changed;
    };

    constexpr int kMaxIterations = 300;
    assign_points();
    for (int iter = 0; iter < kMaxIterations; ++iter) {
        // recompute centroids
        std::vector<int> count(k, 0);
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, n);
        for (int i = 0; i < n; ++i) {
            sums.row(assign[i]) += dist.row(i);
            ++count[assign[i]];
        }
        for (int c = 0; c < k; ++c) {
            if (count[c] > 0)
                centroids.row(c) = sums.row(c) / count[c];
        }

        // repair empty clusters while distinct rows remain available
        for (int c = 0; c < seeded; ++c) {
            if (count[c] > 0)
                continue;
            int farthest = -1;
            double far_d = -1.0;
            for (int i = 0; i < n; ++i) {
                if (count[assign[i]] <= 1)
                    continue;
                double d = (dist.row(i) - centroids.row(assign[i])).squaredNorm();
                if (d > far_d) {
                    far_d = d;
                    farthest = i;
                }
            }
            if (farthest < 0 || far_d <= 0.0)
                continue;
            --count[assign[farthest]];
            assign[farthest] = c;
            ++count[c];
            centroids.row(c) = dist.row(farthest);
            result.notes.push_back("empty cluster repaired with user " + sorted[farthest]->user);
        }

        if (!assign_points())
            break;
    }

    // inertia over final assignment
    {
        std::vector<int> count(k, 0);
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, n);
        for (int i = 0; i < n; ++i) {
            sums.row(assign[i]) += dist.row(i);
            ++count[assign[i]];
        }
        for (int c = 0; c < k; ++c)
            if (count[c] > 0)
                centroids.row(c) = sums.row(c) / count[c];
        double inertia = 0.0;
        for (int i = 0; i < n; ++i)
            inertia += (dist.row(i) - centroids.row(assign[i])).squaredNorm();
        result.inertia = inertia;
    }

    // relabel by first appearance in user order so labels are independent
    // of seeding accidents
    std::vector<int> relabel(k, -1);
    int next_label = 0;
    for (int i = 0; i < n; ++i)
        if (relabel[assign[i]] < 0)
            relabel[assign[i]] = next_label++;
    for (int i = 0; i < n; ++i)
        result.assignment[sorted[i]->user] = relabel[assign[i]];
    for (int c = next_label; c < k; ++c)
        result.empty_clusters.push_back(c);

    return result;
}

} // namespace attachnet
