#include "attachnet/similarity.hpp"

#include "attachnet/errors.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <random>

using namespace attachnet;
using namespace testutil;

namespace {

UserBag bag(const std::string& user, std::map<std::string, int> counts) {
    return UserBag{user, std::move(counts)};
}

UserBag random_bag(std::mt19937_64& rng, const std::string& user, int universe = 12) {
    UserBag b;
    b.user = user;
    int n = static_cast<int>(rng() % 6);
    for (int i = 0; i < n; ++i)
        b.counts["d" + std::to_string(rng() % universe)] = 1 + static_cast<int>(rng() % 5);
    return b;
}

} // namespace

TEST_CASE("weighted jaccard fixtures") {
    CHECK(weighted_jaccard_distance(bag("a", {{"x", 1}}), bag("b", {{"x", 1}})) == 0.0);
    CHECK(weighted_jaccard_distance(bag("a", {}), bag("b", {})) == 0.0);
    CHECK(weighted_jaccard_distance(bag("a", {{"x", 1}}), bag("b", {{"y", 2}})) == 1.0);
    // 1 - (1+1)/(2+3)
    CHECK(weighted_jaccard_distance(bag("a", {{"x", 2}, {"y", 1}}),
                                    bag("b", {{"x", 1}, {"y", 3}})) == 0.6);
}

TEST_CASE("weighted jaccard is a metric on random bags") {
    std::mt19937_64 rng(83);
    int violations = 0;
    for (int trial = 0; trial < 3000; ++trial) {
        UserBag a = random_bag(rng, "a");
        UserBag b = random_bag(rng, "b");
        UserBag c = random_bag(rng, "c");
        double ab = weighted_jaccard_distance(a, b);
        double bc = weighted_jaccard_distance(b, c);
        double ac = weighted_jaccard_distance(a, c);
        CHECK(ab == weighted_jaccard_distance(b, a));
        CHECK(weighted_jaccard_distance(a, a) == 0.0);
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
        if (ac > ab + bc)
            ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("user bags count surviving events per participant") {
    std::string x(40, 'x');
    std::string tiny(40, 't');
    auto archives = std::vector<Archive>{make_archive(
        "a", {make_message({.id = "m1", .from = "a", .to = {"b"}, .attachments = {{x, 5000}}}),
              make_message({.id = "m2", .from = "a", .to = {"b", "c"}, .attachments = {{x, 5000}}}),
              make_message({.id = "m3", .from = "a", .to = {"d"}, .attachments = {{tiny, 100}}})})};
    AttachmentIndex index = build_attachment_index(archives);

    FilterConfig config = FilterConfig::all_disabled();
    config.size_rule_enabled = true; // drops the 100-byte digest
    auto bags = build_user_bags(index, config);

    // d only participated in the filtered-out event, so no bag for d
    REQUIRE(bags.size() == 3);
    CHECK(bags[0].user == "a@corp.test");
    CHECK(bags[0].counts.at(x) == 2);
    CHECK(bags[1].user == "b@corp.test");
    CHECK(bags[1].counts.at(x) == 2);
    CHECK(bags[2].user == "c@corp.test");
    CHECK(bags[2].counts.at(x) == 1);

    // brute-force tally oracle over the filtered index
    AttachmentIndex filtered = apply_filters(index, config);
    std::map<std::string, std::map<std::string, int>> tally;
    for (const auto& [digest, entry] : filtered.entries)
        for (const auto& ev : entry.events)
            for (const auto& user : ev.participants)
                tally[user][digest] += 1;
    REQUIRE(tally.size() == bags.size());
    for (const auto& b : bags)
        CHECK(tally.at(b.user) == b.counts);
}

TEST_CASE("knn includes the query itself at distance zero") {
    auto bags = std::vector<UserBag>{bag("a", {{"x", 1}}), bag("b", {{"x", 1}, {"y", 1}}),
                                     bag("c", {{"z", 3}})};
    auto result = knn_query(bags, "a", 1);
    REQUIRE(result.size() == 1);
    CHECK(result[0].first == "a");
    CHECK(result[0].second == 0.0);

    // even when a lexicographically smaller user holds an identical bag
    auto twins = std::vector<UserBag>{bag("aaa", {{"x", 2}}), bag("zed", {{"x", 2}})};
    auto self_first = knn_query(twins, "zed", 2);
    CHECK(self_first[0].first == "zed");
    CHECK(self_first[1].first == "aaa");
    CHECK(self_first[1].second == 0.0);
}

TEST_CASE("knn ordering matches an exhaustive scan") {
    auto bags = std::vector<UserBag>{bag("a", {{"x", 2}, {"y", 1}}),
                                     bag("b", {{"x", 1}, {"y", 3}}), bag("c", {{"x", 2}, {"y", 1}}),
                                     bag("d", {{"q", 5}})};
    auto result = knn_query(bags, "a", 4);
    REQUIRE(result.size() == 4);
    // a: 0; c: identical counts -> 0 (a before c lexicographically); b: 0.6; d: 1
    CHECK(result[0].first == "a");
    CHECK(result[1].first == "c");
    CHECK(result[1].second == 0.0);
    CHECK(result[2].first == "b");
    CHECK(result[2].second == doctest::Approx(0.6));
    CHECK(result[3].first == "d");
    CHECK(result[3].second == 1.0);
}

TEST_CASE("knn errors") {
    auto bags = std::vector<UserBag>{bag("a", {{"x", 1}})};
    CHECK_THROWS_AS(knn_query(bags, "ghost", 1), UnknownUser);
    CHECK_THROWS_AS(knn_query(bags, "a", 2), std::invalid_argument);
}

TEST_CASE("knn result is a prefix of the full ordering") {
    std::mt19937_64 rng(91);
    std::vector<UserBag> bags;
    for (int i = 0; i < 12; ++i)
        bags.push_back(random_bag(rng, "user" + std::to_string(i)));
    auto full = knn_query(bags, "user3", static_cast<int>(bags.size()));
    for (int k = 1; k <= static_cast<int>(bags.size()); ++k) {
        auto part = knn_query(bags, "user3", k);
        REQUIRE(part.size() == static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i)
            CHECK(part[static_cast<std::size_t>(i)] == full[static_cast<std::size_t>(i)]);
    }
}

TEST_CASE("knn cosine metric option") {
    auto bags = std::vector<UserBag>{bag("a", {{"x", 1}}), bag("b", {{"x", 2}}),
                                     bag("c", {{"y", 1}})};
    auto result = knn_query(bags, "a", 3, BagMetric::cosine);
    // cosine ignores magnitude: b is at distance 0 from a
    CHECK(result[0].second == doctest::Approx(0.0));
    CHECK(result[1].first == "b");
    CHECK(result[1].second == doctest::Approx(0.0));
    CHECK(result[2].first == "c");
    CHECK(result[2].second == doctest::Approx(1.0));
}

TEST_CASE("kmeans with n equal to k isolates every user at zero inertia") {
    std::vector<UserBag> bags;
    for (int i = 0; i < 6; ++i)
        bags.push_back(bag("user" + std::to_string(i), {{"d" + std::to_string(i), i + 1}}));
    ClusterAssignment result = kmeans_cluster(bags, 6, 0);
    CHECK(result.inertia == 0.0);
    std::set<int> distinct;
    for (const auto& [user, cluster] : result.assignment)
        distinct.insert(cluster);
    CHECK(distinct.size() == 6);
    CHECK(result.empty_clusters.empty());
}

TEST_CASE("kmeans recovers two well separated groups") {
    // group one shares digests g*, group two shares h*; within-group
    // distance < 0.1, between-group distance > 0.9
    std::vector<UserBag> bags;
    for (int i = 0; i < 5; ++i) {
        std::map<std::string, int> counts;
        for (int d = 0; d < 20; ++d)
            counts["g" + std::to_string(d)] = 10;
        counts["g0"] += i; // small perturbation
        bags.push_back(bag("one" + std::to_string(i), std::move(counts)));
    }
    for (int i = 0; i < 5; ++i) {
        std::map<std::string, int> counts;
        for (int d = 0; d < 20; ++d)
            counts["h" + std::to_string(d)] = 10;
        counts["h1"] += i;
        bags.push_back(bag("two" + std::to_string(i), std::move(counts)));
    }
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            CHECK(weighted_jaccard_distance(bags[i], bags[j]) < 0.1);
            CHECK(weighted_jaccard_distance(bags[5 + i], bags[5 + j]) < 0.1);
            CHECK(weighted_jaccard_distance(bags[i], bags[5 + j]) > 0.9);
        }

    ClusterAssignment result = kmeans_cluster(bags, 2, 0);
    std::set<int> group_one, group_two;
    for (int i = 0; i < 5; ++i) {
        group_one.insert(result.assignment.at("one" + std::to_string(i)));
        group_two.insert(result.assignment.at("two" + std::to_string(i)));
    }
    CHECK(group_one.size() == 1);
    CHECK(group_two.size() == 1);
    CHECK(*group_one.begin() != *group_two.begin());
}

TEST_CASE("kmeans is deterministic for a fixed seed") {
    std::mt19937_64 rng(89);
    std::vector<UserBag> bags;
    for (int i = 0; i < 15; ++i)
        bags.push_back(random_bag(rng, "user" + std::to_string(i)));

    ClusterAssignment first = kmeans_cluster(bags, 4, 123);
    for (int run = 0; run < 4; ++run) {
        ClusterAssignment again = kmeans_cluster(bags, 4, 123);
        CHECK(again.assignment == first.assignment);
        CHECK(again.inertia == first.inertia);
        CHECK(again.empty_clusters == first.empty_clusters);
    }
    // a different seed may legitimately differ, but must still assign all
    ClusterAssignment other = kmeans_cluster(bags, 4, 124);
    CHECK(other.assignment.size() == bags.size());
}

TEST_CASE("kmeans reports surplus clusters when rows collide") {
    // three distinct rows, k=5: two clusters must stay empty
    std::vector<UserBag> bags;
    for (int i = 0; i < 6; ++i)
        bags.push_back(bag("user" + std::to_string(i), {{"d" + std::to_string(i % 3), 5}}));
    ClusterAssignment result = kmeans_cluster(bags, 5, 0);
    CHECK(result.assignment.size() == 6);
    CHECK(result.empty_clusters.size() == 2);
    std::set<int> used;
    for (const auto& [user, cluster] : result.assignment) {
        CHECK(cluster >= 0);
        CHECK(cluster < 5);
        used.insert(cluster);
    }
    CHECK(used.size() == 3);
}

TEST_CASE("kmeans validates its arguments") {
    std::vector<UserBag> bags{bag("a", {{"x", 1}})};
    CHECK_THROWS_AS(kmeans_cluster(bags, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(kmeans_cluster(bags, 2, 0), std::invalid_argument);
}
