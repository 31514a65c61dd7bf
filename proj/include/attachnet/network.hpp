#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>

namespace attachnet {

/// Undirected weighted graph over user nodes. Edge keys are stored in
/// canonical (sorted) order; self-loops are never stored. Serves both the
/// communication network and the shared-attachment projection.
class Network {
  public:
    enum class Kind { communication, attachment };
    using Edge = std::pair<std::string, std::string>; // first < second

    explicit Network(Kind kind = Kind::communication) : kind_(kind) {}

    Kind kind() const { return kind_; }
    void set_kind(Kind k) { kind_ = k; }

    static Edge edge_key(const std::string& a, const std::string& b) {
        return a < b ? Edge{a, b} : Edge{b, a};
    }

    /// Adds weight to the undirected edge {a,b}; a self-loop is ignored.
    void add_edge(const std::string& a, const std::string& b, std::int64_t weight = 1) {
        if (a == b || weight <= 0)
            return;
        nodes_.insert(a);
        nodes_.insert(b);
        edges_[edge_key(a, b)] += weight;
    }

    void add_node(const std::string& n) { nodes_.insert(n); }

    bool has_edge(const std::string& a, const std::string& b) const {
        return edges_.count(edge_key(a, b)) != 0;
    }
    std::int64_t weight(const std::string& a, const std::string& b) const {
        auto it = edges_.find(edge_key(a, b));
        return it == edges_.end() ? 0 : it->second;
    }

    const std::set<std::string>& nodes() const { return nodes_; }
    const std::map<Edge, std::int64_t>& edges() const { return edges_; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    std::int64_t total_weight() const {
        std::int64_t sum = 0;
        for (const auto& [e, w] : edges_)
            sum += w;
        return sum;
    }

    friend bool operator==(const Network& a, const Network& b) {
        return a.kind_ == b.kind_ && a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
    }

  private:
    Kind kind_;
    std::set<std::string> nodes_;
    std::map<Edge, std::int64_t> edges_;
};

const char* to_string(Network::Kind kind);

} // namespace attachnet
