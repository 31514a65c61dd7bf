#include "attachnet/filter.hpp"

#include "attachnet/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace attachnet {

const char* to_string(SweepParameter p) {
    switch (p) {
    case SweepParameter::bulk:
        return "bulk";
    case SweepParameter::event_freq:
        return "event_freq";
    case SweepParameter::sender_freq:
        return "sender_freq";
    }
    return "bulk";
}

AttachmentIndex apply_filters(const AttachmentIndex& index, const FilterConfig& config) {
    if (config.bulk_recipient_threshold < 0 || config.max_event_frequency < 0 ||
        config.max_sender_frequency < 0)
        throw std::invalid_argument("filter thresholds must be non-negative");

    AttachmentIndex out;
    for (const auto& [digest, entry] : index.entries) {
        if (config.size_rule_enabled && entry.size_bytes <= config.min_size_bytes)
            continue;
        if (config.event_frequency_rule_enabled && entry.event_count() > config.max_event_frequency)
            continue;
        if (config.sender_frequency_rule_enabled &&
            static_cast<int>(entry.senders().size()) > config.max_sender_frequency)
            continue;

        AttachmentEntry kept;
        kept.size_bytes = entry.size_bytes;
        for (const auto& ev : entry.events) {
            if (config.bulk_rule_enabled && ev.recipient_count > config.bulk_recipient_threshold)
                continue;
            kept.events.push_back(ev);
        }
        if (!kept.events.empty())
            out.entries.emplace(digest, std::move(kept));
    }
    return out;
}

std::vector<SweepPoint> sweep_threshold(const AttachmentIndex& index, const FilterConfig& base,
                                        SweepParameter parameter, const std::vector<long>& values,
                                        const std::optional<std::set<std::string>>& core_users) {
    if (values.empty())
        throw std::invalid_argument("sweep requires at least one threshold value");
    if (!std::is_sorted(values.begin(), values.end()))
        throw std::invalid_argument("sweep values must be ascending");

    std::vector<SweepPoint> out;
    out.reserve(values.size());
    for (long v : values) {
        FilterConfig config = base;
        switch (parameter) {
        case SweepParameter::bulk:
            config.bulk_recipient_threshold = static_cast<int>(v);
            config.bulk_rule_enabled = true;
            break;
        case SweepParameter::event_freq:
            config.max_event_frequency = static_cast<int>(v);
            config.event_frequency_rule_enabled = true;
            break;
        case SweepParameter::sender_freq:
            config.max_sender_frequency = static_cast<int>(v);
            config.sender_frequency_rule_enabled = true;
            break;
        }
        Network net = project_shared_attachment_network(index, config, core_users);
        SweepPoint point{v, 0.0, 0.0};
        if (net.node_count() > 0) {
            point.avg_degree =
                2.0 * static_cast<double>(net.edge_count()) / static_cast<double>(net.node_count());
            point.avg_clustering = average_clustering(net);
        }
        out.push_back(point);
    }
    return out;
}

std::vector<std::uint64_t> attachment_size_histogram(const AttachmentIndex& index,
                                                     const std::vector<std::uint64_t>& bucket_edges) {
    if (!std::is_sorted(bucket_edges.begin(), bucket_edges.end()))
        throw std::invalid_argument("bucket edges must be ascending");
    std::vector<std::uint64_t> counts(bucket_edges.size() + 1, 0);
    for (const auto& [digest, entry] : index.entries) {
        std::size_t bucket = bucket_edges.size();
        for (std::size_t i = 0; i < bucket_edges.size(); ++i) {
            if (entry.size_bytes <= bucket_edges[i]) {
                bucket = i;
                break;
            }
        }
        ++counts[bucket];
    }
    return counts;
}

} // namespace attachnet
