#pragma once

#include "attachnet/extract.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace attachnet {

/// TRAM (TRend+spAM) filtering thresholds. Defaults follow the empirical
/// choices for the Enron corpus: 1K size floor, Dunbar band group of 35 as
/// the bulk cutoff, and frequency caps of 2 for both unique messages and
/// unique senders per attachment.
struct FilterConfig {
    std::uint64_t min_size_bytes = 1024; // attachments <= this are dropped
    int bulk_recipient_threshold = 35;   // events with more recipients are dropped
    int max_event_frequency = 2;         // digests in more unique messages are dropped
    int max_sender_frequency = 2;        // digests with more unique senders are dropped

    bool size_rule_enabled = true;
    bool bulk_rule_enabled = true;
    bool event_frequency_rule_enabled = true;
    bool sender_frequency_rule_enabled = true;

    static FilterConfig all_disabled() {
        FilterConfig c;
        c.size_rule_enabled = false;
        c.bulk_rule_enabled = false;
        c.event_frequency_rule_enabled = false;
        c.sender_frequency_rule_enabled = false;
        return c;
    }

    friend bool operator==(const FilterConfig&, const FilterConfig&) = default;
};

/// Applies the TRAM rules. Frequencies are measured on the input index, not
/// incrementally, so the rules commute and any application order yields the
/// same surviving index. Digests left without events disappear.
AttachmentIndex apply_filters(const AttachmentIndex& index, const FilterConfig& config);

enum class SweepParameter { bulk, event_freq, sender_freq };

struct SweepPoint {
    long value;
    double avg_degree;     // mean neighbor count of the projected network
    double avg_clustering; // mean local clustering coefficient
};

/// Projects the network once per threshold value with the chosen parameter
/// substituted, recording connectivity for plotting. Values must be
/// non-empty and ascending.
std::vector<SweepPoint> sweep_threshold(const AttachmentIndex& index, const FilterConfig& base,
                                        SweepParameter parameter, const std::vector<long>& values,
                                        const std::optional<std::set<std::string>>& core_users = {});

/// Digest counts per size bucket; bucket i covers (edges[i-1], edges[i]],
/// with a final bucket for everything above the last edge.
std::vector<std::uint64_t> attachment_size_histogram(const AttachmentIndex& index,
                                                     const std::vector<std::uint64_t>& bucket_edges);

const char* to_string(SweepParameter p);

} // namespace attachnet
