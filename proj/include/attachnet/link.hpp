#pragma once

#include "attachnet/message.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace attachnet {

enum class MatchMode { full_key, downgraded_key, truncated_body };

const char* to_string(MatchMode m);

struct LinkedPair {
    std::string id_a;
    std::string id_b;
    MatchMode mode;
};

struct LinkReport {
    std::vector<LinkedPair> matched;      // one-to-one, pass order then id order
    std::vector<std::string> unmatched_a; // sorted ids
    std::vector<std::string> unmatched_b;
    double match_rate = 0.0; // |matched| / |A|
    std::size_t ambiguous = 0; // probes that had several candidates
};

struct LinkOptions {
    int min_truncation_len = 100; // floor on the truncated-body prefix, bytes of normalized content
    /// Hour offsets tried on top of the plain GMT conversion; when absent
    /// each date uses its default set (own zone difference, 2, 3, 4, 10, 12).
    std::optional<std::vector<int>> repair_offsets;
    /// Extra per-folder hour offsets for corpora with folder-specific clock
    /// skew (applied to corpus B messages in that folder).
    std::map<std::string, int> folder_offsets;
    /// When set, corpus B bodies are truncated at the first match of this
    /// regex before keying (for trailing boilerplate notices). Off by default.
    std::optional<std::string> strip_trailer_regex;
};

/// Links corpus A (header-authoritative) to corpus B (attachment-bearing) by
/// composite content keys, in three passes: full key (custodian, folder,
/// subject, GMT date, body digest), downgraded key (subject, date, digest),
/// then truncated-body prefix match keyed on subject+date. Date candidates
/// come from B's repair offsets. Matched B messages get their From/To/Cc/Bcc
/// replaced with A's. Deterministic: ambiguity resolves to the smallest
/// message id and is counted.
LinkReport link_corpora(const std::vector<EmailMessage>& corpus_a,
                        std::vector<EmailMessage>& corpus_b, const LinkOptions& options = {});

} // namespace attachnet
