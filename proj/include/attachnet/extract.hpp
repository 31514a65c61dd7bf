#pragma once

#include "attachnet/archive.hpp"
#include "attachnet/message.hpp"
#include "attachnet/network.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace attachnet {

struct FilterConfig;

/// One sharing occurrence of an attachment: a unique message carrying it.
/// Participants are the archive owners holding the message plus the sender
/// and every recipient. Copies of one message found in several archives
/// merge into a single event.
struct SharingEvent {
    std::string message_id;
    std::string sender;                    // empty when the message had no parsable From
    std::vector<std::string> participants; // sorted, distinct
    int recipient_count = 0;               // distinct header recipients, for the bulk rule

    friend bool operator==(const SharingEvent&, const SharingEvent&) = default;
};

struct AttachmentEntry {
    std::uint64_t size_bytes = 0;
    std::vector<SharingEvent> events; // sorted by message_id, distinct ids

    std::set<std::string> users() const;   // union of event participants
    std::set<std::string> senders() const; // distinct non-empty event senders
    int event_count() const { return static_cast<int>(events.size()); }

    friend bool operator==(const AttachmentEntry&, const AttachmentEntry&) = default;
};

/// Global dictionary keyed by attachment digest.
struct AttachmentIndex {
    std::map<std::string, AttachmentEntry> entries;

    std::size_t digest_count() const { return entries.size(); }
    std::size_t event_count() const;

    friend bool operator==(const AttachmentIndex&, const AttachmentIndex&) = default;
};

struct ExtractOptions {
    bool include_bcc = true;
};

/// Frequency-of-communication graph: one edge increment per (message,
/// distinct recipient) incidence, sender excluded. Expects the message list
/// to be deduplicated by message id. With a core set, only edges between
/// core users survive.
Network build_communication_network(const std::vector<EmailMessage>& messages,
                                    const std::optional<std::set<std::string>>& core_users = {},
                                    const ExtractOptions& options = {});

/// The per-message event representative: at most one attachment, the first
/// in MIME order with a usable digest. An email is assumed to describe one
/// shared event regardless of how many files it carries.
std::vector<AttachmentRecord> select_event_attachments(const EmailMessage& message);

AttachmentIndex build_attachment_index(const std::vector<Archive>& archives,
                                       const ExtractOptions& options = {});

/// One-mode projection of the user-attachment bipartite graph: after
/// filtering, every unordered pair of distinct participants of a surviving
/// (digest, event) gains edge weight 1. Nodes with no surviving edge are
/// absent from the result.
Network project_shared_attachment_network(const AttachmentIndex& index, const FilterConfig& filters,
                                          const std::optional<std::set<std::string>>& core_users = {});

} // namespace attachnet
