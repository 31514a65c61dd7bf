#pragma once

// Shared fixtures and independent oracles for the test suites. Oracles here
// deliberately re-derive results by brute force and must stay independent of
// the library's own algorithms.

#include "attachnet/extract.hpp"
#include "attachnet/filter.hpp"
#include "attachnet/message.hpp"
#include "attachnet/network.hpp"

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace testutil {

using namespace attachnet;

inline CanonicalAddress addr(const std::string& local, const std::string& domain = "corp.test") {
    return make_address(local, domain);
}

struct MessageSpec {
    std::string id;
    std::string from;
    std::vector<std::string> to;
    std::vector<std::string> cc;
    std::vector<std::string> bcc;
    std::vector<std::pair<std::string, std::uint64_t>> attachments; // digest, size
    int date_hour = 10;
};

inline EmailMessage make_message(const MessageSpec& spec) {
    EmailMessage msg;
    msg.message_id = spec.id;
    msg.subject = "subject " + spec.id;
    msg.body_text = "body of " + spec.id;
    msg.date.valid = true;
    msg.date.wall_seconds = 11323 * 86400 + spec.date_hour * 3600; // 2001-01-01 + hour
    msg.date.zone_offset_minutes = 0;
    if (!spec.from.empty())
        msg.sender = addr(spec.from);
    for (const auto& r : spec.to)
        msg.to.push_back(addr(r));
    for (const auto& r : spec.cc)
        msg.cc.push_back(addr(r));
    for (const auto& r : spec.bcc)
        msg.bcc.push_back(addr(r));
    for (const auto& [digest, size] : spec.attachments) {
        AttachmentRecord rec;
        rec.digest = digest;
        rec.size_bytes = size;
        rec.mime_type = "application/pdf";
        rec.media_class = MediaClass::document;
        msg.attachments.push_back(std::move(rec));
    }
    return msg;
}

inline Archive make_archive(const std::string& custodian, std::vector<EmailMessage> messages) {
    Archive a;
    a.custodian = custodian;
    a.custodian_user = custodian + "@corp.test";
    for (auto& m : messages)
        m.custodian = custodian;
    a.messages = std::move(messages);
    return a;
}

/// Naive double-loop projection oracle: walks the filtered dictionary
/// digest by digest, event by event, and accumulates every unordered
/// participant pair. Kept separate from the library's projection path.
inline Network oracle_projection(const AttachmentIndex& index, const FilterConfig& config,
                                 const std::optional<std::set<std::string>>& core = {}) {
    Network net(Network::Kind::attachment);
    for (const auto& [digest, entry] : index.entries) {
        if (config.size_rule_enabled && entry.size_bytes <= config.min_size_bytes)
            continue;
        if (config.event_frequency_rule_enabled &&
            static_cast<int>(entry.events.size()) > config.max_event_frequency)
            continue;
        if (config.sender_frequency_rule_enabled) {
            std::set<std::string> senders;
            for (const auto& ev : entry.events)
                if (!ev.sender.empty())
                    senders.insert(ev.sender);
            if (static_cast<int>(senders.size()) > config.max_sender_frequency)
                continue;
        }
        for (const auto& ev : entry.events) {
            if (config.bulk_rule_enabled && ev.recipient_count > config.bulk_recipient_threshold)
                continue;
            for (const auto& u : ev.participants) {
                for (const auto& v : ev.participants) {
                    if (!(u < v))
                        continue;
                    if (core && (core->count(u) == 0 || core->count(v) == 0))
                        continue;
                    net.add_edge(u, v, 1);
                }
            }
        }
    }
    return net;
}

/// Per-message accumulation oracle for the communication network.
inline Network oracle_communication(const std::vector<EmailMessage>& messages,
                                    const std::optional<std::set<std::string>>& core = {},
                                    bool include_bcc = true) {
    Network net(Network::Kind::communication);
    for (const auto& msg : messages) {
        if (!msg.sender)
            continue;
        std::string from = msg.sender->rendered();
        std::set<std::string> seen;
        std::vector<CanonicalAddress> rcpts = msg.to;
        rcpts.insert(rcpts.end(), msg.cc.begin(), msg.cc.end());
        if (include_bcc)
            rcpts.insert(rcpts.end(), msg.bcc.begin(), msg.bcc.end());
        for (const auto& r : rcpts) {
            std::string to = r.rendered();
            if (to == from || !seen.insert(to).second)
                continue;
            if (core && (core->count(from) == 0 || core->count(to) == 0))
                continue;
            net.add_edge(from, to, 1);
        }
    }
    return net;
}

struct RandomCorpus {
    std::vector<Archive> archives;
    std::vector<EmailMessage> messages; // flattened
};

/// Random corpora for the projection and filter law checks: up to 50
/// messages, 10 users, 8 attachments, with duplicated message ids across
/// custodians and occasional missing senders.
inline RandomCorpus random_corpus(std::mt19937_64& rng) {
    RandomCorpus corpus;
    int n_users = 2 + static_cast<int>(rng() % 9);       // 2..10
    int n_digests = 1 + static_cast<int>(rng() % 8);     // 1..8
    int n_messages = 1 + static_cast<int>(rng() % 50);   // 1..50
    int n_custodians = 1 + static_cast<int>(rng() % 4);  // 1..4

    std::vector<std::string> users;
    for (int u = 0; u < n_users; ++u)
        users.push_back("u" + std::to_string(u));
    std::vector<std::string> digests;
    for (int d = 0; d < n_digests; ++d)
        digests.push_back(std::string(40, static_cast<char>('a' + d)));

    std::vector<Archive> archives(static_cast<std::size_t>(n_custodians));
    for (int c = 0; c < n_custodians; ++c) {
        archives[c].custodian = users[c % n_users];
        archives[c].custodian_user = users[c % n_users] + "@corp.test";
    }

    for (int m = 0; m < n_messages; ++m) {
        MessageSpec spec;
        spec.id = "msg" + std::to_string(static_cast<int>(rng() % (n_messages + 5)));
        if (rng() % 10 != 0)
            spec.from = users[rng() % n_users];
        int n_rcpt = 1 + static_cast<int>(rng() % 4);
        for (int r = 0; r < n_rcpt; ++r) {
            std::string u = users[rng() % n_users];
            switch (rng() % 3) {
            case 0:
                spec.to.push_back(u);
                break;
            case 1:
                spec.cc.push_back(u);
                break;
            default:
                spec.bcc.push_back(u);
                break;
            }
        }
        if (rng() % 5 != 0) {
            int n_att = 1 + static_cast<int>(rng() % 2);
            for (int a = 0; a < n_att; ++a)
                spec.attachments.emplace_back(digests[rng() % n_digests],
                                              200 + (rng() % 3) * 1000); // 200, 1200, 2200
        }
        EmailMessage msg = make_message(spec);
        // drop a copy into 1..2 archives
        int copies = 1 + static_cast<int>(rng() % 2);
        for (int c = 0; c < copies; ++c) {
            std::size_t which = rng() % archives.size();
            EmailMessage copy = msg;
            copy.custodian = archives[which].custodian;
            archives[which].messages.push_back(std::move(copy));
        }
    }

    for (const auto& a : archives)
        for (const auto& m : a.messages)
            corpus.messages.push_back(m);
    corpus.archives = std::move(archives);
    return corpus;
}

/// Random TRAM thresholds, including disabled rules.
inline FilterConfig random_filters(std::mt19937_64& rng) {
    FilterConfig config;
    config.min_size_bytes = (rng() % 3) * 1000;         // 0, 1000, 2000
    config.bulk_recipient_threshold = 1 + static_cast<int>(rng() % 5);
    config.max_event_frequency = 1 + static_cast<int>(rng() % 4);
    config.max_sender_frequency = 1 + static_cast<int>(rng() % 3);
    config.size_rule_enabled = rng() % 4 != 0;
    config.bulk_rule_enabled = rng() % 4 != 0;
    config.event_frequency_rule_enabled = rng() % 4 != 0;
    config.sender_frequency_rule_enabled = rng() % 4 != 0;
    return config;
}

} // namespace testutil
