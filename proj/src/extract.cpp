#include "attachnet/extract.hpp"

#include "attachnet/filter.hpp"

#include <algorithm>

namespace attachnet {

std::set<std::string> AttachmentEntry::users() const {
    std::set<std::string> out;
    for (const auto& ev : events)
        out.insert(ev.participants.begin(), ev.participants.end());
    return out;
}

std::set<std::string> AttachmentEntry::senders() const {
    std::set<std::string> out;
    for (const auto& ev : events)
        if (!ev.sender.empty())
            out.insert(ev.sender);
    return out;
}

std::size_t AttachmentIndex::event_count() const {
    std::size_t n = 0;
    for (const auto& [digest, entry] : entries)
        n += entry.events.size();
    return n;
}

Network build_communication_network(const std::vector<EmailMessage>& messages,
                                    const std::optional<std::set<std::string>>& core_users,
                                    const ExtractOptions& options) {
    Network net(Network::Kind::communication);
    auto in_core = [&](const std::string& u) { return !core_users || core_users->count(u) != 0; };
    for (const auto& msg : messages) {
        if (!msg.sender || !msg.sender->valid())
            continue;
        std::string from = msg.sender->rendered();
        if (!in_core(from))
            continue;
        for (const auto& rcpt : msg.recipients(options.include_bcc)) {
            std::string to = rcpt.rendered();
            if (to == from || !in_core(to))
                continue;
            net.add_edge(from, to, 1);
        }
    }
    return net;
}

std::vector<AttachmentRecord> select_event_attachments(const EmailMessage& message) {
    for (const auto& att : message.attachments) {
        if (!att.digest.empty())
            return {att};
    }
    return {};
}

AttachmentIndex build_attachment_index(const std::vector<Archive>& archives,
                                       const ExtractOptions& options) {
    struct EventAccum {
        SharingEvent ev;
        std::set<std::string> participants;
    };
    // digest -> message_id -> accumulating event (copies of one message in
    // several archives merge here)
    std::map<std::string, std::map<std::string, EventAccum>> accum;
    std::map<std::string, std::uint64_t> sizes;

    for (const auto& archive : archives) {
        for (const auto& msg : archive.messages) {
            auto selected = select_event_attachments(msg);
            if (selected.empty())
                continue;
            const AttachmentRecord& att = selected.front();

            EventAccum& acc = accum[att.digest][msg.message_id];
            if (acc.ev.message_id.empty()) {
                acc.ev.message_id = msg.message_id;
                acc.ev.recipient_count = static_cast<int>(msg.recipients(options.include_bcc).size());
            }
            if (acc.ev.sender.empty() && msg.sender && msg.sender->valid())
                acc.ev.sender = msg.sender->rendered();

            if (!archive.custodian_user.empty())
                acc.participants.insert(archive.custodian_user);
            if (msg.sender && msg.sender->valid())
                acc.participants.insert(msg.sender->rendered());
            for (const auto& rcpt : msg.recipients(options.include_bcc))
                acc.participants.insert(rcpt.rendered());

            sizes.try_emplace(att.digest, att.size_bytes);
        }
    }

    AttachmentIndex index;
    for (auto& [digest, by_id] : accum) {
        AttachmentEntry entry;
        entry.size_bytes = sizes[digest];
        for (auto& [id, acc] : by_id) {
            acc.ev.participants.assign(acc.participants.begin(), acc.participants.end());
            entry.events.push_back(std::move(acc.ev));
        }
        index.entries.emplace(digest, std::move(entry));
    }
    return index;
}

Network project_shared_attachment_network(const AttachmentIndex& index, const FilterConfig& filters,
                                          const std::optional<std::set<std::string>>& core_users) {
    AttachmentIndex surviving = apply_filters(index, filters);

    Network net(Network::Kind::attachment);
    std::vector<std::string> pool;
    for (const auto& [digest, entry] : surviving.entries) {
        for (const auto& ev : entry.events) {
            pool.clear();
            for (const auto& user : ev.participants)
                if (!core_users || core_users->count(user) != 0)
                    pool.push_back(user);
            for (std::size_t i = 0; i < pool.size(); ++i)
                for (std::size_t j = i + 1; j < pool.size(); ++j)
                    net.add_edge(pool[i], pool[j], 1);
        }
    }
    return net;
}

} // namespace attachnet
