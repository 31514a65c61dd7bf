#include "attachnet/index_io.hpp"

#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>
#include <vector>

namespace fs = std::filesystem;

namespace attachnet {

namespace {

constexpr char kMagic[4] = {'A', 'T', 'I', 'X'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.push_back(char((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i)
        out.push_back(char((v >> (8 * i)) & 0xFF));
}

void put_str(std::string& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out += s;
}

struct Reader {
    const std::string& data;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (pos + n > data.size())
            throw std::runtime_error("truncated index file");
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= std::uint32_t(static_cast<unsigned char>(data[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= std::uint64_t(static_cast<unsigned char>(data[pos + i])) << (8 * i);
        pos += 8;
        return v;
    }
    std::string str() {
        std::uint32_t n = u32();
        need(n);
        std::string s = data.substr(pos, n);
        pos += n;
        return s;
    }
};

} // namespace

void write_attachment_index(const AttachmentIndex& index, const fs::path& file,
                            const std::string& config_hash) {
    // string table: users and message ids, sorted
    std::map<std::string, std::uint32_t> table;
    auto intern = [&](const std::string& s) { table.emplace(s, 0); };
    for (const auto& [digest, entry] : index.entries) {
        for (const auto& ev : entry.events) {
            intern(ev.message_id);
            if (!ev.sender.empty())
                intern(ev.sender);
            for (const auto& p : ev.participants)
                intern(p);
        }
    }
    std::uint32_t next = 0;
    for (auto& [s, id] : table)
        id = next++;

    std::string out;
    out.append(kMagic, 4);
    put_u32(out, kVersion);
    put_str(out, config_hash);

    put_u32(out, static_cast<std::uint32_t>(table.size()));
    for (const auto& [s, id] : table)
        put_str(out, s);

    put_u32(out, static_cast<std::uint32_t>(index.entries.size()));
    for (const auto& [digest, entry] : index.entries) {
        put_str(out, digest);
        put_u64(out, entry.size_bytes);
        put_u32(out, static_cast<std::uint32_t>(entry.events.size()));
        for (const auto& ev : entry.events) {
            put_u32(out, table.at(ev.message_id));
            put_u32(out, ev.sender.empty() ? 0xFFFFFFFFu : table.at(ev.sender));
            put_u32(out, static_cast<std::uint32_t>(ev.recipient_count));
            put_u32(out, static_cast<std::uint32_t>(ev.participants.size()));
            for (const auto& p : ev.participants)
                put_u32(out, table.at(p));
        }
    }

    if (!file.parent_path().empty())
        fs::create_directories(file.parent_path());
    std::ofstream f(file, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot write " + file.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

StoredIndex read_attachment_index(const fs::path& file) {
    std::ifstream f(file, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot read " + file.string());
    std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

    if (data.size() < 8 || std::memcmp(data.data(), kMagic, 4) != 0)
        throw std::runtime_error("not an attachment index file: " + file.string());
    Reader r{data, 4};
    std::uint32_t version = r.u32();
    if (version != kVersion)
        throw std::runtime_error("unsupported index version " + std::to_string(version));

    StoredIndex stored;
    stored.config_hash = r.str();

    std::uint32_t table_size = r.u32();
    std::vector<std::string> table(table_size);
    for (std::uint32_t i = 0; i < table_size; ++i)
        table[i] = r.str();
    auto lookup = [&](std::uint32_t id) -> const std::string& {
        if (id >= table.size())
            throw std::runtime_error("corrupt string reference in index file");
        return table[id];
    };

    std::uint32_t digest_count = r.u32();
    for (std::uint32_t d = 0; d < digest_count; ++d) {
        std::string digest = r.str();
        AttachmentEntry entry;
        entry.size_bytes = r.u64();
        std::uint32_t event_count = r.u32();
        entry.events.reserve(event_count);
        for (std::uint32_t e = 0; e < event_count; ++e) {
            SharingEvent ev;
            ev.message_id = lookup(r.u32());
            std::uint32_t sender = r.u32();
            if (sender != 0xFFFFFFFFu)
                ev.sender = lookup(sender);
            ev.recipient_count = static_cast<int>(r.u32());
            std::uint32_t parts = r.u32();
            ev.participants.reserve(parts);
            for (std::uint32_t p = 0; p < parts; ++p)
                ev.participants.push_back(lookup(r.u32()));
            entry.events.push_back(std::move(ev));
        }
        stored.index.entries.emplace(std::move(digest), std::move(entry));
    }
    return stored;
}

} // namespace attachnet
