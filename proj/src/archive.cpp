#include "attachnet/archive.hpp"

#include "attachnet/errors.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;

namespace attachnet {

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string resolve_custodian(const std::string& label, const ParseOptions& options) {
    if (label.find('@') != std::string::npos) {
        if (auto a = parse_single_address(label))
            return a->rendered();
    }
    if (options.directory) {
        if (auto a = options.directory->resolve(label))
            return a->rendered();
    }
    return label;
}

} // namespace

LoadReport load_eml_tree(const fs::path& root, const ParseOptions& options) {
    LoadReport report;
    if (!fs::exists(root) || !fs::is_directory(root))
        return report;

    std::vector<fs::path> custodians;
    std::vector<fs::path> mboxes; // one mbox file per custodian is fine too
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_directory())
            custodians.push_back(entry.path());
        else if (entry.is_regular_file())
            mboxes.push_back(entry.path());
    }
    std::sort(custodians.begin(), custodians.end());
    std::sort(mboxes.begin(), mboxes.end());

    for (const auto& file : mboxes) {
        LoadReport sub = load_mbox(file, options);
        report.message_count += sub.message_count;
        for (auto& archive : sub.archives)
            report.archives.push_back(std::move(archive));
        for (auto& err : sub.errors)
            report.errors.push_back(std::move(err));
    }

    for (const auto& cdir : custodians) {
        Archive archive;
        archive.custodian = cdir.filename().string();
        archive.custodian_user = resolve_custodian(archive.custodian, options);

        std::vector<fs::path> files;
        for (const auto& entry : fs::recursive_directory_iterator(cdir))
            if (entry.is_regular_file())
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());

        for (const auto& file : files) {
            std::string folder = fs::relative(file.parent_path(), cdir).generic_string();
            if (folder == ".")
                folder.clear();
            try {
                archive.messages.push_back(
                    parse_message(read_file(file), archive.custodian, folder, options));
                ++report.message_count;
            } catch (const UnparseableMessage& e) {
                report.errors.push_back(file.generic_string() + ": " + e.what());
            }
        }
        if (!archive.messages.empty())
            report.archives.push_back(std::move(archive));
    }
    return report;
}

LoadReport load_mbox(const fs::path& file, const ParseOptions& options) {
    LoadReport report;
    std::ifstream in(file, std::ios::binary);
    if (!in)
        return report;

    Archive archive;
    archive.custodian = file.stem().string();
    archive.custodian_user = resolve_custodian(archive.custodian, options);

    std::string line, current;
    std::size_t index = 0;
    auto flush = [&] {
        if (current.empty())
            return;
        try {
            archive.messages.push_back(parse_message(current, archive.custodian, "", options));
            ++report.message_count;
        } catch (const UnparseableMessage& e) {
            report.errors.push_back(file.generic_string() + "#" + std::to_string(index) + ": " +
                                    e.what());
        }
        ++index;
        current.clear();
    };
    while (std::getline(in, line)) {
        if (line.rfind("From ", 0) == 0) {
            flush();
            continue;
        }
        // ">From" unescaping for mbox body lines
        if (line.rfind(">From ", 0) == 0)
            line.erase(0, 1);
        current += line;
        current += "\n";
    }
    flush();
    if (!archive.messages.empty())
        report.archives.push_back(std::move(archive));
    return report;
}

std::vector<EmailMessage> deduplicate_messages(const std::vector<Archive>& archives) {
    std::map<std::string, const EmailMessage*> by_id;
    for (const auto& archive : archives) {
        for (const auto& msg : archive.messages) {
            auto [it, inserted] = by_id.try_emplace(msg.message_id, &msg);
            if (!inserted) {
                const EmailMessage* kept = it->second;
                if (std::tie(msg.custodian, msg.folder) < std::tie(kept->custodian, kept->folder))
                    it->second = &msg;
            }
        }
    }
    std::vector<EmailMessage> out;
    out.reserve(by_id.size());
    for (const auto& [id, msg] : by_id)
        out.push_back(*msg);
    return out;
}

} // namespace attachnet
