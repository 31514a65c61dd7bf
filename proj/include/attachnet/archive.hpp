#pragma once

#include "attachnet/message.hpp"
#include "attachnet/mime.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace attachnet {

/// One user's mail archive. The custodian user id is the node label the
/// archive owner contributes to sharing events: the directory-resolved
/// address when available, otherwise the raw custodian label.
struct Archive {
    std::string custodian;      // raw label (directory name or mbox stem)
    std::string custodian_user; // node id used in networks
    std::vector<EmailMessage> messages;
};

struct LoadReport {
    std::vector<Archive> archives;
    std::vector<std::string> errors; // unparseable files, one line each
    std::size_t message_count = 0;
};

/// Loads a custodian/folder/file tree of EML files. Paths are visited in
/// sorted order so repeated loads are identical.
LoadReport load_eml_tree(const std::filesystem::path& root, const ParseOptions& options = {});

/// Loads a classic mbox ("From " separated); the custodian is the file stem.
LoadReport load_mbox(const std::filesystem::path& file, const ParseOptions& options = {});

/// Flattens archives into one message list deduplicated by message id,
/// keeping the copy from the lexicographically first (custodian, folder).
std::vector<EmailMessage> deduplicate_messages(const std::vector<Archive>& archives);

} // namespace attachnet
