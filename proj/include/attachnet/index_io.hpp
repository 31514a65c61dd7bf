#pragma once

#include "attachnet/extract.hpp"

#include <filesystem>
#include <string>

namespace attachnet {

/// Compact columnar serialization of an AttachmentIndex, the handoff between
/// extraction and the analysis subcommands. Versioned, little-endian,
/// byte-deterministic (all tables sorted). A string table deduplicates user
/// ids and message ids.
void write_attachment_index(const AttachmentIndex& index, const std::filesystem::path& file,
                            const std::string& config_hash = {});

struct StoredIndex {
    AttachmentIndex index;
    std::string config_hash;
};

StoredIndex read_attachment_index(const std::filesystem::path& file);

} // namespace attachnet
