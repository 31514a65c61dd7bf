#pragma once

#include "attachnet/address.hpp"
#include "attachnet/date.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace attachnet {

enum class MediaClass { document, multimedia, other };

const char* to_string(MediaClass cls);

/// Fixed media partition: image/audio/video are multimedia, text-bearing
/// application formats (and text parts saved under a filename) are
/// documents, the rest is other. Every mime type lands in exactly one class.
MediaClass media_class_for(std::string_view mime_type, bool has_filename);

struct AttachmentRecord {
    std::string digest; // 40 lowercase hex chars, SHA-1 of the raw decoded bytes
    std::uint64_t size_bytes = 0;
    MediaClass media_class = MediaClass::other;
    std::optional<std::string> filename;
    std::string mime_type;
    std::string raw_bytes; // kept only on request; digest and size stay valid without it
};

struct EmailMessage {
    std::string message_id; // never empty; synthesized from content when the header is missing
    std::string custodian;  // archive owner
    std::string folder;
    std::string subject;
    ParsedDate date;
    std::optional<CanonicalAddress> sender;
    std::vector<CanonicalAddress> to;
    std::vector<CanonicalAddress> cc;
    std::vector<CanonicalAddress> bcc;
    std::string body_text; // concatenated decoded text/plain parts
    std::vector<AttachmentRecord> attachments;
    std::uint64_t raw_size_bytes = 0; // size of the raw message on disk

    std::vector<std::string> warnings;         // per-part decode problems, non-fatal
    std::vector<std::string> unresolved_names; // header names that had no address

    /// Distinct recipients across To, Cc and (optionally) Bcc, header order.
    std::vector<CanonicalAddress> recipients(bool include_bcc = true) const;

    /// SHA-1 of the normalized body, the content key used for corpus linking.
    std::string body_digest() const;
};

} // namespace attachnet
