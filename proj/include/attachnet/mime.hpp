#pragma once

#include "attachnet/address.hpp"
#include "attachnet/message.hpp"

#include <string>
#include <string_view>

namespace attachnet {

struct ParseOptions {
    const NameDirectory* directory = nullptr; // bare-name resolution, may be null
    bool keep_attachment_bytes = false;       // needed for re-serialization only
};

/// Parses one raw RFC-822 style message (header block, blank line, body)
/// into its MIME parts. Attachment parts are any with an attachment
/// disposition, any with a filename parameter, and any non-text leaf.
/// Throws UnparseableMessage when no header/body separator exists; per-part
/// decode problems are recorded as warnings and the part is skipped.
EmailMessage parse_message(std::string_view raw, std::string custodian, std::string folder,
                           const ParseOptions& options = {});

/// Content normalization used for body digests: whitespace is removed,
/// quoted-printable escapes (=XX pairs and soft line breaks) become '?',
/// and runs of '?' collapse to one. Idempotent.
std::string normalize_body(std::string_view text);

/// Minimal serialization back to an RFC-822 message; attachments are
/// re-encoded as base64. parse_message(to_eml(m)) preserves the structured
/// fields (id, addresses, digests).
std::string to_eml(const EmailMessage& message);

// Transfer decodings, exposed for fixtures and tests.
std::string decode_base64(std::string_view text);
std::string decode_quoted_printable(std::string_view text);
std::string encode_base64(std::string_view bytes, std::size_t wrap_column = 72);

} // namespace attachnet
