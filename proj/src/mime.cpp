#include "attachnet/mime.hpp"

#include "attachnet/errors.hpp"
#include "attachnet/sha1.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <map>

namespace attachnet {

namespace {

constexpr int kMaxMimeDepth = 20;

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

bool is_hex(char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

int hex_val(char c) {
    if (c >= '0' && c <= '9')
        return c - '0';
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    return c - 'A' + 10;
}

struct HeaderBlock {
    std::vector<std::pair<std::string, std::string>> fields; // lowercase name, unfolded value

    std::string get(std::string_view name) const {
        std::string out;
        for (const auto& [k, v] : fields) {
            if (k == name) {
                if (!out.empty())
                    out += ", ";
                out += v;
            }
        }
        return out;
    }
    bool has(std::string_view name) const {
        return std::any_of(fields.begin(), fields.end(),
                           [&](const auto& f) { return f.first == name; });
    }
};

HeaderBlock parse_headers(std::string_view text) {
    HeaderBlock block;
    std::size_t pos = 0;
    std::string name, value;
    auto flush = [&] {
        if (!name.empty())
            block.fields.emplace_back(lower(name), std::string(trim(value)));
        name.clear();
        value.clear();
    };
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                                               : eol - pos);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        pos = eol == std::string_view::npos ? text.size() : eol + 1;

        if (!line.empty() && (line.front() == ' ' || line.front() == '\t')) {
            value += ' ';
            value += trim(line);
            continue;
        }
        flush();
        std::size_t colon = line.find(':');
        if (colon == std::string_view::npos)
            continue; // garbage line in a header block, skipped
        name = std::string(trim(line.substr(0, colon)));
        value = std::string(trim(line.substr(colon + 1)));
    }
    flush();
    return block;
}

struct ContentType {
    std::string type;    // "text/plain"
    std::string major;   // "text"
    std::map<std::string, std::string> params;
};

ContentType parse_content_type(std::string_view value) {
    ContentType ct;
    std::size_t semi = value.find(';');
    ct.type = lower(trim(value.substr(0, semi)));
    if (ct.type.empty())
        ct.type = "text/plain";
    ct.major = ct.type.substr(0, ct.type.find('/'));
    std::string_view rest = semi == std::string_view::npos ? std::string_view{} : value.substr(semi + 1);
    while (!rest.empty()) {
        std::size_t next = rest.find(';');
        std::string_view item = trim(rest.substr(0, next));
        rest = next == std::string_view::npos ? std::string_view{} : rest.substr(next + 1);
        std::size_t eq = item.find('=');
        if (eq == std::string_view::npos)
            continue;
        std::string key = lower(trim(item.substr(0, eq)));
        std::string_view raw = trim(item.substr(eq + 1));
        if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"')
            raw = raw.substr(1, raw.size() - 2);
        ct.params[key] = std::string(raw);
    }
    return ct;
}

// Replaces bytes that do not form valid UTF-8 with '?', the same convention
// the normalizer applies to quoted-printable escapes.
std::string sanitize_text(std::string_view in) {
    std::string out;
    out.reserve(in.size());
    std::size_t i = 0;
    while (i < in.size()) {
        unsigned char c = static_cast<unsigned char>(in[i]);
        if (c < 0x80) {
            out.push_back(char(c));
            ++i;
            continue;
        }
        int len = 0;
        if ((c & 0xE0) == 0xC0)
            len = 2;
        else if ((c & 0xF0) == 0xE0)
            len = 3;
        else if ((c & 0xF8) == 0xF0)
            len = 4;
        bool ok = len > 0 && i + len <= in.size();
        for (int j = 1; ok && j < len; ++j)
            ok = (static_cast<unsigned char>(in[i + j]) & 0xC0) == 0x80;
        if (ok) {
            out.append(in.substr(i, len));
            i += len;
        } else {
            out.push_back('?');
            ++i;
        }
    }
    return out;
}

void dedupe_addresses(std::vector<CanonicalAddress>& list) {
    std::vector<CanonicalAddress> out;
    for (auto& a : list) {
        bool seen = false;
        for (const auto& b : out)
            seen = seen || (a == b);
        if (!seen)
            out.push_back(std::move(a));
    }
    list = std::move(out);
}

struct PartWalker {
    EmailMessage& msg;
    const ParseOptions& options;

    void leaf(const HeaderBlock& headers, const ContentType& ct, std::string_view body) {
        std::string encoding = lower(trim(headers.get("content-transfer-encoding")));
        std::string decoded;
        if (encoding == "base64") {
            decoded = decode_base64(body);
        } else if (encoding == "quoted-printable") {
            decoded = decode_quoted_printable(body);
        } else if (encoding.empty() || encoding == "7bit" || encoding == "8bit" ||
                   encoding == "binary") {
            decoded = std::string(body);
        } else {
            msg.warnings.push_back("part skipped: unknown transfer encoding '" + encoding + "'");
            return;
        }

        std::string disposition = lower(trim(
            std::string_view(headers.get("content-disposition")).substr(0, 64)));
        bool is_attachment_disposition = disposition.rfind("attachment", 0) == 0;

        std::optional<std::string> filename;
        {
            auto disp = parse_content_type(headers.get("content-disposition"));
            if (auto it = disp.params.find("filename"); it != disp.params.end())
                filename = it->second;
            else if (auto it2 = ct.params.find("name"); it2 != ct.params.end())
                filename = it2->second;
        }

        bool is_attachment =
            is_attachment_disposition || filename.has_value() || ct.major != "text";
        if (is_attachment) {
            AttachmentRecord rec;
            rec.digest = sha1_hex(decoded);
            rec.size_bytes = decoded.size();
            rec.mime_type = ct.type;
            rec.media_class = media_class_for(ct.type, filename.has_value());
            rec.filename = std::move(filename);
            if (options.keep_attachment_bytes)
                rec.raw_bytes = std::move(decoded);
            msg.attachments.push_back(std::move(rec));
        } else if (ct.type == "text/plain") {
            msg.body_text += sanitize_text(decoded);
        }
        // other inline text subtypes (text/html etc.) carry no body text
    }

    void walk(const HeaderBlock& headers, std::string_view body, int depth) {
        ContentType ct = parse_content_type(headers.get("content-type"));
        if (ct.major != "multipart") {
            leaf(headers, ct, body);
            return;
        }
        if (depth >= kMaxMimeDepth) {
            msg.warnings.push_back("part skipped: multipart nesting too deep");
            return;
        }
        auto bit = ct.params.find("boundary");
        if (bit == ct.params.end() || bit->second.empty()) {
            msg.warnings.push_back("multipart without boundary treated as text");
            msg.body_text += sanitize_text(body);
            return;
        }
        const std::string open = "--" + bit->second;

        // delimiter lines tolerate transport padding after the boundary
        auto classify = [&open](std::string_view bare) -> int {
            while (!bare.empty() && (bare.back() == ' ' || bare.back() == '\t'))
                bare.remove_suffix(1);
            if (bare.rfind(open, 0) != 0)
                return 0;
            std::string_view rest = bare.substr(open.size());
            if (rest.empty())
                return 1; // part delimiter
            if (rest == "--")
                return 2; // terminator
            return 0;
        };

        std::vector<std::string> parts;
        std::string current;
        bool in_part = false;
        bool done = false;
        std::size_t pos = 0;
        while (pos <= body.size() && !done) {
            std::size_t eol = body.find('\n', pos);
            std::string_view line =
                body.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos + 1);
            std::string_view bare = line;
            while (!bare.empty() && (bare.back() == '\n' || bare.back() == '\r'))
                bare.remove_suffix(1);
            int kind = classify(bare);
            if (kind != 0) {
                if (in_part) {
                    // the newline before a boundary belongs to the boundary
                    if (!current.empty() && current.back() == '\n') {
                        current.pop_back();
                        if (!current.empty() && current.back() == '\r')
                            current.pop_back();
                    }
                    parts.push_back(std::move(current));
                    current.clear();
                }
                in_part = kind == 1;
                done = kind == 2;
            } else if (in_part) {
                current.append(line);
            }
            if (eol == std::string_view::npos)
                break;
            pos = eol + 1;
        }
        if (in_part && !done) {
            msg.warnings.push_back("multipart not terminated");
            parts.push_back(std::move(current));
        }

        for (const std::string& part : parts) {
            std::size_t sep = part.find("\n\n");
            std::size_t sep_crlf = part.find("\r\n\r\n");
            std::size_t header_end, body_start;
            if (sep_crlf != std::string::npos && (sep == std::string::npos || sep_crlf < sep)) {
                header_end = sep_crlf;
                body_start = sep_crlf + 4;
            } else if (sep != std::string::npos) {
                header_end = sep;
                body_start = sep + 2;
            } else {
                header_end = part.size();
                body_start = part.size();
            }
            HeaderBlock sub = parse_headers(std::string_view(part).substr(0, header_end));
            walk(sub, std::string_view(part).substr(body_start), depth + 1);
        }
    }
};

void parse_recipient_header(const HeaderBlock& headers, const char* name,
                            std::vector<CanonicalAddress>& out, std::vector<std::string>& unresolved,
                            const NameDirectory& dir) {
    std::string value = headers.get(name);
    if (value.empty())
        return;
    AddressParse parsed = parse_address_header(value, dir);
    out = std::move(parsed.addresses);
    dedupe_addresses(out);
    for (auto& u : parsed.unresolved)
        unresolved.push_back(std::move(u));
}

} // namespace

const char* to_string(MediaClass cls) {
    switch (cls) {
    case MediaClass::document:
        return "document";
    case MediaClass::multimedia:
        return "multimedia";
    case MediaClass::other:
        return "other";
    }
    return "other";
}

MediaClass media_class_for(std::string_view mime_type, bool has_filename) {
    std::string t = lower(trim(mime_type));
    if (t.rfind("image/", 0) == 0 || t.rfind("audio/", 0) == 0 || t.rfind("video/", 0) == 0)
        return MediaClass::multimedia;
    static const char* kDocumentTypes[] = {
        "application/pdf",           "application/msword",
        "application/vnd.ms-excel",  "application/vnd.ms-powerpoint",
        "application/rtf",           "application/postscript",
        "application/x-rtf",         "text/rtf",
    };
    for (const char* doc : kDocumentTypes)
        if (t == doc)
            return MediaClass::document;
    if (t.rfind("application/vnd.openxmlformats-officedocument.", 0) == 0 ||
        t.rfind("application/vnd.oasis.opendocument.", 0) == 0)
        return MediaClass::document;
    if (t.rfind("text/", 0) == 0 && has_filename)
        return MediaClass::document;
    return MediaClass::other;
}

std::vector<CanonicalAddress> EmailMessage::recipients(bool include_bcc) const {
    std::vector<CanonicalAddress> out = to;
    out.insert(out.end(), cc.begin(), cc.end());
    if (include_bcc)
        out.insert(out.end(), bcc.begin(), bcc.end());
    dedupe_addresses(out);
    return out;
}

std::string EmailMessage::body_digest() const {
    return sha1_hex(normalize_body(body_text));
}

std::string normalize_body(std::string_view text) {
    // soft line breaks first, then whitespace removal, then =XX escapes,
    // then collapsing '?' runs
    std::string step1;
    step1.reserve(text.size());
    for (std::size_t i = 0; i < text.size();) {
        if (text[i] == '=' && i + 1 < text.size() &&
            (text[i + 1] == '\n' || (text[i + 1] == '\r' && i + 2 < text.size() && text[i + 2] == '\n'))) {
            step1.push_back('?');
            i += text[i + 1] == '\n' ? 2 : 3;
        } else {
            step1.push_back(text[i]);
            ++i;
        }
    }

    std::string step2;
    step2.reserve(step1.size());
    for (char c : step1)
        if (!std::isspace(static_cast<unsigned char>(c)))
            step2.push_back(c);

    std::string step3;
    step3.reserve(step2.size());
    for (std::size_t i = 0; i < step2.size();) {
        if (step2[i] == '=' && i + 2 < step2.size() && is_hex(step2[i + 1]) && is_hex(step2[i + 2])) {
            step3.push_back('?');
            i += 3;
        } else {
            step3.push_back(step2[i]);
            ++i;
        }
    }

    std::string out;
    out.reserve(step3.size());
    for (char c : step3) {
        if (c == '?' && !out.empty() && out.back() == '?')
            continue;
        out.push_back(c);
    }
    return out;
}

std::string decode_base64(std::string_view text) {
    static constexpr auto table = [] {
        std::array<int, 256> t{};
        t.fill(-1);
        const char* alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
        for (int i = 0; i < 64; ++i)
            t[static_cast<unsigned char>(alphabet[i])] = i;
        return t;
    }();
    std::string out;
    out.reserve(text.size() / 4 * 3);
    unsigned acc = 0;
    int bits = 0;
    for (char c : text) {
        if (c == '=')
            break;
        int v = table[static_cast<unsigned char>(c)];
        if (v < 0)
            continue; // whitespace and stray characters are skipped
        acc = (acc << 6) | unsigned(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(char((acc >> bits) & 0xFF));
        }
    }
    return out;
}

std::string encode_base64(std::string_view bytes, std::size_t wrap_column) {
    static const char* alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    std::size_t col = 0;
    auto put = [&](char c) {
        out.push_back(c);
        if (wrap_column && ++col == wrap_column) {
            out.push_back('\n');
            col = 0;
        }
    };
    std::size_t i = 0;
    while (i + 2 < bytes.size()) {
        unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                     (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                     static_cast<unsigned char>(bytes[i + 2]);
        put(alphabet[(v >> 18) & 63]);
        put(alphabet[(v >> 12) & 63]);
        put(alphabet[(v >> 6) & 63]);
        put(alphabet[v & 63]);
        i += 3;
    }
    if (i + 1 == bytes.size()) {
        unsigned v = static_cast<unsigned char>(bytes[i]) << 16;
        put(alphabet[(v >> 18) & 63]);
        put(alphabet[(v >> 12) & 63]);
        put('=');
        put('=');
    } else if (i + 2 == bytes.size()) {
        unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                     (static_cast<unsigned char>(bytes[i + 1]) << 8);
        put(alphabet[(v >> 18) & 63]);
        put(alphabet[(v >> 12) & 63]);
        put(alphabet[(v >> 6) & 63]);
        put('=');
    }
    if (wrap_column && col != 0)
        out.push_back('\n');
    return out;
}

std::string decode_quoted_printable(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size();) {
        char c = text[i];
        if (c != '=') {
            out.push_back(c);
            ++i;
            continue;
        }
        if (i + 1 < text.size() && text[i + 1] == '\n') {
            i += 2; // soft break
        } else if (i + 2 < text.size() && text[i + 1] == '\r' && text[i + 2] == '\n') {
            i += 3; // soft break
        } else if (i + 2 < text.size() && is_hex(text[i + 1]) && is_hex(text[i + 2])) {
            out.push_back(char(hex_val(text[i + 1]) * 16 + hex_val(text[i + 2])));
            i += 3;
        } else {
            out.push_back(c); // bare '=' kept literal
            ++i;
        }
    }
    return out;
}

EmailMessage parse_message(std::string_view raw, std::string custodian, std::string folder,
                           const ParseOptions& options) {
    std::size_t sep_lf = raw.find("\n\n");
    std::size_t sep_crlf = raw.find("\r\n\r\n");
    std::size_t header_end, body_start;
    if (sep_crlf != std::string_view::npos && (sep_lf == std::string_view::npos || sep_crlf < sep_lf)) {
        header_end = sep_crlf;
        body_start = sep_crlf + 4;
    } else if (sep_lf != std::string_view::npos) {
        header_end = sep_lf;
        body_start = sep_lf + 2;
    } else {
        throw UnparseableMessage("no header/body separator");
    }

    EmailMessage msg;
    msg.custodian = std::move(custodian);
    msg.folder = std::move(folder);
    msg.raw_size_bytes = raw.size();

    HeaderBlock headers = parse_headers(raw.substr(0, header_end));
    NameDirectory empty_dir;
    const NameDirectory& dir = options.directory ? *options.directory : empty_dir;

    std::string id = std::string(trim(headers.get("message-id")));
    if (id.size() >= 2 && id.front() == '<' && id.back() == '>')
        id = id.substr(1, id.size() - 2);
    if (id.empty())
        id = "sha1:" + sha1_hex(raw);
    msg.message_id = std::move(id);

    msg.subject = std::string(trim(headers.get("subject")));
    msg.date = parse_date(headers.get("date"));

    {
        AddressParse from = parse_address_header(headers.get("from"), dir);
        if (!from.addresses.empty())
            msg.sender = from.addresses.front();
        for (auto& u : from.unresolved)
            msg.unresolved_names.push_back(std::move(u));
    }
    parse_recipient_header(headers, "to", msg.to, msg.unresolved_names, dir);
    parse_recipient_header(headers, "cc", msg.cc, msg.unresolved_names, dir);
    parse_recipient_header(headers, "bcc", msg.bcc, msg.unresolved_names, dir);

    PartWalker walker{msg, options};
    walker.walk(headers, raw.substr(body_start), 0);
    return msg;
}

std::string to_eml(const EmailMessage& message) {
    std::string out;
    auto header = [&](std::string_view name, std::string_view value) {
        if (!value.empty()) {
            out += name;
            out += ": ";
            out += value;
            out += "\n";
        }
    };
    auto address_list = [](const std::vector<CanonicalAddress>& list) {
        std::string v;
        for (const auto& a : list) {
            if (!v.empty())
                v += ", ";
            v += a.rendered();
        }
        return v;
    };

    header("Message-ID", "<" + message.message_id + ">");
    if (message.date.valid) {
        int y, mo, d;
        civil_from_days(message.date.wall_seconds / 86400, y, mo, d);
        std::int64_t rem = message.date.wall_seconds % 86400;
        static const char* months[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                       "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
        char buf[64];
        int off = message.date.zone_offset_minutes.value_or(0);
        char sign = off < 0 ? '-' : '+';
        int a = std::abs(off);
        std::snprintf(buf, sizeof(buf), "%d %s %04d %02d:%02d:%02d %c%02d%02d", d, months[mo - 1],
                      y, int(rem / 3600), int((rem % 3600) / 60), int(rem % 60), sign, a / 60,
                      a % 60);
        header("Date", buf);
    }
    if (message.sender)
        header("From", message.sender->rendered());
    header("To", address_list(message.to));
    header("Cc", address_list(message.cc));
    header("Bcc", address_list(message.bcc));
    header("Subject", message.subject);

    if (message.attachments.empty()) {
        header("Content-Type", "text/plain");
        out += "\n";
        out += message.body_text;
        if (out.empty() || out.back() != '\n')
            out += "\n";
        return out;
    }

    std::string boundary = "=_part_" + sha1_hex(message.message_id + message.body_text).substr(0, 16);
    header("MIME-Version", "1.0");
    header("Content-Type", "multipart/mixed; boundary=\"" + boundary + "\"");
    out += "\n";
    out += "--" + boundary + "\n";
    out += "Content-Type: text/plain\n\n";
    out += message.body_text;
    out += "\n";
    for (const auto& att : message.attachments) {
        out += "--" + boundary + "\n";
        out += "Content-Type: " + att.mime_type;
        if (att.filename)
            out += "; name=\"" + *att.filename + "\"";
        out += "\n";
        out += "Content-Transfer-Encoding: base64\n";
        out += "Content-Disposition: attachment";
        if (att.filename)
            out += "; filename=\"" + *att.filename + "\"";
        out += "\n\n";
        out += encode_base64(att.raw_bytes);
    }
    out += "--" + boundary + "--\n";
    return out;
}

} // namespace attachnet
