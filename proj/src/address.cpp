#include "attachnet/address.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace attachnet {

namespace {

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

std::string_view strip_punct(std::string_view s) {
    s = trim(s);
    while (!s.empty() && (s.back() == ',' || s.back() == ';' || s.back() == '.' || s.back() == '>'))
        s.remove_suffix(1);
    while (!s.empty() && (s.front() == '<' || s.front() == ',' || s.front() == ';'))
        s.remove_prefix(1);
    return trim(s);
}

int word_count(std::string_view s) {
    int n = 0;
    bool in_word = false;
    for (char c : s) {
        bool sp = std::isspace(static_cast<unsigned char>(c));
        if (!sp && !in_word)
            ++n;
        in_word = !sp;
    }
    return n;
}

std::vector<std::string> split_words(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty())
                out.push_back(std::move(cur)), cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty())
        out.push_back(std::move(cur));
    return out;
}

bool is_x500(std::string_view s) {
    s = trim(s);
    if (s.empty() || s.front() != '/')
        return false;
    auto l = lower(s);
    return l.find("cn=") != std::string::npos || l.find("/o=") != std::string::npos;
}

// Last CN= segment of an X.500 handle, e.g. /O=ENRON/OU=NA/CN=RECIPIENTS/CN=Pallen -> Pallen
std::string x500_alias(std::string_view s) {
    auto l = lower(s);
    std::size_t pos = l.rfind("cn=");
    if (pos == std::string::npos)
        return {};
    std::string_view rest = s.substr(pos + 3);
    std::size_t end = rest.find_first_of("/>");
    if (end != std::string_view::npos)
        rest = rest.substr(0, end);
    return std::string(trim(rest));
}

struct Token {
    enum Kind { Phrase, Quoted, Angle, Comma } kind;
    std::string text;
};

std::vector<Token> tokenize(std::string_view raw) {
    std::vector<Token> out;
    std::string phrase;
    auto flush_phrase = [&] {
        auto t = trim(phrase);
        if (!t.empty())
            out.push_back({Token::Phrase, std::string(t)});
        phrase.clear();
    };
    std::size_t i = 0;
    while (i < raw.size()) {
        char c = raw[i];
        if (c == '"') {
            flush_phrase();
            std::size_t end = raw.find('"', i + 1);
            if (end == std::string_view::npos) {
                phrase.append(raw.substr(i + 1));
                i = raw.size();
                flush_phrase();
                break;
            }
            out.push_back({Token::Quoted, std::string(trim(raw.substr(i + 1, end - i - 1)))});
            i = end + 1;
        } else if (c == '<') {
            flush_phrase();
            std::size_t end = raw.find('>', i + 1);
            if (end == std::string_view::npos)
                end = raw.size();
            out.push_back({Token::Angle, std::string(trim(raw.substr(i + 1, end - i - 1)))});
            i = (end < raw.size()) ? end + 1 : raw.size();
        } else if (c == ',' || c == ';') {
            flush_phrase();
            out.push_back({Token::Comma, {}});
            ++i;
        } else {
            phrase.push_back(c);
            ++i;
        }
    }
    flush_phrase();
    return out;
}

} // namespace

CanonicalAddress make_address(std::string_view local, std::string_view domain) {
    return CanonicalAddress{lower(trim(local)), lower(trim(domain)), std::nullopt};
}

std::optional<CanonicalAddress> parse_single_address(std::string_view token) {
    std::string_view s = strip_punct(token);
    if (s.find('@') == std::string_view::npos)
        return std::nullopt;
    // Headers sometimes embed the address in a phrase; take the word
    // that carries the '@'.
    if (s.find(' ') != std::string_view::npos || s.find('\t') != std::string_view::npos) {
        for (const auto& w : split_words(s)) {
            if (w.find('@') != std::string::npos)
                return parse_single_address(w);
        }
        return std::nullopt;
    }
    if (s.size() > 7 && lower(s.substr(0, 7)) == "mailto:")
        s.remove_prefix(7);
    std::size_t at = s.rfind('@');
    std::string_view local = trim(s.substr(0, at));
    std::string_view domain = trim(s.substr(at + 1));

    // canonicalization must be idempotent: trim edge punctuation the same
    // way a re-parse of the rendered form would, and reject anything the
    // tokenizer treats as structure
    auto is_edge = [](char c) {
        return c == '<' || c == '>' || c == ',' || c == ';' || c == '"' || c == '\'' ||
               c == ' ' || c == '\t';
    };
    auto trim_edges = [&](std::string_view v) {
        while (!v.empty() && is_edge(v.front()))
            v.remove_prefix(1);
        while (!v.empty() && is_edge(v.back()))
            v.remove_suffix(1);
        return v;
    };
    // run to a fixpoint so the rendered form re-parses to itself (edge
    // punctuation and trailing domain dots can alternate)
    for (bool changed = true; changed;) {
        changed = false;
        std::string_view l = trim_edges(local);
        std::string_view d = trim_edges(domain);
        while (!d.empty() && d.back() == '.')
            d.remove_suffix(1);
        changed = l != local || d != domain;
        local = l;
        domain = d;
    }
    auto usable = [](std::string_view v) {
        if (v.empty())
            return false;
        for (char c : v)
            if (c == ' ' || c == '\t' || c == '<' || c == '>' || c == '"' || c == ',' ||
                c == ';' || c == '(' || c == ')' || c == '@')
                return false;
        return true;
    };
    if (!usable(local) || !usable(domain))
        return std::nullopt;
    return make_address(local, domain);
}

std::string NameDirectory::normalize_name(std::string_view name) {
    std::string out;
    out.reserve(name.size());
    bool pending_space = false;
    for (char raw : name) {
        unsigned char c = static_cast<unsigned char>(raw);
        if (std::isspace(c) || raw == '.' || raw == ',') {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

void NameDirectory::add(std::string_view display_name, CanonicalAddress addr) {
    std::string key = normalize_name(display_name);
    if (key.empty())
        return;
    // a "Last, First" row also answers to "First Last"
    if (std::size_t comma = display_name.find(','); comma != std::string_view::npos) {
        std::string reordered = normalize_name(display_name.substr(comma + 1));
        std::string last = normalize_name(display_name.substr(0, comma));
        if (!reordered.empty() && !last.empty())
            by_name_.emplace(reordered + " " + last, addr);
    }
    by_name_.emplace(std::move(key), std::move(addr));
}

std::optional<CanonicalAddress> NameDirectory::resolve(std::string_view name) const {
    auto it = by_name_.find(normalize_name(name));
    if (it == by_name_.end())
        return std::nullopt;
    return it->second;
}

NameDirectory NameDirectory::from_csv(std::istream& in) {
    NameDirectory dir;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        auto t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        std::string name;
        std::string_view rest;
        if (t.front() == '"') {
            std::size_t end = t.find('"', 1);
            if (end == std::string_view::npos)
                continue;
            name = std::string(t.substr(1, end - 1));
            std::size_t comma = t.find(',', end);
            if (comma == std::string_view::npos)
                continue;
            rest = t.substr(comma + 1);
        } else {
            std::size_t comma = t.find(',');
            if (comma == std::string_view::npos)
                continue;
            name = std::string(t.substr(0, comma));
            rest = t.substr(comma + 1);
        }
        auto addr = parse_single_address(rest);
        if (addr)
            dir.add(name, *addr);
    }
    return dir;
}

NameDirectory NameDirectory::from_csv_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in)
        throw std::runtime_error("cannot open name directory: " + file.string());
    return from_csv(in);
}

namespace {

struct HeaderParser {
    const NameDirectory& dir;
    AddressParse result;

    void emit_address(CanonicalAddress addr, std::optional<std::string> display) {
        if (!addr.valid())
            return;
        if (display && !display->empty())
            addr.display_name = std::move(display);
        for (const auto& existing : result.addresses)
            if (existing == addr)
                return;
        result.addresses.push_back(std::move(addr));
    }

    // A name with no domain: directory first, then the X.500 alias, else unresolved.
    void emit_name(const std::string& name, const std::string& alias = {}) {
        if (name.empty() && alias.empty())
            return;
        if (auto hit = dir.resolve(name)) {
            emit_address(*hit, name);
            return;
        }
        if (!alias.empty()) {
            if (auto hit = dir.resolve(alias)) {
                emit_address(*hit, name.empty() ? alias : name);
                return;
            }
        }
        result.unresolved.push_back(name.empty() ? alias : name);
    }

    // Greedy longest-match grouping of a run of single-word tokens against
    // the directory ("Brad,Alford,Phillip,K,Allen,..."). For two-word
    // windows "Last,First" order is also tried.
    void munch_word_run(const std::vector<std::string>& words) {
        std::size_t pos = 0;
        while (pos < words.size()) {
            bool hit = false;
            for (std::size_t w = std::min<std::size_t>(4, words.size() - pos); w >= 1 && !hit; --w) {
                std::string joined;
                for (std::size_t j = 0; j < w; ++j) {
                    if (j)
                        joined += ' ';
                    joined += words[pos + j];
                }
                if (auto a = dir.resolve(joined)) {
                    emit_address(*a, joined);
                    pos += w;
                    hit = true;
                    break;
                }
                if (w == 2) {
                    std::string reversed = words[pos + 1] + " " + words[pos];
                    if (auto a = dir.resolve(reversed)) {
                        emit_address(*a, reversed);
                        pos += w;
                        hit = true;
                        break;
                    }
                }
            }
            if (!hit) {
                result.unresolved.push_back(words[pos]);
                ++pos;
            }
        }
    }

    // Comma-separated bare-name groups collected between structured tokens.
    void flush_name_groups(std::vector<std::string>& groups, const std::string& alias = {}) {
        if (groups.empty()) {
            if (!alias.empty())
                emit_name({}, alias);
            return;
        }
        bool all_single = true;
        for (const auto& g : groups)
            all_single = all_single && word_count(g) == 1;

        if (groups.size() == 1) {
            emit_name(groups[0], alias);
        } else if (groups.size() == 2 && word_count(groups[0]) == 1) {
            // "Allen, Phillip K." -> Phillip K. Allen
            emit_name(groups[1] + " " + groups[0], alias);
        } else if (all_single) {
            std::vector<std::string> words;
            for (auto& g : groups)
                words.push_back(g);
            munch_word_run(words);
        } else {
            // Mixed list: pair a lone surname with the following group,
            // keep multi-word groups as whole names.
            std::size_t i = 0;
            while (i < groups.size()) {
                bool last = i + 1 == groups.size();
                if (word_count(groups[i]) == 1 && !last) {
                    emit_name(groups[i + 1] + " " + groups[i], last ? alias : std::string{});
                    i += 2;
                } else {
                    emit_name(groups[i], last ? alias : std::string{});
                    ++i;
                }
            }
        }
        groups.clear();
    }

    void run(const std::vector<Token>& tokens) {
        std::vector<std::string> name_groups;
        std::size_t i = 0;
        while (i < tokens.size()) {
            const Token& t = tokens[i];
            switch (t.kind) {
            case Token::Angle: {
                if (t.text.find('@') != std::string::npos) {
                    flush_name_groups(name_groups);
                    emit_address(parse_single_address(t.text).value_or(CanonicalAddress{}),
                                 std::nullopt);
                    ++i;
                } else if (is_x500(t.text)) {
                    // Alias handle finishes whatever name preceded it.
                    flush_name_groups(name_groups, x500_alias(t.text));
                    ++i;
                } else if (i + 2 < tokens.size() && tokens[i + 1].kind == Token::Comma &&
                           tokens[i + 2].kind == Token::Quoted) {
                    // <Allen>,"Phillip K." [</O=...CN=Pallen>]
                    flush_name_groups(name_groups);
                    std::string name = tokens[i + 2].text + " " + t.text;
                    std::string alias;
                    if (i + 3 < tokens.size() && tokens[i + 3].kind == Token::Angle &&
                        is_x500(tokens[i + 3].text)) {
                        alias = x500_alias(tokens[i + 3].text);
                        i += 4;
                    } else {
                        i += 3;
                    }
                    emit_name(name, alias);
                } else {
                    flush_name_groups(name_groups);
                    name_groups.push_back(t.text);
                    ++i;
                }
                break;
            }
            case Token::Quoted: {
                if (i + 1 < tokens.size() && tokens[i + 1].kind == Token::Angle &&
                    tokens[i + 1].text.find('@') != std::string::npos) {
                    flush_name_groups(name_groups);
                    if (auto a = parse_single_address(tokens[i + 1].text))
                        emit_address(*a, t.text);
                    i += 2;
                } else if (t.text.find('@') != std::string::npos) {
                    flush_name_groups(name_groups);
                    if (auto a = parse_single_address(t.text))
                        emit_address(*a, std::nullopt);
                    ++i;
                } else {
                    flush_name_groups(name_groups);
                    name_groups.push_back(t.text);
                    ++i;
                }
                break;
            }
            case Token::Phrase: {
                if (t.text.find('@') != std::string::npos) {
                    flush_name_groups(name_groups);
                    if (i + 1 < tokens.size() && tokens[i + 1].kind == Token::Angle &&
                        tokens[i + 1].text.find('@') != std::string::npos) {
                        // display phrase before a bracketed address
                        if (auto a = parse_single_address(tokens[i + 1].text))
                            emit_address(*a, t.text);
                        i += 2;
                    } else {
                        if (auto a = parse_single_address(t.text))
                            emit_address(*a, std::nullopt);
                        ++i;
                    }
                } else if (i + 1 < tokens.size() && tokens[i + 1].kind == Token::Angle &&
                           tokens[i + 1].text.find('@') != std::string::npos) {
                    flush_name_groups(name_groups);
                    if (auto a = parse_single_address(tokens[i + 1].text))
                        emit_address(*a, t.text);
                    i += 2;
                } else {
                    name_groups.push_back(t.text);
                    ++i;
                }
                break;
            }
            case Token::Comma:
                ++i;
                break;
            }
        }
        flush_name_groups(name_groups);
    }
};

} // namespace

AddressParse parse_address_header(std::string_view raw, const NameDirectory& directory) {
    HeaderParser p{directory, {}};
    p.run(tokenize(raw));
    return p.result;
}

} // namespace attachnet
