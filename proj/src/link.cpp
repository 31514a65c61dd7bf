#include "attachnet/link.hpp"

#include "attachnet/mime.hpp"
#include "attachnet/sha1.hpp"

#include <algorithm>
#include <regex>

namespace attachnet {

const char* to_string(MatchMode m) {
    switch (m) {
    case MatchMode::full_key:
        return "full_key";
    case MatchMode::downgraded_key:
        return "downgraded_key";
    case MatchMode::truncated_body:
        return "truncated_body";
    }
    return "full_key";
}

namespace {

constexpr char kSep = '\x1f';

std::string trim_copy(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

struct Keyed {
    std::size_t index;
    std::string id;
    std::string custodian;
    std::string folder;
    std::string subject;
    std::string body_norm;
    std::string body_digest;
    bool date_valid = false;
    std::int64_t date_utc = 0;               // plain conversion
    std::vector<std::int64_t> candidates;    // plain + repairs (B side only)
};

std::vector<Keyed> key_messages(const std::vector<EmailMessage>& corpus, bool is_b,
                                const LinkOptions& options) {
    std::optional<std::regex> trailer;
    if (is_b && options.strip_trailer_regex)
        trailer.emplace(*options.strip_trailer_regex);

    std::vector<Keyed> out;
    out.reserve(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const EmailMessage& msg = corpus[i];
        Keyed k;
        k.index = i;
        k.id = msg.message_id;
        k.custodian = msg.custodian;
        k.folder = msg.folder;
        k.subject = trim_copy(msg.subject);

        std::string body = msg.body_text;
        if (trailer) {
            std::smatch m;
            if (std::regex_search(body, m, *trailer))
                body.resize(static_cast<std::size_t>(m.position(0)));
        }
        k.body_norm = normalize_body(body);
        k.body_digest = sha1_hex(k.body_norm);

        if (msg.date.valid) {
            k.date_valid = true;
            k.date_utc = msg.date.utc_seconds();
            if (is_b) {
                std::vector<int> repairs = options.repair_offsets
                                               ? *options.repair_offsets
                                               : default_repair_offsets(msg.date);
                if (auto it = options.folder_offsets.find(msg.folder);
                    it != options.folder_offsets.end())
                    repairs.push_back(it->second);
                k.candidates = normalize_date_gmt(msg.date, repairs);
            } else {
                k.candidates = {k.date_utc};
            }
        }
        out.push_back(std::move(k));
    }
    std::sort(out.begin(), out.end(), [](const Keyed& x, const Keyed& y) { return x.id < y.id; });
    return out;
}

} // namespace

LinkReport link_corpora(const std::vector<EmailMessage>& corpus_a,
                        std::vector<EmailMessage>& corpus_b, const LinkOptions& options) {
    std::vector<Keyed> keyed_a = key_messages(corpus_a, false, options);
    std::vector<Keyed> keyed_b = key_messages(corpus_b, true, options);

    LinkReport report;
    std::vector<bool> matched_a(keyed_a.size(), false);
    std::vector<bool> matched_b(keyed_b.size(), false);

    // B candidates indexed per pass; values are positions into keyed_b,
    // already in id order
    auto build_index = [&](auto key_fn) {
        std::map<std::string, std::vector<std::size_t>> index;
        for (std::size_t bi = 0; bi < keyed_b.size(); ++bi) {
            const Keyed& kb = keyed_b[bi];
            if (!kb.date_valid)
                continue;
            for (std::int64_t cand : kb.candidates)
                index[key_fn(kb, cand)].push_back(bi);
        }
        return index;
    };

    auto run_pass = [&](MatchMode mode, auto key_fn, auto accepts) {
        auto index = build_index(key_fn);
        for (std::size_t ai = 0; ai < keyed_a.size(); ++ai) {
            if (matched_a[ai])
                continue;
            const Keyed& ka = keyed_a[ai];
            if (!ka.date_valid)
                continue;
            auto it = index.find(key_fn(ka, ka.date_utc));
            if (it == index.end())
                continue;
            std::size_t chosen = keyed_b.size();
            std::size_t alternatives = 0;
            for (std::size_t bi : it->second) {
                if (matched_b[bi] || !accepts(ka, keyed_b[bi]))
                    continue;
                if (chosen == keyed_b.size())
                    chosen = bi;
                else if (bi != chosen)
                    ++alternatives;
            }
            if (chosen == keyed_b.size())
                continue;
            if (alternatives > 0)
                ++report.ambiguous;
            matched_a[ai] = true;
            matched_b[chosen] = true;
            report.matched.push_back({ka.id, keyed_b[chosen].id, mode});

            // the linked message gets the authoritative headers
            const EmailMessage& src = corpus_a[ka.index];
            EmailMessage& dst = corpus_b[keyed_b[chosen].index];
            dst.sender = src.sender;
            dst.to = src.to;
            dst.cc = src.cc;
            dst.bcc = src.bcc;
        }
    };

    auto accept_all = [](const Keyed&, const Keyed&) { return true; };

    run_pass(
        MatchMode::full_key,
        [&](const Keyed& k, std::int64_t date) {
            std::string key;
            key += k.custodian;
            key += kSep;
            key += k.folder;
            key += kSep;
            key += k.subject;
            key += kSep;
            key += std::to_string(date);
            key += kSep;
            key += k.body_digest;
            return key;
        },
        accept_all);

    run_pass(
        MatchMode::downgraded_key,
        [&](const Keyed& k, std::int64_t date) {
            return k.subject + kSep + std::to_string(date) + kSep + k.body_digest;
        },
        accept_all);

    run_pass(
        MatchMode::truncated_body,
        [&](const Keyed& k, std::int64_t date) { return k.subject + kSep + std::to_string(date); },
        [&](const Keyed& ka, const Keyed& kb) {
            if (kb.body_norm.size() < static_cast<std::size_t>(options.min_truncation_len))
                return false;
            if (kb.body_norm.size() > ka.body_norm.size())
                return false;
            return ka.body_norm.compare(0, kb.body_norm.size(), kb.body_norm) == 0;
        });

    for (std::size_t ai = 0; ai < keyed_a.size(); ++ai)
        if (!matched_a[ai])
            report.unmatched_a.push_back(keyed_a[ai].id);
    for (std::size_t bi = 0; bi < keyed_b.size(); ++bi)
        if (!matched_b[bi])
            report.unmatched_b.push_back(keyed_b[bi].id);
    report.match_rate = corpus_a.empty()
                            ? 0.0
                            : static_cast<double>(report.matched.size()) /
                                  static_cast<double>(corpus_a.size());
    return report;
}

} // namespace attachnet
