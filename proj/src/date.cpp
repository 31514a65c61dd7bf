#include "attachnet/date.hpp"

#include "attachnet/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>

namespace attachnet {

std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& year, int& month, int& day) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    day = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    month = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
    year = static_cast<int>(y + (month <= 2));
}

namespace {

const std::array<const char*, 12> kMonths = {"jan", "feb", "mar", "apr", "may", "jun",
                                             "jul", "aug", "sep", "oct", "nov", "dec"};

int month_from_name(std::string_view w) {
    if (w.size() < 3)
        return 0;
    char a = char(std::tolower(static_cast<unsigned char>(w[0])));
    char b = char(std::tolower(static_cast<unsigned char>(w[1])));
    char c = char(std::tolower(static_cast<unsigned char>(w[2])));
    for (int i = 0; i < 12; ++i)
        if (kMonths[i][0] == a && kMonths[i][1] == b && kMonths[i][2] == c)
            return i + 1;
    return 0;
}

std::optional<int> zone_by_name(std::string_view w) {
    struct Zone {
        const char* name;
        int minutes;
    };
    static const Zone kZones[] = {{"UT", 0},     {"UTC", 0},    {"GMT", 0},    {"Z", 0},
                                  {"EST", -300}, {"EDT", -240}, {"CST", -360}, {"CDT", -300},
                                  {"MST", -420}, {"MDT", -360}, {"PST", -480}, {"PDT", -420}};
    for (const auto& z : kZones) {
        if (w.size() == std::string_view(z.name).size() &&
            std::equal(w.begin(), w.end(), z.name,
                       [](char x, char y) { return std::toupper(static_cast<unsigned char>(x)) == y; }))
            return z.minutes;
    }
    return std::nullopt;
}

bool all_digits(std::string_view w) {
    return !w.empty() &&
           std::all_of(w.begin(), w.end(),
                       [](unsigned char c) { return std::isdigit(c) != 0; });
}

int to_int(std::string_view w) {
    int v = 0;
    for (char c : w)
        v = v * 10 + (c - '0');
    return v;
}

struct Pieces {
    int year = -1, month = 0, day = -1;
    int hour = 0, minute = 0, second = 0;
    bool have_time = false;
    std::optional<int> zone;
};

// "+0530" / "-0500" / "+05:30"
std::optional<int> numeric_zone(std::string_view w) {
    if (w.size() < 3 || (w[0] != '+' && w[0] != '-'))
        return std::nullopt;
    int sign = w[0] == '+' ? 1 : -1;
    std::string digits;
    for (char c : w.substr(1)) {
        if (std::isdigit(static_cast<unsigned char>(c)))
            digits.push_back(c);
        else if (c != ':')
            return std::nullopt;
    }
    if (digits.size() != 4 && digits.size() != 2)
        return std::nullopt;
    int hh = (digits[0] - '0') * 10 + (digits[1] - '0');
    int mm = digits.size() == 4 ? (digits[2] - '0') * 10 + (digits[3] - '0') : 0;
    if (hh > 14 || mm > 59)
        return std::nullopt;
    return sign * (hh * 60 + mm);
}

} // namespace

ParsedDate parse_date(std::string_view text) {
    // Strip trailing parenthesized comments like "(CDT)".
    std::string cleaned;
    cleaned.reserve(text.size());
    int depth = 0;
    for (char c : text) {
        if (c == '(')
            ++depth;
        else if (c == ')')
            depth = std::max(0, depth - 1);
        else if (depth == 0)
            cleaned.push_back(c);
    }

    // ISO form first: YYYY-MM-DD[ T]HH:MM[:SS] [zone]
    Pieces p;
    {
        std::size_t i = 0;
        auto peek_digits = [&](std::size_t at, std::size_t n) {
            if (at + n > cleaned.size())
                return false;
            for (std::size_t j = 0; j < n; ++j)
                if (!std::isdigit(static_cast<unsigned char>(cleaned[at + j])))
                    return false;
            return true;
        };
        while (i < cleaned.size() && std::isspace(static_cast<unsigned char>(cleaned[i])))
            ++i;
        if (peek_digits(i, 4) && i + 4 < cleaned.size() && cleaned[i + 4] == '-' &&
            peek_digits(i + 5, 2) && i + 7 < cleaned.size() && cleaned[i + 7] == '-' &&
            peek_digits(i + 8, 2)) {
            p.year = to_int(cleaned.substr(i, 4));
            p.month = to_int(cleaned.substr(i + 5, 2));
            p.day = to_int(cleaned.substr(i + 8, 2));
            std::size_t t = i + 10;
            if (t < cleaned.size() && (cleaned[t] == ' ' || cleaned[t] == 'T'))
                ++t;
            if (peek_digits(t, 2) && t + 2 < cleaned.size() && cleaned[t + 2] == ':' &&
                peek_digits(t + 3, 2)) {
                p.hour = to_int(cleaned.substr(t, 2));
                p.minute = to_int(cleaned.substr(t + 3, 2));
                p.have_time = true;
                t += 5;
                if (t + 2 < cleaned.size() && cleaned[t] == ':' && peek_digits(t + 1, 2)) {
                    p.second = to_int(cleaned.substr(t + 1, 2));
                    t += 3;
                }
                std::string_view rest = std::string_view(cleaned).substr(t);
                while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.front())))
                    rest.remove_prefix(1);
                while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.back())))
                    rest.remove_suffix(1);
                if (!rest.empty()) {
                    if (auto z = numeric_zone(rest))
                        p.zone = z;
                    else if (auto z2 = zone_by_name(rest))
                        p.zone = z2;
                }
            }
        }
    }

    if (p.month == 0) {
        // RFC-822 style: [Dow,] D Mon YYYY HH:MM[:SS] [zone]
        p = Pieces{};
        std::vector<std::string> words;
        std::string cur;
        for (char c : cleaned) {
            if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
                if (!cur.empty())
                    words.push_back(cur), cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        if (!cur.empty())
            words.push_back(cur);

        std::size_t day_index = words.size();
        for (std::size_t i = 0; i < words.size(); ++i) {
            const std::string& w = words[i];
            if (i == day_index)
                continue;
            if (int m = month_from_name(w); m != 0 && p.month == 0) {
                p.month = m;
                // day is the number immediately before or after
                if (i > 0 && all_digits(words[i - 1]) && words[i - 1].size() <= 2) {
                    p.day = to_int(words[i - 1]);
                    day_index = i - 1;
                } else if (i + 1 < words.size() && all_digits(words[i + 1]) &&
                           words[i + 1].size() <= 2) {
                    p.day = to_int(words[i + 1]);
                    day_index = i + 1;
                }
            } else if (all_digits(w) && (w.size() == 4 || (w.size() == 2 && p.day >= 0)) &&
                       p.year < 0 && p.month != 0) {
                int y = to_int(w);
                if (y < 100)
                    y += (y < 70) ? 2000 : 1900;
                p.year = y;
            } else if (w.find(':') != std::string::npos && !p.have_time) {
                int hh = 0, mm = 0, ss = 0;
                if (std::sscanf(w.c_str(), "%d:%d:%d", &hh, &mm, &ss) >= 2) {
                    p.hour = hh;
                    p.minute = mm;
                    p.second = ss;
                    p.have_time = true;
                }
            } else if (!p.zone) {
                if (auto z = numeric_zone(w))
                    p.zone = z;
                else if (p.have_time) {
                    if (auto z2 = zone_by_name(w))
                        p.zone = z2;
                }
            }
        }
    }

    ParsedDate out;
    if (p.month < 1 || p.month > 12 || p.day < 1 || p.day > 31 || p.year < 0 || p.hour > 23 ||
        p.minute > 59 || p.second > 60)
        return out;
    out.wall_seconds = days_from_civil(p.year, p.month, p.day) * 86400 +
                       std::int64_t(p.hour) * 3600 + std::int64_t(p.minute) * 60 + p.second;
    out.zone_offset_minutes = p.zone;
    out.valid = true;
    return out;
}

std::vector<int> default_repair_offsets(const ParsedDate& date) {
    std::vector<int> out;
    if (date.zone_offset_minutes) {
        int mins = std::abs(*date.zone_offset_minutes);
        if (mins != 0 && mins % 60 == 0)
            out.push_back(mins / 60);
    }
    for (int h : {2, 3, 4, 10, 12})
        out.push_back(h);
    return out;
}

std::vector<std::int64_t> normalize_date_gmt(const ParsedDate& date,
                                             const std::vector<int>& repair_hours) {
    if (!date.valid)
        throw UnparseableDate("no parseable date");
    std::vector<std::int64_t> out;
    out.push_back(date.utc_seconds());
    for (int h : repair_hours) {
        std::int64_t candidate = date.utc_seconds() + std::int64_t(h) * 3600;
        if (std::find(out.begin(), out.end(), candidate) == out.end())
            out.push_back(candidate);
    }
    return out;
}

std::vector<std::int64_t> normalize_date_gmt(const ParsedDate& date) {
    return normalize_date_gmt(date, default_repair_offsets(date));
}

std::string format_utc(std::int64_t utc_seconds) {
    std::int64_t days = utc_seconds / 86400;
    std::int64_t rem = utc_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", y, m, d, int(rem / 3600),
                  int((rem % 3600) / 60), int(rem % 60));
    return buf;
}

} // namespace attachnet
