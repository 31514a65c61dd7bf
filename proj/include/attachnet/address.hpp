#pragma once

#include <compare>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace attachnet {

/// An email address reduced to lowercase user@domain. Display names are
/// carried along but do not participate in identity.
struct CanonicalAddress {
    std::string local;
    std::string domain;
    std::optional<std::string> display_name;

    bool valid() const { return !local.empty() && !domain.empty(); }
    std::string rendered() const { return local + "@" + domain; }

    friend bool operator==(const CanonicalAddress& a, const CanonicalAddress& b) {
        return a.local == b.local && a.domain == b.domain;
    }
    friend std::strong_ordering operator<=>(const CanonicalAddress& a, const CanonicalAddress& b) {
        if (auto c = a.local <=> b.local; c != 0)
            return c;
        return a.domain <=> b.domain;
    }
};

/// Lowercases both sides and trims whitespace.
CanonicalAddress make_address(std::string_view local, std::string_view domain);

/// Splits on the last '@' and canonicalizes. Empty optional when the text
/// does not contain a usable address.
std::optional<CanonicalAddress> parse_single_address(std::string_view token);

/// display-name -> address lookups for header tokens that carry no domain
/// (bare names, X.500 aliases). Keys are normalized, so "Allen, Phillip K."
/// and "phillip k allen" hit the same row.
class NameDirectory {
  public:
    static NameDirectory from_csv_file(const std::filesystem::path& file);
    static NameDirectory from_csv(std::istream& in);

    void add(std::string_view display_name, CanonicalAddress addr);
    std::optional<CanonicalAddress> resolve(std::string_view name) const;
    bool empty() const { return by_name_.empty(); }
    std::size_t size() const { return by_name_.size(); }

    /// Lowercase, dots and commas become spaces, runs of whitespace collapse.
    static std::string normalize_name(std::string_view name);

  private:
    std::map<std::string, CanonicalAddress> by_name_;
};

struct AddressParse {
    std::vector<CanonicalAddress> addresses; // deduplicated, header order
    std::vector<std::string> unresolved;     // name tokens with no address
};

/// Extracts every recognizable address from a raw header value. Tolerates
/// the mixed Enron-era forms: quoted display name + angle bracket, bare
/// angle-bracket addresses, <Surname>,"First" pairs, X.500 /O=...:/CN=alias
/// handles, bare "First Last" and "Last, First" names, and comma-run lists.
/// Names without a domain are resolved against the directory or reported
/// as unresolved.
AddressParse parse_address_header(std::string_view raw, const NameDirectory& directory = {});

} // namespace attachnet
