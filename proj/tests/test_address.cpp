#include "attachnet/address.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace attachnet;

namespace {

NameDirectory enron_directory() {
    std::istringstream csv(R"(Phillip K Allen,phillip.k.allen@enron.com
"Allen, Phillip K.",phillip.k.allen@enron.com
Phillip Allen,phillip.k.allen@enron.com
Kristin Albrecht,kristin.albrecht@enron.com
Hunter S Shively,hunter.s.shively@enron.com
Brad Alford,brad.alford@enron.com
Bob Anderson,bob.anderson@enron.com
Pallen,phillip.k.allen@enron.com
Yevgeny Frolov,yevgeny.frolov@enron.com
Yfrolov,yevgeny.frolov@enron.com
)");
    return NameDirectory::from_csv(csv);
}

std::vector<std::string> rendered(const AddressParse& parse) {
    std::vector<std::string> out;
    for (const auto& a : parse.addresses)
        out.push_back(a.rendered());
    return out;
}

} // namespace

TEST_CASE("canonicalization is idempotent and lowercase") {
    auto a = parse_single_address("\"ALLEN PHILLIP\" <PAllen@Enron.COM>");
    REQUIRE(a.has_value());
    CHECK(a->rendered() == "pallen@enron.com");
    auto again = parse_single_address(a->rendered());
    REQUIRE(again.has_value());
    CHECK(*again == *a);
    CHECK(again->rendered() == a->rendered());
}

TEST_CASE("empty header yields nothing") {
    auto parse = parse_address_header("");
    CHECK(parse.addresses.empty());
    CHECK(parse.unresolved.empty());
}

TEST_CASE("quoted display name with angle address") {
    auto parse = parse_address_header(R"("phillip.k.allen" <phillip.k.allen@enron.com>)");
    CHECK(rendered(parse) == std::vector<std::string>{"phillip.k.allen@enron.com"});
    REQUIRE(parse.addresses.size() == 1);
    CHECK(parse.addresses[0].display_name == "phillip.k.allen");

    auto upper = parse_address_header(R"("ALLEN  PHILLIP K" <pallen@enron.com>)");
    CHECK(rendered(upper) == std::vector<std::string>{"pallen@enron.com"});
}

TEST_CASE("bare angle bracket address") {
    auto parse = parse_address_header("<Phillip.Allen@enron.com>");
    CHECK(rendered(parse) == std::vector<std::string>{"phillip.allen@enron.com"});
}

TEST_CASE("unquoted display name with angle address") {
    auto parse = parse_address_header("Phillip K Allen <Phillip.K.Allen@enron.com>");
    CHECK(rendered(parse) == std::vector<std::string>{"phillip.k.allen@enron.com"});
}

TEST_CASE("surname-in-brackets plus quoted given name") {
    NameDirectory dir = enron_directory();
    auto parse = parse_address_header(R"(<Allen>,"Phillip")", dir);
    CHECK(rendered(parse) == std::vector<std::string>{"phillip.k.allen@enron.com"});

    auto with_dots = parse_address_header(R"(<Allen>,"Phillip K.")", dir);
    CHECK(rendered(with_dots) == std::vector<std::string>{"phillip.k.allen@enron.com"});
}

TEST_CASE("x500 handle resolves through the alias") {
    NameDirectory dir = enron_directory();
    auto parse = parse_address_header(
        R"(<Allen>,"Phillip K." </O=ENRON/OU=NA/CN=RECIPIENTS/CN=Pallen>)", dir);
    CHECK(rendered(parse) == std::vector<std::string>{"phillip.k.allen@enron.com"});

    // without a directory the name lands in unresolved
    auto bare = parse_address_header(
        R"(<Allen>,"Phillip K." </O=ENRON/OU=NA/CN=RECIPIENTS/CN=Pallen>)");
    CHECK(bare.addresses.empty());
    CHECK(bare.unresolved.size() == 1);
}

TEST_CASE("last-comma-first bare name") {
    NameDirectory dir = enron_directory();
    auto parse = parse_address_header("Allen, Phillip K.", dir);
    CHECK(rendered(parse) == std::vector<std::string>{"phillip.k.allen@enron.com"});
}

TEST_CASE("bare first-last name") {
    NameDirectory dir = enron_directory();
    auto parse = parse_address_header("Phillip K Allen", dir);
    CHECK(rendered(parse) == std::vector<std::string>{"phillip.k.allen@enron.com"});
}

TEST_CASE("comma-run single name") {
    NameDirectory dir = enron_directory();
    auto parse = parse_address_header("Phillip,K,Allen", dir);
    CHECK(rendered(parse) == std::vector<std::string>{"phillip.k.allen@enron.com"});
}

TEST_CASE("mixed-format list with full names") {
    NameDirectory dir = enron_directory();
    auto parse = parse_address_header("Kristin Albrecht, Phillip K Allen, Hunter S Shively", dir);
    CHECK(rendered(parse) == std::vector<std::string>{"kristin.albrecht@enron.com",
                                                      "phillip.k.allen@enron.com",
                                                      "hunter.s.shively@enron.com"});

    // no directory: three unresolved names, no addresses
    auto bare = parse_address_header("Kristin Albrecht, Phillip K Allen, Hunter S Shively");
    CHECK(bare.addresses.empty());
    CHECK(bare.unresolved.size() == 3);
}

TEST_CASE("comma-run list of single words") {
    NameDirectory dir = enron_directory();
    auto parse = parse_address_header("Brad,Alford,Phillip,K,Allen,anderson,Bob", dir);
    CHECK(rendered(parse) == std::vector<std::string>{"brad.alford@enron.com",
                                                      "phillip.k.allen@enron.com",
                                                      "bob.anderson@enron.com"});
}

TEST_CASE("x500 interleaved in a list") {
    NameDirectory dir = enron_directory();
    auto parse = parse_address_header(
        "Frolov, Yevgeny </O=ENRON/OU=NA/CN=RECIPIENTS/CN=Yfrolov>, Allen, Phillip K.", dir);
    CHECK(rendered(parse) == std::vector<std::string>{"yevgeny.frolov@enron.com",
                                                      "phillip.k.allen@enron.com"});
}

TEST_CASE("plain address lists pass through") {
    auto parse = parse_address_header("a@x.com, b@y.com, \"C\" <c@z.com>");
    CHECK(rendered(parse) == std::vector<std::string>{"a@x.com", "b@y.com", "c@z.com"});
}

TEST_CASE("duplicates collapse") {
    auto parse = parse_address_header("a@x.com, A@X.COM, \"A\" <a@x.com>");
    CHECK(rendered(parse) == std::vector<std::string>{"a@x.com"});
}

TEST_CASE("directory normalization handles punctuation") {
    NameDirectory dir;
    dir.add("Allen, Phillip K.", make_address("phillip.k.allen", "enron.com"));
    CHECK(dir.resolve("phillip k allen").has_value());
    CHECK(dir.resolve("PHILLIP K. ALLEN").has_value());
    CHECK_FALSE(dir.resolve("someone else").has_value());
}

TEST_CASE("arbitrary header garbage never crashes and stays deterministic") {
    std::mt19937_64 rng(131);
    const std::string alphabet = "ab Z@.<>,\"/=O:CN;'\\\t()x7";
    NameDirectory dir = enron_directory();
    for (int trial = 0; trial < 2000; ++trial) {
        std::string s;
        std::size_t len = rng() % 50;
        for (std::size_t i = 0; i < len; ++i)
            s.push_back(alphabet[rng() % alphabet.size()]);
        AddressParse first = parse_address_header(s, dir);
        AddressParse second = parse_address_header(s, dir);
        CHECK(first.addresses == second.addresses);
        CHECK(first.unresolved == second.unresolved);
        for (const auto& a : first.addresses) {
            CHECK(a.valid());
            // round trip through the rendered form is stable
            auto again = parse_single_address(a.rendered());
            REQUIRE(again.has_value());
            CHECK(*again == a);
        }
    }
}
