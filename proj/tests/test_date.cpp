#include "attachnet/date.hpp"

#include "attachnet/errors.hpp"

#include <doctest.h>

#include <random>

using namespace attachnet;

namespace {

std::int64_t utc(int y, int mo, int d, int h, int mi, int s = 0) {
    return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
}

} // namespace

TEST_CASE("rfc822 dates with numeric zones") {
    ParsedDate d = parse_date("Tue, 1 May 2001 10:00:00 -0500 (CDT)");
    REQUIRE(d.valid);
    CHECK(d.zone_offset_minutes == -300);
    CHECK(d.utc_seconds() == utc(2001, 5, 1, 15, 0));

    ParsedDate plus = parse_date("15 Nov 2000 08:30:15 +0530");
    REQUIRE(plus.valid);
    CHECK(plus.zone_offset_minutes == 330);
    CHECK(plus.utc_seconds() == utc(2000, 11, 15, 3, 0, 15));
}

TEST_CASE("named zones and missing zones") {
    ParsedDate pst = parse_date("Mon, 3 Dec 2001 17:45:00 PST");
    REQUIRE(pst.valid);
    CHECK(pst.zone_offset_minutes == -480);

    ParsedDate none = parse_date("3 Dec 2001 17:45:00");
    REQUIRE(none.valid);
    CHECK_FALSE(none.zone_offset_minutes.has_value());
    CHECK(none.utc_seconds() == utc(2001, 12, 3, 17, 45));
}

TEST_CASE("iso form") {
    ParsedDate d = parse_date("2001-05-01 10:00 -0500");
    REQUIRE(d.valid);
    CHECK(d.utc_seconds() == utc(2001, 5, 1, 15, 0));

    ParsedDate t = parse_date("2001-05-01T10:00:30Z");
    REQUIRE(t.valid);
    CHECK(t.zone_offset_minutes == 0);
    CHECK(t.utc_seconds() == utc(2001, 5, 1, 10, 0, 30));
}

TEST_CASE("two digit years") {
    ParsedDate d = parse_date("1 May 01 10:00:00 GMT");
    REQUIRE(d.valid);
    CHECK(d.utc_seconds() == utc(2001, 5, 1, 10, 0));

    ParsedDate old = parse_date("1 May 99 10:00:00 GMT");
    REQUIRE(old.valid);
    CHECK(old.utc_seconds() == utc(1999, 5, 1, 10, 0));
}

TEST_CASE("garbage does not parse") {
    CHECK_FALSE(parse_date("").valid);
    CHECK_FALSE(parse_date("no date here").valid);
    CHECK_FALSE(parse_date("32 Foo 2001").valid);
}

TEST_CASE("gmt conversion without repairs") {
    ParsedDate d = parse_date("2001-05-01 10:00 -0500");
    auto candidates = normalize_date_gmt(d, {});
    REQUIRE(candidates.size() == 1);
    CHECK(candidates[0] == utc(2001, 5, 1, 15, 0));
}

TEST_CASE("repair offsets add ordered distinct candidates") {
    ParsedDate d = parse_date("2001-05-01 10:00 -0500");
    auto candidates = normalize_date_gmt(d, {2});
    REQUIRE(candidates.size() == 2);
    CHECK(candidates[0] == utc(2001, 5, 1, 15, 0));
    CHECK(candidates[1] == utc(2001, 5, 1, 17, 0));

    // duplicates collapse
    auto duped = normalize_date_gmt(d, {2, 2, 0});
    CHECK(duped.size() == 2);
}

TEST_CASE("default repair set starts with the zone difference") {
    ParsedDate d = parse_date("2001-05-01 10:00 -0500");
    auto repairs = default_repair_offsets(d);
    REQUIRE(repairs.size() == 6);
    CHECK(repairs[0] == 5);
    CHECK(repairs[1] == 2);
    CHECK(repairs[5] == 12);

    ParsedDate zoneless = parse_date("1 May 2001 10:00:00");
    auto no_zone = default_repair_offsets(zoneless);
    CHECK(no_zone == std::vector<int>{2, 3, 4, 10, 12});
}

TEST_CASE("dateless input is rejected") {
    ParsedDate bad = parse_date("not a date");
    CHECK_THROWS_AS(normalize_date_gmt(bad, {}), UnparseableDate);
}

TEST_CASE("garbage date strings never crash") {
    std::mt19937_64 rng(137);
    const std::string alphabet = "0123456789 :+-MayJanTZGMT(),";
    for (int trial = 0; trial < 2000; ++trial) {
        std::string s;
        std::size_t len = rng() % 40;
        for (std::size_t i = 0; i < len; ++i)
            s.push_back(alphabet[rng() % alphabet.size()]);
        ParsedDate d = parse_date(s);
        if (d.valid) {
            // a valid parse always yields consistent candidates
            auto candidates = normalize_date_gmt(d, {1, 2});
            CHECK(candidates.size() >= 1);
            CHECK(candidates[0] == d.utc_seconds());
        }
    }
}

TEST_CASE("civil day round trip") {
    int y, m, d;
    civil_from_days(days_from_civil(2001, 5, 1), y, m, d);
    CHECK(y == 2001);
    CHECK(m == 5);
    CHECK(d == 1);
    CHECK(days_from_civil(1970, 1, 1) == 0);
    CHECK(format_utc(utc(2001, 5, 1, 15, 0)) == "2001-05-01T15:00:00Z");
}
