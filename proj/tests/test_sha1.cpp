#include "attachnet/sha1.hpp"

#include <doctest.h>
#include <openssl/evp.h>

#include <random>
#include <string>

using namespace attachnet;

namespace {

// independent digest via OpenSSL, used as the cross-check oracle
std::string openssl_sha1_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha1(), nullptr);
    static const char* hexd = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hexd[digest[i] >> 4]);
        out.push_back(hexd[digest[i] & 0xF]);
    }
    return out;
}

} // namespace

TEST_CASE("standard vectors") {
    CHECK(sha1_hex("") == "da39a3ee5e6b4b0d3255bfef95601890afd80709");
    CHECK(sha1_hex("abc") == "a9993e364706816aba3e25717850c26c9cd0d89d");
    CHECK(sha1_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
          "84983e441c3bd26ebaae4aa1f95129e5e54670f1");
}

TEST_CASE("matches an independent implementation on random inputs") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        std::size_t len = rng() % 1000;
        std::string data(len, '\0');
        for (char& c : data)
            c = static_cast<char>(rng() & 0xFF);
        CHECK(sha1_hex(data) == openssl_sha1_hex(data));
    }
    // lengths around the block boundary
    for (std::size_t len = 50; len < 70; ++len) {
        std::string data(len, 'x');
        CHECK(sha1_hex(data) == openssl_sha1_hex(data));
    }
}

TEST_CASE("streaming equals one-shot") {
    std::string data(10000, '\0');
    std::mt19937_64 rng(11);
    for (char& c : data)
        c = static_cast<char>(rng() & 0xFF);

    Sha1 h;
    std::size_t pos = 0;
    std::size_t chunk = 1;
    while (pos < data.size()) {
        std::size_t take = std::min(chunk, data.size() - pos);
        h.update(data.data() + pos, take);
        pos += take;
        chunk = chunk * 3 + 1;
    }
    auto digest = h.finish();
    std::string hex;
    static const char* hexd = "0123456789abcdef";
    for (auto b : digest) {
        hex.push_back(hexd[b >> 4]);
        hex.push_back(hexd[b & 0xF]);
    }
    CHECK(hex == sha1_hex(data));
}
