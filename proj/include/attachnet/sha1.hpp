#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace attachnet {

/// Streaming SHA-1 (FIPS 180-1). Body digests are taken over normalized
/// body text, attachment digests over the raw decoded part bytes.
class Sha1 {
  public:
    Sha1();

    void update(const void* data, std::size_t len);
    void update(std::string_view s) { update(s.data(), s.size()); }

    /// Finalizes and returns the 20-byte digest. The object must not be
    /// updated afterwards.
    std::array<std::uint8_t, 20> finish();

  private:
    void process_block(const std::uint8_t* block);

    std::array<std::uint32_t, 5> state_;
    std::array<std::uint8_t, 64> buf_;
    std::size_t buf_len_ = 0;
    std::uint64_t total_bits_ = 0;
};

/// 40-char lowercase hex SHA-1 of the given bytes.
std::string sha1_hex(std::string_view data);

} // namespace attachnet
