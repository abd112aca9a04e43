#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace audiolib::crypto {

using Digest = std::array<std::uint8_t, 32>;

/// Incremental SHA-256.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(std::span<const std::byte> data);
  void update(std::string_view data);
  Digest finish();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::string to_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::span<const std::byte> data);
std::string sha256_hex(std::string_view data);

/// Lowercase or uppercase hex of exactly 64 characters.
bool is_sha256_hex(std::string_view s) noexcept;

void random_bytes(std::span<std::uint8_t> out);

/// 128 random bits, base64url without padding (22 characters).
std::string random_token();

/// Alphanumeric password drawn uniformly from 62 symbols.
std::string random_password(std::size_t length);

inline constexpr int kDefaultPbkdf2Iterations = 100'000;

/// "pbkdf2-sha256$<iterations>$<salt hex>$<hash hex>"
std::string hash_password(std::string_view password, int iterations = kDefaultPbkdf2Iterations);
bool verify_password(std::string_view password, std::string_view digest);

}  // namespace audiolib::crypto
