#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

namespace simion {

/// 128-bit MD5 digest.
struct Digest {
  std::array<std::uint8_t, 16> bytes{};

  std::string hex() const;
  static Digest from_hex(std::string_view hex);

  friend bool operator==(const Digest&, const Digest&) = default;
  friend auto operator<=>(const Digest&, const Digest&) = default;
};

/// Incremental MD5 (OpenSSL EVP).
class Md5 {
 public:
  Md5();
  ~Md5();
  Md5(const Md5&) = delete;
  Md5& operator=(const Md5&) = delete;

  void update(std::string_view data);
  Digest finish();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Digest md5(std::string_view data);

}  // namespace simion
