#include "simion/digest.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace simion {

struct Md5::Impl {
  EVP_MD_CTX* ctx = nullptr;
};

Md5::Md5() : impl_(std::make_unique<Impl>()) {
  impl_->ctx = EVP_MD_CTX_new();
  if (!impl_->ctx || EVP_DigestInit_ex(impl_->ctx, EVP_md5(), nullptr) != 1) {
    throw std::runtime_error("MD5 initialization failed");
  }
}

Md5::~Md5() { EVP_MD_CTX_free(impl_->ctx); }

void Md5::update(std::string_view data) {
  EVP_DigestUpdate(impl_->ctx, data.data(), data.size());
}

Digest Md5::finish() {
  Digest d;
  unsigned int len = 0;
  EVP_DigestFinal_ex(impl_->ctx, d.bytes.data(), &len);
  return d;
}

Digest md5(std::string_view data) {
  Md5 h;
  h.update(data);
  return h.finish();
}

std::string Digest::hex() const {
  static const char* const kDigits = "0123456789abcdef";
  std::string out;
  out.reserve(32);
  for (std::uint8_t b : bytes) {
    out += kDigits[b >> 4];
    out += kDigits[b & 0xf];
  }
  return out;
}

Digest Digest::from_hex(std::string_view hex) {
  if (hex.size() != 32) throw std::invalid_argument("digest must have 32 hex digits");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw std::invalid_argument("bad hex digit");
  };
  Digest d;
  for (std::size_t i = 0; i < 16; ++i) {
    d.bytes[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
  }
  return d;
}

}  // namespace simion
