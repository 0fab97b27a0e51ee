#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ssiown/bytes.hpp"

namespace ssiown {

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Canonical binary form: big-endian fixed-width integers and u32
// length-prefixed byte strings, written in a fixed field order.
class Writer {
 public:
  Writer& u8(std::uint8_t v) {
    out_.push_back(v);
    return *this;
  }
  Writer& u32(std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
    return *this;
  }
  Writer& u64(std::uint64_t v) {
    for (int s = 56; s >= 0; s -= 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
    return *this;
  }
  Writer& i64(std::int64_t v) { return u64(static_cast<std::uint64_t>(v)); }
  Writer& bytes(ByteView v) {
    u32(static_cast<std::uint32_t>(v.size()));
    out_.insert(out_.end(), v.begin(), v.end());
    return *this;
  }
  Writer& str(std::string_view v) { return bytes(as_view(v)); }
  template <std::size_t N>
  Writer& fixed(const ByteArray<N>& v) {
    out_.insert(out_.end(), v.begin(), v.end());
    return *this;
  }

  const Bytes& data() const& { return out_; }
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

class Reader {
 public:
  explicit Reader(ByteView in) : in_(in) {}

  std::uint8_t u8() {
    need(1);
    return in_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | in_[pos_++];
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | in_[pos_++];
    return v;
  }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  Bytes bytes() {
    std::uint32_t n = u32();
    need(n);
    Bytes out(in_.begin() + pos_, in_.begin() + pos_ + n);
    pos_ += n;
    return out;
  }
  std::string str() {
    auto b = bytes();
    return std::string(b.begin(), b.end());
  }
  template <std::size_t N>
  ByteArray<N> fixed() {
    need(N);
    ByteArray<N> out{};
    std::copy_n(in_.begin() + pos_, N, out.begin());
    pos_ += N;
    return out;
  }

  bool done() const { return pos_ == in_.size(); }
  std::size_t remaining() const { return in_.size() - pos_; }
  void expect_done() const {
    if (!done()) throw DecodeError("trailing bytes after message");
  }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw DecodeError("input truncated");
  }

  ByteView in_;
  std::size_t pos_ = 0;
};

}  // namespace ssiown
