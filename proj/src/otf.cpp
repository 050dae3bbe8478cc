// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
#include "omega/otf.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>
#include <unordered_set>

namespace omega::data {

namespace {

constexpr char kMagic[4] = {'O', 'T', 'F', '1'};

void put_u(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& b) : bytes_(b) {}

  std::uint64_t u(int n, const char* what) {
    need(static_cast<std::size_t>(n), what);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  const std::uint8_t* take(std::size_t n, const char* what) {
    need(n, what);
    const std::uint8_t* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw OtfError("OTF truncated at byte " + std::to_string(pos_) + " while reading " + what +
                     " (need " + std::to_string(n) + ", have " + std::to_string(bytes_.size() - pos_) +
                     ")");
    }
  }

  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_otf(const TensorList& tensors) {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  if (tensors.size() > std::numeric_limits<std::uint32_t>::max()) throw OtfError("too many tensors");
  put_u(out, tensors.size(), 4);
  std::unordered_set<std::string> seen;
  for (const auto& t : tensors) {
    if (t.name.empty()) throw OtfError("OTF tensor names must be non-empty");
    if (t.name.size() > std::numeric_limits<std::uint16_t>::max()) throw OtfError("OTF name too long: " + t.name);
    if (!seen.insert(t.name).second) throw OtfError("duplicate OTF tensor name: " + t.name);
    if (t.value.rank() == 0 || t.value.rank() > 255) throw OtfError("OTF rank must lie in [1, 255] for " + t.name);
    put_u(out, t.name.size(), 2);
    out.insert(out.end(), t.name.begin(), t.name.end());
    put_u(out, t.value.rank(), 1);
    for (auto e : t.value.shape()) {
      if (e < 1 || e > std::numeric_limits<std::uint32_t>::max()) throw OtfError("OTF extent out of range in " + t.name);
      put_u(out, static_cast<std::uint64_t>(e), 4);
    }
    for (float v : t.value.data()) put_u(out, std::bit_cast<std::uint32_t>(v), 4);
  }
  return out;
}

TensorList decode_otf(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  const std::uint8_t* magic = r.take(4, "magic");
  if (std::memcmp(magic, kMagic, 4) != 0) throw OtfError("bad OTF magic at byte 0");
  const std::uint64_t count = r.u(4, "tensor count");
  TensorList out;
  std::unordered_set<std::string> seen;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t at = r.pos();
    const auto len = static_cast<std::size_t>(r.u(2, "name length"));
    if (len == 0) throw OtfError("empty OTF tensor name at byte " + std::to_string(at));
    const std::uint8_t* np = r.take(len, "name");
    std::string name(reinterpret_cast<const char*>(np), len);
    if (!seen.insert(name).second) {
      throw OtfError("duplicate OTF tensor name '" + name + "' at byte " + std::to_string(at));
    }
    const auto rank = static_cast<std::size_t>(r.u(1, "rank"));
    if (rank == 0) throw OtfError("zero rank for '" + name + "' at byte " + std::to_string(r.pos() - 1));
    Shape shape;
    std::uint64_t numel = 1;
    for (std::size_t d = 0; d < rank; ++d) {
      const std::uint64_t e = r.u(4, "extent");
      if (e == 0) throw OtfError("zero extent for '" + name + "' at byte " + std::to_string(r.pos() - 4));
      numel *= e;
      if (numel > r.remaining() / 4 + 1) {
        throw OtfError("payload of '" + name + "' exceeds file size (truncated) at byte " +
                       std::to_string(r.pos()));
      }
      shape.push_back(static_cast<std::int64_t>(e));
    }
    const std::uint8_t* payload = r.take(static_cast<std::size_t>(numel) * 4, "payload");
    std::vector<float> data(static_cast<std::size_t>(numel));
    for (std::size_t k = 0; k < data.size(); ++k) {
      std::uint32_t bits = 0;
      for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(payload[4 * k + b]) << (8 * b);
      data[k] = std::bit_cast<float>(bits);
    }
    out.push_back({std::move(name), Tensor<float>(std::move(shape), std::move(data))});
  }
  if (r.remaining() != 0) {
    throw OtfError("trailing bytes after last OTF tensor at byte " + std::to_string(r.pos()));
  }
  return out;
}

void write_otf(const std::filesystem::path& path, const TensorList& tensors) {
  const auto bytes = encode_otf(tensors);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw OtfError("cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw OtfError("write failed: " + path.string());
}

TensorList read_otf(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw OtfError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  try {
    return decode_otf(bytes);
  } catch (const OtfError& e) {
    throw OtfError(path.string() + ": " + e.what());
  }
}

}  // namespace omega::data
