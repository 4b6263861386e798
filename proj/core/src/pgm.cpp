// Copyright 2026 The topoloss Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "topoloss/pgm.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "topoloss/error.hpp"

namespace topoloss {
namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::string_view bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  unsigned long read_uint(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    unsigned long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + static_cast<unsigned long>(bytes_[pos_] - '0');
      if (value > std::numeric_limits<int>::max()) {
        throw FormatError(std::string("PGM ") + what + " is too large");
      }
      ++pos_;
    }
    if (pos_ == start) throw FormatError(std::string("PGM header: missing ") + what);
    return value;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Image decode_pgm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw FormatError("not a binary PGM (missing P5 magic)");
  }
  HeaderReader reader(bytes);
  reader.advance(2);
  const auto width = reader.read_uint("width");
  const auto height = reader.read_uint("height");
  const auto maxval = reader.read_uint("maxval");
  if (width == 0 || height == 0) throw FormatError("PGM dimensions must be positive");
  if (maxval != 255 && maxval != 65535) {
    throw UnsupportedDepthError("unsupported PGM maxval " + std::to_string(maxval) +
                                " (expected 255 or 65535)");
  }
  // Exactly one whitespace byte separates maxval from the raster.
  if (reader.pos() >= bytes.size() ||
      !std::isspace(static_cast<unsigned char>(bytes[reader.pos()]))) {
    throw FormatError("PGM header: missing whitespace after maxval");
  }
  reader.advance(1);

  const int depth = maxval == 255 ? 8 : 16;
  const std::size_t count = static_cast<std::size_t>(width) * height;
  const std::size_t payload = count * (depth == 8 ? 1 : 2);
  if (bytes.size() - reader.pos() < payload) {
    throw FormatError("PGM pixel payload truncated: expected " + std::to_string(payload) +
                      " bytes, found " + std::to_string(bytes.size() - reader.pos()));
  }
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data() + reader.pos());
  std::vector<std::uint16_t> px(count);
  if (depth == 8) {
    for (std::size_t i = 0; i < count; ++i) px[i] = data[i];
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      px[i] = static_cast<std::uint16_t>((data[2 * i] << 8) | data[2 * i + 1]);
    }
  }
  return Image(static_cast<int>(width), static_cast<int>(height), depth, std::move(px));
}

std::string encode_pgm(const Image& img) {
  std::string out = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) +
                    "\n" + std::to_string(img.max_value()) + "\n";
  const auto px = img.pixels();
  if (img.bit_depth() == 8) {
    out.reserve(out.size() + px.size());
    for (auto v : px) out.push_back(static_cast<char>(v));
  } else {
    out.reserve(out.size() + 2 * px.size());
    for (auto v : px) {
      out.push_back(static_cast<char>(v >> 8));
      out.push_back(static_cast<char>(v & 0xFF));
    }
  }
  return out;
}

Image load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_pgm(bytes);
  } catch (const UnsupportedDepthError& e) {
    throw UnsupportedDepthError(path.string() + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void save_image(const Image& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  const std::string bytes = encode_pgm(img);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace topoloss
