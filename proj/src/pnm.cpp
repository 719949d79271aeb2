#include "mvqc/pnm.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>

namespace mvqc {
namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::string_view bytes) : bytes_(bytes) {}

  std::size_t offset() const noexcept { return pos_; }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const auto c = static_cast<unsigned char>(bytes_[pos_]);
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  // Reads an unsigned decimal token preceded by optional whitespace/comments.
  long read_uint(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000L) throw ParseError(std::string(what) + " too large", start);
      ++pos_;
    }
    if (pos_ == start) {
      if (pos_ >= bytes_.size()) throw ParseError(std::string("truncated file, expected ") + what, pos_);
      throw ParseError(std::string("expected ") + what, pos_);
    }
    return value;
  }

  // Binary rasters start after exactly one whitespace byte following maxval.
  void consume_single_space() {
    if (pos_ >= bytes_.size()) throw ParseError("truncated header", pos_);
    if (!std::isspace(static_cast<unsigned char>(bytes_[pos_])))
      throw ParseError("expected whitespace after maxval", pos_);
    ++pos_;
  }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::uint8_t luma(long r, long g, long b) {
  const double y = 0.299 * static_cast<double>(r) + 0.587 * static_cast<double>(g) +
                   0.114 * static_cast<double>(b);
  return static_cast<std::uint8_t>(std::lround(y));
}

}  // namespace

GrayImage load_image(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') throw ParseError("bad magic number", 0);
  const char kind = bytes[1];
  if (kind != '2' && kind != '3' && kind != '5' && kind != '6')
    throw ParseError(std::string("unsupported PNM type P") + kind, 1);
  const bool color = kind == '3' || kind == '6';
  const bool binary = kind == '5' || kind == '6';

  HeaderReader hdr(bytes.substr(2));
  const auto abs = [&](std::size_t rel) { return rel + 2; };
  if (!bytes.substr(2).empty() && !std::isspace(static_cast<unsigned char>(bytes[2])) && bytes[2] != '#')
    throw ParseError("expected whitespace after magic number", 2);

  const std::size_t w_at = abs(hdr.offset());
  const long width = hdr.read_uint("width");
  const long height = hdr.read_uint("height");
  if (width < 1 || height < 1) throw ParseError("image dimensions must be positive", w_at);
  if (width * height > (1L << 28)) throw ParseError("image too large", w_at);
  const std::size_t maxval_at = abs(hdr.offset());
  const long maxval = hdr.read_uint("maxval");
  if (maxval < 1 || maxval > 255)
    throw ParseError("maxval " + std::to_string(maxval) + " outside 1..255", maxval_at);

  const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  const std::size_t channels = color ? 3 : 1;
  std::vector<std::uint8_t> gray(n);

  if (binary) {
    hdr.consume_single_space();
    const std::size_t start = abs(hdr.offset());
    const std::size_t need = n * channels;
    if (bytes.size() - start < need)
      throw ParseError("truncated raster: need " + std::to_string(need) + " bytes, have " +
                           std::to_string(bytes.size() - start),
                       bytes.size());
    const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data() + start);
    for (std::size_t i = 0; i < n; ++i) {
      long v[3] = {raw[i * channels], 0, 0};
      if (color) {
        v[1] = raw[i * channels + 1];
        v[2] = raw[i * channels + 2];
      }
      for (std::size_t c = 0; c < channels; ++c)
        if (v[c] > maxval) throw ParseError("sample exceeds maxval", start + i * channels + c);
      gray[i] = color ? luma(v[0], v[1], v[2]) : static_cast<std::uint8_t>(v[0]);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      long v[3] = {0, 0, 0};
      for (std::size_t c = 0; c < channels; ++c) {
        hdr.skip_space_and_comments();
        const std::size_t at = abs(hdr.offset());
        v[c] = hdr.read_uint("sample");
        if (v[c] > maxval) throw ParseError("sample exceeds maxval", at);
      }
      gray[i] = color ? luma(v[0], v[1], v[2]) : static_cast<std::uint8_t>(v[0]);
    }
  }
  return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(gray));
}

GrayImage read_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open image " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return load_image(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.message(), e.offset());
  }
}

std::string encode_pgm(const GrayImage& img) {
  std::string out = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  const auto px = img.pixels();
  out.append(reinterpret_cast<const char*>(px.data()), px.size());
  return out;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  const std::string bytes = encode_pgm(img);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for " + path.string());
}

GrayImage mask_to_gray(const BinaryImage& mask) {
  GrayImage out(mask.width(), mask.height());
  auto dst = out.pixels();
  const auto src = mask.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] ? 0 : 255;
  return out;
}

}  // namespace mvqc
