#include "pixellink/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

namespace pixellink::io {

namespace {

constexpr char kMagic[4] = {'P', 'L', 'N', 'K'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t off) {
  return static_cast<std::uint32_t>(b[off]) | static_cast<std::uint32_t>(b[off + 1]) << 8 |
         static_cast<std::uint32_t>(b[off + 2]) << 16 | static_cast<std::uint32_t>(b[off + 3]) << 24;
}

}  // namespace

std::vector<std::uint8_t> encode_tensor(const Tensor& t) {
  std::vector<std::uint8_t> out;
  out.reserve(7 + 4 * t.ndim() + 4 * t.size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  out.push_back(kTensorVersion);
  out.push_back(kDtypeF32);
  out.push_back(static_cast<std::uint8_t>(t.ndim()));
  for (auto d : t.dims()) {
    if (d > std::numeric_limits<std::uint32_t>::max()) {
      throw Error(ErrorCode::DimOverflow, "extent does not fit in u32");
    }
    put_u32(out, static_cast<std::uint32_t>(d));
  }
  for (float v : t.data()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

Tensor decode_tensor(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw Error(ErrorCode::TruncatedFile, "missing magic");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw Error(ErrorCode::BadMagic, "expected PLNK");
  if (bytes.size() < 7) throw Error(ErrorCode::TruncatedFile, "header cut short");
  if (bytes[4] != kTensorVersion) {
    throw Error(ErrorCode::UnsupportedVersion, "version " + std::to_string(bytes[4]));
  }
  if (bytes[5] != kDtypeF32) {
    throw Error(ErrorCode::UnsupportedFormat, "dtype " + std::to_string(bytes[5]));
  }
  const std::size_t ndim = bytes[6];
  if (ndim < 1 || ndim > 4) {
    throw Error(ErrorCode::UnsupportedFormat, "ndim " + std::to_string(ndim));
  }
  const std::size_t header = 7 + 4 * ndim;
  if (bytes.size() < header) throw Error(ErrorCode::TruncatedFile, "dims cut short");

  const std::size_t payload_values = (bytes.size() - header) / 4;
  std::vector<std::size_t> dims(ndim);
  std::size_t count = 1;
  for (std::size_t i = 0; i < ndim; ++i) {
    dims[i] = get_u32(bytes, 7 + 4 * i);
    if (dims[i] == 0) throw Error(ErrorCode::DimOverflow, "zero extent");
    // Checked against the payload at every step so the product cannot wrap.
    if (dims[i] > payload_values || count > payload_values / dims[i]) {
      throw Error(ErrorCode::DimOverflow, "dims exceed payload of " +
                                              std::to_string(payload_values) + " values");
    }
    count *= dims[i];
  }

  std::vector<float> data(count);
  for (std::size_t i = 0; i < count; ++i) data[i] = std::bit_cast<float>(get_u32(bytes, header + 4 * i));
  return Tensor(std::move(dims), std::move(data));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::IoFailure, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "rename to " + path.string() + ": " + ec.message());
}

Tensor load_tensor(const std::filesystem::path& path) {
  try {
    return decode_tensor(read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void save_tensor(const Tensor& t, const std::filesystem::path& path) {
  write_file_atomic(path, encode_tensor(t));
}

namespace {

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::span<const std::uint8_t> b, std::size_t& pos) {
  while (pos < b.size()) {
    if (b[pos] == '#') {
      while (pos < b.size() && b[pos] != '\n') ++pos;
    } else if (std::isspace(b[pos])) {
      ++pos;
    } else {
      break;
    }
  }
  std::string tok;
  while (pos < b.size() && !std::isspace(b[pos]) && b[pos] != '#') tok.push_back(static_cast<char>(b[pos++]));
  if (tok.empty()) throw Error(ErrorCode::TruncatedFile, "netpbm header cut short");
  return tok;
}

std::size_t header_number(std::span<const std::uint8_t> b, std::size_t& pos) {
  auto tok = header_token(b, pos);
  std::size_t v = 0;
  for (char c : tok) {
    if (c < '0' || c > '9') throw Error(ErrorCode::UnsupportedFormat, "bad header field '" + tok + "'");
    v = v * 10 + static_cast<std::size_t>(c - '0');
    if (v > (1u << 24)) throw Error(ErrorCode::UnsupportedFormat, "header value too large");
  }
  return v;
}

}  // namespace

ImageBuffer load_netpbm(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  std::span<const std::uint8_t> b(bytes);
  std::size_t pos = 0;
  const auto magic = header_token(b, pos);
  std::size_t channels = 0;
  if (magic == "P5") {
    channels = 1;
  } else if (magic == "P6") {
    channels = 3;
  } else {
    throw Error(ErrorCode::UnsupportedFormat, path.string() + ": magic '" + magic + "'");
  }
  const auto width = header_number(b, pos);
  const auto height = header_number(b, pos);
  const auto maxval = header_number(b, pos);
  if (maxval != 255) throw Error(ErrorCode::UnsupportedFormat, path.string() + ": maxval must be 255");
  if (width == 0 || height == 0) throw Error(ErrorCode::UnsupportedFormat, path.string() + ": empty image");
  // Exactly one whitespace byte separates the header from the raster.
  if (pos >= b.size()) throw Error(ErrorCode::TruncatedFile, path.string() + ": no raster");
  ++pos;

  ImageBuffer img(height, width, channels);
  if (b.size() - pos < img.data.size()) throw Error(ErrorCode::TruncatedFile, path.string() + ": raster cut short");
  std::copy_n(b.begin() + static_cast<std::ptrdiff_t>(pos), img.data.size(), img.data.begin());
  return img;
}

void save_netpbm(const ImageBuffer& img, const std::filesystem::path& path) {
  if (img.channels != 1 && img.channels != 3) {
    throw Error(ErrorCode::UnsupportedFormat, "netpbm supports 1 or 3 channels");
  }
  if (img.data.size() != img.height * img.width * img.channels) {
    throw Error(ErrorCode::ShapeMismatch, "image buffer size disagrees with its dims");
  }
  const std::string header = std::string(img.channels == 1 ? "P5" : "P6") + "\n" +
                             std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.data.begin(), img.data.end());
  write_file_atomic(path, out);
}

}  // namespace pixellink::io
