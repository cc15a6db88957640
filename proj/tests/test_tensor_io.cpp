#include <gtest/gtest.h>

#include <cstring>
#include <random>

#include "pixellink/tensor_io.hpp"
#include "test_util.hpp"

using namespace pixellink;

namespace {

std::vector<std::uint8_t> header(std::uint8_t version, std::uint8_t dtype, std::vector<std::uint32_t> dims) {
  std::vector<std::uint8_t> b = {'P', 'L', 'N', 'K', version, dtype, static_cast<std::uint8_t>(dims.size())};
  for (auto d : dims) {
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(d >> (8 * i)));
  }
  return b;
}

void append_f32(std::vector<std::uint8_t>& b, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

ErrorCode decode_error(const std::vector<std::uint8_t>& bytes) {
  try {
    io::decode_tensor(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

}  // namespace

TEST(TensorIo, ByteLayoutMatchesHandEncoding) {
  const Tensor t({2, 2}, std::vector<float>{0, 1, 2, 3});
  auto expected = header(1, 1, {2, 2});
  for (float v : {0.f, 1.f, 2.f, 3.f}) append_f32(expected, v);
  EXPECT_EQ(io::encode_tensor(t), expected);
  EXPECT_EQ(io::decode_tensor(expected), t);
}

TEST(TensorIo, SingleElementHasFourBytePayload) {
  const auto bytes = io::encode_tensor(Tensor({1}, std::vector<float>{0.f}));
  EXPECT_EQ(bytes.size(), 4u + 3u + 4u + 4u);
}

TEST(TensorIo, ThreeDimsDeclareFortyEightValues) {
  const auto bytes = io::encode_tensor(Tensor({2, 3, 8}));
  EXPECT_EQ(bytes[6], 3);
  EXPECT_EQ(bytes.size(), 7u + 12u + 48u * 4u);
}

TEST(TensorIo, RejectsBadHeaders) {
  auto bad_magic = header(1, 1, {1});
  bad_magic[0] = 'X';
  append_f32(bad_magic, 1.f);
  EXPECT_EQ(decode_error(bad_magic), ErrorCode::BadMagic);
  EXPECT_EQ(decode_error({'P', 'L'}), ErrorCode::TruncatedFile);

  auto v2 = header(2, 1, {1});
  append_f32(v2, 1.f);
  EXPECT_EQ(decode_error(v2), ErrorCode::UnsupportedVersion);

  auto f64 = header(1, 2, {1});
  append_f32(f64, 1.f);
  EXPECT_EQ(decode_error(f64), ErrorCode::UnsupportedFormat);

  auto five = header(1, 1, {1, 1, 1, 1, 1});
  append_f32(five, 1.f);
  EXPECT_EQ(decode_error(five), ErrorCode::UnsupportedFormat);

  auto cut = header(1, 1, {2, 2});
  cut.resize(cut.size() - 2);
  EXPECT_EQ(decode_error(cut), ErrorCode::TruncatedFile);
}

TEST(TensorIo, DimsBeyondPayloadAreRejected) {
  auto short_payload = header(1, 1, {2, 2});
  append_f32(short_payload, 1.f);
  EXPECT_EQ(decode_error(short_payload), ErrorCode::DimOverflow);

  auto huge = header(1, 1, {0xFFFFFFFFu, 0xFFFFFFFFu, 0xFFFFFFFFu, 0xFFFFFFFFu});
  EXPECT_EQ(decode_error(huge), ErrorCode::DimOverflow);

  auto zero = header(1, 1, {0});
  EXPECT_EQ(decode_error(zero), ErrorCode::DimOverflow);
}

TEST(TensorIo, RandomTensorsRoundTripBitwise) {
  testutil::TempDir dir;
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> nd(1, 4), extent(1, 6);
  std::uniform_int_distribution<std::uint32_t> bits;
  for (int i = 0; i < 100; ++i) {
    std::vector<std::size_t> dims(nd(rng));
    for (auto& d : dims) d = extent(rng);
    Tensor t(dims);
    for (auto& v : t.data()) {
      // Arbitrary finite bit patterns, including denormals and negative zero.
      float f;
      do {
        const std::uint32_t b = bits(rng);
        std::memcpy(&f, &b, 4);
      } while (!std::isfinite(f));
      v = f;
    }
    const auto path = dir / ("t" + std::to_string(i) + ".plnk");
    io::save_tensor(t, path);
    const auto back = io::load_tensor(path);
    ASSERT_EQ(back.dims(), t.dims());
    ASSERT_EQ(std::memcmp(back.data().data(), t.data().data(), t.size() * 4), 0);
  }
}

TEST(TensorIo, MissingFileIsIoFailure) {
  try {
    io::load_tensor("/nonexistent/dir/x.plnk");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoFailure);
  }
}

TEST(Netpbm, ParsesTinyGrayImage) {
  testutil::TempDir dir;
  testutil::write_text(dir / "a.pgm", std::string("P5\n1 1\n255\n") + '\xff');
  const auto img = io::load_netpbm(dir / "a.pgm");
  EXPECT_EQ(img.height, 1u);
  EXPECT_EQ(img.width, 1u);
  EXPECT_EQ(img.channels, 1u);
  EXPECT_EQ(img.data, std::vector<std::uint8_t>{255});
}

TEST(Netpbm, ColorImageWithCommentHasTwelveBytes) {
  testutil::TempDir dir;
  testutil::write_text(dir / "a.ppm", "P6\n# made by hand\n2 2\n255\nABCDEFGHIJKL");
  const auto img = io::load_netpbm(dir / "a.ppm");
  EXPECT_EQ(img.channels, 3u);
  EXPECT_EQ(img.data.size(), 12u);
  EXPECT_EQ(img.at(1, 1, 2), 'L');
}

TEST(Netpbm, RejectsUnsupportedAndTruncated) {
  testutil::TempDir dir;
  testutil::write_text(dir / "ascii.pgm", "P2\n1 1\n255\n0\n");
  testutil::write_text(dir / "deep.pgm", "P5\n1 1\n65535\n\x01\x02");
  testutil::write_text(dir / "short.ppm", "P6\n2 2\n255\nABC");
  for (const auto& [name, code] : {std::pair{"ascii.pgm", ErrorCode::UnsupportedFormat},
                                   std::pair{"deep.pgm", ErrorCode::UnsupportedFormat},
                                   std::pair{"short.ppm", ErrorCode::TruncatedFile}}) {
    try {
      io::load_netpbm(dir / name);
      ADD_FAILURE() << name;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), code) << name;
    }
  }
}

TEST(Netpbm, RandomImagesRoundTrip) {
  testutil::TempDir dir;
  std::mt19937 rng(3);
  for (std::size_t channels : {1u, 3u}) {
    for (int i = 0; i < 10; ++i) {
      ImageBuffer img(1 + rng() % 17, 1 + rng() % 23, channels);
      for (auto& v : img.data) v = static_cast<std::uint8_t>(rng());
      const auto path = dir / ("img" + std::to_string(i) + (channels == 1 ? ".pgm" : ".ppm"));
      io::save_netpbm(img, path);
      const auto back = io::load_netpbm(path);
      EXPECT_EQ(back.height, img.height);
      EXPECT_EQ(back.width, img.width);
      EXPECT_EQ(back.data, img.data);
    }
  }
}

TEST(AtomicWrite, LeavesNoTemporaryBehind) {
  testutil::TempDir dir;
  const std::vector<std::uint8_t> bytes = {1, 2, 3};
  io::write_file_atomic(dir / "f.bin", bytes);
  io::write_file_atomic(dir / "f.bin", bytes);
  EXPECT_EQ(io::read_file(dir / "f.bin"), bytes);
  EXPECT_EQ(std::distance(std::filesystem::directory_iterator(dir.path()), {}), 1);
}
