#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

#include "nsbench/embedio.hpp"
#include "nsbench/error.hpp"
#include "nsbench/synthgen.hpp"

using namespace nsbench;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "nsbench_embedio_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

Matrix two_by_three() {
  Matrix m(2, 3);
  for (std::size_t i = 0; i < 6; ++i) m.data()[i] = 0.5 * static_cast<double>(i) - 1.0;
  return m;
}

}  // namespace

TEST_CASE("embedio: byte layout") {
  const auto bytes = encode_nseb(two_by_three());
  REQUIRE(bytes.size() == 37);
  CHECK(std::memcmp(bytes.data(), "NSEB", 4) == 0);
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 2);
  CHECK(bytes[6] == 0);
  CHECK(bytes[9] == 3);
  CHECK(bytes[12] == 0);
  // First value -1.0f = 0xBF800000, little-endian.
  CHECK(bytes[13] == 0x00);
  CHECK(bytes[14] == 0x00);
  CHECK(bytes[15] == 0x80);
  CHECK(bytes[16] == 0xBF);
}

TEST_CASE("embedio: file round trip is exact at float32") {
  const auto path = temp_path("rt.nseb");
  Matrix m(3, 4);
  Rng rng(1);
  for (auto& v : m.data()) v = static_cast<float>(rng.normal());
  m(0, 0) = std::numeric_limits<float>::denorm_min();
  m(0, 1) = -std::numeric_limits<float>::denorm_min() * 77;
  m(0, 2) = std::numeric_limits<float>::max();
  m(0, 3) = -0.0;
  write_embeddings(m, path);
  CHECK(fs::file_size(path) == kNsebHeaderSize + 4 * 12);
  const auto back = read_embeddings(path);
  REQUIRE(back.rows() == 3);
  REQUIRE(back.cols() == 4);
  for (std::size_t i = 0; i < 12; ++i) {
    const float a = static_cast<float>(m.data()[i]);
    const float b = static_cast<float>(back.values.data()[i]);
    CHECK(std::memcmp(&a, &b, sizeof a) == 0);
  }
}

TEST_CASE("embedio: writer rejects bad input") {
  CHECK_THROWS_AS(encode_nseb(Matrix(0, 3)), ValidationError);
  CHECK_THROWS_AS(encode_nseb(Matrix(2, 0)), ValidationError);
  Matrix m = two_by_three();
  m(1, 1) = NAN;
  CHECK_THROWS_AS(encode_nseb(m), ValidationError);
  m(1, 1) = 1e300;  // overflows float32
  CHECK_THROWS_AS(encode_nseb(m), ValidationError);
}

TEST_CASE("embedio: reader errors") {
  auto good = encode_nseb(two_by_three());

  auto bad = good;
  std::memcpy(bad.data(), "XXXX", 4);
  CHECK_THROWS_AS(decode_nseb(bad), FormatError);
  CHECK(message_of([&] { decode_nseb(bad); }).find("not an NSEB file") != std::string::npos);

  auto truncated = good;
  truncated.pop_back();
  CHECK_THROWS_AS(decode_nseb(truncated), FormatError);
  CHECK(message_of([&] { decode_nseb(truncated); }).find("corrupt") != std::string::npos);

  auto extra = good;
  extra.push_back(0);
  CHECK_THROWS_AS(decode_nseb(extra), FormatError);

  auto version = good;
  version[4] = 2;
  CHECK_THROWS_AS(decode_nseb(version), FormatError);

  auto nan = good;
  const float q = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(nan.data() + 17, &q, 4);
  CHECK_THROWS_AS(decode_nseb(nan), ValidationError);

  const std::vector<std::uint8_t> header_only(good.begin(), good.begin() + 8);
  CHECK_THROWS_AS(decode_nseb(header_only), FormatError);

  auto empty = good;
  empty.resize(13);
  empty[5] = 0;
  CHECK_THROWS_AS(decode_nseb(empty), FormatError);

  const auto m = decode_nseb(good);
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  CHECK(m.values(1, 2) == 1.5);
}

TEST_CASE("embedio: read errors name the file and keep their type") {
  const auto path = temp_path("bad.nseb");
  {
    std::ofstream out(path, std::ios::binary);
    out << "XXXXjunkjunkjunk";
  }
  CHECK_THROWS_AS(read_embeddings(path), FormatError);
  CHECK(message_of([&] { read_embeddings(path); }).find("bad.nseb") != std::string::npos);
  CHECK_THROWS_AS(read_embeddings(temp_path("missing.nseb")), ValidationError);
}

TEST_CASE("embedio: alignment") {
  ShiftDatasetConfig cfg;
  cfg.n_per_class = 5;
  const auto ds = gen_dataset(cfg);
  EmbeddingMatrix ok{Matrix(20, 4, 1.0), {}};
  validate_alignment(ok, ds.manifest);
  CHECK(ok.dataset_id == ds.manifest.dataset_id);

  EmbeddingMatrix short_m{Matrix(19, 4, 1.0), {}};
  const auto msg = message_of([&] { validate_alignment(short_m, ds.manifest); });
  CHECK(msg.find("19") != std::string::npos);
  CHECK(msg.find("20") != std::string::npos);
  CHECK_THROWS_AS(validate_alignment(short_m, ds.manifest), ValidationError);

  DatasetManifest empty;
  empty.dataset_id = "x";
  CHECK_THROWS_AS(validate_alignment(ok, empty), ValidationError);
}
