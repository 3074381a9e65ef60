#include "nsbench/embedio.hpp"

#include <fmt/format.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "nsbench/error.hpp"

namespace nsbench {
namespace {

constexpr char kMagic[4] = {'N', 'S', 'E', 'B'};

void put_u32(std::uint8_t* p, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_nseb(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) {
    throw ValidationError(fmt::format("NSEB requires n, d >= 1 (got {}x{})", m.rows(), m.cols()));
  }
  constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
  if (m.rows() > kMax || m.cols() > kMax) throw ValidationError("NSEB dimensions exceed u32");

  const std::size_t count = m.rows() * m.cols();
  std::vector<std::uint8_t> out(kNsebHeaderSize + 4 * count);
  std::memcpy(out.data(), kMagic, 4);
  out[4] = kNsebVersion;
  put_u32(out.data() + 5, static_cast<std::uint32_t>(m.rows()));
  put_u32(out.data() + 9, static_cast<std::uint32_t>(m.cols()));

  std::uint8_t* p = out.data() + kNsebHeaderSize;
  const auto values = m.data();
  for (std::size_t i = 0; i < count; ++i, p += 4) {
    const auto f = static_cast<float>(values[i]);
    if (!std::isfinite(f)) {
      throw ValidationError(fmt::format("non-finite value at row {}, column {}", i / m.cols(),
                                        i % m.cols()));
    }
    put_u32(p, std::bit_cast<std::uint32_t>(f));
  }
  return out;
}

EmbeddingMatrix decode_nseb(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("not an NSEB file (bad magic)");
  }
  if (bytes.size() < kNsebHeaderSize) {
    throw FormatError(fmt::format("corrupt NSEB header: {} bytes", bytes.size()));
  }
  if (bytes[4] != kNsebVersion) {
    throw FormatError(fmt::format("unsupported NSEB version {}", static_cast<int>(bytes[4])));
  }
  const std::size_t n = get_u32(bytes.data() + 5);
  const std::size_t d = get_u32(bytes.data() + 9);
  if (n == 0 || d == 0) throw FormatError(fmt::format("NSEB header declares {}x{}", n, d));
  const std::size_t expected = kNsebHeaderSize + 4 * n * d;
  if (bytes.size() != expected) {
    throw FormatError(fmt::format("corrupt NSEB payload: {} bytes, header implies {}",
                                  bytes.size(), expected));
  }

  EmbeddingMatrix out{Matrix(n, d), {}};
  auto values = out.values.data();
  const std::uint8_t* p = bytes.data() + kNsebHeaderSize;
  for (std::size_t i = 0; i < n * d; ++i, p += 4) {
    const float f = std::bit_cast<float>(get_u32(p));
    if (!std::isfinite(f)) {
      throw ValidationError(fmt::format("NSEB value at row {}, column {} is not finite", i / d,
                                        i % d));
    }
    values[i] = f;
  }
  return out;
}

void write_embeddings(const Matrix& m, const std::filesystem::path& path) {
  const auto bytes = encode_nseb(m);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot open {} for writing", path.string()));
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(fmt::format("write failed for {}", path.string()));
}

EmbeddingMatrix read_embeddings(const std::filesystem::path& path) {
  require_input_file(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_nseb(bytes);
  } catch (const FormatError& e) {
    throw FormatError(fmt::format("{}: {}", path.string(), e.what()));
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void validate_alignment(EmbeddingMatrix& matrix, const DatasetManifest& manifest) {
  if (manifest.size() == 0) throw ValidationError("manifest has no records");
  if (matrix.rows() != manifest.size()) {
    throw ValidationError(fmt::format("alignment mismatch: matrix has {} rows, manifest '{}' has {} records",
                                      matrix.rows(), manifest.dataset_id, manifest.size()));
  }
  matrix.dataset_id = manifest.dataset_id;
}

}  // namespace nsbench
