#pragma once

// NSEB: little-endian binary matrix file shared by series exports, feature
// exports and external embedding producers.
//
//   offset 0   4 bytes   magic "NSEB"
//   offset 4   1 byte    version (1)
//   offset 5   u32 LE    n (rows)
//   offset 9   u32 LE    d (columns)
//   offset 13  n*d f32   row-major IEEE-754 binary32, little-endian
//
// File size is exactly 13 + 4*n*d bytes; every payload value is finite.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nsbench/manifest.hpp"
#include "nsbench/matrix.hpp"

namespace nsbench {

inline constexpr std::size_t kNsebHeaderSize = 13;
inline constexpr std::uint8_t kNsebVersion = 1;

struct EmbeddingMatrix {
  Matrix values;
  // Bound by validate_alignment; empty until then.
  std::string dataset_id;

  std::size_t rows() const noexcept { return values.rows(); }
  std::size_t cols() const noexcept { return values.cols(); }
};

// Values are narrowed to float32. Throws ValidationError for empty shapes or
// values that are non-finite as float32.
std::vector<std::uint8_t> encode_nseb(const Matrix& m);
EmbeddingMatrix decode_nseb(std::span<const std::uint8_t> bytes);

void write_embeddings(const Matrix& m, const std::filesystem::path& path);
EmbeddingMatrix read_embeddings(const std::filesystem::path& path);

// Row count must equal the manifest's record count; binds the dataset id.
void validate_alignment(EmbeddingMatrix& matrix, const DatasetManifest& manifest);

}  // namespace nsbench
