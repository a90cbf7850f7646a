// SPDX-FileCopyrightText: © 2026 The itnorm Authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "itnorm/fpformat.hpp"

namespace itnorm {

// Vector files come in two encodings.
//
// Text: one vector per line, comma-separated decimal literals. Blank lines and
// lines starting with '#' are skipped. Values are rounded to the target format.
//
// Binary (little-endian):
//   offset 0  : magic "IL2V"
//   offset 4  : u32 format tag (0 = fp32, 1 = fp16, 2 = bf16)
//   offset 8  : u32 d
//   offset 12 : u32 count
//   offset 16 : count * d raw bit patterns, 4 bytes each for fp32, 2 otherwise
struct VectorFile {
  Format format = Format::FP32;
  std::size_t dim = 0;
  std::vector<std::vector<FpScalar>> rows;
  bool binary = false;
};

inline constexpr std::array<char, 4> kBinaryMagic = {'I', 'L', '2', 'V'};

std::uint32_t format_tag(Format fmt);
Format format_from_tag(std::uint32_t tag);  // Throws DataError.

// All functions below throw DataError on malformed content.
VectorFile read_text_vectors(std::istream& in, Format fmt);
VectorFile read_binary_vectors(std::istream& in);
// Sniffs the magic; text files are read in `text_format`.
VectorFile read_vector_file(const std::filesystem::path& path, Format text_format);

void write_text_vectors(std::ostream& out, const VectorFile& file);
void write_binary_vectors(std::ostream& out, const VectorFile& file);
void write_vector_file(const std::filesystem::path& path, const VectorFile& file);

// Shortest decimal that reads back to the same value in its format.
std::string format_scalar(FpScalar x);

}  // namespace itnorm
