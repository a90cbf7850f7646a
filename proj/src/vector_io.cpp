// SPDX-FileCopyrightText: © 2026 The itnorm Authors
//
// SPDX-License-Identifier: Apache-2.0
#include "itnorm/vector_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "itnorm/errors.hpp"

namespace itnorm {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

FpScalar parse_scalar(std::string_view token, Format fmt, std::size_t line_no) {
  const std::string_view t = trim(token);
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  if (!t.empty() && *begin == '+') ++begin;
  if (fmt == Format::FP32) {
    float v = 0.0f;
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec == std::errc() && ptr == end && !t.empty()) {
      return round_binary(static_cast<double>(v), fmt);
    }
  } else {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec == std::errc() && ptr == end && !t.empty()) return round_binary(v, fmt);
  }
  throw DataError("line " + std::to_string(line_no) + ": malformed value '" + std::string(t) +
                  "'");
}

void put_u32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                         static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
  out.write(bytes, 4);
}

std::uint32_t get_le(std::istream& in, int nbytes) {
  unsigned char bytes[4] = {};
  in.read(reinterpret_cast<char*>(bytes), nbytes);
  if (in.gcount() != nbytes) throw DataError("binary vector file is truncated");
  std::uint32_t v = 0;
  for (int i = nbytes - 1; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

}  // namespace

std::uint32_t format_tag(Format fmt) {
  switch (fmt) {
    case Format::FP32:
      return 0;
    case Format::FP16:
      return 1;
    case Format::BF16:
      return 2;
  }
  return 0;
}

Format format_from_tag(std::uint32_t tag) {
  switch (tag) {
    case 0:
      return Format::FP32;
    case 1:
      return Format::FP16;
    case 2:
      return Format::BF16;
    default:
      throw DataError("unknown format tag " + std::to_string(tag));
  }
}

std::string format_scalar(FpScalar x) {
  if (x.is_nan()) return "nan";
  if (x.is_inf()) return x.is_negative() ? "-inf" : "inf";
  // Every supported format embeds in binary32, and binary32's shortest
  // round-trip form also pins down the narrower formats.
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), static_cast<float>(x.value()));
  return std::string(buf, ptr);
}

VectorFile read_text_vectors(std::istream& in, Format fmt) {
  VectorFile file;
  file.format = fmt;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::vector<FpScalar> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = body.find(',', start);
      row.push_back(parse_scalar(body.substr(start, comma - start), fmt, line_no));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!file.rows.empty() && row.size() != file.dim) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(file.dim) + " values, got " + std::to_string(row.size()));
    }
    file.dim = row.size();
    file.rows.push_back(std::move(row));
  }
  if (file.rows.empty()) throw DataError("vector file contains no vectors");
  return file;
}

VectorFile read_binary_vectors(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  if (in.gcount() != 4 || magic != kBinaryMagic) throw DataError("bad binary vector magic");
  VectorFile file;
  file.binary = true;
  file.format = format_from_tag(get_le(in, 4));
  file.dim = get_le(in, 4);
  const std::uint32_t count = get_le(in, 4);
  if (file.dim == 0) throw DataError("binary vector file declares d=0");
  const int width = format_spec(file.format).total_bits / 8;
  file.rows.reserve(std::min<std::uint32_t>(count, 1u << 16));
  for (std::uint32_t r = 0; r < count; ++r) {
    std::vector<FpScalar> row;
    row.reserve(file.dim);
    for (std::size_t i = 0; i < file.dim; ++i) row.emplace_back(file.format, get_le(in, width));
    file.rows.push_back(std::move(row));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw DataError("binary vector file has trailing bytes");
  }
  if (file.rows.empty()) throw DataError("vector file contains no vectors");
  return file;
}

VectorFile read_vector_file(const std::filesystem::path& path, Format text_format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::array<char, 4> head{};
  in.read(head.data(), 4);
  const bool binary = in.gcount() == 4 && head == kBinaryMagic;
  in.clear();
  in.seekg(0);
  return binary ? read_binary_vectors(in) : read_text_vectors(in, text_format);
}

void write_text_vectors(std::ostream& out, const VectorFile& file) {
  for (const auto& row : file.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_scalar(row[i]);
    }
    out << '\n';
  }
}

void write_binary_vectors(std::ostream& out, const VectorFile& file) {
  out.write(kBinaryMagic.data(), 4);
  put_u32(out, format_tag(file.format));
  put_u32(out, static_cast<std::uint32_t>(file.dim));
  put_u32(out, static_cast<std::uint32_t>(file.rows.size()));
  const int width = format_spec(file.format).total_bits / 8;
  for (const auto& row : file.rows) {
    for (const FpScalar& x : row) {
      const std::uint32_t b = x.bits();
      for (int i = 0; i < width; ++i) out.put(static_cast<char>((b >> (8 * i)) & 0xFF));
    }
  }
}

void write_vector_file(const std::filesystem::path& path, const VectorFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  if (file.binary) {
    write_binary_vectors(out, file);
  } else {
    write_text_vectors(out, file);
  }
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace itnorm
