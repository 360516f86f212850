#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "nlwave/linalg.hpp"

namespace nlwave::io {

/// 17 significant digits, "." separator, "-inf"/"inf"/"nan" for non-finite values.
std::string format_number(double value);

/// Strict locale-independent parse of one decimal value (accepts the
/// non-finite spellings produced by format_number).
double parse_number(std::string_view text);

// Matrix text format: "rows cols" on the first line, then one line per row.
void write_matrix(std::ostream& out, const Matrix& m);
Matrix read_matrix(std::istream& in);
Matrix read_matrix_file(const std::filesystem::path& path);
void write_matrix_file(const std::filesystem::path& path, const Matrix& m);

/// Column-oriented CSV table: one header, equal-length numeric columns.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

void write_csv(std::ostream& out, const CsvTable& table);
void write_csv_file(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);

/// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string hex64(std::uint64_t value);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace nlwave::io
