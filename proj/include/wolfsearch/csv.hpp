#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace wolfsearch::csv {

struct Field
{
  std::string text;
  bool quoted = false;
};

struct Record
{
  std::size_t line = 0; // 1-based line where the record starts
  std::vector<Field> fields;
};

//! RFC 4180 reader: quoted fields may contain commas, doubled quotes and
//! line breaks. Accepts LF or CRLF record terminators.
std::vector<Record> parse(std::string_view content);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

//! Quotes the field only when it contains a comma, quote, CR or LF.
std::string quote(std::string_view field);

//! Single-column score file with header `score`.
std::vector<double> read_scores(const std::filesystem::path& path);
void write_scores(const std::filesystem::path& path, const std::vector<double>& scores);

} // namespace wolfsearch::csv
