#include "wolfsearch/csv.hpp"

#include "wolfsearch/core.hpp"
#include "wolfsearch/oracle.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace wolfsearch::csv {

std::vector<Record> parse(std::string_view content)
{
  std::vector<Record> records;
  std::size_t line = 1;
  std::size_t i = 0;
  const std::size_t n = content.size();
  while (i < n) {
    Record rec;
    rec.line = line;
    while (true) {
      Field field;
      if (i < n && content[i] == '"') {
        field.quoted = true;
        ++i;
        while (true) {
          if (i >= n)
            throw ConfigError("csv: unterminated quoted field starting on line " +
                              std::to_string(rec.line));
          const char c = content[i];
          if (c == '"') {
            if (i + 1 < n && content[i + 1] == '"') {
              field.text += '"';
              i += 2;
              continue;
            }
            ++i;
            break;
          }
          if (c == '\n')
            ++line;
          field.text += c;
          ++i;
        }
        if (i < n && content[i] != ',' && content[i] != '\n' && content[i] != '\r')
          throw ConfigError("csv: unexpected character after closing quote on line " +
                            std::to_string(line));
      } else {
        while (i < n && content[i] != ',' && content[i] != '\n' && content[i] != '\r') {
          if (content[i] == '"')
            throw ConfigError("csv: stray quote in unquoted field on line " +
                              std::to_string(line));
          field.text += content[i];
          ++i;
        }
      }
      rec.fields.push_back(std::move(field));
      if (i < n && content[i] == ',') {
        ++i;
        continue;
      }
      break;
    }
    if (i < n && content[i] == '\r')
      ++i;
    if (i < n && content[i] == '\n') {
      ++i;
      ++line;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::string read_file(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out)
    throw Error("write to '" + path.string() + "' failed");
}

std::string quote(std::string_view field)
{
  if (field.find_first_of(",\"\r\n") == std::string_view::npos)
    return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"')
      out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<double> read_scores(const std::filesystem::path& path)
{
  const auto records = parse(read_file(path));
  if (records.empty() || records[0].fields.size() != 1 || records[0].fields[0].text != "score")
    throw ConfigError(path.string() + ": expected header 'score'");
  std::vector<double> scores;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != 1)
      throw ConfigError(path.string() + ": line " + std::to_string(rec.line) +
                        ": expected exactly one column");
    double v = 0.0;
    try {
      v = oracle::parse_double(rec.fields[0].text);
    } catch (const Error&) {
      throw ConfigError(path.string() + ": line " + std::to_string(rec.line) +
                        ": non-numeric score '" + rec.fields[0].text + "'");
    }
    if (!std::isfinite(v))
      throw ConfigError(path.string() + ": line " + std::to_string(rec.line) +
                        ": non-finite score");
    scores.push_back(v);
  }
  return scores;
}

void write_scores(const std::filesystem::path& path, const std::vector<double>& scores)
{
  std::string out = "score\n";
  for (double s : scores) {
    out += oracle::format_double(s);
    out += '\n';
  }
  write_file(path, out);
}

} // namespace wolfsearch::csv
