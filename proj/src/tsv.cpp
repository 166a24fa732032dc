#include "hgrec/tsv.hpp"

#include <charconv>
#include <fstream>

#include "hgrec/errors.hpp"

namespace hgrec {

std::vector<TsvRecord> read_tsv(const std::filesystem::path& path, int expect_fields) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<TsvRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    TsvRecord rec;
    rec.line = lineno;
    size_t start = 0;
    while (true) {
      size_t tab = line.find('\t', start);
      rec.fields.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (expect_fields > 0 && static_cast<int>(rec.fields.size()) != expect_fields)
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(expect_fields) + " tab-separated fields, got " +
                      std::to_string(rec.fields.size()));
    out.push_back(std::move(rec));
  }
  return out;
}

std::string tsv_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\\': out += "\\\\"; break;
      default: out += c;
    }
  }
  return out;
}

std::string tsv_unescape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\\' && i + 1 < text.size()) {
      const char n = text[i + 1];
      if (n == 't') { out += '\t'; ++i; continue; }
      if (n == 'n') { out += '\n'; ++i; continue; }
      if (n == '\\') { out += '\\'; ++i; continue; }
    }
    out += text[i];
  }
  return out;
}

double parse_double(const std::string& s, const std::filesystem::path& path, int line) {
  double x = 0.0;
  const char* b = s.data();
  const char* e = b + s.size();
  auto [p, ec] = std::from_chars(b, e, x);
  if (ec != std::errc() || p != e)
    throw DataError(path.string() + ":" + std::to_string(line) + ": not a number: '" + s + "'");
  return x;
}

std::vector<double> parse_double_list(const std::string& s, const std::filesystem::path& path,
                                      int line) {
  std::vector<double> out;
  size_t start = 0;
  while (start <= s.size()) {
    size_t comma = s.find(',', start);
    const std::string tok = s.substr(start, comma == std::string::npos ? comma : comma - start);
    out.push_back(parse_double(tok, path, line));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace hgrec
