#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace hgrec {

struct TsvRecord {
  std::vector<std::string> fields;
  int line = 0;  // 1-based line number in the source file
};

// Reads a UTF-8 TSV file. `#`-prefixed lines and blank lines are skipped;
// trailing \r is stripped. Throws DataError when the field count differs
// from `expect_fields` (0 disables the check).
std::vector<TsvRecord> read_tsv(const std::filesystem::path& path, int expect_fields = 0);

std::string tsv_escape(const std::string& text);
std::string tsv_unescape(const std::string& text);

double parse_double(const std::string& s, const std::filesystem::path& path, int line);
std::vector<double> parse_double_list(const std::string& s, const std::filesystem::path& path,
                                      int line);

}  // namespace hgrec
