#pragma once

// Minimal numeric CSV: mandatory header row, ',' separator, '\n' line endings,
// values printed with 17 significant digits so that parse(emit(x)) == x.

#include <filesystem>
#include <string>
#include <vector>

namespace mimfrac::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/// Shortest text that reads back as exactly `v` (17 significant digits).
std::string format_number(double v);

std::string emit(const Table& t);
/// Throws ValidationError naming the 1-based line of any malformed field.
/// Non-finite values ("nan", "inf") parse; callers validate them.
Table parse(const std::string& text);

/// Throws IoError if the file cannot be written / read.
void write_file(const std::filesystem::path& path, const Table& t);
Table read_file(const std::filesystem::path& path);

}  // namespace mimfrac::csv
