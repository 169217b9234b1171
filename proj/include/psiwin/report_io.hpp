#pragma once

#include <filesystem>
#include <initializer_list>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace psiwin::io {

/// Shortest decimal string that parses back to the same double.
std::string shortest(double v);

/// "9.098x10^5"-style rendering of v in units of 10^exponent with `digits` significant figures.
std::string in_units(double v, int exponent, int digits);

/// Decimal exponent of |v| (floor(log10 |v|)), 0 for v == 0.
int decimal_exponent(double v);

/// Parses integer literals and scientific notation ("1e10"); the value must be integral.
std::uint64_t parse_count(std::string_view text);

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header);
    void row(const std::vector<std::string>& cells);
    void close();

private:
    std::filesystem::path path_;
    std::string buffer_;
};

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// `key: value` lines; outputs get a content digest each.
void write_manifest(const std::filesystem::path& path, std::string_view command,
                    const std::vector<std::pair<std::string, std::string>>& params,
                    double wall_seconds, const std::vector<std::filesystem::path>& outputs);

}  // namespace psiwin::io
