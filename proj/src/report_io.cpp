#include "psiwin/report_io.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "psiwin/errors.hpp"
#include "psiwin/sieve.hpp"
#include "psiwin/version.hpp"

namespace psiwin::io {

std::string shortest(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

int decimal_exponent(double v) {
    if (v == 0.0 || !std::isfinite(v)) return 0;
    return static_cast<int>(std::floor(std::log10(std::abs(v))));
}

std::string in_units(double v, int exponent, int digits) {
    const double scaled = v / std::pow(10.0, exponent);
    const int lead = decimal_exponent(scaled);
    const int decimals = std::max(0, digits - 1 - lead);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*fx10^%d", decimals, scaled, exponent);
    return buf;
}

std::uint64_t parse_count(std::string_view text) {
    std::uint64_t n = 0;
    auto r = std::from_chars(text.data(), text.data() + text.size(), n);
    if (r.ec == std::errc{} && r.ptr == text.data() + text.size()) return n;
    double d = 0.0;
    r = std::from_chars(text.data(), text.data() + text.size(), d);
    if (r.ec != std::errc{} || r.ptr != text.data() + text.size()) {
        throw ConfigError("not a number: '" + std::string(text) + "'");
    }
    if (!(d >= 0.0) || d != std::floor(d) || d > static_cast<double>(kMaxSieveValue)) {
        throw ConfigError("expected a non-negative integer, got '" + std::string(text) + "'");
    }
    return static_cast<std::uint64_t>(d);
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     std::initializer_list<std::string_view> header)
    : path_(path) {
    bool first = true;
    for (auto h : header) {
        if (!first) buffer_ += ',';
        buffer_ += h;
        first = false;
    }
    buffer_ += '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += cells[i];
    }
    buffer_ += '\n';
}

void CsvWriter::close() {
    std::ofstream out(path_, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path_.string());
    out.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    if (!out) throw std::runtime_error("short write to " + path_.string());
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md.data(), &len);
    EVP_MD_CTX_free(ctx);
    std::ostringstream hex;
    for (unsigned i = 0; i < len; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    }
    return hex.str();
}

void write_manifest(const std::filesystem::path& path, std::string_view command,
                    const std::vector<std::pair<std::string, std::string>>& params,
                    double wall_seconds, const std::vector<std::filesystem::path>& outputs) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "command: " << command << '\n';
    out << "version: " << kVersion << '\n';
    for (const auto& [k, v] : params) out << "param." << k << ": " << v << '\n';
    out << "wall_time_s: " << shortest(wall_seconds) << '\n';
    for (const auto& f : outputs) {
        out << "output." << f.filename().string() << ": sha256:" << sha256_file(f) << '\n';
    }
}

}  // namespace psiwin::io
