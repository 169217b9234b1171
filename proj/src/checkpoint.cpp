#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "psiwin/errors.hpp"
#include "psiwin/moments.hpp"

namespace psiwin::checkpoint {

namespace {

constexpr std::string_view kMagic = "psiwin-checkpoint 1";

std::string hex(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, std::abs(v), std::chars_format::hex);
    return (std::signbit(v) ? "-0x" : "0x") + std::string(buf, r.ptr);
}

double parse_hex(std::string_view s) {
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    bool negative = false;
    if (!s.empty() && s.front() == '-') {
        negative = true;
        s.remove_prefix(1);
    }
    if (!s.starts_with("0x")) throw CheckpointError("malformed hex float: " + std::string(s));
    s.remove_prefix(2);
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v, std::chars_format::hex);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
        throw CheckpointError("malformed hex float: 0x" + std::string(s));
    }
    return negative ? -v : v;
}

std::string sum_to_text(const ExactSum& s) {
    const auto parts = s.expansion();
    if (parts.empty()) return "0";
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += ',';
        out += hex(parts[i]);
    }
    return out;
}

ExactSum sum_from_text(std::string_view text) {
    std::vector<double> parts;
    if (text != "0") {
        while (!text.empty()) {
            const auto comma = text.find(',');
            parts.push_back(parse_hex(text.substr(0, comma)));
            if (comma == std::string_view::npos) break;
            text.remove_prefix(comma + 1);
        }
    }
    return ExactSum::from_expansion(parts);
}

void write_record(std::ostream& out, const MomentAccumulator& acc) {
    out << "range " << acc.begin << ' ' << acc.end << '\n';
    out << "n " << acc.n_processed << '\n';
    for (std::size_t k = 0; k < acc.power_sums.size(); ++k) {
        out << "S " << k << ' ' << sum_to_text(acc.power_sums[k]) << '\n';
    }
    out << "max " << hex(acc.max_dev.value) << ' ' << acc.max_dev.at_x << '\n';
    out << "min " << hex(acc.min_dev.value) << ' ' << acc.min_dev.at_x << '\n';
    out << "exceed";
    for (auto c : acc.exceed_counts) out << ' ' << c;
    out << '\n';
    if (acc.histogram.empty()) {
        out << "hist empty\n";
    } else {
        out << "hist " << acc.histogram.first_bin();
        for (auto c : acc.histogram.counts()) out << ' ' << c;
        out << '\n';
    }
    out << "end\n";
}

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    // Next line, which must start with `key`; returns the stream of what follows.
    std::istringstream expect(std::string_view key) {
        std::string line;
        if (!std::getline(in_, line)) {
            throw CheckpointError("checkpoint truncated; expected '" + std::string(key) + "'");
        }
        ++line_no_;
        std::istringstream fields(line);
        std::string word;
        fields >> word;
        if (word != key) {
            throw CheckpointError("checkpoint line " + std::to_string(line_no_) + ": expected '" +
                                  std::string(key) + "', found '" + word + "'");
        }
        return fields;
    }

    template <class T>
    T value(std::string_view key) {
        auto fields = expect(key);
        T v{};
        if (!(fields >> v)) bad(key);
        return v;
    }

    [[noreturn]] void bad(std::string_view key) const {
        throw CheckpointError("checkpoint line " + std::to_string(line_no_) + ": bad '" +
                              std::string(key) + "' field");
    }

private:
    std::istream& in_;
    int line_no_ = 0;
};

MomentAccumulator read_record(Reader& r, const ExperimentConfig& config) {
    MomentAccumulator acc = MomentAccumulator::empty(config, 0);
    {
        auto f = r.expect("range");
        if (!(f >> acc.begin >> acc.end)) r.bad("range");
    }
    acc.n_processed = r.value<std::uint64_t>("n");
    if (acc.end - acc.begin != acc.n_processed) r.bad("n");
    for (std::size_t k = 0; k < acc.power_sums.size(); ++k) {
        auto f = r.expect("S");
        std::size_t index = 0;
        std::string text;
        if (!(f >> index >> text) || index != k) r.bad("S");
        acc.power_sums[k] = sum_from_text(text);
    }
    for (auto* ext : {&acc.max_dev, &acc.min_dev}) {
        const char* key = ext == &acc.max_dev ? "max" : "min";
        auto f = r.expect(key);
        std::string text;
        if (!(f >> text >> ext->at_x)) r.bad(key);
        ext->value = parse_hex(text);
    }
    {
        auto f = r.expect("exceed");
        for (auto& c : acc.exceed_counts) {
            if (!(f >> c)) r.bad("exceed");
        }
    }
    {
        auto f = r.expect("hist");
        std::string first;
        f >> first;
        if (first != "empty") {
            std::int64_t first_bin = 0;
            try {
                first_bin = std::stoll(first);
            } catch (const std::exception&) {
                r.bad("hist");
            }
            std::vector<std::uint64_t> counts;
            std::uint64_t c = 0;
            while (f >> c) counts.push_back(c);
            acc.histogram = Histogram::from_dense(first_bin, std::move(counts));
        }
    }
    r.expect("end");
    return acc;
}

}  // namespace

void save(const std::filesystem::path& path, const State& state) {
    const auto& cfg = state.config;
    std::ostringstream out;
    out << kMagic << '\n';
    out << "x " << cfg.x << '\n';
    out << "h " << cfg.h << '\n';
    out << "k_max " << cfg.k_max << '\n';
    out << "segment_size " << cfg.segment_size << '\n';
    out << "bin_width " << hex(cfg.bin_width) << '\n';
    out << "thresholds " << cfg.thresholds.size();
    for (double t : cfg.thresholds) out << ' ' << hex(t);
    out << '\n';
    out << "segments_total " << state.segments_total << '\n';
    out << "prefix_segments " << state.prefix_segments << '\n';
    out << "pending " << state.pending.size() << '\n';
    out << "record prefix\n";
    write_record(out, state.prefix);
    for (const auto& [index, acc] : state.pending) {
        out << "record segment " << index << '\n';
        write_record(out, acc);
    }

    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
        if (!file) throw CheckpointError("cannot write checkpoint " + tmp.string());
        const std::string text = out.str();
        file.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!file) throw CheckpointError("short write to checkpoint " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

State load(const std::filesystem::path& path) {
    std::ifstream file(path);
    if (!file) throw CheckpointError("cannot open checkpoint " + path.string());
    std::string magic;
    std::getline(file, magic);
    if (magic != kMagic) throw CheckpointError(path.string() + " is not a psiwin checkpoint");

    Reader r(file);
    State state;
    auto& cfg = state.config;
    cfg.x = r.value<std::uint64_t>("x");
    cfg.h = r.value<std::uint64_t>("h");
    cfg.k_max = r.value<int>("k_max");
    cfg.segment_size = r.value<std::uint64_t>("segment_size");
    cfg.bin_width = parse_hex(r.value<std::string>("bin_width"));
    {
        auto f = r.expect("thresholds");
        std::size_t n = 0;
        if (!(f >> n)) r.bad("thresholds");
        cfg.thresholds.assign(n, 0.0);
        for (auto& t : cfg.thresholds) {
            std::string text;
            if (!(f >> text)) r.bad("thresholds");
            t = parse_hex(text);
        }
    }
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        throw CheckpointError(std::string("checkpoint config invalid: ") + e.what());
    }
    if (!(cfg.bin_width > 0.0)) throw CheckpointError("checkpoint bin_width must be positive");
    state.segments_total = r.value<std::uint64_t>("segments_total");
    state.prefix_segments = r.value<std::uint64_t>("prefix_segments");
    const auto pending = r.value<std::size_t>("pending");
    {
        auto f = r.expect("record");
        std::string kind;
        if (!(f >> kind) || kind != "prefix") r.bad("record");
    }
    state.prefix = read_record(r, cfg);
    for (std::size_t i = 0; i < pending; ++i) {
        auto f = r.expect("record");
        std::string kind;
        std::uint64_t index = 0;
        if (!(f >> kind >> index) || kind != "segment") r.bad("record");
        state.pending.emplace(index, read_record(r, cfg));
    }
    return state;
}

}  // namespace psiwin::checkpoint
