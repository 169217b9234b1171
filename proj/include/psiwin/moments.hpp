#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "psiwin/exact_sum.hpp"
#include "psiwin/sieve.hpp"

namespace psiwin {

inline constexpr int kMaxMoment = 12;

/// Parameters of one sweep of D(n) = ψ(n+h) - ψ(n) - h over 0 <= n < x.
struct ExperimentConfig {
    std::uint64_t x = 0;
    std::uint64_t h = 0;
    int k_max = 6;
    std::vector<double> thresholds{3000.0};
    std::uint64_t segment_size = kDefaultSegmentSize;
    double bin_width = 0.0;  // 0 selects default_bin_width(x, h)

    /// Throws ConfigError on 1 <= h < x, 2 <= k_max <= 12, segment_size >= h,
    /// thresholds >= 0 or x + h beyond the sieve range.
    void validate() const;

    /// Validated copy with bin_width filled in.
    [[nodiscard]] ExperimentConfig resolved() const;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// sqrt(predicted variance) / 50. Falls back to the h log(x + h) variance when
/// x/h is too small for the refined predictor to be positive.
double default_bin_width(std::uint64_t x, std::uint64_t h);

/// Dense histogram of floor(D / width) bin indices.
class Histogram {
public:
    void add(std::int64_t bin, std::uint64_t count = 1);
    void merge(const Histogram& other);

    [[nodiscard]] bool empty() const { return counts_.empty(); }
    [[nodiscard]] std::int64_t first_bin() const { return first_; }
    [[nodiscard]] std::int64_t last_bin() const {
        return first_ + static_cast<std::int64_t>(counts_.size()) - 1;
    }
    [[nodiscard]] std::uint64_t count(std::int64_t bin) const;
    [[nodiscard]] std::uint64_t total() const;
    [[nodiscard]] const std::vector<std::uint64_t>& counts() const { return counts_; }

    /// Nonzero bins only.
    [[nodiscard]] std::map<std::int64_t, std::uint64_t> to_map() const;

    static Histogram from_dense(std::int64_t first_bin, std::vector<std::uint64_t> counts);

    friend bool operator==(const Histogram&, const Histogram&) = default;

private:
    static constexpr std::uint64_t kMaxBins = std::uint64_t{1} << 24;
    std::int64_t first_ = 0;
    std::vector<std::uint64_t> counts_;
};

struct Extreme {
    double value = 0.0;
    std::uint64_t at_x = 0;

    friend bool operator==(const Extreme&, const Extreme&) = default;
};

/// Running sums for D(n) over a contiguous n-range [begin, end).
struct MomentAccumulator {
    ExperimentConfig config;
    std::uint64_t begin = 0;
    std::uint64_t end = 0;
    std::uint64_t n_processed = 0;
    std::vector<ExactSum> power_sums;  // S_0 .. S_kmax
    Extreme max_dev{-std::numeric_limits<double>::infinity(), 0};
    Extreme min_dev{std::numeric_limits<double>::infinity(), 0};
    std::vector<std::uint64_t> exceed_counts;  // parallel to config.thresholds
    Histogram histogram;

    /// An accumulator that has seen nothing; config must already be resolved.
    static MomentAccumulator empty(const ExperimentConfig& config, std::uint64_t at = 0);

    /// Folds in one value D(n); n must equal `end`.
    void fold(double d);

    friend bool operator==(const MomentAccumulator&, const MomentAccumulator&) = default;
};

/// Streams D(n) for n in [begin, end) with exact windowed sums of Λ.
MomentAccumulator accumulate_range(const ExperimentConfig& config, std::uint64_t begin,
                                   std::uint64_t end, const BasePrimes& base);

/// a must cover [m, m'), b must cover [m', m''). Empty accumulators are identities.
/// Throws PreconditionError on config mismatch or non-adjacent ranges.
MomentAccumulator merge(MomentAccumulator a, MomentAccumulator b);

struct RunOptions {
    unsigned workers = 1;
    std::optional<std::filesystem::path> checkpoint;
    /// Stop after this many newly computed segments (the checkpoint keeps them).
    std::optional<std::uint64_t> max_new_segments;
    std::function<void(std::uint64_t done, std::uint64_t total)> progress;
};

struct RunOutcome {
    MomentAccumulator accumulator;  // the contiguous completed prefix
    bool complete = false;
    std::uint64_t segments_done = 0;
    std::uint64_t segments_total = 0;
    std::uint64_t segments_resumed = 0;
};

/// Full sweep over [0, x). Segments are fixed by config.segment_size and
/// merged in order; the result is bitwise independent of `workers`.
MomentAccumulator run_experiment(const ExperimentConfig& config, unsigned workers = 1);

/// The same, resuming from and updating options.checkpoint when given.
RunOutcome run_experiment(const ExperimentConfig& config, const RunOptions& options);

struct MomentReport {
    std::uint64_t x = 0;
    std::uint64_t h = 0;
    std::vector<double> mu;        // μ_0 .. μ_kmax
    std::vector<double> mu_tilde;  // μ_k / μ_2^{k/2}
    double sigma = 0.0;
    Extreme max_dev;
    Extreme min_dev;
    std::vector<double> thresholds;
    std::vector<std::uint64_t> exceed_counts;
};

/// Requires n_processed == x. DegenerateError when μ_2 <= 0.
MomentReport finalize(const MomentAccumulator& acc);

/// Number of n in [0, x) with |D(n)| > threshold. ConfigError if the threshold was not tracked.
std::uint64_t exceedance_measure(const MomentAccumulator& acc, double threshold);

struct CdfRow {
    double t = 0.0;
    double empirical = 0.0;  // fraction of n with D(n) < t
    double normal = 0.0;     // Φ(t / σ)
};

/// Empirical CDF at histogram bin edges next to the normal CDF with the same variance.
std::vector<CdfRow> export_cdf(const MomentAccumulator& acc);

namespace checkpoint {

struct State {
    ExperimentConfig config;
    std::uint64_t segments_total = 0;
    std::uint64_t prefix_segments = 0;  // segments [0, prefix_segments) merged into `prefix`
    MomentAccumulator prefix;
    std::map<std::uint64_t, MomentAccumulator> pending;  // completed out of order
};

/// Plain text; power sums are written as hexadecimal floating-point expansions
/// so a load reproduces the accumulator bit for bit.
void save(const std::filesystem::path& path, const State& state);
State load(const std::filesystem::path& path);

}  // namespace checkpoint

}  // namespace psiwin
