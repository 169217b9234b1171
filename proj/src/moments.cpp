#include "psiwin/moments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "psiwin/constants.hpp"
#include "psiwin/errors.hpp"
#include "psiwin/gaussian.hpp"

namespace psiwin {

void ExperimentConfig::validate() const {
    if (h < 1 || h >= x) {
        throw ConfigError("need 1 <= h < X, got X=" + std::to_string(x) +
                          " h=" + std::to_string(h));
    }
    if (k_max < 2 || k_max > kMaxMoment) {
        throw ConfigError("k_max must lie in [2, 12], got " + std::to_string(k_max));
    }
    if (segment_size < h) {
        throw ConfigError("segment_size must be >= h");
    }
    for (double t : thresholds) {
        if (!(t >= 0.0) || !std::isfinite(t)) {
            throw ConfigError("thresholds must be finite and >= 0");
        }
    }
    if (!(bin_width >= 0.0) || !std::isfinite(bin_width)) {
        throw ConfigError("bin_width must be positive (or 0 for the default)");
    }
    if (x > kMaxSieveValue - 2 - h) {
        throw ConfigError("X + h exceeds the sieve range 2^53");
    }
}

ExperimentConfig ExperimentConfig::resolved() const {
    validate();
    ExperimentConfig out = *this;
    if (out.bin_width == 0.0) out.bin_width = default_bin_width(x, h);
    return out;
}

double default_bin_width(std::uint64_t x, std::uint64_t h) {
    const auto v = constants::predict_variances(x, h);
    const double variance =
        v.refined > 0.0 ? v.refined
                        : static_cast<double>(h) * std::log(static_cast<double>(x + h));
    return std::sqrt(variance) / 50.0;
}

// --- Histogram ---------------------------------------------------------------

void Histogram::add(std::int64_t bin, std::uint64_t count) {
    if (counts_.empty()) {
        first_ = bin;
        counts_.assign(1, count);
        return;
    }
    if (bin >= first_ && bin <= last_bin()) {
        counts_[static_cast<std::size_t>(bin - first_)] += count;
        return;
    }
    const std::int64_t lo = std::min(first_, bin);
    const std::int64_t hi = std::max(last_bin(), bin);
    if (static_cast<std::uint64_t>(hi - lo) >= kMaxBins) {
        throw ResourceError("histogram span exceeds 2^24 bins; increase bin_width");
    }
    if (bin < first_) {
        counts_.insert(counts_.begin(), static_cast<std::size_t>(first_ - bin), 0);
        first_ = bin;
    } else {
        counts_.resize(static_cast<std::size_t>(bin - first_ + 1), 0);
    }
    counts_[static_cast<std::size_t>(bin - first_)] += count;
}

void Histogram::merge(const Histogram& other) {
    if (other.empty()) return;
    if (empty()) {
        *this = other;
        return;
    }
    add(other.first_bin(), 0);
    add(other.last_bin(), 0);
    for (std::size_t i = 0; i < other.counts_.size(); ++i) {
        counts_[static_cast<std::size_t>(other.first_ - first_) + i] += other.counts_[i];
    }
}

std::uint64_t Histogram::count(std::int64_t bin) const {
    if (counts_.empty() || bin < first_ || bin > last_bin()) return 0;
    return counts_[static_cast<std::size_t>(bin - first_)];
}

std::uint64_t Histogram::total() const {
    std::uint64_t t = 0;
    for (auto c : counts_) t += c;
    return t;
}

std::map<std::int64_t, std::uint64_t> Histogram::to_map() const {
    std::map<std::int64_t, std::uint64_t> out;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        if (counts_[i] != 0) out.emplace(first_ + static_cast<std::int64_t>(i), counts_[i]);
    }
    return out;
}

Histogram Histogram::from_dense(std::int64_t first_bin, std::vector<std::uint64_t> counts) {
    if (counts.size() > kMaxBins) throw ResourceError("histogram span exceeds 2^24 bins");
    Histogram h;
    if (!counts.empty()) {
        h.first_ = first_bin;
        h.counts_ = std::move(counts);
    }
    return h;
}

// --- accumulation ------------------------------------------------------------

MomentAccumulator MomentAccumulator::empty(const ExperimentConfig& config, std::uint64_t at) {
    if (!(config.bin_width > 0.0)) {
        throw PreconditionError("MomentAccumulator needs a resolved config");
    }
    MomentAccumulator acc;
    acc.config = config;
    acc.begin = at;
    acc.end = at;
    acc.power_sums.resize(static_cast<std::size_t>(config.k_max) + 1);
    acc.exceed_counts.assign(config.thresholds.size(), 0);
    return acc;
}

void MomentAccumulator::fold(double d) {
    power_sums[0].add(1.0);
    double p = d;
    power_sums[1].add(p);
    for (int k = 2; k <= config.k_max; ++k) {
        p *= d;
        power_sums[static_cast<std::size_t>(k)].add(p);
    }
    // strict comparisons keep the first (smallest x) occurrence
    if (d > max_dev.value) max_dev = {d, end};
    if (d < min_dev.value) min_dev = {d, end};
    const double magnitude = std::abs(d);
    for (std::size_t i = 0; i < exceed_counts.size(); ++i) {
        if (magnitude > config.thresholds[i]) ++exceed_counts[i];
    }
    histogram.add(static_cast<std::int64_t>(std::floor(d / config.bin_width)));
    ++n_processed;
    ++end;
}

MomentAccumulator accumulate_range(const ExperimentConfig& config, std::uint64_t begin,
                                   std::uint64_t end, const BasePrimes& base) {
    const ExperimentConfig cfg = config.bin_width > 0.0 ? config : config.resolved();
    if (begin > end || end > cfg.x) {
        throw PreconditionError("accumulate_range: range outside [0, X)");
    }
    MomentAccumulator acc = MomentAccumulator::empty(cfg, begin);
    const std::uint64_t h = cfg.h;
    const __int128 centre = static_cast<__int128>(h) << 53;
    std::vector<double> lambda;

    for (std::uint64_t a = begin; a < end; a += cfg.segment_size) {
        const std::uint64_t b = std::min(end, a + cfg.segment_size);
        // Λ(m) for m in [a+1, b+h]
        lambda.resize(b - a + h);
        fill_lambda(a + 1, b + h + 1, base, lambda);

        // The window sum is exact in units of 2^-53, so sliding it never drifts
        // and D(n) does not depend on where segments start.
        __int128 window = 0;
        for (std::uint64_t i = 0; i < h; ++i) window += lambda_to_fixed(lambda[i]);
        const std::uint64_t len = b - a;
        for (std::uint64_t i = 0; i < len; ++i) {
            acc.fold(static_cast<double>(window - centre) * kFixedUnit);
            if (i + 1 < len) {
                window += lambda_to_fixed(lambda[i + h]) - lambda_to_fixed(lambda[i]);
            }
        }
    }
    return acc;
}

MomentAccumulator merge(MomentAccumulator a, MomentAccumulator b) {
    if (!(a.config == b.config)) {
        throw PreconditionError("merge: accumulators built from different configs");
    }
    if (b.n_processed == 0) return a;
    if (a.n_processed == 0) return b;
    if (a.end != b.begin) {
        throw PreconditionError("merge: ranges [" + std::to_string(a.begin) + ", " +
                                std::to_string(a.end) + ") and [" + std::to_string(b.begin) +
                                ", " + std::to_string(b.end) + ") are not adjacent");
    }
    for (std::size_t k = 0; k < a.power_sums.size(); ++k) a.power_sums[k].add(b.power_sums[k]);
    // ties go to a, which covers the smaller x
    if (b.max_dev.value > a.max_dev.value) a.max_dev = b.max_dev;
    if (b.min_dev.value < a.min_dev.value) a.min_dev = b.min_dev;
    for (std::size_t i = 0; i < a.exceed_counts.size(); ++i) {
        a.exceed_counts[i] += b.exceed_counts[i];
    }
    a.histogram.merge(b.histogram);
    a.n_processed += b.n_processed;
    a.end = b.end;
    return a;
}

// --- driver ------------------------------------------------------------------

RunOutcome run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    const ExperimentConfig cfg = config.resolved();
    const std::uint64_t seg = cfg.segment_size;
    const std::uint64_t total = (cfg.x + seg - 1) / seg;

    checkpoint::State state;
    std::uint64_t resumed = 0;
    if (options.checkpoint && std::filesystem::exists(*options.checkpoint)) {
        state = checkpoint::load(*options.checkpoint);
        if (!(state.config == cfg) || state.segments_total != total) {
            throw CheckpointError("checkpoint " + options.checkpoint->string() +
                                  " was written for a different configuration");
        }
        resumed = state.prefix_segments + state.pending.size();
    } else {
        state.config = cfg;
        state.segments_total = total;
        state.prefix = MomentAccumulator::empty(cfg, 0);
    }

    std::vector<std::uint64_t> todo;
    for (std::uint64_t i = state.prefix_segments; i < total; ++i) {
        if (!state.pending.contains(i)) todo.push_back(i);
    }
    if (options.max_new_segments && todo.size() > *options.max_new_segments) {
        todo.resize(static_cast<std::size_t>(*options.max_new_segments));
    }

    const BasePrimes base = base_primes_for(cfg.x + cfg.h + 1);
    std::mutex mutex;
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::uint64_t done = resumed;

    auto worker = [&] {
        while (!failed.load()) {
            const std::size_t slot = next.fetch_add(1);
            if (slot >= todo.size()) return;
            const std::uint64_t i = todo[slot];
            try {
                auto acc = accumulate_range(cfg, i * seg, std::min(cfg.x, (i + 1) * seg), base);
                std::lock_guard lock(mutex);
                state.pending.emplace(i, std::move(acc));
                while (!state.pending.empty() &&
                       state.pending.begin()->first == state.prefix_segments) {
                    auto node = state.pending.extract(state.pending.begin());
                    state.prefix = merge(std::move(state.prefix), std::move(node.mapped()));
                    ++state.prefix_segments;
                }
                ++done;
                if (options.checkpoint) checkpoint::save(*options.checkpoint, state);
                if (options.progress) options.progress(done, total);
            } catch (...) {
                std::lock_guard lock(mutex);
                if (!error) error = std::current_exception();
                failed = true;
                return;
            }
        }
    };

    const unsigned n_threads =
        static_cast<unsigned>(std::min<std::size_t>(std::max(1u, options.workers), todo.size()));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);

    RunOutcome out;
    out.complete = state.prefix_segments == total;
    out.segments_done = state.prefix_segments + state.pending.size();
    out.segments_total = total;
    out.segments_resumed = resumed;
    out.accumulator = std::move(state.prefix);
    return out;
}

MomentAccumulator run_experiment(const ExperimentConfig& config, unsigned workers) {
    RunOptions options;
    options.workers = workers;
    return run_experiment(config, options).accumulator;
}

// --- reporting ---------------------------------------------------------------

MomentReport finalize(const MomentAccumulator& acc) {
    if (acc.begin != 0 || acc.n_processed != acc.config.x) {
        throw PreconditionError("finalize: accumulator covers " + std::to_string(acc.n_processed) +
                                " of " + std::to_string(acc.config.x) + " points");
    }
    const auto X = static_cast<double>(acc.config.x);
    MomentReport r;
    r.x = acc.config.x;
    r.h = acc.config.h;
    for (const auto& s : acc.power_sums) r.mu.push_back(s.value() / X);
    const double mu2 = r.mu[2];
    if (!(mu2 > 0.0)) throw DegenerateError("finalize: second moment is zero");
    for (std::size_t k = 0; k < r.mu.size(); ++k) {
        r.mu_tilde.push_back(r.mu[k] / std::pow(mu2, static_cast<double>(k) / 2.0));
    }
    r.sigma = std::sqrt(mu2);
    r.max_dev = acc.max_dev;
    r.min_dev = acc.min_dev;
    r.thresholds = acc.config.thresholds;
    r.exceed_counts = acc.exceed_counts;
    return r;
}

std::uint64_t exceedance_measure(const MomentAccumulator& acc, double threshold) {
    const auto& ts = acc.config.thresholds;
    const auto it = std::find(ts.begin(), ts.end(), threshold);
    if (it == ts.end()) {
        throw ConfigError("exceedance_measure: threshold " + std::to_string(threshold) +
                          " was not tracked");
    }
    return acc.exceed_counts[static_cast<std::size_t>(it - ts.begin())];
}

std::vector<CdfRow> export_cdf(const MomentAccumulator& acc) {
    const auto& hist = acc.histogram;
    if (hist.empty()) throw DegenerateError("export_cdf: histogram is empty");
    const double n = static_cast<double>(acc.n_processed);
    const double mu2 = acc.power_sums[2].value() / n;
    if (!(mu2 > 0.0)) throw DegenerateError("export_cdf: zero variance");
    const double sigma = std::sqrt(mu2);
    const double w = acc.config.bin_width;

    std::vector<CdfRow> rows;
    rows.reserve(hist.counts().size() + 1);
    const double left = static_cast<double>(hist.first_bin()) * w;
    rows.push_back({left, 0.0, gaussian::phi(left / sigma)});
    std::uint64_t cumulative = 0;
    for (std::size_t i = 0; i < hist.counts().size(); ++i) {
        cumulative += hist.counts()[i];
        const double t = static_cast<double>(hist.first_bin() + static_cast<std::int64_t>(i) + 1) * w;
        rows.push_back({t, static_cast<double>(cumulative) / n, gaussian::phi(t / sigma)});
    }
    return rows;
}

}  // namespace psiwin
