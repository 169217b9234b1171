#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace psiwin {

/// Exact accumulator for sums of IEEE doubles.
///
/// Every finite double is a multiple of 2^-1074, so a long fixed-point
/// integer covers the whole range. Digits are 32-bit radix stored in int64
/// slots, which lets ~2^30 additions go by before carries must be propagated.
/// The sum never rounds, so the result is independent of the order in which
/// terms were added or partial sums merged. value() rounds once, to nearest.
class ExactSum {
public:
    ExactSum() { digits_.fill(0); }

    void add(double x);
    void add(const ExactSum& other);

    ExactSum& operator+=(double x) {
        add(x);
        return *this;
    }
    ExactSum& operator+=(const ExactSum& other) {
        add(other);
        return *this;
    }

    /// The exact sum rounded to the nearest double.
    [[nodiscard]] double value() const;

    [[nodiscard]] bool is_zero() const;

    /// Non-overlapping doubles whose exact sum equals this accumulator,
    /// largest magnitude first. Empty for zero.
    [[nodiscard]] std::vector<double> expansion() const;
    static ExactSum from_expansion(const std::vector<double>& parts);

    friend bool operator==(const ExactSum& a, const ExactSum& b);

private:
    // Weight of digit i is 2^(32 i + kMinExp). kMinExp is a multiple of 32 below -1074.
    static constexpr int kMinExp = -1088;
    static constexpr int kDigits = 68;
    static constexpr std::uint32_t kNormalizeEvery = 1u << 30;

    void normalize() const;

    mutable std::array<std::int64_t, kDigits> digits_;
    mutable std::uint32_t pending_ = 0;
};

}  // namespace psiwin
