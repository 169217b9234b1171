#include "psiwin/exact_sum.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace psiwin {

namespace {
constexpr std::int64_t kLow32 = 0xffffffffLL;
}

void ExactSum::add(double x) {
    const auto bits = std::bit_cast<std::uint64_t>(x);
    int biased = static_cast<int>((bits >> 52) & 0x7ff);
    std::uint64_t mant = bits & ((std::uint64_t{1} << 52) - 1);
    if (biased == 0x7ff) {
        throw std::overflow_error("ExactSum: non-finite term " + std::to_string(x));
    }
    if (biased == 0) {
        if (mant == 0) return;
        biased = 1;
    } else {
        mant |= std::uint64_t{1} << 52;
    }
    // x = +-mant * 2^(biased - 1075)
    const int pos = biased - 1075 - kMinExp;
    const int idx = pos >> 5;
    const auto wide = static_cast<unsigned __int128>(mant) << (pos & 31);
    const auto d0 = static_cast<std::int64_t>(static_cast<std::uint64_t>(wide) & kLow32);
    const auto d1 = static_cast<std::int64_t>(static_cast<std::uint64_t>(wide >> 32) & kLow32);
    const auto d2 = static_cast<std::int64_t>(static_cast<std::uint64_t>(wide >> 64));
    if (bits >> 63) {
        digits_[idx] -= d0;
        digits_[idx + 1] -= d1;
        digits_[idx + 2] -= d2;
    } else {
        digits_[idx] += d0;
        digits_[idx + 1] += d1;
        digits_[idx + 2] += d2;
    }
    if (++pending_ >= kNormalizeEvery) normalize();
}

void ExactSum::add(const ExactSum& other) {
    normalize();
    other.normalize();
    for (int i = 0; i < kDigits; ++i) digits_[i] += other.digits_[i];
    pending_ = 1;
    normalize();
}

void ExactSum::normalize() const {
    if (pending_ == 0) return;
    for (int i = 0; i + 1 < kDigits; ++i) {
        const std::int64_t carry = digits_[i] >> 32;
        digits_[i] &= kLow32;
        digits_[i + 1] += carry;
    }
    pending_ = 0;
}

bool ExactSum::is_zero() const {
    normalize();
    return std::all_of(digits_.begin(), digits_.end(), [](std::int64_t d) { return d == 0; });
}

double ExactSum::value() const {
    normalize();
    auto d = digits_;
    const bool negative = d[kDigits - 1] < 0;
    if (negative) {
        for (auto& v : d) v = -v;
        for (int i = 0; i + 1 < kDigits; ++i) {
            const std::int64_t carry = d[i] >> 32;
            d[i] &= kLow32;
            d[i + 1] += carry;
        }
    }
    int top = kDigits - 1;
    while (top >= 0 && d[top] == 0) --top;
    if (top < 0) return 0.0;

    // Up to 96 leading bits plus a sticky bit is enough for one correct rounding.
    unsigned __int128 lead = static_cast<std::uint64_t>(d[top]);
    int lowest = top;
    for (int j = 1; j <= 2 && top - j >= 0; ++j) {
        lead = (lead << 32) | static_cast<std::uint64_t>(d[top - j]);
        lowest = top - j;
    }
    for (int j = 0; j < lowest; ++j) {
        if (d[j] != 0) {
            lead |= 1;
            break;
        }
    }
    const double r = std::ldexp(static_cast<double>(lead), 32 * lowest + kMinExp);
    return negative ? -r : r;
}

std::vector<double> ExactSum::expansion() const {
    std::vector<double> parts;
    ExactSum rest = *this;
    while (!rest.is_zero()) {
        const double lead = rest.value();
        parts.push_back(lead);
        rest.add(-lead);
    }
    return parts;
}

ExactSum ExactSum::from_expansion(const std::vector<double>& parts) {
    ExactSum s;
    for (double p : parts) s.add(p);
    return s;
}

bool operator==(const ExactSum& a, const ExactSum& b) {
    a.normalize();
    b.normalize();
    return a.digits_ == b.digits_;
}

}  // namespace psiwin
