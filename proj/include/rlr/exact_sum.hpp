#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>

namespace rlr {

/// Order-independent accumulator for finite doubles.
///
/// Every addend is split into 32-bit digits of a fixed-point integer spanning
/// the whole double range, so the accumulated state is the exact sum. The
/// result therefore does not depend on the order of the additions, which makes
/// moment estimators bit-identical under sample permutation. Each digit is
/// held in an int64, leaving room for 2^31 additions between normalizations.
class ExactSum {
public:
    void add(double x) {
        const auto bits = std::bit_cast<std::uint64_t>(x);
        const auto biased = static_cast<int>((bits >> 52) & 0x7ff);
        std::uint64_t mant = bits & ((std::uint64_t{1} << 52) - 1);
        if (biased != 0) mant |= std::uint64_t{1} << 52;
        if (mant == 0) return;
        // x = mant * 2^(pos - 1074)
        const int pos = biased == 0 ? 0 : biased - 1;
        const int limb = pos / 32;
        const unsigned __int128 wide = static_cast<unsigned __int128>(mant) << (pos % 32);
        const auto d0 = static_cast<std::int64_t>(wide & 0xffffffffu);
        const auto d1 = static_cast<std::int64_t>((wide >> 32) & 0xffffffffu);
        const auto d2 = static_cast<std::int64_t>(wide >> 64);
        if (bits >> 63) {
            limbs_[limb] -= d0;
            limbs_[limb + 1] -= d1;
            limbs_[limb + 2] -= d2;
        } else {
            limbs_[limb] += d0;
            limbs_[limb + 1] += d1;
            limbs_[limb + 2] += d2;
        }
        if (++pending_ == kMaxPending) {
            normalize(limbs_);
            pending_ = 0;
        }
    }

    ExactSum& operator+=(double x) {
        add(x);
        return *this;
    }

    /// Sum rounded to double (faithful, deterministic).
    double value() const {
        Limbs l = limbs_;
        normalize(l);
        bool negative = l[kLimbs - 1] < 0;
        if (negative) {
            for (auto& v : l) v = -v;
            normalize(l);
        }
        double acc = 0.0;
        for (int k = 0; k < kLimbs; ++k) {
            if (l[k] != 0) acc += std::ldexp(static_cast<double>(l[k]), 32 * k - 1074);
        }
        return negative ? -acc : acc;
    }

private:
    static constexpr int kLimbs = 70;
    static constexpr int kMaxPending = 1 << 30;
    using Limbs = std::array<std::int64_t, kLimbs>;

    // Bring every digit but the top into [0, 2^32).
    static void normalize(Limbs& l) {
        for (int k = 0; k + 1 < kLimbs; ++k) {
            const std::int64_t carry = l[k] >> 32;
            l[k] -= carry * (std::int64_t{1} << 32);
            l[k + 1] += carry;
        }
    }

    Limbs limbs_{};
    int pending_ = 0;
};

} // namespace rlr
