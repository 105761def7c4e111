// SPDX-License-Identifier: MIT
#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace normbridge {

using Mask = std::uint64_t;

/// Largest dimension a mask can describe.
inline constexpr unsigned kMaxMaskDim = 63;

/// Largest dimension for which the full lattice 2^d is enumerated.
inline constexpr unsigned kMaxEnumerationDim = 24;

/// Largest dimension for the literal O(3^d) routes and dense lattice matrices.
inline constexpr unsigned kMaxBruteForceDim = 14;

/// A subset u of [1:d]; coordinate j (1-based) is bit j-1.
class SubsetIndex {
public:
    SubsetIndex(Mask mask, unsigned dim);

    static SubsetIndex from_coordinates(const std::vector<unsigned>& coords, unsigned dim);

    [[nodiscard]] Mask mask() const noexcept { return mask_; }
    [[nodiscard]] unsigned dim() const noexcept { return dim_; }
    [[nodiscard]] unsigned cardinality() const noexcept {
        return static_cast<unsigned>(std::popcount(mask_));
    }
    [[nodiscard]] bool contains(unsigned coord) const noexcept {
        return coord >= 1 && coord <= dim_ && ((mask_ >> (coord - 1)) & 1U);
    }
    [[nodiscard]] SubsetIndex complement() const noexcept;
    [[nodiscard]] bool is_subset_of(const SubsetIndex& other) const noexcept {
        return (mask_ & ~other.mask_) == 0;
    }
    /// 1-based coordinates in increasing order.
    [[nodiscard]] std::vector<unsigned> coordinates() const;
    /// max_{i,j∈u}(i−j); zero for the empty set and singletons.
    [[nodiscard]] unsigned diameter() const noexcept;
    /// "{1,3}" style, "{}" for the empty set.
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const SubsetIndex&, const SubsetIndex&) = default;
    friend auto operator<=>(const SubsetIndex&, const SubsetIndex&) = default;

private:
    Mask mask_;
    unsigned dim_;
};

inline Mask full_mask(unsigned dim) {
    return dim == 0 ? 0 : (dim >= 64 ? ~Mask{0} : ((Mask{1} << dim) - 1));
}

inline unsigned popcount(Mask m) { return static_cast<unsigned>(std::popcount(m)); }

inline unsigned mask_diameter(Mask m) {
    if (m == 0) return 0;
    return static_cast<unsigned>(63 - std::countl_zero(m) - std::countr_zero(m));
}

/// Calls f(sub) for every submask of `mask`, including `mask` and 0,
/// in decreasing numeric order.
template <typename F>
void for_each_submask(Mask mask, F&& f) {
    Mask sub = mask;
    while (true) {
        f(sub);
        if (sub == 0) break;
        sub = (sub - 1) & mask;
    }
}

}  // namespace normbridge
