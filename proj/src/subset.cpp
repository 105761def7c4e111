// SPDX-License-Identifier: MIT
#include "normbridge/subset.hpp"

#include "normbridge/errors.hpp"

#include <string>

namespace normbridge {

SubsetIndex::SubsetIndex(Mask mask, unsigned dim) : mask_(mask), dim_(dim) {
    if (dim > kMaxMaskDim) {
        throw CapacityError("dimension " + std::to_string(dim) + " exceeds mask capacity");
    }
    if ((mask & ~full_mask(dim)) != 0) {
        throw DomainError("subset mask has bits above dimension " + std::to_string(dim));
    }
}

SubsetIndex SubsetIndex::from_coordinates(const std::vector<unsigned>& coords, unsigned dim) {
    Mask m = 0;
    for (unsigned c : coords) {
        if (c < 1 || c > dim) {
            throw DomainError("coordinate " + std::to_string(c) + " outside [1:" +
                              std::to_string(dim) + "]");
        }
        m |= Mask{1} << (c - 1);
    }
    return {m, dim};
}

SubsetIndex SubsetIndex::complement() const noexcept {
    return {full_mask(dim_) & ~mask_, dim_};
}

std::vector<unsigned> SubsetIndex::coordinates() const {
    std::vector<unsigned> out;
    for (unsigned j = 0; j < dim_; ++j) {
        if ((mask_ >> j) & 1U) out.push_back(j + 1);
    }
    return out;
}

unsigned SubsetIndex::diameter() const noexcept { return mask_diameter(mask_); }

std::string SubsetIndex::to_string() const {
    std::string s = "{";
    bool first = true;
    for (unsigned c : coordinates()) {
        if (!first) s += ",";
        s += std::to_string(c);
        first = false;
    }
    return s + "}";
}

}  // namespace normbridge
