#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pqrank/codebook.hpp"

namespace pqrank {

// Per split: sub-id -> ascending-sorted list of the items carrying that
// sub-id. Within one split the lists are disjoint and cover the whole
// catalogue. Stored CSR-style, one offsets/items pair per split.
struct InvertedIndexes {
    std::uint32_t num_items = 0;
    std::uint32_t num_splits = 0;
    std::uint32_t num_subids = 0;
    std::vector<std::vector<std::uint32_t>> offsets;  // per split: B + 1
    std::vector<std::vector<item_id>> items;          // per split: num_items

    std::span<const item_id> list(std::uint32_t split, std::uint32_t b) const {
        const auto& off = offsets[split];
        return {items[split].data() + off[b], off[b + 1] - off[b]};
    }
};

InvertedIndexes build_inverted_indexes(const Codebook& cb);

}  // namespace pqrank
