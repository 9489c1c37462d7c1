#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pqrank/types.hpp"

namespace pqrank {

// Product-quantised item representation. Every item carries exactly one
// sub-id per split; the sub-embedding of split m / sub-id b is a row of
// sub_dim() floats. An item embedding is the concatenation of its M
// sub-embedding rows.
struct Codebook {
    std::uint32_t num_items = 0;
    std::uint32_t num_splits = 0;  // M
    std::uint32_t num_subids = 0;  // B, sub-ids per split (<= 65535)
    std::uint32_t dim = 0;         // d, divisible by num_splits

    // num_items x num_splits, row-major; entries in [0, num_subids)
    std::vector<sub_id> assignments;
    // num_splits x num_subids x sub_dim(), row-major
    std::vector<float> sub_embeddings;

    std::uint32_t sub_dim() const { return dim / num_splits; }

    std::span<const sub_id> codes(item_id item) const {
        return {assignments.data() + static_cast<std::size_t>(item) * num_splits,
                num_splits};
    }

    std::span<const float> sub_embedding(std::uint32_t split, sub_id b) const {
        const std::size_t row =
            (static_cast<std::size_t>(split) * num_subids + b) * sub_dim();
        return {sub_embeddings.data() + row, sub_dim()};
    }

    std::span<float> sub_embedding_mut(std::uint32_t split, sub_id b) {
        const std::size_t row =
            (static_cast<std::size_t>(split) * num_subids + b) * sub_dim();
        return {sub_embeddings.data() + row, sub_dim()};
    }

    // Throws std::invalid_argument when shapes, divisibility or code ranges
    // are broken.
    void validate() const;

    bool operator==(const Codebook&) const = default;
};

// Concatenation of the item's sub-embedding rows, length dim.
// Throws std::invalid_argument when item is out of range.
std::vector<float> reconstruct_embedding(const Codebook& cb, item_id item);

}  // namespace pqrank
