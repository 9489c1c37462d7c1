#include "pqrank/inverted_index.hpp"

namespace pqrank {

InvertedIndexes build_inverted_indexes(const Codebook& cb) {
    cb.validate();
    InvertedIndexes inv;
    inv.num_items = cb.num_items;
    inv.num_splits = cb.num_splits;
    inv.num_subids = cb.num_subids;
    inv.offsets.assign(cb.num_splits,
                       std::vector<std::uint32_t>(cb.num_subids + 1, 0));
    inv.items.assign(cb.num_splits, std::vector<item_id>(cb.num_items));

    // Counting sort per split; ascending item ids fall out of the stable
    // second pass.
    for (std::uint32_t m = 0; m < cb.num_splits; ++m) {
        auto& off = inv.offsets[m];
        for (item_id i = 0; i < cb.num_items; ++i) {
            ++off[cb.codes(i)[m] + 1];
        }
        for (std::uint32_t b = 0; b < cb.num_subids; ++b) {
            off[b + 1] += off[b];
        }
        std::vector<std::uint32_t> cursor(off.begin(), off.end() - 1);
        auto& items = inv.items[m];
        for (item_id i = 0; i < cb.num_items; ++i) {
            items[cursor[cb.codes(i)[m]]++] = i;
        }
    }
    return inv;
}

}  // namespace pqrank
