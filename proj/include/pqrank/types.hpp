#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace pqrank {

using item_id = std::uint32_t;
using sub_id = std::uint16_t;

inline constexpr float kNegInf = -std::numeric_limits<float>::infinity();

struct ScoredItem {
    item_id id;
    float score;

    bool operator==(const ScoredItem&) const = default;
};

// Ranking order used everywhere: higher score first, ties broken by
// ascending item id. This is a strict total order over distinct items.
inline bool ranks_before(const ScoredItem& a, const ScoredItem& b) {
    if (a.score != b.score) {
        return a.score > b.score;
    }
    return a.id < b.id;
}

// Deduplicated list of at most k items, sorted by ranks_before.
struct TopKResult {
    std::vector<ScoredItem> entries;

    // Score of the k-th ranked entry; -inf while fewer than k are present.
    float threshold(std::size_t k) const {
        if (k == 0 || entries.size() < k) {
            return kNegInf;
        }
        return entries[k - 1].score;
    }

    bool operator==(const TopKResult&) const = default;
};

struct ScoringStats {
    std::uint64_t iterations = 0;
    // Number of item scorings performed; repeated scorings of one item all
    // count, so this can exceed the catalogue size.
    std::uint64_t items_scored_total = 0;
    std::uint64_t items_scored_unique = 0;
    std::chrono::nanoseconds elapsed{0};
};

}  // namespace pqrank
