#pragma once

#include <algorithm>
#include <cstddef>

#include "pqrank/types.hpp"

namespace pqrank {

// Bounded selector that keeps the k best (item, score) pairs under
// ranks_before. Backed by a binary heap whose front is the worst kept
// entry, so a full push is one compare in the common reject case.
class TopKAccumulator {
public:
    explicit TopKAccumulator(std::size_t k) : k_(k) {}

    void push(item_id id, float score) {
        if (k_ == 0) {
            return;
        }
        if (heap_.size() < k_) {
            heap_.push_back({id, score});
            std::push_heap(heap_.begin(), heap_.end(), ranks_before);
            return;
        }
        if (ranks_before({id, score}, heap_.front())) {
            std::pop_heap(heap_.begin(), heap_.end(), ranks_before);
            heap_.back() = {id, score};
            std::push_heap(heap_.begin(), heap_.end(), ranks_before);
        }
    }

    std::size_t size() const { return heap_.size(); }

    void clear() { heap_.clear(); }

    // Drains the accumulator into a best-first sorted result.
    TopKResult take() {
        std::sort_heap(heap_.begin(), heap_.end(), ranks_before);
        TopKResult out;
        out.entries = std::move(heap_);
        heap_.clear();
        return out;
    }

private:
    std::size_t k_;
    std::vector<ScoredItem> heap_;
};

}  // namespace pqrank
