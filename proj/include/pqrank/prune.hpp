#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pqrank/inverted_index.hpp"
#include "pqrank/scoring.hpp"
#include "pqrank/types.hpp"

namespace pqrank {

enum class PruneMode {
    // Stop only when no unscored item can still enter the top k; output is
    // identical to exhaustive scoring.
    safe,
    // Additionally stop after a fixed number of loop iterations.
    max_iterations,
    // Relaxed guard sigma > F * theta once theta is positive; while theta
    // is non-positive the plain guard applies.
    inflated_threshold,
};

struct PruneConfig {
    std::uint32_t k = 10;
    std::uint32_t batch_size = 8;  // sub-ids consumed per iteration
    PruneMode mode = PruneMode::safe;
    std::uint64_t iteration_limit = 0;  // max_iterations mode, >= 1
    float inflation = 1.0f;             // inflated_threshold mode, > 1

    static PruneConfig safe(std::uint32_t k, std::uint32_t batch_size) {
        return {k, batch_size, PruneMode::safe, 0, 1.0f};
    }
    static PruneConfig limited(std::uint32_t k, std::uint32_t batch_size,
                               std::uint64_t iteration_limit) {
        return {k, batch_size, PruneMode::max_iterations, iteration_limit, 1.0f};
    }
    static PruneConfig inflated(std::uint32_t k, std::uint32_t batch_size,
                                float inflation) {
        return {k, batch_size, PruneMode::inflated_threshold, 0, inflation};
    }

    // Throws std::invalid_argument on out-of-range fields.
    void validate() const;
};

struct PruneIteration {
    std::uint32_t split = 0;        // chosen split
    std::vector<sub_id> consumed;   // sub-ids processed this iteration
    float sigma_before = 0.0f;      // upper bound going into the iteration
    float sigma_after = 0.0f;       // upper bound after advancing the cursor
    float theta_after = 0.0f;       // k-th best score after the merge
    std::uint64_t items_scored = 0; // postings gathered this iteration
};

struct PruneTrace {
    float sigma_initial = 0.0f;
    std::vector<PruneIteration> iterations;
};

struct PruneResult {
    TopKResult topk;
    ScoringStats stats;
};

// Per split, sub-ids ordered by descending score; equal scores keep
// ascending sub-id order.
std::vector<std::vector<sub_id>> sort_subids_by_score(const SubScoreMatrix& s);

// Sum over splits of the best still-unprocessed sub-id score, where
// positions[m] is the cursor into sorted_subids[m]. A cursor at B means the
// split is exhausted and forces the bound to -inf.
float score_upper_bound(const SubScoreMatrix& s,
                        const std::vector<std::vector<sub_id>>& sorted_subids,
                        std::span<const std::uint32_t> positions);

// Union of two deduplicated top-k lists truncated to k. A repeated item id
// carries the same score in both inputs and is kept once.
TopKResult merge_topk(const TopKResult& current, const TopKResult& incoming,
                      std::uint32_t k);

// Dynamic pruning over score-sorted sub-id lists. Each iteration takes a
// batch of the best unprocessed sub-ids from the currently best split,
// gathers their postings from the inverted indexes, scores the gathered
// items via S and merges them into the running top k. The loop stops once
// the mode's guard over (sigma, theta) fails. Items are never marked as
// visited, so an item may be rescored whenever another of its sub-ids is
// processed.
PruneResult pruned_topk(const Codebook& cb, const InvertedIndexes& inv,
                        const SubScoreMatrix& s, const PruneConfig& cfg,
                        PruneTrace* trace = nullptr);

}  // namespace pqrank
