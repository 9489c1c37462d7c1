#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pqrank/codebook.hpp"
#include "pqrank/types.hpp"

namespace pqrank {

// Fixed-association dot product shared by every scoring route: eight
// independent partial sums over the main body, a scalar tail, then one
// fixed reduction tree. Identical inputs give bitwise identical results
// from any call site, and the lane sums vectorise without relaxing
// floating-point semantics.
float dot_product(std::span<const float> a, std::span<const float> b);

// M x B matrix of partial scores; row m holds the dot products of every
// sub-embedding of split m with the matching slice of a sequence embedding.
struct SubScoreMatrix {
    std::uint32_t num_splits = 0;
    std::uint32_t num_subids = 0;
    std::vector<float> scores;  // row-major

    float at(std::uint32_t split, std::uint32_t b) const {
        return scores[static_cast<std::size_t>(split) * num_subids + b];
    }

    std::span<const float> row(std::uint32_t split) const {
        return {scores.data() + static_cast<std::size_t>(split) * num_subids,
                num_subids};
    }
};

// S[m][b] = sub_embedding(m, b) . phi_m where phi_m is the m-th slice of
// the sequence embedding. Throws std::invalid_argument on length mismatch.
SubScoreMatrix precompute_sub_scores(const Codebook& cb,
                                     std::span<const float> seq_embedding);

// Score of one item under S: its per-split entries summed in ascending
// split order. Every sub-score path goes through this helper, so equal
// inputs give bitwise equal scores on every route.
inline float item_score(const Codebook& cb, const SubScoreMatrix& s,
                        item_id i) {
    const sub_id* codes =
        cb.assignments.data() + static_cast<std::size_t>(i) * cb.num_splits;
    float r = 0.f;
    for (std::uint32_t m = 0; m < cb.num_splits; ++m) {
        r += s.scores[static_cast<std::size_t>(m) * s.num_subids + codes[m]];
    }
    return r;
}

// Exhaustive baseline: every item scored as the dot product of its
// (virtually reconstructed) embedding with the sequence embedding. This is
// the correctness oracle for the sub-score paths.
TopKResult dense_topk(const Codebook& cb, std::span<const float> seq_embedding,
                      std::uint32_t k, ScoringStats* stats = nullptr);

// Exhaustive sub-score scoring over the whole catalogue: each item costs M
// table lookups into S.
TopKResult pqtopk(const Codebook& cb, const SubScoreMatrix& s, std::uint32_t k,
                  ScoringStats* stats = nullptr);

// Subset variant. Duplicate ids in `subset` are scored once; invalid ids
// throw std::invalid_argument.
TopKResult pqtopk(const Codebook& cb, const SubScoreMatrix& s, std::uint32_t k,
                  std::span<const item_id> subset, ScoringStats* stats = nullptr);

}  // namespace pqrank
