#pragma once

// Shared test fixtures: a tiny hand-checkable codebook, random instance
// generators, and brute-force oracles computed independently of the library
// scoring paths (double accumulation over reconstructed embeddings, full
// sort) so the fast paths are checked against something they don't share
// code with.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "pqrank/codebook.hpp"
#include "pqrank/types.hpp"

namespace testutil {

using pqrank::Codebook;
using pqrank::item_id;
using pqrank::ScoredItem;
using pqrank::sub_id;
using pqrank::TopKResult;

// M=2, B=2, d=4, four items with codes i0=(0,0), i1=(0,1), i2=(1,0),
// i3=(1,1). With phi = (1,0,0,1) the sub-score matrix is
// [[1.0, 0.5], [0.2, 2.0]] and the item scores are i0=1.2, i1=3.0, i2=0.7,
// i3=2.5.
inline Codebook tiny_codebook() {
    Codebook cb;
    cb.num_items = 4;
    cb.num_splits = 2;
    cb.num_subids = 2;
    cb.dim = 4;
    cb.assignments = {0, 0, 0, 1, 1, 0, 1, 1};
    cb.sub_embeddings = {
        1.0f, 7.0f,   // split 0, sub-id 0
        0.5f, -3.0f,  // split 0, sub-id 1
        5.0f, 0.2f,   // split 1, sub-id 0
        -1.0f, 2.0f,  // split 1, sub-id 1
    };
    return cb;
}

inline std::vector<float> tiny_phi() { return {1.f, 0.f, 0.f, 1.f}; }

inline Codebook random_codebook(std::mt19937_64& rng, std::uint32_t items,
                                std::uint32_t m, std::uint32_t b,
                                std::uint32_t dim) {
    std::uniform_int_distribution<std::uint32_t> code(0, b - 1);
    std::normal_distribution<float> normal(0.f, 1.f);
    Codebook cb;
    cb.num_items = items;
    cb.num_splits = m;
    cb.num_subids = b;
    cb.dim = dim;
    cb.assignments.resize(static_cast<std::size_t>(items) * m);
    for (auto& a : cb.assignments) {
        a = static_cast<sub_id>(code(rng));
    }
    cb.sub_embeddings.resize(static_cast<std::size_t>(m) * b * (dim / m));
    for (auto& v : cb.sub_embeddings) {
        v = normal(rng);
    }
    return cb;
}

inline std::vector<float> random_phi(std::mt19937_64& rng, std::uint32_t dim) {
    std::normal_distribution<float> normal(0.f, 1.f);
    std::vector<float> phi(dim);
    for (auto& v : phi) {
        v = normal(rng);
    }
    return phi;
}

// Strictly positive embeddings and query, so every sub-score is positive.
inline void make_positive(std::mt19937_64& rng, Codebook& cb,
                          std::vector<float>& phi) {
    std::uniform_real_distribution<float> pos(0.05f, 1.f);
    for (auto& v : cb.sub_embeddings) {
        v = pos(rng);
    }
    for (auto& v : phi) {
        v = pos(rng);
    }
}

// Double-precision score of one item over its reconstructed embedding.
inline double brute_score(const Codebook& cb, std::span<const float> phi,
                          item_id i) {
    const auto codes = cb.codes(i);
    const std::uint32_t sub_dim = cb.sub_dim();
    double acc = 0.0;
    for (std::uint32_t m = 0; m < cb.num_splits; ++m) {
        const auto row = cb.sub_embedding(m, codes[m]);
        for (std::uint32_t t = 0; t < sub_dim; ++t) {
            acc += static_cast<double>(row[t]) *
                   static_cast<double>(phi[static_cast<std::size_t>(m) * sub_dim + t]);
        }
    }
    return acc;
}

struct BruteEntry {
    item_id id;
    double score;
};

inline std::vector<BruteEntry> brute_ranking(const Codebook& cb,
                                             std::span<const float> phi) {
    std::vector<BruteEntry> all(cb.num_items);
    for (item_id i = 0; i < cb.num_items; ++i) {
        all[i] = {i, brute_score(cb, phi, i)};
    }
    std::sort(all.begin(), all.end(), [](const BruteEntry& a, const BruteEntry& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        return a.id < b.id;
    });
    return all;
}

// True when `got` matches the oracle ranking entry-for-entry, treating
// near-equal oracle scores (within rel_tol) as interchangeable: float
// reassociation in the library may legitimately swap such neighbours.
inline bool matches_oracle(const TopKResult& got,
                           const std::vector<BruteEntry>& oracle,
                           std::uint32_t k, double rel_tol) {
    const std::size_t want = std::min<std::size_t>(k, oracle.size());
    if (got.entries.size() != want) {
        return false;
    }
    for (std::size_t p = 0; p < want; ++p) {
        const auto& e = got.entries[p];
        if (e.id == oracle[p].id) {
            continue;
        }
        const double ref = oracle[p].score;
        const double tol = rel_tol * std::max(1.0, std::abs(ref));
        if (std::abs(static_cast<double>(e.score) - ref) > tol) {
            return false;
        }
    }
    return true;
}

// Per-entry score agreement with the oracle for exactly the returned ids.
inline bool scores_match_oracle(const TopKResult& got, const Codebook& cb,
                                std::span<const float> phi, double rel_tol) {
    for (const auto& e : got.entries) {
        const double ref = brute_score(cb, phi, e.id);
        const double tol = rel_tol * std::max(1.0, std::abs(ref));
        if (std::abs(static_cast<double>(e.score) - ref) > tol) {
            return false;
        }
    }
    return true;
}

// Ordering, dedup and length invariants every top-k output must satisfy.
inline bool topk_invariants_hold(const TopKResult& r, std::uint32_t k,
                                 std::uint32_t num_items) {
    if (r.entries.size() > k || r.entries.size() > num_items) {
        return false;
    }
    for (std::size_t p = 1; p < r.entries.size(); ++p) {
        if (!pqrank::ranks_before(r.entries[p - 1], r.entries[p])) {
            return false;
        }
    }
    std::vector<item_id> ids;
    ids.reserve(r.entries.size());
    for (const auto& e : r.entries) {
        ids.push_back(e.id);
    }
    std::sort(ids.begin(), ids.end());
    return std::adjacent_find(ids.begin(), ids.end()) == ids.end();
}

}  // namespace testutil
