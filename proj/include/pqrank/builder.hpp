#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pqrank/codebook.hpp"

namespace pqrank {

struct Interaction {
    std::uint32_t user;
    item_id item;

    bool operator==(const Interaction&) const = default;
};

// Sparse binary user-item matrix in coordinate-list form. Rows are users,
// columns are items.
struct InteractionMatrix {
    std::uint32_t num_users = 0;
    std::uint32_t num_items = 0;
    std::vector<Interaction> entries;

    // Throws std::invalid_argument on out-of-range ids, duplicate pairs or
    // items with no interaction at all.
    void validate() const;
};

// Codebook construction from a rank-M truncated SVD of the interaction
// matrix. Split m buckets the items along the m-th item latent coordinate
// into num_subids equal-frequency buckets (bucket index = sub-id); items
// with identical coordinates always share a bucket. When the matrix rank
// falls short of num_splits the missing latent coordinates are zero, which
// collapses the affected splits into a single bucket. Sub-embeddings are
// seeded standard normals; they are not trained.
Codebook build_codebook_svd(const InteractionMatrix& x, std::uint32_t num_splits,
                            std::uint32_t num_subids, std::uint32_t dim,
                            std::uint64_t seed);

// Cluster-structured random interactions: items and users are spread over a
// small number of latent clusters and most interactions stay within the
// item's cluster. Every item receives at least one interaction.
InteractionMatrix synth_interactions(std::uint32_t num_items,
                                     std::uint32_t num_users, std::uint64_t seed);

struct SyntheticWorkload {
    Codebook codebook;
    std::uint32_t num_queries = 0;
    std::vector<float> queries;  // num_queries x dim, row-major
    std::uint64_t seed = 0;
    float skew = 0.0f;

    std::span<const float> query(std::uint32_t q) const {
        return {queries.data() + static_cast<std::size_t>(q) * codebook.dim,
                codebook.dim};
    }

    bool operator==(const SyntheticWorkload&) const = default;
};

// Deterministic synthetic benchmark workload: a codebook built from
// synthetic interactions plus a stream of query embeddings. skew in [0, 1]
// controls how concentrated the top sub-id scores are: 0 gives i.i.d.
// normal queries, 1 aligns each query with a handful of sub-embeddings in
// very few splits so that pruning terminates almost immediately.
SyntheticWorkload gen_workload(std::uint32_t num_items, std::uint32_t num_users,
                               std::uint32_t num_splits, std::uint32_t num_subids,
                               std::uint32_t dim, float skew, std::uint64_t seed,
                               std::uint32_t num_queries = 128);

}  // namespace pqrank
