#include <doctest.h>

#include <algorithm>
#include <cstring>
#include <random>
#include <stdexcept>
#include <vector>

#include "pqrank/builder.hpp"
#include "pqrank/inverted_index.hpp"
#include "pqrank/prune.hpp"
#include "pqrank/scoring.hpp"
#include "testutil.hpp"

using namespace pqrank;
using namespace testutil;

namespace {

InteractionMatrix identity_matrix(std::uint32_t n) {
    InteractionMatrix x;
    x.num_users = n;
    x.num_items = n;
    for (std::uint32_t i = 0; i < n; ++i) {
        x.entries.push_back({i, i});
    }
    return x;
}

// Per-split histogram of bucket occupancy.
std::vector<std::vector<std::uint32_t>> bucket_sizes(const Codebook& cb) {
    std::vector<std::vector<std::uint32_t>> sizes(
        cb.num_splits, std::vector<std::uint32_t>(cb.num_subids, 0));
    for (item_id i = 0; i < cb.num_items; ++i) {
        const auto codes = cb.codes(i);
        for (std::uint32_t m = 0; m < cb.num_splits; ++m) {
            ++sizes[m][codes[m]];
        }
    }
    return sizes;
}

}  // namespace

TEST_SUITE("builder") {

TEST_CASE("interaction matrices reject malformed input") {
    InteractionMatrix x;
    x.num_users = 2;
    x.num_items = 2;
    x.entries = {{0, 0}, {1, 1}};
    CHECK_NOTHROW(x.validate());

    InteractionMatrix bad_user = x;
    bad_user.entries.push_back({2, 0});
    CHECK_THROWS_AS(bad_user.validate(), std::invalid_argument);

    InteractionMatrix bad_item = x;
    bad_item.entries.push_back({0, 2});
    CHECK_THROWS_AS(bad_item.validate(), std::invalid_argument);

    InteractionMatrix dup = x;
    dup.entries.push_back({1, 1});
    CHECK_THROWS_AS(dup.validate(), std::invalid_argument);

    InteractionMatrix uncovered = x;
    uncovered.entries.pop_back();  // item 1 loses its only interaction
    CHECK_THROWS_AS(uncovered.validate(), std::invalid_argument);

    InteractionMatrix empty;
    CHECK_THROWS_AS(empty.validate(), std::invalid_argument);
}

TEST_CASE("an identity matrix separates every item") {
    const Codebook cb = build_codebook_svd(identity_matrix(4), 1, 4, 8, 7);
    cb.validate();
    std::vector<sub_id> codes(cb.assignments);
    std::sort(codes.begin(), codes.end());
    CHECK(codes == std::vector<sub_id>{0, 1, 2, 3});
}

TEST_CASE("builder arguments are validated") {
    const InteractionMatrix x = identity_matrix(4);
    CHECK_THROWS_AS(build_codebook_svd(x, 0, 4, 8, 7), std::invalid_argument);
    CHECK_THROWS_AS(build_codebook_svd(x, 1, 0, 8, 7), std::invalid_argument);
    CHECK_THROWS_AS(build_codebook_svd(x, 1, 4, 0, 7), std::invalid_argument);
    CHECK_THROWS_AS(build_codebook_svd(x, 3, 4, 8, 7), std::invalid_argument);
    CHECK_THROWS_AS(build_codebook_svd(x, 1, 70000, 8, 7),
                    std::invalid_argument);

    InteractionMatrix bad = x;
    bad.entries.push_back({0, 9});
    CHECK_THROWS_AS(build_codebook_svd(bad, 1, 4, 8, 7), std::invalid_argument);
}

TEST_CASE("items with identical interaction columns share all codes") {
    // Items 0/1 and 2/3 are interacted with by the same user sets.
    InteractionMatrix x;
    x.num_users = 6;
    x.num_items = 4;
    for (std::uint32_t u : {0u, 1u, 2u}) {
        x.entries.push_back({u, 0});
        x.entries.push_back({u, 1});
    }
    for (std::uint32_t u : {3u, 4u, 5u}) {
        x.entries.push_back({u, 2});
        x.entries.push_back({u, 3});
    }
    const Codebook cb = build_codebook_svd(x, 2, 4, 8, 11);
    for (std::uint32_t m = 0; m < cb.num_splits; ++m) {
        CHECK(cb.codes(0)[m] == cb.codes(1)[m]);
        CHECK(cb.codes(2)[m] == cb.codes(3)[m]);
    }
}

TEST_CASE("buckets are equal frequency when latents are distinct") {
    // An anti-diagonal staircase: item i is touched by users 0..i, so the
    // leading latent coordinate is strictly monotone across items.
    const std::uint32_t n = 16;
    InteractionMatrix x;
    x.num_users = n;
    x.num_items = n;
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t u = 0; u <= i; ++u) {
            x.entries.push_back({u, i});
        }
    }
    const Codebook cb = build_codebook_svd(x, 1, 4, 8, 13);
    const auto sizes = bucket_sizes(cb);
    const auto [lo, hi] = std::minmax_element(sizes[0].begin(), sizes[0].end());
    CHECK(*hi - *lo <= 1);
    CHECK(*lo == 4);
}

TEST_CASE("rank collapse degrades to a single bucket instead of throwing") {
    // Every item has the same interaction column, so the matrix has rank 1
    // and splits beyond the first see an all-zero latent coordinate.
    InteractionMatrix x;
    x.num_users = 3;
    x.num_items = 6;
    for (std::uint32_t u = 0; u < 3; ++u) {
        for (item_id i = 0; i < 6; ++i) {
            x.entries.push_back({u, i});
        }
    }
    Codebook cb;
    CHECK_NOTHROW(cb = build_codebook_svd(x, 2, 4, 8, 17));
    const auto sizes = bucket_sizes(cb);
    for (std::uint32_t m = 0; m < cb.num_splits; ++m) {
        std::uint32_t used = 0;
        for (const auto c : sizes[m]) {
            used += c > 0 ? 1 : 0;
        }
        CHECK(used == 1);
    }
}

TEST_CASE("synthetic interactions are valid and cover every item") {
    for (const std::uint64_t seed : {1ull, 2ull}) {
        const InteractionMatrix x = synth_interactions(500, 64, seed);
        CHECK(x.num_items == 500);
        CHECK(x.num_users == 64);
        CHECK_NOTHROW(x.validate());
        std::vector<char> covered(x.num_items, 0);
        for (const auto& e : x.entries) {
            covered[e.item] = 1;
        }
        CHECK(std::count(covered.begin(), covered.end(), 1) == 500);
    }
}

TEST_CASE("codebooks and workloads are reproducible from the seed") {
    const Codebook a = build_codebook_svd(synth_interactions(300, 48, 5), 4, 8,
                                          32, 5);
    const Codebook b = build_codebook_svd(synth_interactions(300, 48, 5), 4, 8,
                                          32, 5);
    CHECK(a == b);
    CHECK(std::memcmp(a.sub_embeddings.data(), b.sub_embeddings.data(),
                      a.sub_embeddings.size() * sizeof(float)) == 0);

    const SyntheticWorkload w1 = gen_workload(300, 48, 4, 8, 32, 0.5f, 9, 6);
    const SyntheticWorkload w2 = gen_workload(300, 48, 4, 8, 32, 0.5f, 9, 6);
    CHECK(w1 == w2);
    CHECK(std::memcmp(w1.queries.data(), w2.queries.data(),
                      w1.queries.size() * sizeof(float)) == 0);

    const SyntheticWorkload w3 = gen_workload(300, 48, 4, 8, 32, 0.5f, 10, 6);
    CHECK(w3.queries != w1.queries);
}

TEST_CASE("workload arguments are validated") {
    CHECK_THROWS_AS(gen_workload(300, 48, 4, 8, 32, -0.1f, 9, 4),
                    std::invalid_argument);
    CHECK_THROWS_AS(gen_workload(300, 48, 4, 8, 32, 1.5f, 9, 4),
                    std::invalid_argument);
    CHECK_THROWS_AS(gen_workload(300, 48, 4, 8, 32, 0.5f, 9, 0),
                    std::invalid_argument);
}

TEST_CASE("workload shape matches its declared dimensions") {
    const SyntheticWorkload w = gen_workload(200, 32, 2, 8, 16, 0.3f, 21, 5);
    CHECK_NOTHROW(w.codebook.validate());
    CHECK(w.codebook.num_items == 200);
    CHECK(w.num_queries == 5);
    CHECK(w.queries.size() == 5u * 16u);
    CHECK(w.skew == 0.3f);
    CHECK(w.seed == 21);
    CHECK(w.query(4).size() == 16);
}

TEST_CASE("skewed queries prune far more of the catalogue than flat ones") {
    const std::uint32_t items = 4096, users = 512, m = 8, b = 64, dim = 128;
    const std::uint32_t nq = 40;

    const auto mean_unique = [&](float skew) {
        const SyntheticWorkload w =
            gen_workload(items, users, m, b, dim, skew, 33, nq);
        const InvertedIndexes inv = build_inverted_indexes(w.codebook);
        double total = 0.0;
        for (std::uint32_t q = 0; q < nq; ++q) {
            const SubScoreMatrix s =
                precompute_sub_scores(w.codebook, w.query(q));
            const PruneResult res =
                pruned_topk(w.codebook, inv, s, PruneConfig::safe(10, 8));
            CHECK(res.topk == pqtopk(w.codebook, s, 10));
            total += static_cast<double>(res.stats.items_scored_unique);
        }
        return total / nq / items;
    };

    const double flat = mean_unique(0.0f);
    const double skewed = mean_unique(1.0f);
    CHECK(skewed < flat);
    CHECK(skewed < 0.5);
}

}  // TEST_SUITE
