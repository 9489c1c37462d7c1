#include "pqrank/builder.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "pqrank/scoring.hpp"

namespace pqrank {

void InteractionMatrix::validate() const {
    if (num_users == 0 || num_items == 0) {
        throw std::invalid_argument("interactions: empty user or item axis");
    }
    std::vector<char> covered(num_items, 0);
    for (const auto& e : entries) {
        if (e.user >= num_users) {
            throw std::invalid_argument("interactions: user id out of range");
        }
        if (e.item >= num_items) {
            throw std::invalid_argument("interactions: item id out of range");
        }
        covered[e.item] = 1;
    }
    for (item_id i = 0; i < num_items; ++i) {
        if (covered[i] == 0) {
            throw std::invalid_argument(
                "interactions: item without any interaction");
        }
    }
    std::vector<std::uint64_t> keys(entries.size());
    for (std::size_t n = 0; n < entries.size(); ++n) {
        keys[n] = (static_cast<std::uint64_t>(entries[n].user) << 32) |
                  entries[n].item;
    }
    std::sort(keys.begin(), keys.end());
    if (std::adjacent_find(keys.begin(), keys.end()) != keys.end()) {
        throw std::invalid_argument("interactions: duplicate (user, item) pair");
    }
}

namespace {

Eigen::MatrixXf thin_q(const Eigen::MatrixXf& y) {
    Eigen::HouseholderQR<Eigen::MatrixXf> qr(y);
    return qr.householderQ() *
           Eigen::MatrixXf::Identity(y.rows(), y.cols());
}

// Item-side factor of a randomized truncated SVD of the interaction matrix.
// Returns Z = X^T Q (num_items x ell) for an orthonormal user basis Q after
// two power iterations. Entries must be sorted by (item, user): per-item
// contributions then accumulate in one fixed order, so items with identical
// interaction columns end up with bitwise identical Z rows.
Eigen::MatrixXf item_factor(const InteractionMatrix& x,
                            const std::vector<Interaction>& sorted,
                            std::uint32_t ell, std::mt19937_64& rng) {
    std::normal_distribution<float> normal(0.f, 1.f);
    Eigen::MatrixXf omega(x.num_items, ell);
    for (std::uint32_t i = 0; i < x.num_items; ++i) {
        for (std::uint32_t l = 0; l < ell; ++l) {
            omega(i, l) = normal(rng);
        }
    }
    Eigen::MatrixXf y = Eigen::MatrixXf::Zero(x.num_users, ell);
    for (const auto& e : sorted) {
        y.row(e.user) += omega.row(e.item);
    }
    Eigen::MatrixXf q = thin_q(y);
    Eigen::MatrixXf z(x.num_items, ell);
    for (int pass = 0; pass < 3; ++pass) {
        z.setZero();
        for (const auto& e : sorted) {
            z.row(e.item) += q.row(e.user);
        }
        if (pass == 2) {
            break;
        }
        y.setZero();
        for (const auto& e : sorted) {
            y.row(e.user) += z.row(e.item);
        }
        q = thin_q(y);
    }
    return z;
}

}  // namespace

Codebook build_codebook_svd(const InteractionMatrix& x, std::uint32_t num_splits,
                            std::uint32_t num_subids, std::uint32_t dim,
                            std::uint64_t seed) {
    if (num_splits == 0 || num_subids == 0 || dim == 0) {
        throw std::invalid_argument("build_codebook_svd: zero dimension");
    }
    if (num_subids > 65535) {
        throw std::invalid_argument("build_codebook_svd: num_subids > 65535");
    }
    if (dim % num_splits != 0) {
        throw std::invalid_argument(
            "build_codebook_svd: dim not divisible by num_splits");
    }
    x.validate();

    std::vector<Interaction> sorted = x.entries;
    std::sort(sorted.begin(), sorted.end(),
              [](const Interaction& a, const Interaction& b) {
                  if (a.item != b.item) {
                      return a.item < b.item;
                  }
                  return a.user < b.user;
              });

    const std::uint32_t ell =
        std::min({num_splits + 8, x.num_users, x.num_items});
    std::mt19937_64 rng(seed);
    const Eigen::MatrixXf z = item_factor(x, sorted, ell, rng);

    // Singular structure from the small Gram matrix, accumulated in double.
    Eigen::MatrixXd gram(ell, ell);
    for (std::uint32_t a = 0; a < ell; ++a) {
        for (std::uint32_t b = a; b < ell; ++b) {
            const float* za = z.col(a).data();
            const float* zb = z.col(b).data();
            double acc = 0.0;
            for (std::uint32_t i = 0; i < x.num_items; ++i) {
                acc += static_cast<double>(za[i]) * static_cast<double>(zb[i]);
            }
            gram(a, b) = acc;
            gram(b, a) = acc;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const double sigma_max =
        std::sqrt(std::max(0.0, eig.eigenvalues()(ell - 1)));

    Codebook cb;
    cb.num_items = x.num_items;
    cb.num_splits = num_splits;
    cb.num_subids = num_subids;
    cb.dim = dim;
    cb.assignments.resize(static_cast<std::size_t>(x.num_items) * num_splits);
    cb.sub_embeddings.resize(static_cast<std::size_t>(num_splits) * num_subids *
                             (dim / num_splits));

    std::vector<double> lat(x.num_items);
    std::vector<item_id> order(x.num_items);
    for (std::uint32_t j = 0; j < num_splits; ++j) {
        // j-th largest singular component; beyond the achievable rank the
        // coordinate degrades to all zeros and the split collapses into one
        // bucket.
        std::fill(lat.begin(), lat.end(), 0.0);
        const bool live = j < ell &&
                          std::sqrt(std::max(0.0, eig.eigenvalues()(ell - 1 - j))) >
                              sigma_max * 1e-6;
        if (live) {
            const Eigen::VectorXd w = eig.eigenvectors().col(ell - 1 - j);
            for (std::uint32_t l = 0; l < ell; ++l) {
                const float* zc = z.col(l).data();
                const double wl = w(l);
                for (std::uint32_t i = 0; i < x.num_items; ++i) {
                    lat[i] += wl * static_cast<double>(zc[i]);
                }
            }
        }

        // Equal-frequency buckets along the latent coordinate; ties inherit
        // the previous bucket so identical coordinates always share one.
        std::iota(order.begin(), order.end(), item_id{0});
        std::sort(order.begin(), order.end(), [&lat](item_id a, item_id b) {
            if (lat[a] != lat[b]) {
                return lat[a] < lat[b];
            }
            return a < b;
        });
        sub_id bucket = 0;
        for (std::uint32_t p = 0; p < x.num_items; ++p) {
            if (p == 0 || lat[order[p]] != lat[order[p - 1]]) {
                bucket = static_cast<sub_id>(static_cast<std::uint64_t>(p) *
                                             num_subids / x.num_items);
            }
            cb.assignments[static_cast<std::size_t>(order[p]) * num_splits + j] =
                bucket;
        }
    }

    std::mt19937_64 emb_rng(~seed);
    std::normal_distribution<float> normal(0.f, 1.f);
    for (float& v : cb.sub_embeddings) {
        v = normal(emb_rng);
    }
    cb.validate();
    return cb;
}

InteractionMatrix synth_interactions(std::uint32_t num_items,
                                     std::uint32_t num_users,
                                     std::uint64_t seed) {
    if (num_items == 0 || num_users == 0) {
        throw std::invalid_argument("synth_interactions: zero users or items");
    }
    std::mt19937_64 rng(seed);
    // Consecutive items form twin groups sharing one user set, so whole
    // groups keep identical interaction columns (and therefore identical
    // codes). Groups are spread over user clusters that hold most of their
    // interactions.
    const std::uint32_t twin = num_items >= 4096 ? 16 : 1;
    const std::uint32_t num_groups = (num_items + twin - 1) / twin;
    const std::uint32_t clusters =
        std::clamp<std::uint32_t>(std::min(num_users, num_groups) / 8, 1, 64);
    std::uniform_int_distribution<std::uint32_t> extra(0, 7);
    std::uniform_int_distribution<std::uint32_t> any_user(0, num_users - 1);
    std::uniform_real_distribution<float> coin(0.f, 1.f);

    InteractionMatrix x;
    x.num_users = num_users;
    x.num_items = num_items;
    x.entries.reserve(static_cast<std::size_t>(num_groups) * 5 * twin);
    std::vector<std::uint32_t> users;
    for (std::uint32_t g = 0; g < num_groups; ++g) {
        const std::uint32_t c = g % clusters;
        const std::uint32_t span = (num_users - 1 - c) / clusters + 1;
        std::uniform_int_distribution<std::uint32_t> in_cluster(0, span - 1);
        const std::uint32_t want = 1 + extra(rng);
        users.clear();
        while (users.size() < want) {
            const std::uint32_t u = coin(rng) < 0.9f
                                        ? c + clusters * in_cluster(rng)
                                        : any_user(rng);
            if (std::find(users.begin(), users.end(), u) != users.end()) {
                break;  // rare collision: settle for a smaller set
            }
            users.push_back(u);
        }
        const item_id lo = g * twin;
        const item_id hi = std::min<item_id>(lo + twin, num_items);
        for (item_id i = lo; i < hi; ++i) {
            for (const std::uint32_t u : users) {
                x.entries.push_back({u, i});
            }
        }
    }
    return x;
}

SyntheticWorkload gen_workload(std::uint32_t num_items, std::uint32_t num_users,
                               std::uint32_t num_splits, std::uint32_t num_subids,
                               std::uint32_t dim, float skew, std::uint64_t seed,
                               std::uint32_t num_queries) {
    if (!(skew >= 0.f && skew <= 1.f)) {
        throw std::invalid_argument("gen_workload: skew must be in [0, 1]");
    }
    if (num_queries == 0) {
        throw std::invalid_argument("gen_workload: num_queries must be >= 1");
    }
    SyntheticWorkload w;
    w.codebook = build_codebook_svd(synth_interactions(num_items, num_users, seed),
                                    num_splits, num_subids, dim, seed + 1);
    w.num_queries = num_queries;
    w.seed = seed;
    w.skew = skew;
    w.queries.resize(static_cast<std::size_t>(num_queries) * dim);

    std::mt19937_64 rng(seed + 2);
    std::normal_distribution<float> normal(0.f, 1.f);
    std::uniform_int_distribution<item_id> pick_anchor(0, num_items - 1);
    const std::uint32_t sub_dim = dim / num_splits;
    // Per-split boost of the anchor's sub-embeddings, in units of the
    // query-noise score deviation. kBoost sets the strength at full skew;
    // gamma grades it across splits so low skew leaves most splits noisy.
    const float kBoost = 8.0f;
    const float gamma = 0.5f + 0.5f * skew;
    std::vector<std::uint32_t> perm(num_splits);
    for (std::uint32_t q = 0; q < num_queries; ++q) {
        float* phi = w.queries.data() + static_cast<std::size_t>(q) * dim;
        for (std::uint32_t t = 0; t < dim; ++t) {
            phi[t] = normal(rng);
        }
        if (skew == 0.f) {
            continue;
        }
        const item_id anchor = pick_anchor(rng);
        const auto codes = w.codebook.codes(anchor);
        std::iota(perm.begin(), perm.end(), 0u);
        std::shuffle(perm.begin(), perm.end(), rng);
        for (std::uint32_t m = 0; m < num_splits; ++m) {
            const auto psi = w.codebook.sub_embedding(m, codes[m]);
            const float n2 = dot_product(psi, psi);
            if (n2 <= 0.f) {
                continue;
            }
            const float amp = skew * kBoost *
                              std::pow(gamma, static_cast<float>(perm[m])) /
                              std::sqrt(n2);
            float* pm = phi + static_cast<std::size_t>(m) * sub_dim;
            for (std::uint32_t t = 0; t < sub_dim; ++t) {
                pm[t] += amp * psi[t];
            }
        }
    }
    return w;
}

}  // namespace pqrank
