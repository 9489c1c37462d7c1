#include "pqrank/codebook.hpp"

#include <stdexcept>
#include <string>

namespace pqrank {

void Codebook::validate() const {
    if (num_items == 0 || num_splits == 0 || num_subids == 0 || dim == 0) {
        throw std::invalid_argument("codebook: all dimensions must be >= 1");
    }
    if (num_subids > 65535) {
        throw std::invalid_argument("codebook: num_subids exceeds 65535");
    }
    if (dim % num_splits != 0) {
        throw std::invalid_argument("codebook: dim not divisible by num_splits");
    }
    const std::size_t want_assign =
        static_cast<std::size_t>(num_items) * num_splits;
    if (assignments.size() != want_assign) {
        throw std::invalid_argument("codebook: assignments size mismatch");
    }
    const std::size_t want_emb =
        static_cast<std::size_t>(num_splits) * num_subids * sub_dim();
    if (sub_embeddings.size() != want_emb) {
        throw std::invalid_argument("codebook: sub_embeddings size mismatch");
    }
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] >= num_subids) {
            throw std::invalid_argument("codebook: sub-id out of range at entry " +
                                        std::to_string(i));
        }
    }
}

std::vector<float> reconstruct_embedding(const Codebook& cb, item_id item) {
    if (item >= cb.num_items) {
        throw std::invalid_argument("reconstruct_embedding: item out of range");
    }
    std::vector<float> out(cb.dim);
    const auto codes = cb.codes(item);
    const std::uint32_t sub_dim = cb.sub_dim();
    for (std::uint32_t m = 0; m < cb.num_splits; ++m) {
        const auto row = cb.sub_embedding(m, codes[m]);
        std::copy(row.begin(), row.end(), out.begin() + static_cast<std::size_t>(m) * sub_dim);
    }
    return out;
}

}  // namespace pqrank
