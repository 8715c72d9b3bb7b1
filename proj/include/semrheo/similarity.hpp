#pragma once

#include <Eigen/Core>

#include <cmath>
#include <span>
#include <vector>

#include "semrheo/embedding_store.hpp"
#include "semrheo/errors.hpp"

namespace semrheo {

struct Neighbor {
    TokenRef token;
    double score = 0.0;  // cosine similarity
};

/// Tether set for a composite query: deduplicated, first occurrence wins.
class CompositeQuery {
public:
    explicit CompositeQuery(std::vector<TokenIndex> members);

    const std::vector<TokenIndex>& members() const noexcept { return members_; }

private:
    std::vector<TokenIndex> members_;
};

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cosine(const Eigen::MatrixBase<DerivedA>& a,
                                 const Eigen::MatrixBase<DerivedB>& b)
{
    if (a.size() != b.size()) {
        throw InvalidArgument("cosine of vectors with different dimensions");
    }
    const auto na = a.norm();
    const auto nb = b.norm();
    if (na == 0 || nb == 0) {
        throw DegenerateVectorError("cosine of a zero vector");
    }
    return a.dot(b) / (na * nb);
}

/// The k most cosine-similar tokens to `query`, skipping indices in `exclude`.
///
/// Sorted by score descending, ties by ascending token index. Returns fewer
/// than k neighbors when the pool is smaller. Zero rows have no direction and
/// are never candidates. Throws DegenerateVectorError for a zero query and
/// EmptyPoolError when no candidate remains.
std::vector<Neighbor> top_k(const EmbeddingSet& set, const Eigen::Ref<const Eigen::VectorXd>& query,
                            std::size_t k, std::span<const TokenIndex> exclude = {});

/// Mean of the L2-normalized member vectors (may be the zero vector).
Eigen::VectorXd composite_vector(const EmbeddingSet& set, const CompositeQuery& query);

} // namespace semrheo
