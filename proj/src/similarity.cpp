#include "semrheo/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace semrheo {

CompositeQuery::CompositeQuery(std::vector<TokenIndex> members)
{
    if (members.empty()) {
        throw InvalidArgument("composite query needs at least one member");
    }
    for (TokenIndex m : members) {
        if (std::find(members_.begin(), members_.end(), m) == members_.end()) {
            members_.push_back(m);
        }
    }
}

std::vector<Neighbor> top_k(const EmbeddingSet& set, const Eigen::Ref<const Eigen::VectorXd>& query,
                            std::size_t k, std::span<const TokenIndex> exclude)
{
    if (k == 0) {
        throw InvalidArgument("k must be >= 1");
    }
    if (static_cast<std::size_t>(query.size()) != set.dims()) {
        throw InvalidArgument("query dimension " + std::to_string(query.size())
                              + " does not match set dimension " + std::to_string(set.dims()));
    }
    const double qnorm = query.norm();
    if (qnorm == 0.0) {
        throw DegenerateVectorError("top_k query");
    }

    const Eigen::VectorXd dots = set.matrix() * query;
    const auto& norms = set.row_norms();

    std::vector<bool> excluded(set.size(), false);
    for (TokenIndex e : exclude) {
        if (e < excluded.size()) {
            excluded[e] = true;
        }
    }

    std::vector<TokenIndex> pool;
    pool.reserve(set.size());
    for (TokenIndex i = 0; i < set.size(); ++i) {
        if (!excluded[i] && norms[static_cast<Eigen::Index>(i)] > 0.0) {
            pool.push_back(i);
        }
    }
    if (pool.empty()) {
        throw EmptyPoolError();
    }

    // Parallel and antiparallel rows land within a few ulps of +-1; snapping
    // them makes such rows tie exactly so the index tie-break applies.
    constexpr double kUnitSnap = 8 * std::numeric_limits<double>::epsilon();
    std::vector<double> scores(set.size(), 0.0);
    for (TokenIndex i : pool) {
        const auto r = static_cast<Eigen::Index>(i);
        const double c = dots[r] / (norms[r] * qnorm);
        scores[i] = std::abs(c) >= 1.0 - kUnitSnap ? std::copysign(1.0, c) : c;
    }
    const auto better = [&](TokenIndex a, TokenIndex b) {
        if (scores[a] != scores[b]) {
            return scores[a] > scores[b];
        }
        return a < b;
    };
    const std::size_t take = std::min(k, pool.size());
    std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take), pool.end(), better);

    std::vector<Neighbor> result;
    result.reserve(take);
    for (std::size_t r = 0; r < take; ++r) {
        result.push_back(Neighbor{set.ref(pool[r]), scores[pool[r]]});
    }
    return result;
}

Eigen::VectorXd composite_vector(const EmbeddingSet& set, const CompositeQuery& query)
{
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(set.dims()));
    for (TokenIndex m : query.members()) {
        if (m >= set.size()) {
            throw InvalidArgument("composite member index " + std::to_string(m) + " out of range");
        }
        const double norm = set.row_norms()[static_cast<Eigen::Index>(m)];
        if (norm == 0.0) {
            throw DegenerateVectorError("composite member '" + set.token(m) + "'");
        }
        sum += set.row(m).transpose() / norm;
    }
    return sum / static_cast<double>(query.members().size());
}

} // namespace semrheo
