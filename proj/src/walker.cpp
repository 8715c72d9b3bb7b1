#include "semrheo/walker.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <thread>

#include "semrheo/errors.hpp"
#include "semrheo/rng.hpp"

namespace semrheo {

namespace {

void validate(const EmbeddingSet& set, const WalkParams& params)
{
    if (!set.contains(params.start)) {
        throw UnknownTokenError(params.start.token);
    }
    if (params.top_n < 1) {
        throw InvalidArgument("top_n must be >= 1");
    }
    if (params.steps < 1) {
        throw InvalidArgument("steps must be >= 1");
    }
    for (const auto& g : params.guides) {
        if (!set.contains(g)) {
            throw UnknownTokenError(g.token);
        }
        if (g.index == params.start.index) {
            throw InvalidArgument("start token '" + g.token + "' also listed as a guide");
        }
    }
}

template <typename QueryFn, typename ExcludeFn>
Walk walk_impl(const EmbeddingSet& set, const WalkParams& params, QueryFn&& query_for,
               ExcludeFn&& exclusions_for)
{
    Walk walk;
    walk.params = params;
    walk.path.reserve(params.steps + 1);
    walk.candidate_log.reserve(params.steps);
    walk.path.push_back(params.start);

    Rng rng(params.seed);
    std::vector<TokenIndex> exclude;
    for (std::size_t t = 0; t < params.steps; ++t) {
        const TokenIndex current = walk.path.back().index;
        exclude.clear();
        exclusions_for(current, exclude);
        auto candidates = top_k(set, query_for(current), params.top_n, exclude);
        const auto pick = rng.uniform_index(candidates.size());
        walk.path.push_back(candidates[pick].token);
        walk.candidate_log.push_back(std::move(candidates));
    }
    return walk;
}

} // namespace

Walk free_walk(const EmbeddingSet& set, const WalkParams& params)
{
    validate(set, params);
    if (!params.guides.empty()) {
        throw InvalidArgument("free_walk called with guides; use guided_walk");
    }
    return walk_impl(
        set, params,
        [&](TokenIndex current) -> Eigen::VectorXd { return set.row(current).transpose(); },
        [&](TokenIndex current, std::vector<TokenIndex>& out) {
            if (params.self_exclusion) {
                out.push_back(current);
            }
        });
}

Walk guided_walk(const EmbeddingSet& set, const WalkParams& params)
{
    validate(set, params);
    if (params.guides.empty()) {
        throw InvalidArgument("guided_walk needs at least one guide");
    }
    std::vector<TokenIndex> tethers{params.start.index};
    for (const auto& g : params.guides) {
        tethers.push_back(g.index);
    }
    return walk_impl(
        set, params,
        [&](TokenIndex current) {
            std::vector<TokenIndex> members = tethers;
            members.push_back(current);
            return composite_vector(set, CompositeQuery(std::move(members)));
        },
        [&](TokenIndex current, std::vector<TokenIndex>& out) {
            out = tethers;
            if (params.self_exclusion) {
                out.push_back(current);
            }
        });
}

Walk run_walk(const EmbeddingSet& set, const WalkParams& params)
{
    return params.guides.empty() ? free_walk(set, params) : guided_walk(set, params);
}

std::vector<Walk> run_ensemble(const EmbeddingSet& set, const WalkParams& base, std::size_t count,
                               std::size_t jobs)
{
    std::vector<Walk> walks(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};

    const auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                WalkParams params = base;
                params.seed = base.seed + i;
                walks[i] = run_walk(set, params);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    const std::size_t threads = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(count, 1));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return walks;
}

AbsorptionReport detect_absorption(const Walk& walk, std::size_t window,
                                   std::size_t distinct_threshold)
{
    const std::size_t steps = walk.path.size() - 1;
    if (window < 1 || window > steps) {
        throw InvalidArgument("absorption window must be in [1, steps]");
    }
    if (distinct_threshold < 1) {
        throw InvalidArgument("distinct_threshold must be >= 1");
    }

    AbsorptionReport report;
    report.window = window;
    report.distinct_threshold = distinct_threshold;

    // Slices path[s, s + window) for s = 0 .. last_start; track distinct
    // counts with a sliding multiset.
    const std::size_t last_start = walk.path.size() - window;
    std::map<TokenIndex, std::size_t> counts;
    for (std::size_t i = 0; i < window; ++i) {
        ++counts[walk.path[i].index];
    }
    std::optional<std::size_t> last_bad;
    for (std::size_t s = 0;; ++s) {
        if (counts.size() > distinct_threshold) {
            last_bad = s;
        }
        if (s == last_start) {
            break;
        }
        auto it = counts.find(walk.path[s].index);
        if (--it->second == 0) {
            counts.erase(it);
        }
        ++counts[walk.path[s + window].index];
    }

    const std::size_t onset = last_bad ? *last_bad + 1 : 0;
    if (onset + window > steps) {
        return report;
    }
    report.absorbed = true;
    report.onset_step = onset;
    std::map<TokenIndex, const TokenRef*> members;
    for (std::size_t t = onset; t < walk.path.size(); ++t) {
        members.emplace(walk.path[t].index, &walk.path[t]);
    }
    for (const auto& [index, ref] : members) {
        report.cluster.push_back(*ref);
    }
    return report;
}

Trajectory walk_trajectory(const EmbeddingSet& set, const Walk& walk, bool normalize)
{
    Trajectory::Matrix points(static_cast<Eigen::Index>(walk.path.size()),
                              static_cast<Eigen::Index>(set.dims()));
    for (std::size_t t = 0; t < walk.path.size(); ++t) {
        const TokenIndex k = walk.path[t].index;
        points.row(static_cast<Eigen::Index>(t)) = set.row(k);
        if (normalize) {
            const double norm = set.row_norms()[static_cast<Eigen::Index>(k)];
            if (norm == 0.0) {
                throw DegenerateVectorError("token '" + set.token(k) + "'");
            }
            points.row(static_cast<Eigen::Index>(t)) /= norm;
        }
    }
    return Trajectory(std::move(points), Provenance::walk);
}

} // namespace semrheo
