#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "semrheo/embedding_store.hpp"
#include "semrheo/similarity.hpp"
#include "semrheo/trajectory.hpp"

namespace semrheo {

struct WalkParams {
    TokenRef start;
    std::size_t top_n = 10;
    std::size_t steps = 1000;
    std::vector<TokenRef> guides;  // empty for a free walk
    std::uint64_t seed = 0;
    bool self_exclusion = true;
};

struct Walk {
    WalkParams params;
    std::vector<TokenRef> path;                     // steps + 1 entries, path[0] == start
    std::vector<std::vector<Neighbor>> candidate_log;  // one list per step
};

/// Free similarity walk: at each step query the current token's vector, take
/// the top_n neighbors (excluding the current token when self_exclusion is
/// set) and move to one of them chosen uniformly by an Rng seeded with
/// params.seed. The generator is consumed once per step and nowhere else.
Walk free_walk(const EmbeddingSet& set, const WalkParams& params);

/// Guided walk: the step query is composite_vector over start, the guides and
/// the current token. Start and guides are never candidates.
Walk guided_walk(const EmbeddingSet& set, const WalkParams& params);

/// free_walk or guided_walk depending on whether guides is empty.
Walk run_walk(const EmbeddingSet& set, const WalkParams& params);

/// Runs `count` walks with seeds base.seed, base.seed + 1, ... on up to
/// `jobs` threads. Output order follows the seed ordinal regardless of jobs.
std::vector<Walk> run_ensemble(const EmbeddingSet& set, const WalkParams& base, std::size_t count,
                               std::size_t jobs);

struct AbsorptionReport {
    bool absorbed = false;
    std::optional<std::size_t> onset_step;
    std::vector<TokenRef> cluster;  // ascending token index
    std::size_t window = 0;
    std::size_t distinct_threshold = 0;
};

/// Finds the earliest step after which every `window`-long slice of the path
/// holds at most `distinct_threshold` distinct tokens.
AbsorptionReport detect_absorption(const Walk& walk, std::size_t window,
                                   std::size_t distinct_threshold);

/// Embedding vectors along the walk path, optionally unit-normalized first.
Trajectory walk_trajectory(const EmbeddingSet& set, const Walk& walk, bool normalize = false);

} // namespace semrheo
