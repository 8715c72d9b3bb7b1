#include "doctest.h"

#include <algorithm>
#include <set>

#include "semrheo/errors.hpp"
#include "semrheo/walker.hpp"
#include "support.hpp"

using namespace semrheo;

namespace {

EmbeddingSet pair_set()
{
    EmbeddingSet::Matrix m(2, 2);
    m << 1, 0, 0.6, 0.8;
    return EmbeddingSet({"a", "b"}, m);
}

// Indices follow first appearance of each token.
Walk path_walk(const std::vector<std::string>& tokens)
{
    Walk w;
    std::vector<std::string> seen;
    for (const auto& t : tokens) {
        auto it = std::find(seen.begin(), seen.end(), t);
        if (it == seen.end()) {
            it = seen.insert(seen.end(), t);
        }
        w.path.push_back(TokenRef{static_cast<TokenIndex>(it - seen.begin()), t});
    }
    w.params.steps = tokens.size() - 1;
    return w;
}

Walk index_walk(const std::vector<TokenIndex>& ids)
{
    Walk w;
    for (auto i : ids) {
        w.path.push_back(TokenRef{i, "t" + std::to_string(i)});
    }
    w.params.steps = ids.size() - 1;
    return w;
}

bool same(const Walk& a, const Walk& b)
{
    if (a.path != b.path || a.candidate_log.size() != b.candidate_log.size()) {
        return false;
    }
    for (std::size_t t = 0; t < a.candidate_log.size(); ++t) {
        const auto& x = a.candidate_log[t];
        const auto& y = b.candidate_log[t];
        if (x.size() != y.size()) {
            return false;
        }
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!(x[i].token == y[i].token) || x[i].score != y[i].score) {
                return false;
            }
        }
    }
    return true;
}

void check_membership(const Walk& w)
{
    REQUIRE(w.path.size() == w.params.steps + 1);
    REQUIRE(w.candidate_log.size() == w.params.steps);
    CHECK(w.path.front() == w.params.start);
    for (std::size_t t = 0; t < w.params.steps; ++t) {
        const auto& c = w.candidate_log[t];
        CHECK(c.size() <= w.params.top_n);
        CHECK(std::any_of(c.begin(), c.end(), [&](const Neighbor& n) { return n.token == w.path[t + 1]; }));
    }
}

} // namespace

TEST_SUITE("walker") {

TEST_CASE("two tokens alternate under self-exclusion")
{
    const auto s = pair_set();
    for (std::uint64_t seed : {0ULL, 1ULL, 77ULL, ~0ULL}) {
        WalkParams p{s.ref("a"), 10, 9, {}, seed, true};
        const auto w = free_walk(s, p);
        check_membership(w);
        for (std::size_t t = 0; t < w.path.size(); ++t) {
            CHECK(w.path[t].token == (t % 2 == 0 ? "a" : "b"));
        }
    }
}

TEST_CASE("single token with self-exclusion has no pool")
{
    const EmbeddingSet s({"a"}, EmbeddingSet::Matrix::Ones(1, 2));
    CHECK_THROWS_AS(free_walk(s, WalkParams{s.ref("a"), 3, 2, {}, 0, true}), EmptyPoolError);
    const auto w = free_walk(s, WalkParams{s.ref("a"), 3, 2, {}, 0, false});
    CHECK(w.path.size() == 3);
}

TEST_CASE("parameter validation")
{
    const auto s = testing::random_set(10, 3, 1);
    CHECK_THROWS_AS(free_walk(s, WalkParams{s.ref(0), 0, 5, {}, 0, true}), InvalidArgument);
    CHECK_THROWS_AS(free_walk(s, WalkParams{s.ref(0), 2, 0, {}, 0, true}), InvalidArgument);
    CHECK_THROWS(free_walk(s, WalkParams{TokenRef{0, "nope"}, 2, 5, {}, 0, true}));
    CHECK_THROWS_AS(guided_walk(s, WalkParams{s.ref(0), 2, 5, {s.ref(0)}, 0, true}), InvalidArgument);
    CHECK_THROWS_AS(guided_walk(s, WalkParams{s.ref(0), 2, 5, {}, 0, true}), InvalidArgument);
    CHECK_THROWS_AS(free_walk(s, WalkParams{s.ref(0), 2, 5, {s.ref(1)}, 0, true}), InvalidArgument);
}

TEST_CASE("determinism and membership")
{
    const auto s = testing::random_set(200, 16, 4);
    WalkParams p{s.ref(17), 6, 300, {}, 12345, true};
    const auto a = free_walk(s, p);
    const auto b = free_walk(s, p);
    check_membership(a);
    CHECK(same(a, b));
    for (std::size_t t = 0; t < p.steps; ++t) {
        CHECK(a.path[t + 1].index != a.path[t].index);
    }
    p.seed = 12346;
    CHECK_FALSE(same(free_walk(s, p), a));

    WalkParams g{s.ref(3), 5, 200, {s.ref(8), s.ref(9)}, 7, true};
    const auto ga = guided_walk(s, g);
    check_membership(ga);
    CHECK(same(ga, guided_walk(s, g)));
}

TEST_CASE("ensembles ignore the job count")
{
    const auto s = testing::random_set(300, 12, 9);
    const WalkParams p{s.ref(0), 5, 150, {}, 1000, true};
    const auto one = run_ensemble(s, p, 9, 1);
    const auto four = run_ensemble(s, p, 9, 4);
    REQUIRE(one.size() == 9);
    REQUIRE(four.size() == 9);
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].params.seed == 1000 + i);
        CHECK(same(one[i], four[i]));
        WalkParams q = p;
        q.seed = 1000 + i;
        CHECK(same(one[i], free_walk(s, q)));
    }
}

TEST_CASE("clique closure")
{
    const auto s = testing::clique_set();
    const std::set<std::string> clique{"c0", "c1", "c2"};
    for (const auto& c : clique) {
        const auto nb = top_k(s, s.row(s.index_of(c)).transpose(), 3);
        for (const auto& n : nb) {
            CHECK(clique.count(n.token.token) == 1);
        }
    }
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto w = free_walk(s, WalkParams{s.ref("gate"), 3, 200, {}, seed, false});
        check_membership(w);
        bool entered = false;
        for (const auto& t : w.path) {
            if (clique.count(t.token) == 1) {
                entered = true;
            } else {
                CHECK_FALSE(entered);
            }
        }
        CHECK(entered);
    }
}

TEST_CASE("guided walk with co-directional tethers ranks like a free walk at t=0")
{
    EmbeddingSet::Matrix m(6, 3);
    m << 1, 0.2, 0, 2, 0.4, 0, 0.5, 0.1, 0, 1, 0.5, 0.1, 0.3, 1, 0.2, 1, 0.1, 0.9;
    const EmbeddingSet s({"s", "g1", "g2", "p", "q", "r"}, m);
    const WalkParams g{s.ref("s"), 3, 1, {s.ref("g1"), s.ref("g2")}, 0, true};
    const auto w = guided_walk(s, g);
    const std::vector<TokenIndex> ex{0, 1, 2};
    const auto expected = top_k(s, s.row(0).transpose(), 3, ex);
    REQUIRE(w.candidate_log[0].size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(w.candidate_log[0][i].token == expected[i].token);
        CHECK(w.candidate_log[0][i].score == doctest::Approx(expected[i].score).epsilon(1e-12));
    }
}

TEST_CASE("guided walks never revisit start or guides")
{
    const auto s = testing::random_set(120, 6, 21);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const WalkParams g{s.ref(5), 4, 100, {s.ref(6), s.ref(7)}, seed, true};
        const auto w = guided_walk(s, g);
        for (std::size_t t = 1; t < w.path.size(); ++t) {
            CHECK(w.path[t].index != 5);
            CHECK(w.path[t].index != 6);
            CHECK(w.path[t].index != 7);
        }
    }
}

TEST_CASE("guided walk with a cancelling tether")
{
    EmbeddingSet::Matrix m(3, 2);
    m << 1, 0, -1, 0, 0, 1;
    const EmbeddingSet s({"e", "w", "n"}, m);
    const WalkParams g{s.ref("e"), 1, 1, {s.ref("w")}, 0, true};
    CHECK_THROWS_AS(guided_walk(s, g), DegenerateVectorError);
}

TEST_CASE("absorption examples")
{
    std::vector<std::string> alt;
    for (int i = 0; i < 30; ++i) {
        alt.push_back(i % 2 == 0 ? "a" : "b");
    }
    const auto r = detect_absorption(path_walk(alt), 10, 2);
    CHECK(r.absorbed);
    REQUIRE(r.onset_step.has_value());
    CHECK(*r.onset_step == 0);
    REQUIRE(r.cluster.size() == 2);
    CHECK(r.cluster[0].token == "a");
    CHECK(r.cluster[1].token == "b");
    CHECK(r.window == 10);
    CHECK(r.distinct_threshold == 2);

    std::vector<TokenIndex> fresh(40);
    for (std::size_t i = 0; i < fresh.size(); ++i) {
        fresh[i] = i;
    }
    const auto none = detect_absorption(index_walk(fresh), 10, 2);
    CHECK_FALSE(none.absorbed);
    CHECK(none.cluster.empty());
}

TEST_CASE("absorption onset is the last violating slice plus one")
{
    // 0..9 distinct, then 2-cycle 20,21
    std::vector<TokenIndex> ids;
    for (TokenIndex i = 0; i < 10; ++i) {
        ids.push_back(i);
    }
    for (int i = 0; i < 30; ++i) {
        ids.push_back(20 + static_cast<TokenIndex>(i % 2));
    }
    const auto r = detect_absorption(index_walk(ids), 5, 2);
    REQUIRE(r.absorbed);
    // slice [t, t+5) has <= 2 distinct iff t >= 9 (slice 9..13 = {9,20,21} has 3)
    CHECK(*r.onset_step == 10);
    REQUIRE(r.cluster.size() == 2);
    CHECK(r.cluster[0].index == 20);

    // brute-force oracle on random short paths
    semrheo::Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<TokenIndex> p(25 + rng.uniform_index(20));
        for (auto& x : p) {
            x = rng.uniform_index(trial % 2 == 0 ? 3 : 6);
        }
        const std::size_t window = 2 + rng.uniform_index(8);
        const std::size_t thr = 1 + rng.uniform_index(3);
        const std::size_t steps = p.size() - 1;
        std::optional<std::size_t> onset;
        for (std::size_t t = 0; t <= p.size(); ++t) {
            bool ok = true;
            for (std::size_t u = t; u + window <= p.size(); ++u) {
                std::set<TokenIndex> d(p.begin() + static_cast<std::ptrdiff_t>(u),
                                       p.begin() + static_cast<std::ptrdiff_t>(u + window));
                ok = ok && d.size() <= thr;
            }
            if (ok) {
                onset = t;
                break;
            }
        }
        const bool absorbed = onset && *onset + window <= steps;
        const auto got = detect_absorption(index_walk(p), window, thr);
        CHECK(got.absorbed == absorbed);
        if (absorbed) {
            CHECK(got.onset_step == onset);
            std::set<TokenIndex> c(p.begin() + static_cast<std::ptrdiff_t>(*onset), p.end());
            CHECK(got.cluster.size() == c.size());
        }
    }
}

TEST_CASE("absorption argument checks")
{
    const auto w = path_walk({"a", "b", "a"});
    CHECK_THROWS_AS(detect_absorption(w, 3, 2), InvalidArgument);
    CHECK_THROWS_AS(detect_absorption(w, 2, 0), InvalidArgument);
    CHECK_THROWS_AS(detect_absorption(w, 0, 1), InvalidArgument);
}

TEST_CASE("clique walk is reported absorbed")
{
    const auto s = testing::clique_set();
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto w = free_walk(s, WalkParams{s.ref("gate"), 3, 200, {}, seed, false});
        const auto r = detect_absorption(w, 50, 3);
        REQUIRE(r.absorbed);
        std::size_t entry = 0;
        while (w.path[entry].token == "gate") {
            ++entry;
        }
        CHECK(*r.onset_step <= entry);
        for (const auto& t : r.cluster) {
            CHECK(t.token.front() == 'c');
        }
    }
}

TEST_CASE("walk trajectory")
{
    EmbeddingSet::Matrix m(2, 2);
    m << 3, 4, 0, 2;
    const EmbeddingSet s({"a", "b"}, m);
    const auto w = free_walk(s, WalkParams{s.ref("a"), 1, 3, {}, 0, true});
    const auto raw = walk_trajectory(s, w);
    CHECK(raw.provenance() == Provenance::walk);
    REQUIRE(raw.size() == 4);
    CHECK(raw.points().row(0) == Eigen::RowVector2d(3, 4));
    CHECK(raw.points().row(1) == Eigen::RowVector2d(0, 2));
    const auto unit = walk_trajectory(s, w, true);
    CHECK(unit.points().row(0).isApprox(Eigen::RowVector2d(0.6, 0.8)));
    CHECK(unit.points().row(1).isApprox(Eigen::RowVector2d(0, 1)));
}

}
