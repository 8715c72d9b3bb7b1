#include "doctest.h"

#include <cmath>
#include <cstring>
#include <sstream>

#include "semrheo/embedding_store.hpp"
#include "semrheo/errors.hpp"
#include "support.hpp"

using namespace semrheo;

namespace {

EmbeddingSet from_text(const std::string& text)
{
    std::istringstream in(text);
    return load_word2vec_text(in);
}

std::string canonical_bytes(const EmbeddingSet& set)
{
    std::ostringstream out(std::ios::binary);
    save_canonical(set, out);
    return out.str();
}

EmbeddingSet from_bytes(const std::string& bytes)
{
    std::istringstream in(bytes, std::ios::binary);
    return load_canonical(in);
}

// Values a set gains by a pass through binary32 storage.
EmbeddingSet rounded_to_float(const EmbeddingSet& s)
{
    EmbeddingSet::Matrix m = s.matrix().cast<float>().cast<double>();
    return EmbeddingSet(s.tokens(), std::move(m), false);
}

} // namespace

TEST_SUITE("embedding_store") {

TEST_CASE("word2vec hand file")
{
    const auto s = from_text("2 3\na 1 0 0\nb 0 1 0");
    REQUIRE(s.size() == 2);
    CHECK(s.dims() == 3);
    CHECK(s.tokens() == std::vector<std::string>{"a", "b"});
    CHECK(s.row(0) == Eigen::RowVector3d(1, 0, 0));
    CHECK(s.row(1) == Eigen::RowVector3d(0, 1, 0));
    CHECK_FALSE(s.normalized());
}

TEST_CASE("word2vec accepts CRLF")
{
    const auto s = from_text("2 2\r\na 1 2\r\nb 3 4\r\n");
    CHECK(s.row(1) == Eigen::RowVector2d(3, 4));
}

TEST_CASE("word2vec rejects malformed input")
{
    CHECK_THROWS_AS(from_text("1 2\na 1 0 0"), FormatError);
    CHECK_THROWS_AS(from_text("2 2\na 1 0"), FormatError);
    CHECK_THROWS_AS(from_text("1 2\na 1 x"), FormatError);
    CHECK_THROWS_AS(from_text("1 2\na 1 nan"), FormatError);
    CHECK_THROWS_AS(from_text("1 2\na 1 inf"), FormatError);
    CHECK_THROWS_AS(from_text("x 2\n"), FormatError);
    CHECK_THROWS_AS(from_text(""), FormatError);
    CHECK_THROWS_AS(from_text("1 2\na 1 2\nb 3 4"), FormatError);
}

TEST_CASE("bad coordinate reports its line")
{
    try {
        from_text("2 2\na 1 2\nb 3 q\n");
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("duplicate token")
{
    try {
        from_text("2 1\na 1\na 2\n");
        FAIL("expected DuplicateTokenError");
    } catch (const DuplicateTokenError& e) {
        CHECK(e.token() == "a");
    }
}

TEST_CASE("glove hand file and errors")
{
    std::istringstream in("a 1 0\nb 0 1");
    const auto s = load_glove_text(in, 2);
    CHECK(s.tokens() == std::vector<std::string>{"a", "b"});
    CHECK(s.row(1) == Eigen::RowVector2d(0, 1));

    std::istringstream empty("");
    CHECK_THROWS_AS(load_glove_text(empty, 2), FormatError);
    std::istringstream wrong("a 1 0 0\n");
    CHECK_THROWS_AS(load_glove_text(wrong, 2), FormatError);
}

TEST_CASE("text round trip at 9 significant digits")
{
    const auto original = testing::random_set(50, 10, 11);
    auto check = [&](const EmbeddingSet& back) {
        REQUIRE(back.tokens() == original.tokens());
        for (std::size_t k = 0; k < original.size(); ++k) {
            for (std::size_t d = 0; d < original.dims(); ++d) {
                char buf[64];
                std::snprintf(buf, sizeof buf, "%.9g", original.matrix()(k, d));
                CHECK(back.matrix()(k, d) == std::strtod(buf, nullptr));
            }
        }
    };
    std::stringstream w2v;
    save_word2vec_text(original, w2v);
    check(load_word2vec_text(w2v));

    std::stringstream glove;
    save_glove_text(original, glove);
    const auto g = load_glove_text(glove, 10);
    check(g);

    std::stringstream again;
    save_word2vec_text(g, again);
    CHECK(load_word2vec_text(again) == g);
}

TEST_CASE("canonical layout of a hand set")
{
    const auto s = from_text("2 3\na 1 0 0\nb 0 1 0");
    const std::string bytes = canonical_bytes(s);
    REQUIRE(bytes.size() == 4 + 4 + 4 + 8 + 4 + (4 + 1) * 2 + 6 * 4);
    CHECK(bytes.substr(0, 4) == "SEMB");
    CHECK(bytes.substr(4, 4) == std::string("\x01\x00\x00\x00", 4));
    CHECK(bytes.substr(8, 4) == std::string(4, '\0'));
    CHECK(bytes.substr(12, 8) == std::string("\x02\x00\x00\x00\x00\x00\x00\x00", 8));
    CHECK(bytes.substr(20, 4) == std::string("\x03\x00\x00\x00", 4));
    CHECK(bytes.substr(24, 5) == std::string("\x01\x00\x00\x00" "a", 5));
    CHECK(bytes.substr(34, 4) == std::string("\x00\x00\x80\x3f", 4));  // 1.0f

    const auto back = from_bytes(bytes);
    CHECK(back == s);
}

TEST_CASE("canonical round trip is bit exact")
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto s = rounded_to_float(testing::random_set(1 + seed * 3, 1 + seed % 7, seed));
        const std::string bytes = canonical_bytes(s);
        const auto back = from_bytes(bytes);
        CHECK(back == s);
        CHECK(canonical_bytes(back) == bytes);
    }
    const auto norm = l2_normalize(rounded_to_float(testing::random_set(30, 5, 99)));
    const auto back = from_bytes(canonical_bytes(norm));
    CHECK(back.normalized());
    CHECK(canonical_bytes(back) == canonical_bytes(norm));
}

TEST_CASE("canonical keeps UTF-8 tokens")
{
    EmbeddingSet::Matrix m(2, 2);
    m << 1, 2, 3, 4;
    const EmbeddingSet s({"caf\xc3\xa9", "\xe6\x97\xa5"}, m);
    CHECK(from_bytes(canonical_bytes(s)) == s);
}

TEST_CASE("every single-byte flip is detected")
{
    const auto s = rounded_to_float(testing::random_set(6, 3, 5));
    const std::string bytes = canonical_bytes(s);
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        std::string corrupt = bytes;
        corrupt[i] = static_cast<char>(corrupt[i] ^ 0x5a);
        try {
            const auto back = from_bytes(corrupt);
            CHECK_MESSAGE(canonical_bytes(back) != bytes, "silent corruption at byte " << i);
            CHECK_FALSE(back == s);
        } catch (const FormatError&) {
        }
    }
}

TEST_CASE("canonical rejects truncation, bad magic and trailing bytes")
{
    const auto s = rounded_to_float(testing::random_set(4, 3, 2));
    const std::string bytes = canonical_bytes(s);
    for (std::size_t cut = 0; cut < bytes.size(); ++cut) {
        CHECK_THROWS_AS(from_bytes(bytes.substr(0, cut)), FormatError);
    }
    std::string magic = bytes;
    magic[0] = 'X';
    CHECK_THROWS_AS(from_bytes(magic), FormatError);
    std::string version = bytes;
    version[4] = 2;
    CHECK_THROWS_AS(from_bytes(version), FormatError);
    CHECK_THROWS_AS(from_bytes(bytes + "x"), FormatError);
}

TEST_CASE("canonical flags a set that is not unit norm")
{
    const auto s = rounded_to_float(testing::random_set(4, 3, 2));
    std::string bytes = canonical_bytes(s);
    bytes[8] = 1;
    CHECK_THROWS_AS(from_bytes(bytes), FormatError);
}

TEST_CASE("invariants")
{
    CHECK_THROWS_AS(EmbeddingSet({}, EmbeddingSet::Matrix(0, 3)), InvariantError);
    CHECK_THROWS_AS(EmbeddingSet({"a"}, EmbeddingSet::Matrix(1, 0)), InvariantError);
    CHECK_THROWS_AS(EmbeddingSet({""}, EmbeddingSet::Matrix::Ones(1, 2)), InvariantError);
    EmbeddingSet::Matrix nan = EmbeddingSet::Matrix::Ones(1, 2);
    nan(0, 1) = std::nan("");
    CHECK_THROWS_AS(EmbeddingSet({"a"}, nan), InvariantError);
    CHECK_THROWS_AS(EmbeddingSet({"a", "b"}, EmbeddingSet::Matrix::Ones(1, 2)), InvariantError);
    CHECK_THROWS_AS(EmbeddingSet({"a"}, EmbeddingSet::Matrix::Ones(1, 2), true), InvariantError);
}

TEST_CASE("lookup")
{
    const auto s = from_text("2 1\nApple 1\napple 2\n");
    CHECK(s.index_of("apple") == 1);
    CHECK(s.index_of("Apple") == 0);
    CHECK_FALSE(s.find("APPLE").has_value());
    CHECK_THROWS_AS(s.index_of("pear"), UnknownTokenError);
    CHECK(s.ref("apple") == TokenRef{1, "apple"});
    CHECK(s.contains(TokenRef{0, "Apple"}));
    CHECK_FALSE(s.contains(TokenRef{0, "apple"}));
    CHECK_FALSE(s.contains(TokenRef{5, "apple"}));
}

TEST_CASE("l2_normalize")
{
    const auto s = l2_normalize(from_text("1 2\na 3 4\n"));
    CHECK(s.normalized());
    CHECK(s.row(0)(0) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(s.row(0)(1) == doctest::Approx(0.8).epsilon(1e-15));

    const auto r = l2_normalize(testing::random_set(20, 8, 3));
    for (std::size_t k = 0; k < r.size(); ++k) {
        CHECK(std::abs(r.row(k).norm() - 1.0) <= 1e-6);
    }
    const auto twice = l2_normalize(r);
    CHECK((twice.matrix() - r.matrix()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(twice.tokens() == r.tokens());

    try {
        l2_normalize(from_text("2 2\na 1 0\nz 0 0\n"));
        FAIL("expected DegenerateVectorError");
    } catch (const DegenerateVectorError& e) {
        CHECK(std::string(e.what()).find("'z'") != std::string::npos);
    }
}

}
