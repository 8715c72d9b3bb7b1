#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace semrheo {

using TokenIndex = std::size_t;

/// Index into an EmbeddingSet together with the token it names.
struct TokenRef {
    TokenIndex index = 0;
    std::string token;

    friend bool operator==(const TokenRef&, const TokenRef&) = default;
};

/// Vocabulary plus one embedding row per token.
///
/// Immutable after construction; the constructor enforces the invariants
/// (distinct non-empty tokens, finite coordinates, unit rows when flagged
/// normalized). Coordinates are held at double precision.
class EmbeddingSet {
public:
    using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    /// Absolute tolerance on | ||row|| - 1 | for a set flagged normalized.
    static constexpr double kUnitNormTolerance = 1e-6;

    EmbeddingSet(std::vector<std::string> tokens, Matrix matrix, bool normalized = false);

    std::size_t size() const noexcept { return tokens_.size(); }
    std::size_t dims() const noexcept { return static_cast<std::size_t>(matrix_.cols()); }
    bool normalized() const noexcept { return normalized_; }

    const std::vector<std::string>& tokens() const noexcept { return tokens_; }
    const Matrix& matrix() const noexcept { return matrix_; }
    const Eigen::VectorXd& row_norms() const noexcept { return norms_; }

    auto row(TokenIndex k) const { return matrix_.row(static_cast<Eigen::Index>(k)); }
    const std::string& token(TokenIndex k) const { return tokens_.at(k); }

    /// Exact, case-sensitive lookup.
    std::optional<TokenIndex> find(std::string_view token) const;

    /// Throws UnknownTokenError when absent.
    TokenIndex index_of(std::string_view token) const;

    TokenRef ref(TokenIndex k) const;
    TokenRef ref(std::string_view token) const;

    /// True when ref.index is in range and names ref.token.
    bool contains(const TokenRef& ref) const noexcept;

    friend bool operator==(const EmbeddingSet& a, const EmbeddingSet& b);

private:
    struct StringHash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const noexcept
        {
            return std::hash<std::string_view>{}(s);
        }
    };

    std::vector<std::string> tokens_;
    Matrix matrix_;
    Eigen::VectorXd norms_;
    bool normalized_ = false;
    std::unordered_map<std::string, TokenIndex, StringHash, std::equal_to<>> index_;
};

// Text formats. Both accept "\n" and "\r\n" line endings.

/// "<N> <D>" header, then N lines "<token> <D numbers>".
EmbeddingSet load_word2vec_text(std::istream& in);

/// Headerless "<token> <dims numbers>" lines.
EmbeddingSet load_glove_text(std::istream& in, std::size_t dims);

/// Writers print each coordinate with `significant_digits` significant digits.
void save_word2vec_text(const EmbeddingSet& set, std::ostream& out, int significant_digits = 9);
void save_glove_text(const EmbeddingSet& set, std::ostream& out, int significant_digits = 9);

// Canonical binary format (all integers little-endian):
//   "SEMB" | u32 version = 1 | u32 flags (bit 0 = normalized) | u64 N | u32 D
//   | N x (u32 byte length, UTF-8 bytes) | N*D IEEE-754 binary32, row-major

inline constexpr std::uint32_t kCanonicalVersion = 1;

void save_canonical(const EmbeddingSet& set, std::ostream& out);
EmbeddingSet load_canonical(std::istream& in);

void save_canonical_file(const EmbeddingSet& set, const std::filesystem::path& path);
EmbeddingSet load_canonical_file(const std::filesystem::path& path);

/// Scales every row to unit L2 norm. Throws DegenerateVectorError naming the
/// first zero row.
EmbeddingSet l2_normalize(const EmbeddingSet& set);

} // namespace semrheo
