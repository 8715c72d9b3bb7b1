#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "semrheo/embedding_store.hpp"
#include "semrheo/msd.hpp"
#include "semrheo/rng.hpp"

namespace testing {

inline std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed)
{
    semrheo::Rng rng(seed);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = rng.normal();
        }
    }
    return m;
}

inline std::vector<std::string> numbered_tokens(std::size_t n, const std::string& prefix = "w")
{
    std::vector<std::string> tokens;
    for (std::size_t k = 0; k < n; ++k) {
        tokens.push_back(prefix + std::to_string(k));
    }
    return tokens;
}

inline semrheo::EmbeddingSet random_set(std::size_t n, std::size_t dims, std::uint64_t seed)
{
    const Eigen::MatrixXd g = gaussian_matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dims), seed);
    return semrheo::EmbeddingSet(numbered_tokens(n), semrheo::EmbeddingSet::Matrix(g));
}

// Double loop over (i, i + n) pairs, coordinate by coordinate.
inline std::vector<double> brute_force_msd(const Eigen::MatrixXd& p)
{
    const auto n_pts = p.rows();
    std::vector<double> out;
    for (Eigen::Index n = 1; n < n_pts; ++n) {
        long double total = 0.0L;
        for (Eigen::Index i = 0; i + n < n_pts; ++i) {
            long double sq = 0.0L;
            for (Eigen::Index d = 0; d < p.cols(); ++d) {
                const long double diff = static_cast<long double>(p(i + n, d)) - p(i, d);
                sq += diff * diff;
            }
            total += sq;
        }
        out.push_back(static_cast<double>(total / static_cast<long double>(n_pts - n)));
    }
    return out;
}

inline semrheo::MsdCurve curve_from(const std::vector<double>& values)
{
    semrheo::MsdCurve c;
    const std::size_t n_points = values.size() + 1;
    for (std::size_t n = 1; n <= values.size(); ++n) {
        c.delays.push_back(n);
        c.values.push_back(values[n - 1]);
        c.counts.push_back(n_points - n);
    }
    return c;
}

// Ten tokens in 4-D. c0..c2 sit in a tight cone around e0, so each clique
// member's 3 nearest vectors (itself included) are exactly the clique. "gate"
// lies outside the cone but has two clique members among its top 3.
inline semrheo::EmbeddingSet clique_set()
{
    std::vector<std::string> tokens{"c0", "c1", "c2", "x0", "x1", "x2", "x3", "x4", "x5", "gate"};
    semrheo::EmbeddingSet::Matrix m(10, 4);
    m << 1.00, 0.05, 0.00, 0.00,
         1.00, 0.00, 0.05, 0.00,
         1.00, 0.00, 0.00, 0.05,
         0.30, 1.00, 0.00, 0.00,
         0.30, 0.00, 1.00, 0.00,
         0.30, 0.00, 0.00, 1.00,
         0.00, 1.00, 1.00, 0.00,
         0.00, 0.00, 1.00, 1.00,
         0.00, 1.00, 0.00, 1.00,
         1.00, 0.40, 0.40, 0.40;
    return semrheo::EmbeddingSet(std::move(tokens), std::move(m));
}

// Distributional word vectors built from a tokenized corpus: each word's vector
// is the sum of the hash-seeded Gaussian index vectors of its neighbours within
// `window` positions, then unit-normalized.
semrheo::EmbeddingSet random_indexing_vectors(const std::vector<std::vector<std::string>>& sentences,
                                              std::size_t dims, std::size_t window);

inline std::filesystem::path data_dir()
{
    return std::filesystem::path(SEMRHEO_DATA_DIR);
}

std::string read_file(const std::filesystem::path& path);

} // namespace testing
