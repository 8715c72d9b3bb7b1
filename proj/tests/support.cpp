#include "support.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

namespace testing {

semrheo::EmbeddingSet random_indexing_vectors(const std::vector<std::vector<std::string>>& sentences,
                                              std::size_t dims, std::size_t window)
{
    std::unordered_map<std::string, std::size_t> id;
    std::vector<std::string> tokens;
    std::vector<std::vector<std::size_t>> coded;
    for (const auto& s : sentences) {
        std::vector<std::size_t> ids;
        for (const auto& w : s) {
            auto [it, inserted] = id.emplace(w, tokens.size());
            if (inserted) {
                tokens.push_back(w);
            }
            ids.push_back(it->second);
        }
        coded.push_back(std::move(ids));
    }

    const auto n = static_cast<Eigen::Index>(tokens.size());
    const auto d = static_cast<Eigen::Index>(dims);
    Eigen::MatrixXd index(n, d);
    for (Eigen::Index k = 0; k < n; ++k) {
        semrheo::Rng rng(fnv1a(tokens[static_cast<std::size_t>(k)]));
        for (Eigen::Index j = 0; j < d; ++j) {
            index(k, j) = rng.normal();
        }
    }

    semrheo::EmbeddingSet::Matrix context = semrheo::EmbeddingSet::Matrix::Zero(n, d);
    const auto w = static_cast<std::ptrdiff_t>(window);
    for (const auto& ids : coded) {
        const auto len = static_cast<std::ptrdiff_t>(ids.size());
        for (std::ptrdiff_t i = 0; i < len; ++i) {
            for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, i - w); j <= std::min(len - 1, i + w); ++j) {
                if (j != i) {
                    context.row(static_cast<Eigen::Index>(ids[static_cast<std::size_t>(i)])) +=
                        index.row(static_cast<Eigen::Index>(ids[static_cast<std::size_t>(j)]));
                }
            }
        }
    }
    for (Eigen::Index k = 0; k < n; ++k) {
        if (context.row(k).squaredNorm() == 0.0) {
            context.row(k) = index.row(k);
        }
    }
    return semrheo::l2_normalize(semrheo::EmbeddingSet(std::move(tokens), std::move(context)));
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace testing
