#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "semrheo/embedding_store.hpp"
#include "semrheo/msd.hpp"
#include "semrheo/trajectory.hpp"

namespace semrheo {

enum class SplitMode { lines, naive_punct };

struct SentenceSequence {
    std::vector<std::string> sentences;
    std::string source;
};

/// lines: one sentence per non-blank line.
/// naive_punct: break after '.', '!' or '?' when followed by whitespace and
/// then an uppercase ASCII letter or the end of the text. Abbreviations such
/// as "Mr. Smith" are split too.
/// Sentences are whitespace-trimmed. Throws EmptyDocumentError if none remain.
SentenceSequence split_sentences(std::string_view text, SplitMode mode, std::string source = {});

/// Lowercased words. Separators are every ASCII character other than
/// [A-Za-z0-9], plus Latin-1 punctuation/symbols and the General Punctuation
/// block; other non-ASCII code points count as word characters.
std::vector<std::string> tokenize(std::string_view sentence);

struct SentenceEmbedding {
    Trajectory trajectory;
    std::vector<std::size_t> used;     // sentence indices that became points
    std::vector<std::size_t> dropped;  // sentences with no in-vocabulary token
};

/// Mean embedding row of each sentence's in-vocabulary tokens.
SentenceEmbedding embed_sentences_avg(const SentenceSequence& seq, const EmbeddingSet& words);

/// Canonical file whose tokens are the ordinals "0" .. "N-1" (any order).
Trajectory load_sentence_embeddings(const EmbeddingSet& set);
Trajectory load_sentence_embeddings(std::istream& canonical);

inline constexpr std::size_t kMinDocumentSentences = 10;

/// analyze_trajectory with the document length check.
/// Throws InsufficientDataError below 10 points.
TrajectoryAnalysis analyze_document(const Trajectory& traj, const AnalysisOptions& options = {});

} // namespace semrheo
