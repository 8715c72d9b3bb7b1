#include "semrheo/document.hpp"

#include <algorithm>
#include <charconv>
#include <istream>

#include "semrheo/errors.hpp"

namespace semrheo {

namespace {

bool is_space(char c)
{
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }

std::string_view trim(std::string_view s)
{
    while (!s.empty() && is_space(s.front())) {
        s.remove_prefix(1);
    }
    while (!s.empty() && is_space(s.back())) {
        s.remove_suffix(1);
    }
    return s;
}

void push_trimmed(std::vector<std::string>& out, std::string_view s)
{
    s = trim(s);
    if (!s.empty()) {
        out.emplace_back(s);
    }
}

// Decodes one UTF-8 sequence at s[i]; malformed bytes decode as themselves.
char32_t decode(std::string_view s, std::size_t& i)
{
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    char32_t cp = c;
    if ((c & 0xE0) == 0xC0) {
        len = 2;
        cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
        len = 3;
        cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
        len = 4;
        cp = c & 0x07;
    }
    if (len == 1 || i + len > s.size()) {
        ++i;
        return c;
    }
    for (std::size_t j = 1; j < len; ++j) {
        const auto cc = static_cast<unsigned char>(s[i + j]);
        if ((cc & 0xC0) != 0x80) {
            ++i;
            return c;
        }
        cp = (cp << 6) | (cc & 0x3F);
    }
    i += len;
    return cp;
}

bool is_word_char(char32_t cp)
{
    if (cp < 0x80) {
        return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9');
    }
    if (cp >= 0x80 && cp <= 0xBF) {
        return false;  // C1 controls, NBSP, Latin-1 punctuation and symbols
    }
    if (cp == 0xD7 || cp == 0xF7) {
        return false;  // multiplication / division signs
    }
    if (cp >= 0x2000 && cp <= 0x206F) {
        return false;  // General Punctuation: dashes, curly quotes, ellipsis
    }
    return true;
}

} // namespace

SentenceSequence split_sentences(std::string_view text, SplitMode mode, std::string source)
{
    SentenceSequence seq;
    seq.source = std::move(source);
    if (mode == SplitMode::lines) {
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const std::size_t end = std::min(text.find('\n', pos), text.size());
            push_trimmed(seq.sentences, text.substr(pos, end - pos));
            pos = end + 1;
        }
    } else {
        std::size_t start = 0;
        for (std::size_t p = 0; p < text.size(); ++p) {
            const char c = text[p];
            if (c != '.' && c != '!' && c != '?') {
                continue;
            }
            std::size_t q = p + 1;
            bool boundary = q == text.size();
            if (!boundary && is_space(text[q])) {
                while (q < text.size() && is_space(text[q])) {
                    ++q;
                }
                boundary = q == text.size() || is_upper(text[q]);
            }
            if (boundary) {
                push_trimmed(seq.sentences, text.substr(start, p + 1 - start));
                start = p + 1;
            }
        }
        if (start < text.size()) {
            push_trimmed(seq.sentences, text.substr(start));
        }
    }
    if (seq.sentences.empty()) {
        throw EmptyDocumentError("no sentences found");
    }
    return seq;
}

std::vector<std::string> tokenize(std::string_view sentence)
{
    std::vector<std::string> words;
    std::string current;
    std::size_t i = 0;
    while (i < sentence.size()) {
        const std::size_t begin = i;
        const char32_t cp = decode(sentence, i);
        if (is_word_char(cp)) {
            if (cp < 0x80) {
                const auto ch = static_cast<char>(cp);
                current.push_back(is_upper(ch) ? static_cast<char>(ch - 'A' + 'a') : ch);
            } else {
                current.append(sentence.substr(begin, i - begin));
            }
        } else if (!current.empty()) {
            words.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        words.push_back(std::move(current));
    }
    return words;
}

SentenceEmbedding embed_sentences_avg(const SentenceSequence& seq, const EmbeddingSet& words)
{
    const auto dims = static_cast<Eigen::Index>(words.dims());
    std::vector<Eigen::VectorXd> rows;
    std::vector<std::size_t> used;
    std::vector<std::size_t> dropped;
    for (std::size_t s = 0; s < seq.sentences.size(); ++s) {
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(dims);
        std::size_t hits = 0;
        for (const auto& w : tokenize(seq.sentences[s])) {
            if (auto k = words.find(w)) {
                sum += words.row(*k).transpose();
                ++hits;
            }
        }
        if (hits == 0) {
            dropped.push_back(s);
            continue;
        }
        rows.push_back(sum / static_cast<double>(hits));
        used.push_back(s);
    }
    if (rows.empty()) {
        throw EmptyDocumentError("no sentence contains an in-vocabulary token");
    }
    Trajectory::Matrix points(static_cast<Eigen::Index>(rows.size()), dims);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        points.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
    }
    return SentenceEmbedding{Trajectory(std::move(points), Provenance::document), std::move(used),
                             std::move(dropped)};
}

Trajectory load_sentence_embeddings(const EmbeddingSet& set)
{
    const std::size_t n = set.size();
    std::vector<TokenIndex> row_of(n, n);
    for (TokenIndex k = 0; k < n; ++k) {
        const std::string& tok = set.token(k);
        std::size_t ordinal = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), ordinal);
        const bool canonical_digits = tok.size() == 1 || tok.front() != '0';
        if (ec != std::errc() || ptr != tok.data() + tok.size() || !canonical_digits) {
            throw FormatError("sentence token '" + tok + "' is not a decimal ordinal");
        }
        if (ordinal >= n) {
            throw FormatError("sentence ordinals are not contiguous from 0 (found " + tok
                              + " in a set of " + std::to_string(n) + ")");
        }
        row_of[ordinal] = k;
    }
    Trajectory::Matrix points(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(set.dims()));
    for (std::size_t i = 0; i < n; ++i) {
        points.row(static_cast<Eigen::Index>(i)) = set.row(row_of[i]);
    }
    return Trajectory(std::move(points), Provenance::document);
}

Trajectory load_sentence_embeddings(std::istream& canonical)
{
    return load_sentence_embeddings(load_canonical(canonical));
}

TrajectoryAnalysis analyze_document(const Trajectory& traj, const AnalysisOptions& options)
{
    if (static_cast<std::size_t>(traj.size()) < kMinDocumentSentences) {
        throw InsufficientDataError("document analysis needs at least "
                                    + std::to_string(kMinDocumentSentences) + " sentences, have "
                                    + std::to_string(traj.size()));
    }
    return analyze_trajectory(traj, options);
}

} // namespace semrheo
