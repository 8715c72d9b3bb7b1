#include "semrheo/embedding_store.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "semrheo/errors.hpp"

namespace semrheo {

EmbeddingSet::EmbeddingSet(std::vector<std::string> tokens, Matrix matrix, bool normalized)
    : tokens_(std::move(tokens)), matrix_(std::move(matrix)), normalized_(normalized)
{
    if (tokens_.empty()) {
        throw InvariantError("embedding set has an empty vocabulary");
    }
    if (static_cast<std::size_t>(matrix_.rows()) != tokens_.size()) {
        throw InvariantError("matrix has " + std::to_string(matrix_.rows()) + " rows for "
                             + std::to_string(tokens_.size()) + " tokens");
    }
    if (matrix_.cols() < 1) {
        throw InvariantError("embedding dimension must be >= 1");
    }
    if (!matrix_.allFinite()) {
        throw InvariantError("embedding matrix contains a non-finite coordinate");
    }
    index_.reserve(tokens_.size());
    for (TokenIndex k = 0; k < tokens_.size(); ++k) {
        if (tokens_[k].empty()) {
            throw InvariantError("empty token at index " + std::to_string(k));
        }
        if (!index_.emplace(tokens_[k], k).second) {
            throw DuplicateTokenError(tokens_[k]);
        }
    }
    norms_ = matrix_.rowwise().norm();
    if (normalized_) {
        for (Eigen::Index k = 0; k < norms_.size(); ++k) {
            if (std::abs(norms_[k] - 1.0) > kUnitNormTolerance) {
                throw InvariantError("set flagged normalized but row '"
                                     + tokens_[static_cast<std::size_t>(k)]
                                     + "' has norm " + std::to_string(norms_[k]));
            }
        }
    }
}

std::optional<TokenIndex> EmbeddingSet::find(std::string_view token) const
{
    if (auto it = index_.find(token); it != index_.end()) {
        return it->second;
    }
    return std::nullopt;
}

TokenIndex EmbeddingSet::index_of(std::string_view token) const
{
    if (auto k = find(token)) {
        return *k;
    }
    throw UnknownTokenError(std::string(token));
}

TokenRef EmbeddingSet::ref(TokenIndex k) const
{
    if (k >= tokens_.size()) {
        throw InvalidArgument("token index " + std::to_string(k) + " out of range");
    }
    return TokenRef{k, tokens_[k]};
}

TokenRef EmbeddingSet::ref(std::string_view token) const
{
    const TokenIndex k = index_of(token);
    return TokenRef{k, tokens_[k]};
}

bool EmbeddingSet::contains(const TokenRef& ref) const noexcept
{
    return ref.index < tokens_.size() && tokens_[ref.index] == ref.token;
}

bool operator==(const EmbeddingSet& a, const EmbeddingSet& b)
{
    return a.normalized_ == b.normalized_ && a.tokens_ == b.tokens_
        && a.matrix_.rows() == b.matrix_.rows() && a.matrix_.cols() == b.matrix_.cols()
        && a.matrix_ == b.matrix_;
}

namespace {

// Splits on runs of spaces/tabs; a trailing '\r' is dropped first.
std::vector<std::string_view> split_fields(std::string_view line)
{
    if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
    }
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) {
            ++pos;
        }
        if (pos == line.size()) {
            break;
        }
        std::size_t end = pos;
        while (end < line.size() && line[end] != ' ' && line[end] != '\t') {
            ++end;
        }
        fields.push_back(line.substr(pos, end - pos));
        pos = end;
    }
    return fields;
}

double parse_coordinate(std::string_view field, std::size_t line_no)
{
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    if (!field.empty() && *first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw FormatError("non-numeric coordinate '" + std::string(field) + "'", line_no);
    }
    if (!std::isfinite(value)) {
        throw FormatError("non-finite coordinate '" + std::string(field) + "'", line_no);
    }
    return value;
}

std::size_t parse_count(std::string_view field, std::size_t line_no, const char* what)
{
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw FormatError(std::string("bad ") + what + " '" + std::string(field) + "'", line_no);
    }
    return value;
}

bool is_blank(std::string_view line)
{
    return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

struct RowReader {
    std::vector<std::string> tokens;
    std::vector<double> values;
    std::size_t dims = 0;

    void add(const std::vector<std::string_view>& fields, std::size_t line_no)
    {
        if (fields.size() != dims + 1) {
            throw FormatError("expected " + std::to_string(dims) + " coordinates, found "
                                  + std::to_string(fields.size() - 1),
                              line_no);
        }
        tokens.emplace_back(fields[0]);
        for (std::size_t d = 1; d < fields.size(); ++d) {
            values.push_back(parse_coordinate(fields[d], line_no));
        }
    }

    EmbeddingSet finish()
    {
        EmbeddingSet::Matrix matrix(static_cast<Eigen::Index>(tokens.size()),
                                    static_cast<Eigen::Index>(dims));
        std::copy(values.begin(), values.end(), matrix.data());
        return EmbeddingSet(std::move(tokens), std::move(matrix), false);
    }
};

void write_row(std::ostream& out, const EmbeddingSet& set, TokenIndex k, int digits)
{
    out << set.token(k);
    std::array<char, 64> buf{};
    for (Eigen::Index d = 0; d < set.matrix().cols(); ++d) {
        const int n = std::snprintf(buf.data(), buf.size(), "%.*g", digits,
                                    set.matrix()(static_cast<Eigen::Index>(k), d));
        out << ' ' << std::string_view(buf.data(), static_cast<std::size_t>(n));
    }
    out << '\n';
}

} // namespace

EmbeddingSet load_word2vec_text(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string_view> header;
    while (header.empty()) {
        if (!std::getline(in, line)) {
            throw FormatError("missing '<N_vocab> <D>' header");
        }
        ++line_no;
        header = split_fields(line);
    }
    if (header.size() != 2) {
        throw FormatError("header must be '<N_vocab> <D>'", line_no);
    }
    const std::size_t n_vocab = parse_count(header[0], line_no, "vocabulary size");
    RowReader reader;
    reader.dims = parse_count(header[1], line_no, "dimension");
    if (n_vocab == 0 || reader.dims == 0) {
        throw FormatError("header declares an empty set", line_no);
    }

    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) {
            continue;
        }
        if (reader.tokens.size() == n_vocab) {
            throw FormatError("more rows than the header's " + std::to_string(n_vocab), line_no);
        }
        reader.add(split_fields(line), line_no);
    }
    if (reader.tokens.size() != n_vocab) {
        throw FormatError("header declares " + std::to_string(n_vocab) + " rows, found "
                          + std::to_string(reader.tokens.size()));
    }
    return reader.finish();
}

EmbeddingSet load_glove_text(std::istream& in, std::size_t dims)
{
    if (dims == 0) {
        throw InvalidArgument("dims must be >= 1");
    }
    RowReader reader;
    reader.dims = dims;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) {
            continue;
        }
        reader.add(split_fields(line), line_no);
    }
    if (reader.tokens.empty()) {
        throw FormatError("no embedding rows");
    }
    return reader.finish();
}

void save_word2vec_text(const EmbeddingSet& set, std::ostream& out, int significant_digits)
{
    out << set.size() << ' ' << set.dims() << '\n';
    for (TokenIndex k = 0; k < set.size(); ++k) {
        write_row(out, set, k, significant_digits);
    }
}

void save_glove_text(const EmbeddingSet& set, std::ostream& out, int significant_digits)
{
    for (TokenIndex k = 0; k < set.size(); ++k) {
        write_row(out, set, k, significant_digits);
    }
}

namespace {

constexpr std::array<char, 4> kMagic{'S', 'E', 'M', 'B'};

template <typename UInt>
void put_le(std::ostream& out, UInt value)
{
    std::array<char, sizeof(UInt)> bytes{};
    for (std::size_t b = 0; b < sizeof(UInt); ++b) {
        bytes[b] = static_cast<char>((value >> (8 * b)) & 0xFF);
    }
    out.write(bytes.data(), bytes.size());
}

template <typename UInt>
UInt get_le(std::istream& in, const char* what)
{
    std::array<unsigned char, sizeof(UInt)> bytes{};
    if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
        throw FormatError(std::string("truncated stream reading ") + what);
    }
    UInt value = 0;
    for (std::size_t b = 0; b < sizeof(UInt); ++b) {
        value |= static_cast<UInt>(bytes[b]) << (8 * b);
    }
    return value;
}

bool valid_utf8(std::string_view s)
{
    std::size_t i = 0;
    while (i < s.size()) {
        const auto c = static_cast<unsigned char>(s[i]);
        std::size_t len = 0;
        std::uint32_t cp = 0;
        if (c < 0x80) {
            ++i;
            continue;
        }
        if ((c & 0xE0) == 0xC0) {
            len = 2;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + len > s.size()) {
            return false;
        }
        for (std::size_t j = 1; j < len; ++j) {
            const auto cc = static_cast<unsigned char>(s[i + j]);
            if ((cc & 0xC0) != 0x80) {
                return false;
            }
            cp = (cp << 6) | (cc & 0x3F);
        }
        // overlong forms, surrogates, out of range
        if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000)
            || (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) {
            return false;
        }
        i += len;
    }
    return true;
}

std::string read_token(std::istream& in, std::uint32_t length)
{
    // Grow in chunks so a corrupted length fails on truncation instead of
    // attempting a huge allocation up front.
    constexpr std::size_t kChunk = 4096;
    std::string token;
    std::size_t remaining = length;
    while (remaining > 0) {
        const std::size_t take = std::min(remaining, kChunk);
        const std::size_t old = token.size();
        token.resize(old + take);
        if (!in.read(token.data() + old, static_cast<std::streamsize>(take))) {
            throw FormatError("truncated stream reading token bytes");
        }
        remaining -= take;
    }
    return token;
}

} // namespace

void save_canonical(const EmbeddingSet& set, std::ostream& out)
{
    // The constructor already rejects empty sets; this guards moved-from or
    // otherwise hollow instances.
    if (set.size() == 0 || set.dims() == 0) {
        throw InvariantError("cannot save an empty embedding set");
    }
    if (set.dims() > std::numeric_limits<std::uint32_t>::max()) {
        throw InvariantError("dimension does not fit the canonical header");
    }
    out.write(kMagic.data(), kMagic.size());
    put_le<std::uint32_t>(out, kCanonicalVersion);
    put_le<std::uint32_t>(out, set.normalized() ? 1U : 0U);
    put_le<std::uint64_t>(out, set.size());
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(set.dims()));
    for (const auto& token : set.tokens()) {
        if (token.size() > std::numeric_limits<std::uint32_t>::max()) {
            throw InvariantError("token longer than 4 GiB");
        }
        put_le<std::uint32_t>(out, static_cast<std::uint32_t>(token.size()));
        out.write(token.data(), static_cast<std::streamsize>(token.size()));
    }
    const auto& m = set.matrix();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const auto f = static_cast<float>(m(r, c));
            if (!std::isfinite(f)) {
                throw InvariantError("coordinate overflows binary32");
            }
            put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(f));
        }
    }
    if (!out) {
        throw Error("write failed while saving canonical embedding set");
    }
}

EmbeddingSet load_canonical(std::istream& in)
{
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), magic.size())) {
        throw FormatError("truncated stream reading magic");
    }
    if (magic != kMagic) {
        throw FormatError("bad magic bytes");
    }
    const auto version = get_le<std::uint32_t>(in, "version");
    if (version != kCanonicalVersion) {
        throw FormatError("unsupported version " + std::to_string(version));
    }
    const auto flags = get_le<std::uint32_t>(in, "flags");
    if ((flags & ~1U) != 0) {
        throw FormatError("unknown flag bits set");
    }
    const auto n_vocab = get_le<std::uint64_t>(in, "vocabulary size");
    const auto dims = get_le<std::uint32_t>(in, "dimension");
    if (n_vocab == 0 || dims == 0) {
        throw FormatError("empty vocabulary or zero dimension");
    }

    std::vector<std::string> tokens;
    tokens.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(n_vocab, 1U << 20)));
    for (std::uint64_t k = 0; k < n_vocab; ++k) {
        const auto length = get_le<std::uint32_t>(in, "token length");
        std::string token = read_token(in, length);
        if (token.empty()) {
            throw FormatError("empty token at index " + std::to_string(k));
        }
        if (!valid_utf8(token)) {
            throw FormatError("token at index " + std::to_string(k) + " is not valid UTF-8");
        }
        tokens.push_back(std::move(token));
    }

    std::vector<double> values;
    const std::uint64_t total = n_vocab * dims;
    if (total / dims != n_vocab) {
        throw FormatError("matrix size overflows");
    }
    values.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(total, 1U << 24)));
    for (std::uint64_t i = 0; i < total; ++i) {
        const auto bits = get_le<std::uint32_t>(in, "matrix");
        const auto f = std::bit_cast<float>(bits);
        if (!std::isfinite(f)) {
            throw FormatError("non-finite coordinate in matrix");
        }
        values.push_back(static_cast<double>(f));
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw FormatError("trailing bytes after matrix");
    }

    EmbeddingSet::Matrix matrix(static_cast<Eigen::Index>(n_vocab), static_cast<Eigen::Index>(dims));
    std::copy(values.begin(), values.end(), matrix.data());
    try {
        return EmbeddingSet(std::move(tokens), std::move(matrix), (flags & 1U) != 0);
    } catch (const DuplicateTokenError&) {
        throw;
    } catch (const InvariantError& e) {
        throw FormatError(e.what());
    }
}

void save_canonical_file(const EmbeddingSet& set, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot open '" + path.string() + "' for writing");
    }
    save_canonical(set, out);
}

EmbeddingSet load_canonical_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open '" + path.string() + "'");
    }
    return load_canonical(in);
}

EmbeddingSet l2_normalize(const EmbeddingSet& set)
{
    EmbeddingSet::Matrix m = set.matrix();
    for (Eigen::Index k = 0; k < m.rows(); ++k) {
        const double norm = set.row_norms()[k];
        if (norm == 0.0) {
            throw DegenerateVectorError("token '" + set.token(static_cast<TokenIndex>(k)) + "'");
        }
        m.row(k) /= norm;
    }
    return EmbeddingSet(set.tokens(), std::move(m), true);
}

} // namespace semrheo
