#pragma once

#include <stdexcept>
#include <string>

namespace semrheo {

// Base for every error raised by the library. The CLI maps each category to
// a fixed exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input: bad headers, wrong coordinate counts, bad magic, truncation.
class FormatError : public Error {
public:
    explicit FormatError(const std::string& what) : Error("format error: " + what) {}
    FormatError(const std::string& what, std::size_t line)
        : Error("format error (line " + std::to_string(line) + "): " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_ = 0;
};

class DuplicateTokenError : public FormatError {
public:
    explicit DuplicateTokenError(const std::string& token)
        : FormatError("duplicate token '" + token + "'"), token_(token) {}

    const std::string& token() const noexcept { return token_; }

private:
    std::string token_;
};

// A type invariant would be violated (empty vocabulary, NaN coordinate, ...).
class InvariantError : public Error {
public:
    explicit InvariantError(const std::string& what) : Error("invariant violated: " + what) {}
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what) : Error("invalid argument: " + what) {}
};

class UnknownTokenError : public Error {
public:
    explicit UnknownTokenError(const std::string& token)
        : Error("unknown token '" + token + "'"), token_(token) {}

    const std::string& token() const noexcept { return token_; }

private:
    std::string token_;
};

// Zero-norm vector where a direction is required.
class DegenerateVectorError : public Error {
public:
    explicit DegenerateVectorError(const std::string& what)
        : Error("degenerate (zero) vector: " + what) {}
};

class EmptyPoolError : public Error {
public:
    EmptyPoolError() : Error("no candidates left after exclusion") {}
};

class InsufficientDataError : public Error {
public:
    explicit InsufficientDataError(const std::string& what)
        : Error("insufficient data: " + what) {}
};

// Trajectory that never moves: every MSD value is zero.
class DegenerateDataError : public Error {
public:
    explicit DegenerateDataError(const std::string& what) : Error("degenerate data: " + what) {}
};

class EmptyDocumentError : public Error {
public:
    explicit EmptyDocumentError(const std::string& what) : Error("empty document: " + what) {}
};

class UnsupportedError : public Error {
public:
    explicit UnsupportedError(const std::string& what) : Error("unsupported: " + what) {}
};

} // namespace semrheo
