#pragma once

#include <stdexcept>
#include <string>

namespace crown {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Lookup of an id that is not present in a store.
class NotFound : public Error {
public:
    using Error::Error;
};

/// Malformed input text (TSV, JSONL, qrels, run files, embeddings, topics).
/// `line()` is 1-based, 0 when the error is not tied to a line.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Binary store failures: bad magic, version mismatch, truncation, checksum.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Parameter or precondition violations.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

} // namespace crown
