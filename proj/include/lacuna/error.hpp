#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace lacuna {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Precondition violated by a caller-supplied argument.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A sequence could not produce a finite value at some index.
class EvalError : public Error {
public:
    EvalError(const std::string& what, std::int64_t index)
        : Error(what + " (index " + std::to_string(index) + ")"), index_(index) {}

    std::int64_t index() const noexcept { return index_; }

private:
    std::int64_t index_;
};

/// Byte range [begin, end) into DSL source text.
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;

    friend bool operator==(const Span&, const Span&) = default;
};

/// A well-formed DSL tree that does not name a valid object.
class LowerError : public Error {
public:
    LowerError(const std::string& what, Span span)
        : Error(what + " at bytes [" + std::to_string(span.begin) + ", " +
                std::to_string(span.end) + ")"),
          span_(span) {}

    Span span() const noexcept { return span_; }

private:
    Span span_;
};

} // namespace lacuna
