#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace skge {

// Base of every exception the library throws. The C API maps each subclass
// onto one status code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed text input (TSV triples). Carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Well-formed input that violates a data invariant (schema, duplicate ids,
// unknown categories, taxonomy cycles, vocabulary mismatch).
class ValidationError : public Error {
public:
    using Error::Error;
};

// Caller passed an out-of-range parameter (k, perplexity, dimension, ids).
class ParameterError : public Error {
public:
    using Error::Error;
};

// Operation not defined for the given model, e.g. transitional distance on
// matrix relations.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

// Non-finite parameter detected during training.
class NumericError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Model file could not be decoded.
class ModelFormatError : public Error {
public:
    enum class Kind { BadMagic, UnsupportedVersion, BadHeader, SizeMismatch };

    ModelFormatError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

}  // namespace skge
