#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spars {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A precondition on an index, length or bound was violated.
class RangeError : public Error {
public:
    using Error::Error;
};

// Matrix/vector dimensions do not agree.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Input is degenerate for the requested operation (zero variance, zero vector, ...).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

// rk_delta of the system matrix is zero; no sparse representation exists.
class RankDeficiencyError : public Error {
public:
    using Error::Error;
};

// Training loss became non-finite.
class TrainingError : public Error {
public:
    TrainingError(const std::string& what, std::size_t epoch)
        : Error(what), epoch(epoch) {}
    std::size_t epoch;
};

// Closed-loop forecast produced a non-finite value.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, std::size_t step)
        : Error(what), step(step) {}
    std::size_t step;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

// Model file carries an unsupported format version.
class VersionError : public Error {
public:
    using Error::Error;
};

class MalformedFileError : public Error {
public:
    using Error::Error;
};

}  // namespace spars
