#pragma once

#include <stdexcept>
#include <string>

namespace kgalign {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A precondition on an argument was violated (bad dimension, out-of-range
/// index, malformed configuration, ...).
class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what) : Error(what) {}
};

/// Two vectors (or a vector and a space) disagree on dimension.
class DimensionMismatch : public InvalidArgument {
public:
    explicit DimensionMismatch(const std::string& what) : InvalidArgument(what) {}
};

/// Cosine similarity requested against a zero vector.
class UndefinedSimilarity : public Error {
public:
    explicit UndefinedSimilarity(const std::string& what) : Error(what) {}
};

/// A symbol or keyword name was not found in a VSA space.
class MissingSymbol : public Error {
public:
    explicit MissingSymbol(const std::string& what) : Error(what) {}
};

/// A knowledge-graph file failed to parse or violated the schema.
class KgParseError : public Error {
public:
    explicit KgParseError(const std::string& what) : Error(what) {}
};

/// A triplet referenced an entity or relation name that does not exist.
class UnknownName : public Error {
public:
    explicit UnknownName(const std::string& what) : Error(what) {}
};

/// The same triplet was asserted twice.
class DuplicateTriplet : public Error {
public:
    explicit DuplicateTriplet(const std::string& what) : Error(what) {}
};

/// An IDX dataset file was malformed.
class IdxError : public Error {
public:
    enum class Kind { WrongMagic, Truncated, CountMismatch, BadShape, Io };

    IdxError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// Training produced a non-finite loss or gradient; carries a short
/// diagnostic snapshot of where it happened.
class TrainingDiverged : public Error {
public:
    explicit TrainingDiverged(const std::string& what) : Error(what) {}
};

} // namespace kgalign
