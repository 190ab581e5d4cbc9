#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kaczmarz {

/// Base of every library error. `name()` is the stable identifier printed
/// by the CLI on standard error.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& what)
        : std::runtime_error(what), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class ZeroRow : public Error {
public:
    explicit ZeroRow(std::size_t row)
        : Error("ZeroRow", "row " + std::to_string(row) + " has zero norm"), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class RankDeficient : public Error {
public:
    explicit RankDeficient(const std::string& what) : Error("RankDeficient", what) {}
};

class BlockRankDeficient : public Error {
public:
    explicit BlockRankDeficient(std::size_t block)
        : Error("BlockRankDeficient",
                "partition block " + std::to_string(block) + " is not of full column rank"),
          block_(block) {}
    std::size_t block() const noexcept { return block_; }

private:
    std::size_t block_;
};

class ConvergenceFailure : public Error {
public:
    explicit ConvergenceFailure(const std::string& what) : Error("ConvergenceFailure", what) {}
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error("DomainError", what) {}
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& what) : Error("DimensionMismatch", what) {}
};

class IndexOutOfRange : public Error {
public:
    explicit IndexOutOfRange(std::size_t index, std::size_t bound)
        : Error("IndexOutOfRange", "index " + std::to_string(index) + " out of range [0, " +
                                       std::to_string(bound) + ")") {}
};

class NotSquare : public Error {
public:
    NotSquare(std::size_t rows, std::size_t cols)
        : Error("NotSquare", "matrix is " + std::to_string(rows) + "x" + std::to_string(cols) +
                                 ", expected square") {}
};

class MissingTruth : public Error {
public:
    MissingTruth() : Error("MissingTruth", "linear system has no ground-truth solution") {}
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error("ParseError", what) {}
};

}  // namespace kaczmarz
