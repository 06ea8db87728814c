#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dytag {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input record. row is 1-based over data rows (header excluded).
class ParseError : public Error {
public:
    ParseError(std::size_t row, const std::string& what)
        : Error("row " + std::to_string(row) + ": " + what), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class DanglingEndpointError : public Error {
public:
    explicit DanglingEndpointError(std::string node_id, std::size_t row = 0)
        : Error("edge endpoint \"" + node_id + "\" is not a registered node"
                + (row ? " (row " + std::to_string(row) + ")" : std::string{})),
          node_id_(std::move(node_id)) {}
    const std::string& node_id() const noexcept { return node_id_; }

private:
    std::string node_id_;
};

class DuplicateNodeError : public Error {
public:
    explicit DuplicateNodeError(const std::string& node_id)
        : Error("duplicate node_id \"" + node_id + "\"") {}
};

class BipartiteViolation : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Numerical failure (degenerate fit, eigensolver breakdown).
class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace dytag
