#ifndef NEWSUM_ERROR_HPP
#define NEWSUM_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace newsum {

// Error taxonomy shared by the whole library. The C API and the CLI map
// these onto status codes / exit codes.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Argument outside the mathematical domain of an operation (x <= 0 for ln,
// b >= min{a,x} for the remainder bound, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

// Structurally invalid request (bad precision, K < 0, duplicate nodes, ...).
class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what) : Error(what) {}
};

// Unknown registry name or parameter.
class NotFoundError : public Error {
public:
    explicit NotFoundError(const std::string& what) : Error(what) {}
};

// Expression syntax error; carries the byte offset and the token kinds that
// would have been accepted at that position.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset,
               std::vector<std::string> expected)
        : Error(what), offset_(offset), expected_(std::move(expected)) {}

    std::size_t offset() const { return offset_; }
    const std::vector<std::string>& expected() const { return expected_; }

private:
    std::size_t offset_;
    std::vector<std::string> expected_;
};

// Internal consistency failure (closed form disagreeing with the numeric
// table, oracle self-check mismatch). Not expected in normal operation.
class InternalError : public Error {
public:
    explicit InternalError(const std::string& what) : Error(what) {}
};

} // namespace newsum

#endif
