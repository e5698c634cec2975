#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cloudtrace {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input text or bytes did not match the grammar a parser expects.
class ParseError : public Error {
public:
    using Error::Error;
};

/// The tree handed to the scanner has no recognizable device layout.
class LayoutError : public Error {
public:
    using Error::Error;
};

class SqliteError : public Error {
public:
    explicit SqliteError(const std::string& what, std::optional<std::uint32_t> page = std::nullopt)
        : Error(page ? what + " (page " + std::to_string(*page) + ")" : what), page_(page) {}

    std::optional<std::uint32_t> page() const noexcept { return page_; }

private:
    std::optional<std::uint32_t> page_;
};

class MissingTableError : public SqliteError {
public:
    MissingTableError(const std::string& table, std::vector<std::string> available);

    const std::vector<std::string>& available() const noexcept { return available_; }

private:
    std::vector<std::string> available_;
};

class MissingColumnError : public Error {
public:
    MissingColumnError(const std::string& table, const std::string& column)
        : Error("table '" + table + "' has no column '" + column + "'"), column_(column) {}

    const std::string& column() const noexcept { return column_; }

private:
    std::string column_;
};

}  // namespace cloudtrace
