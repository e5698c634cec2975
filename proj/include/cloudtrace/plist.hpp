#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

// Property lists in the binary ("bplist00") and XML encodings.
namespace cloudtrace::plist {

struct Date {
    double apple_seconds = 0;  ///< seconds since 2001-01-01T00:00:00Z
    std::string text;          ///< source text for XML dates; empty for binary dates
    friend bool operator==(const Date&, const Date&) = default;
};

struct Uid {
    std::uint64_t value = 0;
    friend bool operator==(const Uid&, const Uid&) = default;
};

struct Value;
using Array = std::vector<Value>;
using Dict = std::vector<std::pair<std::string, Value>>;
using Data = std::vector<std::uint8_t>;

struct Value {
    std::variant<std::monostate, bool, std::int64_t, double, Date, std::string, Data, Array, Dict, Uid> v;

    Value() = default;
    template <typename T>
    Value(T x) : v(std::move(x)) {}
    Value(const char* s) : v(std::string(s)) {}

    const Value* find(std::string_view key) const;
    const Dict* dict() const { return std::get_if<Dict>(&v); }
    const Array* array() const { return std::get_if<Array>(&v); }
    std::optional<std::string> string() const;
    std::optional<bool> boolean() const;
    std::optional<std::int64_t> integer() const;
    const Date* date() const { return std::get_if<Date>(&v); }

    friend bool operator==(const Value&, const Value&) = default;
};

/// Detects the encoding from the leading bytes. Throws ParseError.
Value parse(std::span<const std::uint8_t> bytes);
Value parse_binary(std::span<const std::uint8_t> bytes);
Value parse_xml(std::string_view document);

}  // namespace cloudtrace::plist
