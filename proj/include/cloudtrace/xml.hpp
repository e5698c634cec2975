#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Minimal non-validating XML reader: elements, attributes, text, CDATA.
// Prolog, comments, processing instructions and DOCTYPE are skipped.
namespace cloudtrace::xml {

struct Element {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attributes;
    std::vector<Element> children;
    std::string text;  ///< decoded character data directly inside this element

    std::optional<std::string_view> attribute(std::string_view key) const;
    const Element* child(std::string_view child_name) const;
};

/// Throws ParseError on malformed markup.
Element parse(std::string_view document);

}  // namespace cloudtrace::xml
