#include <cloudtrace/error.hpp>
#include <cloudtrace/text.hpp>
#include <cloudtrace/xml.hpp>

namespace cloudtrace::xml {

namespace {

constexpr int kMaxDepth = 256;

class Reader {
public:
    explicit Reader(std::string_view doc) : s_(doc) {}

    Element document() {
        if (s_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
        skip_misc();
        if (pos_ >= s_.size() || s_[pos_] != '<') fail("missing root element");
        Element root = element(0);
        skip_misc();
        if (pos_ < s_.size()) fail("content after root element");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& why) const {
        throw ParseError("xml: " + why + " at offset " + std::to_string(pos_));
    }

    bool starts(std::string_view lit) const { return s_.substr(pos_, lit.size()) == lit; }

    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r' || s_[pos_] == '\n')) ++pos_;
    }

    void skip_past(std::string_view terminator) {
        auto end = s_.find(terminator, pos_);
        if (end == std::string_view::npos) fail("unterminated construct");
        pos_ = end + terminator.size();
    }

    void skip_doctype() {
        int brackets = 0;
        while (pos_ < s_.size()) {
            char c = s_[pos_++];
            if (c == '[') ++brackets;
            else if (c == ']') --brackets;
            else if (c == '>' && brackets <= 0) return;
        }
        fail("unterminated DOCTYPE");
    }

    // whitespace, comments, PIs and DOCTYPE outside the root
    void skip_misc() {
        for (;;) {
            skip_ws();
            if (starts("<?")) skip_past("?>");
            else if (starts("<!--")) skip_past("-->");
            else if (starts("<!DOCTYPE") || starts("<!doctype")) skip_doctype();
            else return;
        }
    }

    std::string name() {
        auto start = pos_;
        while (pos_ < s_.size()) {
            char c = s_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '/' || c == '>' || c == '=') break;
            ++pos_;
        }
        if (pos_ == start) fail("expected a name");
        return std::string(s_.substr(start, pos_ - start));
    }

    Element element(int depth) {
        if (depth > kMaxDepth) fail("nesting too deep");
        ++pos_;  // '<'
        Element el;
        el.name = name();
        for (;;) {
            skip_ws();
            if (pos_ >= s_.size()) fail("unterminated start tag");
            if (s_[pos_] == '/') {
                if (!starts("/>")) fail("malformed empty-element tag");
                pos_ += 2;
                return el;
            }
            if (s_[pos_] == '>') {
                ++pos_;
                break;
            }
            auto key = name();
            skip_ws();
            if (pos_ >= s_.size() || s_[pos_] != '=') fail("attribute without value");
            ++pos_;
            skip_ws();
            if (pos_ >= s_.size() || (s_[pos_] != '"' && s_[pos_] != '\'')) fail("unquoted attribute value");
            char q = s_[pos_++];
            auto end = s_.find(q, pos_);
            if (end == std::string_view::npos) fail("unterminated attribute value");
            el.attributes.emplace_back(std::move(key), text::decode_entities(s_.substr(pos_, end - pos_)));
            pos_ = end + 1;
        }
        // content
        for (;;) {
            if (pos_ >= s_.size()) fail("unterminated element <" + el.name + ">");
            if (starts("</")) {
                pos_ += 2;
                auto closing = name();
                if (closing != el.name) fail("mismatched </" + closing + "> for <" + el.name + ">");
                skip_ws();
                if (pos_ >= s_.size() || s_[pos_] != '>') fail("malformed end tag");
                ++pos_;
                return el;
            }
            if (starts("<!--")) {
                skip_past("-->");
            } else if (starts("<![CDATA[")) {
                pos_ += 9;
                auto end = s_.find("]]>", pos_);
                if (end == std::string_view::npos) fail("unterminated CDATA");
                el.text.append(s_.substr(pos_, end - pos_));
                pos_ = end + 3;
            } else if (starts("<?")) {
                skip_past("?>");
            } else if (s_[pos_] == '<') {
                el.children.push_back(element(depth + 1));
            } else {
                auto end = s_.find('<', pos_);
                if (end == std::string_view::npos) end = s_.size();
                el.text += text::decode_entities(s_.substr(pos_, end - pos_));
                pos_ = end;
            }
        }
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

std::optional<std::string_view> Element::attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes)
        if (k == key) return std::string_view{v};
    return std::nullopt;
}

const Element* Element::child(std::string_view child_name) const {
    for (const auto& c : children)
        if (c.name == child_name) return &c;
    return nullptr;
}

Element parse(std::string_view document) { return Reader(document).document(); }

}  // namespace cloudtrace::xml
