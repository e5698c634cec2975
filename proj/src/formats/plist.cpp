#include <cloudtrace/codec.hpp>
#include <cloudtrace/error.hpp>
#include <cloudtrace/plist.hpp>
#include <cloudtrace/text.hpp>
#include <cloudtrace/timestamp.hpp>
#include <cloudtrace/xml.hpp>

#include <cstring>
#include <unordered_set>

namespace cloudtrace::plist {

namespace {

constexpr std::size_t kTrailerSize = 32;
constexpr int kMaxDepth = 512;

std::uint64_t read_be(std::span<const std::uint8_t> b, std::size_t pos, std::size_t width) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < width; ++i) v = (v << 8) | b[pos + i];
    return v;
}

class BinaryReader {
public:
    explicit BinaryReader(std::span<const std::uint8_t> b) : b_(b) {
        if (b_.size() < 8 + kTrailerSize || std::memcmp(b_.data(), "bplist0", 7) != 0)
            throw ParseError("bplist: missing header");
        auto t = b_.size() - kTrailerSize;
        offset_size_ = b_[t + 6];
        ref_size_ = b_[t + 7];
        count_ = read_be(b_, t + 8, 8);
        top_ = read_be(b_, t + 16, 8);
        table_ = read_be(b_, t + 24, 8);
        if (offset_size_ < 1 || offset_size_ > 8 || ref_size_ < 1 || ref_size_ > 8)
            throw ParseError("bplist: invalid trailer widths");
        if (count_ == 0 || top_ >= count_ || table_ < 8 || table_ > t || count_ > (t - table_) / offset_size_)
            throw ParseError("bplist: invalid trailer");
    }

    Value root() { return object(top_, 0); }

private:
    std::size_t offset_of(std::uint64_t ref) const {
        if (ref >= count_) throw ParseError("bplist: object reference out of range");
        auto off = read_be(b_, table_ + ref * offset_size_, offset_size_);
        if (off < 8 || off >= table_) throw ParseError("bplist: object offset out of range");
        return static_cast<std::size_t>(off);
    }

    void need(std::size_t pos, std::uint64_t len) const {
        if (pos > table_ || len > table_ - pos) throw ParseError("bplist: object overruns object area");
    }

    // count from the low nibble, or from a following integer object when the nibble is 0xF
    std::uint64_t length(std::size_t& pos, std::uint8_t marker) const {
        std::uint64_t n = marker & 0x0F;
        if (n != 0x0F) return n;
        need(pos, 1);
        auto m = b_[pos++];
        if ((m & 0xF0) != 0x10) throw ParseError("bplist: malformed length");
        std::size_t w = std::size_t{1} << (m & 0x0F);
        if (w > 8) throw ParseError("bplist: malformed length");
        need(pos, w);
        n = read_be(b_, pos, w);
        pos += w;
        return n;
    }

    Value object(std::uint64_t ref, int depth) {
        if (depth > kMaxDepth) throw ParseError("bplist: nesting too deep");
        if (!active_.insert(ref).second) throw ParseError("bplist: reference cycle");
        struct Release {
            std::unordered_set<std::uint64_t>& set;
            std::uint64_t ref;
            ~Release() { set.erase(ref); }
        } release{active_, ref};

        std::size_t pos = offset_of(ref);
        auto marker = b_[pos++];
        auto hi = marker >> 4;
        switch (hi) {
            case 0x0:
                if (marker == 0x00) return Value{};
                if (marker == 0x08) return Value{false};
                if (marker == 0x09) return Value{true};
                throw ParseError("bplist: unsupported singleton marker");
            case 0x1: {
                std::size_t w = std::size_t{1} << (marker & 0x0F);
                if (w > 16) throw ParseError("bplist: integer too wide");
                need(pos, w);
                // 16-byte integers: keep the low 64 bits
                auto v = read_be(b_, pos + (w > 8 ? w - 8 : 0), w > 8 ? 8 : w);
                if (w == 8 || w == 16) return Value{static_cast<std::int64_t>(v)};
                return Value{static_cast<std::int64_t>(v)};
            }
            case 0x2: {
                std::size_t w = std::size_t{1} << (marker & 0x0F);
                need(pos, w);
                if (w == 4) {
                    auto bits = static_cast<std::uint32_t>(read_be(b_, pos, 4));
                    float f;
                    std::memcpy(&f, &bits, 4);
                    return Value{static_cast<double>(f)};
                }
                if (w == 8) {
                    auto bits = read_be(b_, pos, 8);
                    double d;
                    std::memcpy(&d, &bits, 8);
                    return Value{d};
                }
                throw ParseError("bplist: unsupported real width");
            }
            case 0x3: {
                need(pos, 8);
                auto bits = read_be(b_, pos, 8);
                double d;
                std::memcpy(&d, &bits, 8);
                return Value{Date{d, {}}};
            }
            case 0x4: {
                auto n = length(pos, marker);
                need(pos, n);
                return Value{Data(b_.begin() + pos, b_.begin() + pos + n)};
            }
            case 0x5: {
                auto n = length(pos, marker);
                need(pos, n);
                return Value{std::string(reinterpret_cast<const char*>(&b_[pos]), n)};
            }
            case 0x6: {
                auto n = length(pos, marker);
                if (n > table_) throw ParseError("bplist: string length out of range");
                need(pos, n * 2);
                return Value{utf16be(pos, n)};
            }
            case 0x8: {
                std::size_t w = (marker & 0x0F) + 1;
                need(pos, w);
                return Value{Uid{read_be(b_, pos, w)}};
            }
            case 0xA: {
                auto n = length(pos, marker);
                if (n > count_) throw ParseError("bplist: array length out of range");
                need(pos, n * ref_size_);
                Array arr;
                arr.reserve(n);
                for (std::uint64_t i = 0; i < n; ++i) arr.push_back(object(read_be(b_, pos + i * ref_size_, ref_size_), depth + 1));
                return Value{std::move(arr)};
            }
            case 0xD: {
                auto n = length(pos, marker);
                if (n > count_) throw ParseError("bplist: dict size out of range");
                need(pos, n * 2 * ref_size_);
                Dict dict;
                dict.reserve(n);
                for (std::uint64_t i = 0; i < n; ++i) {
                    auto key = object(read_be(b_, pos + i * ref_size_, ref_size_), depth + 1).string();
                    if (!key) throw ParseError("bplist: non-string dictionary key");
                    auto val = object(read_be(b_, pos + (n + i) * ref_size_, ref_size_), depth + 1);
                    dict.emplace_back(std::move(*key), std::move(val));
                }
                return Value{std::move(dict)};
            }
            default:
                throw ParseError("bplist: unsupported object marker " + std::to_string(marker));
        }
    }

    std::string utf16be(std::size_t pos, std::uint64_t units) const {
        std::string out;
        for (std::uint64_t i = 0; i < units; ++i) {
            std::uint32_t cp = read_be(b_, pos + i * 2, 2);
            if (cp >= 0xD800 && cp <= 0xDBFF && i + 1 < units) {
                std::uint32_t lo = read_be(b_, pos + (i + 1) * 2, 2);
                if (lo >= 0xDC00 && lo <= 0xDFFF) {
                    cp = 0x10000 + ((cp - 0xD800) << 10) + (lo - 0xDC00);
                    ++i;
                }
            }
            if (cp < 0x80) {
                out.push_back(static_cast<char>(cp));
            } else if (cp < 0x800) {
                out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
                out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
            } else if (cp < 0x10000) {
                out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
                out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
                out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
            } else {
                out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
                out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
                out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
                out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
            }
        }
        return out;
    }

    std::span<const std::uint8_t> b_;
    std::uint8_t offset_size_ = 0;
    std::uint8_t ref_size_ = 0;
    std::uint64_t count_ = 0;
    std::uint64_t top_ = 0;
    std::uint64_t table_ = 0;
    std::unordered_set<std::uint64_t> active_;
};

Value from_xml(const xml::Element& el, int depth) {
    if (depth > kMaxDepth) throw ParseError("plist: nesting too deep");
    const auto& n = el.name;
    if (n == "string") return Value{el.text};
    if (n == "true") return Value{true};
    if (n == "false") return Value{false};
    if (n == "integer") {
        auto v = text::parse_int(el.text);
        if (!v) throw ParseError("plist: bad <integer> '" + el.text + "'");
        return Value{*v};
    }
    if (n == "real") {
        auto v = text::parse_double(el.text);
        if (!v) throw ParseError("plist: bad <real> '" + el.text + "'");
        return Value{*v};
    }
    if (n == "date") {
        auto raw = std::string(text::trim(el.text));
        auto ts = parse_iso8601(raw);
        constexpr std::int64_t kAppleEpoch = 978307200;
        return Value{Date{static_cast<double>(ts.utc_instant.time_since_epoch().count() - kAppleEpoch), raw}};
    }
    if (n == "data") {
        auto bytes = codec::base64_decode(el.text);
        if (!bytes) throw ParseError("plist: bad base64 in <data>");
        return Value{std::move(*bytes)};
    }
    if (n == "array") {
        Array arr;
        for (const auto& c : el.children) arr.push_back(from_xml(c, depth + 1));
        return Value{std::move(arr)};
    }
    if (n == "dict") {
        Dict dict;
        for (std::size_t i = 0; i < el.children.size(); ++i) {
            if (el.children[i].name != "key") throw ParseError("plist: expected <key> in <dict>");
            if (i + 1 >= el.children.size()) throw ParseError("plist: <key> without value");
            dict.emplace_back(el.children[i].text, from_xml(el.children[i + 1], depth + 1));
            ++i;
        }
        return Value{std::move(dict)};
    }
    throw ParseError("plist: unknown element <" + n + ">");
}

}  // namespace

const Value* Value::find(std::string_view key) const {
    if (auto d = dict())
        for (const auto& [k, val] : *d)
            if (k == key) return &val;
    return nullptr;
}

std::optional<std::string> Value::string() const {
    if (auto s = std::get_if<std::string>(&v)) return *s;
    return std::nullopt;
}

std::optional<bool> Value::boolean() const {
    if (auto b = std::get_if<bool>(&v)) return *b;
    return std::nullopt;
}

std::optional<std::int64_t> Value::integer() const {
    if (auto i = std::get_if<std::int64_t>(&v)) return *i;
    return std::nullopt;
}

Value parse_binary(std::span<const std::uint8_t> bytes) { return BinaryReader(bytes).root(); }

Value parse_xml(std::string_view document) {
    auto root = xml::parse(document);
    if (root.name != "plist") return from_xml(root, 0);
    if (root.children.size() != 1) throw ParseError("plist: <plist> must hold exactly one value");
    return from_xml(root.children.front(), 0);
}

Value parse(std::span<const std::uint8_t> bytes) {
    if (bytes.size() >= 6 && std::memcmp(bytes.data(), "bplist", 6) == 0) return parse_binary(bytes);
    return parse_xml(text::as_chars(bytes));
}

}  // namespace cloudtrace::plist
