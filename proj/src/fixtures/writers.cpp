#include <cloudtrace/error.hpp>
#include <cloudtrace/fixtures.hpp>

#include <sqlite3.h>
#include <zlib.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <memory>

namespace fs = std::filesystem;

namespace cloudtrace::fixtures {

void write_sqlite(const fs::path& path, const std::vector<std::string>& statements) {
    std::error_code ec;
    fs::remove(path, ec);
    fs::create_directories(path.parent_path());
    sqlite3* db = nullptr;
    if (sqlite3_open(path.string().c_str(), &db) != SQLITE_OK) {
        const std::string msg = db ? sqlite3_errmsg(db) : "out of memory";
        sqlite3_close(db);
        throw Error("sqlite open " + path.string() + ": " + msg);
    }
    std::string script = "BEGIN;\n";
    for (const auto& s : statements) script += s + ";\n";
    script += "COMMIT;\n";
    char* err = nullptr;
    if (sqlite3_exec(db, script.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
        const std::string msg = err ? err : "unknown";
        sqlite3_free(err);
        sqlite3_close(db);
        throw Error("sqlite exec " + path.string() + ": " + msg);
    }
    sqlite3_close(db);
}

std::string sql_text(std::string_view s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += '\'';
        out += c;
    }
    return out + "'";
}

// ---- binary plist ----
namespace {

void put_be(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
    for (int i = bytes - 1; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class BplistWriter {
public:
    std::vector<std::uint8_t> write(const plist::Value& root) {
        flatten(root);
        ref_size_ = objects_.size() < 256 ? 1 : 2;
        std::vector<std::uint8_t> out = {'b', 'p', 'l', 'i', 's', 't', '0', '0'};
        std::vector<std::uint64_t> offsets;
        for (const auto& o : objects_) {
            offsets.push_back(out.size());
            encode(*o.value, o.children, out);
        }
        const std::uint64_t table = out.size();
        int off_size = 1;
        while (off_size < 8 && table >= (std::uint64_t{1} << (8 * off_size))) off_size *= 2;
        for (auto o : offsets) put_be(out, o, off_size);
        for (int i = 0; i < 6; ++i) out.push_back(0);
        out.push_back(static_cast<std::uint8_t>(off_size));
        out.push_back(static_cast<std::uint8_t>(ref_size_));
        put_be(out, objects_.size(), 8);
        put_be(out, 0, 8);
        put_be(out, table, 8);
        return out;
    }

private:
    struct Obj {
        const plist::Value* value;
        std::vector<std::size_t> children;
    };
    std::vector<Obj> objects_;
    std::vector<std::unique_ptr<plist::Value>> key_store_;  // dictionary keys become string objects
    int ref_size_ = 1;

    std::size_t flatten(const plist::Value& v) {
        const std::size_t id = objects_.size();
        objects_.push_back({&v, {}});
        std::vector<std::size_t> kids;
        if (const auto* a = v.array()) {
            for (const auto& x : *a) kids.push_back(flatten(x));
        } else if (const auto* d = v.dict()) {
            std::vector<std::size_t> ks, vs;
            for (const auto& [k, x] : *d) {
                key_store_.push_back(std::make_unique<plist::Value>(k));
                const std::size_t kid = objects_.size();
                objects_.push_back({key_store_.back().get(), {}});
                ks.push_back(kid);
                vs.push_back(flatten(x));
            }
            kids = ks;
            kids.insert(kids.end(), vs.begin(), vs.end());
        }
        objects_[id].children = std::move(kids);
        return id;
    }

    void marker(std::vector<std::uint8_t>& out, std::uint8_t high, std::size_t count) {
        if (count < 15) {
            out.push_back(static_cast<std::uint8_t>(high | count));
            return;
        }
        out.push_back(static_cast<std::uint8_t>(high | 0x0F));
        out.push_back(0x13);
        put_be(out, count, 8);
    }

    void encode(const plist::Value& v, const std::vector<std::size_t>& kids, std::vector<std::uint8_t>& out) {
        if (const auto* b = std::get_if<bool>(&v.v)) {
            out.push_back(*b ? 0x09 : 0x08);
        } else if (const auto* i = std::get_if<std::int64_t>(&v.v)) {
            out.push_back(0x13);
            put_be(out, static_cast<std::uint64_t>(*i), 8);
        } else if (const auto* r = std::get_if<double>(&v.v)) {
            out.push_back(0x23);
            put_be(out, std::bit_cast<std::uint64_t>(*r), 8);
        } else if (const auto* d = std::get_if<plist::Date>(&v.v)) {
            out.push_back(0x33);
            put_be(out, std::bit_cast<std::uint64_t>(d->apple_seconds), 8);
        } else if (const auto* s = std::get_if<std::string>(&v.v)) {
            const bool ascii = std::all_of(s->begin(), s->end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; });
            if (ascii) {
                marker(out, 0x50, s->size());
                out.insert(out.end(), s->begin(), s->end());
            } else {
                const auto units = utf16(*s);
                marker(out, 0x60, units.size());
                for (auto u : units) put_be(out, u, 2);
            }
        } else if (const auto* data = std::get_if<plist::Data>(&v.v)) {
            marker(out, 0x40, data->size());
            out.insert(out.end(), data->begin(), data->end());
        } else if (v.array()) {
            marker(out, 0xA0, kids.size());
            for (auto k : kids) put_be(out, k, ref_size_);
        } else if (v.dict()) {
            marker(out, 0xD0, kids.size() / 2);
            for (auto k : kids) put_be(out, k, ref_size_);
        } else if (const auto* u = std::get_if<plist::Uid>(&v.v)) {
            out.push_back(0x87);
            put_be(out, u->value, 8);
        } else {
            out.push_back(0x00);
        }
    }

    static std::vector<std::uint16_t> utf16(const std::string& s) {
        std::vector<std::uint16_t> out;
        for (std::size_t i = 0; i < s.size();) {
            const auto c = static_cast<unsigned char>(s[i]);
            std::uint32_t cp;
            int len;
            if (c < 0x80) cp = c, len = 1;
            else if (c < 0xE0) cp = c & 0x1F, len = 2;
            else if (c < 0xF0) cp = c & 0x0F, len = 3;
            else cp = c & 0x07, len = 4;
            for (int k = 1; k < len && i + static_cast<std::size_t>(k) < s.size(); ++k)
                cp = (cp << 6) | (static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]) & 0x3F);
            i += static_cast<std::size_t>(len);
            if (cp >= 0x10000) {
                cp -= 0x10000;
                out.push_back(static_cast<std::uint16_t>(0xD800 + (cp >> 10)));
                out.push_back(static_cast<std::uint16_t>(0xDC00 + (cp & 0x3FF)));
            } else {
                out.push_back(static_cast<std::uint16_t>(cp));
            }
        }
        return out;
    }
};

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string iso_from_apple(double apple) {
    using namespace std::chrono;
    const sys_seconds t{seconds{static_cast<std::int64_t>(std::floor(apple)) + 978307200}};
    const auto day = floor<days>(t);
    const year_month_day ymd{day};
    const hh_mm_ss hms{t - day};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<long>(hms.hours().count()),
                  static_cast<long>(hms.minutes().count()), static_cast<long>(hms.seconds().count()));
    return buf;
}

// Kept local so fixtures do not share an encoder with the reader under test.
std::string base64(const plist::Data& d) {
    static constexpr char alphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    for (std::size_t i = 0; i < d.size(); i += 3) {
        const std::uint32_t n = (std::uint32_t{d[i]} << 16) | (i + 1 < d.size() ? std::uint32_t{d[i + 1]} << 8 : 0u) |
                                (i + 2 < d.size() ? std::uint32_t{d[i + 2]} : 0u);
        out += alphabet[n >> 18 & 63];
        out += alphabet[n >> 12 & 63];
        out += i + 1 < d.size() ? alphabet[n >> 6 & 63] : '=';
        out += i + 2 < d.size() ? alphabet[n & 63] : '=';
    }
    return out;
}

void xml_value(const plist::Value& v, int depth, std::string& out) {
    const std::string pad(static_cast<std::size_t>(depth), '\t');
    if (const auto* b = std::get_if<bool>(&v.v)) {
        out += pad + (*b ? "<true/>\n" : "<false/>\n");
    } else if (const auto* i = std::get_if<std::int64_t>(&v.v)) {
        out += pad + "<integer>" + std::to_string(*i) + "</integer>\n";
    } else if (const auto* r = std::get_if<double>(&v.v)) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", *r);
        out += pad + "<real>" + buf + "</real>\n";
    } else if (const auto* d = std::get_if<plist::Date>(&v.v)) {
        out += pad + "<date>" + (d->text.empty() ? iso_from_apple(d->apple_seconds) : d->text) + "</date>\n";
    } else if (const auto* s = std::get_if<std::string>(&v.v)) {
        out += pad + "<string>" + xml_escape(*s) + "</string>\n";
    } else if (const auto* data = std::get_if<plist::Data>(&v.v)) {
        out += pad + "<data>" + base64(*data) + "</data>\n";
    } else if (const auto* a = v.array()) {
        out += pad + "<array>\n";
        for (const auto& x : *a) xml_value(x, depth + 1, out);
        out += pad + "</array>\n";
    } else if (const auto* dict = v.dict()) {
        out += pad + "<dict>\n";
        for (const auto& [k, x] : *dict) {
            out += pad + "\t<key>" + xml_escape(k) + "</key>\n";
            xml_value(x, depth + 1, out);
        }
        out += pad + "</dict>\n";
    } else {
        out += pad + "<string></string>\n";
    }
}

}  // namespace

std::vector<std::uint8_t> binary_plist(const plist::Value& root) { return BplistWriter{}.write(root); }

std::string xml_plist(const plist::Value& root) {
    std::string out =
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<!DOCTYPE plist PUBLIC \"-//Apple//DTD PLIST 1.0//EN\" \"http://www.apple.com/DTDs/PropertyList-1.0.dtd\">\n"
        "<plist version=\"1.0\">\n";
    xml_value(root, 0, out);
    return out + "</plist>\n";
}

// ---- PNG / ENT0 ----
namespace {

void png_chunk(std::vector<std::uint8_t>& out, const char* type, const std::vector<std::uint8_t>& data) {
    put_be(out, data.size(), 4);
    std::vector<std::uint8_t> body(type, type + 4);
    body.insert(body.end(), data.begin(), data.end());
    out.insert(out.end(), body.begin(), body.end());
    put_be(out, crc32(0, body.data(), static_cast<uInt>(body.size())), 4);
}

}  // namespace

std::vector<std::uint8_t> make_png(std::uint32_t width, std::uint32_t height, std::uint32_t seed) {
    std::vector<std::uint8_t> out = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
    std::vector<std::uint8_t> ihdr;
    put_be(ihdr, width, 4);
    put_be(ihdr, height, 4);
    ihdr.insert(ihdr.end(), {8, 2, 0, 0, 0});
    png_chunk(out, "IHDR", ihdr);
    std::vector<std::uint8_t> raw;
    std::uint32_t state = seed * 2654435761u + 1;
    for (std::uint32_t y = 0; y < height; ++y) {
        raw.push_back(0);
        for (std::uint32_t x = 0; x < width * 3; ++x) {
            state = state * 1664525u + 1013904223u;
            raw.push_back(static_cast<std::uint8_t>(state >> 24));
        }
    }
    uLongf len = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> z(len);
    if (compress2(z.data(), &len, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK) throw Error("png: deflate failed");
    z.resize(len);
    png_chunk(out, "IDAT", z);
    png_chunk(out, "IEND", {});
    return out;
}

std::vector<std::uint8_t> ent0_container(const std::vector<std::vector<std::uint8_t>>& pngs, bool truncate_last) {
    std::vector<std::uint8_t> out = {'E', 'N', 'T', '0'};
    const auto le = [&](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    };
    le(0xD9);
    le(0x40);
    le(static_cast<std::uint32_t>(pngs.size()));
    if (pngs.empty()) {
        le(0);
        le(0);
    }
    for (std::size_t i = 0; i < pngs.size(); ++i) {
        le(static_cast<std::uint32_t>(pngs[i].size()));
        le(1);
        if (truncate_last && i + 1 == pngs.size()) {
            out.insert(out.end(), pngs[i].begin(), pngs[i].begin() + static_cast<std::ptrdiff_t>(pngs[i].size() / 2));
        } else {
            out.insert(out.end(), pngs[i].begin(), pngs[i].end());
        }
    }
    return out;
}

// ---- index.dat / lnk ----

std::uint64_t unix_to_filetime(std::int64_t unix_seconds) {
    return static_cast<std::uint64_t>(unix_seconds + 11644473600LL) * 10'000'000ULL;
}

std::vector<std::uint8_t> index_dat(const std::vector<IndexUrl>& urls) {
    constexpr std::size_t kBlock = 0x80;
    std::vector<std::uint8_t> out(kBlock, 0);
    const std::string magic = "Client UrlCache MMF Ver 5.2";
    std::memcpy(out.data(), magic.data(), magic.size());
    const auto le32 = [](std::vector<std::uint8_t>& b, std::size_t at, std::uint32_t v) {
        for (int i = 0; i < 4; ++i) b[at + static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v >> (8 * i));
    };
    for (const auto& u : urls) {
        const bool redirect = u.tag == "REDR";
        const std::size_t url_at = redirect ? 0x10 : 0x68;
        const std::size_t need = url_at + u.url.size() + 1;
        const std::size_t blocks = (need + kBlock - 1) / kBlock;
        std::vector<std::uint8_t> rec(blocks * kBlock, 0);
        std::memcpy(rec.data(), u.tag.data(), 4);
        le32(rec, 4, static_cast<std::uint32_t>(blocks));
        if (!redirect) {
            le32(rec, 0x08, static_cast<std::uint32_t>(u.filetime));
            le32(rec, 0x0C, static_cast<std::uint32_t>(u.filetime >> 32));
            le32(rec, 0x10, static_cast<std::uint32_t>(u.filetime));
            le32(rec, 0x14, static_cast<std::uint32_t>(u.filetime >> 32));
            le32(rec, 0x34, static_cast<std::uint32_t>(url_at));
        }
        std::memcpy(rec.data() + url_at, u.url.data(), u.url.size());
        out.insert(out.end(), rec.begin(), rec.end());
    }
    return out;
}

std::vector<std::uint8_t> lnk_header() {
    std::vector<std::uint8_t> h(0x4C, 0);
    h[0] = 0x4C;
    const std::uint8_t clsid[16] = {0x01, 0x14, 0x02, 0x00, 0x00, 0x00, 0x00, 0x00,
                                    0xC0, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x46};
    std::memcpy(h.data() + 4, clsid, 16);
    h[0x14] = 0x01;  // HasLinkTargetIDList
    return h;
}

}  // namespace cloudtrace::fixtures
