#include <cloudtrace/sqlite_reader.hpp>
#include <cloudtrace/text.hpp>

#include <cstring>
#include <fstream>
#include <iterator>
#include <unordered_set>

namespace cloudtrace::sqlite {

namespace {

constexpr std::string_view kMagic{"SQLite format 3\0", 16};

enum PageType : std::uint8_t {
    kInteriorIndex = 0x02,
    kInteriorTable = 0x05,
    kLeafIndex = 0x0A,
    kLeafTable = 0x0D,
};

std::uint32_t be16(const std::uint8_t* p) { return (std::uint32_t{p[0]} << 8) | p[1]; }
std::uint32_t be32(const std::uint8_t* p) {
    return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
}

// Returns bytes consumed, 0 if the varint runs past the end.
std::size_t read_varint(std::span<const std::uint8_t> buf, std::size_t pos, std::uint64_t& out) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < 9; ++i) {
        if (pos + i >= buf.size()) return 0;
        auto b = buf[pos + i];
        if (i == 8) {
            out = (v << 8) | b;
            return 9;
        }
        v = (v << 7) | (b & 0x7F);
        if (!(b & 0x80)) {
            out = v;
            return i + 1;
        }
    }
    return 0;
}

std::string utf16_to_utf8(std::span<const std::uint8_t> in, bool big_endian) {
    std::string out;
    auto unit = [&](std::size_t i) -> std::uint32_t {
        return big_endian ? (std::uint32_t{in[i]} << 8) | in[i + 1] : (std::uint32_t{in[i + 1]} << 8) | in[i];
    };
    for (std::size_t i = 0; i + 1 < in.size(); i += 2) {
        std::uint32_t cp = unit(i);
        if (cp >= 0xD800 && cp <= 0xDBFF && i + 3 < in.size()) {
            auto lo = unit(i + 2);
            if (lo >= 0xDC00 && lo <= 0xDFFF) {
                cp = 0x10000 + ((cp - 0xD800) << 10) + (lo - 0xDC00);
                i += 2;
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

std::string unquote_identifier(std::string_view id) {
    id = text::trim(id);
    if (id.size() >= 2) {
        char f = id.front(), b = id.back();
        if ((f == '"' && b == '"') || (f == '`' && b == '`') || (f == '\'' && b == '\'')) {
            std::string out;
            for (std::size_t i = 1; i + 1 < id.size(); ++i) {
                out.push_back(id[i]);
                if (id[i] == f && i + 2 < id.size() && id[i + 1] == f) ++i;
            }
            return out;
        }
        if (f == '[' && b == ']') return std::string(id.substr(1, id.size() - 2));
    }
    return std::string(id);
}

// Splits at top-level commas, respecting quotes and nested parentheses.
std::vector<std::string_view> split_definitions(std::string_view body) {
    std::vector<std::string_view> parts;
    int depth = 0;
    char quote = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < body.size(); ++i) {
        char c = body[i];
        if (quote) {
            if (c == quote) quote = 0;
            continue;
        }
        if (c == '"' || c == '\'' || c == '`') quote = c;
        else if (c == '[') quote = ']';
        else if (c == '(') ++depth;
        else if (c == ')') --depth;
        else if (c == ',' && depth == 0) {
            parts.push_back(body.substr(start, i - start));
            start = i + 1;
        }
    }
    parts.push_back(body.substr(start));
    return parts;
}

// First identifier token of a column definition and the remainder.
std::pair<std::string_view, std::string_view> first_token(std::string_view def) {
    def = text::trim(def);
    if (def.empty()) return {};
    char f = def.front();
    char close = f == '"' ? '"' : f == '`' ? '`' : f == '\'' ? '\'' : f == '[' ? ']' : 0;
    std::size_t end;
    if (close) {
        end = 1;
        while (end < def.size()) {
            if (def[end] == close) {
                if (close != ']' && end + 1 < def.size() && def[end + 1] == close) {
                    end += 2;
                    continue;
                }
                break;
            }
            ++end;
        }
        end = std::min(end + 1, def.size());
    } else {
        end = 0;
        while (end < def.size() && def[end] != ' ' && def[end] != '\t' && def[end] != '\n' && def[end] != '(') ++end;
    }
    return {def.substr(0, end), def.substr(end)};
}

std::string collapse_upper(std::string_view s) {
    std::string out;
    bool space = false;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            space = true;
            continue;
        }
        if (space && !out.empty()) out.push_back(' ');
        space = false;
        out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    return out;
}

}  // namespace

ValueType type_of(const Value& v) {
    switch (v.index()) {
        case 0: return ValueType::null;
        case 1: return ValueType::integer;
        case 2: return ValueType::real;
        case 3: return ValueType::text;
        default: return ValueType::blob;
    }
}

const Value* Row::find(std::string_view column) const {
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (text::iequals((*names_)[i], column)) return &values_[i];
    return nullptr;
}

bool Row::is_null(std::string_view column) const {
    auto v = find(column);
    return !v || std::holds_alternative<std::monostate>(*v);
}

std::optional<std::int64_t> Row::integer(std::string_view column) const {
    auto v = find(column);
    if (!v) return std::nullopt;
    if (auto i = std::get_if<std::int64_t>(v)) return *i;
    if (auto d = std::get_if<double>(v)) return static_cast<std::int64_t>(*d);
    if (auto s = std::get_if<std::string>(v)) return text::parse_int(*s);
    return std::nullopt;
}

std::optional<double> Row::real(std::string_view column) const {
    auto v = find(column);
    if (!v) return std::nullopt;
    if (auto d = std::get_if<double>(v)) return *d;
    if (auto i = std::get_if<std::int64_t>(v)) return static_cast<double>(*i);
    if (auto s = std::get_if<std::string>(v)) return text::parse_double(*s);
    return std::nullopt;
}

std::optional<std::string> Row::text(std::string_view column) const {
    auto v = find(column);
    if (!v) return std::nullopt;
    if (auto s = std::get_if<std::string>(v)) return *s;
    if (auto i = std::get_if<std::int64_t>(v)) return std::to_string(*i);
    if (auto d = std::get_if<double>(v)) return text::format_double(*d);
    if (auto b = std::get_if<Blob>(v)) return std::string(b->bytes.begin(), b->bytes.end());
    return std::nullopt;
}

bool TableSchema::has_column(std::string_view column) const {
    for (const auto& c : columns)
        if (text::iequals(c, column)) return true;
    return false;
}

ParsedCreateTable parse_create_table(std::string_view sql) {
    ParsedCreateTable out;
    // locate the column list, skipping quoted identifiers in the table name
    std::size_t open = std::string_view::npos;
    char quote = 0;
    for (std::size_t i = 0; i < sql.size(); ++i) {
        char c = sql[i];
        if (quote) {
            if (c == quote) quote = 0;
            continue;
        }
        if (c == '"' || c == '`' || c == '\'') quote = c;
        else if (c == '[') quote = ']';
        else if (c == '(') {
            open = i;
            break;
        }
    }
    if (open == std::string_view::npos) return out;
    int depth = 0;
    std::size_t close = std::string_view::npos;
    quote = 0;
    for (std::size_t i = open; i < sql.size(); ++i) {
        char c = sql[i];
        if (quote) {
            if (c == quote) quote = 0;
            continue;
        }
        if (c == '"' || c == '`' || c == '\'') quote = c;
        else if (c == '[') quote = ']';
        else if (c == '(') ++depth;
        else if (c == ')' && --depth == 0) {
            close = i;
            break;
        }
    }
    if (close == std::string_view::npos) return out;
    out.without_rowid = collapse_upper(sql.substr(close + 1)).find("WITHOUT ROWID") != std::string::npos;

    std::vector<std::string> types;
    std::optional<std::string> table_pk;
    bool table_pk_multi = false;
    for (auto def : split_definitions(sql.substr(open + 1, close - open - 1))) {
        auto upper = collapse_upper(def);
        if (upper.empty()) continue;
        auto starts = [&](std::string_view kw) {
            return upper.rfind(kw, 0) == 0 && (upper.size() == kw.size() || upper[kw.size()] == ' ' || upper[kw.size()] == '(');
        };
        if (starts("CONSTRAINT") || starts("UNIQUE") || starts("CHECK") || starts("FOREIGN")) continue;
        if (starts("PRIMARY")) {
            auto lp = def.find('(');
            auto rp = def.rfind(')');
            if (lp != std::string_view::npos && rp != std::string_view::npos && rp > lp) {
                auto cols = split_definitions(def.substr(lp + 1, rp - lp - 1));
                if (cols.size() == 1) table_pk = unquote_identifier(first_token(cols[0]).first);
                else table_pk_multi = true;
            }
            continue;
        }
        auto [name, rest] = first_token(def);
        out.columns.push_back(unquote_identifier(name));
        auto rest_upper = collapse_upper(rest);
        types.push_back(rest_upper);
        if (rest_upper.rfind("INTEGER", 0) == 0 && rest_upper.find("PRIMARY KEY") != std::string::npos &&
            rest_upper.find("PRIMARY KEY DESC") == std::string::npos && !out.rowid_alias)
            out.rowid_alias = out.columns.size() - 1;
    }
    if (table_pk && !table_pk_multi && !out.rowid_alias) {
        for (std::size_t i = 0; i < out.columns.size(); ++i) {
            if (text::iequals(out.columns[i], *table_pk) && types[i].rfind("INTEGER", 0) == 0 &&
                (types[i].size() == 7 || types[i][7] == ' ')) {
                out.rowid_alias = i;
                break;
            }
        }
    }
    if (out.without_rowid) out.rowid_alias.reset();
    return out;
}

Database Database::open(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SqliteError("cannot open database file " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return Database(std::move(bytes));
}

Database::Database(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes)) {
    if (bytes_.size() < 100 || std::memcmp(bytes_.data(), kMagic.data(), kMagic.size()) != 0)
        throw SqliteError("not an SQLite 3 database (bad header magic)");
    std::uint32_t ps = be16(&bytes_[16]);
    page_size_ = ps == 1 ? 65536 : ps;
    if (page_size_ < 512 || (page_size_ & (page_size_ - 1)) != 0)
        throw SqliteError("invalid page size " + std::to_string(page_size_));
    std::uint32_t reserved = bytes_[20];
    if (reserved >= page_size_ - 480) throw SqliteError("invalid reserved-space size");
    usable_size_ = page_size_ - reserved;
    text_encoding_ = be32(&bytes_[56]);
    if (text_encoding_ == 0) text_encoding_ = 1;
    if (text_encoding_ > 3) throw SqliteError("unknown text encoding " + std::to_string(text_encoding_));

    auto pages_in_file = static_cast<std::uint32_t>(bytes_.size() / page_size_);
    std::uint32_t header_count = be32(&bytes_[28]);
    page_count_ = (header_count == 0 || header_count > pages_in_file) ? pages_in_file : header_count;
    if (page_count_ == 0) throw SqliteError("database file is shorter than one page");

    walk_table(1, [&](std::int64_t rowid, std::vector<std::uint8_t> payload, std::uint32_t page_no) {
        auto rec = decode_record(payload, page_no);
        rec.resize(5);
        auto str = [](const Value& v) { return std::holds_alternative<std::string>(v) ? std::get<std::string>(v) : std::string{}; };
        if (str(rec[0]) != "table") return;
        TableSchema t;
        t.name = str(rec[1]);
        if (auto p = std::get_if<std::int64_t>(&rec[3])) t.root_page = static_cast<std::uint32_t>(*p);
        t.sql = str(rec[4]);
        auto parsed = parse_create_table(t.sql);
        t.columns = std::move(parsed.columns);
        t.rowid_alias = parsed.rowid_alias;
        t.without_rowid = parsed.without_rowid;
        (void)rowid;
        tables_.push_back(std::move(t));
    });
}

std::span<const std::uint8_t> Database::page(std::uint32_t number) const {
    if (number == 0 || number > page_count_) throw SqliteError("page number out of range", number);
    return {bytes_.data() + static_cast<std::size_t>(number - 1) * page_size_, page_size_};
}

std::vector<std::string> Database::table_names() const {
    std::vector<std::string> names;
    for (const auto& t : tables_) names.push_back(t.name);
    return names;
}

const TableSchema* Database::find_table(std::string_view name) const {
    for (const auto& t : tables_)
        if (text::iequals(t.name, name)) return &t;
    return nullptr;
}

const TableSchema* Database::find_table_with_columns(std::initializer_list<std::string_view> columns) const {
    for (const auto& t : tables_) {
        bool all = true;
        for (auto c : columns) all = all && t.has_column(c);
        if (all && t.root_page != 0) return &t;
    }
    return nullptr;
}

void Database::walk_table(std::uint32_t root,
                          const std::function<void(std::int64_t, std::vector<std::uint8_t>, std::uint32_t)>& emit) const {
    std::unordered_set<std::uint32_t> visited;
    // explicit stack keeps rowid order: children pushed in reverse
    std::vector<std::uint32_t> stack{root};
    while (!stack.empty()) {
        auto page_no = stack.back();
        stack.pop_back();
        if (!visited.insert(page_no).second) throw SqliteError("b-tree page visited twice (cycle)", page_no);
        auto pg = page(page_no);
        std::size_t hdr = page_no == 1 ? 100 : 0;
        if (hdr + 8 > pg.size()) throw SqliteError("truncated b-tree page header", page_no);
        auto type = pg[hdr];
        if (type != kInteriorTable && type != kLeafTable) {
            if (type == kInteriorIndex || type == kLeafIndex)
                throw SqliteError("index b-tree page where a table page was expected", page_no);
            throw SqliteError("invalid b-tree page type " + std::to_string(type), page_no);
        }
        bool interior = type == kInteriorTable;
        std::uint32_t cells = be16(&pg[hdr + 3]);
        std::size_t ptr_base = hdr + (interior ? 12 : 8);
        if (ptr_base + cells * 2 > usable_size_) throw SqliteError("cell pointer array overruns page", page_no);

        if (interior) {
            std::vector<std::uint32_t> children;
            children.reserve(cells + 1);
            for (std::uint32_t i = 0; i < cells; ++i) {
                std::size_t off = be16(&pg[ptr_base + i * 2]);
                if (off + 4 > usable_size_) throw SqliteError("cell offset outside page", page_no);
                children.push_back(be32(&pg[off]));
            }
            children.push_back(be32(&pg[hdr + 8]));
            for (auto it = children.rbegin(); it != children.rend(); ++it) stack.push_back(*it);
        } else {
            for (std::uint32_t i = 0; i < cells; ++i) {
                std::size_t off = be16(&pg[ptr_base + i * 2]);
                if (off >= usable_size_) throw SqliteError("cell offset outside page", page_no);
                std::int64_t rowid = 0;
                auto payload = cell_payload(page_no, pg, off, rowid);
                emit(rowid, std::move(payload), page_no);
            }
        }
    }
}

std::vector<std::uint8_t> Database::cell_payload(std::uint32_t page_no, std::span<const std::uint8_t> pg,
                                                 std::size_t offset, std::int64_t& rowid) const {
    auto usable = pg.first(usable_size_);
    std::uint64_t payload_size = 0, raw_rowid = 0;
    auto n1 = read_varint(usable, offset, payload_size);
    if (!n1) throw SqliteError("truncated payload-size varint", page_no);
    auto n2 = read_varint(usable, offset + n1, raw_rowid);
    if (!n2) throw SqliteError("truncated rowid varint", page_no);
    rowid = static_cast<std::int64_t>(raw_rowid);
    std::size_t pos = offset + n1 + n2;
    if (payload_size > std::uint64_t{page_count_} * page_size_)
        throw SqliteError("payload size larger than the database", page_no);

    const std::uint64_t u = usable_size_;
    const std::uint64_t x = u - 35;
    std::uint64_t local = payload_size;
    if (payload_size > x) {
        std::uint64_t m = ((u - 12) * 32 / 255) - 23;
        std::uint64_t k = m + ((payload_size - m) % (u - 4));
        local = k <= x ? k : m;
    }
    if (pos + local > usable.size()) throw SqliteError("cell payload overruns page", page_no);
    std::vector<std::uint8_t> payload(usable.begin() + pos, usable.begin() + pos + local);
    if (local == payload_size) return payload;

    if (pos + local + 4 > usable.size()) throw SqliteError("missing overflow pointer", page_no);
    std::uint32_t next = be32(&usable[pos + local]);
    std::uint32_t hops = 0;
    while (payload.size() < payload_size) {
        if (next == 0) throw SqliteError("overflow chain ends early", page_no);
        if (++hops > page_count_) throw SqliteError("overflow chain cycle", next);
        auto ov = page(next);
        auto take = std::min<std::uint64_t>(payload_size - payload.size(), u - 4);
        payload.insert(payload.end(), ov.begin() + 4, ov.begin() + 4 + static_cast<std::ptrdiff_t>(take));
        next = be32(ov.data());
    }
    return payload;
}

std::vector<Value> Database::decode_record(std::span<const std::uint8_t> payload, std::uint32_t page_no) const {
    std::uint64_t header_size = 0;
    auto n = read_varint(payload, 0, header_size);
    if (!n || header_size > payload.size() || header_size < n) throw SqliteError("malformed record header", page_no);
    std::vector<std::uint64_t> serial_types;
    std::size_t pos = n;
    while (pos < header_size) {
        std::uint64_t t = 0;
        auto k = read_varint(payload.first(header_size), pos, t);
        if (!k) throw SqliteError("malformed record header", page_no);
        serial_types.push_back(t);
        pos += k;
    }
    std::vector<Value> values;
    values.reserve(serial_types.size());
    std::size_t body = header_size;
    auto need = [&](std::uint64_t len) {
        if (body + len > payload.size()) throw SqliteError("record body shorter than its header", page_no);
    };
    for (auto t : serial_types) {
        if (t == 0) {
            values.emplace_back(std::monostate{});
        } else if (t >= 1 && t <= 6) {
            static constexpr int widths[] = {0, 1, 2, 3, 4, 6, 8};
            auto w = widths[t];
            need(w);
            std::uint64_t v = 0;
            for (int i = 0; i < w; ++i) v = (v << 8) | payload[body + i];
            // sign-extend
            if (w < 8 && (v >> (w * 8 - 1)) & 1) v |= ~std::uint64_t{0} << (w * 8);
            values.emplace_back(static_cast<std::int64_t>(v));
            body += w;
        } else if (t == 7) {
            need(8);
            std::uint64_t v = 0;
            for (int i = 0; i < 8; ++i) v = (v << 8) | payload[body + i];
            double d;
            std::memcpy(&d, &v, sizeof d);
            values.emplace_back(d);
            body += 8;
        } else if (t == 8 || t == 9) {
            values.emplace_back(static_cast<std::int64_t>(t - 8));
        } else if (t >= 12) {
            auto len = (t - (t % 2 == 0 ? 12 : 13)) / 2;
            need(len);
            auto bytes = payload.subspan(body, len);
            if (t % 2 == 0) {
                values.emplace_back(Blob{{bytes.begin(), bytes.end()}});
            } else if (text_encoding_ == 1) {
                values.emplace_back(std::string(bytes.begin(), bytes.end()));
            } else {
                values.emplace_back(utf16_to_utf8(bytes, text_encoding_ == 3));
            }
            body += len;
        } else {
            throw SqliteError("reserved serial type " + std::to_string(t), page_no);
        }
    }
    return values;
}

std::vector<Row> Database::read_table(std::string_view name) const {
    auto table = find_table(name);
    if (!table) throw MissingTableError(std::string(name), table_names());
    if (table->without_rowid) throw SqliteError("WITHOUT ROWID table '" + table->name + "' is not supported");
    if (table->root_page == 0) throw SqliteError("table '" + table->name + "' has no b-tree (virtual table)");

    auto names = std::make_shared<std::vector<std::string>>(table->columns);
    std::vector<Row> rows;
    walk_table(table->root_page, [&](std::int64_t rowid, std::vector<std::uint8_t> payload, std::uint32_t page_no) {
        auto values = decode_record(payload, page_no);
        // rows written before ALTER TABLE ADD COLUMN are short
        if (values.size() < names->size()) values.resize(names->size());
        if (values.size() > names->size()) {
            for (auto i = names->size(); i < values.size(); ++i) names->push_back("column" + std::to_string(i));
        }
        if (table->rowid_alias && std::holds_alternative<std::monostate>(values[*table->rowid_alias]))
            values[*table->rowid_alias] = rowid;
        rows.emplace_back(names, std::move(values), rowid);
    });
    return rows;
}

std::vector<Row> read_sqlite_table(const std::filesystem::path& file, std::string_view table) {
    return Database::open(file).read_table(table);
}

}  // namespace cloudtrace::sqlite
