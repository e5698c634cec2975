#pragma once

#include <cloudtrace/error.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

// Read-only reader for the single-file SQLite 3 database format.
//
// Handles table b-trees (interior and leaf pages), overflow chains, the record
// format and UTF-8/UTF-16 text. Journals, WAL files, indices and WITHOUT ROWID
// tables are not consulted. The input bytes are never modified.
namespace cloudtrace::sqlite {

struct Blob {
    std::vector<std::uint8_t> bytes;
    friend bool operator==(const Blob&, const Blob&) = default;
};

using Value = std::variant<std::monostate, std::int64_t, double, std::string, Blob>;

enum class ValueType { null, integer, real, text, blob };
ValueType type_of(const Value& v);

class Row {
public:
    Row(std::shared_ptr<const std::vector<std::string>> names, std::vector<Value> values, std::int64_t rowid)
        : names_(std::move(names)), values_(std::move(values)), rowid_(rowid) {}

    std::int64_t rowid() const { return rowid_; }
    std::size_t size() const { return values_.size(); }
    const std::string& name(std::size_t i) const { return (*names_)[i]; }
    const Value& value(std::size_t i) const { return values_[i]; }

    /// Column lookup is case-insensitive, as in SQL.
    const Value* find(std::string_view column) const;
    bool has_column(std::string_view column) const { return find(column) != nullptr; }
    bool is_null(std::string_view column) const;

    /// Integer view; reals are truncated and numeric text is converted.
    std::optional<std::int64_t> integer(std::string_view column) const;
    std::optional<double> real(std::string_view column) const;
    /// Text view; integers and reals are rendered in their shortest decimal form.
    std::optional<std::string> text(std::string_view column) const;

private:
    std::shared_ptr<const std::vector<std::string>> names_;
    std::vector<Value> values_;
    std::int64_t rowid_;
};

struct TableSchema {
    std::string name;
    std::uint32_t root_page = 0;
    std::vector<std::string> columns;
    std::optional<std::size_t> rowid_alias;  ///< INTEGER PRIMARY KEY column
    bool without_rowid = false;
    std::string sql;

    bool has_column(std::string_view column) const;
};

/// Column definitions from a CREATE TABLE statement; table constraints are skipped.
struct ParsedCreateTable {
    std::vector<std::string> columns;
    std::optional<std::size_t> rowid_alias;
    bool without_rowid = false;
};
ParsedCreateTable parse_create_table(std::string_view sql);

class Database {
public:
    /// Throws SqliteError when the header or schema is unreadable.
    explicit Database(std::vector<std::uint8_t> bytes);
    static Database open(const std::filesystem::path& path);

    std::uint32_t page_size() const { return page_size_; }
    std::uint32_t page_count() const { return page_count_; }

    std::vector<std::string> table_names() const;
    const TableSchema* find_table(std::string_view name) const;
    /// First table (schema order) that declares every listed column.
    const TableSchema* find_table_with_columns(std::initializer_list<std::string_view> columns) const;

    /// All rows in rowid order. Throws MissingTableError or SqliteError (with page number) on corruption.
    std::vector<Row> read_table(std::string_view name) const;

private:
    std::span<const std::uint8_t> page(std::uint32_t number) const;
    void walk_table(std::uint32_t root, const std::function<void(std::int64_t, std::vector<std::uint8_t>, std::uint32_t)>& emit) const;
    std::vector<std::uint8_t> cell_payload(std::uint32_t page_no, std::span<const std::uint8_t> pg,
                                           std::size_t offset, std::int64_t& rowid) const;
    std::vector<Value> decode_record(std::span<const std::uint8_t> payload, std::uint32_t page_no) const;

    std::vector<std::uint8_t> bytes_;
    std::uint32_t page_size_ = 0;
    std::uint32_t usable_size_ = 0;
    std::uint32_t page_count_ = 0;
    std::uint32_t text_encoding_ = 1;
    std::vector<TableSchema> tables_;
};

std::vector<Row> read_sqlite_table(const std::filesystem::path& file, std::string_view table);

}  // namespace cloudtrace::sqlite
