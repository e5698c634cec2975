#include <cloudtrace/error.hpp>
#include <cloudtrace/scan.hpp>
#include <cloudtrace/text.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <system_error>

namespace cloudtrace {
namespace fs = std::filesystem;
using namespace text;

namespace {

constexpr std::size_t kSniffBytes = 4096;

bool starts_with(std::span<const std::uint8_t> b, std::string_view magic) {
    return b.size() >= magic.size() && std::equal(magic.begin(), magic.end(), b.begin(),
                                                   [](char c, std::uint8_t u) { return static_cast<std::uint8_t>(c) == u; });
}

bool is_shell_link(std::span<const std::uint8_t> b) {
    static constexpr std::array<std::uint8_t, 20> header = {0x4C, 0x00, 0x00, 0x00, 0x01, 0x14, 0x02, 0x00, 0x00, 0x00,
                                                            0x00, 0x00, 0xC0, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x46};
    return b.size() >= 0x4C && std::equal(header.begin(), header.end(), b.begin());
}

bool looks_textual(std::string_view s) {
    return std::none_of(s.begin(), s.end(), [](char c) {
        const auto u = static_cast<unsigned char>(c);
        return u == 0 || (u < 0x20 && u != '\t' && u != '\n' && u != '\r' && u != '\f') || u == 0x7F;
    });
}

}  // namespace

ContainerKind identify_container(std::span<const std::uint8_t> bytes) {
    if (bytes.empty()) return ContainerKind::unknown;
    if (starts_with(bytes, std::string_view("SQLite format 3\0", 16))) return ContainerKind::sqlite3;
    if (starts_with(bytes, "bplist00")) return ContainerKind::binary_plist;
    if (starts_with(bytes, "\x89PNG\r\n\x1a\n")) return ContainerKind::png;
    if (starts_with(bytes, "Client UrlCache MMF")) return ContainerKind::index_dat;
    if (is_shell_link(bytes)) return ContainerKind::lnk;

    std::string_view head = as_chars(bytes.first(std::min(bytes.size(), kSniffBytes)));
    if (head.substr(0, 3) == "\xEF\xBB\xBF") head.remove_prefix(3);
    if (!looks_textual(head)) return ContainerKind::unknown;
    const std::string_view body = trim(head);
    if (istarts_with(body, "<?xml") || istarts_with(body, "<plist")) {
        if (icontains(body, "<!DOCTYPE plist") || icontains(body, "<plist")) return ContainerKind::xml_plist;
        if (icontains(body, "<html")) return ContainerKind::html;
        return ContainerKind::generic_xml;
    }
    for (std::string_view tag : {"<!doctype html", "<html", "<body", "<head", "<div", "<table", "<p>", "<span"}) {
        if (icontains(body, tag)) return ContainerKind::html;
    }
    if (!body.empty() && body.front() == '<' && body.find('>') != std::string_view::npos) return ContainerKind::generic_xml;
    return ContainerKind::text;
}

ContainerKind identify_file(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot open " + file.generic_string());
    std::vector<std::uint8_t> buf(kSniffBytes);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.bad()) throw Error("cannot read " + file.generic_string());
    buf.resize(static_cast<std::size_t>(in.gcount()));
    return identify_container(buf);
}

bool kind_compatible(ContainerKind expected, ContainerKind actual) {
    if (expected == actual || expected == ContainerKind::unknown) return true;
    switch (expected) {
        case ContainerKind::binary_plist: return actual == ContainerKind::xml_plist;
        case ContainerKind::generic_xml: return actual == ContainerKind::xml_plist;
        case ContainerKind::text: return actual == ContainerKind::html || actual == ContainerKind::generic_xml;
        default: return false;
    }
}

namespace {

std::vector<fs::path> subdirectories(const fs::path& dir) {
    std::vector<fs::path> out;
    std::error_code ec;
    for (fs::directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec)) {
        if (it->is_directory(ec) && !it->is_symlink(ec)) out.push_back(it->path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Case-insensitive child lookup so Windows trees extracted onto case-sensitive file systems still match.
std::optional<fs::path> child_dir(const fs::path& dir, std::string_view name) {
    for (const auto& d : subdirectories(dir)) {
        if (iequals(d.filename().string(), name)) return d;
    }
    return std::nullopt;
}

std::optional<fs::path> descend(fs::path dir, std::string_view rel) {
    std::size_t start = 0;
    while (start <= rel.size()) {
        const std::size_t slash = rel.find('/', start);
        const auto part = rel.substr(start, slash == std::string_view::npos ? std::string_view::npos : slash - start);
        auto next = child_dir(dir, part);
        if (!next) return std::nullopt;
        dir = *next;
        if (slash == std::string_view::npos) break;
        start = slash + 1;
    }
    return dir;
}

std::string relative_of(const fs::path& p, const fs::path& root) { return p.lexically_relative(root).generic_string(); }

}  // namespace

DeviceProfile detect_device_layout(const fs::path& tree_root, std::optional<OsFamily> hint) {
    std::error_code ec;
    if (!fs::is_directory(tree_root, ec)) throw LayoutError("unrecognized device layout: not a directory");

    std::map<OsFamily, DeviceProfile> found;
    const auto add = [&](OsFamily f, std::string root, std::string marker) {
        auto& p = found[f];
        p.os_family = f;
        if (std::find(p.profile_roots.begin(), p.profile_roots.end(), root) == p.profile_roots.end())
            p.profile_roots.push_back(std::move(root));
        p.evidence.push_back(std::move(marker));
    };

    if (auto d = descend(tree_root, "data/data")) add(OsFamily::android_data, "", relative_of(*d, tree_root));
    // A sandbox holds Documents next to Library; a Mac volume root also has /Library/Preferences but no Documents.
    if (auto d = descend(tree_root, "Library/Preferences"); d && child_dir(tree_root, "Documents"))
        add(OsFamily::ios_app_sandbox, "", relative_of(*d, tree_root));
    if (auto apps = child_dir(tree_root, "Applications")) {
        for (const auto& app : subdirectories(*apps)) {
            if (auto d = descend(app, "Library/Preferences"); d && child_dir(app, "Documents"))
                add(OsFamily::ios_app_sandbox, relative_of(app, tree_root), relative_of(*d, tree_root));
        }
    }
    if (auto users = child_dir(tree_root, "Users")) {
        for (const auto& user : subdirectories(*users)) {
            if (auto d = child_dir(user, "Library")) add(OsFamily::mac, relative_of(user, tree_root), relative_of(*d, tree_root));
            if (auto d = child_dir(user, "AppData"))
                add(OsFamily::windows_vista7, relative_of(user, tree_root), relative_of(*d, tree_root));
        }
    }
    if (auto docs = child_dir(tree_root, "Documents and Settings")) {
        for (const auto& user : subdirectories(*docs)) {
            if (child_dir(user, "Application Data") || child_dir(user, "Local Settings"))
                add(OsFamily::windows_xp, relative_of(user, tree_root), relative_of(user, tree_root));
        }
    }
    if (found.empty()) throw LayoutError("unrecognized device layout");

    static constexpr std::array priority = {OsFamily::android_data, OsFamily::ios_app_sandbox, OsFamily::mac,
                                            OsFamily::windows_vista7, OsFamily::windows_xp};
    DeviceProfile chosen;
    if (hint) {
        auto it = found.find(*hint);
        if (it == found.end()) throw LayoutError("no " + std::string(to_string(*hint)) + " markers under tree");
        chosen = it->second;
    }
    for (OsFamily f : priority) {
        if (hint) break;
        if (auto it = found.find(f); it != found.end()) {
            chosen = it->second;
            break;
        }
    }
    chosen.evidence.clear();
    for (OsFamily f : priority) {
        if (auto it = found.find(f); it != found.end()) {
            for (const auto& m : it->second.evidence) chosen.evidence.push_back(std::string(to_string(f)) + ": " + m);
        }
    }
    return chosen;
}

namespace {

bool component_match(std::string_view pat, std::string_view s, bool ci) {
    // Iterative '*' matching with single-star backtracking.
    std::size_t p = 0, i = 0, star = std::string_view::npos, mark = 0;
    const auto eq = [ci](char a, char b) {
        return ci ? std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b)) : a == b;
    };
    while (i < s.size()) {
        if (p < pat.size() && pat[p] == '*') {
            star = p++;
            mark = i;
        } else if (p < pat.size() && eq(pat[p], s[i])) {
            ++p;
            ++i;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            i = ++mark;
        } else {
            return false;
        }
    }
    while (p < pat.size() && pat[p] == '*') ++p;
    return p == pat.size();
}

std::vector<std::string_view> components(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t slash = s.find('/', start);
        const auto part = s.substr(start, slash == std::string_view::npos ? std::string_view::npos : slash - start);
        if (!part.empty()) out.push_back(part);
        if (slash == std::string_view::npos) break;
        start = slash + 1;
    }
    return out;
}

bool match_parts(std::span<const std::string_view> pat, std::span<const std::string_view> path, bool ci) {
    if (pat.empty()) return path.empty();
    if (pat.front() == "**") {
        for (std::size_t skip = 0; skip <= path.size(); ++skip) {
            if (match_parts(pat.subspan(1), path.subspan(skip), ci)) return true;
        }
        return false;
    }
    return !path.empty() && component_match(pat.front(), path.front(), ci) &&
           match_parts(pat.subspan(1), path.subspan(1), ci);
}

}  // namespace

bool glob_match(std::string_view pattern, std::string_view path, bool case_insensitive) {
    const auto pat = components(pattern);
    const auto parts = components(path);
    return match_parts(pat, parts, case_insensitive);
}

ScanResult scan(const fs::path& tree_root, const DeviceProfile& profile, std::size_t device) {
    ScanResult result;
    const auto patterns = catalog::expand_catalog(profile);
    const bool ci = is_windows(profile.os_family);

    std::vector<std::string> files;
    std::error_code ec;
    fs::recursive_directory_iterator it(tree_root, fs::directory_options::skip_permission_denied, ec);
    if (ec) {
        result.diagnostics.push_back({DiagnosticKind::skipped_file, device, "", "cannot traverse tree: " + ec.message()});
        return result;
    }
    for (fs::recursive_directory_iterator end; it != end; it.increment(ec)) {
        if (ec) {
            result.diagnostics.push_back({DiagnosticKind::skipped_file, device, "", "traversal error: " + ec.message()});
            ec.clear();
            break;
        }
        std::error_code st;
        if (it->is_symlink(st)) {
            it.disable_recursion_pending();
            continue;
        }
        if (it->is_regular_file(st)) files.push_back(relative_of(it->path(), tree_root));
    }
    std::sort(files.begin(), files.end());

    for (const auto& rel : files) {
        std::vector<const catalog::CatalogEntry*> hits;
        for (const auto& pat : patterns) {
            if (glob_match(pat.glob, rel, ci) && std::find(hits.begin(), hits.end(), pat.entry) == hits.end())
                hits.push_back(pat.entry);
        }
        if (hits.empty()) continue;
        ContainerKind kind;
        try {
            kind = identify_file(tree_root / rel);
        } catch (const Error& e) {
            result.diagnostics.push_back({DiagnosticKind::skipped_file, device, rel, e.what()});
            continue;
        }
        const auto& order = catalog::all_entries();
        std::sort(hits.begin(), hits.end(), [&](auto* a, auto* b) {
            return std::find(order.begin(), order.end(), a) < std::find(order.begin(), order.end(), b);
        });
        for (const auto* entry : hits) {
            if (entry->requires_kind_match && !kind_compatible(entry->file_kind, kind)) continue;
            result.candidates.push_back({rel, entry, kind, device});
        }
    }
    return result;
}

}  // namespace cloudtrace
