#include <cloudtrace/error.hpp>
#include <cloudtrace/fixtures.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace cloudtrace::fixtures {
namespace {

using ojson = nlohmann::ordered_json;

constexpr double kGeoTolerance = 1e-6;

ojson record_json(const ExpectedRecord& r) {
    ojson j;
    j["service"] = r.service;
    j["source_path"] = r.source_path;
    j["kind"] = r.kind;
    j["subject"] = r.subject ? ojson(*r.subject) : ojson(nullptr);
    j["attributes"] = ojson::object();
    for (const auto& [k, v] : r.attributes) j["attributes"][k] = v;
    j["times"] = ojson::object();
    for (const auto& [k, v] : r.times) j["times"][k] = v;
    if (r.geo) j["geo"] = {r.geo->latitude, r.geo->longitude};
    return j;
}

ojson credential_json(const ExpectedCredential& c) {
    return {{"service", c.service},
            {"account_id", c.account_id},
            {"secret_kind", c.secret_kind},
            {"secret_value", c.secret_value ? ojson(*c.secret_value) : ojson(nullptr)},
            {"enables_remote_access", c.enables_remote_access},
            {"source_path", c.source_path}};
}

std::string describe(const ExpectedRecord& r) {
    return r.service + " " + r.kind + " '" + r.subject.value_or("") + "' in " + r.source_path;
}

std::string describe(const ArtifactRecord& r) {
    return std::string(to_string(r.service)) + " " + r.kind + " '" + r.subject.value_or("") + "' in " + r.source_path;
}

std::string describe(const ExpectedCredential& c) {
    return c.service + " credential " + c.secret_kind + " for '" + c.account_id + "' in " + c.source_path;
}

bool matches(const ExpectedRecord& e, const ArtifactRecord& a) {
    if (e.service != to_string(a.service) || e.source_path != a.source_path || e.kind != a.kind) return false;
    if (e.subject && e.subject != a.subject) return false;
    for (const auto& [k, v] : e.attributes) {
        const auto got = a.attributes.get(k);
        if (!got || *got != v) return false;
    }
    if (e.times.size() != a.timestamps.size()) return false;
    for (const auto& t : a.timestamps) {
        const auto it = e.times.find(t.label);
        if (it == e.times.end() || it->second != t.value.iso()) return false;
    }
    if (e.geo.has_value() != a.geo.has_value()) return false;
    if (e.geo && (std::abs(e.geo->latitude - a.geo->latitude) > kGeoTolerance ||
                  std::abs(e.geo->longitude - a.geo->longitude) > kGeoTolerance))
        return false;
    return true;
}

ExpectedCredential expected_of(const CredentialFinding& c) {
    return {std::string(to_string(c.service)), c.account_id, std::string(to_string(c.secret_kind)), c.secret_value,
            c.enables_remote_access, c.source_path};
}

}  // namespace

nlohmann::ordered_json to_json(const Manifest& m) {
    ojson j;
    j["os_family"] = m.os_family;
    j["services"] = m.services;
    j["planted_files"] = m.planted_files;
    j["records"] = ojson::array();
    for (const auto& r : m.records) j["records"].push_back(record_json(r));
    j["credentials"] = ojson::array();
    for (const auto& c : m.credentials) j["credentials"].push_back(credential_json(c));
    return j;
}

Manifest manifest_from_json(const nlohmann::json& j) {
    Manifest m;
    m.os_family = j.at("os_family").get<std::string>();
    m.services = j.at("services").get<std::vector<std::string>>();
    m.planted_files = j.value("planted_files", std::vector<std::string>{});
    for (const auto& r : j.at("records")) {
        ExpectedRecord e;
        e.service = r.at("service").get<std::string>();
        e.source_path = r.at("source_path").get<std::string>();
        e.kind = r.at("kind").get<std::string>();
        if (r.contains("subject") && !r["subject"].is_null()) e.subject = r["subject"].get<std::string>();
        if (r.contains("attributes")) e.attributes = r["attributes"].get<std::map<std::string, std::string>>();
        if (r.contains("times")) e.times = r["times"].get<std::map<std::string, std::string>>();
        if (r.contains("geo")) e.geo = GeoPoint{r["geo"].at(0).get<double>(), r["geo"].at(1).get<double>()};
        m.records.push_back(std::move(e));
    }
    for (const auto& c : j.at("credentials")) {
        ExpectedCredential e;
        e.service = c.at("service").get<std::string>();
        e.account_id = c.at("account_id").get<std::string>();
        e.secret_kind = c.at("secret_kind").get<std::string>();
        if (!c.at("secret_value").is_null()) e.secret_value = c["secret_value"].get<std::string>();
        e.enables_remote_access = c.at("enables_remote_access").get<bool>();
        e.source_path = c.at("source_path").get<std::string>();
        m.credentials.push_back(std::move(e));
    }
    return m;
}

FixtureSpec spec_from_json(const nlohmann::json& j) {
    static const std::set<std::string> known = {"os_family", "services", "user", "seed", "accounts", "notes", "log_events", "index_gaps"};
    for (const auto& [k, v] : j.items()) {
        if (!known.count(k)) throw Error("fixture spec: unknown key '" + k + "'");
    }
    FixtureSpec s;
    const auto family = j.at("os_family").get<std::string>();
    const auto os = parse_os_family(family);
    if (!os) throw Error("fixture spec: unknown os_family '" + family + "'");
    s.os_family = *os;
    for (const auto& name : j.value("services", std::vector<std::string>{})) {
        const auto svc = parse_service(name);
        if (!svc) throw Error("fixture spec: unknown service '" + name + "'");
        s.services.push_back(*svc);
    }
    s.user = j.value("user", s.user);
    s.seed = j.value("seed", s.seed);
    s.accounts = j.value("accounts", s.accounts);
    s.notes = j.value("notes", s.notes);
    s.log_events = j.value("log_events", s.log_events);
    s.index_gaps = j.value("index_gaps", s.index_gaps);
    return s;
}

nlohmann::ordered_json to_json(const CaseStudy& c) {
    ojson j;
    j["pc_root"] = c.pc_root.string();
    j["phone_root"] = c.phone_root.string();
    j["secret_file"] = c.secret_file.string();
    j["secret_sha256"] = c.secret_sha256;
    j["pc_recents"] = c.pc_recents;
    j["planted_instants"] = ojson::array();
    for (const auto& [when, path, device] : c.planted_instants)
        j["planted_instants"].push_back({{"utc", when}, {"source_path", path}, {"device", device}});
    j["pc"] = to_json(c.pc);
    j["phone"] = to_json(c.phone);
    return j;
}

std::string ClosureReport::summary() const {
    std::string s = std::to_string(missing.size()) + " missing, " + std::to_string(extra.size()) + " extra";
    for (const auto& m : missing) s += "\n  missing: " + m;
    for (const auto& e : extra) s += "\n  extra: " + e;
    return s;
}

ClosureReport check_closure(const Manifest& m, const PipelineResult& result, std::size_t device) {
    ClosureReport report;
    std::vector<const ArtifactRecord*> actual;
    for (const auto& r : result.records) {
        if (r.device == device) actual.push_back(&r);
    }
    std::vector<bool> used(actual.size(), false);

    // Most constrained expectations claim their record first so a looser one cannot take it.
    std::vector<const ExpectedRecord*> expected;
    for (const auto& e : m.records) expected.push_back(&e);
    std::stable_sort(expected.begin(), expected.end(), [](const ExpectedRecord* a, const ExpectedRecord* b) {
        const auto weight = [](const ExpectedRecord* e) { return e->attributes.size() + e->times.size() + (e->subject ? 1 : 0); };
        return weight(a) > weight(b);
    });
    for (const auto* e : expected) {
        bool found = false;
        for (std::size_t i = 0; i < actual.size() && !found; ++i) {
            if (!used[i] && matches(*e, *actual[i])) used[i] = found = true;
        }
        if (!found) report.missing.push_back(describe(*e));
    }
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (!used[i]) report.extra.push_back(describe(*actual[i]));
    }

    std::vector<ExpectedCredential> got;
    for (const auto& c : result.credentials) {
        if (c.device == device) got.push_back(expected_of(c));
    }
    std::vector<bool> taken(got.size(), false);
    for (const auto& c : m.credentials) {
        bool found = false;
        for (std::size_t i = 0; i < got.size() && !found; ++i) {
            if (!taken[i] && got[i] == c) taken[i] = found = true;
        }
        if (!found) report.missing.push_back(describe(c));
    }
    for (std::size_t i = 0; i < got.size(); ++i) {
        if (!taken[i]) report.extra.push_back(describe(got[i]));
    }
    return report;
}

}  // namespace cloudtrace::fixtures
