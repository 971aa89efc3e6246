// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <httplib.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "homethreat/catalog.hpp"
#include "homethreat/cli.hpp"
#include "homethreat/cvss.hpp"
#include "homethreat/engine.hpp"
#include "homethreat/report.hpp"
#include "support/test_support.hpp"

using namespace homethreat;
using json = nlohmann::json;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
};

// Collects the first few failure messages so a FAIL line says what went wrong.
class Checker {
public:
    void expect(bool ok, const std::string& what) {
        ++count_;
        if (ok) return;
        ++failed_;
        if (failed_ <= 3) messages_ += (messages_.empty() ? "" : "; ") + what;
    }
    int count() const { return count_; }
    Verdict verdict(const std::string& summary) const {
        if (failed_ == 0) return {true, summary};
        return {false, std::to_string(failed_) + " of " + std::to_string(count_) + " checks failed: " + messages_};
    }

private:
    int count_ = 0;
    int failed_ = 0;
    std::string messages_;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fixed(double v, int places) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(places);
    s << v;
    return s.str();
}

const Catalog& cat() { return default_catalog(); }

// The published home-virtual-assistant table, transcribed cell by cell.
struct PrintedRow {
    int threat;
    const char* vector;
    int base, temporal, environmental;  // tenths
    char base_band, temporal_band, environmental_band;
};

const PrintedRow kPrinted[] = {
    {1, "CVSS:3.1/AV:P/AC:L/PR:N/UI:N/S:U/C:L/I:L/A:L/E:H/RL:U/RC:C/CR:L/IR:L/AR:L", 43, 43, 29, 'M', 'M', 'L'},
    {2, "CVSS:3.1/AV:L/AC:H/PR:L/UI:N/S:U/C:H/I:H/A:N/E:U/RC:U/CR:H/IR:H", 63, 53, 59, 'M', 'M', 'M'},
    {3, "CVSS:3.1/AV:L/AC:H/PR:L/UI:N/S:C/C:N/I:H/A:L/E:P/RC:C/CR:M/IR:H/AR:M", 64, 61, 74, 'M', 'M', 'H'},
    {4, "CVSS:3.1/AV:P/AC:L/PR:L/UI:R/S:U/C:H/I:H/A:L/E:H/RL:U/RC:C/CR:H/IR:H/AR:L", 60, 60, 64, 'M', 'M', 'M'},
    {5, "CVSS:3.1/AV:L/AC:H/PR:L/UI:R/S:U/C:N/I:H/A:N/E:U/RC:U/IR:M", 44, 37, 37, 'M', 'L', 'L'},
    {6, "CVSS:3.1/AV:L/AC:H/PR:H/UI:R/S:C/C:N/I:H/A:L/E:U/RC:U/CR:M/IR:H/AR:L", 58, 49, 61, 'M', 'M', 'M'},
    {7, "CVSS:3.1/AV:L/AC:H/PR:H/UI:R/S:C/C:L/I:H/A:L/E:F/RL:O/RC:C/CR:M/IR:H/AR:L", 64, 59, 68, 'M', 'M', 'M'},
    {8, "CVSS:3.1/AV:L/AC:H/PR:L/UI:R/S:U/C:H/I:N/A:N/E:F/RL:U/RC:R/CR:H", 41, 44, 58, 'M', 'M', 'M'},
    {9, "CVSS:3.1/AV:L/AC:L/PR:N/UI:R/S:U/C:L/I:N/A:N/E:U/RC:R/CR:M", 33, 29, 29, 'L', 'L', 'L'},
    {10, "CVSS:3.1/AV:P/AC:L/PR:N/UI:R/S:U/C:H/I:N/A:N/E:H/RL:U/RC:C/CR:H", 44, 43, 61, 'M', 'M', 'M'},
    {11, "CVSS:3.1/AV:N/AC:L/PR:H/UI:N/S:U/C:H/I:N/A:N/E:H/RL:U/RC:C/CR:H", 49, 49, 67, 'M', 'M', 'M'},
    {12, "CVSS:3.1/AV:P/AC:L/PR:N/UI:N/S:U/C:N/I:N/A:H/E:H/RL:U/RC:C/AR:M", 46, 46, 46, 'M', 'M', 'M'},
    {13, "CVSS:3.1/AV:L/AC:H/PR:H/UI:N/S:U/C:L/I:N/A:H/E:P/RC:U/AR:M", 47, 41, 41, 'M', 'M', 'M'},
    {14, "CVSS:3.1/AV:L/AC:H/PR:L/UI:N/S:U/C:N/I:N/A:H/E:U/RC:U/AR:M", 47, 40, 40, 'M', 'M', 'M'},
    {15, "CVSS:3.1/AV:L/AC:H/PR:H/UI:N/S:C/C:H/I:H/A:H/E:P/RL:W/RC:C/CR:H/IR:H/AR:H", 75, 69, 70, 'H', 'M', 'H'},
    {16, "CVSS:3.1/AV:L/AC:H/PR:H/UI:N/S:C/C:H/I:H/A:H/E:P/RL:W/RC:C/CR:H/IR:H/AR:H", 75, 69, 70, 'H', 'M', 'H'},
};

cvss::ScoreTriple printed_triple(const PrintedRow& row) {
    return {cvss::Score::from_tenths(row.base), cvss::Score::from_tenths(row.temporal),
            cvss::Score::from_tenths(row.environmental)};
}

std::string triple_str(const cvss::ScoreTriple& t) {
    return t.base.str() + "/" + t.temporal.str() + "/" + t.environmental.str();
}

Verdict golden_table() {
    const auto start = std::chrono::steady_clock::now();
    Checker c;
    int exact = 0;
    std::string noted;
    for (const auto& row : kPrinted) {
        const auto computed = cvss::score(cvss::parse_vector(row.vector));
        const auto printed = printed_triple(row);
        const ThreatRecord* t = cat().find_threat(row.threat);
        c.expect(t && cvss::canonical_string(t->vector) == row.vector,
                 "catalog vector differs for row " + std::to_string(row.threat));
        c.expect(t && t->scores == computed, "catalog scores differ for row " + std::to_string(row.threat));
        if (computed == printed) {
            ++exact;
            continue;
        }
        const ConformanceNote* note = nullptr;
        for (const auto& n : conformance_notes()) {
            if (n.threat == row.threat) note = &n;
        }
        c.expect(note != nullptr, "row " + std::to_string(row.threat) + " printed " + triple_str(printed) +
                                      ", computed " + triple_str(computed) + ", no conformance note");
        if (!note) continue;
        c.expect(note->printed == printed && note->computed == computed,
                 "conformance note for row " + std::to_string(row.threat) + " does not match");
        noted += (noted.empty() ? "" : ", ") + std::to_string(row.threat) + " (printed " + triple_str(printed) +
                 ", computed " + triple_str(computed) + ")";
    }
    // A note must not exist for a row that already matches.
    for (const auto& n : conformance_notes()) c.expect(n.printed != n.computed, "redundant note");
    const double elapsed = seconds_since(start);
    c.expect(elapsed < 1.0, "took " + fixed(elapsed, 3) + " s");
    std::string summary = std::to_string(exact) + "/16 rows exact";
    if (!noted.empty()) summary += "; rows " + noted + " carry conformance notes (zero-note target not met)";
    return c.verdict(summary + "; " + fixed(elapsed * 1000, 1) + " ms");
}

Verdict severity_bands() {
    Checker c;
    for (const auto& row : kPrinted) {
        const std::pair<int, char> cells[] = {
            {row.base, row.base_band}, {row.temporal, row.temporal_band}, {row.environmental, row.environmental_band}};
        for (const auto& [tenths, band] : cells) {
            const char got = cvss::severity_letter(cvss::severity(cvss::Score::from_tenths(tenths)));
            c.expect(got == band, "row " + std::to_string(row.threat) + " " + cvss::Score::from_tenths(tenths).str() +
                                      " banded " + got + ", printed " + band);
        }
    }
    return c.verdict(std::to_string(c.count()) + " cells banded as printed");
}

Verdict worked_example() {
    Checker c;
    ModelInput in;
    in.devices = {"smart-lighting"};
    const Report r = score_model(in, cat());
    const int ids[] = {15, 16, 3, 6, 7, 13, 14, 9};
    const double scores[] = {9.1333333333333333, 9.1333333333333333, 7.6333333333333333, 7.6,
                             5.3666666666666667, 4.3, 4.2333333333333333, 2.0333333333333333};
    // The independent oracle must land on the same numbers before they count as expected values.
    const oracle::Result o = oracle::evaluate({"smart-lighting"}, {});
    c.expect(r.threats.size() == 8 && o.ranked.size() == 8, "expected 8 ranked threats");
    for (std::size_t i = 0; i < std::min<std::size_t>(8, r.threats.size()); ++i) {
        const auto& s = r.threats[i].score;
        c.expect(s.threat_id == ids[i], "rank " + std::to_string(i + 1) + " is threat " + std::to_string(s.threat_id));
        c.expect(std::abs(s.final_score - scores[i]) <= 1e-9, "threat " + std::to_string(s.threat_id) + " scored " +
                                                                  fixed(s.final_score, 10));
        if (i < o.ranked.size()) {
            c.expect(o.ranked[i].id == ids[i] && std::abs(o.ranked[i].final_value.to_double() - scores[i]) <= 1e-9,
                     "oracle disagrees at rank " + std::to_string(i + 1));
        }
    }
    return c.verdict("[15,16,3,6,7,13,14,9] within 1e-9, confirmed by the oracle");
}

Verdict conversation_rule() {
    Checker c;
    auto threat11 = [](const std::vector<std::string>& factors) -> const ThreatScore* {
        static Report r;
        ModelInput in;
        in.devices = {"home-virtual-assistant"};
        in.selected_risk_factors = factors;
        r = score_model(in, cat());
        for (const auto& t : r.threats) {
            if (t.score.threat_id == 11) return &t.score;
        }
        return nullptr;
    };
    c.expect(threat11({}) == nullptr, "threat 11 present without R6 or R13");
    for (const char* f : {"R6", "R13"}) {
        const ThreatScore* s = threat11({f});
        c.expect(s != nullptr && s->final_score > 0, std::string("threat 11 missing with ") + f);
    }
    const ThreatScore* both = threat11({"R6", "R13"});
    c.expect(both != nullptr && both->final_score > 0, "threat 11 missing with R6 and R13");
    return c.verdict("threat 11 absent without R6/R13, positive with either");
}

Verdict oracle_equivalence() {
    const auto start = std::chrono::steady_clock::now();
    Checker c;
    std::mt19937_64 rng(0xACCE55);
    const int cases = 10000;
    for (int i = 0; i < cases; ++i) {
        const double odds = std::uniform_real_distribution<double>(0.0, 0.6)(rng);
        const ModelInput in = testsupport::random_input(rng, cat(), odds, 0.5);
        c.expect(score_model(in, cat()) == testsupport::oracle_report(in, cat()), "case " + std::to_string(i));
    }
    const double elapsed = seconds_since(start);
    c.expect(elapsed < 30.0, "took " + fixed(elapsed, 1) + " s");
    return c.verdict(std::to_string(cases) + " random inputs, exact report equality, " + fixed(elapsed, 2) + " s");
}

Verdict monotonicity() {
    Checker c;
    std::mt19937_64 rng(0x3070);
    const int cases = 1000;
    long comparisons = 0;
    for (int i = 0; i < cases; ++i) {
        const ModelInput in = testsupport::random_input(rng, cat(), 0.25, 0.4);
        const auto before = evaluate_threats(in, cat());
        for (const auto& r : cat().risk_factors) {
            if (std::count(in.selected_risk_factors.begin(), in.selected_risk_factors.end(), r.id)) continue;
            ModelInput more = in;
            more.selected_risk_factors.push_back(r.id);
            const auto after = evaluate_threats(more, cat());
            c.expect(after.size() == before.size(), "adding " + r.id + " changed the threat set");
            for (std::size_t k = 0; k < std::min(before.size(), after.size()); ++k) {
                ++comparisons;
                c.expect(after[k].final_score >= before[k].final_score,
                         "adding " + r.id + " lowered threat " + std::to_string(before[k].threat_id));
            }
        }
        for (const auto& d : cat().devices) {
            if (std::count(in.devices.begin(), in.devices.end(), d.id)) continue;
            ModelInput more = in;
            more.devices.push_back(d.id);
            const auto after = evaluate_threats(more, cat());
            for (const auto& b : before) {
                auto it = std::find_if(after.begin(), after.end(), [&](const auto& a) { return a.threat_id == b.threat_id; });
                ++comparisons;
                c.expect(it != after.end(), "adding " + d.id + " dropped threat " + std::to_string(b.threat_id));
                if (it != after.end()) {
                    c.expect(it->final_score >= b.final_score,
                             "adding " + d.id + " lowered threat " + std::to_string(b.threat_id));
                }
            }
        }
    }
    return c.verdict(std::to_string(cases) + " inputs, " + std::to_string(comparisons) +
                     " comparisons for risk factors (a) and devices (b)");
}

Verdict empty_input() {
    Checker c;
    const Report r = score_model({}, cat());
    c.expect(r.threats.empty() && r.active_categories.empty() && r.guidance.empty(), "report not empty");
    for (auto format : {ReportFormat::Text, ReportFormat::Markdown, ReportFormat::Machine}) {
        const std::string body = render(r, format).body;
        const std::string name(to_string(format));
        if (format == ReportFormat::Machine) {
            const json doc = json::parse(body);
            c.expect(doc["threats"].empty() && doc["active_categories"].empty() && doc["guidance"].empty(),
                     "machine report not empty");
        } else {
            c.expect(testsupport::contains(body, "No threats identified"), name + " lacks the empty message");
            c.expect(!testsupport::contains(body, "Rank  Score") && !testsupport::contains(body, "| Rank"),
                     name + " has a results table");
        }
        const auto proc = testsupport::run_process({HOMETHREAT_CLI, "model", "--format", name});
        c.expect(proc.exit_code == 0, "CLI exit " + std::to_string(proc.exit_code) + " for " + name);
        c.expect(proc.err == "warning: no threats identified\n", "unexpected CLI stderr for " + name + ": " + proc.err);
        if (format == ReportFormat::Machine && proc.exit_code == 0) {
            c.expect(json::parse(proc.out)["threats"].empty(), "CLI machine output has threats");
        }
    }
    return c.verdict("empty in text, markdown and machine; CLI exit 0");
}

Verdict catalog_integrity() {
    Checker c;
    c.expect(validate(cat()).empty(), "default catalog has violations");
    auto expect_one = [&](const Catalog& mutated, const Violation& want, const std::string& label) {
        const auto got = validate(mutated);
        std::string seen;
        for (const auto& v : got) seen += (seen.empty() ? "" : " | ") + v.str();
        c.expect(got.size() == 1 && got[0] == want, label + " gave [" + seen + "]");
    };
    {
        Catalog m = cat();
        m.threats.erase(std::find_if(m.threats.begin(), m.threats.end(), [](const auto& t) { return t.id == 5; }));
        expect_one(m, {"threats", "missing threat 5"}, "dropping threat 5");
    }
    {
        Catalog m = cat();
        for (auto& r : m.risk_factors) {
            if (r.id == "R1") r.weight = 2;
        }
        expect_one(m, {"R1", "weight must be 3"}, "changing R1's weight");
    }
    {
        Catalog m = cat();
        for (auto& k : m.categories) {
            if (k.id == 3) k.bonus = 2.5;
        }
        expect_one(m, {"category 3", "bonus must equal 0.5 x factor count"}, "changing category 3's bonus");
    }
    return c.verdict("default valid; drop-threat, weight and bonus mutations each give exactly one violation");
}

// The shim only creates its log when it has something to record.
std::string events_in(const std::string& path) {
    return std::filesystem::exists(path) ? testsupport::read_file(path) : std::string();
}

std::vector<std::string> lines_starting(const std::string& text, const std::string& prefix) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        if (line.rfind(prefix, 0) == 0) out.push_back(line);
    }
    return out;
}

Verdict privacy() {
    Checker c;
    const std::vector<std::string> devices = {"smart-doorbell", "smart-locks", "home-virtual-assistant"};
    const std::string device_list = "smart-doorbell,smart-locks,home-virtual-assistant";

    // The shim must see a deliberate connection, otherwise silence below proves nothing.
    const std::string control_log = testsupport::temp_path("egress-control.log");
    testsupport::run_process({EGRESS_PROBE}, {{"LD_PRELOAD", EGRESS_GUARD}, {"EGRESS_GUARD_LOG", control_log}});
    c.expect(!lines_starting(events_in(control_log), "connect 127.0.0.1 9").empty(),
             "egress shim did not record the probe's connect");
    std::remove(control_log.c_str());

    const std::string cli_log = testsupport::temp_path("egress-cli.log");
    for (const char* format : {"text", "markdown", "machine"}) {
        const auto r = testsupport::run_process(
            {HOMETHREAT_CLI, "model", "--devices", device_list, "--risk-factors", "R1,R6,R11", "--format", format},
            {{"LD_PRELOAD", EGRESS_GUARD}, {"EGRESS_GUARD_LOG", cli_log}});
        c.expect(r.exit_code == 0, std::string("CLI failed for ") + format);
        for (const auto& d : devices) c.expect(!testsupport::contains(r.err, d), "CLI stderr names " + d);
    }
    const std::string cli_events = events_in(cli_log);
    c.expect(cli_events.empty(), "CLI touched the network: " + cli_events.substr(0, 80));
    std::remove(cli_log.c_str());

    const std::string svc_log = testsupport::temp_path("egress-service.log");
    std::string service_stderr;
    {
        testsupport::ServiceProcess proc({HOMETHREAT_SERVICE, "--port", "0", "--log-level", "trace"},
                                         {{"LD_PRELOAD", EGRESS_GUARD}, {"EGRESS_GUARD_LOG", svc_log}});
        c.expect(proc.port() > 0, "service did not start");
        if (proc.port() > 0) {
            httplib::Client client("127.0.0.1", proc.port());
            json body = {{"devices", devices}, {"risk_factors", {"R1", "R6", "R11"}}};
            const auto ok = client.Post("/api/model", body.dump(), "application/json");
            c.expect(ok && ok->status == 200 && !json::parse(ok->body)["threats"].empty(),
                     "service evaluation failed");
            const auto bad = client.Post("/api/model", R"({"devices":["smart-doorbell","not-a-device"]})",
                                         "application/json");
            c.expect(bad && bad->status == 422, "invalid request not rejected");
            c.expect(static_cast<bool>(client.Get("/api/catalog")), "catalog request failed");
        }
        c.expect(proc.stop() == 0, "service did not exit cleanly");
        service_stderr = proc.log();
    }
    const std::string svc_events = events_in(svc_log);
    c.expect(lines_starting(svc_events, "connect").empty() && lines_starting(svc_events, "sendto").empty(),
             "service made outbound calls: " + svc_events.substr(0, 80));
    c.expect(testsupport::contains(service_stderr, "POST /api/model 200"), "service access log missing");
    for (const auto& d : devices) c.expect(!testsupport::contains(service_stderr, d), "service log names " + d);
    c.expect(!testsupport::contains(service_stderr, "not-a-device"), "service log names a rejected id");
    std::remove(svc_log.c_str());

    return c.verdict("positive control seen; CLI and service made no outbound connections; logs carry no device ids");
}

Verdict round_trip() {
    Checker c;
    std::mt19937_64 rng(0x7219);
    const int cases = 1000;
    for (int i = 0; i < cases; ++i) {
        const std::string text = testsupport::random_vector(rng, true);
        try {
            const auto v = cvss::parse_vector(text);
            const std::string canon = cvss::canonical_string(v);
            const auto again = cvss::parse_vector(canon);
            c.expect(again == v, "round trip changed " + text);
            c.expect(cvss::canonical_string(again) == canon, "canonical form unstable for " + text);
            const auto s = cvss::score(v);
            c.expect(s.temporal <= s.base, "temporal above base for " + text);
        } catch (const std::exception& e) {
            c.expect(false, text + ": " + e.what());
        }
    }
    return c.verdict(std::to_string(cases) + " vectors round-trip; temporal <= base on all");
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Verdict()>> criteria[] = {
        {"CVSS golden table", golden_table},
        {"Severity bands", severity_bands},
        {"Worked example", worked_example},
        {"R6/R13 rule", conversation_rule},
        {"Oracle equivalence", oracle_equivalence},
        {"Monotonicity", monotonicity},
        {"Empty input", empty_input},
        {"Catalog integrity", catalog_integrity},
        {"Privacy and no egress", privacy},
        {"Vector round-trip", round_trip},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        if (!v.pass) ++failed;
        std::cout << (v.pass ? "PASS" : "FAIL") << "  " << name << ": " << v.detail << std::endl;
    }
    std::cout << (std::size(criteria) - failed) << "/" << std::size(criteria) << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
