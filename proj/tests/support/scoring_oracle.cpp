#include "scoring_oracle.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <stdexcept>

namespace oracle {

Fraction::Fraction(std::int64_t n, std::int64_t d) {
    if (d < 0) n = -n, d = -d;
    const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
    num = n / (g == 0 ? 1 : g);
    den = d / (g == 0 ? 1 : g);
}

Fraction Fraction::operator+(const Fraction& o) const { return {num * o.den + o.num * den, den * o.den}; }
Fraction Fraction::operator-(const Fraction& o) const { return {num * o.den - o.num * den, den * o.den}; }
bool Fraction::operator<(const Fraction& o) const { return num * o.den < o.num * den; }

namespace {

const std::map<std::string, std::vector<int>> kDeviceCategories = {
    {"home-virtual-assistant", {1, 2, 3, 4, 5}},
    {"smart-security-cam", {2, 3, 4, 5}},
    {"smart-doorbell", {2, 3, 5}},
    {"smart-lighting", {3}},
    {"smart-fitness-aid", {2, 3, 4}},
    {"smart-kitchenware", {3}},
    {"smart-locks", {3, 4, 5}},
    {"amazon-dash", {2, 3, 4}},
    {"smart-thermostat", {2, 3, 4, 5}},
    {"smart-home-controller", {1, 2, 3, 4, 5}},
    {"smart-sleep-tracker", {2, 3}},
    {"other-smart-device", {1, 2, 3, 4, 5}},
};

const std::map<int, std::vector<int>> kCategoryThreats = {
    {1, {1, 4, 7, 10, 11, 12}},
    {2, {2, 8}},
    {3, {3, 6, 7, 9, 13, 14, 15, 16}},
    {4, {2, 5, 8, 11, 13, 15}},
    {5, {3, 6, 7, 9, 14, 16}},
};

const std::map<int, int> kCategoryFactorCount = {{1, 11}, {2, 17}, {3, 4}, {4, 10}, {5, 4}};

// Base, temporal, environmental in tenths, from the CVSS v3.1 equations.
const std::map<int, std::array<int, 3>> kCvssTenths = {
    {1, {43, 43, 29}},  {2, {63, 53, 59}},  {3, {64, 61, 74}},  {4, {60, 60, 64}},
    {5, {44, 37, 37}},  {6, {58, 49, 61}},  {7, {64, 59, 68}},  {8, {44, 41, 58}},
    {9, {33, 29, 29}},  {10, {43, 43, 61}}, {11, {49, 49, 67}}, {12, {46, 46, 46}},
    {13, {47, 41, 41}}, {14, {47, 40, 40}}, {15, {75, 69, 70}}, {16, {75, 69, 70}},
};

struct Factor {
    int value;
    std::vector<int> related;
};

const std::map<int, Factor> kFactors = {
    {1, {3, {2, 3, 5, 6, 7, 8, 9, 12, 13, 14, 15, 16}}},
    {2, {1, {1, 6}}},
    {3, {2, {2, 3, 5, 6, 7, 8, 9, 12, 13, 14, 15, 16}}},
    {4, {2, {2, 3, 6, 9, 15, 16}}},
    {5, {1, {1, 4, 10, 12}}},
    {6, {1, {11}}},
    {7, {2, {1, 11, 12}}},
    {8, {3, {15, 16}}},
    {9, {3, {2, 3, 5, 6, 7, 8, 11, 13, 14, 15, 16}}},
    {10, {3, {2, 3, 5, 6, 7, 8, 9, 11, 13, 14, 15, 16}}},
    {11, {2, {1, 10, 11, 12}}},
    {12, {2, {9}}},
    {13, {1, {11}}},
    {14, {1, {11}}},
};

const std::map<std::string, int> kThreatByName = {
    {"outsider commands", 1},          {"fake server signals", 2},
    {"fake device signals", 3},        {"tampered voice command", 4},
    {"compromised server signals", 5}, {"modified device requests", 6},
    {"compromised action signals", 7}, {"personal data leaks", 8},
    {"action leaks", 9},               {"eavesdroppers", 10},
    {"private conversation leaks", 11}, {"interfering commands", 12},
    {"congesting server signals", 13}, {"congesting action signals", 14},
    {"server privilege escalation", 15}, {"action privilege escalation", 16},
};

// "If Rn is not on, reduce ..." written with the threat names.
const std::map<int, std::vector<std::string>> kMitigations = {
    {1, {"fake server signals", "fake device signals"}},
    {2, {"outsider commands"}},
    {3, {"personal data leaks", "compromised server signals", "compromised action signals", "action leaks"}},
    {4, {"personal data leaks", "compromised action signals", "action leaks"}},
    {5, {"eavesdroppers", "interfering commands"}},
    {6, {"private conversation leaks"}},
    {8, {"compromised server signals", "compromised action signals"}},
    {9, {"congesting server signals", "congesting action signals"}},
    {10, {"congesting server signals", "congesting action signals"}},
    {12, {"action leaks"}},
    {13, {"private conversation leaks"}},
};

int factor_number(const std::string& id) {
    if (id.size() < 2 || id[0] != 'R') throw std::invalid_argument("bad risk factor " + id);
    return std::stoi(id.substr(1));
}

}  // namespace

const std::vector<std::string>& device_ids() {
    static const std::vector<std::string> ids = {
        "home-virtual-assistant", "smart-security-cam", "smart-doorbell", "smart-lighting",
        "smart-fitness-aid",      "smart-kitchenware",  "smart-locks",    "amazon-dash",
        "smart-thermostat",       "smart-home-controller", "smart-sleep-tracker", "other-smart-device",
    };
    return ids;
}

Result evaluate(const std::vector<std::string>& devices, const std::vector<std::string>& risk_factors) {
    Result result;

    for (const auto& d : devices) {
        for (int cat : kDeviceCategories.at(d)) result.categories.insert(cat);
    }

    std::set<int> threats;
    for (int cat : result.categories) {
        for (int t : kCategoryThreats.at(cat)) threats.insert(t);
    }

    std::set<int> on;
    for (const auto& r : risk_factors) on.insert(factor_number(r));

    for (int t : threats) {
        ThreatResult tr;
        tr.id = t;
        const auto& cvss = kCvssTenths.at(t);
        tr.cvss_mean = Fraction(cvss[0] + cvss[1] + cvss[2], 30);
        Fraction calc = tr.cvss_mean;

        for (int r = 1; r <= 14; ++r) {
            const Factor& f = kFactors.at(r);
            if (on.count(r) && std::count(f.related.begin(), f.related.end(), t)) {
                calc = calc + Fraction(f.value);
                tr.added_factors.emplace_back("R" + std::to_string(r), f.value);
            }
        }

        for (const auto& [r, names] : kMitigations) {
            if (on.count(r)) continue;
            for (const auto& name : names) {
                if (kThreatByName.at(name) != t) continue;
                if (Fraction(0) < calc) ++tr.subtractions;
                calc = calc - Fraction(1);
                if (calc < Fraction(0)) calc = Fraction(0);
            }
        }

        for (int cat : result.categories) {
            const auto& list = kCategoryThreats.at(cat);
            if (std::count(list.begin(), list.end(), t)) {
                tr.bonus = tr.bonus + Fraction(kCategoryFactorCount.at(cat), 2);
            }
        }
        calc = calc + tr.bonus;

        if (t == 11 && !on.count(6) && !on.count(13)) {
            calc = Fraction(0);
            tr.zeroed = true;
        }

        tr.final_value = calc;
        result.all.push_back(tr);
    }

    for (const auto& tr : result.all) {
        if (Fraction(0) < tr.final_value) result.ranked.push_back(tr);
    }
    std::sort(result.ranked.begin(), result.ranked.end(), [](const ThreatResult& a, const ThreatResult& b) {
        if (a.final_value == b.final_value) return a.id < b.id;
        return b.final_value < a.final_value;
    });
    return result;
}

}  // namespace oracle
