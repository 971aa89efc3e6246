#include "reference_tables.hpp"

namespace homethreat::reference {

namespace {

constexpr std::array<ThreatRef, 16> kThreats{{
    {1, 'S', "outsider-commands"},
    {2, 'S', "fake-server-signals"},
    {3, 'S', "fake-device-signals"},
    {4, 'T', "tampered-voice-command"},
    {5, 'T', "compromised-server-signals"},
    {6, 'T', "modified-device-requests"},
    {7, 'T', "compromised-action-signals"},
    {8, 'I', "personal-data-leaks"},
    {9, 'I', "action-leaks"},
    {10, 'I', "eavesdroppers"},
    {11, 'I', "private-conversation-leaks"},
    {12, 'D', "interfering-commands"},
    {13, 'D', "congesting-server-signals"},
    {14, 'D', "congesting-action-signals"},
    {15, 'E', "server-privilege-escalation"},
    {16, 'E', "action-privilege-escalation"},
}};

constexpr std::array kAll{1, 2, 3, 4, 5};
constexpr std::array kCam{2, 3, 4, 5};
constexpr std::array kDoorbell{2, 3, 5};
constexpr std::array kInternalOnly{3};
constexpr std::array kSignedInOnline{2, 3, 4};
constexpr std::array kLocks{3, 4, 5};
constexpr std::array kSleep{2, 3};

constexpr std::array<DeviceRef, 12> kDevices{{
    {"home-virtual-assistant", kAll},
    {"smart-security-cam", kCam},
    {"smart-doorbell", kDoorbell},
    {"smart-lighting", kInternalOnly},
    {"smart-fitness-aid", kSignedInOnline},
    {"smart-kitchenware", kInternalOnly},
    {"smart-locks", kLocks},
    {"amazon-dash", kSignedInOnline},
    {"smart-thermostat", kCam},
    {"smart-home-controller", kAll},
    {"smart-sleep-tracker", kSleep},
    {"other-smart-device", kAll},
}};

constexpr std::array kCat1{1, 4, 7, 10, 11, 12};
constexpr std::array kCat2{2, 8};
constexpr std::array kCat3{3, 6, 7, 9, 13, 14, 15, 16};
constexpr std::array kCat4{2, 5, 8, 11, 13, 15};
constexpr std::array kCat5{3, 6, 7, 9, 14, 16};

constexpr std::array<CategoryRef, 5> kCategories{{
    {1, kCat1, 11},
    {2, kCat2, 17},
    {3, kCat3, 4},
    {4, kCat4, 10},
    {5, kCat5, 4},
}};

constexpr std::array kNetworkWide{2, 3, 5, 6, 7, 8, 9, 12, 13, 14, 15, 16};
constexpr std::array kR2{1, 6};
constexpr std::array kR4{2, 3, 6, 9, 15, 16};
constexpr std::array kR5{1, 4, 10, 12};
constexpr std::array kOnly11{11};
constexpr std::array kR7{1, 11, 12};
constexpr std::array kR8{15, 16};
constexpr std::array kR9{2, 3, 5, 6, 7, 8, 11, 13, 14, 15, 16};
constexpr std::array kR10{2, 3, 5, 6, 7, 8, 9, 11, 13, 14, 15, 16};
constexpr std::array kR11{1, 10, 11, 12};
constexpr std::array kOnly9{9};

constexpr std::array kOffR1{2, 3};
constexpr std::array kOffR2{1};
constexpr std::array kOffR3{5, 7, 8, 9};
constexpr std::array kOffR4{7, 8, 9};
constexpr std::array kOffR5{10, 12};
constexpr std::array kOffR8{5, 7};
constexpr std::array kOffCongestion{13, 14};
constexpr std::span<const int> kNone{};

constexpr std::array<RiskFactorRef, 14> kRiskFactors{{
    {"R1", 3, kNetworkWide, kOffR1},
    {"R2", 1, kR2, kOffR2},
    {"R3", 2, kNetworkWide, kOffR3},
    {"R4", 2, kR4, kOffR4},
    {"R5", 1, kR5, kOffR5},
    {"R6", 1, kOnly11, kOnly11},
    {"R7", 2, kR7, kNone},
    {"R8", 3, kR8, kOffR8},
    {"R9", 3, kR9, kOffCongestion},
    {"R10", 3, kR10, kOffCongestion},
    {"R11", 2, kR11, kNone},
    {"R12", 2, kOnly9, kOnly9},
    {"R13", 1, kOnly11, kOnly11},
    {"R14", 1, kOnly11, kNone},
}};

}  // namespace

std::span<const ThreatRef> threats() { return kThreats; }
std::span<const DeviceRef> devices() { return kDevices; }
std::span<const CategoryRef> categories() { return kCategories; }
std::span<const RiskFactorRef> risk_factors() { return kRiskFactors; }

}  // namespace homethreat::reference
