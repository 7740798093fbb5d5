#include "tlsbath/units.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <charconv>
#include <stdexcept>
#include <string>
#include <utility>

namespace tlsbath::units {

namespace {

struct UnitEntry {
    std::string_view name;
    double scale;
};

// Scales map one unit of the suffix onto the SI base quantity (Hz, s, m, ...).
constexpr UnitEntry kFrequencyUnits[] = {
    {"hz", 1.0}, {"khz", 1e3}, {"mhz", 1e6}, {"ghz", 1e9}};
constexpr UnitEntry kTimeUnits[] = {
    {"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}, {"ps", 1e-12}};
constexpr UnitEntry kDensityUnits[] = {
    {"/hz", 1.0}, {"/khz", 1e-3}, {"/mhz", 1e-6}, {"/ghz", 1e-9}};
constexpr UnitEntry kLengthUnits[] = {
    {"m", 1.0}, {"mm", 1e-3}, {"um", 1e-6}, {"nm", 1e-9}, {"a", 1e-10}};
constexpr UnitEntry kAreaUnits[] = {
    {"m2", 1.0}, {"mm2", 1e-6}, {"um2", 1e-12}, {"nm2", 1e-18}};
constexpr UnitEntry kCapacitanceUnits[] = {{"f", 1.0}, {"pf", 1e-12}, {"ff", 1e-15}};
constexpr UnitEntry kVoltageUnits[] = {{"v", 1.0}, {"mv", 1e-3}, {"uv", 1e-6}, {"nv", 1e-9}};
constexpr UnitEntry kDipoleUnits[] = {
    {"cm", 1.0}, {"ea", elementary_charge * 1e-10}, {"d", 3.33564e-30}};
constexpr UnitEntry kVolumeDensityUnits[] = {
    {"/m3/hz", 1.0}, {"/um3/ghz", 1e18 * 1e-9}, {"/um3/hz", 1e18}};

std::string normalise_unit(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const auto c = static_cast<unsigned char>(raw[i]);
        // UTF-8 micro sign (C2 B5) and Greek mu (CE BC) both mean "u".
        if ((c == 0xC2 || c == 0xCE) && i + 1 < raw.size()) {
            const auto next = static_cast<unsigned char>(raw[i + 1]);
            if ((c == 0xC2 && next == 0xB5) || (c == 0xCE && next == 0xBC)) {
                out.push_back('u');
                ++i;
                continue;
            }
        }
        if (c == 0xC3 && i + 1 < raw.size() && static_cast<unsigned char>(raw[i + 1]) == 0x85) {
            out.push_back('a');  // Angstrom sign
            ++i;
            continue;
        }
        if (std::isspace(c) || c == '*' || c == '^') continue;
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

template <std::size_t N>
const UnitEntry* find_unit(const UnitEntry (&table)[N], std::string_view unit) {
    auto it = std::find_if(std::begin(table), std::end(table),
                           [&](const UnitEntry& e) { return e.name == unit; });
    return it == std::end(table) ? nullptr : it;
}

std::pair<double, std::string> split(std::string_view text) {
    auto first = text.find_first_not_of(" \t");
    if (first == std::string_view::npos) throw std::invalid_argument("empty quantity");
    text.remove_prefix(first);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc()) {
        throw std::invalid_argument("'" + std::string(text) + "' does not start with a number");
    }
    std::string unit = normalise_unit(std::string_view(ptr, text.data() + text.size() - ptr));
    return {value, std::move(unit)};
}

}  // namespace

std::string_view kind_name(Kind kind) {
    switch (kind) {
        case Kind::frequency: return "frequency";
        case Kind::duration: return "duration";
        case Kind::rate: return "rate";
        case Kind::density: return "density";
        case Kind::length: return "length";
        case Kind::area: return "area";
        case Kind::capacitance: return "capacitance";
        case Kind::voltage: return "voltage";
        case Kind::dipole: return "dipole";
        case Kind::volume_density: return "volume density";
    }
    return "quantity";
}

bool is_valid_unit(std::string_view unit, Kind kind) {
    const std::string u = normalise_unit(unit);
    switch (kind) {
        case Kind::frequency: return find_unit(kFrequencyUnits, u) != nullptr;
        case Kind::duration: return find_unit(kTimeUnits, u) != nullptr;
        case Kind::rate:
            return find_unit(kFrequencyUnits, u) != nullptr || find_unit(kTimeUnits, u) != nullptr;
        case Kind::density: return find_unit(kDensityUnits, u) != nullptr;
        case Kind::length: return find_unit(kLengthUnits, u) != nullptr;
        case Kind::area: return find_unit(kAreaUnits, u) != nullptr;
        case Kind::capacitance: return find_unit(kCapacitanceUnits, u) != nullptr;
        case Kind::voltage: return find_unit(kVoltageUnits, u) != nullptr;
        case Kind::dipole: return find_unit(kDipoleUnits, u) != nullptr;
        case Kind::volume_density: return find_unit(kVolumeDensityUnits, u) != nullptr;
    }
    return false;
}

double parse_quantity(std::string_view text, Kind kind) {
    auto [value, unit] = split(text);
    if (!std::isfinite(value)) throw std::invalid_argument("'" + std::string(text) + "' is not a finite number");
    if (unit.empty()) {
        throw std::invalid_argument("'" + std::string(text) + "' has no unit suffix (expected a " +
                                    std::string(kind_name(kind)) + ")");
    }
    auto fail = [&]() -> double {
        throw std::invalid_argument("unit '" + unit + "' is not a valid " +
                                    std::string(kind_name(kind)) + " unit");
    };
    switch (kind) {
        case Kind::frequency:
            if (auto* e = find_unit(kFrequencyUnits, unit)) return angular(value * e->scale);
            return fail();
        case Kind::duration:
            if (auto* e = find_unit(kTimeUnits, unit)) return value * e->scale;
            return fail();
        case Kind::rate:
            if (auto* e = find_unit(kFrequencyUnits, unit)) return angular(value * e->scale);
            if (auto* e = find_unit(kTimeUnits, unit)) {
                if (value <= 0.0) throw std::invalid_argument("lifetime must be positive");
                return 1.0 / (value * e->scale);
            }
            return fail();
        case Kind::density:
            if (auto* e = find_unit(kDensityUnits, unit)) return density_from_per_hz(value * e->scale);
            return fail();
        case Kind::length:
            if (auto* e = find_unit(kLengthUnits, unit)) return value * e->scale;
            return fail();
        case Kind::area:
            if (auto* e = find_unit(kAreaUnits, unit)) return value * e->scale;
            return fail();
        case Kind::capacitance:
            if (auto* e = find_unit(kCapacitanceUnits, unit)) return value * e->scale;
            return fail();
        case Kind::voltage:
            if (auto* e = find_unit(kVoltageUnits, unit)) return value * e->scale;
            return fail();
        case Kind::dipole:
            if (auto* e = find_unit(kDipoleUnits, unit)) return value * e->scale;
            return fail();
        case Kind::volume_density:
            if (auto* e = find_unit(kVolumeDensityUnits, unit)) return value * e->scale;
            return fail();
    }
    return fail();
}

}  // namespace tlsbath::units
