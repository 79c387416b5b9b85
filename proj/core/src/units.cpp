#include "pdiss/units.hpp"

#include "pdiss/errors.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <sstream>

namespace pdiss::units {

std::string constants_table() {
    char buf[256];
    std::ostringstream os;
    std::snprintf(buf, sizeof buf, "h=%.9e J*s\n", constants::kPlanck);
    os << buf;
    std::snprintf(buf, sizeof buf, "k_B=%.9e J/K\n", constants::kBoltzmann);
    os << buf;
    std::snprintf(buf, sizeof buf, "hbar/k_B per rad/us=%.12e K\n", constants::kHbarOverKbPerRadPerUs);
    os << buf;
    os << "angular unit=rad/us\n";
    return os.str();
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

double parse_quantity(std::string_view text, Dimension dim) {
    std::string_view s = trim(text);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{}) {
        throw InvalidArgument("expected a number with unit, got '" + std::string(text) + "'");
    }
    std::string_view unit = trim(std::string_view(ptr, s.data() + s.size() - ptr));
    if (unit.empty()) {
        throw InvalidArgument("missing unit suffix in '" + std::string(text) + "'");
    }
    switch (dim) {
        case Dimension::frequency:
            if (unit == "GHz") return from_GHz(value);
            if (unit == "MHz") return from_MHz(value);
            if (unit == "kHz") return from_kHz(value);
            if (unit == "Hz") return from_kHz(value * 1.0e-3);
            break;
        case Dimension::temperature:
            if (unit == "K") return value;
            if (unit == "mK") return from_mK(value);
            break;
        case Dimension::time:
            if (unit == "us") return value;
            if (unit == "ns") return value * 1.0e-3;
            if (unit == "ms") return value * 1.0e3;
            if (unit == "s") return value * 1.0e6;
            break;
        case Dimension::rate:
            if (unit == "/us" || unit == "us^-1") return value;
            if (unit == "/ms" || unit == "ms^-1") return value * 1.0e-3;
            if (unit == "/ns" || unit == "ns^-1") return value * 1.0e3;
            if (unit == "/s" || unit == "s^-1") return value * 1.0e-6;
            break;
    }
    throw InvalidArgument("unrecognized unit '" + std::string(unit) + "' in '" + std::string(text) + "'");
}

}  // namespace pdiss::units
