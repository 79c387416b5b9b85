#pragma once

// Internal unit system: angular frequencies and rates in rad/us, times in us,
// temperatures in kelvin. Linear frequencies (GHz/MHz/kHz) are converted
// exactly once, at the input boundary.

#include <numbers>
#include <string>
#include <string_view>

namespace pdiss::units {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double from_GHz(double f) { return kTwoPi * 1.0e3 * f; }
constexpr double from_MHz(double f) { return kTwoPi * f; }
constexpr double from_kHz(double f) { return kTwoPi * 1.0e-3 * f; }

constexpr double to_GHz(double w) { return w / (kTwoPi * 1.0e3); }
constexpr double to_MHz(double w) { return w / kTwoPi; }
constexpr double to_kHz(double w) { return w / (kTwoPi * 1.0e-3); }

constexpr double from_mK(double t) { return t * 1.0e-3; }
constexpr double to_mK(double t) { return t * 1.0e3; }

namespace constants {
// CODATA 2018 exact values.
inline constexpr double kPlanck = 6.62607015e-34;     // J s
inline constexpr double kBoltzmann = 1.380649e-23;    // J/K
inline constexpr double kHbar = kPlanck / kTwoPi;
// hbar * omega / k_B in kelvin for omega in rad/us.
inline constexpr double kHbarOverKbPerRadPerUs = kHbar / kBoltzmann * 1.0e6;
}  // namespace constants

// Serialized constants table; its hash goes into every run manifest.
std::string constants_table();

// Parse "<number><ws?><unit>" into the internal unit for that dimension.
// Frequencies (GHz, MHz, kHz, Hz) -> rad/us; temperatures (K, mK) -> K;
// times (s, ms, us, ns) -> us; rates (/us, /ms, /s, us^-1, ms^-1) -> 1/us.
enum class Dimension { frequency, temperature, time, rate };

double parse_quantity(std::string_view text, Dimension dim);

}  // namespace pdiss::units
