#pragma once

#include <string_view>

// Internal quantities are CGS throughout: cm, g, s, dyn/cm^2, cm^3/s.
namespace zerod::units {

inline constexpr double mmHg = 1333.22;  // dyn/cm^2
inline constexpr double kPa = 1.0e4;     // dyn/cm^2

enum class PressureUnit { CGS, MmHg, KPa };

/// Parses "cgs", "mmHg" or "kPa" (case-insensitive). Throws Error(Parse) otherwise.
PressureUnit parse_pressure_unit(std::string_view name);

constexpr double pressure_scale(PressureUnit u) noexcept {
  switch (u) {
    case PressureUnit::MmHg: return mmHg;
    case PressureUnit::KPa: return kPa;
    case PressureUnit::CGS: break;
  }
  return 1.0;
}

// Flow is always mL/s == cm^3/s, so only the pressure scale matters.
constexpr double to_cgs_pressure(double v, PressureUnit u) noexcept { return v * pressure_scale(u); }
constexpr double from_cgs_pressure(double v, PressureUnit u) noexcept { return v / pressure_scale(u); }
constexpr double to_cgs_resistance(double v, PressureUnit u) noexcept { return v * pressure_scale(u); }
constexpr double to_cgs_capacitance(double v, PressureUnit u) noexcept { return v / pressure_scale(u); }

}  // namespace zerod::units
