#pragma once

#include <string>
#include <string_view>

namespace selfsim {

/// Sign of the nonlinearity in the wave equation  u_tt - Δu ± u^7 = 0.
/// Defocusing carries +u^7 (positive energy), focusing carries -u^7.
enum class Sign { focusing, defocusing };

/// Coefficient s with which Q^7 enters the profile equation.
constexpr double sign_factor(Sign s) noexcept { return s == Sign::defocusing ? 1.0 : -1.0; }

std::string_view to_string(Sign s) noexcept;

/// Parses "focusing" / "defocusing"; throws selfsim::ConfigError otherwise.
Sign parse_sign(std::string_view text);

}  // namespace selfsim
