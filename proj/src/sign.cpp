#include "selfsim/sign.hpp"

#include "selfsim/errors.hpp"

namespace selfsim {

std::string_view to_string(Sign s) noexcept {
  return s == Sign::defocusing ? "defocusing" : "focusing";
}

Sign parse_sign(std::string_view text) {
  if (text == "defocusing") return Sign::defocusing;
  if (text == "focusing") return Sign::focusing;
  throw ConfigError("sign: expected \"focusing\" or \"defocusing\", got \"" + std::string(text) + "\"");
}

}  // namespace selfsim
