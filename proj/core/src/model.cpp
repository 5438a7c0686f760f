#include "asmc/model.hpp"

namespace asmc {

std::string_view to_string(AdaptivityMode mode) noexcept {
  return mode == AdaptivityMode::Adaptive ? "adaptive" : "nonadaptive";
}

AdaptivityMode parse_mode(std::string_view text) {
  if (text == "adaptive") return AdaptivityMode::Adaptive;
  if (text == "nonadaptive") return AdaptivityMode::Nonadaptive;
  throw Error(ErrorCode::ParseError,
              "unknown mode '" + std::string(text) + "' (adaptive|nonadaptive)");
}

}  // namespace asmc
