#include "cneval/aspect.hpp"

#include <algorithm>
#include <cctype>

namespace cneval {

std::string_view aspect_name(Aspect a) noexcept {
  switch (a) {
    case Aspect::Opposition: return "Opposition";
    case Aspect::Relatedness: return "Relatedness";
    case Aspect::Specificity: return "Specificity";
    case Aspect::Toxicity: return "Toxicity";
    case Aspect::Fluency: return "Fluency";
    case Aspect::Overall: return "Overall";
  }
  return "?";
}

std::optional<Aspect> parse_aspect(std::string_view name) noexcept {
  for (Aspect a : kAllAspects) {
    auto canon = aspect_name(a);
    if (canon.size() == name.size() &&
        std::equal(canon.begin(), canon.end(), name.begin(), [](char x, char y) {
          return std::tolower(static_cast<unsigned char>(x)) ==
                 std::tolower(static_cast<unsigned char>(y));
        })) {
      return a;
    }
  }
  return std::nullopt;
}

}  // namespace cneval
