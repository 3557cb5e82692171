#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace cneval {

// The five scored aspects plus the holistic Overall score. Enumerator order
// is the column order of every rendered table.
enum class Aspect { Opposition, Relatedness, Specificity, Toxicity, Fluency, Overall };

inline constexpr std::array<Aspect, 5> kScoredAspects = {
    Aspect::Opposition, Aspect::Relatedness, Aspect::Specificity, Aspect::Toxicity,
    Aspect::Fluency};

inline constexpr std::array<Aspect, 6> kAllAspects = {
    Aspect::Opposition, Aspect::Relatedness, Aspect::Specificity,
    Aspect::Toxicity,   Aspect::Fluency,     Aspect::Overall};

std::string_view aspect_name(Aspect a) noexcept;

// Case-insensitive lookup of a canonical aspect name.
std::optional<Aspect> parse_aspect(std::string_view name) noexcept;

}  // namespace cneval
