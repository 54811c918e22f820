#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace coral {

// Closed pool of corpus languages. Enumerator order is lexicographic by
// code, so enum comparisons coincide with code-string comparisons.
enum class Lang : std::uint8_t {
    am,
    ar,
    as,
    az,
    el,
    en,
    es,
    fa,
    ha,
    id,
    ko,
    su,
    zh,
};

inline constexpr std::size_t kLangCount = 13;

std::string_view lang_code(Lang lang);
std::string_view lang_display_name(Lang lang);

// Case-insensitive; surrounding whitespace ignored. Codes outside the pool
// yield nullopt — unknown languages are never constructible.
std::optional<Lang> parse_lang(std::string_view text);

// All pool members in code order.
const std::vector<Lang>& all_langs();

// Renders e.g. ["ko", "en"] — the list style the planner prompts use.
std::string format_lang_list(const std::vector<Lang>& langs);

} // namespace coral
