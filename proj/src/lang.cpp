#include "coral/lang.hpp"

#include <algorithm>
#include <cctype>

namespace coral {

namespace {

struct LangInfo {
    std::string_view code;
    std::string_view name;
};

constexpr std::array<LangInfo, kLangCount> kLangTable = {{
    {"am", "Amharic"},
    {"ar", "Arabic"},
    {"as", "Assamese"},
    {"az", "Azerbaijani"},
    {"el", "Greek"},
    {"en", "English"},
    {"es", "Spanish"},
    {"fa", "Persian"},
    {"ha", "Hausa"},
    {"id", "Indonesian"},
    {"ko", "Korean"},
    {"su", "Sundanese"},
    {"zh", "Chinese"},
}};

} // namespace

std::string_view lang_code(Lang lang) {
    return kLangTable[static_cast<std::size_t>(lang)].code;
}

std::string_view lang_display_name(Lang lang) {
    return kLangTable[static_cast<std::size_t>(lang)].name;
}

std::optional<Lang> parse_lang(std::string_view text) {
    auto begin = text.find_first_not_of(" \t\r\n");
    if (begin == std::string_view::npos) {
        return std::nullopt;
    }
    auto end = text.find_last_not_of(" \t\r\n");
    text = text.substr(begin, end - begin + 1);

    std::string lowered(text);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (std::size_t i = 0; i < kLangTable.size(); ++i) {
        if (kLangTable[i].code == lowered) {
            return static_cast<Lang>(i);
        }
    }
    return std::nullopt;
}

const std::vector<Lang>& all_langs() {
    static const std::vector<Lang> pool = [] {
        std::vector<Lang> out;
        out.reserve(kLangCount);
        for (std::size_t i = 0; i < kLangCount; ++i) {
            out.push_back(static_cast<Lang>(i));
        }
        return out;
    }();
    return pool;
}

std::string format_lang_list(const std::vector<Lang>& langs) {
    std::string out = "[";
    for (std::size_t i = 0; i < langs.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += '"';
        out += lang_code(langs[i]);
        out += '"';
    }
    out += "]";
    return out;
}

} // namespace coral
