#pragma once

#include <string_view>

namespace tmf {

/// Contents of data/lexicon.json compiled into the library.
std::string_view builtin_lexicon_json();
/// Contents of data/stopwords.txt compiled into the library.
std::string_view builtin_stopwords_text();

} // namespace tmf
