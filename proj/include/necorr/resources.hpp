#pragma once

#include <string_view>

namespace necorr::resources {

// Embedded copies of the files under data/. The files stay the canonical
// source; these accessors exist so the binaries run without a data directory.
std::string_view lexicon_tsv();
std::string_view ipa_features_tsv();
std::string_view letter_rules_tsv();
std::string_view prompt_module1();
std::string_view prompt_module2_plain();
std::string_view prompt_module2_reason();
std::string_view prompt_module3();

}  // namespace necorr::resources
