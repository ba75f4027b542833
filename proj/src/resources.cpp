#include "necorr/resources.hpp"

#include "res_ipa_features.hpp"
#include "res_letter_rules.hpp"
#include "res_lexicon.hpp"
#include "res_prompt_module1.hpp"
#include "res_prompt_module2_plain.hpp"
#include "res_prompt_module2_reason.hpp"
#include "res_prompt_module3.hpp"

namespace necorr::resources {

namespace {
std::string_view view(const unsigned char* data, unsigned long size) {
  return {reinterpret_cast<const char*>(data), size};
}
}  // namespace

std::string_view lexicon_tsv() { return view(res_lexicon_data, res_lexicon_size); }
std::string_view ipa_features_tsv() { return view(res_ipa_features_data, res_ipa_features_size); }
std::string_view letter_rules_tsv() { return view(res_letter_rules_data, res_letter_rules_size); }
std::string_view prompt_module1() { return view(res_prompt_module1_data, res_prompt_module1_size); }
std::string_view prompt_module2_plain() {
  return view(res_prompt_module2_plain_data, res_prompt_module2_plain_size);
}
std::string_view prompt_module2_reason() {
  return view(res_prompt_module2_reason_data, res_prompt_module2_reason_size);
}
std::string_view prompt_module3() { return view(res_prompt_module3_data, res_prompt_module3_size); }

}  // namespace necorr::resources
