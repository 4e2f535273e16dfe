#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "mmerge/hmm.hpp"
#include "mmerge/scfg.hpp"

namespace mmerge {

using Model = std::variant<Hmm, Scfg>;

/// "hmm alphabet: ..." header, "state <id> emit <sym>:<count> ..." lines and
/// "trans <from> -> <to> : <count>" lines, with INITIAL and FINAL as ^ and $.
std::string serialize_hmm(const Hmm& hmm);
Hmm parse_hmm(std::string_view text);

/// "start: S", "A -> B C # <count>" and "A => 'a' # <count>" lines.
std::string serialize_scfg(const Scfg& g);
Scfg parse_scfg(std::string_view text);

/// Detects the format from the first non-comment line.
Model parse_model(std::string_view text);
std::string serialize_model(const Model& model);

Model load_model_file(const std::string& path);
void save_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace mmerge
