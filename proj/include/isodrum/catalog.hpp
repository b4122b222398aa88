#pragma once

#include "isodrum/gluing.hpp"

#include <string>
#include <vector>

namespace isodrum {

// Identifiers of the built-in reflection-rule families, in catalog order
// (ascending tile count, then index): 7_1..7_3, 13_1..13_9, 15_1..15_4, 21_1.
const std::vector<std::string>& catalog_family_ids();

// Verbatim text of one built-in family file. Throws E_UNKNOWN_FAMILY.
const std::string& catalog_family_text(const std::string& id);

// Parsed built-in family. Throws E_UNKNOWN_FAMILY.
FamilyPair catalog_family(const std::string& id);

}  // namespace isodrum
