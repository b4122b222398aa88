#include "isodrum/catalog.hpp"

#include "isodrum/error.hpp"

#include <map>

namespace isodrum {
namespace {

struct EmbeddedFamily {
  const char* id;
  const char* text;
};

constexpr EmbeddedFamily kEmbedded[] = {
#include "catalog_data.inc"
};

const std::map<std::string, std::string>& embedded_map() {
  static const std::map<std::string, std::string> m = [] {
    std::map<std::string, std::string> out;
    for (const auto& e : kEmbedded) out.emplace(e.id, e.text);
    return out;
  }();
  return m;
}

}  // namespace

const std::vector<std::string>& catalog_family_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> out;
    for (const auto& e : kEmbedded) out.emplace_back(e.id);
    return out;
  }();
  return ids;
}

const std::string& catalog_family_text(const std::string& id) {
  const auto& m = embedded_map();
  auto it = m.find(id);
  if (it == m.end())
    fail(ErrorCode::UnknownFamily, "no built-in family named '" + id + "'");
  return it->second;
}

FamilyPair catalog_family(const std::string& id) {
  return parse_gluing_file(catalog_family_text(id));
}

}  // namespace isodrum
