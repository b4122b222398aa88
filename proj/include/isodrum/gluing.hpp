#pragma once

#include "isodrum/error.hpp"

#include <array>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace isodrum {

// The three reflection colors, in their fixed order.
enum class Color : int { Red = 1, Blue = 2, Black = 3 };

inline constexpr std::array<Color, 3> kColors = {Color::Red, Color::Blue, Color::Black};

inline const char* color_name(Color c) {
  switch (c) {
    case Color::Red: return "red";
    case Color::Blue: return "blue";
    case Color::Black: return "black";
  }
  return "?";
}

inline std::optional<Color> color_from_name(const std::string& s) {
  if (s == "red") return Color::Red;
  if (s == "blue") return Color::Blue;
  if (s == "black") return Color::Black;
  return std::nullopt;
}

inline int color_index(Color c) { return static_cast<int>(c) - 1; }

// Diagonal mark used for an unglued (boundary) face when building the signed
// matrices: -1 under the Dirichlet convention, +1 under the Neumann one.
enum class SignConvention { Dirichlet, Neumann };

inline int boundary_sign(SignConvention conv) {
  return conv == SignConvention::Dirichlet ? -1 : +1;
}

inline std::optional<SignConvention> convention_from_name(const std::string& s) {
  if (s == "dirichlet") return SignConvention::Dirichlet;
  if (s == "neumann") return SignConvention::Neumann;
  return std::nullopt;
}

// Boundary is an explicit variant: std::nullopt means "this color glues
// nothing on this tile", never a sentinel tile index.
using GlueTarget = std::optional<int>;

// A reflection rule: per color, an involution with boundary marks on n tiles.
struct GluingGraph {
  int n_tiles = 0;
  // glue[color_index][tile] -> partner tile or boundary.
  std::array<std::vector<GlueTarget>, 3> glue;

  const std::vector<GlueTarget>& of(Color c) const { return glue[color_index(c)]; }
  std::vector<GlueTarget>& of(Color c) { return glue[color_index(c)]; }

  bool operator==(const GluingGraph& o) const {
    return n_tiles == o.n_tiles && glue == o.glue;
  }
};

// Validates the three GluingGraph invariants; throws Error on violation.
inline void validate_graph(const GluingGraph& g) {
  if (g.n_tiles <= 0) fail(ErrorCode::Range, "tile count must be positive");
  for (Color c : kColors) {
    const auto& m = g.of(c);
    if (static_cast<int>(m.size()) != g.n_tiles)
      fail(ErrorCode::Missing, std::string("color ") + color_name(c) +
                                   " does not cover every tile");
    for (int i = 0; i < g.n_tiles; ++i) {
      if (!m[i]) continue;
      int j = *m[i];
      if (j < 0 || j >= g.n_tiles)
        fail(ErrorCode::Range, std::string("tile index ") + std::to_string(j) +
                                   " out of range for color " + color_name(c));
      if (j == i)
        fail(ErrorCode::Involution, std::string("tile ") + std::to_string(i) +
                                        " glued to itself by " + color_name(c));
      if (!m[j] || *m[j] != i)
        fail(ErrorCode::Involution,
             std::string("color ") + color_name(c) + " maps " +
                 std::to_string(i) + " to " + std::to_string(j) +
                 " without the inverse entry");
    }
  }
  // Connectivity of the union of glued edges.
  std::vector<int> stack = {0};
  std::vector<bool> seen(g.n_tiles, false);
  seen[0] = true;
  int reached = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (Color c : kColors) {
      const GlueTarget& t = g.of(c)[u];
      if (t && !seen[*t]) {
        seen[*t] = true;
        ++reached;
        stack.push_back(*t);
      }
    }
  }
  if (reached != g.n_tiles)
    fail(ErrorCode::Disconnected, "gluing graph is not connected");
}

// Expected transplantation signature for the shipped tile counts.
inline std::optional<std::pair<int, int>> expected_signature_for(int n_tiles) {
  switch (n_tiles) {
    case 7: return std::make_pair(3, 4);
    case 13: return std::make_pair(4, 9);
    case 15: return std::make_pair(7, 8);
    case 21: return std::make_pair(5, 16);
    default: return std::nullopt;
  }
}

// A paired reflection rule: the two domains that transplant into each other.
struct FamilyPair {
  std::string family_id;
  GluingGraph left;
  GluingGraph right;
  std::optional<std::pair<int, int>> expected_signature;

  bool operator==(const FamilyPair& o) const {
    return family_id == o.family_id && left == o.left && right == o.right;
  }
};

namespace detail {

inline std::string strip(const std::string& line) {
  std::string s = line.substr(0, line.find('#'));
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] inline void syntax(int line_no, const std::string& msg) {
  fail(ErrorCode::Syntax, "line " + std::to_string(line_no) + ": " + msg);
}

inline int parse_tile_index(const std::string& tok, int line_no) {
  size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(tok, &pos);
  } catch (const std::exception&) {
    syntax(line_no, "expected a tile index, got '" + tok + "'");
  }
  if (pos != tok.size()) syntax(line_no, "trailing characters in '" + tok + "'");
  return v;
}

}  // namespace detail

// Parses the line-based gluing file format:
//   family <id> / tiles <N> / [left] <color lines> / [right] <color lines>
// where a color line is "<color> <i> <j>" for a glued pair or "<color> <i> -"
// for a boundary edge, and every (tile, color) pair must be covered exactly
// once per section.
inline FamilyPair parse_gluing_file(const std::string& text) {
  FamilyPair pair;
  int n_tiles = -1;
  bool have_family = false;
  GluingGraph* current = nullptr;
  // Tracks which (tile, color) combinations each section has covered.
  std::array<std::vector<bool>, 3> covered;
  auto open_section = [&](GluingGraph& g) {
    g.n_tiles = n_tiles;
    for (auto& m : g.glue) m.assign(n_tiles, std::nullopt);
    for (auto& cov : covered) cov.assign(n_tiles, false);
    current = &g;
  };
  auto close_section = [&](int line_no) {
    if (!current) return;
    for (Color c : kColors)
      for (int i = 0; i < n_tiles; ++i)
        if (!covered[color_index(c)][i])
          fail(ErrorCode::Missing,
               "line " + std::to_string(line_no) + ": tile " + std::to_string(i) +
                   " has no " + color_name(c) + " entry");
  };

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  bool saw_left = false, saw_right = false;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = detail::strip(raw);
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    if (head == "family") {
      if (have_family) detail::syntax(line_no, "duplicate 'family' line");
      if (!(ls >> pair.family_id)) detail::syntax(line_no, "missing family id");
      have_family = true;
    } else if (head == "tiles") {
      if (n_tiles >= 0) detail::syntax(line_no, "duplicate 'tiles' line");
      std::string tok;
      if (!(ls >> tok)) detail::syntax(line_no, "missing tile count");
      n_tiles = detail::parse_tile_index(tok, line_no);
      if (n_tiles <= 0) detail::syntax(line_no, "tile count must be positive");
    } else if (head == "[left]" || head == "[right]") {
      if (!have_family || n_tiles < 0)
        detail::syntax(line_no, "'family' and 'tiles' must precede sections");
      close_section(line_no);
      if (head == "[left]") {
        if (saw_left) detail::syntax(line_no, "duplicate [left] section");
        saw_left = true;
        open_section(pair.left);
      } else {
        if (saw_right) detail::syntax(line_no, "duplicate [right] section");
        saw_right = true;
        open_section(pair.right);
      }
    } else if (auto color = color_from_name(head)) {
      if (!current) detail::syntax(line_no, "color line outside a section");
      std::string ti, tj;
      if (!(ls >> ti >> tj)) detail::syntax(line_no, "expected '<color> <i> <j|->'");
      std::string extra;
      if (ls >> extra) detail::syntax(line_no, "trailing token '" + extra + "'");
      int i = detail::parse_tile_index(ti, line_no);
      if (i < 0 || i >= n_tiles)
        fail(ErrorCode::Range,
             "line " + std::to_string(line_no) + ": tile " + std::to_string(i) +
                 " out of range");
      auto& cov = covered[color_index(*color)];
      auto& m = current->of(*color);
      auto mark = [&](int t) {
        if (cov[t])
          fail(ErrorCode::Duplicate,
               "line " + std::to_string(line_no) + ": tile " + std::to_string(t) +
                   " has two " + std::string(color_name(*color)) + " entries");
        cov[t] = true;
      };
      if (tj == "-") {
        mark(i);
        m[i] = std::nullopt;
      } else {
        int j = detail::parse_tile_index(tj, line_no);
        if (j < 0 || j >= n_tiles)
          fail(ErrorCode::Range,
               "line " + std::to_string(line_no) + ": tile " + std::to_string(j) +
                   " out of range");
        if (j == i)
          fail(ErrorCode::Involution,
               "line " + std::to_string(line_no) + ": tile glued to itself");
        mark(i);
        mark(j);
        m[i] = j;
        m[j] = i;
      }
    } else {
      detail::syntax(line_no, "unrecognized directive '" + head + "'");
    }
  }
  if (!have_family) fail(ErrorCode::Syntax, "missing 'family' line");
  if (n_tiles < 0) fail(ErrorCode::Syntax, "missing 'tiles' line");
  if (!saw_left || !saw_right)
    fail(ErrorCode::Syntax, "both [left] and [right] sections are required");
  close_section(line_no + 1);
  validate_graph(pair.left);
  validate_graph(pair.right);
  pair.expected_signature = expected_signature_for(n_tiles);
  return pair;
}

// Serializes in the same format parse_gluing_file reads; glued pairs first
// (ascending), then boundary lines, per color. parse(serialize(p)) == p.
inline std::string serialize_gluing_file(const FamilyPair& pair) {
  std::ostringstream out;
  out << "family " << pair.family_id << "\n";
  out << "tiles " << pair.left.n_tiles << "\n";
  auto section = [&](const char* name, const GluingGraph& g) {
    out << name << "\n";
    for (Color c : kColors) {
      const auto& m = g.of(c);
      for (int i = 0; i < g.n_tiles; ++i)
        if (m[i] && *m[i] > i)
          out << color_name(c) << " " << i << " " << *m[i] << "\n";
      for (int i = 0; i < g.n_tiles; ++i)
        if (!m[i]) out << color_name(c) << " " << i << " -\n";
    }
  };
  section("[left]", pair.left);
  section("[right]", pair.right);
  return out.str();
}

// Relabels the colors of both graphs by perm (a bijection on the three
// colors); the transplantation signature is invariant under this.
inline FamilyPair permute_colors(const FamilyPair& pair,
                                 const std::array<Color, 3>& perm) {
  bool hit[3] = {false, false, false};
  for (Color c : perm) hit[color_index(c)] = true;
  if (!(hit[0] && hit[1] && hit[2]))
    fail(ErrorCode::Range, "color permutation is not a bijection");
  FamilyPair out = pair;
  for (int k = 0; k < 3; ++k) {
    out.left.glue[color_index(perm[k])] = pair.left.glue[k];
    out.right.glue[color_index(perm[k])] = pair.right.glue[k];
  }
  return out;
}

}  // namespace isodrum
