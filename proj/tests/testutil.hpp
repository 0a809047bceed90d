#pragma once

// Shared helpers for the unit-test suite: deterministic RNG plumbing,
// relative-error accounting, and a small structural XML scanner used to
// sanity-check emitted SVG documents without an external parser.

#include <cctype>
#include <random>
#include <string>
#include <vector>

namespace testutil {

inline std::mt19937& rng() {
  static std::mt19937 gen(0x5eed5u);
  return gen;
}

inline double rand_in(double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return d(rng());
}

inline double rel_err(double got, double want) {
  const double scale = std::max(std::abs(want), 1e-300);
  return std::abs(got - want) / scale;
}

// Minimal well-formedness scan: tags balance, attributes are quoted, and no
// stray '<' or '>' appears in text. Returns an empty string when the
// document passes, else a short diagnostic.
inline std::string xml_check(const std::string& doc) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  const std::size_t n = doc.size();
  // optional prolog/doctype/comments are consumed like ordinary tags
  while (i < n) {
    if (doc[i] != '<') {
      if (doc[i] == '>') return "stray '>' in text";
      ++i;
      continue;
    }
    std::size_t close = doc.find('>', i);
    if (close == std::string::npos) return "unterminated tag";
    std::string tag = doc.substr(i + 1, close - i - 1);
    i = close + 1;
    if (tag.empty()) return "empty tag";
    if (tag[0] == '?' || tag[0] == '!') continue;  // prolog, doctype, comment
    bool closing = tag[0] == '/';
    bool self_closing = tag.back() == '/';
    if (closing) {
      std::string name = tag.substr(1);
      if (stack.empty()) return "closing tag </" + name + "> with empty stack";
      if (stack.back() != name)
        return "mismatched </" + name + ">, open <" + stack.back() + ">";
      stack.pop_back();
      continue;
    }
    // extract element name
    std::size_t sp = 0;
    while (sp < tag.size() && !std::isspace(static_cast<unsigned char>(tag[sp])) &&
           tag[sp] != '/')
      ++sp;
    std::string name = tag.substr(0, sp);
    if (name.empty()) return "nameless tag";
    // attributes: every '=' must be followed by a quoted value
    std::size_t p = sp;
    while (p < tag.size()) {
      if (tag[p] == '=') {
        ++p;
        while (p < tag.size() && std::isspace(static_cast<unsigned char>(tag[p]))) ++p;
        if (p >= tag.size() || (tag[p] != '"' && tag[p] != '\''))
          return "unquoted attribute value in <" + name + ">";
        const char q = tag[p];
        std::size_t endq = tag.find(q, p + 1);
        if (endq == std::string::npos) return "unterminated attribute in <" + name + ">";
        p = endq + 1;
      } else {
        ++p;
      }
    }
    if (!self_closing) stack.push_back(name);
  }
  if (!stack.empty()) return "unclosed <" + stack.back() + "> at end of document";
  return {};
}

}  // namespace testutil
