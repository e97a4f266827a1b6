#include "textrts/grammar.hpp"

#include <cctype>

#include "textrts/util.hpp"

namespace textrts {
namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)); }
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

// Single-segment scanner. `pos` points at '<'; on any outcome it is moved
// far enough to guarantee progress.
struct Scanner {
  std::string_view text;
  std::size_t pos = 0;

  std::size_t n() const { return text.size(); }
  char at(std::size_t i) const { return text[i]; }
  void skip_ws(std::size_t& i) const {
    while (i < n() && std::isspace(static_cast<unsigned char>(at(i)))) ++i;
  }

  // Candidate = '<' Ident '(' ... Only that shape is attempted; a bare
  // '<word>' or a stray '<' is prose.
  bool looks_like_candidate(std::size_t i) const {
    if (i >= n() || at(i) != '<') return false;
    ++i;
    if (i >= n() || !is_ident_start(at(i))) return false;
    while (i < n() && is_ident_char(at(i))) ++i;
    return i < n() && at(i) == '(';
  }

  struct Failure {
    std::size_t at;          // where parsing stopped
    std::string reason;
  };

  // Parses the candidate at `start` ('<'). On success returns true and sets
  // `action` + `end` (one past '>'). On failure fills `fail`.
  bool parse_candidate(std::size_t start, TextAction& action, std::size_t& end,
                       Failure& fail) const {
    std::size_t i = start + 1;
    std::size_t name_begin = i;
    while (i < n() && is_ident_char(at(i))) ++i;
    action.name.assign(text.substr(name_begin, i - name_begin));
    action.args.clear();
    ++i;  // '('
    skip_ws(i);
    if (i < n() && at(i) == ')') {
      ++i;
      if (i < n() && at(i) == '>') {
        end = i + 1;
        return true;
      }
      fail = {i, "unbalanced"};
      return false;
    }
    while (true) {
      if (i >= n()) {
        fail = {i, "unbalanced"};
        return false;
      }
      ArgValue arg;
      if (!parse_arg(i, arg, fail)) return false;
      action.args.push_back(std::move(arg));
      skip_ws(i);
      if (i < n() && at(i) == ',') {
        ++i;
        skip_ws(i);
        continue;
      }
      if (i < n() && at(i) == ')') {
        ++i;
        if (i < n() && at(i) == '>') {
          end = i + 1;
          return true;
        }
        fail = {i, "unbalanced"};
        return false;
      }
      fail = {i, i < n() && (at(i) == '>' || at(i) == '<') ? "unbalanced" : "bad-argument"};
      return false;
    }
  }

  bool parse_arg(std::size_t& i, ArgValue& arg, Failure& fail) const {
    char c = at(i);
    if (c == '[') return parse_coord(i, arg, fail);
    if (c == '\'') return parse_quoted(i, arg, fail);
    if (is_digit(c)) return parse_tag(i, arg, fail);
    if (is_ident_start(c)) {
      std::size_t begin = i;
      while (i < n() && is_ident_char(at(i))) ++i;
      arg = ArgValue::ident(std::string(text.substr(begin, i - begin)));
      return true;
    }
    fail = {i, c == '>' || c == '<' ? "unbalanced" : "bad-argument"};
    return false;
  }

  bool parse_coord(std::size_t& i, ArgValue& arg, Failure& fail) const {
    ++i;  // '['
    int x = 0, y = 0;
    if (!parse_int(i, x, fail)) return false;
    skip_ws(i);
    if (i >= n() || at(i) != ',') {
      fail = {i, "bad-argument"};
      return false;
    }
    ++i;
    if (!parse_int(i, y, fail)) return false;
    skip_ws(i);
    if (i >= n() || at(i) != ']') {
      fail = {i, i >= n() ? "unbalanced" : "bad-argument"};
      return false;
    }
    ++i;
    arg = ArgValue::coord(x, y);
    return true;
  }

  bool parse_int(std::size_t& i, int& out, Failure& fail) const {
    skip_ws(i);
    std::size_t begin = i;
    while (i < n() && is_digit(at(i))) ++i;
    if (i == begin || i - begin > 9) {
      fail = {i, "bad-argument"};
      return false;
    }
    out = 0;
    for (std::size_t k = begin; k < i; ++k) out = out * 10 + (at(k) - '0');
    return true;
  }

  bool parse_tag(std::size_t& i, ArgValue& arg, Failure& fail) const {
    std::size_t begin = i;
    if (at(i) == '0' && i + 1 < n() && (at(i + 1) == 'x' || at(i + 1) == 'X')) {
      i += 2;
      while (i < n() && std::isxdigit(static_cast<unsigned char>(at(i)))) ++i;
    } else {
      while (i < n() && is_digit(at(i))) ++i;
    }
    std::uint64_t tag = 0;
    if (!parse_u64(text.substr(begin, i - begin), tag) || tag == 0) {
      fail = {i, "bad-argument"};
      return false;
    }
    arg = ArgValue::unit_tag(tag);
    return true;
  }

  bool parse_quoted(std::size_t& i, ArgValue& arg, Failure& fail) const {
    if (i + 2 >= n() || at(i + 1) != '\'' || at(i + 2) != '\'') {
      fail = {i, "missing-triple-quote"};
      return false;
    }
    std::size_t body = i + 3;
    std::size_t close = text.find("'''", body);
    if (close == std::string_view::npos) {
      fail = {n(), "missing-triple-quote"};
      return false;
    }
    arg = ArgValue::quoted(std::string(text.substr(body, close - body)));
    i = close + 3;
    return true;
  }
};

// Rejected raw text: candidate start through the next '>' (kept short for
// diagnostics when no '>' is near).
std::string rejection_raw(std::string_view text, std::size_t start, std::size_t fail_at) {
  std::size_t stop = text.find('>', fail_at);
  std::size_t end = stop == std::string_view::npos
                        ? std::min(text.size(), start + 120)
                        : std::min(stop + 1, start + 200);
  return std::string(text.substr(start, end - start));
}

}  // namespace

ParseReport extract_actions(std::string_view response_text) {
  ParseReport report;
  Scanner sc{response_text};
  std::size_t i = 0;
  while (i < response_text.size()) {
    if (response_text[i] != '<' || !sc.looks_like_candidate(i)) {
      ++i;
      continue;
    }
    TextAction action;
    std::size_t end = 0;
    Scanner::Failure fail{};
    if (sc.parse_candidate(i, action, end, fail)) {
      report.actions.push_back(std::move(action));
      i = end;
    } else {
      report.rejected.push_back({rejection_raw(response_text, i, fail.at), fail.reason});
      // Resume at the failure point so a nested candidate is still seen.
      i = fail.at > i ? fail.at : i + 1;
    }
  }
  return report;
}

MessageReport extract_message_actions(std::string_view response_text) {
  MessageReport out;
  ParseReport report = extract_actions(response_text);
  for (auto& action : report.actions) {
    if (action.name != "MessageTo") continue;
    if (action.args.size() == 2 && action.args[0].kind == ArgValue::Kind::Ident &&
        action.args[1].kind == ArgValue::Kind::Text) {
      out.messages.push_back({action.args[0].text, action.args[1].text});
    } else {
      out.rejected.push_back({format_action(action), "bad-argument"});
    }
  }
  for (auto& rej : report.rejected) {
    if (rej.raw.find("MessageTo") != std::string::npos) out.rejected.push_back(rej);
  }
  return out;
}

std::string format_action(const TextAction& action) {
  std::string out = "<" + action.name + "(";
  for (std::size_t i = 0; i < action.args.size(); ++i) {
    if (i) out += ", ";
    const ArgValue& a = action.args[i];
    switch (a.kind) {
      case ArgValue::Kind::Coord:
        out += "[" + std::to_string(a.x) + ", " + std::to_string(a.y) + "]";
        break;
      case ArgValue::Kind::Tag:
        out += to_hex(a.tag);
        break;
      case ArgValue::Kind::Ident:
        out += a.text;
        break;
      case ArgValue::Kind::Text:
        out += "'''" + a.text + "'''";
        break;
      case ArgValue::Kind::None:
        break;
    }
  }
  out += ")>";
  return out;
}

}  // namespace textrts
