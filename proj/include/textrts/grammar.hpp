#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace textrts {

// Textual actions exchanged with language models look like <Name(args)>.
// Args are coordinates `[x, y]`, unit tags (decimal or 0x hex), bare
// identifiers, or triple-quoted text ('''...''', used by MessageTo).
// Parsing is syntax-only; whether a name/arity exists in the action space
// is the bridge registry's job.

enum class ArgFrame { Unknown, Screen, Minimap };

struct ArgValue {
  enum class Kind { Coord, Tag, Ident, Text, None };

  Kind kind = Kind::None;
  ArgFrame frame = ArgFrame::Unknown;  // Coord only, refined by the bridge
  int x = 0, y = 0;                    // Coord
  std::uint64_t tag = 0;               // Tag
  std::string text;                    // Ident (bare word) / Text (quoted)

  static ArgValue coord(int x, int y, ArgFrame frame = ArgFrame::Unknown) {
    ArgValue v;
    v.kind = Kind::Coord;
    v.frame = frame;
    v.x = x;
    v.y = y;
    return v;
  }
  static ArgValue unit_tag(std::uint64_t tag) {
    ArgValue v;
    v.kind = Kind::Tag;
    v.tag = tag;
    return v;
  }
  static ArgValue ident(std::string name) {
    ArgValue v;
    v.kind = Kind::Ident;
    v.text = std::move(name);
    return v;
  }
  static ArgValue quoted(std::string content) {
    ArgValue v;
    v.kind = Kind::Text;
    v.text = std::move(content);
    return v;
  }

  // Frame tags are a bridge refinement, not part of the surface syntax,
  // so they do not participate in structural equality.
  bool operator==(const ArgValue& o) const {
    return kind == o.kind && x == o.x && y == o.y && tag == o.tag && text == o.text;
  }
};

struct TextAction {
  std::string name;
  std::vector<ArgValue> args;
  bool operator==(const TextAction&) const = default;
};

struct RejectedSegment {
  std::string raw;
  std::string reason;  // "unbalanced", "missing-triple-quote", "bad-argument"
};

struct ParseReport {
  std::vector<TextAction> actions;  // document order
  std::vector<RejectedSegment> rejected;
};

struct MessageAction {
  std::string target;
  std::string content;  // verbatim bytes between the triple quotes
};

struct MessageReport {
  std::vector<MessageAction> messages;
  std::vector<RejectedSegment> rejected;
};

// Never throws; anything that is not a well-formed segment is either prose
// (ignored) or a rejected candidate with a reason.
ParseReport extract_actions(std::string_view response_text);

// MessageTo(Target, '''content''') occurrences only. Content is preserved
// byte-for-byte, including embedded <...> sequences.
MessageReport extract_message_actions(std::string_view response_text);

// Canonical serialization; extract_actions(format_action(a)) recovers a.
std::string format_action(const TextAction& action);

inline TextAction no_operation() { return TextAction{"No_Operation", {}}; }

}  // namespace textrts
