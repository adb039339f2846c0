#include "relshot/core/tagged_sentence.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>

#include "relshot/core/errors.hpp"

namespace relshot {
namespace {

enum class Role { kSubject, kObject };

struct Marker {
  std::string_view literal;
  Role role;
  bool opening;
};

constexpr std::array<Marker, 4> kMarkers = {{
    {kSubjectOpen, Role::kSubject, true},
    {kSubjectClose, Role::kSubject, false},
    {kObjectOpen, Role::kObject, true},
    {kObjectClose, Role::kObject, false},
}};

bool iequals_prefix(std::string_view text, std::size_t pos,
                    std::string_view literal) {
  if (text.size() - pos < literal.size()) return false;
  for (std::size_t i = 0; i < literal.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(text[pos + i])) != literal[i])
      return false;
  }
  return true;
}

std::optional<Marker> marker_at(std::string_view raw, std::size_t pos) {
  if (raw[pos] != '<') return std::nullopt;
  for (const auto& m : kMarkers) {
    if (iequals_prefix(raw, pos, m.literal)) return m;
  }
  return std::nullopt;
}

const char* role_name(Role r) {
  return r == Role::kSubject ? "subject" : "object";
}

}  // namespace

TaggedSentence TaggedSentence::make(std::string text, Span subject,
                                    Span object) {
  const auto fits = [&](Span s) {
    return s.begin < s.end && s.end <= text.size();
  };
  if (!fits(subject) || !fits(object)) {
    throw TagError(TagErrorKind::kMalformedTag,
                   "entity span is empty or outside the text");
  }
  if (subject.overlaps(object)) {
    throw TagError(TagErrorKind::kMalformedTag,
                   "subject and object spans overlap");
  }
  return TaggedSentence(std::move(text), subject, object);
}

TaggedSentence parse_tagged(std::string_view raw) {
  if (raw.empty()) {
    throw TagError(TagErrorKind::kMissingTag, "empty sentence");
  }
  std::string text;
  text.reserve(raw.size());

  constexpr std::size_t kNone = 2;
  std::size_t open = kNone;  // role index of the open tag
  std::size_t open_at = 0;
  std::array<int, 2> seen = {0, 0};
  std::array<Span, 2> spans{};

  for (std::size_t pos = 0; pos < raw.size();) {
    const auto m = marker_at(raw, pos);
    if (!m) {
      text.push_back(raw[pos++]);
      continue;
    }
    pos += m->literal.size();
    const auto idx = static_cast<std::size_t>(m->role);
    if (m->opening) {
      if (open != kNone) {
        throw TagError(TagErrorKind::kMalformedTag,
                       std::string("<") + role_name(m->role) +
                           "> opened inside <" + role_name(static_cast<Role>(open)) + ">");
      }
      open = idx;
      open_at = text.size();
      continue;
    }
    if (open != idx) {
      throw TagError(TagErrorKind::kMalformedTag,
                     std::string("</") + role_name(m->role) +
                         "> without matching opening tag");
    }
    open = kNone;
    if (text.size() == open_at) {
      throw TagError(TagErrorKind::kMalformedTag,
                     std::string("empty <") + role_name(m->role) + "> span");
    }
    ++seen[idx];
    spans[idx] = Span{open_at, text.size()};
  }
  if (open != kNone) {
    throw TagError(TagErrorKind::kMalformedTag,
                   std::string("unclosed <") + role_name(static_cast<Role>(open)) + "> tag");
  }
  for (std::size_t i = 0; i < 2; ++i) {
    const char* name = role_name(static_cast<Role>(i));
    if (seen[i] == 0) {
      throw TagError(TagErrorKind::kMissingTag,
                     std::string("no <") + name + "> tag");
    }
    if (seen[i] > 1) {
      throw TagError(TagErrorKind::kDuplicateTag,
                     std::string("more than one <") + name + "> tag");
    }
  }
  return TaggedSentence::make(std::move(text), spans[0], spans[1]);
}

std::string render_tagged(const TaggedSentence& s) {
  struct Insert {
    std::size_t at;
    std::string_view literal;
  };
  const Span subj = s.subject_span();
  const Span obj = s.object_span();
  // Closing markers sort before opening ones at the same offset so adjacent
  // spans render as "</subject><object>".
  std::array<Insert, 4> inserts = {{
      {subj.begin, kSubjectOpen},
      {subj.end, kSubjectClose},
      {obj.begin, kObjectOpen},
      {obj.end, kObjectClose},
  }};
  std::stable_sort(inserts.begin(), inserts.end(),
                   [](const Insert& a, const Insert& b) {
                     if (a.at != b.at) return a.at < b.at;
                     return a.literal[1] == '/' && b.literal[1] != '/';
                   });
  std::string out;
  out.reserve(s.text().size() + 40);
  std::size_t cursor = 0;
  for (const auto& ins : inserts) {
    out.append(s.text(), cursor, ins.at - cursor);
    out.append(ins.literal);
    cursor = ins.at;
  }
  out.append(s.text(), cursor, std::string::npos);
  return out;
}

}  // namespace relshot
