#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace relshot {

/// Half-open byte interval [begin, end) into a sentence's UTF-8 text.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  bool overlaps(const Span& other) const noexcept {
    return begin < other.end && other.begin < end;
  }
  friend bool operator==(const Span&, const Span&) = default;
};

/// A sentence with exactly one subject mention and one object mention.
///
/// Instances are only built through parse_tagged() or make(), both of which
/// enforce the invariants (non-empty, non-overlapping spans inside the text),
/// so a TaggedSentence value is always renderable.
class TaggedSentence {
 public:
  TaggedSentence() = default;

  /// Validating constructor. Throws TagError(kMalformedTag) on bad spans.
  static TaggedSentence make(std::string text, Span subject, Span object);

  const std::string& text() const noexcept { return text_; }
  Span subject_span() const noexcept { return subject_; }
  Span object_span() const noexcept { return object_; }
  std::string_view subject() const noexcept {
    return std::string_view(text_).substr(subject_.begin, subject_.size());
  }
  std::string_view object() const noexcept {
    return std::string_view(text_).substr(object_.begin, object_.size());
  }

  friend bool operator==(const TaggedSentence&, const TaggedSentence&) = default;

 private:
  TaggedSentence(std::string text, Span subject, Span object)
      : text_(std::move(text)), subject_(subject), object_(object) {}

  std::string text_;
  Span subject_;
  Span object_;
};

inline constexpr std::string_view kSubjectOpen = "<subject>";
inline constexpr std::string_view kSubjectClose = "</subject>";
inline constexpr std::string_view kObjectOpen = "<object>";
inline constexpr std::string_view kObjectClose = "</object>";

/// Parses `<subject>..</subject>` / `<object>..</object>` markup. Tag names are
/// matched case-insensitively and normalized to lower case on render.
///
/// Throws TagError with kind kMissingTag, kDuplicateTag or kMalformedTag.
TaggedSentence parse_tagged(std::string_view raw);

std::string render_tagged(const TaggedSentence& s);

}  // namespace relshot
