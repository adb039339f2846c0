#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace relshot {

/// Base of every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TagErrorKind { kMissingTag, kDuplicateTag, kMalformedTag };

class TagError : public Error {
 public:
  TagError(TagErrorKind kind, const std::string& what)
      : Error(what), kind_(kind) {}
  TagErrorKind kind() const noexcept { return kind_; }

 private:
  TagErrorKind kind_;
};

/// Input file does not match the expected record layout.
class SchemaError : public Error {
 public:
  SchemaError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line), detail_(what) {}
  SchemaError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what), line_(line), detail_(what) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

class InvariantViolation : public Error {
 public:
  InvariantViolation(std::string episode_id, std::string detail)
      : Error("episode '" + episode_id + "': " + detail),
        episode_id_(std::move(episode_id)),
        detail_(std::move(detail)) {}
  const std::string& episode_id() const noexcept { return episode_id_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string episode_id_;
  std::string detail_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};
class DuplicateId : public Error {
 public:
  using Error::Error;
};
class NormViolation : public Error {
 public:
  using Error::Error;
};
class EmptyInput : public Error {
 public:
  using Error::Error;
};
class KTooLarge : public Error {
 public:
  using Error::Error;
};
class SizeMismatch : public Error {
 public:
  using Error::Error;
};
class LengthMismatch : public Error {
 public:
  using Error::Error;
};
class InvalidConfig : public Error {
 public:
  using Error::Error;
};
class UnboundPlaceholder : public Error {
 public:
  using Error::Error;
};
/// Transport-level failure that survived the retry budget.
class EndpointError : public Error {
 public:
  using Error::Error;
};
class UnparseableAnswer : public Error {
 public:
  using Error::Error;
};
class GenerationInvalid : public Error {
 public:
  using Error::Error;
};
class MissingArtifacts : public Error {
 public:
  using Error::Error;
};

}  // namespace relshot
