#ifndef REVKG_ERROR_H_
#define REVKG_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace revkg {

// Base class for all recoverable pipeline errors. The CLI maps these to exit
// code 2; InvariantViolation maps to 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input. `line` is 1-based, or 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string &cause)
      : Error(line == 0 ? cause
                        : "line " + std::to_string(line) + ": " + cause),
        line_(line),
        cause_(cause) {}

  std::size_t line() const { return line_; }
  const std::string &cause() const { return cause_; }

 private:
  std::size_t line_;
  std::string cause_;
};

#define REVKG_DEFINE_ERROR(Name)  \
  class Name : public Error {     \
   public:                        \
    using Error::Error;           \
  }

REVKG_DEFINE_ERROR(IoError);
REVKG_DEFINE_ERROR(DuplicateId);
REVKG_DEFINE_ERROR(EmptyCorpus);
REVKG_DEFINE_ERROR(UnknownConcernLabel);
REVKG_DEFINE_ERROR(EmptyTrainingSet);
REVKG_DEFINE_ERROR(MissingPos);
REVKG_DEFINE_ERROR(MissingChunk);
REVKG_DEFINE_ERROR(OverlapError);
REVKG_DEFINE_ERROR(OutOfBounds);
REVKG_DEFINE_ERROR(LengthMismatch);
REVKG_DEFINE_ERROR(InvalidGoldTags);
REVKG_DEFINE_ERROR(MissingAnnotation);
REVKG_DEFINE_ERROR(UnknownRelation);
REVKG_DEFINE_ERROR(DanglingEndpoint);
REVKG_DEFINE_ERROR(EmptyAfterNormalization);
REVKG_DEFINE_ERROR(SchemaViolation);
REVKG_DEFINE_ERROR(SchemaMismatch);
REVKG_DEFINE_ERROR(IntegrityError);
REVKG_DEFINE_ERROR(UnknownApp);
REVKG_DEFINE_ERROR(UnknownConcern);
REVKG_DEFINE_ERROR(InvariantViolation);

#undef REVKG_DEFINE_ERROR

// InvalidTag carries the offending line like ParseError.
class InvalidTag : public ParseError {
 public:
  using ParseError::ParseError;
};

}  // namespace revkg

#endif  // REVKG_ERROR_H_
