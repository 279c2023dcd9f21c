#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace jqml {

struct SourcePos {
  int line = 0;
  int column = 0;

  bool valid() const { return line > 0; }
  bool operator==(const SourcePos&) const = default;
};

enum class ErrorCode {
  // front end
  LexError,
  ParseError,
  UnknownFunction,
  UndefinedVariable,
  DuplicateFunction,
  // data model
  SerializeFunction,
  EbvError,
  NoCastRule,
  RangeError,
  LexicalError,
  TypeError,
  DivisionByZero,
  DuplicateKey,
  DuplicateKeyInMerge,
  JsonParseError,
  InvalidArgument,
  // schema and frames
  UnknownTypeName,
  MalformedSchema,
  ValidationError,
  NonObjectRow,
  SchemaMismatch,
  DuplicateColumn,
  UnknownColumn,
  // runtime
  NotAFunction,
  ArityMismatch,
  ModeAssumptionViolated,
  IoError,
  MaterializationCapExceeded,
  // ml
  UnknownTransformer,
  UnknownEstimator,
  UnknownParam,
  MissingParam,
  ParamTypeError,
  NotAFrame,
  NonNumericInput,
  RaggedVectors,
  EmptyTrainingSet,
  BadLabel,
  NegativeFeature,
  StageTypeError,
  UnknownModelKind,
};

/// Upper-case identifier used in diagnostics, e.g. "PARSE_ERROR".
std::string_view error_code_name(ErrorCode code);

/// Coarse error family; doubles as the CLI exit code.
enum class ErrorFamily : int {
  Parse = 1,
  Resolve = 2,
  Dynamic = 3,
  Io = 4,
  Cap = 5,
};

ErrorFamily error_family(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, SourcePos pos = {});

  ErrorCode code() const { return code_; }
  const std::string& detail() const { return detail_; }
  const SourcePos& pos() const { return pos_; }

  /// Returns a copy that carries `pos` unless a position is already attached.
  Error with_pos(SourcePos pos) const;
  /// Returns a copy whose message is prefixed with `context`.
  Error with_context(std::string_view context) const;

 private:
  ErrorCode code_;
  std::string detail_;
  SourcePos pos_;
};

[[noreturn]] void fail(ErrorCode code, std::string message, SourcePos pos = {});

}  // namespace jqml
