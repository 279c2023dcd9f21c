#include "jqml/error.hpp"

#include <sstream>

namespace jqml {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::LexError: return "LEX_ERROR";
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::UnknownFunction: return "UNKNOWN_FUNCTION";
    case ErrorCode::UndefinedVariable: return "UNDEFINED_VARIABLE";
    case ErrorCode::DuplicateFunction: return "DUPLICATE_FUNCTION";
    case ErrorCode::SerializeFunction: return "SERIALIZE_FUNCTION";
    case ErrorCode::EbvError: return "EBV_ERROR";
    case ErrorCode::NoCastRule: return "NO_CAST_RULE";
    case ErrorCode::RangeError: return "RANGE_ERROR";
    case ErrorCode::LexicalError: return "LEXICAL_ERROR";
    case ErrorCode::TypeError: return "TYPE_ERROR";
    case ErrorCode::DivisionByZero: return "DIVISION_BY_ZERO";
    case ErrorCode::DuplicateKey: return "DUPLICATE_KEY";
    case ErrorCode::DuplicateKeyInMerge: return "DUPLICATE_KEY_IN_MERGE";
    case ErrorCode::JsonParseError: return "JSON_PARSE_ERROR";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::UnknownTypeName: return "UNKNOWN_TYPE_NAME";
    case ErrorCode::MalformedSchema: return "MALFORMED_SCHEMA";
    case ErrorCode::ValidationError: return "VALIDATION_ERROR";
    case ErrorCode::NonObjectRow: return "NON_OBJECT_ROW";
    case ErrorCode::SchemaMismatch: return "SCHEMA_MISMATCH";
    case ErrorCode::DuplicateColumn: return "DUPLICATE_COLUMN";
    case ErrorCode::UnknownColumn: return "UNKNOWN_COLUMN";
    case ErrorCode::NotAFunction: return "NOT_A_FUNCTION";
    case ErrorCode::ArityMismatch: return "ARITY_MISMATCH";
    case ErrorCode::ModeAssumptionViolated: return "MODE_ASSUMPTION_VIOLATED";
    case ErrorCode::IoError: return "IO_ERROR";
    case ErrorCode::MaterializationCapExceeded: return "MATERIALIZATION_CAP_EXCEEDED";
    case ErrorCode::UnknownTransformer: return "UNKNOWN_TRANSFORMER";
    case ErrorCode::UnknownEstimator: return "UNKNOWN_ESTIMATOR";
    case ErrorCode::UnknownParam: return "UNKNOWN_PARAM";
    case ErrorCode::MissingParam: return "MISSING_PARAM";
    case ErrorCode::ParamTypeError: return "PARAM_TYPE_ERROR";
    case ErrorCode::NotAFrame: return "NOT_A_FRAME";
    case ErrorCode::NonNumericInput: return "NON_NUMERIC_INPUT";
    case ErrorCode::RaggedVectors: return "RAGGED_VECTORS";
    case ErrorCode::EmptyTrainingSet: return "EMPTY_TRAINING_SET";
    case ErrorCode::BadLabel: return "BAD_LABEL";
    case ErrorCode::NegativeFeature: return "NEGATIVE_FEATURE";
    case ErrorCode::StageTypeError: return "STAGE_TYPE_ERROR";
    case ErrorCode::UnknownModelKind: return "UNKNOWN_MODEL_KIND";
  }
  return "UNKNOWN_ERROR";
}

ErrorFamily error_family(ErrorCode code) {
  switch (code) {
    case ErrorCode::LexError:
    case ErrorCode::ParseError:
    case ErrorCode::DuplicateFunction:
      return ErrorFamily::Parse;
    case ErrorCode::UnknownFunction:
    case ErrorCode::UndefinedVariable:
      return ErrorFamily::Resolve;
    case ErrorCode::IoError:
      return ErrorFamily::Io;
    case ErrorCode::MaterializationCapExceeded:
      return ErrorFamily::Cap;
    default:
      return ErrorFamily::Dynamic;
  }
}

namespace {

std::string render(ErrorCode code, const std::string& detail, SourcePos pos) {
  std::ostringstream out;
  out << error_code_name(code) << ": " << detail;
  if (pos.valid()) out << " (line " << pos.line << ", column " << pos.column << ")";
  return out.str();
}

}  // namespace

Error::Error(ErrorCode code, std::string message, SourcePos pos)
    : std::runtime_error(render(code, message, pos)),
      code_(code),
      detail_(std::move(message)),
      pos_(pos) {}

Error Error::with_pos(SourcePos pos) const {
  if (pos_.valid()) return *this;
  return Error(code_, detail_, pos);
}

Error Error::with_context(std::string_view context) const {
  return Error(code_, std::string(context) + ": " + detail_, pos_);
}

void fail(ErrorCode code, std::string message, SourcePos pos) {
  throw Error(code, std::move(message), pos);
}

}  // namespace jqml
