#include "jqml/types.hpp"

namespace jqml {

SequenceType SequenceType::function_one(FunctionSignature signature) {
  SequenceType type;
  type.test = ItemTest::Function;
  type.occurrence = Occurrence::One;
  type.signature = std::make_shared<const FunctionSignature>(std::move(signature));
  return type;
}

std::string SequenceType::to_string() const {
  std::string out;
  switch (test) {
    case ItemTest::Item: out = "item()"; break;
    case ItemTest::Object: out = "object"; break;
    case ItemTest::Array: out = "array"; break;
    case ItemTest::Atomic: out = std::string(kind_name(atomic)); break;
    case ItemTest::Function:
      out = signature ? signature->to_string() : "function(*)";
      if (occurrence != Occurrence::One) out = "(" + out + ")";
      break;
  }
  switch (occurrence) {
    case Occurrence::One: break;
    case Occurrence::ZeroOrOne: out += "?"; break;
    case Occurrence::ZeroOrMore: out += "*"; break;
    case Occurrence::OneOrMore: out += "+"; break;
  }
  return out;
}

bool SequenceType::operator==(const SequenceType& other) const {
  if (test != other.test || occurrence != other.occurrence) return false;
  if (test == ItemTest::Atomic && atomic != other.atomic) return false;
  if (test != ItemTest::Function) return true;
  if (!signature || !other.signature) return !signature && !other.signature;
  return *signature == *other.signature;
}

std::string FunctionSignature::to_string() const {
  std::string out = "function(";
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) out += ", ";
    out += params[i].to_string();
  }
  return out + ") as " + result.to_string();
}

FunctionShape shape_of(const FunctionSignature& signature) {
  if (signature.arity() != 2) return FunctionShape::Other;
  if (signature.result.is_function() && signature.result.is_single()) return FunctionShape::Estimator;
  return FunctionShape::Transformer;
}

FunctionSignature transformer_signature() {
  return FunctionSignature{{SequenceType::object_star(), SequenceType::object_one()},
                           SequenceType::object_star()};
}

FunctionSignature estimator_signature() {
  return FunctionSignature{{SequenceType::object_star(), SequenceType::object_one()},
                           SequenceType::function_one(transformer_signature())};
}

}  // namespace jqml
