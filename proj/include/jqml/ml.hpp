#pragma once

#include "jqml/frame.hpp"
#include "jqml/function.hpp"
#include "jqml/item.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace jqml::ml {

/// Item-level type of a parameter.
enum class ParamType {
  Boolean,       // boolean
  Double,        // double (also for native float and long)
  DoubleArray,   // ["double"]
  DoubleMatrix,  // [["double"]]
  Integer,       // integer
  IntegerArray,  // ["integer"]
  String,        // string
  StringArray,   // ["string"]
  StageArray,    // array of transformer or estimator function items
};

std::string_view param_type_name(ParamType type);

using FunctionRef = std::shared_ptr<const FunctionItem>;
using ParamValue =
    std::variant<bool, double, std::vector<double>, std::vector<std::vector<double>>, std::int64_t,
                 std::vector<std::int64_t>, std::string, std::vector<std::string>,
                 std::vector<FunctionRef>>;
using ParamMap = std::map<std::string, ParamValue>;

struct ParamSpec {
  std::string name;
  ParamType type;
  std::optional<ParamValue> default_value;
  /// Only meaningful when fitting; rejected when calling a fitted model.
  bool fit_only = false;
};

enum class ComponentKind { Transformer, Estimator };

struct ComponentSpec {
  std::string name;
  ComponentKind kind;
  std::vector<ParamSpec> params;

  const ParamSpec* find(std::string_view param) const;
};

const std::vector<ComponentSpec>& registry();
const ComponentSpec* find_component(std::string_view name);

/// Checks every key of `params` (which must be an object) against `spec` and
/// converts the values. Only the supplied keys are returned. With
/// `transform_only`, fit-only keys are rejected. Throws UNKNOWN_PARAM or
/// PARAM_TYPE_ERROR.
ParamMap parse_params(const ComponentSpec& spec, const Item& params, bool transform_only = false);

/// parse_params() merged over the defaults of `spec`.
ParamMap validate_params(const ComponentSpec& spec, const Item& params);

/// `base` with every entry of `overrides` replacing it.
ParamMap merge_params(ParamMap base, const ParamMap& overrides);

/// Converts a value back to its item form (function items included).
Item param_to_item(const ParamValue& value);

const std::string& get_string(const ParamMap& params, const std::string& key);
double get_double(const ParamMap& params, const std::string& key);
std::int64_t get_integer(const ParamMap& params, const std::string& key);
bool get_boolean(const ParamMap& params, const std::string& key);
/// Throws MISSING_PARAM when absent.
const ParamValue& require(const ParamMap& params, const std::string& key);
bool has(const ParamMap& params, const std::string& key);

/// get-transformer: throws UNKNOWN_TRANSFORMER.
Item get_transformer(const std::string& name, const Item& params);
/// get-estimator: throws UNKNOWN_ESTIMATOR.
Item get_estimator(const std::string& name, const Item& params);

/// Fitted state behind a model function item.
struct ModelArtifact : NativeState {
  std::string kind;  // e.g. "LinearSVCModel"
  ParamMap params;   // transform-time parameter echo
  std::vector<double> weights;
  double intercept = 0.0;
  std::vector<double> max_abs;                 // MaxAbsScalerModel
  std::vector<double> classes;                 // NaiveBayesModel
  std::vector<double> log_priors;              // NaiveBayesModel
  std::vector<std::vector<double>> theta;      // NaiveBayesModel, one row per class
  std::vector<FunctionRef> stages;             // PipelineModel
};

/// State behind a transformer created by get-transformer.
struct TransformerState : NativeState {
  std::string name;
  ParamMap params;  // creation-time parameters
};

/// Wraps an artifact into a callable model.
Item make_model(std::shared_ptr<const ModelArtifact> artifact);

/// Builds a transformer function item with the given creation parameters.
Item make_transformer(const std::string& name, ParamMap params);

/// A frame argument, rebuilding schema-tagged local sequences. Throws
/// NOT_A_FRAME.
std::shared_ptr<const Frame> require_frame(const Sequence& rows, CallContext& ctx);

/// JSON document describing a registry-created model or transformer.
/// Throws UNKNOWN_MODEL_KIND for anything else.
Item model_to_item(const FunctionItem& model);
/// Inverse of model_to_item(). Throws UNKNOWN_MODEL_KIND.
Item model_from_item(const Item& document);

/// Throws IO_ERROR or UNKNOWN_MODEL_KIND.
void save_model(const FunctionItem& model, const std::string& path);
Item load_model(const std::string& path);

}  // namespace jqml::ml
