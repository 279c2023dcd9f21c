#include "jqml/error.hpp"
#include "jqml/ml.hpp"

namespace jqml::ml {

std::string_view param_type_name(ParamType type) {
  switch (type) {
    case ParamType::Boolean: return "boolean";
    case ParamType::Double: return "double";
    case ParamType::DoubleArray: return "[double]";
    case ParamType::DoubleMatrix: return "[[double]]";
    case ParamType::Integer: return "integer";
    case ParamType::IntegerArray: return "[integer]";
    case ParamType::String: return "string";
    case ParamType::StringArray: return "[string]";
    case ParamType::StageArray: return "[function(object*, object) as item*]";
  }
  return "?";
}

const ParamSpec* ComponentSpec::find(std::string_view param) const {
  for (const ParamSpec& p : params) {
    if (p.name == param) return &p;
  }
  return nullptr;
}

namespace {

ParamSpec param(std::string name, ParamType type, std::optional<ParamValue> def = std::nullopt,
                bool fit_only = false) {
  return ParamSpec{std::move(name), type, std::move(def), fit_only};
}

std::vector<ParamSpec> linear_params(bool with_bounds) {
  std::vector<ParamSpec> out{
      param("featuresCol", ParamType::String, std::string("features")),
      param("labelCol", ParamType::String, std::string("label"), true),
      param("predictionCol", ParamType::String, std::string("prediction")),
      param("maxIter", ParamType::Integer, std::int64_t{10}, true),
      param("stepSize", ParamType::Double, 0.1, true),
      param("regParam", ParamType::Double, 0.0, true),
      param("fitIntercept", ParamType::Boolean, true, true),
  };
  if (with_bounds) {
    out.push_back(param("lowerBoundsOnCoefficients", ParamType::DoubleMatrix, std::nullopt, true));
    out.push_back(param("upperBoundsOnCoefficients", ParamType::DoubleMatrix, std::nullopt, true));
    out.push_back(param("lowerBoundsOnIntercepts", ParamType::DoubleArray, std::nullopt, true));
    out.push_back(param("upperBoundsOnIntercepts", ParamType::DoubleArray, std::nullopt, true));
  }
  return out;
}

[[noreturn]] void type_error(const ParamSpec& spec, const Item& value) {
  fail(ErrorCode::ParamTypeError, spec.name + " expects " + std::string(param_type_name(spec.type)) +
                                      ", got " + value.type_name());
}

double to_double_param(const ParamSpec& spec, const Item& value) {
  if (!value.is_atomic() || !value.atomic().is_numeric()) type_error(spec, value);
  return value.atomic().to_double();
}

std::int64_t to_integer_param(const ParamSpec& spec, const Item& value) {
  if (!value.is_atomic() || !is_integer_kind(value.atomic().kind())) type_error(spec, value);
  const BigInt& v = value.atomic().as_integer();
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
    fail(ErrorCode::ParamTypeError, spec.name + " is out of range");
  }
  return v.convert_to<std::int64_t>();
}

const std::vector<Item>& array_members(const ParamSpec& spec, const Item& value) {
  if (!value.is_array()) type_error(spec, value);
  return value.array().members();
}

ParamValue convert(const ParamSpec& spec, const Item& value) {
  switch (spec.type) {
    case ParamType::Boolean:
      if (!value.is_atomic() || !value.atomic().is_boolean()) type_error(spec, value);
      return value.atomic().as_bool();
    case ParamType::Double: return to_double_param(spec, value);
    case ParamType::Integer: return to_integer_param(spec, value);
    case ParamType::String:
      if (!value.is_atomic() || !value.atomic().is_string()) type_error(spec, value);
      return value.atomic().as_string();
    case ParamType::DoubleArray: {
      std::vector<double> out;
      for (const Item& m : array_members(spec, value)) out.push_back(to_double_param(spec, m));
      return out;
    }
    case ParamType::DoubleMatrix: {
      std::vector<std::vector<double>> out;
      for (const Item& row : array_members(spec, value)) {
        std::vector<double> r;
        for (const Item& m : array_members(spec, row)) r.push_back(to_double_param(spec, m));
        out.push_back(std::move(r));
      }
      return out;
    }
    case ParamType::IntegerArray: {
      std::vector<std::int64_t> out;
      for (const Item& m : array_members(spec, value)) out.push_back(to_integer_param(spec, m));
      return out;
    }
    case ParamType::StringArray: {
      std::vector<std::string> out;
      for (const Item& m : array_members(spec, value)) {
        if (!m.is_atomic() || !m.atomic().is_string()) type_error(spec, m);
        out.push_back(m.atomic().as_string());
      }
      return out;
    }
    case ParamType::StageArray: {
      std::vector<FunctionRef> out;
      for (const Item& m : array_members(spec, value)) {
        if (!m.is_function()) type_error(spec, m);
        out.push_back(m.function_ptr());
      }
      return out;
    }
  }
  type_error(spec, value);
}

}  // namespace

const std::vector<ComponentSpec>& registry() {
  static const std::vector<ComponentSpec> components = [] {
    using K = ComponentKind;
    std::vector<ComponentSpec> c;
    c.push_back({"Tokenizer", K::Transformer,
                 {param("inputCol", ParamType::String), param("outputCol", ParamType::String)}});
    c.push_back({"VectorAssembler", K::Transformer,
                 {param("inputCols", ParamType::StringArray), param("outputCol", ParamType::String)}});
    c.push_back({"VectorSlicer", K::Transformer,
                 {param("inputCol", ParamType::String), param("outputCol", ParamType::String),
                  param("indices", ParamType::IntegerArray)}});
    c.push_back({"LogisticRegression", K::Estimator, linear_params(true)});
    c.push_back({"LinearSVC", K::Estimator, linear_params(false)});
    c.push_back({"NaiveBayes", K::Estimator,
                 {param("featuresCol", ParamType::String, std::string("features")),
                  param("labelCol", ParamType::String, std::string("label"), true),
                  param("predictionCol", ParamType::String, std::string("prediction")),
                  param("smoothing", ParamType::Double, 1.0, true),
                  param("modelType", ParamType::String, std::string("multinomial"), true)}});
    c.push_back({"MaxAbsScaler", K::Estimator,
                 {param("inputCol", ParamType::String, std::string("features")),
                  param("outputCol", ParamType::String, std::string("scaledFeatures"))}});
    c.push_back({"Pipeline", K::Estimator, {param("stages", ParamType::StageArray, std::nullopt, true)}});
    return c;
  }();
  return components;
}

const ComponentSpec* find_component(std::string_view name) {
  for (const ComponentSpec& c : registry()) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

ParamMap parse_params(const ComponentSpec& spec, const Item& params, bool transform_only) {
  if (!params.is_object()) {
    fail(ErrorCode::ParamTypeError, "parameters must be an object, got " + params.type_name());
  }
  ParamMap out;
  for (const auto& [key, value] : params.object().fields()) {
    const ParamSpec* p = spec.find(key);
    if (!p) fail(ErrorCode::UnknownParam, spec.name + " has no parameter \"" + key + "\"");
    if (transform_only && p->fit_only) {
      fail(ErrorCode::UnknownParam,
           "\"" + key + "\" only applies when fitting " + spec.name + ", not to its model");
    }
    out[key] = convert(*p, value);
  }
  return out;
}

ParamMap validate_params(const ComponentSpec& spec, const Item& params) {
  ParamMap out;
  for (const ParamSpec& p : spec.params) {
    if (p.default_value) out[p.name] = *p.default_value;
  }
  return merge_params(std::move(out), parse_params(spec, params));
}

ParamMap merge_params(ParamMap base, const ParamMap& overrides) {
  for (const auto& [key, value] : overrides) base[key] = value;
  return base;
}

Item param_to_item(const ParamValue& value) {
  return std::visit(
      [](const auto& v) -> Item {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, bool>) {
          return Item::boolean(v);
        } else if constexpr (std::is_same_v<T, double>) {
          return Item::double_value(v);
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return Item::integer(v);
        } else if constexpr (std::is_same_v<T, std::string>) {
          return Item::string(v);
        } else if constexpr (std::is_same_v<T, std::vector<FunctionRef>>) {
          std::vector<Item> out;
          for (const auto& f : v) out.push_back(Item::function(f));
          return Item::array(std::move(out));
        } else if constexpr (std::is_same_v<T, std::vector<std::vector<double>>>) {
          std::vector<Item> rows;
          for (const auto& r : v) {
            std::vector<Item> row;
            for (double x : r) row.push_back(Item::double_value(x));
            rows.push_back(Item::array(std::move(row)));
          }
          return Item::array(std::move(rows));
        } else {
          std::vector<Item> out;
          for (const auto& x : v) out.push_back(param_to_item(ParamValue(x)));
          return Item::array(std::move(out));
        }
      },
      value);
}

const ParamValue& require(const ParamMap& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) fail(ErrorCode::MissingParam, "parameter \"" + key + "\" is required");
  return it->second;
}

bool has(const ParamMap& params, const std::string& key) { return params.count(key) != 0; }

const std::string& get_string(const ParamMap& params, const std::string& key) {
  return std::get<std::string>(require(params, key));
}

double get_double(const ParamMap& params, const std::string& key) {
  return std::get<double>(require(params, key));
}

std::int64_t get_integer(const ParamMap& params, const std::string& key) {
  return std::get<std::int64_t>(require(params, key));
}

bool get_boolean(const ParamMap& params, const std::string& key) {
  return std::get<bool>(require(params, key));
}

}  // namespace jqml::ml
