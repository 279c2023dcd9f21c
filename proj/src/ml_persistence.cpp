#include "jqml/error.hpp"
#include "jqml/ml.hpp"

#include <fstream>
#include <sstream>

namespace jqml::ml {

namespace {

Item params_item(const ParamMap& params) {
  std::vector<std::pair<std::string, Item>> fields;
  for (const auto& [key, value] : params) fields.emplace_back(key, param_to_item(value));
  return Item::object(std::move(fields));
}

Item doubles_item(const std::vector<double>& values) {
  std::vector<Item> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(Item::double_value(v));
  return Item::array(std::move(out));
}

[[noreturn]] void malformed(const std::string& what) {
  fail(ErrorCode::UnknownModelKind, "malformed model document: " + what);
}

const Item& field(const Item& doc, std::string_view key) {
  const Item* v = doc.object().find(key);
  if (!v) malformed("missing \"" + std::string(key) + "\"");
  return *v;
}

std::vector<double> doubles_of(const Item& value, std::string_view key) {
  if (!value.is_array()) malformed("\"" + std::string(key) + "\" is not an array");
  std::vector<double> out;
  for (const Item& m : value.array().members()) {
    if (!m.is_atomic() || !m.atomic().is_numeric()) malformed("\"" + std::string(key) + "\" is not numeric");
    out.push_back(m.atomic().to_double());
  }
  return out;
}

}  // namespace

Item model_to_item(const FunctionItem& model) {
  if (auto t = std::dynamic_pointer_cast<const TransformerState>(model.state())) {
    return Item::object({{"kind", Item::string(t->name)},
                         {"params", params_item(t->params)},
                         {"weights", Item::array({})},
                         {"intercept", Item::double_value(0.0)}});
  }
  auto a = std::dynamic_pointer_cast<const ModelArtifact>(model.state());
  if (!a) {
    fail(ErrorCode::UnknownModelKind, "\"" + model.name() + "\" is not a model or transformer from the registry");
  }
  std::vector<std::pair<std::string, Item>> fields{{"kind", Item::string(a->kind)},
                                                   {"params", params_item(a->params)},
                                                   {"weights", doubles_item(a->weights)},
                                                   {"intercept", Item::double_value(a->intercept)}};
  if (a->kind == "MaxAbsScalerModel") fields.emplace_back("maxAbs", doubles_item(a->max_abs));
  if (a->kind == "NaiveBayesModel") {
    fields.emplace_back("classes", doubles_item(a->classes));
    fields.emplace_back("logPriors", doubles_item(a->log_priors));
    std::vector<Item> rows;
    for (const auto& row : a->theta) rows.push_back(doubles_item(row));
    fields.emplace_back("theta", Item::array(std::move(rows)));
  }
  if (a->kind == "PipelineModel") {
    std::vector<Item> stages;
    for (const auto& s : a->stages) stages.push_back(model_to_item(*s));
    fields.emplace_back("stages", Item::array(std::move(stages)));
  }
  return Item::object(std::move(fields));
}

Item model_from_item(const Item& document) {
  if (!document.is_object()) malformed("expected an object");
  const Item& kind_item = field(document, "kind");
  if (!kind_item.is_atomic() || !kind_item.atomic().is_string()) malformed("\"kind\" is not a string");
  const std::string& kind = kind_item.atomic().as_string();
  const Item* params = document.object().find("params");
  Item no_params = Item::object({});
  if (!params) params = &no_params;

  if (const ComponentSpec* spec = find_component(kind); spec && spec->kind == ComponentKind::Transformer) {
    return make_transformer(kind, parse_params(*spec, *params));
  }
  const std::string suffix = "Model";
  if (kind.size() <= suffix.size() || kind.compare(kind.size() - suffix.size(), suffix.size(), suffix) != 0) {
    fail(ErrorCode::UnknownModelKind, "unknown model kind \"" + kind + "\"");
  }
  const ComponentSpec* estimator = find_component(kind.substr(0, kind.size() - suffix.size()));
  if (!estimator || estimator->kind != ComponentKind::Estimator) {
    fail(ErrorCode::UnknownModelKind, "unknown model kind \"" + kind + "\"");
  }
  auto a = std::make_shared<ModelArtifact>();
  a->kind = kind;
  a->params = parse_params(*estimator, *params);
  a->weights = doubles_of(field(document, "weights"), "weights");
  const Item& b = field(document, "intercept");
  if (!b.is_atomic() || !b.atomic().is_numeric()) malformed("\"intercept\" is not numeric");
  a->intercept = b.atomic().to_double();
  if (kind == "MaxAbsScalerModel") a->max_abs = doubles_of(field(document, "maxAbs"), "maxAbs");
  if (kind == "NaiveBayesModel") {
    a->classes = doubles_of(field(document, "classes"), "classes");
    a->log_priors = doubles_of(field(document, "logPriors"), "logPriors");
    const Item& theta = field(document, "theta");
    if (!theta.is_array()) malformed("\"theta\" is not an array");
    for (const Item& row : theta.array().members()) a->theta.push_back(doubles_of(row, "theta"));
    if (a->theta.size() != a->classes.size() || a->log_priors.size() != a->classes.size()) {
      malformed("class tables differ in length");
    }
  }
  if (kind == "PipelineModel") {
    const Item& stages = field(document, "stages");
    if (!stages.is_array()) malformed("\"stages\" is not an array");
    for (const Item& s : stages.array().members()) {
      a->stages.push_back(model_from_item(s).function_ptr());
    }
  }
  return make_model(std::move(a));
}

void save_model(const FunctionItem& model, const std::string& path) {
  std::string text = canonical_serialize(model_to_item(model));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot open \"" + path + "\" for writing");
  out << text << '\n';
  out.close();
  if (!out) fail(ErrorCode::IoError, "cannot write \"" + path + "\"");
}

Item load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open \"" + path + "\"");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return model_from_item(parse_json(buffer.str()));
}

}  // namespace jqml::ml
