#include "jqml/error.hpp"
#include "jqml/ml.hpp"
#include "jqml/training.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

namespace jqml::ml {

namespace {

/// Flat row-major copy of a numeric vector column.
struct Vectors {
  std::size_t rows = 0;
  std::size_t dims = 0;
  std::vector<double> values;
};

/// Elements of a numeric scalar, numeric array or record of those, in schema
/// order.
void append_numeric_cell(const ColumnVector& column, std::size_t row, std::vector<double>& out) {
  const FrameColumnType& type = column.type();
  if (type.tag == FrameColumnType::Tag::Record) {
    for (std::size_t f = 0; f < column.child_count(); ++f) append_numeric_cell(column.child(f), row, out);
    return;
  }
  if (type.tag == FrameColumnType::Tag::Array) {
    const ColumnVector& child = column.child(0);
    if (!child.type().is_numeric()) {
      fail(ErrorCode::NonNumericInput, "column of type " + type.to_string() + " is not a numeric vector");
    }
    for (std::uint64_t k = column.offsets()[row]; k < column.offsets()[row + 1]; ++k) {
      out.push_back(child.numeric(k));
    }
    return;
  }
  if (!type.is_numeric()) {
    fail(ErrorCode::NonNumericInput, "column of type " + type.to_string() + " is not numeric");
  }
  out.push_back(column.numeric(row));
}

Vectors read_vectors(const Frame& frame, const std::string& name) {
  const ColumnVector& column = frame.column(frame.require_column(name));
  if (column.type().tag != FrameColumnType::Tag::Array || !column.child(0).type().is_numeric()) {
    fail(ErrorCode::NonNumericInput,
         "column \"" + name + "\" has type " + column.type().to_string() + ", expected a numeric vector");
  }
  Vectors out;
  out.rows = column.size();
  const auto& offsets = column.offsets();
  for (std::size_t i = 0; i < out.rows; ++i) {
    std::size_t len = offsets[i + 1] - offsets[i];
    if (i == 0) {
      out.dims = len;
    } else if (len != out.dims) {
      fail(ErrorCode::RaggedVectors, "column \"" + name + "\" has vectors of length " +
                                         std::to_string(out.dims) + " and " + std::to_string(len));
    }
  }
  if (column.type().is_dense_vector()) {
    const auto& flat = column.child(0).doubles();
    out.values.assign(flat.begin() + static_cast<std::ptrdiff_t>(offsets.front()),
                      flat.begin() + static_cast<std::ptrdiff_t>(offsets.back()));
  } else {
    out.values.reserve(out.rows * out.dims);
    for (std::size_t i = 0; i < out.rows; ++i) append_numeric_cell(column, i, out.values);
  }
  return out;
}

double label_value(const ColumnVector& column, std::size_t row) {
  const FrameColumnType& type = column.type();
  if (type.is_numeric()) return column.numeric(row);
  if (type.tag == FrameColumnType::Tag::String) {
    const std::string& s = column.strings()[row];
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size()) return v;
    fail(ErrorCode::BadLabel, "label \"" + s + "\" is not numeric");
  }
  fail(ErrorCode::BadLabel, "label column of type " + type.to_string() + " is not numeric");
}

Dataset read_dataset(const Frame& frame, const std::string& features, const std::string& label,
                     bool binary) {
  Vectors v = read_vectors(frame, features);
  const ColumnVector& labels = frame.column(frame.require_column(label));
  Dataset data;
  data.rows = v.rows;
  data.dims = v.dims;
  data.x = std::move(v.values);
  data.y.reserve(data.rows);
  for (std::size_t i = 0; i < data.rows; ++i) {
    double y = label_value(labels, i);
    if (binary && y != 0.0 && y != 1.0) {
      fail(ErrorCode::BadLabel, "label " + format_double(y) + " at row " + std::to_string(i) +
                                    " is not 0 or 1");
    }
    data.y.push_back(y);
  }
  return data;
}

void check_dims(const Vectors& v, std::size_t expected, const std::string& column) {
  if (v.rows > 0 && v.dims != expected) {
    fail(ErrorCode::RaggedVectors, "column \"" + column + "\" has vectors of length " +
                                       std::to_string(v.dims) + ", the model expects " +
                                       std::to_string(expected));
  }
}

std::shared_ptr<const Frame> with_doubles(const Frame& frame, const std::string& name,
                                          std::vector<double> values) {
  return frame_with_column(frame, name, ColumnVector::of_doubles(std::move(values)));
}

// ---- transformers ----

std::shared_ptr<const Frame> tokenize_column(const Frame& frame, const ParamMap& params) {
  const std::string& input = get_string(params, "inputCol");
  const std::string& output = get_string(params, "outputCol");
  const ColumnVector& column = frame.column(frame.require_column(input));
  if (column.type().tag != FrameColumnType::Tag::String) {
    fail(ErrorCode::TypeError, "Tokenizer expects a string column, \"" + input + "\" has type " +
                                   column.type().to_string());
  }
  std::vector<std::uint64_t> offsets{0};
  std::vector<std::string> tokens;
  for (const std::string& text : column.strings()) {
    std::string current;
    for (char ch : text) {
      if (std::isspace(static_cast<unsigned char>(ch))) {
        if (!current.empty()) tokens.push_back(std::move(current));
        current.clear();
      } else {
        current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
      }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    offsets.push_back(tokens.size());
  }
  return frame_with_column(frame, output, ColumnVector::string_arrays(std::move(offsets), std::move(tokens)));
}

std::shared_ptr<const Frame> assemble_vectors(const Frame& frame, const ParamMap& params) {
  const auto& inputs = std::get<std::vector<std::string>>(require(params, "inputCols"));
  const std::string& output = get_string(params, "outputCol");
  if (inputs.empty()) fail(ErrorCode::InvalidArgument, "VectorAssembler needs at least one input column");
  std::vector<const ColumnVector*> columns;
  for (const std::string& name : inputs) columns.push_back(&frame.column(frame.require_column(name)));
  std::vector<std::uint64_t> offsets{0};
  std::vector<double> values;
  for (std::size_t i = 0; i < frame.row_count(); ++i) {
    for (const ColumnVector* c : columns) append_numeric_cell(*c, i, values);
    offsets.push_back(values.size());
  }
  return frame_with_column(frame, output, ColumnVector::dense_vectors(std::move(offsets), std::move(values)));
}

std::shared_ptr<const Frame> slice_vectors(const Frame& frame, const ParamMap& params) {
  const std::string& input = get_string(params, "inputCol");
  const std::string& output = get_string(params, "outputCol");
  const auto& indices = std::get<std::vector<std::int64_t>>(require(params, "indices"));
  Vectors v = read_vectors(frame, input);
  for (std::int64_t k : indices) {
    if (k < 0 || (v.rows > 0 && static_cast<std::size_t>(k) >= v.dims)) {
      fail(ErrorCode::InvalidArgument, "VectorSlicer index " + std::to_string(k) +
                                           " is outside vectors of length " + std::to_string(v.dims));
    }
  }
  std::vector<std::uint64_t> offsets{0};
  std::vector<double> values;
  values.reserve(v.rows * indices.size());
  for (std::size_t i = 0; i < v.rows; ++i) {
    for (std::int64_t k : indices) values.push_back(v.values[i * v.dims + static_cast<std::size_t>(k)]);
    offsets.push_back(values.size());
  }
  return frame_with_column(frame, output, ColumnVector::dense_vectors(std::move(offsets), std::move(values)));
}

std::shared_ptr<const Frame> apply_transformer(const std::string& name, const Frame& frame,
                                               const ParamMap& params) {
  if (name == "Tokenizer") return tokenize_column(frame, params);
  if (name == "VectorAssembler") return assemble_vectors(frame, params);
  if (name == "VectorSlicer") return slice_vectors(frame, params);
  fail(ErrorCode::UnknownTransformer, "unknown transformer \"" + name + "\"");
}

// ---- estimators ----

ParamMap defaults_of(const ComponentSpec& spec) {
  ParamMap out;
  for (const ParamSpec& p : spec.params) {
    if (p.default_value) out[p.name] = *p.default_value;
  }
  return out;
}

/// Parameters of a fitted model: the estimator's non-fit-only ones.
const ComponentSpec& model_spec(const std::string& kind) {
  static const std::vector<ComponentSpec> specs = [] {
    std::vector<ComponentSpec> out;
    for (const ComponentSpec& c : registry()) {
      if (c.kind != ComponentKind::Estimator) continue;
      ComponentSpec m{c.name + "Model", ComponentKind::Transformer, {}};
      for (const ParamSpec& p : c.params) {
        if (!p.fit_only) m.params.push_back(p);
      }
      out.push_back(std::move(m));
    }
    return out;
  }();
  for (const ComponentSpec& s : specs) {
    if (s.name == kind) return s;
  }
  fail(ErrorCode::UnknownModelKind, "unknown model kind \"" + kind + "\"");
}

ParamMap echo(const ParamMap& params, std::initializer_list<const char*> keys) {
  ParamMap out;
  for (const char* key : keys) {
    auto it = params.find(key);
    if (it != params.end()) out[key] = it->second;
  }
  return out;
}

std::shared_ptr<ModelArtifact> fit_linear(const std::string& name, const Frame& frame,
                                          const ParamMap& params, CallContext& ctx) {
  Loss loss = name == "LogisticRegression" ? Loss::Logistic : Loss::Hinge;
  Dataset data = read_dataset(frame, get_string(params, "featuresCol"), get_string(params, "labelCol"), true);
  LinearOptions options;
  std::int64_t max_iter = get_integer(params, "maxIter");
  if (max_iter < 0) fail(ErrorCode::InvalidArgument, "maxIter must be nonnegative");
  options.max_iter = static_cast<int>(std::min<std::int64_t>(max_iter, 1'000'000'000));
  options.step_size = get_double(params, "stepSize");
  options.reg = get_double(params, "regParam");
  if (options.reg < 0) fail(ErrorCode::InvalidArgument, "regParam must be nonnegative");
  options.fit_intercept = get_boolean(params, "fitIntercept");
  options.partitions = ctx.partitions();
  auto coefficient_bound = [&](const char* key) -> std::optional<std::vector<double>> {
    if (!has(params, key)) return std::nullopt;
    const auto& m = std::get<std::vector<std::vector<double>>>(params.at(key));
    if (m.size() != 1 || m[0].size() != data.dims) {
      fail(ErrorCode::InvalidArgument, std::string(key) + " must be a 1 x " + std::to_string(data.dims) + " matrix");
    }
    return m[0];
  };
  auto intercept_bound = [&](const char* key) -> std::optional<double> {
    if (!has(params, key)) return std::nullopt;
    const auto& v = std::get<std::vector<double>>(params.at(key));
    if (v.size() != 1) fail(ErrorCode::InvalidArgument, std::string(key) + " must have one entry");
    return v[0];
  };
  options.lower_w = coefficient_bound("lowerBoundsOnCoefficients");
  options.upper_w = coefficient_bound("upperBoundsOnCoefficients");
  options.lower_b = intercept_bound("lowerBoundsOnIntercepts");
  options.upper_b = intercept_bound("upperBoundsOnIntercepts");
  LinearModel model = train_linear(loss, data, options);
  auto artifact = std::make_shared<ModelArtifact>();
  artifact->kind = name + "Model";
  artifact->params = echo(params, {"featuresCol", "labelCol", "predictionCol"});
  artifact->weights = std::move(model.w);
  artifact->intercept = model.b;
  return artifact;
}

std::shared_ptr<ModelArtifact> fit_naive_bayes(const Frame& frame, const ParamMap& params) {
  if (get_string(params, "modelType") != "multinomial") {
    fail(ErrorCode::InvalidArgument, "NaiveBayes supports modelType \"multinomial\" only");
  }
  double smoothing = get_double(params, "smoothing");
  if (!(smoothing >= 0)) fail(ErrorCode::InvalidArgument, "smoothing must be nonnegative");
  Dataset data = read_dataset(frame, get_string(params, "featuresCol"), get_string(params, "labelCol"), false);
  NaiveBayesModel model = train_naive_bayes(data, smoothing);
  auto artifact = std::make_shared<ModelArtifact>();
  artifact->kind = "NaiveBayesModel";
  artifact->params = echo(params, {"featuresCol", "labelCol", "predictionCol"});
  artifact->classes = std::move(model.classes);
  artifact->log_priors = std::move(model.log_priors);
  artifact->theta = std::move(model.theta);
  return artifact;
}

std::shared_ptr<ModelArtifact> fit_max_abs_scaler(const Frame& frame, const ParamMap& params) {
  Vectors v = read_vectors(frame, get_string(params, "inputCol"));
  Dataset data;
  data.rows = v.rows;
  data.dims = v.dims;
  data.x = std::move(v.values);
  auto artifact = std::make_shared<ModelArtifact>();
  artifact->kind = "MaxAbsScalerModel";
  artifact->params = echo(params, {"inputCol", "outputCol"});
  artifact->max_abs = fit_max_abs(data);
  return artifact;
}

Sequence frame_sequence(std::shared_ptr<const Frame> frame) { return Sequence::frame(std::move(frame)); }

Item empty_params() { return Item::object({}); }

/// Validates that a stage is a transformer- or estimator-shaped function.
void check_stage(const FunctionItem& stage, std::size_t index) {
  FunctionShape shape = shape_of(stage.signature());
  if (shape == FunctionShape::Other) {
    fail(ErrorCode::StageTypeError, "stage " + std::to_string(index) + " has signature " +
                                        stage.signature().to_string() +
                                        ", expected a transformer or an estimator");
  }
}

std::shared_ptr<ModelArtifact> fit_pipeline(std::shared_ptr<const Frame> frame, const ParamMap& params,
                                            CallContext& ctx) {
  if (!has(params, "stages")) fail(ErrorCode::MissingParam, "parameter \"stages\" is required");
  const auto& stages = std::get<std::vector<FunctionRef>>(params.at("stages"));
  if (stages.empty()) fail(ErrorCode::StageTypeError, "a pipeline needs at least one stage");
  for (std::size_t i = 0; i < stages.size(); ++i) check_stage(*stages[i], i);
  auto artifact = std::make_shared<ModelArtifact>();
  artifact->kind = "PipelineModel";
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const FunctionRef& stage = stages[i];
    std::string context = "stage " + std::to_string(i);
    try {
      FunctionRef fitted = stage;
      if (shape_of(stage->signature()) == FunctionShape::Estimator) {
        Sequence out = ctx.call(*stage, {frame_sequence(frame), Sequence::single(empty_params())});
        std::vector<Item> items = materialize(out, 2);
        if (items.size() != 1 || !items[0].is_function()) {
          fail(ErrorCode::StageTypeError, "estimator did not return a single function");
        }
        fitted = items[0].function_ptr();
      }
      artifact->stages.push_back(fitted);
      Sequence out = ctx.call(*fitted, {frame_sequence(frame), Sequence::single(empty_params())});
      frame = require_frame(out, ctx);
    } catch (const Error& e) {
      throw e.with_context(context);
    }
  }
  return artifact;
}

std::shared_ptr<const Frame> apply_model(const ModelArtifact& model, std::shared_ptr<const Frame> frame,
                                         const ParamMap& params, CallContext& ctx) {
  const std::string& kind = model.kind;
  if (kind == "LogisticRegressionModel" || kind == "LinearSVCModel" || kind == "NaiveBayesModel") {
    const std::string& features = get_string(params, "featuresCol");
    Vectors v = read_vectors(*frame, features);
    std::vector<double> predictions(v.rows);
    if (kind == "NaiveBayesModel") {
      NaiveBayesModel nb{model.classes, model.log_priors, model.theta};
      std::size_t dims = nb.theta.empty() ? 0 : nb.theta[0].size();
      check_dims(v, dims, features);
      for (std::size_t i = 0; i < v.rows; ++i) {
        predictions[i] = predict_naive_bayes(nb, {v.values.data() + i * v.dims, v.dims});
      }
    } else {
      check_dims(v, model.weights.size(), features);
      LinearModel lm{model.weights, model.intercept};
      for (std::size_t i = 0; i < v.rows; ++i) {
        predictions[i] = predict_linear(lm, {v.values.data() + i * v.dims, v.dims});
      }
    }
    return with_doubles(*frame, get_string(params, "predictionCol"), std::move(predictions));
  }
  if (kind == "MaxAbsScalerModel") {
    const std::string& input = get_string(params, "inputCol");
    Vectors v = read_vectors(*frame, input);
    check_dims(v, model.max_abs.size(), input);
    std::vector<std::uint64_t> offsets{0};
    for (std::size_t i = 0; i < v.rows; ++i) {
      for (std::size_t j = 0; j < v.dims; ++j) {
        double m = model.max_abs[j];
        if (m != 0.0) v.values[i * v.dims + j] /= m;
      }
      offsets.push_back((i + 1) * v.dims);
    }
    return frame_with_column(*frame, get_string(params, "outputCol"),
                             ColumnVector::dense_vectors(std::move(offsets), std::move(v.values)));
  }
  if (kind == "PipelineModel") {
    for (std::size_t i = 0; i < model.stages.size(); ++i) {
      try {
        Sequence out = ctx.call(*model.stages[i], {frame_sequence(frame), Sequence::single(empty_params())});
        frame = require_frame(out, ctx);
      } catch (const Error& e) {
        throw e.with_context("stage " + std::to_string(i));
      }
    }
    return frame;
  }
  fail(ErrorCode::UnknownModelKind, "unknown model kind \"" + kind + "\"");
}

/// The single object passed as the parameter argument.
Item params_argument(const Sequence& seq) {
  std::vector<Item> items = materialize(seq, 2);
  if (items.size() != 1) {
    fail(ErrorCode::ParamTypeError, "parameters must be a single object, got " +
                                        std::to_string(items.size()) + " items");
  }
  if (!items[0].is_object()) {
    fail(ErrorCode::ParamTypeError, "parameters must be an object, got " + items[0].type_name());
  }
  return items[0];
}

const ComponentSpec& component_of_kind(const std::string& name, ComponentKind kind) {
  const ComponentSpec* spec = find_component(name);
  if (!spec || spec->kind != kind) {
    if (kind == ComponentKind::Transformer) fail(ErrorCode::UnknownTransformer, "unknown transformer \"" + name + "\"");
    fail(ErrorCode::UnknownEstimator, "unknown estimator \"" + name + "\"");
  }
  return *spec;
}

Item make_estimator(const std::string& name, ParamMap creation) {
  const ComponentSpec& spec = component_of_kind(name, ComponentKind::Estimator);
  auto body = [name, &spec, creation](CallContext& ctx, std::vector<Sequence>& args) -> Sequence {
    ParamMap call = parse_params(spec, params_argument(args[1]));
    ParamMap params = merge_params(merge_params(defaults_of(spec), creation), call);
    auto frame = require_frame(args[0], ctx);
    std::shared_ptr<ModelArtifact> artifact;
    if (name == "LogisticRegression" || name == "LinearSVC") {
      artifact = fit_linear(name, *frame, params, ctx);
    } else if (name == "NaiveBayes") {
      artifact = fit_naive_bayes(*frame, params);
    } else if (name == "MaxAbsScaler") {
      artifact = fit_max_abs_scaler(*frame, params);
    } else {
      artifact = fit_pipeline(frame, params, ctx);
    }
    return Sequence::single(make_model(std::move(artifact)));
  };
  return Item::function(std::make_shared<FunctionItem>(name, estimator_signature(), FunctionKind::Estimator,
                                                       std::move(body), "estimator:" + name));
}

}  // namespace

std::shared_ptr<const Frame> require_frame(const Sequence& rows, CallContext& ctx) {
  if (rows.is_frame()) return rows.frame();
  if (rows.schema_tag()) {
    std::vector<Item> items = materialize(rows, ctx.materialization_cap());
    return Frame::from_items(items, rows.schema_tag());
  }
  fail(ErrorCode::NotAFrame, "the input is not a frame; validate it with annotate() first");
}

Item make_transformer(const std::string& name, ParamMap params) {
  const ComponentSpec& spec = component_of_kind(name, ComponentKind::Transformer);
  auto state = std::make_shared<TransformerState>();
  state->name = name;
  state->params = params;
  auto body = [name, &spec, creation = std::move(params)](CallContext& ctx,
                                                          std::vector<Sequence>& args) -> Sequence {
    ParamMap call = parse_params(spec, params_argument(args[1]));
    ParamMap merged = merge_params(merge_params(defaults_of(spec), creation), call);
    auto frame = require_frame(args[0], ctx);
    return frame_sequence(apply_transformer(name, *frame, merged));
  };
  return Item::function(std::make_shared<FunctionItem>(name, transformer_signature(), FunctionKind::Transformer,
                                                       std::move(body), "transformer:" + name, state));
}

Item make_model(std::shared_ptr<const ModelArtifact> artifact) {
  const ComponentSpec& spec = model_spec(artifact->kind);
  auto body = [artifact, &spec](CallContext& ctx, std::vector<Sequence>& args) -> Sequence {
    ParamMap call = parse_params(spec, params_argument(args[1]), true);
    ParamMap params = merge_params(merge_params(defaults_of(spec), artifact->params), call);
    auto frame = require_frame(args[0], ctx);
    return frame_sequence(apply_model(*artifact, frame, params, ctx));
  };
  std::string kind = artifact->kind;
  return Item::function(std::make_shared<FunctionItem>(kind, transformer_signature(), FunctionKind::Model,
                                                       std::move(body), "model:" + kind, artifact));
}

Item get_transformer(const std::string& name, const Item& params) {
  const ComponentSpec& spec = component_of_kind(name, ComponentKind::Transformer);
  return make_transformer(name, parse_params(spec, params));
}

Item get_estimator(const std::string& name, const Item& params) {
  const ComponentSpec& spec = component_of_kind(name, ComponentKind::Estimator);
  ParamMap parsed = parse_params(spec, params);
  if (name == "Pipeline" && has(parsed, "stages")) {
    const auto& stages = std::get<std::vector<FunctionRef>>(parsed.at("stages"));
    if (stages.empty()) fail(ErrorCode::StageTypeError, "a pipeline needs at least one stage");
    for (std::size_t i = 0; i < stages.size(); ++i) check_stage(*stages[i], i);
  }
  return make_estimator(name, std::move(parsed));
}

}  // namespace jqml::ml
