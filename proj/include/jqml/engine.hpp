#pragma once

#include "jqml/analysis.hpp"
#include "jqml/ast.hpp"
#include "jqml/sequence.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace jqml {

struct EngineOptions {
  ModePolicy policy = ModePolicy::Auto;
  /// Largest number of items collected into memory by local evaluation.
  std::size_t cap = 1'000'000;
  /// Workers for data-parallel frame and training kernels.
  std::size_t partitions = 1;
};

/// Parsed, resolved and mode-annotated module plus the options it was
/// compiled with.
struct Program {
  Module module;
  EngineOptions options;
  InferenceReport report;
};

/// External variable values by name (without the `$`).
using Bindings = std::map<std::string, Sequence>;

class Query {
 public:
  /// Parses, resolves and analyzes `text`. Throws parse and resolution errors.
  static Query compile(std::string_view text, EngineOptions options = {});

  const Module& module() const { return program_->module; }
  const EngineOptions& options() const { return program_->options; }
  const InferenceReport& report() const { return program_->report; }
  const std::vector<std::string>& externals() const { return program_->module.externals; }

  /// Result sequence, possibly lazy. Throws UNDEFINED_VARIABLE for an
  /// unbound external.
  Sequence evaluate(const Bindings& bindings = {}) const;
  /// Pulls the result into `sink` item by item.
  void run(const Bindings& bindings, const std::function<void(const Item&)>& sink) const;
  /// All result items (not subject to the cap).
  std::vector<Item> collect(const Bindings& bindings = {}) const;

 private:
  explicit Query(std::shared_ptr<const Program> program) : program_(std::move(program)) {}

  std::shared_ptr<const Program> program_;
};

}  // namespace jqml
