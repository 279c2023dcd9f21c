#include "jqml/engine.hpp"
#include "jqml/error.hpp"
#include "jqml/frame.hpp"
#include "jqml/io.hpp"
#include "jqml/schema.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kUsageError = 64;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) jqml::fail(jqml::ErrorCode::IoError, "cannot open \"" + path + "\"");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

/// JSON when the text parses as JSON, else the text as a string.
jqml::Item variable_value(const std::string& text) {
  try {
    return jqml::parse_json(text);
  } catch (const jqml::Error&) {
    return jqml::Item::string(text);
  }
}

struct RunArgs {
  std::string query;
  std::vector<std::string> vars;
  std::string output;
  std::string format = "json-lines";
  std::string mode = "auto";
  std::size_t cap = 1'000'000;
  std::size_t partitions = 1;
};

int run(const RunArgs& args) {
  jqml::EngineOptions options;
  options.cap = args.cap;
  options.partitions = args.partitions;
  if (args.mode == "force-local") {
    options.policy = jqml::ModePolicy::ForceLocal;
  } else if (args.mode == "frame") {
    options.policy = jqml::ModePolicy::Frame;
  }
  jqml::Bindings bindings;
  for (const std::string& var : args.vars) {
    auto eq = var.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::cerr << "error: --var expects NAME=VALUE, got \"" << var << "\"\n";
      return kUsageError;
    }
    std::string name = var.substr(0, eq);
    if (name.front() == '$') name.erase(0, 1);
    bindings[name] = jqml::Sequence::single(variable_value(var.substr(eq + 1)));
  }

  jqml::Query query = jqml::Query::compile(read_file(args.query), options);

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!args.output.empty()) {
    file.open(args.output, std::ios::binary | std::ios::trunc);
    if (!file) jqml::fail(jqml::ErrorCode::IoError, "cannot open \"" + args.output + "\" for writing");
    out = &file;
  }
  bool text = args.format == "text";
  std::string line;
  query.run(bindings, [&](const jqml::Item& item) {
    line.clear();
    if (text && item.is_atomic()) {
      line = item.atomic().lexical();
    } else {
      jqml::canonical_serialize(item, line);
    }
    line.push_back('\n');
    out->write(line.data(), static_cast<std::streamsize>(line.size()));
  });
  out->flush();
  if (!*out) jqml::fail(jqml::ErrorCode::IoError, "cannot write the output");
  return 0;
}

struct GenArgs {
  std::uint64_t rows = 0;
  std::uint64_t dims = 0;
  double margin = 1.0;
  std::uint64_t seed = 0;
  std::string output;
  std::uint64_t split = 0;
  std::string rest_output;
};

int gen_data(const GenArgs& args) {
  jqml::io::DatasetSpec spec{args.rows, args.dims, args.margin, args.seed};
  if (args.rest_output.empty()) {
    jqml::io::generate_dataset(spec, args.output);
    return 0;
  }
  std::ostringstream buffer;
  jqml::io::generate_dataset(spec, buffer);
  std::istringstream lines(buffer.str());
  std::ofstream first(args.output, std::ios::binary | std::ios::trunc);
  std::ofstream second(args.rest_output, std::ios::binary | std::ios::trunc);
  if (!first || !second) jqml::fail(jqml::ErrorCode::IoError, "cannot open the output files");
  std::string line;
  for (std::uint64_t i = 0; std::getline(lines, line); ++i) {
    (i < args.split ? first : second) << line << '\n';
  }
  if (!first.flush() || !second.flush()) jqml::fail(jqml::ErrorCode::IoError, "cannot write the output files");
  return 0;
}

struct LibsvmArgs {
  std::string input;
  std::string output;
  std::string label = "label";
  std::string features = "features";
};

int to_libsvm(const LibsvmArgs& args) {
  std::vector<jqml::Item> rows;
  std::istringstream lines(read_file(args.input));
  std::string line;
  for (std::size_t n = 1; std::getline(lines, line); ++n) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rows.push_back(jqml::parse_json(line));
    } catch (const jqml::Error& e) {
      throw e.with_context("line " + std::to_string(n));
    }
  }
  jqml::Item schema = jqml::Item::object(
      {{args.label, jqml::Item::string("double")},
       {args.features, jqml::Item::array({jqml::Item::string("double")})}});
  std::vector<jqml::Item> projected;
  projected.reserve(rows.size());
  for (const jqml::Item& row : rows) {
    if (!row.is_object()) {
      jqml::fail(jqml::ErrorCode::NonObjectRow, "expected an object, got " + row.type_name());
    }
    std::vector<std::pair<std::string, jqml::Item>> fields;
    for (const std::string& key : {args.label, args.features}) {
      const jqml::Item* v = row.object().find(key);
      if (!v) jqml::fail(jqml::ErrorCode::UnknownColumn, "row has no field \"" + key + "\"");
      fields.emplace_back(key, *v);
    }
    projected.push_back(jqml::Item::object(std::move(fields)));
  }
  jqml::Sequence frame = jqml::annotate(jqml::Sequence::materialized(std::move(projected)), schema);
  if (args.output.empty()) {
    jqml::io::write_libsvm(*frame.frame(), args.label, args.features, std::cout);
  } else {
    jqml::io::write_libsvm(*frame.frame(), args.label, args.features, args.output);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"jqml: JSONiq-style queries with ML pipelines"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Evaluate a query file");
  run_cmd->add_option("--query", run_args.query, "Query file")->required();
  run_cmd->add_option("--var", run_args.vars, "External variable NAME=VALUE (JSON or string)");
  run_cmd->add_option("--output", run_args.output, "Output file (default stdout)");
  run_cmd->add_option("--format", run_args.format, "json-lines or text")
      ->check(CLI::IsMember({"json-lines", "text"}));
  run_cmd->add_option("--mode", run_args.mode, "auto, force-local or frame")
      ->check(CLI::IsMember({"auto", "force-local", "frame"}));
  run_cmd->add_option("--cap", run_args.cap, "Materialization cap in items");
  run_cmd->add_option("--partitions", run_args.partitions, "Worker count for frame and training kernels")
      ->check(CLI::PositiveNumber);

  GenArgs gen_args;
  auto* gen_cmd = app.add_subcommand("gen-data", "Write a synthetic two-class text dataset");
  gen_cmd->add_option("--rows", gen_args.rows, "Number of lines")->required();
  gen_cmd->add_option("--dims", gen_args.dims, "Feature dimension")->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--margin", gen_args.margin, "Gap between the classes");
  gen_cmd->add_option("--seed", gen_args.seed, "Random seed");
  gen_cmd->add_option("--output", gen_args.output, "Output file")->required();
  gen_cmd->add_option("--split", gen_args.split, "Lines written to --output; the rest go to --rest-output");
  gen_cmd->add_option("--rest-output", gen_args.rest_output, "File for the lines after --split");

  LibsvmArgs svm_args;
  auto* svm_cmd = app.add_subcommand("to-libsvm", "Convert JSON-lines rows to LibSVM text");
  svm_cmd->add_option("--input", svm_args.input, "JSON-lines file of rows")->required();
  svm_cmd->add_option("--output", svm_args.output, "Output file (default stdout)");
  svm_cmd->add_option("--label", svm_args.label, "Label field");
  svm_cmd->add_option("--features", svm_args.features, "Feature vector field");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*run_cmd) return run(run_args);
    if (*gen_cmd) return gen_data(gen_args);
    return to_libsvm(svm_args);
  } catch (const jqml::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(jqml::error_family(e.code()));
  }
}
