#pragma once

#include "jqml/engine.hpp"
#include "jqml/error.hpp"
#include "jqml/item.hpp"

#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace jqml::testing {

inline std::vector<Item> run_query(const std::string& text, EngineOptions options = {},
                                   const Bindings& bindings = {}) {
  return Query::compile(text, options).collect(bindings);
}

inline std::string serialize_all(const std::vector<Item>& items) {
  std::string out;
  for (const Item& item : items) {
    canonical_serialize(item, out);
    out += '\n';
  }
  return out;
}

/// Canonical JSON lines of the query result.
inline std::string eval_text(const std::string& text, EngineOptions options = {}, const Bindings& bindings = {}) {
  return serialize_all(run_query(text, options, bindings));
}

inline std::string policy_label(ModePolicy p) { return std::string(policy_name(p)); }

/// Runs `fn` and returns the code of the jqml::Error it throws.
template <class Fn>
std::optional<ErrorCode> error_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

#define EXPECT_JQ_ERROR(code, stmt) EXPECT_EQ(::jqml::testing::error_of([&] { stmt; }), std::optional<::jqml::ErrorCode>(code))

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("jqml-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  std::string write(const std::string& name, const std::string& content) const {
    std::string p = file(name);
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }

 private:
  std::filesystem::path path_;
};

}  // namespace jqml::testing

namespace jqml::testing {

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

/// The end-to-end pipeline program, verbatim.
inline std::string figure1_query() { return read_text(std::string(JQML_DATA_DIR) + "/figure1.jq"); }

}  // namespace jqml::testing
