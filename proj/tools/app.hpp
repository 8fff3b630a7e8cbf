#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "dirac/report.hpp"
#include "input.hpp"

namespace dirac::cli {

enum class Format { Json, Text };

struct Options {
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<std::string> box;
  std::optional<std::string> structure;  // defaults to the first structure block
  Format format = Format::Json;
  bool exact_only = false;
};

struct Outcome {
  std::string command;
  std::string structure;
  Kind kind = Kind::Frame;
  expr::SampleConfig samples;
  Report report;
  std::string emitted;  // structure block produced by linearize
};

// 0 all pass, 1 any fail or invalid, 2 unknown but nothing worse.
int exit_code(Status s);

// Throws InputError for unusable input or options.
Outcome execute(const std::string& command, const Document& doc, const Options& opts);

std::string render_json(const Outcome& o);
std::string render_text(const Outcome& o);

// Reads the file, runs the command and writes the report to out (errors to
// err); returns the exit code, 3 for parse and validation errors.
int run(const std::string& command, const std::string& path, const Options& opts, std::ostream& out,
        std::ostream& err);

}  // namespace dirac::cli
