#pragma once

// Block-structured input files:
//
//   format = 1
//   chart { coords = [x1, x2, y1, y2] leaf = [y1, y2] }
//   structure "L" {
//     kind = poisson                      # frame | poisson | presymplectic | geometric_data
//     P[x1, x2] = "1 + x1^2"              # tau[..] for presymplectic
//     section = ("1", "0" | "0", "x1")    # frame: vector components | form components
//     A[y1, x1] = "x1*y1"                 # geometric_data: A, sigma[x, x], pi[y, y]
//     function = "x1*x2"                  # optional test function for the axiom suite
//   }
//   submanifold "N" { zero = [y1, y2] }
//   metric { g[x1, x2] = "x2" }           # or: metric { kind = euclidean }
//   samples { count = 16 seed = 42 box = 1 denom = 1024 tol = 1e-9 }
//
// Components not listed are zero; antisymmetric and symmetric partners are
// implied.  `#` starts a comment.

#include <optional>
#include <string>
#include <vector>

#include "dirac/coupling.hpp"
#include "dirac/courant.hpp"
#include "dirac/errors.hpp"
#include "dirac/submanifold.hpp"

namespace dirac::cli {

// Malformed or inconsistent input.
class InputError : public Error {
 public:
  InputError(const std::string& msg, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

enum class Kind { Frame, Poisson, Presymplectic, GeometricData };

std::string to_string(Kind k);

struct Structure {
  std::string name;
  Kind kind = Kind::Frame;
  courant::DiracFrame frame;
  std::optional<coupling::GeometricData> data;  // GeometricData kind
  std::optional<expr::Expr> function;
};

struct NamedSubmanifold {
  std::string name;
  std::vector<std::string> zero;
};

struct Document {
  cartan::Chart chart;
  std::vector<Structure> structures;
  std::optional<NamedSubmanifold> submanifold;
  std::optional<submanifold::Metric> metric;
  expr::SampleConfig samples;
};

// Throws InputError; errors from the expression parser are reported as
// InputError with the line of the offending string.
Document parse_document(const std::string& text);
Document read_document(const std::string& path);

// Text of a geometric_data structure block, suitable for parse_document.
std::string structure_block(const std::string& name, const coupling::GeometricData& data);

}  // namespace dirac::cli
