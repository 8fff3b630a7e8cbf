#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dirac/expr.hpp"

namespace dirac {

// Ordered by severity.
enum class Status { Pass = 0, Unknown = 1, Fail = 2, Invalid = 3 };

std::string to_string(Status s);
Status worst(Status a, Status b);

using Entries = std::vector<std::pair<std::string, std::string>>;

struct Witness {
  Entries point;
  Entries values;
};

Entries point_entries(const expr::ExactPoint& p);

struct Check {
  std::string id;
  std::string anchor;  // what is being checked, in words
  Status status = Status::Pass;
  bool exact = true;   // false when a pass relies on floating-point sampling
  std::string note;
  std::vector<Witness> witnesses;
};

// Named output of a command (component tables, bases, ...).
struct Table {
  std::string name;
  Entries entries;
};

class Report {
 public:
  Check& add(Check c);
  void add_table(Table t) { tables_.push_back(std::move(t)); }
  void append(const Report& other);

  Status status() const;
  bool passed() const { return status() == Status::Pass; }
  const std::vector<Check>& checks() const { return checks_; }
  const std::vector<Table>& tables() const { return tables_; }
  // nullptr if absent
  const Check* find(const std::string& id) const;
  // Status of the check, Invalid if absent.
  Status status_of(const std::string& id) const;

 private:
  std::vector<Check> checks_;
  std::vector<Table> tables_;
};

// pass for Zero / SampledZero (the latter marked inexact), fail with a witness
// for NonZero, unknown otherwise.  `label` names the quantity in the witness.
Check zero_check(std::string id, std::string anchor, const expr::ZeroVerdict& v, const std::string& label);

// Folds one more zero test into an aggregate check: the status becomes the
// worse of the two and a NonZero verdict adds a witness with `context`.
void absorb(Check& c, const expr::ZeroVerdict& v, const Entries& context, const std::string& label);

}  // namespace dirac
