#pragma once

#include <string>
#include <vector>

namespace wulff {

enum class Relation { Equal, Leq, Geq };

const char* to_string(Relation relation);

/// One verification record.
///
/// Equal passes when rel_err <= tol, where rel_err = |lhs - rhs| / scale and
/// scale defaults to max(|lhs|, |rhs|). A zero scale makes the error absolute.
/// Leq and Geq treat tol as an absolute slack: lhs <= rhs + tol and
/// lhs >= rhs - tol respectively.
struct CheckReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  Relation relation = Relation::Equal;
  double abs_err = 0.0;
  double rel_err = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::string notes;
};

CheckReport make_check(std::string name, double lhs, double rhs, Relation relation, double tol,
                       std::string notes = {});

/// Equal-relation check whose relative error is measured against `scale`
/// instead of the sides themselves (useful when the exact value is zero).
CheckReport make_scaled_check(std::string name, double lhs, double rhs, double scale, double tol,
                              std::string notes = {});

/// Boolean predicate recorded as lhs = count of failures, rhs = 0.
CheckReport make_count_check(std::string name, double failures, double allowed, std::string notes = {});

bool all_pass(const std::vector<CheckReport>& reports);

/// Single machine-readable line: "PASS name lhs=... rhs=... rel_err=... tol=...".
std::string summary_line(const CheckReport& report);

}  // namespace wulff
