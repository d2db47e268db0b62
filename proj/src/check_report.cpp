#include "wulff/check_report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace wulff {

const char* to_string(Relation relation) {
  switch (relation) {
    case Relation::Equal: return "equal";
    case Relation::Leq: return "leq";
    case Relation::Geq: return "geq";
  }
  return "equal";
}

namespace {

CheckReport finish(CheckReport r, double scale) {
  r.abs_err = std::abs(r.lhs - r.rhs);
  r.rel_err = scale > 0.0 ? r.abs_err / scale : r.abs_err;
  const bool finite = std::isfinite(r.lhs) && std::isfinite(r.rhs);
  switch (r.relation) {
    case Relation::Equal: r.pass = finite && r.rel_err <= r.tol; break;
    case Relation::Leq: r.pass = finite && r.lhs <= r.rhs + r.tol; break;
    case Relation::Geq: r.pass = finite && r.lhs >= r.rhs - r.tol; break;
  }
  return r;
}

}  // namespace

CheckReport make_check(std::string name, double lhs, double rhs, Relation relation, double tol, std::string notes) {
  CheckReport r{std::move(name), lhs, rhs, relation, 0.0, 0.0, tol, false, std::move(notes)};
  return finish(std::move(r), std::max(std::abs(lhs), std::abs(rhs)));
}

CheckReport make_scaled_check(std::string name, double lhs, double rhs, double scale, double tol,
                              std::string notes) {
  CheckReport r{std::move(name), lhs, rhs, Relation::Equal, 0.0, 0.0, tol, false, std::move(notes)};
  return finish(std::move(r), std::abs(scale));
}

CheckReport make_count_check(std::string name, double failures, double allowed, std::string notes) {
  return make_check(std::move(name), failures, allowed, Relation::Leq, 0.0, std::move(notes));
}

bool all_pass(const std::vector<CheckReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.pass; });
}

std::string summary_line(const CheckReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, " lhs=%.10g rhs=%.10g rel=%s abs_err=%.3e rel_err=%.3e tol=%.3e",
                r.lhs, r.rhs, to_string(r.relation), r.abs_err, r.rel_err, r.tol);
  return std::string(r.pass ? "PASS " : "FAIL ") + r.name + buf;
}

}  // namespace wulff
