#include "tghp/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace tghp {

double rel_err(double lhs, double rhs) {
  const double denom = std::max(std::fabs(lhs), std::fabs(rhs));
  if (denom == 0.0) return 0.0;
  return std::fabs(lhs - rhs) / denom;
}

void CheckTable::add(const std::string& name, double lhs, double rhs, double tol) {
  CheckRow row;
  row.name = name;
  row.lhs = lhs;
  row.rhs = rhs;
  row.rel_err = rel_err(lhs, rhs);
  row.pass = row.rel_err <= tol && std::isfinite(lhs) && std::isfinite(rhs);
  rows.push_back(row);
}

void CheckTable::add_flag(const std::string& name, bool pass) {
  CheckRow row;
  row.name = name;
  row.pass = pass;
  rows.push_back(row);
}

void CheckTable::append(const CheckTable& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

bool CheckTable::all_pass() const {
  for (const auto& r : rows)
    if (!r.pass) return false;
  return true;
}

void CheckTable::write(std::ostream& os) const {
  if (!title.empty()) os << "# " << title << "\n";
  os << "name\tlhs\trhs\trel_err\tpass\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.10g\t%.10g\t%.3g", r.lhs, r.rhs, r.rel_err);
    os << r.name << "\t" << buf << "\t" << (r.pass ? "pass" : "FAIL") << "\n";
  }
}

}  // namespace tghp
