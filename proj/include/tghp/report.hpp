#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tghp {

// One row of a verification table: name, lhs, rhs, rel_err, pass.
struct CheckRow {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_err = 0.0;
  bool pass = false;
};

struct CheckTable {
  std::string title;
  std::vector<CheckRow> rows;

  void add(const std::string& name, double lhs, double rhs, double tol);
  // For yes/no checks without a numeric pair.
  void add_flag(const std::string& name, bool pass);
  void append(const CheckTable& other);
  bool all_pass() const;
  void write(std::ostream& os) const;
};

double rel_err(double lhs, double rhs);

}  // namespace tghp
