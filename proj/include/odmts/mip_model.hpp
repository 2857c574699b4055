#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace odmts {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarType { Continuous, Binary };

struct MipVar {
  std::string name;
  VarType type = VarType::Continuous;
  double lb = 0.0;
  double ub = kInf;
  double objective = 0.0;
};

// One linear row lb <= sum(coef * var) <= ub. Equality when lb == ub,
// one-sided when the other bound is infinite.
struct MipRow {
  std::string name;
  std::vector<std::pair<int, double>> terms;
  double lb = -kInf;
  double ub = kInf;
};

// Sparse mixed-integer program, always a minimization. Rows and variables
// keep their creation order so structural counts are reproducible.
class MipModel {
 public:
  std::string name = "model";
  double objective_offset = 0.0;

  int add_var(std::string var_name, VarType type, double lb, double ub,
              double objective);
  int add_row(std::string row_name, std::vector<std::pair<int, double>> terms,
              double lb, double ub);

  const std::vector<MipVar>& vars() const { return vars_; }
  const std::vector<MipRow>& rows() const { return rows_; }
  std::vector<MipVar>& vars() { return vars_; }

  size_t var_count() const { return vars_.size(); }
  size_t row_count() const { return rows_.size(); }
  size_t binary_count() const;

  // Starting point hints (variable index, value); backends may ignore them.
  std::vector<std::pair<int, double>> hints;

  // Objective value of a full assignment, offset included.
  double objective_value(const std::vector<double>& x) const;

  // Largest absolute row violation of a full assignment.
  double max_row_violation(const std::vector<double>& x) const;

  // CPLEX LP text format. Ranged rows are split into two inequalities.
  std::string to_lp() const;

 private:
  std::vector<MipVar> vars_;
  std::vector<MipRow> rows_;
};

// Replaces characters outside [A-Za-z0-9_] with '_' and prefixes a leading
// digit; LP names must not start with a number or symbol.
std::string sanitize_name(const std::string& raw);

}  // namespace odmts
