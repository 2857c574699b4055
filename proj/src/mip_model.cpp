#include "odmts/mip_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "odmts/common.hpp"

namespace odmts {

int MipModel::add_var(std::string var_name, VarType type, double lb, double ub,
                      double objective) {
  if (lb > ub) throw ValidationError("variable " + var_name + " has lb > ub");
  vars_.push_back({std::move(var_name), type, lb, ub, objective});
  return static_cast<int>(vars_.size()) - 1;
}

int MipModel::add_row(std::string row_name,
                      std::vector<std::pair<int, double>> terms, double lb,
                      double ub) {
  for (const auto& [v, c] : terms) {
    (void)c;
    if (v < 0 || v >= static_cast<int>(vars_.size()))
      throw ValidationError("row " + row_name + " references unknown variable");
  }
  rows_.push_back({std::move(row_name), std::move(terms), lb, ub});
  return static_cast<int>(rows_.size()) - 1;
}

size_t MipModel::binary_count() const {
  return static_cast<size_t>(
      std::count_if(vars_.begin(), vars_.end(), [](const MipVar& v) {
        return v.type == VarType::Binary;
      }));
}

double MipModel::objective_value(const std::vector<double>& x) const {
  double obj = objective_offset;
  for (size_t i = 0; i < vars_.size(); ++i) obj += vars_[i].objective * x[i];
  return obj;
}

double MipModel::max_row_violation(const std::vector<double>& x) const {
  double worst = 0.0;
  for (const auto& r : rows_) {
    double act = 0.0;
    for (const auto& [v, c] : r.terms) act += c * x[v];
    if (act < r.lb) worst = std::max(worst, r.lb - act);
    if (act > r.ub) worst = std::max(worst, act - r.ub);
  }
  return worst;
}

std::string sanitize_name(const std::string& raw) {
  std::string s;
  s.reserve(raw.size());
  for (char c : raw)
    s.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0])))
    s.insert(s.begin(), 'n');
  return s;
}

namespace {

void write_terms(std::ostream& os, const std::vector<MipVar>& vars,
                 const std::vector<std::pair<int, double>>& terms) {
  bool first = true;
  for (const auto& [v, c] : terms) {
    if (c == 0.0) continue;
    if (first) {
      os << (c < 0 ? "- " : "");
      first = false;
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    double a = std::fabs(c);
    if (a != 1.0) os << a << ' ';
    os << vars[v].name;
  }
  if (first) os << "0 " << vars.front().name;  // LP rows cannot be empty
}

}  // namespace

std::string MipModel::to_lp() const {
  std::ostringstream os;
  os.precision(17);
  os << "\\ " << name << "\n";
  os << "Minimize\n obj: ";
  std::vector<std::pair<int, double>> obj;
  for (size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i].objective != 0.0)
      obj.emplace_back(static_cast<int>(i), vars_[i].objective);
  if (obj.empty() && !vars_.empty()) obj.emplace_back(0, 0.0);
  write_terms(os, vars_, obj);
  os << "\nSubject To\n";
  for (const auto& r : rows_) {
    if (r.lb == -kInf && r.ub == kInf) continue;
    if (r.lb == r.ub) {
      os << ' ' << r.name << ": ";
      write_terms(os, vars_, r.terms);
      os << " = " << r.lb << '\n';
      continue;
    }
    if (r.ub < kInf) {
      os << ' ' << r.name << ": ";
      write_terms(os, vars_, r.terms);
      os << " <= " << r.ub << '\n';
    }
    if (r.lb > -kInf) {
      os << ' ' << r.name << (r.ub < kInf ? "_lo" : "") << ": ";
      write_terms(os, vars_, r.terms);
      os << " >= " << r.lb << '\n';
    }
  }
  os << "Bounds\n";
  for (const auto& v : vars_) {
    if (v.type == VarType::Binary && v.lb == 0.0 && v.ub == 1.0) continue;
    if (v.lb == -kInf && v.ub == kInf) {
      os << ' ' << v.name << " free\n";
    } else if (v.lb == v.ub) {
      os << ' ' << v.name << " = " << v.lb << '\n';
    } else {
      if (v.lb != 0.0) {
        if (v.lb == -kInf)
          os << " -inf <= " << v.name << '\n';
        else
          os << ' ' << v.lb << " <= " << v.name << '\n';
      }
      if (v.ub != kInf) os << ' ' << v.name << " <= " << v.ub << '\n';
    }
  }
  bool any_bin = false;
  for (const auto& v : vars_)
    if (v.type == VarType::Binary) {
      if (!any_bin) os << "Binaries\n";
      any_bin = true;
      os << ' ' << v.name << '\n';
    }
  os << "End\n";
  return os.str();
}

}  // namespace odmts
