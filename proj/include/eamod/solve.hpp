// Copyright 2026 The eamod Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "eamod/error.hpp"
#include "eamod/ingest.hpp"
#include "eamod/lp.hpp"
#include "eamod/model.hpp"

namespace eamod {

enum class SolveStatus { kOptimal, kInfeasible, kIterationLimit };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kIterationLimit:
      return "iteration-limit";
  }
  return "?";
}

struct BoundPoint {
  double incumbent = kInf;
  double bound = -kInf;
};

struct MilpSolution {
  SolveStatus status = SolveStatus::kInfeasible;
  std::vector<double> values;
  std::vector<int> integers;  ///< rounded values of the integer variables
  double objective = kInf;
  double bound = -kInf;
  double gap = kInf;
  std::size_t lp_iterations = 0;
  std::size_t nodes = 0;
  std::vector<BoundPoint> trace;  ///< incumbent and global bound per node
};

namespace detail {

inline SolveStatus from_lp(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal:
      return SolveStatus::kOptimal;
    case LpStatus::kInfeasible:
      return SolveStatus::kInfeasible;
    case LpStatus::kIterationLimit:
      return SolveStatus::kIterationLimit;
    case LpStatus::kUnbounded:
      throw Error("linear program is unbounded");
    case LpStatus::kNumericalError:
      break;
  }
  throw Error("linear program solve failed numerically");
}

inline std::vector<std::size_t> integer_indices(const MilpProblem& p) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < p.variable_count(); ++j)
    if (p.integer[j]) out.push_back(j);
  return out;
}

inline double relative_gap(double incumbent, double bound) {
  if (!std::isfinite(incumbent)) return kInf;
  return std::max(0.0, incumbent - bound) / std::max(std::abs(incumbent), 1e-9);
}

}  // namespace detail

/// Solves the LP relaxation, optionally with every integer variable fixed to
/// the given values (in variable order).
inline MilpSolution solve_lp(const MilpProblem& p,
                             const std::optional<std::vector<int>>& fixed = std::nullopt,
                             const LpOptions& opt = {}) {
  LinearProgram lp = p.lp;
  const auto ints = detail::integer_indices(p);
  if (fixed) {
    if (fixed->size() != ints.size())
      throw InvalidArgument("fixed assignment has " + std::to_string(fixed->size()) +
                            " values, problem has " + std::to_string(ints.size()));
    for (std::size_t k = 0; k < ints.size(); ++k)
      lp.lower[ints[k]] = lp.upper[ints[k]] = (*fixed)[k];
  }
  const LpResult r = solve_linear_program(lp, opt);
  MilpSolution s;
  s.status = detail::from_lp(r.status);
  s.lp_iterations = r.iterations;
  if (s.status == SolveStatus::kOptimal) {
    s.values = r.x;
    s.objective = s.bound = r.objective;
    s.gap = 0.0;
    for (std::size_t j : ints) s.integers.push_back(static_cast<int>(std::lround(r.x[j])));
  }
  return s;
}

inline MilpSolution solve_lp(const MilpInstance& inst,
                             const std::optional<std::vector<int>>& fixed = std::nullopt) {
  return solve_lp(inst.problem, fixed);
}

struct BranchOptions {
  double gap_tol = 1e-9;
  std::size_t node_limit = 100000;
  double integrality_tol = 1e-9;
};

/// Best-bound branch and bound; branches on the most fractional integer
/// variable, ties to the lowest index.
inline MilpSolution branch_and_bound(const MilpProblem& p, const BranchOptions& opt = {}) {
  const auto ints = detail::integer_indices(p);
  struct Node {
    double bound;
    std::size_t seq;
    std::vector<double> lo, hi;  ///< bounds of the integer variables
  };
  auto cmp = [](const Node& a, const Node& b) {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.seq > b.seq;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(cmp)> open(cmp);
  {
    Node root{-kInf, 0, {}, {}};
    for (std::size_t j : ints) {
      root.lo.push_back(std::ceil(p.lp.lower[j]));
      root.hi.push_back(std::floor(p.lp.upper[j]));
    }
    open.push(std::move(root));
  }
  std::size_t seq = 1;
  MilpSolution best;
  LinearProgram lp = p.lp;
  auto prunable = [&](double bound) {
    if (!std::isfinite(best.objective)) return false;
    const double slack = std::max(opt.gap_tol * std::abs(best.objective),
                                  1e-9 * std::max(1.0, std::abs(best.objective)));
    return bound >= best.objective - slack;
  };
  bool limited = false;
  while (!open.empty()) {
    if (prunable(open.top().bound)) break;
    if (best.nodes >= opt.node_limit) {
      limited = true;
      break;
    }
    Node node = open.top();
    open.pop();
    ++best.nodes;
    for (std::size_t k = 0; k < ints.size(); ++k) {
      lp.lower[ints[k]] = node.lo[k];
      lp.upper[ints[k]] = node.hi[k];
    }
    const LpResult r = solve_linear_program(lp);
    best.lp_iterations += r.iterations;
    const SolveStatus st = detail::from_lp(r.status);
    if (st == SolveStatus::kIterationLimit) {
      limited = true;
      break;
    }
    if (st == SolveStatus::kOptimal && !prunable(r.objective)) {
      std::size_t branch = ints.size();
      double frac_best = opt.integrality_tol;
      for (std::size_t k = 0; k < ints.size(); ++k) {
        const double v = r.x[ints[k]];
        const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
        if (frac > frac_best) {
          frac_best = frac;
          branch = k;
        }
      }
      if (branch == ints.size()) {
        best.values = r.x;
        best.integers.clear();
        for (std::size_t j : ints) {
          best.values[j] = std::round(r.x[j]);
          best.integers.push_back(static_cast<int>(best.values[j]));
        }
        best.objective = p.lp.objective(best.values);
      } else {
        const double v = r.x[ints[branch]];
        Node down{r.objective, seq++, node.lo, node.hi};
        down.hi[branch] = std::floor(v);
        Node up{r.objective, seq++, node.lo, node.hi};
        up.lo[branch] = std::ceil(v);
        open.push(std::move(down));
        open.push(std::move(up));
      }
    }
    const double frontier = open.empty() ? kInf : open.top().bound;
    best.trace.push_back({best.objective, std::min(frontier, best.objective)});
  }
  const double frontier = open.empty() ? kInf : open.top().bound;
  best.bound = std::min(frontier, best.objective);
  if (!std::isfinite(best.bound) && !std::isfinite(best.objective)) best.bound = kInf;
  best.gap = detail::relative_gap(best.objective, best.bound);
  if (limited)
    best.status = SolveStatus::kIterationLimit;
  else
    best.status = std::isfinite(best.objective) ? SolveStatus::kOptimal
                                                : SolveStatus::kInfeasible;
  if (best.status == SolveStatus::kOptimal) {
    best.bound = std::min(best.bound, best.objective);
    best.gap = std::min(best.gap, opt.gap_tol);
  }
  return best;
}

inline MilpSolution branch_and_bound(const MilpInstance& inst,
                                     const BranchOptions& opt = {}) {
  return branch_and_bound(inst.problem, opt);
}

// ---------------------------------------------------------------------------
// LP files.

namespace detail {

class LineWriter {
 public:
  explicit LineWriter(std::ostream& out) : out_(out) {}
  void put(const std::string& tok) {
    if (width_ + tok.size() + 1 > 200) {
      out_ << "\n  ";
      width_ = 2;
    }
    out_ << ' ' << tok;
    width_ += tok.size() + 1;
  }
  void end() {
    out_ << '\n';
    width_ = 0;
  }

 private:
  std::ostream& out_;
  std::size_t width_ = 0;
};

inline void write_terms(LineWriter& w, const std::vector<std::pair<std::size_t, double>>& t,
                        const std::vector<std::string>& names) {
  bool first = true;
  for (auto [j, a] : t) {
    if (a == 0.0) continue;
    if (a < 0)
      w.put("-");
    else if (!first)
      w.put("+");
    w.put(format_double(std::abs(a)));
    w.put(names[j]);
    first = false;
  }
  if (first) w.put("0");
}

}  // namespace detail

/// CPLEX LP format. Variables without explicit bounds default to [0, inf).
inline void emit_lp_file(const MilpProblem& p, std::ostream& out) {
  detail::LineWriter w(out);
  out << "\\ eamod instance\nMinimize\n";
  w.put(p.objective_name + ":");
  std::vector<std::pair<std::size_t, double>> obj;
  for (std::size_t j = 0; j < p.variable_count(); ++j)
    if (p.lp.cost[j] != 0.0) obj.emplace_back(j, p.lp.cost[j]);
  detail::write_terms(w, obj, p.var_names);
  w.end();
  out << "Subject To\n";
  for (std::size_t i = 0; i < p.row_count(); ++i) {
    const auto& row = p.lp.rows[i];
    w.put(p.row_names[i] + ":");
    detail::write_terms(w, row.coefs, p.var_names);
    w.put(row.sense == Sense::kLe ? "<=" : row.sense == Sense::kGe ? ">=" : "=");
    w.put(detail::format_double(row.rhs));
    w.end();
  }
  out << "Bounds\n";
  std::vector<std::string> binaries, generals;
  for (std::size_t j = 0; j < p.variable_count(); ++j) {
    const double lo = p.lp.lower[j], hi = p.lp.upper[j];
    const std::string& name = p.var_names[j];
    const bool binary = p.integer[j] && lo == 0.0 && hi == 1.0;
    if (binary) {
      binaries.push_back(name);
      continue;
    }
    if (p.integer[j]) generals.push_back(name);
    if (lo == 0.0 && hi == kInf) continue;
    if (lo == -kInf && hi == kInf) {
      out << ' ' << name << " free\n";
    } else if (lo == hi) {
      out << ' ' << name << " = " << detail::format_double(lo) << '\n';
    } else {
      out << ' ' << (lo == -kInf ? std::string("-inf") : detail::format_double(lo))
          << " <= " << name << " <= "
          << (hi == kInf ? std::string("+inf") : detail::format_double(hi)) << '\n';
    }
  }
  auto list = [&](const char* title, const std::vector<std::string>& names) {
    if (names.empty()) return;
    out << title << '\n';
    for (const auto& n : names) w.put(n);
    w.end();
  };
  list("Binaries", binaries);
  list("Generals", generals);
  out << "End\n";
}

namespace detail {

struct LpToken {
  enum Kind { kName, kNumber, kOp, kColon } kind;
  std::string text;
  double value = 0.0;
  std::size_t line = 0;
};

inline bool lp_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '[' ||
         c == ']' || c == '#' || c == '$' || c == '!' || c == '"' || c == '\'' || c == '{' ||
         c == '}' || c == '~' || c == '&' || c == '@' || c == '?' || c == '`' || c == '|';
}

inline std::vector<LpToken> lp_tokens(std::string_view s, std::size_t line) {
  std::vector<LpToken> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (c == '\\') break;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == ':') {
      out.push_back({LpToken::kColon, ":", 0.0, line});
      ++i;
    } else if (c == '<' || c == '>' || c == '=') {
      std::string op(1, c);
      ++i;
      if (i < s.size() && s[i] == '=') {
        op += '=';
        ++i;
      }
      if (op == "=<") op = "<=";
      if (op == "=>") op = ">=";
      if (op == "<") op = "<=";
      if (op == ">") op = ">=";
      out.push_back({LpToken::kOp, op, 0.0, line});
    } else if (c == '+' || c == '-') {
      out.push_back({LpToken::kOp, std::string(1, c), 0.0, line});
      ++i;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t j = i;
      while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.'))
        ++j;
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
          j = k;
          while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        }
      }
      const std::string num(s.substr(i, j - i));
      out.push_back({LpToken::kNumber, num, to_double(num, line), line});
      i = j;
    } else if (lp_name_char(c)) {
      std::size_t j = i;
      while (j < s.size() && lp_name_char(s[j])) ++j;
      out.push_back({LpToken::kName, std::string(s.substr(i, j - i)), 0.0, line});
      i = j;
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", line);
    }
  }
  return out;
}

inline std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace detail

/// Reads the LP-format subset produced by emit_lp_file (minimization,
/// linear rows, bounds, binaries and generals).
inline MilpProblem parse_lp_file(std::istream& in) {
  enum Section { kNone, kObjective, kRows, kBounds, kBinaries, kGenerals, kEnd };
  MilpProblem p;
  std::unordered_map<std::string, std::size_t> index;
  auto var = [&](const std::string& name) {
    auto [it, fresh] = index.emplace(name, p.variable_count());
    if (fresh) p.add_variable(name, 0.0, 0.0, kInf, false);
    return it->second;
  };
  Section section = kNone;
  std::vector<detail::LpToken> pending;
  std::vector<std::pair<std::size_t, std::vector<detail::LpToken>>> bound_lines;
  std::vector<detail::LpToken> objective_tokens;

  // Consumes `pending` into rows; keeps a trailing partial row.
  auto flush_rows = [&](bool final) {
    std::size_t i = 0;
    while (i < pending.size()) {
      std::size_t k = i;
      std::string name = "r" + std::to_string(p.row_count());
      if (k + 1 < pending.size() && pending[k].kind == detail::LpToken::kName &&
          pending[k + 1].kind == detail::LpToken::kColon) {
        name = pending[k].text;
        k += 2;
      }
      std::size_t op = k;
      while (op < pending.size() &&
             !(pending[op].kind == detail::LpToken::kOp &&
               (pending[op].text == "<=" || pending[op].text == ">=" ||
                pending[op].text == "=")))
        ++op;
      // rhs: optional sign then number.
      std::size_t end = op + 1;
      double sign = 1.0;
      if (end < pending.size() && pending[end].kind == detail::LpToken::kOp &&
          (pending[end].text == "-" || pending[end].text == "+")) {
        if (pending[end].text == "-") sign = -1.0;
        ++end;
      }
      if (op >= pending.size() || end >= pending.size()) {
        if (final)
          throw ParseError("incomplete constraint " + name,
                           pending.empty() ? 0 : pending.back().line);
        pending.erase(pending.begin(), pending.begin() + static_cast<long>(i));
        return;
      }
      if (pending[end].kind != detail::LpToken::kNumber)
        throw ParseError("constraint " + name + " needs a numeric right-hand side",
                         pending[end].line);
      std::vector<std::pair<std::size_t, double>> coefs;
      double coef = 1.0;
      bool have_num = false;
      for (std::size_t t = k; t < op; ++t) {
        const auto& tok = pending[t];
        if (tok.kind == detail::LpToken::kOp && tok.text == "-") {
          coef = -coef;
        } else if (tok.kind == detail::LpToken::kOp && tok.text == "+") {
        } else if (tok.kind == detail::LpToken::kNumber) {
          coef *= tok.value;
          have_num = true;
        } else if (tok.kind == detail::LpToken::kName) {
          coefs.emplace_back(var(tok.text), coef);
          coef = 1.0;
          have_num = false;
        } else {
          throw ParseError("unexpected '" + tok.text + "' in constraint " + name, tok.line);
        }
      }
      (void)have_num;
      const std::string& s = pending[op].text;
      const Sense sense = s == "<=" ? Sense::kLe : s == ">=" ? Sense::kGe : Sense::kEq;
      const std::string tag = name.substr(0, name.find('_'));
      p.add_row(name, tag, std::move(coefs), sense, sign * pending[end].value);
      i = end + 1;
    }
    pending.clear();
  };

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string trimmed(detail::trim(raw));
    const std::string key = detail::lower(trimmed);
    auto enter = [&](Section s) {
      if (section == kRows) flush_rows(true);
      section = s;
    };
    if (key == "minimize" || key == "minimise" || key == "min") {
      enter(kObjective);
      continue;
    }
    if (key == "maximize" || key == "maximise" || key == "max")
      throw Unsupported("maximization LP files are not supported");
    if (key == "subject to" || key == "such that" || key == "st" || key == "s.t.") {
      enter(kRows);
      continue;
    }
    if (key == "bounds" || key == "bound") {
      enter(kBounds);
      continue;
    }
    if (key == "binaries" || key == "binary" || key == "bin") {
      enter(kBinaries);
      continue;
    }
    if (key == "generals" || key == "general" || key == "gen") {
      enter(kGenerals);
      continue;
    }
    if (key == "end") {
      enter(kEnd);
      continue;
    }
    auto toks = detail::lp_tokens(trimmed, line_no);
    if (toks.empty()) continue;
    switch (section) {
      case kNone:
      case kEnd:
        throw ParseError("content outside a section", line_no);
      case kObjective:
        objective_tokens.insert(objective_tokens.end(), toks.begin(), toks.end());
        break;
      case kRows:
        pending.insert(pending.end(), toks.begin(), toks.end());
        flush_rows(false);
        break;
      case kBounds:
        bound_lines.emplace_back(line_no, std::move(toks));
        break;
      case kBinaries:
      case kGenerals:
        for (const auto& t : toks) {
          if (t.kind != detail::LpToken::kName)
            throw ParseError("expected a variable name", t.line);
          const std::size_t j = var(t.text);
          p.integer[j] = true;
          if (section == kBinaries) {
            p.lp.lower[j] = 0.0;
            p.lp.upper[j] = 1.0;
          }
        }
        break;
    }
  }
  if (section == kRows) flush_rows(true);

  // Objective.
  {
    std::size_t k = 0;
    if (objective_tokens.size() >= 2 && objective_tokens[0].kind == detail::LpToken::kName &&
        objective_tokens[1].kind == detail::LpToken::kColon) {
      p.objective_name = objective_tokens[0].text;
      k = 2;
    }
    double coef = 1.0;
    for (; k < objective_tokens.size(); ++k) {
      const auto& tok = objective_tokens[k];
      if (tok.kind == detail::LpToken::kOp && tok.text == "-")
        coef = -coef;
      else if (tok.kind == detail::LpToken::kOp && tok.text == "+")
        continue;
      else if (tok.kind == detail::LpToken::kNumber)
        coef *= tok.value;
      else if (tok.kind == detail::LpToken::kName) {
        p.lp.cost[var(tok.text)] += coef;
        coef = 1.0;
      } else
        throw ParseError("unexpected '" + tok.text + "' in objective", tok.line);
    }
  }

  // Bounds.
  auto number = [](const std::vector<detail::LpToken>& t, std::size_t& k,
                   std::size_t line) {
    double sign = 1.0;
    if (k < t.size() && t[k].kind == detail::LpToken::kOp &&
        (t[k].text == "-" || t[k].text == "+")) {
      if (t[k].text == "-") sign = -1.0;
      ++k;
    }
    if (k >= t.size()) throw ParseError("bound needs a value", line);
    const auto& tok = t[k++];
    if (tok.kind == detail::LpToken::kNumber) return sign * tok.value;
    const std::string w = detail::lower(tok.text);
    if (tok.kind == detail::LpToken::kName && (w == "inf" || w == "infinity"))
      return sign * kInf;
    throw ParseError("bad bound value '" + tok.text + "'", line);
  };
  auto is_value = [](const std::vector<detail::LpToken>& t, std::size_t k) {
    if (k < t.size() && t[k].kind == detail::LpToken::kOp &&
        (t[k].text == "-" || t[k].text == "+"))
      ++k;
    if (k >= t.size()) return false;
    if (t[k].kind == detail::LpToken::kNumber) return true;
    const std::string w = detail::lower(t[k].text);
    return w == "inf" || w == "infinity";
  };
  for (auto& [line, t] : bound_lines) {
    std::size_t k = 0;
    if (t.size() == 2 && t[0].kind == detail::LpToken::kName &&
        detail::lower(t[1].text) == "free") {
      const std::size_t j = var(t[0].text);
      p.lp.lower[j] = -kInf;
      p.lp.upper[j] = kInf;
      continue;
    }
    std::optional<double> left;
    std::string left_op;
    if (is_value(t, 0)) {
      left = number(t, k, line);
      if (k >= t.size() || t[k].kind != detail::LpToken::kOp)
        throw ParseError("malformed bound", line);
      left_op = t[k++].text;
    }
    if (k >= t.size() || t[k].kind != detail::LpToken::kName)
      throw ParseError("bound needs a variable", line);
    const std::size_t j = var(t[k++].text);
    auto apply = [&](const std::string& op, double v, bool value_left) {
      if (op == "=") {
        p.lp.lower[j] = p.lp.upper[j] = v;
      } else if ((op == "<=") == value_left) {
        p.lp.lower[j] = v;
      } else {
        p.lp.upper[j] = v;
      }
    };
    if (left) apply(left_op, *left, true);
    if (k < t.size()) {
      if (t[k].kind != detail::LpToken::kOp) throw ParseError("malformed bound", line);
      const std::string op = t[k++].text;
      apply(op, number(t, k, line), false);
    }
    if (k != t.size()) throw ParseError("trailing tokens in bound", line);
  }
  return p;
}

/// `objective <value>` followed by one `name value` line per variable.
inline void write_solution_file(const MilpProblem& p, const std::vector<double>& x,
                                std::ostream& out) {
  if (x.size() != p.variable_count())
    throw InvalidArgument("solution size does not match problem");
  out << "objective " << detail::format_double(p.lp.objective(x)) << '\n';
  for (std::size_t j = 0; j < x.size(); ++j)
    out << p.var_names[j] << ' ' << detail::format_double(x[j]) << '\n';
}

/// Reads `name value` lines by variable name; absent variables are zero.
/// A reported objective must agree with the recomputed one.
inline MilpSolution parse_solution_file(std::istream& in, const MilpProblem& p) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < p.variable_count(); ++j) index.emplace(p.var_names[j], j);
  MilpSolution s;
  s.values.assign(p.variable_count(), 0.0);
  std::optional<double> reported;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::istringstream ss{std::string(line)};
    std::string name, value, extra;
    if (!(ss >> name >> value) || (ss >> extra))
      throw ParseError("expected 'name value'", line_no);
    const double v = detail::to_double(value, line_no);
    if (name == "objective") {
      reported = v;
      continue;
    }
    auto it = index.find(name);
    if (it == index.end()) throw ParseError("unknown variable " + name, line_no);
    s.values[it->second] = v;
  }
  s.objective = s.bound = p.lp.objective(s.values);
  if (reported &&
      std::abs(*reported - s.objective) > 1e-6 * std::max(1.0, std::abs(s.objective)))
    throw Error("reported objective " + detail::format_double(*reported) +
                " differs from recomputed " + detail::format_double(s.objective));
  for (std::size_t j = 0; j < p.variable_count(); ++j)
    if (p.integer[j]) s.integers.push_back(static_cast<int>(std::lround(s.values[j])));
  s.status = SolveStatus::kOptimal;
  s.gap = 0.0;
  return s;
}

}  // namespace eamod
