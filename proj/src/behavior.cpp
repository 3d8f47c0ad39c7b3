// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0

#include "evoheur/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "evoheur/errors.hpp"
#include "evoheur/guest_source.hpp"
#include "evoheur/tasks/contract.hpp"

namespace evoheur::behavior {
namespace {

using guest::Statement;
using guest::Token;
using guest::TokenKind;

const std::set<std::string, std::less<>> kBuiltins = {
    "abs",       "all",        "any",      "bin",       "bool",         "bytearray",
    "bytes",     "callable",   "chr",      "classmethod", "complex",    "dict",
    "divmod",    "enumerate",  "filter",   "float",     "format",       "frozenset",
    "hasattr",   "hash",       "hex",      "id",        "int",          "isinstance",
    "issubclass", "iter",      "len",      "list",      "map",          "max",
    "min",       "next",       "object",   "oct",       "ord",          "pow",
    "print",     "property",   "range",    "repr",      "reversed",     "round",
    "set",       "slice",      "sorted",   "staticmethod", "str",       "sum",
    "super",     "tuple",      "type",     "zip",       "ValueError",   "TypeError",
    "IndexError", "KeyError",  "Exception", "RuntimeError", "ZeroDivisionError",
};

const std::set<std::string, std::less<>> kOperatorSymbols = {
    "+",  "-",  "*",   "/",   "//",  "%",  "**", "@",  "<<", ">>", "&",   "|",
    "^",  "~",  "<",   ">",   "<=",  ">=", "==", "!=", "+=", "-=", "*=",  "/=",
    "//=", "%=", "**=", "@=", "&=",  "|=", "^=", ">>=", "<<=",
};

const std::set<std::string, std::less<>> kLogicalWords = {"and", "or", "not", "is", "in"};

const std::set<std::string, std::less<>> kNestingKeywords = {"def", "if", "elif", "else",
                                                              "for", "while"};

bool is_name(const Token& t, std::string_view text) {
  return t.kind == TokenKind::kName && t.text == text;
}

bool is_op(const Token& t, std::string_view text) {
  return t.kind == TokenKind::kOp && t.text == text;
}

struct Counts {
  int statements = 0;
  int max_depth = 0;
  int branches = 0;
  int loops = 0;
  int defs_other = 0;
  int calls = 0;
  int bulk_calls = 0;
  int operators = 0;
  std::set<std::string> helper_calls;
};

class Walker {
 public:
  Walker(std::string_view entry, std::span<const std::string> bulk_ops)
      : entry_(entry), bulk_(bulk_ops.begin(), bulk_ops.end()) {}

  void walk(const std::vector<Statement>& stmts, int depth) {
    for (const auto& s : stmts) {
      ++c_.statements;
      int inner = depth;
      if (kNestingKeywords.count(s.keyword)) {
        inner = depth + 1;
        c_.max_depth = std::max(c_.max_depth, inner);
      }
      const std::size_t lead = !s.tokens.empty() && is_name(s.tokens[0], "async") ? 1 : 0;
      if (s.keyword == "if" || s.keyword == "elif") ++c_.branches;
      if (s.keyword == "for" || s.keyword == "while") ++c_.loops;
      if (s.keyword == "def") {
        const std::string& name = s.tokens[lead + 1].text;
        if (name != entry_) ++c_.defs_other;
      }
      scan_tokens(s, lead);
      walk(s.body, inner);
    }
  }

  const Counts& counts() const { return c_; }

 private:
  void scan_tokens(const Statement& s, std::size_t lead) {
    const auto& t = s.tokens;
    const bool header_kw = s.compound;
    int for_tokens = 0;
    int in_tokens = 0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      const Token& tok = t[k];
      const bool is_leading = header_kw && k == lead;
      if (tok.kind == TokenKind::kName) {
        if (tok.text == "if" && !is_leading) ++c_.branches;
        if (tok.text == "for") {
          ++for_tokens;
          if (!is_leading) ++c_.loops;
        }
        if (tok.text == "in") {
          ++in_tokens;
          continue;
        }
        if (kLogicalWords.count(tok.text)) ++c_.operators;
        if (k + 1 < t.size() && is_op(t[k + 1], "(") && !guest::is_keyword(tok.text)) {
          const bool defined_here = k > 0 && (is_name(t[k - 1], "def") || is_name(t[k - 1], "class"));
          if (defined_here) continue;
          ++c_.calls;
          const bool dotted = k > 0 && is_op(t[k - 1], ".");
          if (dotted) {
            if (bulk_.count(tok.text)) ++c_.bulk_calls;
          } else if (!kBuiltins.count(tok.text)) {
            c_.helper_calls.insert(tok.text);
          }
        }
        continue;
      }
      if (tok.kind != TokenKind::kOp) continue;
      if (tok.text == "(" && k > 0 && (is_op(t[k - 1], ")") || is_op(t[k - 1], "]"))) {
        ++c_.calls;
        continue;
      }
      if (!kOperatorSymbols.count(tok.text)) continue;
      if (tok.text == "*" || tok.text == "**") {
        // Star-unpacking and keyword-only markers are not arithmetic.
        const bool unpack = k == 0 || is_op(t[k - 1], "(") || is_op(t[k - 1], ",") ||
                            is_op(t[k - 1], "[") || is_op(t[k - 1], "{") ||
                            is_name(t[k - 1], "lambda") || is_op(t[k - 1], "=");
        if (unpack) continue;
      }
      ++c_.operators;
    }
    // Every for-clause owns one 'in'; the rest are membership tests.
    c_.operators += std::max(0, in_tokens - for_tokens);
  }

  std::string entry_;
  std::set<std::string, std::less<>> bulk_;
  Counts c_;
};

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double pop_std(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  const double m = mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(xs.size()));
}

// Average ranks (1-based), ties share the mean rank.
std::vector<double> ranks(std::span<const double> xs) {
  std::vector<int> idx(xs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return xs[a] < xs[b]; });
  std::vector<double> r(xs.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && xs[idx[j + 1]] == xs[idx[i]]) ++j;
    const double avg = (static_cast<double>(i + j) / 2.0) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  const double ma = mean(a), mb = mean(b);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 0 || sbb <= 0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

std::vector<double> tsp_features(const tasks::TspInstance& inst, std::span<const int> decisions) {
  const int n = inst.size();
  std::vector<char> visited(n, 0);
  visited[0] = 1;
  int current = 0;
  int nearest_hits = 0;
  std::vector<double> detours, myopia;
  for (int choice : decisions) {
    double dmin = std::numeric_limits<double>::infinity();
    int m = 0;
    for (int u = 0; u < n; ++u) {
      if (visited[u]) continue;
      ++m;
      dmin = std::min(dmin, inst.distance(current, u));
    }
    const double d = inst.distance(current, choice);
    if (d <= dmin) ++nearest_hits;
    if (dmin > 0) detours.push_back(d / dmin - 1.0);
    if (m >= 2) {
      int closer = 0;
      for (int u = 0; u < n; ++u) {
        if (!visited[u] && inst.distance(current, u) < d) ++closer;
      }
      myopia.push_back(1.0 - static_cast<double>(closer) / (m - 1));
    }
    visited[choice] = 1;
    current = choice;
  }

  std::vector<int> tour{0};
  tour.insert(tour.end(), decisions.begin(), decisions.end());
  const int len = static_cast<int>(tour.size());
  std::vector<double> edges, turns;
  for (int i = 0; i < len; ++i) edges.push_back(inst.distance(tour[i], tour[(i + 1) % len]));
  if (len >= 3) {
    for (int i = 0; i < len; ++i) {
      const auto& a = inst.coords[tour[(i + len - 1) % len]];
      const auto& b = inst.coords[tour[i]];
      const auto& c = inst.coords[tour[(i + 1) % len]];
      const double ux = b[0] - a[0], uy = b[1] - a[1];
      const double vx = c[0] - b[0], vy = c[1] - b[1];
      const double cross = ux * vy - uy * vx;
      const double dot = ux * vx + uy * vy;
      turns.push_back(cross == 0.0 && dot == 0.0 ? 0.0 : std::abs(std::atan2(cross, dot)));
    }
  }
  const double edge_mean = mean(edges);
  const int steps = static_cast<int>(decisions.size());
  return {
      steps ? static_cast<double>(nearest_hits) / steps : 0.0,
      pop_std(turns),
      mean(detours),
      edge_mean > 0 ? pop_std(edges) / edge_mean : 0.0,
      myopia.empty() ? 1.0 : mean(myopia),
  };
}

std::vector<double> bpp_features(const tasks::BppInstance& inst, std::span<const int> decisions) {
  std::vector<int> residual;
  std::vector<double> early;
  for (std::size_t s = 0; s < decisions.size(); ++s) {
    const int item = inst.items[s];
    const int bin = decisions[s];
    int feasible = 0, position = -1;
    for (int b = 0; b < static_cast<int>(residual.size()); ++b) {
      if (residual[b] >= item) {
        if (b == bin) position = feasible;
        ++feasible;
      }
    }
    if (bin == static_cast<int>(residual.size())) {
      residual.push_back(inst.capacity);
    } else if (feasible >= 1) {
      early.push_back(feasible >= 2 ? static_cast<double>(position) / (feasible - 1) : 0.0);
    }
    residual[bin] -= item;
  }
  const double cap = inst.capacity;
  std::vector<double> fill, rel_residual;
  int fragmented = 0, closed = 0;
  for (int r : residual) {
    fill.push_back((cap - r) / cap);
    rel_residual.push_back(r / cap);
    if (r > 0 && r <= 0.1 * cap) ++fragmented;
    if (r == 0) ++closed;
  }
  const double bins = static_cast<double>(residual.size());
  return {
      mean(fill),
      bins > 0 ? fragmented / bins : 0.0,
      bins > 0 ? closed / bins : 0.0,
      pop_std(rel_residual),
      mean(early),
  };
}

std::vector<double> pfsp_features(const tasks::PfspInstance& inst, std::span<const int> seq) {
  const int n = static_cast<int>(seq.size());
  const int m = inst.machines();
  std::vector<int> prev(m, 0), cur(m, 0);
  double total_wait = 0.0;
  for (int job : seq) {
    const auto& p = inst.ptimes[job];
    for (int k = 0; k < m; ++k) {
      const int ready = k == 0 ? 0 : cur[k - 1];
      const int start = std::max(ready, prev[k]);
      if (k > 0) total_wait += start - ready;
      cur[k] = start + p[k];
    }
    prev = cur;
  }
  const double cmax = m ? prev[m - 1] : 0;
  std::vector<double> idle(m), work(m, 0.0);
  for (int k = 0; k < m; ++k) {
    for (int j = 0; j < inst.jobs(); ++j) work[k] += inst.ptimes[j][k];
    idle[k] = prev[k] - work[k];
  }
  const double idle_total = std::accumulate(idle.begin(), idle.end(), 0.0);
  const double idle_max = idle.empty() ? 0.0 : *std::max_element(idle.begin(), idle.end());

  std::vector<int> by_work(inst.jobs());
  std::iota(by_work.begin(), by_work.end(), 0);
  std::stable_sort(by_work.begin(), by_work.end(), [&](int a, int b) {
    return std::accumulate(inst.ptimes[a].begin(), inst.ptimes[a].end(), 0) <
           std::accumulate(inst.ptimes[b].begin(), inst.ptimes[b].end(), 0);
  });
  const int quarter = (inst.jobs() + 3) / 4;
  std::vector<int> pos(inst.jobs(), 0);
  for (int i = 0; i < n; ++i) pos[seq[i]] = i;
  std::vector<double> front;
  for (int q = 0; q < quarter; ++q) {
    front.push_back(n > 1 ? static_cast<double>(pos[by_work[q]]) / (n - 1) : 0.0);
  }
  const double bottleneck = work.empty() ? 0.0 : *std::max_element(work.begin(), work.end());
  return {
      idle_total > 0 ? idle_max / idle_total : 0.0,
      mean(front),
      cmax > 0 ? bottleneck / cmax : 0.0,
      cmax > 0 ? pop_std(idle) / cmax : 0.0,
      cmax > 0 && n > 0 ? total_wait / n / cmax : 0.0,
  };
}

std::vector<double> mkp_features(const tasks::MkpInstance& inst, std::span<const int> admitted) {
  std::vector<long> room(inst.capacities.begin(), inst.capacities.end());
  for (int j : admitted) {
    for (int c = 0; c < inst.constraints(); ++c) room[c] -= inst.weights[c][j];
  }
  double corr = 0.0;
  if (admitted.size() >= 2) {
    std::vector<double> order, neg_density;
    for (std::size_t i = 0; i < admitted.size(); ++i) {
      order.push_back(static_cast<double>(i));
      neg_density.push_back(-tasks::mkp_item_density(inst, admitted[i]));
    }
    const auto r_order = ranks(order);
    const auto r_density = ranks(neg_density);
    corr = pearson(r_order, r_density);
  }
  std::vector<double> slack, util;
  for (int c = 0; c < inst.constraints(); ++c) {
    const double s = static_cast<double>(room[c]) / inst.capacities[c];
    slack.push_back(s);
    util.push_back(1.0 - s);
  }
  return {
      corr,
      mean(slack),
      slack.empty() ? 0.0 : *std::min_element(slack.begin(), slack.end()),
      inst.items() ? static_cast<double>(admitted.size()) / inst.items() : 0.0,
      pop_std(util),
  };
}

}  // namespace

std::vector<double> StaticFeatures::as_vector() const {
  return {static_cast<double>(control_flow_depth), branch_density,
          static_cast<double>(loop_count),         static_cast<double>(helper_usage),
          vectorization_density,                   op_complexity};
}

std::vector<std::string> default_bulk_ops() {
  return {"argmin",  "argmax", "argsort", "where",   "dot",      "matmul",  "einsum",
          "sum",     "mean",   "std",     "var",     "min",      "max",     "prod",
          "cumsum",  "clip",   "abs",     "sqrt",    "exp",      "log",     "maximum",
          "minimum", "array",  "asarray", "zeros",   "ones",     "full",    "arange",
          "linspace", "concatenate", "stack", "nonzero", "take", "unique", "isin",
          "any",     "all",    "multiply", "divide", "add",      "subtract", "power",
          "square",  "partition", "argpartition", "lexsort", "tile", "repeat"};
}

StaticFeatures static_features(std::string_view source, std::string_view entry_point,
                               std::span<const std::string> bulk_ops) {
  guest::Module mod;
  try {
    mod = guest::parse(source);
  } catch (const ParseError& e) {
    throw FeatureExtractionError(std::string("cannot parse source: ") + e.what());
  }
  Walker w(entry_point, bulk_ops);
  w.walk(mod.statements, 0);
  const Counts& c = w.counts();
  StaticFeatures f;
  f.control_flow_depth = c.max_depth;
  f.loop_count = c.loops;
  f.helper_usage = c.defs_other + static_cast<int>(c.helper_calls.size());
  if (c.statements > 0) {
    f.branch_density = static_cast<double>(c.branches) / c.statements;
    f.op_complexity = static_cast<double>(c.operators) / c.statements;
  }
  const int ops = c.calls + c.operators;
  if (ops > 0) f.vectorization_density = static_cast<double>(c.bulk_calls) / ops;
  return f;
}

StaticFeatures static_features(std::string_view source, std::string_view entry_point) {
  const auto ops = default_bulk_ops();
  return static_features(source, entry_point, ops);
}

std::vector<double> instance_runtime_features(const tasks::Instance& inst,
                                              std::span<const int> decisions) {
  tasks::replay_decisions(inst, decisions);  // validates the log
  switch (tasks::kind_of(inst)) {
    case tasks::TaskKind::kTsp: return tsp_features(std::get<tasks::TspInstance>(inst), decisions);
    case tasks::TaskKind::kBpp: return bpp_features(std::get<tasks::BppInstance>(inst), decisions);
    case tasks::TaskKind::kPfsp:
      return pfsp_features(std::get<tasks::PfspInstance>(inst), decisions);
    case tasks::TaskKind::kMkp: return mkp_features(std::get<tasks::MkpInstance>(inst), decisions);
  }
  throw ContractError("unknown task kind");
}

std::vector<double> runtime_features(tasks::TaskKind kind,
                                     std::span<const tasks::Instance> instances,
                                     std::span<const std::vector<int>> decisions) {
  if (instances.size() != decisions.size()) {
    throw ContractError("runtime_features: instance and decision counts differ");
  }
  if (instances.empty()) throw ContractError("runtime_features: empty trace");
  std::vector<double> acc(kRuntimeDims, 0.0);
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (tasks::kind_of(instances[i]) != kind) {
      throw ContractError("runtime_features: trace of " +
                          std::string(tasks::to_string(tasks::kind_of(instances[i]))) +
                          " given for " + std::string(tasks::to_string(kind)));
    }
    const auto f = instance_runtime_features(instances[i], decisions[i]);
    for (int d = 0; d < kRuntimeDims; ++d) acc[d] += f[d];
  }
  for (double& v : acc) v /= static_cast<double>(instances.size());
  return acc;
}

std::vector<std::string> coordinate_names(tasks::TaskKind kind) {
  std::vector<std::string> names;
  switch (kind) {
    case tasks::TaskKind::kTsp:
      names = {"local_edge_pref", "turn_regularity", "detour_rate", "edge_var", "greedy_myopia"};
      break;
    case tasks::TaskKind::kBpp:
      names = {"fill_ratio", "fragmentation", "closure_rate", "residual_dispersion",
               "early_bin_bias"};
      break;
    case tasks::TaskKind::kPfsp:
      names = {"idle_concentration", "front_loading", "critical_share", "idle_dispersion",
               "mean_wait"};
      break;
    case tasks::TaskKind::kMkp:
      names = {"density_rank_corr", "mean_slack", "min_slack", "admission_rate",
               "utilization_dispersion"};
      break;
  }
  for (const char* s : {"cf_depth", "branch_density", "loop_count", "helper_usage",
                        "vector_density", "op_complexity"}) {
    names.emplace_back(s);
  }
  return names;
}

std::vector<double> assemble(std::span<const double> runtime, const StaticFeatures& st) {
  if (runtime.size() != kRuntimeDims) throw ContractError("runtime vector must have 5 entries");
  std::vector<double> v(runtime.begin(), runtime.end());
  for (double x : st.as_vector()) v.push_back(x);
  return v;
}

NormalizationBounds update_or_freeze_bounds(NormalizationBounds b,
                                            std::span<const std::vector<double>> batch,
                                            int generation) {
  if (b.frozen || batch.empty()) return b;
  const bool expand = generation <= 1 || !b.initialized();
  if (expand) {
    for (const auto& v : batch) {
      if (!b.initialized()) {
        b.min = v;
        b.max = v;
        continue;
      }
      if (v.size() != b.min.size()) throw ContractError("behavior vector length mismatch");
      for (std::size_t d = 0; d < v.size(); ++d) {
        b.min[d] = std::min(b.min[d], v[d]);
        b.max[d] = std::max(b.max[d], v[d]);
      }
    }
  }
  if (generation >= 1) b.frozen = true;
  return b;
}

std::vector<double> normalize(std::span<const double> raw, const NormalizationBounds& b) {
  if (!b.initialized()) throw ContractError("normalize: bounds not initialized");
  if (raw.size() != b.min.size()) throw ContractError("normalize: length mismatch");
  std::vector<double> out(raw.size());
  for (std::size_t d = 0; d < raw.size(); ++d) {
    const double span = b.max[d] - b.min[d];
    out[d] = span > 0 ? std::clamp((raw[d] - b.min[d]) / span, 0.0, 1.0) : 0.5;
  }
  return out;
}

}  // namespace evoheur::behavior
