#pragma once

#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include <axmul/compressor.hpp>

namespace axmul {

// A dot is one bit of one weight column in the reduction diagram. Real dots
// carry ids of the form "s{stage}c{column}r{row}"; the reserved id "zero"
// names a constant-0 filler usable in any input slot.
using DotId = std::string;
inline const DotId kZeroDot = "zero";

inline DotId make_dot_id(int stage, int column, int row) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "s%dc%dr%d", stage, column, row);
  return buf;
}

/// One compressor instance: `kind` anchored at a column, consuming b-dots
/// from anchor+1, a-dots from the anchor column, and an optional carry-in
/// dot (absent means constant 0).
struct Placement {
  CompressorKind kind{};
  int anchor_column = 0;
  std::vector<DotId> b_dots;
  std::vector<DotId> a_dots;
  std::optional<DotId> cin;
  bool precise = false;

  friend bool operator==(const Placement&, const Placement&) = default;
};

/// Ripple-carry span over the dots left after the last stage. lo_col > hi_col
/// encodes "no final adder".
struct FinalAdder {
  int lo_col = 0;
  int hi_col = -1;

  bool empty() const { return lo_col > hi_col; }
  friend bool operator==(const FinalAdder&, const FinalAdder&) = default;
};

struct ReductionPlan {
  int width = 8;
  int truncated_columns = 0;
  std::vector<std::vector<Placement>> stages;
  FinalAdder final_adder;

  friend bool operator==(const ReductionPlan&, const ReductionPlan&) = default;
};

/// Heights of the partial-product columns of an n-by-n multiplier.
inline std::vector<int> column_heights(int n) {
  if (n < 2 || n > 8) throw std::invalid_argument("multiplier width out of range [2,8]");
  std::vector<int> h(2 * n - 1);
  for (int c = 0; c < 2 * n - 1; ++c) h[c] = std::min(c, 2 * n - 2 - c) + 1;
  return h;
}

struct PartialProductDot {
  DotId id;
  int column = 0;
  int i = 0, j = 0;  // A_i * B_j
};

struct PartialProducts {
  std::vector<int> heights;
  std::vector<PartialProductDot> dots;
};

inline PartialProducts generate_partial_products(int n) {
  PartialProducts pp;
  pp.heights = column_heights(n);
  for (int c = 0; c < 2 * n - 1; ++c) {
    int i_lo = std::max(0, c - (n - 1));
    for (int r = 0; r < pp.heights[c]; ++r) {
      int i = i_lo + r;
      pp.dots.push_back({make_dot_id(0, c, r), c, i, c - i});
    }
  }
  return pp;
}

// ---------------------------------------------------------------------------
// Plan resolution: derives the dot table, checks structure, orders placements
// ---------------------------------------------------------------------------

struct DotMeta {
  enum class Src { PartialProduct, Sum, Carry, Cout, Zero };
  Src src = Src::Zero;
  int stage = 0;
  int column = 0;
  int row = 0;
  int pp_i = -1, pp_j = -1;           // for partial products
  int producer_stage = -1;            // for placement outputs
  int producer_index = -1;
  int cout_index = 0;

  bool is_constant_zero() const {
    return src == Src::Zero || (src == Src::PartialProduct && pp_i < 0);
  }
};

struct Violation {
  std::string code;
  std::string message;
};

struct ResolvedPlan {
  std::vector<DotId> creation_order;
  std::map<DotId, DotMeta> dots;
  // per stage, placement indices in intra-stage dependency order
  std::vector<std::vector<int>> topo;
  // per column: dots never consumed by any placement, in creation order
  std::map<int, std::vector<DotId>> leftovers;
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

namespace detail {

inline bool parse_dot_id(const DotId& id, int& stage, int& col, int& row) {
  int n = -1;
  if (std::sscanf(id.c_str(), "s%dc%dr%d%n", &stage, &col, &row, &n) != 3) return false;
  return n == static_cast<int>(id.size());
}

}  // namespace detail

inline ResolvedPlan resolve_plan(const ReductionPlan& plan) {
  ResolvedPlan rp;
  auto fail = [&](std::string code, std::string msg) {
    rp.violations.push_back({std::move(code), std::move(msg)});
  };

  if (plan.width < 2 || plan.width > 8) fail("width", "width out of range [2,8]");
  const int n = std::clamp(plan.width, 2, 8);
  const int ncols = 2 * n;
  if (plan.truncated_columns < 0 || plan.truncated_columns >= ncols)
    fail("truncation", "truncated_columns out of range");

  // Stage-0 dots: the partial-product matrix. Truncated columns still emit
  // dots, but as constants, so downstream bookkeeping stays uniform.
  auto heights = column_heights(n);
  for (int c = 0; c < 2 * n - 1; ++c) {
    int i_lo = std::max(0, c - (n - 1));
    for (int r = 0; r < heights[c]; ++r) {
      DotMeta m;
      m.stage = 0;
      m.column = c;
      m.row = r;
      if (c >= plan.truncated_columns) {
        m.src = DotMeta::Src::PartialProduct;
        m.pp_i = i_lo + r;
        m.pp_j = c - m.pp_i;
      } else {
        m.src = DotMeta::Src::Zero;
      }
      DotId id = make_dot_id(0, c, r);
      rp.creation_order.push_back(id);
      rp.dots.emplace(std::move(id), m);
    }
  }

  // Output dots of every placement, ids assigned per (stage, column) counters
  // in listing order so serialization round-trips.
  for (int s = 0; s < static_cast<int>(plan.stages.size()); ++s) {
    std::map<int, int> ctr;
    for (int pi = 0; pi < static_cast<int>(plan.stages[s].size()); ++pi) {
      const Placement& p = plan.stages[s][pi];
      const CompressorSpec& cs = spec_of(p.kind);
      auto emit = [&](DotMeta::Src src, int col, int cout_index) {
        if (col >= ncols) {
          fail("column-range", "placement at anchor " + std::to_string(p.anchor_column) +
                                   " emits a dot beyond column " + std::to_string(ncols - 1));
          return;
        }
        DotMeta m;
        m.src = src;
        m.stage = s + 1;
        m.column = col;
        m.row = ctr[col]++;
        m.producer_stage = s;
        m.producer_index = pi;
        m.cout_index = cout_index;
        DotId id = make_dot_id(s + 1, col, m.row);
        rp.creation_order.push_back(id);
        rp.dots.emplace(std::move(id), m);
      };
      emit(DotMeta::Src::Sum, p.anchor_column, 0);
      emit(DotMeta::Src::Carry, p.anchor_column + 1, 0);
      for (int k = 0; k < cs.cout_count; ++k)
        emit(DotMeta::Src::Cout, p.anchor_column + cs.cout_rel_col, k);
    }
  }

  // Walk all input slots: existence, arity, column fit, single consumption,
  // stage ordering. Same-stage consumption is allowed only for carries-out
  // (the horizontal chains); everything else must come from earlier stages.
  std::map<DotId, std::pair<int, int>> consumer;
  // intra-stage dependency edges for the topological order
  std::vector<std::map<int, std::set<int>>> deps(plan.stages.size());

  for (int s = 0; s < static_cast<int>(plan.stages.size()); ++s) {
    for (int pi = 0; pi < static_cast<int>(plan.stages[s].size()); ++pi) {
      const Placement& p = plan.stages[s][pi];
      const CompressorSpec& cs = spec_of(p.kind);
      std::string where = "stage " + std::to_string(s + 1) + " placement " + std::to_string(pi) +
                          " (" + std::string(cs.name) + "@" + std::to_string(p.anchor_column) + ")";
      if (static_cast<int>(p.b_dots.size()) != cs.m_high ||
          static_cast<int>(p.a_dots.size()) != cs.m_low ||
          (p.cin.has_value() && cs.cin_count == 0))
        fail("arity", where + ": input arity does not match the kind");
      if (p.precise != cs.is_exact)
        fail("precise-flag", where + ": precise flag disagrees with the kind");
      if (p.anchor_column < 0 || p.anchor_column >= ncols) {
        fail("column-range", where + ": anchor out of range");
        continue;
      }

      auto use = [&](const DotId& id, int want_col, const char* slot) {
        if (id == kZeroDot) return;
        auto it = rp.dots.find(id);
        if (it == rp.dots.end()) {
          int ds, dc, dr;
          fail(detail::parse_dot_id(id, ds, dc, dr) ? "unknown-dot" : "bad-dot-id",
               where + ": " + slot + " references '" + id + "'");
          return;
        }
        const DotMeta& m = it->second;
        if (m.column != want_col)
          fail("column-mismatch", where + ": " + slot + " '" + id + "' is at column " +
                                      std::to_string(m.column) + ", expected " +
                                      std::to_string(want_col));
        if (m.stage > s + 1) {
          fail("stage-order", where + ": " + slot + " '" + id + "' is produced later");
        } else if (m.stage == s + 1) {
          // produced by this same stage: legal only for a carry-out link
          if (m.src != DotMeta::Src::Cout)
            fail("stage-order", where + ": " + slot + " '" + id + "' consumes a same-stage " +
                                    "non-cout dot");
          else if (m.producer_index >= 0)
            deps[s][pi].insert(m.producer_index);
        }
        if (!m.is_constant_zero()) {
          auto [cit, fresh] = consumer.emplace(id, std::make_pair(s, pi));
          if (!fresh) fail("double-consume", where + ": dot '" + id + "' already consumed");
        }
      };
      for (const DotId& id : p.b_dots) use(id, p.anchor_column + 1, "b");
      for (const DotId& id : p.a_dots) use(id, p.anchor_column, "a");
      if (p.cin) use(*p.cin, p.anchor_column, "cin");
    }
  }

  // Intra-stage topological order (Kahn); a leftover cycle is a violation.
  for (int s = 0; s < static_cast<int>(plan.stages.size()); ++s) {
    const int cnt = static_cast<int>(plan.stages[s].size());
    std::vector<int> indeg(cnt, 0);
    std::vector<std::vector<int>> out(cnt);
    for (auto& [pi, ds] : deps[s])
      for (int q : ds) {
        out[q].push_back(pi);
        indeg[pi]++;
      }
    std::vector<int> order;
    std::vector<int> queue;
    for (int i = 0; i < cnt; ++i)
      if (indeg[i] == 0) queue.push_back(i);
    while (!queue.empty()) {
      int v = queue.front();
      queue.erase(queue.begin());
      order.push_back(v);
      for (int w : out[v])
        if (--indeg[w] == 0) queue.push_back(w);
    }
    if (static_cast<int>(order.size()) != cnt)
      fail("cycle", "stage " + std::to_string(s + 1) + ": carry chain forms a cycle");
    rp.topo.push_back(std::move(order));
  }

  // Leftovers: non-constant dots never consumed anywhere.
  for (const DotId& id : rp.creation_order) {
    const DotMeta& m = rp.dots.at(id);
    if (m.is_constant_zero()) continue;
    if (!consumer.count(id)) rp.leftovers[m.column].push_back(id);
  }
  return rp;
}

/// Checks a plan against its structural contract. Empty result means the plan
/// is well-formed: conserved dots, matched arities, acyclic carry chains, a
/// feasible final-adder span, one output bit per column, and, for two-stage
/// plans, at most three dots entering stage 2 in any column.
inline std::vector<Violation> validate_plan(const ReductionPlan& plan) {
  ResolvedPlan rp = resolve_plan(plan);
  auto fail = [&](std::string code, std::string msg) {
    rp.violations.push_back({std::move(code), std::move(msg)});
  };
  const int n = std::clamp(plan.width, 2, 8);
  const int ncols = 2 * n;

  if (plan.final_adder.empty() == false) {
    if (plan.final_adder.lo_col < 0 || plan.final_adder.hi_col >= ncols)
      fail("final-adder", "final adder span out of range");
  }

  // Two-stage plans carry the proposed-design policy.
  if (plan.stages.size() == 2) {
    std::map<int, int> entering;
    for (const DotId& id : rp.creation_order) {
      const DotMeta& m = rp.dots.at(id);
      if (m.is_constant_zero() || m.stage > 1) continue;
      bool consumed_by_stage1 = false;
      for (const Placement& p : plan.stages[0]) {
        auto in = [&](const std::vector<DotId>& v) {
          return std::find(v.begin(), v.end(), id) != v.end();
        };
        if (in(p.b_dots) || in(p.a_dots) || (p.cin && *p.cin == id)) {
          consumed_by_stage1 = true;
          break;
        }
      }
      if (!consumed_by_stage1) entering[m.column]++;
    }
    for (auto& [col, cnt] : entering)
      if (cnt > 3)
        fail("stage2-policy", "column " + std::to_string(col) + " receives " +
                                  std::to_string(cnt) + " dots at stage 2");
  }

  // Final residue: the ripple-carry span takes up to three dots in its first
  // column and two elsewhere; every other column must resolve to one bit.
  for (int c = 0; c < ncols; ++c) {
    auto it = rp.leftovers.find(c);
    int cnt = it == rp.leftovers.end() ? 0 : static_cast<int>(it->second.size());
    const FinalAdder& fa = plan.final_adder;
    if (!fa.empty() && c >= fa.lo_col && c <= fa.hi_col) {
      int cap = c == fa.lo_col ? 3 : 2;
      if (cnt > cap)
        fail("final-adder", "column " + std::to_string(c) + " holds " + std::to_string(cnt) +
                                " dots, final adder capacity is " + std::to_string(cap));
    } else if (cnt > 1) {
      fail("output", "column " + std::to_string(c) + " resolves to " + std::to_string(cnt) +
                         " bits outside the final adder");
    }
  }
  return rp.violations;
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

inline nlohmann::json plan_to_json(const ReductionPlan& plan) {
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& stage : plan.stages) {
    nlohmann::json placements = nlohmann::json::array();
    for (const Placement& p : stage) {
      placements.push_back({{"kind", kind_name(p.kind)},
                            {"anchor_column", p.anchor_column},
                            {"b_dots", p.b_dots},
                            {"a_dots", p.a_dots},
                            {"cin", p.cin ? nlohmann::json(*p.cin) : nlohmann::json(nullptr)},
                            {"precise", p.precise}});
    }
    stages.push_back({{"placements", placements}});
  }
  return {{"width", plan.width},
          {"truncated_columns", plan.truncated_columns},
          {"stages", stages},
          {"final_adder",
           {{"lo_col", plan.final_adder.lo_col}, {"hi_col", plan.final_adder.hi_col}}}};
}

inline std::string serialize_plan(const ReductionPlan& plan) { return plan_to_json(plan).dump(2); }

struct PlanSchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline ReductionPlan plan_from_json(const nlohmann::json& j) {
  auto need = [](const nlohmann::json& o, const char* key) -> const nlohmann::json& {
    if (!o.is_object() || !o.contains(key))
      throw PlanSchemaError(std::string("missing field '") + key + "'");
    return o.at(key);
  };
  ReductionPlan plan;
  try {
    plan.width = need(j, "width").get<int>();
    plan.truncated_columns = need(j, "truncated_columns").get<int>();
    const auto& stages = need(j, "stages");
    if (!stages.is_array()) throw PlanSchemaError("'stages' must be an array");
    for (const auto& js : stages) {
      std::vector<Placement> stage;
      const auto& pls = need(js, "placements");
      if (!pls.is_array()) throw PlanSchemaError("'placements' must be an array");
      for (const auto& jp : pls) {
        Placement p;
        std::string kind = need(jp, "kind").get<std::string>();
        try {
          p.kind = kind_from_name(kind);
        } catch (const std::invalid_argument&) {
          throw PlanSchemaError("unknown compressor kind '" + kind + "'");
        }
        p.anchor_column = need(jp, "anchor_column").get<int>();
        p.b_dots = need(jp, "b_dots").get<std::vector<DotId>>();
        p.a_dots = need(jp, "a_dots").get<std::vector<DotId>>();
        const auto& cin = need(jp, "cin");
        if (!cin.is_null()) p.cin = cin.get<DotId>();
        p.precise = need(jp, "precise").get<bool>();
        stage.push_back(std::move(p));
      }
      plan.stages.push_back(std::move(stage));
    }
    const auto& fa = need(j, "final_adder");
    plan.final_adder.lo_col = need(fa, "lo_col").get<int>();
    plan.final_adder.hi_col = need(fa, "hi_col").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw PlanSchemaError(std::string("schema violation: ") + e.what());
  }
  return plan;
}

/// Parses and validates; throws PlanSchemaError on malformed input and
/// std::runtime_error when the plan fails structural validation.
inline ReductionPlan deserialize_plan(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw PlanSchemaError("malformed JSON");
  ReductionPlan plan = plan_from_json(j);
  auto violations = validate_plan(plan);
  if (!violations.empty()) {
    std::string msg = "plan failed validation:";
    for (const auto& v : violations) msg += "\n  [" + v.code + "] " + v.message;
    throw std::runtime_error(msg);
  }
  return plan;
}

}  // namespace axmul
