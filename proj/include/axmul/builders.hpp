#pragma once

#include <deque>
#include <map>

#include <axmul/plan.hpp>

namespace axmul {

namespace detail {

/// Incremental plan construction with dot bookkeeping. Mirrors the id
/// assignment of resolve_plan so built plans serialize stably.
class PlanBuilder {
 public:
  explicit PlanBuilder(int width, int truncated = 0) {
    plan_.width = width;
    plan_.truncated_columns = truncated;
    for (const auto& d : generate_partial_products(width).dots) pool_[d.column].push_back(d.id);
  }

  struct Placed {
    DotId sum, carry;
    std::vector<DotId> couts;
    DotId cout() const {
      if (couts.empty()) throw std::logic_error("placement has no carry-out");
      return couts[0];
    }
  };

  void begin_stage() {
    flush_pending();
    plan_.stages.emplace_back();
    counters_.clear();
  }

  int available(int col) const {
    auto it = pool_.find(col);
    return it == pool_.end() ? 0 : static_cast<int>(it->second.size());
  }

  std::vector<DotId> take(int col, int count) {
    auto& q = pool_[col];
    if (static_cast<int>(q.size()) < count)
      throw std::logic_error("take: column " + std::to_string(col) + " has " +
                             std::to_string(q.size()) + " dots, need " + std::to_string(count));
    std::vector<DotId> out(q.begin(), q.begin() + count);
    q.erase(q.begin(), q.begin() + count);
    return out;
  }

  DotId take1(int col) { return take(col, 1)[0]; }

  /// Returns taken dots to the front of a column's pool, preserving order.
  void put_back(int col, const std::vector<DotId>& ids) {
    auto& q = pool_[col];
    q.insert(q.begin(), ids.begin(), ids.end());
  }

  /// Pads `ids` with constant-zero fillers up to `arity`.
  static std::vector<DotId> pad(std::vector<DotId> ids, int arity) {
    while (static_cast<int>(ids.size()) < arity) ids.push_back(kZeroDot);
    return ids;
  }

  Placed place(CompressorKind kind, int anchor, std::vector<DotId> b, std::vector<DotId> a,
               std::optional<DotId> cin = std::nullopt) {
    if (plan_.stages.empty()) throw std::logic_error("place before begin_stage");
    const CompressorSpec& cs = spec_of(kind);
    Placement p;
    p.kind = kind;
    p.anchor_column = anchor;
    p.b_dots = pad(std::move(b), cs.m_high);
    p.a_dots = pad(std::move(a), cs.m_low);
    p.cin = std::move(cin);
    p.precise = cs.is_exact;
    // ids wired in directly (carry-out links) are consumed here, not via take
    for (const DotId& id : p.b_dots) consume(id);
    for (const DotId& id : p.a_dots) consume(id);
    if (p.cin) consume(*p.cin);
    plan_.stages.back().push_back(std::move(p));

    const int stage = static_cast<int>(plan_.stages.size());
    Placed out;
    out.sum = make_dot_id(stage, anchor, counters_[anchor]++);
    out.carry = make_dot_id(stage, anchor + 1, counters_[anchor + 1]++);
    pending_.push_back(out.sum);
    pending_.push_back(out.carry);
    for (int k = 0; k < cs.cout_count; ++k) {
      DotId c = make_dot_id(stage, anchor + cs.cout_rel_col, counters_[anchor + cs.cout_rel_col]++);
      out.couts.push_back(c);
      pending_.push_back(c);
    }
    return out;
  }

  /// Removes an id from the pending and pooled sets wherever it sits.
  void consume(const DotId& id) {
    if (id == kZeroDot) return;
    pending_.erase(std::remove(pending_.begin(), pending_.end(), id), pending_.end());
    int s, c, r;
    if (detail::parse_dot_id(id, s, c, r)) {
      auto it = pool_.find(c);
      if (it != pool_.end()) {
        auto& q = it->second;
        q.erase(std::remove(q.begin(), q.end(), id), q.end());
      }
    }
  }

  void set_final_adder(int lo, int hi) { plan_.final_adder = {lo, hi}; }

  ReductionPlan finish() {
    flush_pending();
    return plan_;
  }

 private:
  void flush_pending() {
    for (DotId& id : pending_) {
      int s, c, r;
      detail::parse_dot_id(id, s, c, r);
      pool_[c].push_back(id);
    }
    pending_.clear();
  }

  ReductionPlan plan_;
  std::map<int, std::deque<DotId>> pool_;
  std::vector<DotId> pending_;
  std::map<int, int> counters_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Dadda baseline
// ---------------------------------------------------------------------------

/// Classic Dadda reduction: stage height targets 6, 4, 3, 2 (for n = 8) using
/// half and full adders, then a ripple-carry adder over the remaining rows.
inline ReductionPlan build_dadda(int n) {
  detail::PlanBuilder b(n);
  std::vector<int> targets;
  for (int d = 2; d < n; d = d * 3 / 2) targets.insert(targets.begin(), d);

  for (int d : targets) {
    b.begin_stage();
    std::map<int, int> placed;  // carries generated into col+1 this stage
    for (int c = 0; c < 2 * n - 1; ++c) {
      int total = b.available(c) + placed[c];
      while (total > d) {
        if (total == d + 1) {
          auto dots = b.take(c, 2);
          b.place(CompressorKind::HALF_ADDER, c, {}, dots);
          total -= 1;
        } else {
          auto dots = b.take(c, 3);
          b.place(CompressorKind::FULL_ADDER, c, {}, {dots[0], dots[1]}, dots[2]);
          total -= 2;
        }
        placed[c + 1]++;
      }
    }
  }

  ReductionPlan plan = b.finish();
  // final adder from the first two-dot column upward
  ResolvedPlan rp = resolve_plan(plan);
  int lo = 2 * n - 1;
  for (auto& [col, dots] : rp.leftovers)
    if (dots.size() >= 2) {
      lo = std::min(lo, col);
    }
  plan.final_adder = {lo, 2 * n - 1};
  return plan;
}

// ---------------------------------------------------------------------------
// Proposed two-stage designs
// ---------------------------------------------------------------------------

namespace detail {

struct LowZone {
  DotId cout5a, cout5b;  // carries-out of the anchor-5 pair, landing at column 7
};

// Stage-1 tiling of columns 1..6 shared by every odd-anchored design:
// a 3,2:2 at anchor 1, a 3,2:2 + 2,2:2 pair at anchor 3 and two chained
// 3,3:2 at anchor 5 (one partial product of column 6 passes through).
inline LowZone tile_low_zone_odd(PlanBuilder& b) {
  auto a1 = b.place(CompressorKind::C_3_2_2_NOCIN, 1, b.take(2, 3), b.take(1, 2));
  auto a3x = b.place(CompressorKind::C_3_2_2_NOCIN, 3, b.take(4, 3), b.take(3, 2));
  auto a3y = b.place(CompressorKind::C_2_2_2, 3, b.take(4, 2), b.take(3, 2), a1.cout());
  auto a5x = b.place(CompressorKind::C_3_3_2, 5, b.take(6, 3), b.take(5, 3), a3x.cout());
  auto a5y = b.place(CompressorKind::C_3_3_2, 5, b.take(6, 3), b.take(5, 3), a3y.cout());
  return {a5x.cout(), a5y.cout()};
}

struct EvenZone {
  DotId cout4a, cout4b;  // anchor-4 carries-out, landing at column 6
};

// Even-anchored variant covering columns 0..5 (column 0 and the two dots of
// column 1 pass straight through to stage 2).
inline EvenZone tile_low_zone_even(PlanBuilder& b) {
  auto a2 = b.place(CompressorKind::C_3_3_2_NOCIN, 2, b.take(3, 3), b.take(2, 3));
  auto a4x = b.place(CompressorKind::C_3_3_2, 4, b.take(5, 3), b.take(4, 3), a2.cout());
  auto a4y = b.place(CompressorKind::C_3_2_2_NOCIN, 4, b.take(5, 3), b.take(4, 2));
  return {a4x.cout(), a4y.cout()};
}

// The precise chain for p >= 3: exact 4:2 compressors from `lo_col` up to
// column 11, a three-input 4:2 at column 12 and a full adder at column 13,
// carry-linked so nothing precise spills into stage 2 sideways.
inline void place_chain(PlanBuilder& b, int lo_col, std::optional<DotId> seed_cin) {
  std::optional<DotId> cin = std::move(seed_cin);
  for (int c = lo_col; c <= 11; ++c) {
    auto p = b.place(CompressorKind::EXACT_4_2, c, {}, b.take(c, 4), cin);
    cin = p.cout();
  }
  auto p12 = b.place(CompressorKind::EXACT_4_2, 12, {}, b.take(12, 3), cin);
  b.place(CompressorKind::FULL_ADDER, 13, {}, b.take(13, 2), p12.cout());
}

// Picks the smallest carry-in-capable derivative covering the residual dots
// of one column pair.
inline CompressorKind smallest_fitting_kind(int b_count, int a_count) {
  if (b_count > 3 || a_count > 3) throw std::logic_error("residual column too tall");
  if (b_count == 3) return CompressorKind::C_3_3_2;
  if (b_count == 2) return a_count == 3 ? CompressorKind::C_2_3_2 : CompressorKind::C_2_2_2;
  return a_count == 3 ? CompressorKind::C_1_3_2 : CompressorKind::C_1_2_2;
}

// Stage-2 compressor ladder for odd-anchored designs over anchors 3..top,
// kinds chosen per residual heights and carry-linked left to right; returns
// the carry-out entering column top+2.
inline DotId stage2_ladder_odd(PlanBuilder& b, int top) {
  std::optional<DotId> carry;
  for (int anchor = 3; anchor <= top; anchor += 2) {
    int na = b.available(anchor), nb = b.available(anchor + 1);
    auto q = b.place(smallest_fitting_kind(nb, na), anchor, b.take(anchor + 1, nb),
                     b.take(anchor, na), carry);
    carry = q.cout();
  }
  return *carry;
}

}  // namespace detail

/// The all-inexact two-stage multiplier: only the multicolumn compressor and
/// its derivatives, no precise components, and a constant-0 top output bit.
inline ReductionPlan build_initial_design() {
  using K = CompressorKind;
  detail::PlanBuilder b(8);

  b.begin_stage();
  auto low = detail::tile_low_zone_odd(b);
  auto a7x = b.place(K::C_3_3_2, 7, b.take(8, 3), b.take(7, 3), low.cout5a);
  auto a7y = b.place(K::C_3_3_2, 7, b.take(8, 3), b.take(7, 3), low.cout5b);
  b.place(K::C_1_2_2, 7, b.take(8, 1), b.take(7, 2));
  auto a9x = b.place(K::C_3_3_2, 9, b.take(10, 3), b.take(9, 3), a7x.cout());
  auto a9y = b.place(K::C_2_3_2, 9, b.take(10, 2), b.take(9, 3), a7y.cout());
  auto a11x = b.place(K::C_2_3_2, 11, b.take(12, 2), b.take(11, 3), a9x.cout());
  b.place(K::C_1_2_2, 11, b.take(12, 1), b.take(11, 1), a9y.cout());
  b.place(K::C_1_2_2, 13, b.take(14, 1), b.take(13, 2), a11x.cout());

  b.begin_stage();
  DotId carry = detail::stage2_ladder_odd(b, 9);
  auto q11 = b.place(K::C_2_2_2, 11, b.take(12, 2), b.take(11, 2), carry);
  b.place(K::C_1_2_2, 13, b.take(14, 1), b.take(13, 1), q11.cout());

  ReductionPlan plan = b.finish();
  plan.final_adder = {0, -1};
  return plan;
}

/// Two-stage multipliers with a chain of p precise components over the most
/// significant populated columns of stage 1: a half adder at column 13 for
/// p = 1, a full adder + half adder at 12/13 for p = 2, and a 4:2 chain
/// ending in a three-input 4:2 at 12 plus a full adder at 13 for p >= 3.
inline ReductionPlan build_precise_chain_design(int p) {
  using K = CompressorKind;
  if (p < 1 || p > 7)
    throw std::invalid_argument(
        "precise chain length must be in [1,7]; longer chains violate the "
        "three-dots-at-stage-2 policy");
  detail::PlanBuilder b(8);

  if (p == 2 || p == 6) {
    // Even-anchored tilings; the chain's lowest column is even.
    b.begin_stage();
    auto low = detail::tile_low_zone_even(b);
    auto a6x = b.place(K::C_3_3_2, 6, b.take(7, 3), b.take(6, 3), low.cout4a);
    auto a6y = b.place(K::C_3_3_2, 6, b.take(7, 3), b.take(6, 3), low.cout4b);
    if (p == 2) {
      auto a6z = b.place(K::C_2_2_2, 6, b.take(7, 2), b.take(6, 1));
      auto a8x = b.place(K::C_3_3_2, 8, b.take(9, 3), b.take(8, 3), a6x.cout());
      auto a8y = b.place(K::C_2_2_2, 8, b.take(9, 2), b.take(8, 2), a6y.cout());
      b.place(K::C_1_2_2, 8, b.take(9, 1), b.take(8, 2), a6z.cout());
      auto a10x = b.place(K::C_3_3_2, 10, b.take(11, 3), b.take(10, 3), a8x.cout());
      b.place(K::C_1_2_2, 10, b.take(11, 1), b.take(10, 2), a8y.cout());
      b.place(K::FULL_ADDER, 12, {}, b.take(12, 2), b.take1(12));
      b.place(K::HALF_ADDER, 13, {}, b.take(13, 2));
      (void)a10x;  // its carry-out passes to stage 2 beside the full adder's sum
    } else {
      // A 3,2:2 bridges columns 7/8 into the chain zone; its carry-out joins
      // the 1,3:2 at anchor 9, which also absorbs the fifth column-10
      // product. One anchor-6 carry-out passes through to stage 2.
      auto a7 = b.place(K::C_3_2_2_NOCIN, 7, b.take(8, 3), b.take(7, 2));
      b.place(K::C_1_3_2, 9, b.take(10, 1), b.take(9, 2), a7.cout());
      detail::place_chain(b, 8, a6x.cout());
    }

    b.begin_stage();
    auto q0 = b.place(K::C_2_2_2, 0, b.take(1, 2), b.take(0, 1));
    auto q2 = b.place(K::C_2_2_2, 2, b.take(3, 2), b.take(2, 1), q0.cout());
    auto q4 = b.place(K::C_2_2_2, 4, b.take(5, 2), b.take(4, 2), q2.cout());
    auto q6 = b.place(K::C_3_3_2, 6, b.take(7, 3), b.take(6, 3), q4.cout());
    auto q8 = b.place(K::C_3_3_2, 8, b.take(9, 3), b.take(8, 3), q6.cout());
    if (p == 2) {
      b.place(K::C_2_2_2, 10, b.take(11, 2), b.take(10, 2), q8.cout());
      b.set_final_adder(12, 15);
    } else {
      auto q10 = b.place(K::C_2_3_2, 10, b.take(11, 2), b.take(10, 3), q8.cout());
      b.place(K::C_2_2_2, 12, b.take(13, 2), b.take(12, 2), q10.cout());
      b.set_final_adder(14, 15);
    }
    return b.finish();
  }

  // Odd-anchored tilings (p = 1, 3, 4, 5, 7).
  b.begin_stage();
  auto low = detail::tile_low_zone_odd(b);

  if (p == 7) {
    auto c7 = b.place(K::EXACT_4_2, 7, {}, b.take(7, 4), low.cout5a);
    auto a7 = b.place(K::C_3_3_2, 7, b.take(8, 3), b.take(7, 3), low.cout5b);
    detail::place_chain(b, 8, c7.cout());
    b.place(K::C_1_3_2, 9, b.take(10, 1), b.take(9, 2), a7.cout());
  } else {
    auto a7x = b.place(K::C_3_3_2, 7, b.take(8, 3), b.take(7, 3), low.cout5a);
    auto a7y = b.place(K::C_3_3_2, 7, b.take(8, 3), b.take(7, 3), low.cout5b);
    b.place(K::C_1_2_2, 7, b.take(8, 1), b.take(7, 2));
    switch (p) {
      case 1: {
        auto a9x = b.place(K::C_3_3_2, 9, b.take(10, 3), b.take(9, 3), a7x.cout());
        auto a9y = b.place(K::C_2_3_2, 9, b.take(10, 2), b.take(9, 3), a7y.cout());
        auto a11x = b.place(K::C_2_2_2, 11, b.take(12, 2), b.take(11, 2), a9x.cout());
        b.place(K::C_1_2_2, 11, b.take(12, 1), b.take(11, 2), a9y.cout());
        b.place(K::HALF_ADDER, 13, {}, b.take(13, 2));
        (void)a11x;  // its carry-out joins the half adder's sum at stage 2
        break;
      }
      case 3: {
        auto a9x = b.place(K::C_3_3_2, 9, b.take(10, 3), b.take(9, 3), a7x.cout());
        auto a9y = b.place(K::C_2_3_2, 9, b.take(10, 2), b.take(9, 3), a7y.cout());
        (void)a9y;  // second carry-out passes to stage 2 beside the 4:2 sum
        detail::place_chain(b, 11, a9x.cout());
        break;
      }
      case 4: {
        b.place(K::C_1_3_2, 9, b.take(10, 1), b.take(9, 3), a7x.cout());
        b.place(K::C_1_3_2, 9, {}, b.take(9, 3), a7y.cout());
        detail::place_chain(b, 10, std::nullopt);
        break;
      }
      case 5: {
        b.place(K::C_1_3_2, 9, b.take(10, 1), b.take(9, 2), a7y.cout());
        detail::place_chain(b, 9, a7x.cout());
        break;
      }
      default: break;
    }
  }

  b.begin_stage();
  if (p <= 3) {
    DotId carry = detail::stage2_ladder_odd(b, p == 1 ? 9 : 7);
    if (p != 1) {
      auto q9 = b.place(K::C_2_2_2, 9, b.take(10, 2), b.take(9, 2), carry);
      carry = q9.cout();
    }
    b.set_final_adder(11, 15);
  } else {
    DotId carry = detail::stage2_ladder_odd(b, 9);
    if (p >= 5) {
      auto q11 = b.place(K::C_2_2_2, 11, b.take(12, 2), b.take(11, 2), carry);
      carry = q11.cout();
      b.set_final_adder(13, 15);
    } else {
      b.set_final_adder(11, 15);
    }
  }
  return b.finish();
}

/// Removes the partial products of the t least significant columns from a
/// plan. Dots in the truncated region become constants, placements whose
/// inputs are all constant disappear, and the corresponding output bits are
/// hard zeros.
inline ReductionPlan build_truncated_design(const ReductionPlan& base, int t) {
  if (t < 0 || t > 7) throw std::invalid_argument("truncated column count must be in [0,7]");
  ReductionPlan out;
  out.width = base.width;
  out.truncated_columns = t;
  out.final_adder = base.final_adder;

  // Ids of dots known to be constant zero under truncation.
  std::set<DotId> zeroed;
  for (const auto& d : generate_partial_products(base.width).dots)
    if (d.column < t) zeroed.insert(d.id);

  // Walk the stages in listing order, translating input references and
  // dropping dead placements. Output-dot ids are positional, so the base
  // plan's numbering and the rebuilt plan's numbering advance in lockstep.
  std::map<DotId, DotId> remap;  // old output id -> new output id
  for (int s = 0; s < static_cast<int>(base.stages.size()); ++s) {
    std::map<int, int> base_ctr, new_ctr;
    out.stages.emplace_back();
    for (const Placement& p : base.stages[s]) {
      const CompressorSpec& cs = spec_of(p.kind);
      std::vector<int> cols = {p.anchor_column, p.anchor_column + 1};
      for (int k = 0; k < cs.cout_count; ++k) cols.push_back(p.anchor_column + cs.cout_rel_col);

      auto translate = [&](const DotId& id) -> DotId {
        if (id == kZeroDot || zeroed.count(id)) return kZeroDot;
        auto it = remap.find(id);
        return it == remap.end() ? id : it->second;
      };
      Placement q = p;
      for (DotId& id : q.b_dots) id = translate(id);
      for (DotId& id : q.a_dots) id = translate(id);
      if (q.cin) {
        DotId c = translate(*q.cin);
        if (c == kZeroDot)
          q.cin.reset();
        else
          q.cin = c;
      }
      bool all_zero = !q.cin.has_value();
      for (const DotId& id : q.b_dots) all_zero = all_zero && id == kZeroDot;
      for (const DotId& id : q.a_dots) all_zero = all_zero && id == kZeroDot;

      for (int col : cols) {
        DotId old_id = make_dot_id(s + 1, col, base_ctr[col]++);
        if (all_zero) {
          zeroed.insert(old_id);
        } else {
          DotId new_id = make_dot_id(s + 1, col, new_ctr[col]++);
          if (new_id != old_id) remap[old_id] = new_id;
        }
      }
      if (!all_zero) out.stages.back().push_back(std::move(q));
    }
  }
  return out;
}

/// Design #1: the precise-chain multiplier with four exact components.
inline ReductionPlan build_design1() { return build_precise_chain_design(4); }

/// Design #2: Design #1 with its six least significant columns truncated.
inline ReductionPlan build_design2() { return build_truncated_design(build_design1(), 6); }

}  // namespace axmul
