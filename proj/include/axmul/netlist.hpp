#pragma once

#include <unordered_map>

#include <axmul/plan.hpp>

namespace axmul {

enum class GateOp : std::uint8_t { Const0, Const1, Input, And, Or, Xor, Not };

struct Gate {
  GateOp op = GateOp::Const0;
  std::uint32_t a = 0, b = 0;
};

/// Flattened boolean DAG of a multiplier. Gates are stored in topological
/// order; elaboration folds constants and shares structurally identical
/// gates, so truncated designs really lose hardware.
struct Netlist {
  std::vector<Gate> gates;
  std::vector<std::string> input_names;     // parallel to gates, inputs only
  std::vector<std::uint32_t> a_inputs, b_inputs;
  std::vector<std::uint32_t> outputs;       // F_0 .. F_{2n-1}
  int width = 8;

  int gate_count() const {
    int n = 0;
    for (const Gate& g : gates)
      if (g.op == GateOp::And || g.op == GateOp::Or || g.op == GateOp::Xor ||
          g.op == GateOp::Not)
        ++n;
    return n;
  }

  /// Word-parallel evaluation: bit i of each input word is lane i. Inputs
  /// are seeded first; all logic gates follow in topological order.
  void evaluate_lanes(const std::uint64_t* a_bits, const std::uint64_t* b_bits,
                      std::uint64_t* out, std::vector<std::uint64_t>& scratch) const {
    scratch.resize(gates.size());
    for (std::size_t k = 0; k < a_inputs.size(); ++k) scratch[a_inputs[k]] = a_bits[k];
    for (std::size_t k = 0; k < b_inputs.size(); ++k) scratch[b_inputs[k]] = b_bits[k];
    for (std::size_t i = 0; i < gates.size(); ++i) {
      const Gate& g = gates[i];
      switch (g.op) {
        case GateOp::Const0: scratch[i] = 0; break;
        case GateOp::Const1: scratch[i] = ~std::uint64_t{0}; break;
        case GateOp::Input: break;
        case GateOp::And: scratch[i] = scratch[g.a] & scratch[g.b]; break;
        case GateOp::Or: scratch[i] = scratch[g.a] | scratch[g.b]; break;
        case GateOp::Xor: scratch[i] = scratch[g.a] ^ scratch[g.b]; break;
        case GateOp::Not: scratch[i] = ~scratch[g.a]; break;
      }
    }
    for (std::size_t k = 0; k < outputs.size(); ++k) out[k] = scratch[outputs[k]];
  }

  std::uint32_t evaluate(std::uint32_t a, std::uint32_t b) const {
    std::vector<std::uint64_t> scratch;
    std::uint64_t abits[8] = {}, bbits[8] = {}, out[16] = {};
    for (int i = 0; i < width; ++i) {
      abits[i] = (a >> i) & 1 ? ~std::uint64_t{0} : 0;
      bbits[i] = (b >> i) & 1 ? ~std::uint64_t{0} : 0;
    }
    evaluate_lanes(abits, bbits, out, scratch);
    std::uint32_t f = 0;
    for (std::size_t k = 0; k < outputs.size(); ++k) f |= (out[k] & 1u) << k;
    return f;
  }

  std::string to_text() const {
    auto name = [&](std::uint32_t idx) -> std::string {
      const Gate& g = gates[idx];
      if (g.op == GateOp::Input) return input_names[idx];
      if (g.op == GateOp::Const0) return "ZERO";
      if (g.op == GateOp::Const1) return "ONE";
      return "n" + std::to_string(idx);
    };
    std::string text;
    for (std::size_t i = 0; i < gates.size(); ++i) {
      const Gate& g = gates[i];
      switch (g.op) {
        case GateOp::And: text += name(i) + " = AND(" + name(g.a) + "," + name(g.b) + ")\n"; break;
        case GateOp::Or: text += name(i) + " = OR(" + name(g.a) + "," + name(g.b) + ")\n"; break;
        case GateOp::Xor: text += name(i) + " = XOR(" + name(g.a) + "," + name(g.b) + ")\n"; break;
        case GateOp::Not: text += name(i) + " = NOT(" + name(g.a) + ")\n"; break;
        default: break;
      }
    }
    for (std::size_t k = 0; k < outputs.size(); ++k) {
      const Gate& g = gates[outputs[k]];
      std::string f = "F" + std::to_string(k);
      if (g.op == GateOp::Const0)
        text += f + " = ZERO()\n";
      else if (g.op == GateOp::Const1)
        text += f + " = ONE()\n";
      else
        text += f + " = BUF(" + name(outputs[k]) + ")\n";
    }
    return text;
  }
};

namespace detail {

/// Gate factory with constant folding and structural sharing.
class NetBuilder {
 public:
  NetBuilder() {
    zero_ = raw(GateOp::Const0);
    one_ = raw(GateOp::Const1);
  }

  std::uint32_t zero() const { return zero_; }
  std::uint32_t one() const { return one_; }

  std::uint32_t input(const std::string& name) {
    std::uint32_t g = raw(GateOp::Input);
    names_.resize(gates_.size());
    names_[g] = name;
    return g;
  }

  std::uint32_t mk_not(std::uint32_t x) {
    if (x == zero_) return one_;
    if (x == one_) return zero_;
    if (gates_[x].op == GateOp::Not) return gates_[x].a;
    return shared(GateOp::Not, x, x);
  }

  std::uint32_t mk_and(std::uint32_t x, std::uint32_t y) {
    if (x == zero_ || y == zero_) return zero_;
    if (x == one_) return y;
    if (y == one_) return x;
    if (x == y) return x;
    return shared(GateOp::And, std::min(x, y), std::max(x, y));
  }

  std::uint32_t mk_or(std::uint32_t x, std::uint32_t y) {
    if (x == one_ || y == one_) return one_;
    if (x == zero_) return y;
    if (y == zero_) return x;
    if (x == y) return x;
    return shared(GateOp::Or, std::min(x, y), std::max(x, y));
  }

  std::uint32_t mk_xor(std::uint32_t x, std::uint32_t y) {
    if (x == zero_) return y;
    if (y == zero_) return x;
    if (x == one_) return mk_not(y);
    if (y == one_) return mk_not(x);
    if (x == y) return zero_;
    return shared(GateOp::Xor, std::min(x, y), std::max(x, y));
  }

  // (sum, carry)
  std::pair<std::uint32_t, std::uint32_t> half_adder(std::uint32_t x, std::uint32_t y) {
    return {mk_xor(x, y), mk_and(x, y)};
  }

  std::pair<std::uint32_t, std::uint32_t> full_adder(std::uint32_t x, std::uint32_t y,
                                                     std::uint32_t z) {
    std::uint32_t t = mk_xor(x, y);
    return {mk_xor(t, z), mk_or(mk_and(x, y), mk_and(z, t))};
  }

  // (carry, sum) of up to three equally weighted signals
  std::pair<std::uint32_t, std::uint32_t> side(const std::vector<std::uint32_t>& xs) {
    switch (xs.size()) {
      case 0: return {zero_, zero_};
      case 1: return {zero_, xs[0]};
      case 2: {
        auto [s, c] = half_adder(xs[0], xs[1]);
        return {c, s};
      }
      case 3: {
        auto [s, c] = full_adder(xs[0], xs[1], xs[2]);
        return {c, s};
      }
      default: throw std::logic_error("side arity > 3");
    }
  }

  const std::vector<Gate>& gates() const { return gates_; }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::uint32_t raw(GateOp op, std::uint32_t a = 0, std::uint32_t b = 0) {
    gates_.push_back({op, a, b});
    names_.resize(gates_.size());
    return static_cast<std::uint32_t>(gates_.size() - 1);
  }

  std::uint32_t shared(GateOp op, std::uint32_t a, std::uint32_t b) {
    std::uint64_t key = (static_cast<std::uint64_t>(op) << 60) |
                        (static_cast<std::uint64_t>(a) << 30) | b;
    auto it = cse_.find(key);
    if (it != cse_.end()) return it->second;
    std::uint32_t g = raw(op, a, b);
    cse_.emplace(key, g);
    return g;
  }

  std::vector<Gate> gates_;
  std::vector<std::string> names_;
  std::unordered_map<std::uint64_t, std::uint32_t> cse_;
  std::uint32_t zero_ = 0, one_ = 0;
};

struct MacroOut {
  std::uint32_t sum, carry;
  std::vector<std::uint32_t> couts;
};

/// Gate realization of one compressor; mirrors eval() bit for bit.
inline MacroOut expand_compressor(NetBuilder& nb, CompressorKind kind,
                                  const std::vector<std::uint32_t>& b_sig,
                                  const std::vector<std::uint32_t>& a_sig,
                                  const std::vector<std::uint32_t>& cin_sig) {
  const CompressorSpec& s = spec_of(kind);
  MacroOut out{nb.zero(), nb.zero(), {}};
  if (s.is_exact) {
    switch (kind) {
      case CompressorKind::HALF_ADDER: {
        auto [sum, carry] = nb.half_adder(a_sig[0], a_sig[1]);
        return {sum, carry, {}};
      }
      case CompressorKind::FULL_ADDER: {
        auto [sum, carry] = nb.full_adder(a_sig[0], a_sig[1], cin_sig[0]);
        return {sum, carry, {}};
      }
      case CompressorKind::EXACT_4_2: {
        auto [s1, cout0] = nb.full_adder(a_sig[0], a_sig[1], a_sig[2]);
        auto [sum, carry] = nb.full_adder(s1, a_sig[3], cin_sig[0]);
        return {sum, carry, {cout0}};
      }
      case CompressorKind::EXACT_6_2: {
        auto [s1, c1] = nb.full_adder(a_sig[0], a_sig[1], a_sig[2]);
        auto [s2, c2] = nb.full_adder(a_sig[3], a_sig[4], a_sig[5]);
        auto [s3, c3] = nb.full_adder(s1, s2, cin_sig[0]);
        auto [sum, carry] = nb.full_adder(s3, cin_sig[1], cin_sig[2]);
        return {sum, carry, {c1, c2, c3}};
      }
      default: break;
    }
  }
  auto [c_a, s_a] = nb.side(a_sig);
  std::uint32_t sum = s_a, c2 = nb.zero();
  if (s.cin_count == 1) {
    c2 = nb.mk_and(s_a, cin_sig[0]);
    sum = nb.mk_xor(s_a, cin_sig[0]);
  }
  auto [c_b, s_b] = nb.side(b_sig);
  out.sum = sum;
  out.carry = nb.mk_or(nb.mk_or(s_b, c_a), c2);
  if (s.m_high >= 2) out.couts.push_back(c_b);
  return out;
}

}  // namespace detail

/// Macro-expands a validated plan into a boolean netlist. The ripple-carry
/// final adder consumes whatever dots the stages leave in its span; columns
/// outside the span pass their single dot (or a constant 0) to the output.
inline Netlist elaborate(const ReductionPlan& plan) {
  {
    auto violations = validate_plan(plan);
    if (!violations.empty())
      throw std::runtime_error("elaborate: plan is invalid: [" + violations[0].code + "] " +
                               violations[0].message);
  }
  ResolvedPlan rp = resolve_plan(plan);
  const int n = plan.width;

  detail::NetBuilder nb;
  std::vector<std::uint32_t> a_in(n), b_in(n);
  for (int i = 0; i < n; ++i) a_in[i] = nb.input("A" + std::to_string(i));
  for (int i = 0; i < n; ++i) b_in[i] = nb.input("B" + std::to_string(i));

  std::map<DotId, std::uint32_t> sig;
  auto signal_of = [&](const DotId& id) -> std::uint32_t {
    if (id == kZeroDot) return nb.zero();
    return sig.at(id);
  };

  // partial products
  for (const auto& [id, m] : rp.dots) {
    if (m.stage != 0) continue;
    sig[id] = m.is_constant_zero() ? nb.zero() : nb.mk_and(a_in[m.pp_i], b_in[m.pp_j]);
  }

  // stages, placements in dependency order
  for (int s = 0; s < static_cast<int>(plan.stages.size()); ++s) {
    // output ids replay the counters used by resolve_plan
    std::map<int, int> ctr;
    std::vector<std::vector<DotId>> out_ids(plan.stages[s].size());
    for (int pi = 0; pi < static_cast<int>(plan.stages[s].size()); ++pi) {
      const Placement& p = plan.stages[s][pi];
      const CompressorSpec& cs = spec_of(p.kind);
      out_ids[pi].push_back(make_dot_id(s + 1, p.anchor_column, ctr[p.anchor_column]++));
      out_ids[pi].push_back(make_dot_id(s + 1, p.anchor_column + 1, ctr[p.anchor_column + 1]++));
      for (int k = 0; k < cs.cout_count; ++k)
        out_ids[pi].push_back(
            make_dot_id(s + 1, p.anchor_column + cs.cout_rel_col,
                        ctr[p.anchor_column + cs.cout_rel_col]++));
    }
    for (int pi : rp.topo[s]) {
      const Placement& p = plan.stages[s][pi];
      const CompressorSpec& cs = spec_of(p.kind);
      std::vector<std::uint32_t> bs, as, cs_sig;
      for (const DotId& id : p.b_dots) bs.push_back(signal_of(id));
      for (const DotId& id : p.a_dots) as.push_back(signal_of(id));
      for (int k = 0; k < cs.cin_count; ++k)
        cs_sig.push_back(k == 0 && p.cin ? signal_of(*p.cin) : nb.zero());
      auto mo = detail::expand_compressor(nb, p.kind, bs, as, cs_sig);
      sig[out_ids[pi][0]] = mo.sum;
      sig[out_ids[pi][1]] = mo.carry;
      for (std::size_t k = 0; k < mo.couts.size(); ++k) sig[out_ids[pi][2 + k]] = mo.couts[k];
    }
  }

  // final adder and outputs
  std::vector<std::uint32_t> outs(2 * n, nb.zero());
  const FinalAdder& fa = plan.final_adder;
  std::uint32_t carry = nb.zero();
  for (int c = 0; c < 2 * n; ++c) {
    std::vector<std::uint32_t> cell;
    if (auto it = rp.leftovers.find(c); it != rp.leftovers.end())
      for (const DotId& id : it->second) cell.push_back(signal_of(id));
    if (!fa.empty() && c >= fa.lo_col && c <= fa.hi_col) {
      cell.push_back(carry);
      std::erase(cell, nb.zero());
      if (cell.empty()) cell.push_back(nb.zero());
      switch (cell.size()) {
        case 1: outs[c] = cell[0]; carry = nb.zero(); break;
        case 2: {
          auto [sum, cout] = nb.half_adder(cell[0], cell[1]);
          outs[c] = sum;
          carry = cout;
          break;
        }
        case 3: {
          auto [sum, cout] = nb.full_adder(cell[0], cell[1], cell[2]);
          outs[c] = sum;
          carry = cout;
          break;
        }
        default: throw std::logic_error("final adder cell overflow");
      }
    } else {
      outs[c] = cell.empty() ? nb.zero() : cell[0];
    }
  }

  // prune dead gates, keeping all inputs and preserving topological order
  const auto& gates = nb.gates();
  std::vector<bool> keep(gates.size(), false);
  std::vector<std::uint32_t> stack = outs;
  for (std::uint32_t g : stack) keep[g] = true;
  while (!stack.empty()) {
    std::uint32_t g = stack.back();
    stack.pop_back();
    const Gate& gate = gates[g];
    if (gate.op == GateOp::And || gate.op == GateOp::Or || gate.op == GateOp::Xor ||
        gate.op == GateOp::Not) {
      for (std::uint32_t f : {gate.a, gate.b}) {
        if (!keep[f]) {
          keep[f] = true;
          stack.push_back(f);
        }
        if (gate.op == GateOp::Not) break;
      }
    }
  }
  for (std::size_t i = 0; i < gates.size(); ++i)
    if (gates[i].op == GateOp::Input || gates[i].op == GateOp::Const0 ||
        gates[i].op == GateOp::Const1)
      keep[i] = true;

  Netlist net;
  net.width = n;
  std::vector<std::uint32_t> remap(gates.size(), 0);
  for (std::size_t i = 0; i < gates.size(); ++i) {
    if (!keep[i]) continue;
    remap[i] = static_cast<std::uint32_t>(net.gates.size());
    Gate g = gates[i];
    g.a = remap[g.a];
    g.b = remap[g.b];
    net.gates.push_back(g);
    net.input_names.push_back(nb.names()[i]);
  }
  for (int i = 0; i < n; ++i) net.a_inputs.push_back(remap[a_in[i]]);
  for (int i = 0; i < n; ++i) net.b_inputs.push_back(remap[b_in[i]]);
  for (int c = 0; c < 2 * n; ++c) net.outputs.push_back(remap[outs[c]]);
  return net;
}

}  // namespace axmul
