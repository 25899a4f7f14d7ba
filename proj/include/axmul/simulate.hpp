#pragma once

#include <cstdint>
#include <ostream>

#include <axmul/netlist.hpp>

namespace axmul {

struct MultiplierErrorStats {
  Rational med{0};
  Rational ned{0};
  Rational error_rate{0};
  Rational mean_signed_ed{0};
  std::int64_t max_abs_ed = 0;
  std::int64_t abs_ed_sum = 0;  // numerator of med before division
  int n = 8;
};

/// Exhaustive |ED| matrix: cell (a, b) holds |approx(a,b) - a*b|.
struct Heatmap {
  int dim = 256;
  std::vector<std::uint32_t> cells;  // row-major, dim*dim
  std::uint32_t max_abs_ed = 0;
  std::string design;

  std::uint32_t at(int a, int b) const { return cells[static_cast<std::size_t>(a) * dim + b]; }
};

namespace detail {

// lane l of word k carries bit k of (base + l)
inline std::uint64_t lane_pattern(int bit, std::uint32_t base) {
  static constexpr std::uint64_t periodic[6] = {
      0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
      0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull};
  if (bit < 6) return periodic[bit];
  return (base >> bit) & 1 ? ~std::uint64_t{0} : 0;
}

struct SweepSinks {
  Heatmap* heatmap = nullptr;
  std::map<std::int64_t, std::uint64_t>* histogram = nullptr;
};

inline MultiplierErrorStats sweep(const Netlist& net, const SweepSinks& sinks = {}) {
  const int n = net.width;
  const std::int64_t side = std::int64_t{1} << n;
  const std::int64_t total = side * side;

  if (sinks.heatmap) {
    sinks.heatmap->dim = static_cast<int>(side);
    sinks.heatmap->cells.assign(static_cast<std::size_t>(total), 0);
    sinks.heatmap->max_abs_ed = 0;
  }

  std::int64_t abs_sum = 0, signed_sum = 0, err_cnt = 0, max_abs = 0;
  std::vector<std::uint64_t> scratch;
  std::uint64_t a_bits[8], b_bits[8], out[16];
  const std::size_t out_n = net.outputs.size();

  for (std::int64_t a = 0; a < side; ++a) {
    for (int i = 0; i < n; ++i) a_bits[i] = (a >> i) & 1 ? ~std::uint64_t{0} : 0;
    for (std::int64_t base = 0; base < side; base += 64) {
      const int lanes = static_cast<int>(std::min<std::int64_t>(64, side - base));
      for (int j = 0; j < n; ++j) b_bits[j] = lane_pattern(j, static_cast<std::uint32_t>(base));
      net.evaluate_lanes(a_bits, b_bits, out, scratch);
      for (int l = 0; l < lanes; ++l) {
        std::int64_t f = 0;
        for (std::size_t k = 0; k < out_n; ++k) f |= static_cast<std::int64_t>((out[k] >> l) & 1) << k;
        const std::int64_t b = base + l;
        const std::int64_t ed = f - a * b;  // approximate minus exact
        const std::int64_t abs_ed = ed < 0 ? -ed : ed;
        abs_sum += abs_ed;
        signed_sum += ed;
        if (ed != 0) ++err_cnt;
        if (abs_ed > max_abs) max_abs = abs_ed;
        if (sinks.heatmap) {
          sinks.heatmap->cells[static_cast<std::size_t>(a) * side + b] =
              static_cast<std::uint32_t>(abs_ed);
          if (abs_ed > sinks.heatmap->max_abs_ed)
            sinks.heatmap->max_abs_ed = static_cast<std::uint32_t>(abs_ed);
        }
        if (sinks.histogram) ++(*sinks.histogram)[ed];
      }
    }
  }

  MultiplierErrorStats st;
  st.n = n;
  st.abs_ed_sum = abs_sum;
  st.med = Rational(abs_sum, total);
  st.ned = st.med / Rational((side - 1) * (side - 1));
  st.error_rate = Rational(err_cnt, total);
  st.mean_signed_ed = Rational(signed_sum, total);
  st.max_abs_ed = max_abs;
  return st;
}

}  // namespace detail

/// Full sweep over all 2^n x 2^n operand pairs against exact multiplication.
inline MultiplierErrorStats exhaustive_error_stats(const Netlist& net) {
  return detail::sweep(net);
}

inline Heatmap heatmap(const Netlist& net, std::string design = {}) {
  Heatmap h;
  h.design = std::move(design);
  detail::SweepSinks sinks;
  sinks.heatmap = &h;
  detail::sweep(net, sinks);
  return h;
}

/// Exact per-value counts of the signed error distance over the full sweep.
inline std::map<std::int64_t, std::uint64_t> signed_error_distribution(const Netlist& net) {
  std::map<std::int64_t, std::uint64_t> hist;
  detail::SweepSinks sinks;
  sinks.histogram = &hist;
  detail::sweep(net, sinks);
  return hist;
}

// ---------------------------------------------------------------------------
// Exports
// ---------------------------------------------------------------------------

inline std::string stats_csv_header() { return "design,med,ned,er,max_abs_ed,mean_signed_ed"; }

inline std::string stats_csv_row(const std::string& design, const MultiplierErrorStats& st) {
  return design + "," + to_decimal(st.med, 12) + "," + to_decimal(st.ned, 12) + "," +
         to_decimal(st.error_rate, 12) + "," + std::to_string(st.max_abs_ed) + "," +
         to_decimal(st.mean_signed_ed, 12);
}

inline void write_heatmap_csv(const Heatmap& h, std::ostream& os) {
  for (int a = 0; a < h.dim; ++a) {
    for (int b = 0; b < h.dim; ++b) {
      if (b) os << ',';
      os << h.at(a, b);
    }
    os << '\n';
  }
}

/// 8-bit binary PGM; each pixel is floor(255*|ED|/max), the scale factor is
/// recorded in a header comment.
inline void write_heatmap_pgm(const Heatmap& h, std::ostream& os) {
  os << "P5\n# max_abs_ed=" << h.max_abs_ed << "\n" << h.dim << " " << h.dim << "\n255\n";
  for (int a = 0; a < h.dim; ++a)
    for (int b = 0; b < h.dim; ++b) {
      std::uint32_t v = h.at(a, b);
      unsigned char px = h.max_abs_ed == 0
                             ? 0
                             : static_cast<unsigned char>(
                                   (static_cast<std::uint64_t>(v) * 255) / h.max_abs_ed);
      os.put(static_cast<char>(px));
    }
}

}  // namespace axmul
