#pragma once

// Exact sampler for the local Cohen-Lenstra distribution and the
// finite-prime-set group sampler built on it, plus the equidistribution
// test harness.
//
// There is deliberately no all-primes group sampler: no stochastic process
// generates Cohen-Lenstra-random global groups, so the API requires an
// explicit finite prime set.
//
// Randomness: std::mt19937_64 (the C++ standard 64-bit Mersenne Twister),
// seeded directly with the configured seed. Inversion against the exact
// rational cumulative tables uses a lazily extended dyadic uniform, so a
// draw is exact conditional on the explored size range; the unexplored size
// tail is folded back proportionally, with total-variation bias <= epsilon.

#include "clh/contents.hpp"
#include "clh/global_measure.hpp"
#include "clh/local_measure.hpp"

#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <random>
#include <variant>
#include <vector>

namespace clh {

struct SamplerConfig {
  std::uint64_t seed = 0;
  Rat epsilon = Rat(1, 1000000);  // TV budget for the size tail
  unsigned partition_cap = 32;
  unsigned product_depth = 64;

  void validate() const {
    if (epsilon <= 0) throw std::invalid_argument("sampler epsilon must be positive");
    if (partition_cap < 1 || partition_cap > kEnumerationCap)
      throw std::invalid_argument("sampler partition cap out of range");
  }
};

class Sampler {
 public:
  explicit Sampler(SamplerConfig cfg) : cfg_(std::move(cfg)), rng_(cfg_.seed) {
    cfg_.validate();
  }

  // Two-stage exact inversion: draw the size n proportional to s_p(n) over
  // the explored range (explored until the certified cumulative probability
  // reaches 1 - epsilon), then draw the partition within size n
  // proportional to its weight, over the canonical enumeration order.
  Partition sample_local(std::uint64_t p) {
    const LocalTable& t = table_for(p);
    const std::size_t n = draw_index(t.size_cum);
    const SizeLayer& layer = t.layers[n];
    if (layer.parts.size() == 1) return layer.parts[0];
    return layer.parts[draw_index(layer.cum)];
  }

  // Independent local draws per prime, assembled canonically.
  FinAbGroup sample_group(const std::vector<std::uint64_t>& primes) {
    std::map<std::uint64_t, Partition> parts;
    for (std::uint64_t p : primes) {
      if (parts.count(p)) throw std::invalid_argument("sample_group: duplicate prime");
      parts.emplace(p, Partition());
    }
    for (auto& [p, lam] : parts) lam = sample_local(p);  // ascending prime order
    return FinAbGroup::from_parts(std::move(parts));
  }

 private:
  struct SizeLayer {
    std::vector<Partition> parts;
    std::vector<Rat> cum;  // normalized cumulative weights, last = 1
  };
  struct LocalTable {
    std::vector<Rat> size_cum;  // normalized cumulative size masses, last = 1
    std::vector<SizeLayer> layers;
  };

  const LocalTable& table_for(std::uint64_t p) {
    auto it = tables_.find(p);
    if (it != tables_.end()) return it->second;
    if (!is_prime(p)) throw std::invalid_argument("sample_local: p must be prime");

    Budget budget{cfg_.partition_cap, cfg_.product_depth};
    const Rat eta_lo = eta(p, budget).lo;
    LocalTable table;
    std::vector<Rat> size_mass;
    Rat total = 0;
    unsigned n = 0;
    for (;; ++n) {
      if (n > cfg_.partition_cap)
        throw budget_error("sample_local: cumulative probability " +
                           decimal_string(total * eta_lo, 9) + " below 1 - epsilon at size cap " +
                           std::to_string(cfg_.partition_cap));
      SizeLayer layer;
      layer.parts = enumerate_partitions(n);
      Rat mass = 0;
      for (const auto& lam : layer.parts) {
        mass += weight(p, lam);
        layer.cum.push_back(mass);
      }
      for (auto& c : layer.cum) c /= mass;
      table.layers.push_back(std::move(layer));
      size_mass.push_back(mass);
      total += mass;
      if (total * eta_lo >= 1 - cfg_.epsilon) break;
    }
    Rat cum = 0;
    for (const Rat& m : size_mass) {
      cum += m;
      table.size_cum.push_back(cum / total);
    }
    return tables_.emplace(p, std::move(table)).first->second;
  }

  // Exact inversion of a cumulative table (values in (0,1], last = 1)
  // against a uniform real drawn lazily in 64-bit chunks: refine the dyadic
  // interval [u/2^b, (u+1)/2^b) until it lies inside one cell.
  std::size_t draw_index(const std::vector<Rat>& cum) {
    Int u = 0;
    unsigned long bits = 0;
    for (;;) {
      if (bits > 65536) throw std::logic_error("draw_index failed to settle");
      // first cell i with u/2^b < cum[i]
      std::size_t lo = 0, hi = cum.size() - 1;
      while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        // u/2^b < cum[mid] ?
        Int lhs = u * Int(cum[mid].get_den());
        Int rhs = Int(cum[mid].get_num()) << bits;
        if (lhs < rhs)
          hi = mid;
        else
          lo = mid + 1;
      }
      // settled if (u+1)/2^b <= cum[lo]
      Int lhs = (u + 1) * Int(cum[lo].get_den());
      Int rhs = Int(cum[lo].get_num()) << bits;
      if (lhs <= rhs) return lo;
      u = (u << 64) | Int(static_cast<unsigned long>(rng_()));
      bits += 64;
    }
  }

  SamplerConfig cfg_;
  std::mt19937_64 rng_;
  std::map<std::uint64_t, LocalTable> tables_;
};

using MeasurableFn = std::variant<MeasurableTarget, UniformQuantity>;

struct EquidistReport {
  std::vector<std::pair<std::uint64_t, Rat>> rows;  // running means at checkpoints
  std::uint64_t count = 0;
  Rat final_mean;
  double stderr_est = 0.0;
  Enclosure reference;
  bool pass = false;
};

namespace detail {

inline Rat evaluate_measurable(const MeasurableFn& f, const FinAbGroup& g) {
  if (const auto* target = std::get_if<MeasurableTarget>(&f)) {
    return std::visit(
        [&](const auto& t) -> Rat {
          using T = std::decay_t<decltype(t)>;
          if constexpr (std::is_same_v<T, UniformProperty>)
            return Rat(holds_globally(t, g) ? 1 : 0);
          else if constexpr (std::is_same_v<T, OSet>)
            return Rat(oset_membership(t, g) ? 1 : 0);
          else
            return Rat(dset_membership(t, g) ? 1 : 0);
        },
        *target);
  }
  const auto inv = invariants(g);
  switch (std::get<UniformQuantity>(f)) {
    case UniformQuantity::rank: return Rat(inv.rank);
    case UniformQuantity::uniform_order: return Rat(inv.uniform_order);
    case UniformQuantity::uniform_exponent: return Rat(inv.uniform_exponent);
  }
  throw std::logic_error("unreachable");
}

}  // namespace detail

// Folds a group stream against a measurable function and compares the final
// empirical mean with a reference enclosure: pass iff the mean lies within
// [lo - 3*stderr, hi + 3*stderr]. With a degenerate (zero-variance) stream
// the comparison is exact.
inline EquidistReport equidistribution_report(std::istream& in, const MeasurableFn& f,
                                              const Enclosure& reference,
                                              const std::vector<std::uint64_t>& checkpoints) {
  std::vector<std::uint64_t> cps = checkpoints;
  std::sort(cps.begin(), cps.end());
  EquidistReport report;
  report.reference = reference;
  Rat sum = 0, sum_sq = 0;
  std::size_t next = 0;
  std::uint64_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    FinAbGroup g;
    try {
      g = FinAbGroup::parse(line);
    } catch (const std::exception& ex) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": " + ex.what());
    }
    Rat v = detail::evaluate_measurable(f, g);
    sum += v;
    sum_sq += v * v;
    ++report.count;
    while (next < cps.size() && cps[next] == report.count) {
      report.rows.push_back({report.count, sum / make_rat(make_int(report.count), Int(1))});
      ++next;
    }
  }
  if (report.count == 0) throw std::invalid_argument("equidistribution: empty stream");
  const Rat n = make_rat(make_int(report.count), Int(1));
  report.final_mean = sum / n;
  if (report.rows.empty() || report.rows.back().first != report.count)
    report.rows.push_back({report.count, report.final_mean});
  const Rat variance = sum_sq / n - report.final_mean * report.final_mean;
  report.stderr_est = std::sqrt(std::max(0.0, variance.get_d() / static_cast<double>(report.count)));
  if (report.stderr_est == 0.0) {
    report.pass = reference.contains(report.final_mean);
  } else {
    const double mean = report.final_mean.get_d();
    report.pass = mean >= reference.lo.get_d() - 3 * report.stderr_est &&
                  mean <= reference.hi.get_d() + 3 * report.stderr_est;
  }
  return report;
}

}  // namespace clh
