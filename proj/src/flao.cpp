#include "mdsc/flao.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mdsc/rng.hpp"

namespace mdsc {

void FlaoConfig::validate() const {
  if (cycle_length != 6 && cycle_length != 8)
    throw std::invalid_argument("cycle length must be 6 or 8");
  if (relocation_bound < 0) throw std::invalid_argument("relocation bound must be >= 1");
  if (density_cap >= 0 && density_cap > 100)
    throw std::invalid_argument("density cap is a percentage");
}

namespace {

// Integer vector with fixed sum nearest (least squares) to the real targets:
// floor rounding plus greedy unit corrections at the cheapest entries.
std::vector<long long> round_with_sum(const std::vector<double>& u, long long sum) {
  const size_t n = u.size();
  std::vector<long long> v(n);
  long long have = 0;
  for (size_t j = 0; j < n; ++j) {
    v[j] = static_cast<long long>(std::floor(u[j]));
    if (v[j] < 0) v[j] = 0;
    have += v[j];
  }
  while (have < sum) {
    size_t best = 0;
    double best_gap = -1e300;
    for (size_t j = 0; j < n; ++j) {
      double gap = u[j] - static_cast<double>(v[j]);
      if (gap > best_gap) { best_gap = gap; best = j; }
    }
    ++v[best];
    ++have;
  }
  while (have > sum) {
    size_t best = n;
    double best_gap = 1e300;
    for (size_t j = 0; j < n; ++j) {
      if (v[j] == 0) continue;
      double gap = u[j] - static_cast<double>(v[j]);
      if (gap < best_gap) { best_gap = gap; best = j; }
    }
    if (best == n) throw std::logic_error("cannot reduce rounded counts below zero");
    --v[best];
    --have;
  }
  return v;
}

}  // namespace

RelocationMatrix initial_relocation(const ProbDistMatrix& P, const PartitioningMatrix& K,
                                    const CodeParams& p, uint64_t seed) {
  if (P.memory != p.memory || P.copies != p.copies)
    throw std::invalid_argument("distribution matrix inconsistent with the code parameters");
  validate_partitioning(K, p);
  const int M = p.copies;
  const double scale = static_cast<double>(p.gamma) * p.kappa;
  std::vector<long long> census = component_census(K, p.memory);

  Rng rng(seed);
  RelocationMatrix R{IntGrid(p.gamma, p.kappa, 0)};
  for (int i = 0; i <= p.memory; ++i) {
    std::vector<double> u(M);
    for (int j = 0; j < M; ++j) u[j] = scale * P.at(i, j);
    std::vector<long long> n = round_with_sum(u, census[i]);

    std::vector<std::pair<int, int>> members;
    for (int r = 0; r < p.gamma; ++r)
      for (int c = 0; c < p.kappa; ++c)
        if (K.m.at(r, c) == i) members.push_back({r, c});
    rng.shuffle(members);
    size_t idx = 0;
    for (int j = 1; j < M; ++j)
      for (long long t = 0; t < n[j]; ++t, ++idx)
        R.m.at(members[idx].first, members[idx].second) = j;
    // the remaining n[0] members keep relocation value 0
  }
  return R;
}

namespace {

// Per-cycle data laid out for the greedy loop: signed coefficients drive the
// activity test, touched positions drive participation.
struct CycleSet {
  int g = 0;
  std::vector<CycleRecord> records;
  std::vector<std::array<int8_t, 8>> coeff;     // per record: coefficient per touched slot
  std::vector<std::array<int16_t, 8>> touched;  // distinct base positions, -1 padded
  std::vector<long long> weight;
  std::vector<int> prune_idx;  // records with >= 2 circulants in the middle replica

  void build(std::vector<CycleRecord>&& recs, const CodeParams& p) {
    records = std::move(recs);
    const size_t n = records.size();
    coeff.resize(n);
    touched.resize(n);
    weight.resize(n);
    for (size_t t = 0; t < n; ++t) {
      const CycleRecord& r = records[t];
      g = r.g;
      weight[t] = r.lift_count;
      std::array<int16_t, 8> pos;
      std::array<int8_t, 8> cf;
      int np = 0;
      auto add = [&](int base, int delta) {
        for (int k = 0; k < np; ++k)
          if (pos[k] == base) { cf[k] = static_cast<int8_t>(cf[k] + delta); return; }
        pos[np] = static_cast<int16_t>(base);
        cf[np] = static_cast<int8_t>(delta);
        ++np;
      };
      for (int k = 0; k < r.g; ++k) {
        add(r.base_plus[k], +1);
        add(r.base_minus[k], -1);
      }
      for (int k = np; k < 8; ++k) { pos[k] = -1; cf[k] = 0; }
      touched[t] = pos;
      coeff[t] = cf;
    }

    // prune: >= 2 distinct blocks whose column lies in replica floor(L/2), 1-based
    const int mid = p.coupling_len / 2;  // replica index floor(L/2), 1-based -> cols [(mid-1)k, mid k)
    const int lo = (mid - 1) * p.kappa, hi = mid * p.kappa;
    for (size_t t = 0; t < n; ++t) {
      const CycleRecord& r = records[t];
      std::array<std::pair<int, int>, 8> blocks;
      int nb = 0;
      auto add_block = [&](int row, int col) {
        for (int k = 0; k < nb; ++k)
          if (blocks[k] == std::pair{row, col}) return;
        blocks[nb++] = {row, col};
      };
      for (int k = 0; k < r.g; ++k) {
        if (r.col[k] >= lo && r.col[k] < hi) add_block(r.row[k], r.col[k]);
        int cnext = r.col[(k + 1) % r.g];
        if (cnext >= lo && cnext < hi) add_block(r.row[k], cnext);
      }
      if (nb >= 2) prune_idx.push_back(static_cast<int>(t));
    }
  }

  bool active(size_t t, const IntGrid& reloc, int M) const {
    int s = 0;
    const auto& pos = touched[t];
    const auto& cf = coeff[t];
    for (int k = 0; k < 8 && pos[k] >= 0; ++k) s += cf[k] * reloc.data[pos[k]];
    return (s % M) == 0;
  }

  long long count_active(const IntGrid& reloc, int M) const {
    long long total = 0;
    const long long n = static_cast<long long>(records.size());
#pragma omp parallel for schedule(static) reduction(+ : total) num_threads(worker_count())
    for (long long t = 0; t < n; ++t)
      if (active(static_cast<size_t>(t), reloc, M)) total += weight[t];
    return total;
  }
};

}  // namespace

FlaoResult fl_ao(const PartitioningMatrix& K, const LiftingMatrix& L, const CodeParams& p,
                 const ProbDistMatrix& P, const FlaoConfig& cfg) {
  cfg.validate();
  const int M = p.copies;
  const int g = cfg.cycle_length / 2;
  const long long rb = cfg.relocation_bound > 0 ? cfg.relocation_bound : 10LL * p.gamma * p.kappa;

  Rng rng(cfg.seed);
  FlaoResult res;
  res.seed = cfg.seed;
  res.relocation = initial_relocation(P, K, p, rng.next());

  SparseQcMatrix hsc = build_sc_matrix(K, L, p);
  CycleSet cs;
  cs.build(enumerate_lifted_cycles(hsc, g), p);
  if (cs.records.empty()) return res;

  IntGrid& F = res.relocation.m;
  long long active_prev = cs.count_active(F, M);
  res.initial_active = active_prev;
  if (M == 1) {  // no auxiliary matrices to relocate to
    res.md_cycle_count = active_prev;
    return res;
  }

  const int npos = p.gamma * p.kappa;
  long long count = 0;
  for (;;) {
    // participation of each circulant in active pruned cycles
    std::vector<long long> part(npos, 0);
    for (int t : cs.prune_idx) {
      if (!cs.active(t, F, M)) continue;
      const auto& pos = cs.touched[t];
      for (int k = 0; k < 8 && pos[k] >= 0; ++k) part[pos[k]] += cs.weight[t];
    }
    long long best_part = 0;
    for (int q = 0; q < npos; ++q) best_part = std::max(best_part, part[q]);
    if (best_part == 0) break;  // nothing left to improve on the pruned list
    std::vector<int> tied;
    for (int q = 0; q < npos; ++q)
      if (part[q] == best_part) tied.push_back(q);
    int chosen = tied[rng.bounded(tied.size())];

    // deactivation score of each candidate auxiliary index, on the pruned list
    int old_value = F.data[chosen];
    std::vector<long long> score(M, 0);
    for (int t : cs.prune_idx) {
      const auto& pos = cs.touched[t];
      const auto& cf = cs.coeff[t];
      int cf_chosen = 0, rest = 0;
      for (int k = 0; k < 8 && pos[k] >= 0; ++k) {
        if (pos[k] == chosen)
          cf_chosen = cf[k];
        else
          rest += cf[k] * F.data[pos[k]];
      }
      if (cf_chosen == 0) continue;  // not involved, or coefficients cancel
      bool was = ((rest + cf_chosen * old_value) % M + M) % M == 0;
      if (!was) continue;
      for (int target = 0; target < M; ++target)
        if (((rest + cf_chosen * target) % M + M) % M != 0) score[target] += cs.weight[t];
    }
    long long best_score = *std::max_element(score.begin(), score.end());
    std::vector<int> tied_t;
    for (int target = 0; target < M; ++target)
      if (score[target] == best_score) tied_t.push_back(target);
    int target = tied_t[rng.bounded(tied_t.size())];

    F.data[chosen] = target;
    long long active_cur = cs.count_active(F, M);
    ++count;
    res.trace.push_back({chosen / p.kappa, chosen % p.kappa, target, active_cur, false});

    bool improved = active_cur < active_prev;
    bool under_bound = count < rb;
    bool under_density = cfg.density_cap < 0 || md_density(res.relocation) < cfg.density_cap;
    if (improved && under_bound && under_density) {
      active_prev = active_cur;
      continue;
    }
    if (active_cur > active_prev) {
      // the unimproving final move stays out of the design
      F.data[chosen] = old_value;
      res.trace.back().reverted = true;
      active_cur = active_prev;
    }
    active_prev = active_cur;
    break;
  }

  res.iterations = count;
  res.md_cycle_count = M * active_prev;
  return res;
}

VerifyReport verify_design(const PartitioningMatrix& K, const LiftingMatrix& L,
                           const RelocationMatrix& R, const CodeParams& p, int cycle_length,
                           long long expected, const std::string& name) {
  VerifyReport rep;
  rep.name = name;
  rep.expected = expected;
  rep.actual = count_md_cycles(K, L, R, p, cycle_length / 2);
  rep.pass = rep.actual == rep.expected;
  return rep;
}

}  // namespace mdsc
