#include "mdsc/cycles.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace mdsc {

namespace {

struct Adj {
  int nrows = 0, ncols = 0;
  // neighbour lists: by_col[c] = sorted (row, power), by_row[r] = sorted (col, power)
  std::vector<std::vector<std::pair<int, int>>> by_col, by_row;

  int power(int r, int c) const {
    const auto& v = by_col[c];
    auto it = std::lower_bound(v.begin(), v.end(), std::pair<int, int>{r, -1});
    return (it != v.end() && it->first == r) ? it->second : -1;
  }
};

Adj make_adj(const SparseQcMatrix& H) {
  Adj a;
  a.nrows = H.block_rows;
  a.ncols = H.block_cols;
  a.by_col.resize(H.block_cols);
  a.by_row.resize(H.block_rows);
  for (const auto& b : H.blocks) {
    a.by_col[b.col].push_back({b.row, b.power});
    a.by_row[b.row].push_back({b.col, b.power});
  }
  for (auto& v : a.by_col) std::sort(v.begin(), v.end());
  for (auto& v : a.by_row) std::sort(v.begin(), v.end());
  return a;
}

enum class Mode { lifted, proto_simple, candidates };

struct WalkView {
  const int* cs;
  const int* rs;
  int g;
  int lift;  // unreduced alternating power sum
};

// Lexicographic minimum over the g rotations and 2 directions of the node
// tuple (c0, r0, c1, r1, ...). Every traversal of the same cycle appears in
// the enumeration, so keeping only the minimum counts each class once.
bool is_canonical(const int* cs, const int* rs, int g) {
  for (int k = 0; k < g; ++k) {
    for (int dir = 0; dir < 2; ++dir) {
      if (k == 0 && dir == 0) continue;
      for (int t = 0; t < 2 * g; ++t) {
        int h = t >> 1;
        int v;
        if (dir == 0)
          v = (t & 1) ? rs[(k + h) % g] : cs[(k + h) % g];
        else
          v = (t & 1) ? rs[((k - 1 - h) % g + g) % g] : cs[((k - h) % g + g) % g];
        int o = (t & 1) ? rs[h] : cs[h];
        if (v != o) {
          if (v < o) return false;
          break;
        }
      }
    }
  }
  return true;
}

// Size of the rotation stabilizer: 2 exactly for the doubly-traversed 4-cycle
// shape (2g = 8 with equal halves), 1 otherwise.
int rotation_stabilizer(const int* cs, const int* rs, int g) {
  if (g == 4 && cs[0] == cs[2] && rs[0] == rs[2] && cs[1] == cs[3] && rs[1] == rs[3]) return 2;
  return 1;
}

// Depth-first enumeration of rooted directed closed walks of length 2g.
// State after d row-traversals: standing on block-col cs[d] carrying value
// bv[d] (mod z). A row-traversal picks rs[d] (entering value av[d]) and then
// the next column, or closes back to cs[0] at d == g-1.
template <Mode MODE, class Emit>
struct WalkSearch {
  const Adj& adj;
  int g, z;
  bool prune_min_col;  // restrict to walks whose anchor is the smallest column
  Emit& emit;
  int cs[4]{}, rs[4]{}, bv[4]{}, av[4]{};

  void run(int c0) {
    cs[0] = c0;
    bv[0] = 0;
    descend_row(0, 0);
  }

  void descend_row(int d, int lift_in) {
    if constexpr (MODE == Mode::candidates) {
      if (d == g - 1 && cs[d] == cs[0]) return;  // closing edges would coincide
    }
    for (auto [r, f1] : adj.by_col[cs[d]]) {
      if constexpr (MODE == Mode::candidates) {
        if (d > 0 && r == rs[d - 1]) continue;
        if (d == g - 1 && r == rs[0]) continue;
      } else if constexpr (MODE == Mode::proto_simple) {
        bool dup = false;
        for (int l = 0; l < d; ++l)
          if (rs[l] == r) { dup = true; break; }
        if (dup) continue;
      }
      int a = 0;
      if constexpr (MODE == Mode::lifted) {
        a = bv[d] + f1;
        if (a >= z) a -= z;
        bool clash = false;
        for (int l = 0; l < d; ++l)
          if (rs[l] == r && av[l] == a) { clash = true; break; }
        if (clash) continue;
      }
      rs[d] = r;
      av[d] = a;
      if (d == g - 1) {
        int f2 = adj.power(r, cs[0]);
        if (f2 < 0) continue;
        if constexpr (MODE == Mode::lifted) {
          int b = a - f2;
          if (b < 0) b += z;
          if (b != 0) continue;
        }
        emit(WalkView{cs, rs, g, lift_in + f1 - f2});
      } else {
        descend_col(d, lift_in + f1);
      }
    }
  }

  void descend_col(int d, int lift_mid) {
    for (auto [c, f2] : adj.by_row[rs[d]]) {
      if (prune_min_col && c < cs[0]) continue;
      if constexpr (MODE == Mode::candidates) {
        if (c == cs[d]) continue;
      } else if constexpr (MODE == Mode::proto_simple) {
        bool dup = false;
        for (int l = 0; l <= d; ++l)
          if (cs[l] == c) { dup = true; break; }
        if (dup) continue;
      }
      int b = 0;
      if constexpr (MODE == Mode::lifted) {
        b = av[d] - f2;
        if (b < 0) b += z;
        bool clash = false;
        for (int l = 0; l <= d; ++l)
          if (cs[l] == c && bv[l] == b) { clash = true; break; }
        if (clash) continue;
      }
      cs[d + 1] = c;
      bv[d + 1] = b;
      descend_row(d + 1, lift_mid - f2);
    }
  }
};

template <Mode MODE, class Emit>
void walks_from_anchor(const Adj& adj, int g, int z, int c0, bool prune, Emit&& emit) {
  WalkSearch<MODE, Emit> s{adj, g, z, prune, emit};
  s.run(c0);
}

void require_supported_g(int g) {
  if (g < 2 || g > 4) throw std::invalid_argument("cycle length must be 4, 6 or 8");
}

struct FoldInfo {
  int fr, fc;  // base grid dims
  int rep_cols;  // columns per replica
};

FoldInfo fold_info(const SparseQcMatrix& H) {
  FoldInfo f;
  f.fr = H.fold_rows > 0 ? H.fold_rows : H.block_rows;
  f.fc = H.fold_cols > 0 ? H.fold_cols : H.block_cols;
  f.rep_cols = f.fc;
  return f;
}

int walk_span(const WalkView& w, int rep_cols) {
  int lo = w.cs[0] / rep_cols, hi = lo;
  for (int k = 1; k < w.g; ++k) {
    int rep = w.cs[k] / rep_cols;
    lo = std::min(lo, rep);
    hi = std::max(hi, rep);
  }
  return hi - lo + 1;
}

struct CensusAccum {
  long long total = 0;
  std::vector<long long> per_span;
  std::vector<long long> per_circ;

  void ensure(int span) {
    if (static_cast<int>(per_span.size()) < span) per_span.resize(span, 0);
  }
  void merge(const CensusAccum& o) {
    total += o.total;
    ensure(static_cast<int>(o.per_span.size()));
    for (size_t i = 0; i < o.per_span.size(); ++i) per_span[i] += o.per_span[i];
    for (size_t i = 0; i < o.per_circ.size(); ++i) per_circ[i] += o.per_circ[i];
  }
};

// Relocation alternating sum of a walk, folded to the base grid.
int walk_reloc_residue(const WalkView& w, const FoldInfo& f, const IntGrid& reloc, int copies) {
  int s = 0;
  for (int k = 0; k < w.g; ++k) {
    s += reloc.at(w.rs[k] % f.fr, w.cs[k] % f.fc);
    s -= reloc.at(w.rs[k] % f.fr, w.cs[(k + 1) % w.g] % f.fc);
  }
  return ((s % copies) + copies) % copies;
}

CycleCensus finish_census(CensusAccum& acc, const SparseQcMatrix& H, int g) {
  FoldInfo f = fold_info(H);
  while (!acc.per_span.empty() && acc.per_span.back() == 0) acc.per_span.pop_back();
  CycleCensus c;
  c.cycle_length = 2 * g;
  c.total = acc.total;
  c.per_span = std::move(acc.per_span);
  c.per_circulant = std::move(acc.per_circ);
  c.base_rows = f.fr;
  c.base_cols = f.fc;
  return c;
}

CycleCensus census_parallel(const SparseQcMatrix& H, int g, const IntGrid* reloc, int copies) {
  require_supported_g(g);
  if (H.z < 2) throw std::invalid_argument("circulant size must be >= 2");
  Adj adj = make_adj(H);
  FoldInfo f = fold_info(H);
  const int nthreads = worker_count();
  std::vector<CensusAccum> parts(nthreads);

#pragma omp parallel num_threads(nthreads)
  {
    CensusAccum& acc = parts[omp_get_thread_num()];
    acc.per_circ.assign(static_cast<size_t>(f.fr) * f.fc, 0);
#pragma omp for schedule(dynamic)
    for (int c0 = 0; c0 < H.block_cols; ++c0) {
      auto emit = [&](const WalkView& w) {
        if (!is_canonical(w.cs, w.rs, g)) return;
        int q = rotation_stabilizer(w.cs, w.rs, g);
        if (H.z % q != 0) return;  // stabilized shape cannot lift at this z
        if (reloc && walk_reloc_residue(w, f, *reloc, copies) != 0) return;
        long long weight = H.z / q;
        acc.total += weight;
        int span = walk_span(w, f.rep_cols);
        acc.ensure(span);
        acc.per_span[span - 1] += weight;
        for (int k = 0; k < g; ++k)
          acc.per_circ[static_cast<size_t>(w.rs[k] % f.fr) * f.fc + (w.cs[k] % f.fc)] += weight;
      };
      walks_from_anchor<Mode::lifted>(adj, g, H.z, c0, /*prune=*/true, emit);
    }
  }
  for (int t = 1; t < nthreads; ++t) parts[0].merge(parts[t]);
  return finish_census(parts[0], H, g);
}

}  // namespace

long long footprint_alt_sum(const CycleRecord& r, const IntGrid& grid) {
  long long s = 0;
  for (int k = 0; k < r.g; ++k) {
    s += grid.data[r.base_plus[k]];
    s -= grid.data[r.base_minus[k]];
  }
  return s;
}

int worker_count() {
  int t = omp_get_max_threads();
  if (const char* env = std::getenv("MDSC_THREADS")) {
    int cap = std::atoi(env);
    if (cap > 0 && cap < t) t = cap;
  }
  return t;
}

CycleCensus count_lifted_cycles(const SparseQcMatrix& H, int g) {
  return census_parallel(H, g, nullptr, 1);
}

CycleCensus count_lifted_cycles_serial(const SparseQcMatrix& H, int g) {
  require_supported_g(g);
  if (H.z < 2) throw std::invalid_argument("circulant size must be >= 2");
  Adj adj = make_adj(H);
  FoldInfo f = fold_info(H);

  // Every rooted directed walk is counted; each cycle class of stabilizer q
  // accounts for 2g/q of them and represents z/q expanded cycles, so the
  // total is z * walks / (2g) with exact division. The per-circulant tally
  // still needs one representative per class, hence the canonical filter.
  long long walks = 0;
  std::vector<long long> span_walks;
  CensusAccum acc;
  acc.per_circ.assign(static_cast<size_t>(f.fr) * f.fc, 0);
  auto emit = [&](const WalkView& w) {
    ++walks;
    int span = walk_span(w, f.rep_cols);
    if (static_cast<int>(span_walks.size()) < span) span_walks.resize(span, 0);
    span_walks[span - 1]++;
    if (is_canonical(w.cs, w.rs, g)) {
      int q = rotation_stabilizer(w.cs, w.rs, g);
      for (int k = 0; k < g; ++k)
        acc.per_circ[static_cast<size_t>(w.rs[k] % f.fr) * f.fc + (w.cs[k] % f.fc)] += H.z / q;
    }
  };
  for (int c0 = 0; c0 < H.block_cols; ++c0)
    walks_from_anchor<Mode::lifted>(adj, g, H.z, c0, /*prune=*/false, emit);

  auto exact_scale = [&](long long n) {
    long long num = n * H.z;
    if (num % (2 * g) != 0) throw std::logic_error("walk count not divisible by orbit size");
    return num / (2 * g);
  };
  acc.total = exact_scale(walks);
  acc.per_span.resize(span_walks.size());
  for (size_t i = 0; i < span_walks.size(); ++i) acc.per_span[i] = exact_scale(span_walks[i]);
  return finish_census(acc, H, g);
}

namespace {

template <Mode MODE>
std::vector<CycleRecord> enumerate_impl(const SparseQcMatrix& H, int g) {
  require_supported_g(g);
  Adj adj = make_adj(H);
  FoldInfo f = fold_info(H);
  std::vector<std::vector<CycleRecord>> buckets(H.block_cols);

#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
  for (int c0 = 0; c0 < H.block_cols; ++c0) {
    auto emit = [&](const WalkView& w) {
      if (!is_canonical(w.cs, w.rs, g)) return;
      int q = rotation_stabilizer(w.cs, w.rs, g);
      if (MODE == Mode::lifted && H.z % q != 0) return;
      CycleRecord rec;
      rec.g = g;
      for (int k = 0; k < g; ++k) {
        rec.row[k] = w.rs[k];
        rec.col[k] = w.cs[k];
        rec.base_plus[k] = (w.rs[k] % f.fr) * f.fc + (w.cs[k] % f.fc);
        rec.base_minus[k] = (w.rs[k] % f.fr) * f.fc + (w.cs[(k + 1) % g] % f.fc);
      }
      rec.lifting_sum = w.lift;
      rec.span = walk_span(w, f.rep_cols);
      rec.lift_count = MODE == Mode::lifted ? H.z / q : 1;
      buckets[c0].push_back(rec);
    };
    walks_from_anchor<MODE>(adj, g, H.z, c0, /*prune=*/true, emit);
  }

  std::vector<CycleRecord> out;
  for (auto& b : buckets) out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

std::vector<CycleRecord> enumerate_lifted_cycles(const SparseQcMatrix& H, int g) {
  if (H.z < 2) throw std::invalid_argument("circulant size must be >= 2");
  return enumerate_impl<Mode::lifted>(H, g);
}

std::vector<CycleRecord> enumerate_protograph_cycles(const SparseQcMatrix& H, int g) {
  return enumerate_impl<Mode::proto_simple>(H, g);
}

long long count_cycle_candidates(const SparseQcMatrix& H, int g) {
  require_supported_g(g);
  Adj adj = make_adj(H);
  long long classes = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : classes) num_threads(worker_count())
  for (int c0 = 0; c0 < H.block_cols; ++c0) {
    long long local = 0;
    auto emit = [&](const WalkView& w) {
      if (is_canonical(w.cs, w.rs, g)) ++local;
    };
    walks_from_anchor<Mode::candidates>(adj, g, H.z, c0, /*prune=*/true, emit);
    classes += local;
  }
  return classes;
}

CycleCensus count_md_census(const PartitioningMatrix& K, const LiftingMatrix& L,
                            const RelocationMatrix& R, const CodeParams& p, int g) {
  validate_relocation(R, p);
  SparseQcMatrix sc = build_sc_matrix(K, L, p);
  CycleCensus c = census_parallel(sc, g, &R.m, p.copies);
  c.total *= p.copies;
  for (auto& v : c.per_span) v *= p.copies;
  for (auto& v : c.per_circulant) v *= p.copies;
  return c;
}

long long count_md_cycles(const PartitioningMatrix& K, const LiftingMatrix& L,
                          const RelocationMatrix& R, const CodeParams& p, int g) {
  return count_md_census(K, L, R, p, g).total;
}

long long brute_force_cycle_count(const SparseQcMatrix& H, int g) {
  require_supported_g(g);
  if (H.expanded_cols() > 2048)
    throw std::invalid_argument("matrix too large for the bit-level oracle");
  const int z = H.z;
  const int nchk = H.block_rows * z;
  const int nvar = H.block_cols * z;
  const int n = nchk + nvar;
  std::vector<std::vector<int>> adj(n);
  for (const auto& b : H.blocks) {
    for (int a = 0; a < z; ++a) {
      int chk = b.row * z + a;
      int var = nchk + b.col * z + ((a - b.power) % z + z) % z;
      adj[chk].push_back(var);
      adj[var].push_back(chk);
    }
  }

  const int length = 2 * g;
  long long cnt = 0;
  std::vector<char> vis(n, 0);
  // Paths rooted at the smallest node of the cycle; each cycle is found once
  // per direction.
  auto dfs = [&](auto&& self, int s, int u, int depth) -> void {
    for (int v : adj[u]) {
      if (depth == length - 1) {
        if (v == s) ++cnt;
      } else if (v > s && !vis[v]) {
        vis[v] = 1;
        self(self, s, v, depth + 1);
        vis[v] = 0;
      }
    }
  };
  for (int s = 0; s < n; ++s) {
    vis[s] = 1;
    dfs(dfs, s, s, 0);
    vis[s] = 0;
  }
  return cnt / 2;
}

long long scale_census_to_length(const CycleCensus& census, int L1, int L2) {
  if (L1 > L2) throw std::invalid_argument("target coupling length must be >= source");
  if (L1 == L2) return census.total;
  long long out = 0;
  for (size_t i = 0; i < census.per_span.size(); ++i) {
    long long nk = census.per_span[i];
    if (nk == 0) continue;
    int k = static_cast<int>(i) + 1;
    if (k >= L1) throw std::invalid_argument("cycle span must be below the source coupling length");
    long long num = nk * (L2 - k + 1);
    if (num % (L1 - k + 1) != 0)
      throw std::logic_error("replica scaling produced a fractional count");
    out += num / (L1 - k + 1);
  }
  return out;
}

}  // namespace mdsc
