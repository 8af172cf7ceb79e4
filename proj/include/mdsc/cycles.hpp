#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mdsc/code_model.hpp"

namespace mdsc {

// One simple cycle of length 2g at the block level, stored in canonical
// orientation (lexicographically smallest rotation/reflection of the node
// tuple). Edge pair k of the cycle lies on block-row row[k] and connects
// block-cols col[k] and col[(k+1) % g]; traversal therefore uses edge
// (row[k], col[k]) in the forward role and (row[k], col[(k+1)%g]) in the
// backward role. base_plus/base_minus hold those edges folded to the base
// grid, encoded as i*base_cols + j.
//
// lift_count is the number of expanded Tanner-graph cycles this block-level
// class represents (z, or z/2 for the doubly-traversed 4-cycle shape).
struct CycleRecord {
  int g = 0;
  std::array<int, 4> row{};
  std::array<int, 4> col{};
  std::array<int, 4> base_plus{};
  std::array<int, 4> base_minus{};
  int lifting_sum = 0;  // sum_k [f(row k, col k) - f(row k, col k+1)], unreduced
  int span = 1;         // replicas covered by the variable-node columns
  long long lift_count = 1;
};

// Alternating sum of a gamma x kappa grid over the cycle footprint:
// sum_k [G(base_plus k) - G(base_minus k)]. Evaluating the partitioning,
// relocation or lifting matrix here yields the respective cycle condition sum.
long long footprint_alt_sum(const CycleRecord& r, const IntGrid& grid);

struct CycleCensus {
  int cycle_length = 0;  // 2g
  long long total = 0;
  std::vector<long long> per_span;     // per_span[k-1] = cycles spanning k replicas
  std::vector<long long> per_circulant;  // base_rows x base_cols, row-major
  int base_rows = 0;
  int base_cols = 0;
};

// Number of simple cycles of length 2g in the expanded Tanner graph, computed
// without expanding: protograph closed walks are enumerated (including the
// degenerate shapes that revisit block nodes), the alternating power condition
// is applied mod z, and each surviving walk class contributes its lift count.
// per_circulant tallies the g forward-role edges of each cycle's canonical
// orientation, so its entries sum to g * total. OpenMP-parallel over anchor
// columns; the result is independent of the worker count.
CycleCensus count_lifted_cycles(const SparseQcMatrix& H, int g);

// Straightforward single-threaded reference: counts every rooted directed
// walk and divides by the orbit size. Kept for testing and benchmarking the
// parallel kernel against.
CycleCensus count_lifted_cycles_serial(const SparseQcMatrix& H, int g);

// The surviving walk classes themselves, in deterministic order (sorted by
// anchor column). This is the working set of the finite-length optimizer.
std::vector<CycleRecord> enumerate_lifted_cycles(const SparseQcMatrix& H, int g);

// Simple cycles of the block-level bipartite graph itself (powers ignored,
// all block nodes distinct), one record per cycle in canonical form.
std::vector<CycleRecord> enumerate_protograph_cycles(const SparseQcMatrix& H, int g);

// Closed-walk classes of length 2g with only the non-backtracking constraint:
// the cycle *candidates* a protograph offers before any lifting condition is
// applied. Used to cross-check the candidate-count formulas.
long long count_cycle_candidates(const SparseQcMatrix& H, int g);

// Cycles of length 2g in the MD Tanner graph obtained by relocating H_SC(K,L)
// according to R and coupling M copies: enumerates the lifted cycles of the
// SC matrix, keeps those whose relocation alternating sum is 0 mod M, and
// multiplies by M (the block-circulant copies replicate every cycle exactly
// M times).
long long count_md_cycles(const PartitioningMatrix& K, const LiftingMatrix& L,
                          const RelocationMatrix& R, const CodeParams& p, int g);

// Full census variant of count_md_cycles: the census of the surviving (active)
// SC cycles scaled by M, i.e. spans/footprints are reported at SC replica
// granularity.
CycleCensus count_md_census(const PartitioningMatrix& K, const LiftingMatrix& L,
                            const RelocationMatrix& R, const CodeParams& p, int g);

// Bit-level oracle: expands H and counts simple cycles of length 2g by
// exhaustive DFS. Guarded to ~2000 expanded columns.
long long brute_force_cycle_count(const SparseQcMatrix& H, int g);

// Remark-style replica scaling: given a census taken at coupling length L1
// with populated per_span, the total at coupling length L2 is
// sum_k N_k * (L2-k+1)/(L1-k+1), each term dividing exactly.
long long scale_census_to_length(const CycleCensus& census, int L1, int L2);

// Worker cap honoured by the parallel kernels: min(omp threads, MDSC_THREADS).
int worker_count();

}  // namespace mdsc
