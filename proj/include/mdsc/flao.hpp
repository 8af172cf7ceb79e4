#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdsc/code_model.hpp"
#include "mdsc/cycles.hpp"
#include "mdsc/grade.hpp"

namespace mdsc {

struct FlaoConfig {
  int cycle_length = 6;        // 6 or 8
  int relocation_bound = 0;    // max greedy steps; 0 = default 10*gamma*kappa
  uint64_t seed = 1;
  double density_cap = -1.0;   // optional hard MD-density stop, percent; <0 = off

  void validate() const;
};

struct FlaoTraceEntry {
  int base_row = 0;
  int base_col = 0;
  int target = 0;         // auxiliary index the circulant was moved to
  long long active = 0;   // full-list active count after the move
  bool reverted = false;  // final move undone because it increased the count
};

struct FlaoResult {
  RelocationMatrix relocation;
  long long md_cycle_count = 0;  // M * final active count
  long long initial_active = 0;  // active count under the initial relocation
  long long iterations = 0;
  uint64_t seed = 0;
  std::vector<FlaoTraceEntry> trace;
};

// Integer relocation counts nearest to gamma*kappa*P with row sums pinned to
// the component census of K, then a seeded uniform draw of which circulants
// of each component receive each auxiliary index.
RelocationMatrix initial_relocation(const ProbDistMatrix& P, const PartitioningMatrix& K,
                                    const CodeParams& p, uint64_t seed);

// Greedy finite-length optimizer: enumerate the lifted cycles of H_SC once,
// prune to those with two circulants in the middle replica, then repeatedly
// relocate the most implicated circulant to the auxiliary index deactivating
// the most pruned cycles, recounting on the full list, until no improvement,
// the relocation bound, or the density cap stops it. Seeded random tie-breaks.
FlaoResult fl_ao(const PartitioningMatrix& K, const LiftingMatrix& L, const CodeParams& p,
                 const ProbDistMatrix& P, const FlaoConfig& cfg);

struct VerifyReport {
  std::string name;
  long long expected = 0;
  long long actual = 0;
  bool pass = false;
};

// Recounts the MD cycles of a finished design and compares with an expected
// census value.
VerifyReport verify_design(const PartitioningMatrix& K, const LiftingMatrix& L,
                           const RelocationMatrix& R, const CodeParams& p, int cycle_length,
                           long long expected, const std::string& name = "");

}  // namespace mdsc
