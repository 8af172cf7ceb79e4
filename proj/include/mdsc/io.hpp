#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mdsc/code_model.hpp"
#include "mdsc/cycles.hpp"
#include "mdsc/flao.hpp"
#include "mdsc/grade.hpp"

namespace mdsc {

// Plain-text matrix format: first line "<rows> <cols>", then rows of
// space-separated integers. The JSON alternative is
// {"rows": r, "cols": c, "data": [[...]]}; load_matrix dispatches on the
// file content, save_matrix on the extension (.json vs anything else).
IntGrid parse_matrix_text(const std::string& text);
std::string format_matrix_text(const IntGrid& g);
IntGrid parse_matrix_json(const std::string& text);
std::string format_matrix_json(const IntGrid& g);
IntGrid load_matrix(const std::string& path);
void save_matrix(const IntGrid& g, const std::string& path);

// CodeParams as {"gamma":..,"kappa":..,"z":..,"L":..,"m":..,"M":..}.
CodeParams params_from_json(const std::string& text);
std::string params_to_json(const CodeParams& p);

// ProbDistMatrix as {"m":..,"M":..,"row_targets":[..],"coeffs":[[..]]}.
ProbDistMatrix pdist_from_json(const std::string& text);
std::string pdist_to_json(const ProbDistMatrix& P);

std::string census_to_json(const CycleCensus& c);
std::string forecast_to_json(const Forecast& f);
std::string flao_result_to_json(const FlaoResult& r);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// FNV-1a 64-bit content hash, hex encoded; guards the bundled fixtures
// against transcription drift.
std::string fnv1a_hex(const std::string& content);

struct FixtureCase {
  std::string name;
  CodeParams params;
  std::string partitioning;  // file names relative to the fixture dir
  std::string lifting;
  std::string relocation;  // empty for plain SC cases
  std::string pdist;       // bundled distribution, when present
  int cycle_length = 6;
  long long expected = 0;
};

struct FixtureManifest {
  std::string dir;
  std::map<std::string, FixtureCase> cases;

  const FixtureCase& at(const std::string& name) const;
  IntGrid load(const std::string& file) const;
};

FixtureManifest load_manifest(const std::string& fixture_dir);

// Recomputes every hash in checksums.txt; returns the mismatched file names.
std::vector<std::string> verify_fixture_checksums(const std::string& fixture_dir);

}  // namespace mdsc
