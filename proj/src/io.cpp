#include "mdsc/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mdsc {

using nlohmann::json;

IntGrid parse_matrix_text(const std::string& text) {
  std::istringstream in(text);
  int rows, cols;
  if (!(in >> rows >> cols) || rows <= 0 || cols <= 0)
    throw std::invalid_argument("matrix header must be '<rows> <cols>'");
  IntGrid g(rows, cols);
  for (auto& v : g.data)
    if (!(in >> v)) throw std::invalid_argument("matrix body shorter than rows*cols");
  int extra;
  if (in >> extra) throw std::invalid_argument("matrix body longer than rows*cols");
  return g;
}

std::string format_matrix_text(const IntGrid& g) {
  std::ostringstream out;
  out << g.rows << ' ' << g.cols << '\n';
  for (int i = 0; i < g.rows; ++i) {
    for (int j = 0; j < g.cols; ++j) out << (j ? " " : "") << g.at(i, j);
    out << '\n';
  }
  return out.str();
}

namespace {
IntGrid grid_from_json(const json& j) {
  IntGrid g(j.at("rows").get<int>(), j.at("cols").get<int>());
  const auto& data = j.at("data");
  if (static_cast<int>(data.size()) != g.rows) throw std::invalid_argument("row count mismatch");
  for (int i = 0; i < g.rows; ++i) {
    if (static_cast<int>(data[i].size()) != g.cols)
      throw std::invalid_argument("column count mismatch");
    for (int jj = 0; jj < g.cols; ++jj) g.at(i, jj) = data[i][jj].get<int>();
  }
  return g;
}
}  // namespace

IntGrid parse_matrix_json(const std::string& text) { return grid_from_json(json::parse(text)); }

std::string format_matrix_json(const IntGrid& g) {
  json rows = json::array();
  for (int i = 0; i < g.rows; ++i) {
    json row = json::array();
    for (int j = 0; j < g.cols; ++j) row.push_back(g.at(i, j));
    rows.push_back(std::move(row));
  }
  return json{{"rows", g.rows}, {"cols", g.cols}, {"data", rows}}.dump(2) + "\n";
}

IntGrid load_matrix(const std::string& path) {
  std::string text = read_file(path);
  size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_matrix_json(text);
  return parse_matrix_text(text);
}

void save_matrix(const IntGrid& g, const std::string& path) {
  bool as_json = path.size() > 5 && path.substr(path.size() - 5) == ".json";
  write_file(path, as_json ? format_matrix_json(g) : format_matrix_text(g));
}

CodeParams params_from_json(const std::string& text) {
  json j = json::parse(text);
  CodeParams p;
  p.gamma = j.at("gamma").get<int>();
  p.kappa = j.at("kappa").get<int>();
  p.z = j.at("z").get<int>();
  p.coupling_len = j.at("L").get<int>();
  p.memory = j.at("m").get<int>();
  p.copies = j.value("M", 1);
  return p;
}

std::string params_to_json(const CodeParams& p) {
  return json{{"gamma", p.gamma}, {"kappa", p.kappa}, {"z", p.z},
              {"L", p.coupling_len}, {"m", p.memory}, {"M", p.copies}}
             .dump(2) +
         "\n";
}

ProbDistMatrix pdist_from_json(const std::string& text) {
  json j = json::parse(text);
  ProbDistMatrix P(j.at("m").get<int>(), j.at("M").get<int>());
  const auto& rt = j.at("row_targets");
  if (static_cast<int>(rt.size()) != P.memory + 1)
    throw std::invalid_argument("row_targets must have m+1 entries");
  for (int i = 0; i <= P.memory; ++i) P.row_targets[i] = rt[i].get<double>();
  const auto& rows = j.at("coeffs");
  if (static_cast<int>(rows.size()) != P.memory + 1)
    throw std::invalid_argument("coeffs must have m+1 rows");
  for (int i = 0; i <= P.memory; ++i) {
    if (static_cast<int>(rows[i].size()) != P.copies)
      throw std::invalid_argument("coeffs rows must have M entries");
    for (int jj = 0; jj < P.copies; ++jj) P.at(i, jj) = rows[i][jj].get<double>();
  }
  return P;
}

std::string pdist_to_json(const ProbDistMatrix& P) {
  json rows = json::array();
  for (int i = 0; i <= P.memory; ++i) {
    json row = json::array();
    for (int j = 0; j < P.copies; ++j) row.push_back(P.at(i, j));
    rows.push_back(std::move(row));
  }
  return json{{"m", P.memory}, {"M", P.copies}, {"row_targets", P.row_targets},
              {"coeffs", rows}}
             .dump(2) +
         "\n";
}

std::string census_to_json(const CycleCensus& c) {
  json circ = json::array();
  for (int i = 0; i < c.base_rows; ++i) {
    json row = json::array();
    for (int j = 0; j < c.base_cols; ++j)
      row.push_back(c.per_circulant[static_cast<size_t>(i) * c.base_cols + j]);
    circ.push_back(std::move(row));
  }
  return json{{"cycle_length", c.cycle_length}, {"total", c.total},
              {"per_span", c.per_span}, {"per_circulant", circ}}
             .dump(2) +
         "\n";
}

std::string forecast_to_json(const Forecast& f) {
  return json{{"objective", to_string(f.objective)}, {"n_candidates", f.n_candidates},
              {"e_cycles", f.e_cycles}, {"e_obj", f.e_obj},
              {"lower", f.lower}, {"upper", f.upper}}
             .dump(2) +
         "\n";
}

std::string flao_result_to_json(const FlaoResult& r) {
  json trace = json::array();
  for (const auto& t : r.trace) {
    trace.push_back(json{{"circulant", {t.base_row, t.base_col}}, {"target", t.target},
                         {"active", t.active}, {"reverted", t.reverted}});
  }
  json reloc = json::array();
  for (int i = 0; i < r.relocation.m.rows; ++i) {
    json row = json::array();
    for (int j = 0; j < r.relocation.m.cols; ++j) row.push_back(r.relocation.m.at(i, j));
    reloc.push_back(std::move(row));
  }
  return json{{"relocation", reloc}, {"md_cycle_count", r.md_cycle_count},
              {"initial_active", r.initial_active}, {"iterations", r.iterations},
              {"seed", r.seed}, {"trace", trace}}
             .dump(2) +
         "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string fnv1a_hex(const std::string& content) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : content) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const FixtureCase& FixtureManifest::at(const std::string& name) const {
  auto it = cases.find(name);
  if (it == cases.end()) throw std::invalid_argument("unknown fixture case: " + name);
  return it->second;
}

IntGrid FixtureManifest::load(const std::string& file) const {
  return load_matrix(dir + "/" + file);
}

FixtureManifest load_manifest(const std::string& fixture_dir) {
  FixtureManifest m;
  m.dir = fixture_dir;
  json j = json::parse(read_file(fixture_dir + "/manifest.json"));
  for (auto& [name, c] : j.at("cases").items()) {
    FixtureCase fc;
    fc.name = name;
    fc.params = params_from_json(c.at("params").dump());
    fc.partitioning = c.at("partitioning").get<std::string>();
    fc.lifting = c.at("lifting").get<std::string>();
    fc.relocation = c.value("relocation", "");
    fc.pdist = c.value("pdist", "");
    fc.cycle_length = c.at("cycle_length").get<int>();
    fc.expected = c.at("expected").get<long long>();
    m.cases[name] = fc;
  }
  return m;
}

std::vector<std::string> verify_fixture_checksums(const std::string& fixture_dir) {
  std::istringstream in(read_file(fixture_dir + "/checksums.txt"));
  std::vector<std::string> bad;
  std::string hash, file;
  while (in >> hash >> file) {
    if (fnv1a_hex(read_file(fixture_dir + "/" + file)) != hash) bad.push_back(file);
  }
  return bad;
}

}  // namespace mdsc
