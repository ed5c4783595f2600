#include "isograph/graph_io.hpp"

#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

namespace isograph {

namespace {

Vertex to_slot(long long id, std::size_t n, std::size_t line_no) {
  if (id < 1 || static_cast<std::size_t>(id) > n)
    throw Error(ErrorKind::InvalidInput,
                "line " + std::to_string(line_no) + ": vertex " + std::to_string(id) +
                    " outside 1.." + std::to_string(n));
  return static_cast<Vertex>(id - 1);
}

}  // namespace

WeightedDigraph read_edge_list(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  WeightedDigraph g;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;

    if (!have_header) {
      long long n = -1;
      if (first != "N" || !(fields >> n) || n < 0)
        throw Error(ErrorKind::InvalidInput, "expected header `N <count>` on line " +
                                                 std::to_string(line_no));
      g = WeightedDigraph(static_cast<std::size_t>(n));
      have_header = true;
      continue;
    }

    long long i = 0;
    long long j = 0;
    double re = 0.0;
    double im = 0.0;
    std::istringstream edge(line);
    if (!(edge >> i >> j >> re))
      throw Error(ErrorKind::InvalidInput, "malformed edge on line " + std::to_string(line_no));
    if (!(edge >> im)) im = 0.0;
    const Complex w{re, im};
    if (w == Complex{})
      throw Error(ErrorKind::InvalidInput, "zero weight on line " + std::to_string(line_no));
    g.set_weight(to_slot(i, g.slot_count(), line_no), to_slot(j, g.slot_count(), line_no), w);
  }
  if (!have_header) throw Error(ErrorKind::InvalidInput, "missing `N <count>` header");
  return g;
}

void write_edge_list(std::ostream& out, const WeightedDigraph& g) {
  out << "N " << g.slot_count() << '\n';
  out << std::setprecision(17);
  for (Vertex i = 0; i < g.slot_count(); ++i) {
    if (!g.is_live(i)) continue;
    for (const auto& [j, w] : g.out_edges(i)) {
      out << i + 1 << ' ' << j + 1 << ' ' << w.real();
      if (w.imag() != 0.0) out << ' ' << w.imag();
      out << '\n';
    }
  }
}

WeightedDigraph graph_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("edges"))
    throw Error(ErrorKind::InvalidInput, "graph JSON needs \"n\" and \"edges\"");
  const auto n = j.at("n").get<long long>();
  if (n < 0) throw Error(ErrorKind::InvalidInput, "negative vertex count");
  WeightedDigraph g(static_cast<std::size_t>(n));
  std::size_t k = 0;
  for (const auto& e : j.at("edges")) {
    ++k;
    if (!e.is_array() || e.size() < 3 || e.size() > 4)
      throw Error(ErrorKind::InvalidInput, "edge " + std::to_string(k) + " must be [i,j,re,im]");
    const Complex w{e[2].get<double>(), e.size() == 4 ? e[3].get<double>() : 0.0};
    if (w == Complex{}) throw Error(ErrorKind::InvalidInput, "zero weight in edge " + std::to_string(k));
    g.set_weight(to_slot(e[0].get<long long>(), g.slot_count(), k),
                 to_slot(e[1].get<long long>(), g.slot_count(), k), w);
  }
  return g;
}

nlohmann::json graph_to_json(const WeightedDigraph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (Vertex i = 0; i < g.slot_count(); ++i) {
    if (!g.is_live(i)) continue;
    for (const auto& [j, w] : g.out_edges(i))
      edges.push_back({i + 1, j + 1, w.real(), w.imag()});
  }
  return {{"n", g.slot_count()}, {"edges", std::move(edges)}};
}

WeightedDigraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot open " + path.string());
  char c = 0;
  while (in.get(c) && std::isspace(static_cast<unsigned char>(c))) {
  }
  in.unget();
  if (c == '{') {
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::InvalidInput, path.string() + ": " + e.what());
    }
    return graph_from_json(j);
  }
  return read_edge_list(in);
}

void save_graph(const std::filesystem::path& path, const WeightedDigraph& g) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidInput, "cannot write " + path.string());
  if (path.extension() == ".json")
    out << graph_to_json(g).dump(1) << '\n';
  else
    write_edge_list(out, g);
}

nlohmann::json complex_to_json(Complex z) { return {z.real(), z.imag()}; }

Complex complex_from_json(const nlohmann::json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  throw Error(ErrorKind::InvalidInput, "complex value must be a number or [re, im]");
}

}  // namespace isograph
