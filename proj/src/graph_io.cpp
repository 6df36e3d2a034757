#include "qgraph/graph_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "qgraph/errors.hpp"

namespace qgraph {
namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : line) {
    if (c == '#') break;
    if (c == ' ' || c == '\t' || c == '\r') {
      if (!cur.empty()) tokens.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

double parse_number(const std::string& tok, int line_no) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw InputError("line " + std::to_string(line_no) + ": expected a number, got '" + tok + "'");
  }
  if (pos != tok.size()) {
    throw InputError("line " + std::to_string(line_no) + ": trailing characters in number '" + tok + "'");
  }
  return v;
}

Potential parse_potential(const std::vector<std::string>& toks, std::size_t at, int line_no) {
  if (at >= toks.size()) throw InputError("line " + std::to_string(line_no) + ": missing potential spec");
  const std::string& kind = toks[at];
  if (kind == "zero") {
    if (at + 1 != toks.size()) {
      throw InputError("line " + std::to_string(line_no) + ": trailing tokens after 'zero'");
    }
    return Potential::zero();
  }
  if (kind == "const") {
    if (at + 2 != toks.size()) {
      throw InputError("line " + std::to_string(line_no) + ": 'const' takes exactly one value");
    }
    return Potential::constant(parse_number(toks[at + 1], line_no));
  }
  if (kind == "pw") {
    std::vector<double> breaks, values;
    std::size_t i = at + 1;
    if (i == toks.size() || (toks.size() - i) % 2 != 0) {
      throw InputError("line " + std::to_string(line_no) + ": 'pw' takes breakpoint/value pairs");
    }
    for (; i < toks.size(); i += 2) {
      breaks.push_back(parse_number(toks[i], line_no));
      values.push_back(parse_number(toks[i + 1], line_no));
    }
    try {
      return Potential::piecewise_const(std::move(breaks), std::move(values));
    } catch (const InputError& e) {
      throw InputError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (kind == "grid") {
    if (toks.size() < at + 3) {
      throw InputError("line " + std::to_string(line_no) + ": 'grid' takes a step and samples");
    }
    const double h = parse_number(toks[at + 1], line_no);
    std::vector<double> values;
    for (std::size_t i = at + 2; i < toks.size(); ++i) values.push_back(parse_number(toks[i], line_no));
    if (values.empty()) {
      throw InputError("line " + std::to_string(line_no) + ": 'grid' needs at least one sample");
    }
    try {
      return Potential::samples(h, std::move(values));
    } catch (const InputError& e) {
      throw InputError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  throw InputError("line " + std::to_string(line_no) + ": unknown potential kind '" + kind + "'");
}

}  // namespace

MetricGraph parse_graph_file(std::string_view text) {
  GraphBuilder b;
  std::vector<std::string> vertex_ids;
  int line_no = 0;
  std::size_t pos = 0;
  std::optional<std::string> root_id;
  int root_line = 0;

  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto toks = tokenize(line);
    if (toks.empty()) continue;
    const std::string& directive = toks[0];
    try {
      if (directive == "vertex") {
        if (toks.size() != 3) throw InputError("'vertex' takes an id and a kind");
        VertexKind kind;
        if (toks[2] == "internal") {
          kind = VertexKind::Internal;
        } else if (toks[2] == "boundary_D") {
          kind = VertexKind::BoundaryD;
        } else if (toks[2] == "boundary_K") {
          kind = VertexKind::BoundaryK;
        } else {
          throw InputError("unknown vertex kind '" + toks[2] + "'");
        }
        b.add_vertex(toks[1], kind);
        vertex_ids.push_back(toks[1]);
      } else if (directive == "edge") {
        if (toks.size() < 7 || toks[4] != "length" || toks[6] != "potential") {
          throw InputError("'edge' form: edge <id> <u> <v> length <float> potential <spec>");
        }
        auto vid = [&](const std::string& id) {
          for (std::size_t i = 0; i < vertex_ids.size(); ++i) {
            if (vertex_ids[i] == id) return static_cast<int>(i);
          }
          throw InputError("unknown vertex id '" + id + "'");
        };
        const double len = parse_number(toks[5], line_no);
        b.add_edge(toks[1], vid(toks[2]), vid(toks[3]), len, parse_potential(toks, 7, line_no));
      } else if (directive == "ray") {
        if (toks.size() < 6 || toks[3] != "support" || toks[5] != "potential") {
          throw InputError("'ray' form: ray <id> <v> support <float> potential <spec>");
        }
        int base = -1;
        for (std::size_t i = 0; i < vertex_ids.size(); ++i) {
          if (vertex_ids[i] == toks[2]) base = static_cast<int>(i);
        }
        if (base < 0) throw InputError("unknown vertex id '" + toks[2] + "'");
        const double support = parse_number(toks[4], line_no);
        b.add_ray(toks[1], base, support, parse_potential(toks, 6, line_no));
      } else if (directive == "root") {
        if (toks.size() != 2) throw InputError("'root' takes a vertex id");
        root_id = toks[1];
        root_line = line_no;
      } else {
        throw InputError("unknown directive '" + directive + "'");
      }
    } catch (const InputError& e) {
      const std::string what = e.what();
      if (what.rfind("line ", 0) == 0) throw;
      throw InputError("line " + std::to_string(line_no) + ": " + what);
    }
  }
  if (root_id) {
    int idx = -1;
    for (std::size_t i = 0; i < vertex_ids.size(); ++i) {
      if (vertex_ids[i] == *root_id) idx = static_cast<int>(i);
    }
    if (idx < 0) {
      throw InputError("line " + std::to_string(root_line) + ": unknown root vertex '" + *root_id + "'");
    }
    b.set_root(idx);
  }
  return b.build();
}

MetricGraph load_graph_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open graph file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_graph_file(ss.str());
}

std::string emit_graph_file(const MetricGraph& g) {
  std::string out;
  for (const auto& v : g.vertices()) {
    out += "vertex " + v.id + " " + std::string(to_string(v.kind)) + "\n";
  }
  for (const auto& e : g.edges()) {
    out += "edge " + e.id + " " + g.vertex(e.initial).id + " " + g.vertex(e.terminal).id +
           " length " + format_double(e.length) + " potential " + e.q.format_spec() + "\n";
  }
  for (const auto& r : g.rays()) {
    out += "ray " + r.id + " " + g.vertex(r.base).id + " support " + format_double(r.support) +
           " potential " + r.q.format_spec() + "\n";
  }
  if (auto root = g.root()) out += "root " + g.vertex(*root).id + "\n";
  return out;
}

MetricGraph apply_potential_file(const MetricGraph& g, std::string_view text) {
  std::vector<Potential> edge_q;
  std::vector<Potential> ray_q;
  std::vector<double> ray_support;
  for (const auto& e : g.edges()) edge_q.push_back(e.q);
  for (const auto& r : g.rays()) {
    ray_q.push_back(r.q);
    ray_support.push_back(r.support);
  }

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto toks = tokenize(line);
    if (toks.empty()) continue;
    if (toks[0] == "edge") {
      if (toks.size() < 4 || toks[2] != "potential") {
        throw InputError("line " + std::to_string(line_no) +
                         ": 'edge' form: edge <id> potential <spec>");
      }
      const int e = g.edge_index(toks[1]);
      if (e < 0) {
        throw InputError("line " + std::to_string(line_no) + ": unknown edge '" + toks[1] + "'");
      }
      edge_q[static_cast<std::size_t>(e)] = parse_potential(toks, 3, line_no);
    } else if (toks[0] == "ray") {
      if (toks.size() < 6 || toks[2] != "support" || toks[4] != "potential") {
        throw InputError("line " + std::to_string(line_no) +
                         ": 'ray' form: ray <id> support <float> potential <spec>");
      }
      const int r = g.ray_index(toks[1]);
      if (r < 0) {
        throw InputError("line " + std::to_string(line_no) + ": unknown ray '" + toks[1] + "'");
      }
      ray_support[static_cast<std::size_t>(r)] = parse_number(toks[3], line_no);
      ray_q[static_cast<std::size_t>(r)] = parse_potential(toks, 5, line_no);
      if (!ray_q[static_cast<std::size_t>(r)].zero_beyond(ray_support[static_cast<std::size_t>(r)])) {
        throw InputError("line " + std::to_string(line_no) + ": ray '" + toks[1] +
                         "': potential does not vanish beyond its support radius");
      }
    } else {
      throw InputError("line " + std::to_string(line_no) + ": unknown directive '" + toks[0] + "'");
    }
  }
  return g.with_potentials(std::move(edge_q), std::move(ray_q), std::move(ray_support));
}

MetricGraph apply_potential_path(const MetricGraph& g, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open potential file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return apply_potential_file(g, ss.str());
}

}  // namespace qgraph
