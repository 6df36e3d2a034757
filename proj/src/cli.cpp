#include "qgraph/cli.hpp"

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "qgraph/aedges.hpp"
#include "qgraph/characteristic.hpp"
#include "qgraph/errors.hpp"
#include "qgraph/expsum.hpp"
#include "qgraph/graph_io.hpp"
#include "qgraph/json_writer.hpp"
#include "qgraph/kernels.hpp"
#include "qgraph/propagation.hpp"
#include "qgraph/scattering.hpp"
#include "qgraph/spectrum.hpp"
#include "qgraph/surgery.hpp"

namespace qgraph {
namespace {

struct CliConfig {
  std::string command;
  std::string graph_path;
  std::string lambda_text;
  std::string side = "plus";
  std::string vertex;
  std::string ray;
  std::string edge;
  std::string grid_text;
  std::string format = "json";
  std::string op;
  std::string part;
  std::string cycle_edge;
  std::string q_path, qtilde_path;
  std::string exec = "default";
  double tol = 0.0;
  int seed = 0;
};

struct GridSpecArg {
  double lo = 0.0;
  double hi = 1.0;
  int n = 0;
  bool set = false;
};

double parse_num(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw InputError("bad " + what + ": '" + s + "'");
  }
  if (pos != s.size()) throw InputError("bad " + what + ": '" + s + "'");
  return v;
}

GridSpecArg parse_grid(const std::string& text) {
  GridSpecArg g;
  if (text.empty()) return g;
  const auto c1 = text.find(',');
  const auto c2 = text.find(',', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos) {
    throw InputError("--grid wants a,b,n");
  }
  g.lo = parse_num(text.substr(0, c1), "grid bound");
  g.hi = parse_num(text.substr(c1 + 1, c2 - c1 - 1), "grid bound");
  g.n = static_cast<int>(parse_num(text.substr(c2 + 1), "grid count"));
  if (g.n <= 0 || !(g.hi > g.lo)) throw InputError("--grid bounds must be ordered, count positive");
  g.set = true;
  return g;
}

SpectralPoint parse_point(const CliConfig& cfg) {
  if (cfg.lambda_text.empty()) throw InputError("--lambda RE,IM is required");
  const auto comma = cfg.lambda_text.find(',');
  if (comma == std::string::npos) throw InputError("--lambda wants RE,IM");
  const double re = parse_num(cfg.lambda_text.substr(0, comma), "lambda");
  const double im = parse_num(cfg.lambda_text.substr(comma + 1), "lambda");
  if (im == 0.0 && re >= 0.0) {
    if (cfg.side != "plus" && cfg.side != "minus") throw InputError("--side must be plus or minus");
    return SpectralPoint::from_lambda(re, cfg.side == "plus" ? Side::PlusI0 : Side::MinusI0);
  }
  return SpectralPoint::from_lambda({re, im});
}

int require_vertex(const MetricGraph& g, const std::string& id) {
  const int v = g.vertex_index(id);
  if (v < 0) throw InputError("unknown vertex '" + id + "'");
  return v;
}

int require_ray(const MetricGraph& g, const std::string& id) {
  const int r = g.ray_index(id);
  if (r < 0) throw InputError("unknown ray '" + id + "'");
  return r;
}

void write_spectral_diag(JsonWriter& w, const SpectralPoint& sp, int seed) {
  w.key("diagnostics").begin_object();
  w.key("lambda").value(sp.lambda);
  w.key("rho").value(sp.rho);
  w.key("side").value(sp.side == Side::PlusI0   ? "plus"
                      : sp.side == Side::MinusI0 ? "minus"
                                                  : "none");
  w.key("seed").value(seed);
  w.end_object();
}

void emit_scatter(JsonWriter& w, const ScatteringData& data) {
  w.begin_object();
  w.key("ray").value(data.ray_id);
  w.key("reflection").begin_array();
  for (const auto& s : data.reflection) {
    w.begin_object();
    w.key("rho").value(s.rho);
    w.key("re").value(s.s.real());
    w.key("im").value(s.s.imag());
    w.key("quality").value(s.quality == ReflectionQuality::Ok ? "ok" : "near_singular");
    w.end_object();
  }
  w.end_array();
  w.key("poles").begin_array();
  for (const auto& p : data.poles) {
    w.begin_object();
    w.key("kappa").value(p.kappa);
    w.key("alpha").value(p.alpha);
    w.end_object();
  }
  w.end_array();
  w.end_object();
}

void emit_m_samples(JsonWriter& w, const MSamples& m, std::string_view key_name) {
  w.begin_object();
  w.key(key_name).value(m.label);
  w.key("samples").begin_array();
  for (std::size_t i = 0; i < m.lambdas.size(); ++i) {
    w.begin_object();
    w.key("lambda").value(m.lambdas[i]);
    w.key("value").value(m.values[i]);
    w.key("pole").value(static_cast<bool>(m.poles[i]));
    w.end_object();
  }
  w.end_array();
  w.end_object();
}

int dispatch(const CliConfig& cfg, std::ostream& out) {
  if (cfg.exec == "serial") set_default_exec(Exec::Serial);
  if (cfg.exec == "parallel") set_default_exec(Exec::Parallel);

  const GridSpecArg grid = parse_grid(cfg.grid_text);

  if (cfg.command == "delta") {
    const MetricGraph g = load_graph_file(cfg.graph_path);
    if (cfg.format == "csv") {
      GridSpecArg gr = grid;
      if (!gr.set) gr = {0.25, 100.0, 400, true};
      out << "lambda,re,im\n";
      std::vector<SpectralPoint> pts;
      for (int i = 0; i < gr.n; ++i) {
        const double lam = gr.lo + (gr.hi - gr.lo) * static_cast<double>(i) / (gr.n - 1);
        pts.push_back(lam >= 0.0 ? SpectralPoint::from_lambda(
                                       lam, cfg.side == "minus" ? Side::MinusI0 : Side::PlusI0)
                                 : SpectralPoint::from_lambda(Complex(lam, 0.0)));
      }
      const auto vals = delta_grid(g, pts, default_exec());
      for (std::size_t i = 0; i < vals.size(); ++i) {
        out << format_number(pts[i].lambda.real()) << "," << format_number(vals[i].real()) << ","
            << format_number(vals[i].imag()) << "\n";
      }
      return 0;
    }
    const SpectralPoint sp = parse_point(cfg);
    const Complex value = delta(g, sp);
    JsonWriter w;
    w.begin_object();
    w.key("schema").value("qgraph/1");
    w.key("command").value("delta");
    w.key("value").value(value);
    write_spectral_diag(w, sp, cfg.seed);
    w.end_object();
    out << w.take() << "\n";
    return 0;
  }

  if (cfg.command == "spectrum") {
    const MetricGraph g = load_graph_file(cfg.graph_path);
    SpectrumOptions opts;
    if (grid.set) opts.grid_points = grid.n;
    if (cfg.tol > 0.0) opts.zero_rel_tol = cfg.tol;
    const auto neg = negative_spectrum(g, opts);
    const auto pos = positive_singular_set(g, opts);
    if (cfg.format == "csv") {
      out << "lambda,multiplicity\n";
      for (const auto& ev : neg.negative) {
        out << format_number(ev.lambda) << "," << ev.multiplicity << "\n";
      }
      return 0;
    }
    JsonWriter w;
    w.begin_object();
    w.key("schema").value("qgraph/1");
    w.key("command").value("spectrum");
    w.key("eigenvalues").begin_array();
    for (const auto& ev : neg.negative) {
      w.begin_object();
      w.key("lambda").value(ev.lambda);
      w.key("multiplicity").value(ev.multiplicity);
      w.end_object();
    }
    w.end_array();
    w.key("n_minus").value(neg.n_minus);
    w.key("positive_singular").begin_array();
    for (const auto& c : pos.positive_singular) {
      w.begin_object();
      w.key("lambda").value(c.lambda);
      w.key("abs_delta_graph").value(c.abs_delta_graph);
      w.key("abs_delta_compact").value(c.abs_delta_compact);
      w.key("local_scale").value(c.local_scale);
      w.key("below_threshold").value(c.below_threshold);
      w.end_object();
    }
    w.end_array();
    w.key("diagnostics").begin_object();
    w.key("grid_points").value(neg.diagnostics.grid_points);
    w.key("refinement_stable").value(neg.diagnostics.refinement_stable);
    w.key("bisections").value(neg.diagnostics.bisections);
    w.key("lambda_min").value(neg.diagnostics.lambda_min);
    w.key("seed").value(cfg.seed);
    w.end_object();
    w.end_object();
    out << w.take() << "\n";
    return 0;
  }

  if (cfg.command == "weyl") {
    const MetricGraph g = load_graph_file(cfg.graph_path);
    if (cfg.vertex.empty()) throw InputError("--vertex is required");
    const int v = require_vertex(g, cfg.vertex);
    const SpectralPoint sp = parse_point(cfg);
    const WeylValue m = weyl_function(g, v, sp);
    JsonWriter w;
    w.begin_object();
    w.key("schema").value("qgraph/1");
    w.key("command").value("weyl");
    w.key("value").value(m.value);
    w.key("ratio").value(m.ratio);
    w.key("cross_check_rel").value(m.cross_check_rel);
    w.key("pole").value(m.pole);
    write_spectral_diag(w, sp, cfg.seed);
    w.end_object();
    out << w.take() << "\n";
    return 0;
  }

  if (cfg.command == "bcoeffs") {
    const MetricGraph g = load_graph_file(cfg.graph_path);
    const auto fit = exp_sum_coefficients(g);
    JsonWriter w;
    w.begin_object();
    w.key("schema").value("qgraph/1");
    w.key("command").value("bcoeffs");
    w.key("n_factor").value(fit.n_factor);
    w.key("total_length").value(fit.total_length);
    w.key("coefficients").begin_object();
    for (std::size_t i = 0; i < fit.lengths.size(); ++i) {
      w.key(format_number(fit.lengths[i])).value(fit.coeffs[i]);
    }
    w.end_object();
    w.key("diagnostics").begin_object();
    w.key("fit_residual").value(fit.fit_residual);
    w.key("condition").value(fit.condition);
    w.key("max_imag").value(fit.max_imag);
    w.key("seed").value(cfg.seed);
    w.end_object();
    w.end_object();
    out << w.take() << "\n";
    return 0;
  }

  if (cfg.command == "scatter") {
    const MetricGraph g = load_graph_file(cfg.graph_path);
    if (cfg.ray.empty()) throw InputError("--ray is required");
    const int r = require_ray(g, cfg.ray);
    GridSpec spec;
    if (grid.set) spec = {grid.lo, grid.hi, grid.n};
    const auto data = scattering_data(g, r, spec);
    if (cfg.format == "csv") {
      out << "rho,re,im,quality\n";
      for (const auto& s : data.reflection) {
        out << format_number(s.rho) << "," << format_number(s.s.real()) << ","
            << format_number(s.s.imag()) << ","
            << (s.quality == ReflectionQuality::Ok ? "ok" : "near_singular") << "\n";
      }
      return 0;
    }
    JsonWriter w;
    w.begin_object();
    w.key("schema").value("qgraph/1");
    w.key("command").value("scatter");
    w.key("data");
    emit_scatter(w, data);
    w.key("diagnostics").begin_object();
    w.key("seed").value(cfg.seed);
    w.end_object();
    w.end_object();
    out << w.take() << "\n";
    return 0;
  }

  if (cfg.command == "fulldata") {
    const MetricGraph g = load_graph_file(cfg.graph_path);
    DataGrids grids = DataGrids::defaults();
    if (grid.set) grids.rho = {grid.lo, grid.hi, grid.n};
    const auto data = full_data(g, grids);
    JsonWriter w;
    w.begin_object();
    w.key("schema").value("qgraph/1");
    w.key("command").value("fulldata");
    w.key("rays").begin_array();
    for (const auto& jr : data.rays) emit_scatter(w, jr);
    w.end_array();
    w.key("boundary_m").begin_array();
    for (const auto& m : data.boundary_m) emit_m_samples(w, m, "vertex");
    w.end_array();
    w.key("cycle_m").begin_array();
    for (const auto& m : data.cycle_m) emit_m_samples(w, m, "vertex");
    w.end_array();
    w.key("diagnostics").begin_object();
    w.key("seed").value(cfg.seed);
    w.end_object();
    w.end_object();
    out << w.take() << "\n";
    return 0;
  }

  if (cfg.command == "schedule") {
    const MetricGraph g = load_graph_file(cfg.graph_path);
    const auto steps = peel_schedule(g);
    JsonWriter w;
    w.begin_object();
    w.key("schema").value("qgraph/1");
    w.key("command").value("schedule");
    w.key("steps").begin_array();
    for (const auto& s : steps) {
      w.begin_object();
      w.key("mu").value(s.mu);
      w.key("problem").value(to_string(s.problem));
      w.key("a_edge").value(s.a_edge_label);
      w.key("input").value(s.input_datum);
      w.key("output").value(s.output_claim);
      w.end_object();
    }
    w.end_array();
    w.end_object();
    out << w.take() << "\n";
    return 0;
  }

  if (cfg.command == "probe") {
    const MetricGraph base = load_graph_file(cfg.graph_path);
    if (cfg.q_path.empty() || cfg.qtilde_path.empty()) {
      throw InputError("--q and --qtilde potential files are required");
    }
    const MetricGraph ga = apply_potential_path(base, cfg.q_path);
    const MetricGraph gb = apply_potential_path(base, cfg.qtilde_path);
    ProbeReport report =
        uniqueness_probe(ga, gb, ProbeGrids::defaults(), 1e-8, cfg.tol > 0.0 ? cfg.tol : 1e-3);
    JsonWriter w;
    w.begin_object();
    w.key("schema").value("qgraph/1");
    w.key("command").value("probe");
    w.key("steps").begin_array();
    for (const auto& s : report.steps) {
      w.begin_object();
      w.key("mu").value(s.step.mu);
      w.key("problem").value(to_string(s.step.problem));
      w.key("a_edge").value(s.step.a_edge_label);
      w.key("residual").value(s.residual);
      w.key("verdict").value(s.verdict == StepVerdict::Match        ? "match"
                             : s.verdict == StepVerdict::Mismatch   ? "mismatch"
                                                                    : "inconclusive");
      w.end_object();
    }
    w.end_array();
    w.key("first_mismatch");
    if (report.first_mismatch) {
      w.value(*report.first_mismatch);
    } else {
      w.value("none");
    }
    w.end_object();
    out << w.take() << "\n";
    return 0;
  }

  if (cfg.command == "surgery") {
    const MetricGraph g = load_graph_file(cfg.graph_path);
    MetricGraph result;
    if (cfg.op == "split") {
      if (cfg.vertex.empty()) throw InputError("surgery split needs --vertex");
      result = split_vertex(g, require_vertex(g, cfg.vertex)).graph;
    } else if (cfg.op == "cut-keep" || cfg.op == "cut-dirichlet") {
      if (cfg.part.empty()) throw InputError("surgery cut needs --part id[,id...]");
      std::vector<EdgeRef> part;
      std::size_t pos = 0;
      while (pos <= cfg.part.size()) {
        const auto comma = cfg.part.find(',', pos);
        const std::string id =
            cfg.part.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        pos = comma == std::string::npos ? cfg.part.size() + 1 : comma + 1;
        if (id.empty()) continue;
        const int e = g.edge_index(id);
        if (e >= 0) {
          part.push_back({false, e});
        } else {
          part.push_back({true, require_ray(g, id)});
        }
      }
      result = (cfg.op == "cut-keep") ? cut_keep(g, part) : cut_dirichlet(g, part);
    } else if (cfg.op == "unroll") {
      if (cfg.cycle_edge.empty()) throw InputError("surgery unroll needs --cycle <edge-id>");
      const int e = g.edge_index(cfg.cycle_edge);
      if (e < 0) throw InputError("unknown edge '" + cfg.cycle_edge + "'");
      const auto set = compute_orders(g);
      const int idx = a_edge_of(set.a_edges, {false, e});
      if (idx < 0 || set.a_edges[static_cast<std::size_t>(idx)].kind != AEdge::Kind::Cycle) {
        throw InputError("edge '" + cfg.cycle_edge + "' is not on a cycle");
      }
      result = unroll_cycle(g, set.a_edges[static_cast<std::size_t>(idx)]).graph;
    } else {
      throw InputError("surgery --op must be split, cut-keep, cut-dirichlet or unroll");
    }
    out << emit_graph_file(result);
    return 0;
  }

  if (cfg.command == "jost" || cfg.command == "basis") {
    const MetricGraph g = load_graph_file(cfg.graph_path);
    const SpectralPoint sp = parse_point(cfg);
    out << "s,re_y,im_y,re_dy,im_dy\n";
    auto dump = [&](auto&& eval, double lo, double hi, int n) {
      for (int i = 0; i < n; ++i) {
        const double s = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
        const WaveState st = eval(s);
        out << format_number(s) << "," << format_number(st.y.real()) << ","
            << format_number(st.y.imag()) << "," << format_number(st.dy.real()) << ","
            << format_number(st.dy.imag()) << "\n";
      }
    };
    if (cfg.command == "jost") {
      if (cfg.ray.empty()) throw InputError("--ray is required");
      const auto& ray = g.ray(require_ray(g, cfg.ray));
      const auto j = jost(ray, sp);
      const double hi = grid.set ? grid.hi : ray.support + 2.0;
      const double lo = grid.set ? grid.lo : 0.0;
      dump([&](double s) { return j.wave.at(s); }, lo, hi, grid.set ? grid.n : 201);
    } else {
      if (cfg.edge.empty()) throw InputError("--edge is required");
      const int e = g.edge_index(cfg.edge);
      if (e < 0) throw InputError("unknown edge '" + cfg.edge + "'");
      auto [c, s_wave] = local_basis(g.edge(e), sp);
      const double hi = grid.set ? grid.hi : g.edge(e).length;
      const double lo = grid.set ? grid.lo : 0.0;
      // Two blocks: cosine-type then sine-type solution.
      dump([&](double s) { return c.at(s); }, lo, hi, grid.set ? grid.n : 101);
      dump([&](double s) { return s_wave.at(s); }, lo, hi, grid.set ? grid.n : 101);
    }
    return 0;
  }

  throw InputError("unknown command '" + cfg.command + "'");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"spectral and scattering computations on noncompact metric graphs"};
  app.require_subcommand(1);
  CliConfig cfg;

  auto add_common = [&cfg](CLI::App* sub) {
    sub->add_option("--graph", cfg.graph_path, "graph description file")->required();
    sub->add_option("--lambda", cfg.lambda_text, "spectral point RE,IM");
    sub->add_option("--side", cfg.side, "boundary side for lambda on [0,inf): plus|minus");
    sub->add_option("--vertex", cfg.vertex, "vertex id");
    sub->add_option("--ray", cfg.ray, "ray id");
    sub->add_option("--edge", cfg.edge, "edge id");
    sub->add_option("--grid", cfg.grid_text, "grid a,b,n");
    sub->add_option("--format", cfg.format, "output format: json|csv");
    sub->add_option("--tol", cfg.tol, "tolerance override");
    sub->add_option("--seed", cfg.seed, "seed echoed into diagnostics");
    sub->add_option("--exec", cfg.exec, "execution mode: serial|parallel");
  };

  for (const char* name : {"delta", "spectrum", "weyl", "bcoeffs", "scatter", "fulldata",
                           "schedule", "probe", "surgery", "jost", "basis"}) {
    CLI::App* sub = app.add_subcommand(name);
    add_common(sub);
    if (std::string_view(name) == "probe") {
      sub->add_option("--q", cfg.q_path, "potential file for the first operator");
      sub->add_option("--qtilde", cfg.qtilde_path, "potential file for the second operator");
    }
    if (std::string_view(name) == "surgery") {
      sub->add_option("--op", cfg.op, "split|cut-keep|cut-dirichlet|unroll");
      sub->add_option("--part", cfg.part, "edge/ray ids, comma separated");
      sub->add_option("--cycle", cfg.cycle_edge, "any edge id on the cycle");
    }
    sub->callback([&cfg, name] { cfg.command = name; });
  }

  std::vector<const char*> argv;
  argv.push_back("qgraph");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    return dispatch(cfg, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace qgraph
