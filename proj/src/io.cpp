#include "warpcone/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "warpcone/types.hpp"

namespace warpcone {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string tok; is >> tok;) out.push_back(tok);
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

long long parse_int(const std::string& s) {
  long long v = 0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw ConfigError("not an integer: '" + s + "'");
  return v;
}

// "# a=1 b=2" -> {a: 1, b: 2}
std::map<std::string, std::string> header_fields(const std::string& line) {
  std::map<std::string, std::string> out;
  for (const auto& tok : split_ws(line.substr(1))) {
    const auto eq = tok.find('=');
    if (eq != std::string::npos) out[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return out;
}

const std::string& need(const std::map<std::string, std::string>& m, const std::string& key) {
  const auto it = m.find(key);
  if (it == m.end()) throw ConfigError("missing header field '" + key + "'");
  return it->second;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  return f;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  return f;
}

Generator parse_generator(const std::string& value, int dim) {
  const auto tok = split_ws(value);
  if (tok.empty()) throw ConfigError("empty generator");
  if (tok[0] == "identity") return Generator::identity(dim);
  if (tok[0] == "rotation") {
    if (static_cast<int>(tok.size()) != dim + 1) throw ConfigError("rotation needs " + std::to_string(dim) + " components");
    Point v(dim);
    for (int i = 0; i < dim; ++i) v[i] = parse_double(tok[static_cast<std::size_t>(i) + 1]);
    return Generator::rotation(v);
  }
  if (tok[0] == "matrix") {
    if (static_cast<int>(tok.size()) != dim * dim + 1) throw ConfigError("matrix needs " + std::to_string(dim * dim) + " entries");
    std::vector<long long> e;
    for (std::size_t i = 1; i < tok.size(); ++i) e.push_back(parse_int(tok[i]));
    return Generator::toral(dim, e);
  }
  throw ConfigError("unknown generator kind '" + tok[0] + "'");
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto* end = t.data() + t.size();
  const auto res = std::from_chars(t.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || t.empty()) throw ConfigError("not a number: '" + s + "'");
  return v;
}

std::vector<double> parse_double_list(const std::string& s, char sep) {
  std::vector<double> out;
  if (trim(s).empty()) return out;
  for (const auto& part : split(s, sep)) out.push_back(parse_double(part));
  return out;
}

std::string join_doubles(const std::vector<double>& v, char sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += format_double(v[i]);
  }
  return out;
}

std::vector<KeyValue> read_key_values(std::istream& in) {
  std::vector<KeyValue> out;
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(no) + ": expected key = value");
    KeyValue kv{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), no};
    if (kv.key.empty()) throw ConfigError("line " + std::to_string(no) + ": empty key");
    out.push_back(std::move(kv));
  }
  return out;
}

std::vector<KeyValue> read_key_values_file(const std::string& path) {
  auto f = open_in(path);
  return read_key_values(f);
}

Action parse_action(const std::vector<KeyValue>& kv, const std::string& space_spec) {
  std::string space_name = space_spec;
  bool symmetrize = true;
  std::vector<std::string> gens;
  for (const auto& e : kv) {
    if (e.key == "space") {
      if (!space_spec.empty() && make_space(space_spec)->name() != make_space(e.value)->name())
        throw ConfigError("action space '" + e.value + "' conflicts with '" + space_spec + "'");
      space_name = e.value;
    } else if (e.key == "generator") {
      gens.push_back(e.value);
    } else if (e.key == "symmetrize") {
      if (e.value != "true" && e.value != "false") throw ConfigError("symmetrize must be true or false");
      symmetrize = e.value == "true";
    } else {
      throw ConfigError("line " + std::to_string(e.line) + ": unknown action key '" + e.key + "'");
    }
  }
  if (space_name.empty()) throw ConfigError("action configuration lacks a space");
  if (gens.empty()) throw ConfigError("action configuration lacks generators");
  auto space = make_space(space_name);
  std::vector<Generator> g;
  for (const auto& v : gens) g.push_back(parse_generator(v, space->dim()));
  return Action(space, std::move(g), symmetrize);
}

Action load_action(const std::string& spec, const std::string& space_spec) {
  if (spec == "sl2z") return Action::sl2z(make_space(space_spec.empty() ? "t2" : space_spec));
  if (spec == "rotation") {
    auto space = make_space(space_spec.empty() ? "circle" : space_spec);
    Point v(space->dim());
    for (int i = 0; i < space->dim(); ++i) v[i] = std::sqrt(2.0 * (i + 1)) - std::floor(std::sqrt(2.0 * (i + 1)));
    return Action::rotation(space, v);
  }
  if (spec == "identity") return Action::identity(make_space(space_spec.empty() ? "t2" : space_spec));
  return parse_action(read_key_values_file(spec), space_spec);
}

void write_net(std::ostream& out, const Net& net) {
  const auto& info = net.measure_info();
  out << "# t=" << format_double(net.t()) << " space=" << net.space().name() << " seed=" << net.seed()
      << " samples=" << info.n_samples << " measure_seed=" << info.seed << '\n';
  const auto mu = net.cell_measures();
  for (int z = 0; z < net.size(); ++z) {
    out << z;
    const Point& p = net.point(z);
    for (int i = 0; i < p.dim(); ++i) out << '\t' << format_double(p[i]);
    if (net.has_measures()) out << '\t' << format_double(mu[static_cast<std::size_t>(z)]);
    out << '\n';
  }
}

Net read_net(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.empty() || line[0] != '#') throw ConfigError("net file lacks header");
  const auto h = header_fields(line);
  const double t = parse_double(need(h, "t"));
  auto space = make_space(need(h, "space"));
  const auto seed = static_cast<std::uint64_t>(std::stoull(need(h, "seed")));
  const int d = space->dim();
  std::vector<Point> pts;
  std::vector<double> mu;
  while (std::getline(in, line)) {
    if (trim(line).empty() || line[0] == '#') continue;
    const auto tok = split_ws(line);
    if (tok.size() != static_cast<std::size_t>(d) + 1 && tok.size() != static_cast<std::size_t>(d) + 2)
      throw ConfigError("net row has " + std::to_string(tok.size()) + " fields");
    if (parse_int(tok[0]) != static_cast<long long>(pts.size())) throw ConfigError("net ids must be consecutive from 0");
    Point p(d);
    for (int i = 0; i < d; ++i) p[i] = parse_double(tok[static_cast<std::size_t>(i) + 1]);
    pts.push_back(p);
    if (tok.size() == static_cast<std::size_t>(d) + 2) mu.push_back(parse_double(tok.back()));
  }
  if (pts.empty()) throw ConfigError("net file has no points");
  Net net(space, t, std::move(pts), seed);
  if (!mu.empty()) {
    if (mu.size() != static_cast<std::size_t>(net.size())) throw ConfigError("measure column incomplete");
    CellMeasures cm;
    cm.values = std::move(mu);
    if (h.count("samples")) cm.n_samples = std::stoll(h.at("samples"));
    if (h.count("measure_seed")) cm.seed = std::stoull(h.at("measure_seed"));
    net.attach_measures(std::move(cm));
  }
  return net;
}

void save_net(const std::string& path, const Net& net) {
  auto f = open_out(path);
  write_net(f, net);
}

Net load_net(const std::string& path) {
  auto f = open_in(path);
  return read_net(f);
}

void write_graph(std::ostream& out, const WarpedGraph& g) {
  std::vector<double> inv;
  for (int s : g.generator_inverse()) inv.push_back(s);
  out << "# t=" << format_double(g.t()) << " n=" << g.num_vertices() << " variant=" << to_string(g.variant())
      << " generators=" << g.num_generators() << " inverse=" << join_doubles(inv) << " n_per_cell=" << g.n_per_cell
      << " seed=" << g.seed << '\n';
  std::vector<int> empty;
  for (std::size_t z = 0; z < g.accepted_per_cell.size(); ++z)
    if (g.accepted_per_cell[z] == 0) empty.push_back(static_cast<int>(z));
  if (!empty.empty()) {
    out << "# empty_cells=";
    for (std::size_t i = 0; i < empty.size(); ++i) out << (i ? "," : "") << empty[i];
    out << '\n';
  }
  out << "# src\tdst\ttype\tgen\tweight\n";
  for (const auto& a : g.arcs())
    if (a.src != a.dst) out << a.src << '\t' << a.dst << "\t1\t" << a.gen << '\t' << format_double(a.weight) << '\n';
  for (const auto& [a, b] : g.type2_edges()) out << a << '\t' << b << "\t2\t-1\t1\n";
}

WarpedGraph read_graph(std::istream& in, std::optional<std::span<const double>> measures) {
  std::string line;
  if (!std::getline(in, line) || line.empty() || line[0] != '#') throw ConfigError("graph file lacks header");
  const auto h = header_fields(line);
  const double t = parse_double(need(h, "t"));
  const int n = static_cast<int>(parse_int(need(h, "n")));
  const Variant variant = parse_variant(need(h, "variant"));
  std::vector<int> inverse;
  for (double v : parse_double_list(need(h, "inverse"))) inverse.push_back(static_cast<int>(v));
  const int ns = static_cast<int>(parse_int(need(h, "generators")));
  if (static_cast<int>(inverse.size()) != ns) throw ConfigError("inverse table does not match generator count");

  std::vector<double> mu;
  if (measures) {
    mu.assign(measures->begin(), measures->end());
    if (mu.size() != static_cast<std::size_t>(n)) throw ConfigError("net and graph sizes differ");
  } else {
    mu.assign(static_cast<std::size_t>(n), 1.0 / n);
  }
  std::vector<bool> empty(static_cast<std::size_t>(n), false);
  std::vector<WeightedArc> arcs;
  std::vector<Edge> type2;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    if (line[0] == '#') {
      const auto f = header_fields(line);
      if (f.count("empty_cells"))
        for (double z : parse_double_list(f.at("empty_cells"))) empty.at(static_cast<std::size_t>(z)) = true;
      continue;
    }
    const auto tok = split_ws(line);
    if (tok.size() != 5) throw ConfigError("graph row needs 5 fields");
    const auto src = static_cast<VertexId>(parse_int(tok[0]));
    const auto dst = static_cast<VertexId>(parse_int(tok[1]));
    const auto type = parse_int(tok[2]);
    if (type == 1) {
      arcs.push_back({src, dst, static_cast<int>(parse_int(tok[3])), parse_double(tok[4])});
    } else if (type == 2) {
      type2.emplace_back(src, dst);
    } else {
      throw ConfigError("unknown edge type " + tok[2]);
    }
  }
  // Restore the self-loop mass: mu(U_z) minus what left the cell.
  std::vector<double> out_mass(static_cast<std::size_t>(n) * static_cast<std::size_t>(ns), 0.0);
  for (const auto& a : arcs) {
    if (a.src < 0 || a.src >= n || a.gen < 0 || a.gen >= ns) throw ConfigError("arc out of range");
    out_mass[static_cast<std::size_t>(a.gen) * static_cast<std::size_t>(n) + static_cast<std::size_t>(a.src)] += a.weight;
  }
  for (int s = 0; s < ns; ++s)
    for (int z = 0; z < n; ++z) {
      if (empty[static_cast<std::size_t>(z)]) continue;
      const double rest = mu[static_cast<std::size_t>(z)] -
                          out_mass[static_cast<std::size_t>(s) * static_cast<std::size_t>(n) + static_cast<std::size_t>(z)];
      if (rest > 0.0) arcs.push_back({z, z, s, rest});
    }
  WarpedGraph g(t, n, variant, std::move(inverse), std::move(arcs), std::move(type2), std::move(mu));
  if (h.count("n_per_cell")) g.n_per_cell = static_cast<int>(parse_int(h.at("n_per_cell")));
  if (h.count("seed")) g.seed = std::stoull(h.at("seed"));
  if (!measures) g.warnings.push_back("no cell measures given; uniform placeholder used");
  return g;
}

void save_graph(const std::string& path, const WarpedGraph& graph) {
  auto f = open_out(path);
  write_graph(f, graph);
}

WarpedGraph load_graph(const std::string& path, std::optional<std::span<const double>> measures) {
  auto f = open_in(path);
  return read_graph(f, measures);
}

void write_dot(std::ostream& out, const WarpedGraph& g) {
  out << "graph G {\n";
  for (int z = 0; z < g.num_vertices(); ++z) out << "  " << z << ";\n";
  const Graph t1 = g.type1_graph();
  for (const auto& [a, b] : t1.edges()) out << "  " << a << " -- " << b << " [color=red];\n";
  for (const auto& [a, b] : g.type2_edges()) out << "  " << a << " -- " << b << " [color=gray];\n";
  out << "}\n";
}

std::vector<std::string> report_columns(const std::vector<double>& p_list) {
  std::vector<std::string> c{"t", "n_vertices", "lambda2"};
  for (double p : p_list) c.push_back("eta_p" + format_double(p));
  for (const char* s : {"kappa_hat", "markov_norm", "K_hat", "D_max", "fwd_margin"}) c.emplace_back(s);
  return c;
}

void write_report_header(std::ostream& out, const std::vector<double>& p_list, const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  const auto cols = report_columns(p_list);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
}

void write_report_row(std::ostream& out, const SpectralReport& r, const std::vector<double>& p_list) {
  out << format_double(r.t) << ',' << r.n_vertices << ',' << format_double(r.lambda2);
  for (double p : p_list) out << ',' << format_double(r.eta_value(p, 1));
  out << ',' << format_double(r.kappa_hat) << ',' << format_double(r.markov_norm) << ',' << format_double(r.K_hat) << ','
      << r.D_max << ',' << format_double(r.fwd_margin) << '\n';
}

ReportTable read_report_csv(std::istream& in) {
  ReportTable table;
  std::string line;
  std::vector<std::string> cols;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      table.comments.push_back(trim(line.substr(1)));
      continue;
    }
    if (cols.empty()) {
      cols = split(line, ',');
      for (const auto& c : cols)
        if (c.rfind("eta_p", 0) == 0) table.p_list.push_back(parse_double(c.substr(5)));
      if (cols != report_columns(table.p_list)) throw ConfigError("unexpected report columns");
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != cols.size()) throw ConfigError("report row has wrong field count");
    SpectralReport r;
    std::size_t i = 0;
    r.t = parse_double(f[i++]);
    r.n_vertices = static_cast<int>(parse_int(f[i++]));
    r.lambda2 = parse_double(f[i++]);
    for (double p : table.p_list) r.eta.push_back({p, 1, parse_double(f[i++]), false});
    r.kappa_hat = parse_double(f[i++]);
    r.markov_norm = parse_double(f[i++]);
    r.K_hat = parse_double(f[i++]);
    r.D_max = static_cast<int>(parse_int(f[i++]));
    r.fwd_margin = parse_double(f[i++]);
    table.rows.push_back(std::move(r));
  }
  if (cols.empty()) throw ConfigError("report has no header");
  return table;
}

}  // namespace warpcone
