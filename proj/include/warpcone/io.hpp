#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "warpcone/action.hpp"
#include "warpcone/net.hpp"
#include "warpcone/spectra.hpp"
#include "warpcone/warp_graph.hpp"

namespace warpcone {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);
double parse_double(const std::string& s);
std::vector<double> parse_double_list(const std::string& s, char sep = ',');
std::string join_doubles(const std::vector<double>& v, char sep = ',');

struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};

/// `key = value` lines; blank lines and `#` comments are skipped. Keys may
/// repeat (e.g. one `generator` line per generator).
std::vector<KeyValue> read_key_values(std::istream& in);
std::vector<KeyValue> read_key_values_file(const std::string& path);

/// Built-in names ("sl2z", "rotation", "identity") or a configuration file:
///   space = t2
///   generator = matrix 1 2 0 1
///   generator = rotation 0.41421356237309515
///   generator = identity
///   symmetrize = true
/// `space_spec`, if set, fixes the space for built-ins and must agree with a
/// file's own `space` key.
Action load_action(const std::string& spec, const std::string& space_spec = "");
Action parse_action(const std::vector<KeyValue>& kv, const std::string& space_spec = "");

// Net: "# t=.. space=.. seed=.. samples=.." then "id x_1 .. x_d measure".
void write_net(std::ostream& out, const Net& net);
Net read_net(std::istream& in);
void save_net(const std::string& path, const Net& net);
Net load_net(const std::string& path);

// Graph: header comments, then "src dst type gen weight" rows. Type-1 rows
// carry the sampled mass w_s(src, dst) of one generator; type-2 rows use
// gen -1 and weight 1. Self-loop masses are not written; on reading they are
// restored from the cell measures so that every row keeps its mass.
void write_graph(std::ostream& out, const WarpedGraph& graph);
WarpedGraph read_graph(std::istream& in, std::optional<std::span<const double>> measures = std::nullopt);
void save_graph(const std::string& path, const WarpedGraph& graph);
WarpedGraph load_graph(const std::string& path, std::optional<std::span<const double>> measures = std::nullopt);
void write_dot(std::ostream& out, const WarpedGraph& graph);

// Report CSV.
std::vector<std::string> report_columns(const std::vector<double>& p_list);
void write_report_header(std::ostream& out, const std::vector<double>& p_list, const std::vector<std::string>& comments = {});
void write_report_row(std::ostream& out, const SpectralReport& r, const std::vector<double>& p_list);

struct ReportTable {
  std::vector<std::string> comments;
  std::vector<double> p_list;
  std::vector<SpectralReport> rows;
};
ReportTable read_report_csv(std::istream& in);

}  // namespace warpcone
