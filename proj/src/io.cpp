#include "chronos/io.hpp"

#include <charconv>
#include <cmath>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "chronos/error.hpp"

namespace chronos::io {
namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorKind::ParseError, what); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    parse_fail("not a number: '" + std::string(s) + "'");
  }
  return v;
}

long parse_long(std::string_view s) {
  s = trim(s);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) parse_fail("not an integer: '" + std::string(s) + "'");
  return v;
}

double number(const json& j, const char* what) {
  if (!j.is_number()) parse_fail(std::string(what) + " must be a number");
  return j.get<double>();
}

std::string_view tag_name(ScaleTag tag) {
  switch (tag) {
    case ScaleTag::custom: return "custom";
    case ScaleTag::real_line: return "real_line";
    case ScaleTag::h_grid: return "h_grid";
    case ScaleTag::q_grid: return "q_grid";
  }
  return "custom";
}

}  // namespace

json to_json(const TimeScale& ts) {
  json j;
  j["tag"] = tag_name(ts.tag());
  if (ts.tag() == ScaleTag::h_grid) j["h"] = ts.parameter();
  if (ts.tag() == ScaleTag::q_grid) j["q"] = ts.parameter();
  json comps = json::array();
  for (const auto& c : ts.components()) comps.push_back({c.lo, c.hi});
  j["components"] = std::move(comps);
  return j;
}

TimeScale timescale_from_json(const json& j) {
  if (!j.is_object()) parse_fail("time scale descriptor must be an object");
  const std::string tag = j.value("tag", std::string("custom"));
  if (!j.contains("components") || !j["components"].is_array()) parse_fail("time scale needs a components array");
  std::vector<Interval> comps;
  for (const auto& c : j["components"]) {
    if (c.is_number()) {
      const double p = c.get<double>();
      comps.push_back({p, p});
      continue;
    }
    if (!c.is_array() || c.size() != 2) parse_fail("each component must be [a, b]");
    comps.push_back({number(c[0], "component endpoint"), number(c[1], "component endpoint")});
  }
  if (tag == "custom") return TimeScale(std::move(comps), ScaleTag::custom);
  if (tag == "real_line") return TimeScale(std::move(comps), ScaleTag::real_line);
  if (tag == "h_grid") {
    if (!j.contains("h")) parse_fail("h_grid needs h");
    return TimeScale(std::move(comps), ScaleTag::h_grid, number(j["h"], "h"));
  }
  if (tag == "q_grid") {
    if (!j.contains("q")) parse_fail("q_grid needs q");
    return TimeScale(std::move(comps), ScaleTag::q_grid, number(j["q"], "q"));
  }
  parse_fail("unknown time scale tag '" + tag + "'");
}

json to_json(const Mat& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) parse_fail("matrix must be a nonempty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) parse_fail("matrix rows must be nonempty arrays");
  Mat m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) parse_fail("matrix rows differ in length");
    for (std::size_t k = 0; k < cols; ++k) {
      m(static_cast<Index>(i), static_cast<Index>(k)) = number(j[i][k], "matrix entry");
    }
  }
  return m;
}

Vec vector_from_json(const json& j) {
  if (!j.is_array()) parse_fail("vector must be an array");
  Vec v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = number(j[i], "vector entry");
  return v;
}

json vector_to_json(const Vec& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json to_json(const ExtMat& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < m.cols(); ++k) {
      if (m.is_infinite(i, k)) {
        row.push_back("inf");
      } else {
        row.push_back(m(i, k));
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const LinearSystem& sys) {
  return json{{"timescale", to_json(sys.scale())}, {"A", to_json(sys.A())}, {"B", to_json(sys.B())}};
}

LinearSystem system_from_json(const json& j) {
  if (!j.is_object()) parse_fail("system descriptor must be an object");
  for (const char* key : {"timescale", "A", "B"}) {
    if (!j.contains(key)) parse_fail(std::string("system descriptor is missing '") + key + "'");
  }
  return LinearSystem(timescale_from_json(j["timescale"]), matrix_from_json(j["A"]), matrix_from_json(j["B"]));
}

json to_json(const ControlSignal& u) {
  json segs = json::array();
  for (const auto& s : u.segments()) segs.push_back({{"t", s.t}, {"u", vector_to_json(s.u)}});
  return json{{"t0", u.t0()}, {"t1", u.t1()}, {"segments", std::move(segs)}};
}

ControlSignal control_from_json(const json& j, const TimeScale& ts) {
  if (!j.is_object() || !j.contains("segments") || !j["segments"].is_array()) {
    parse_fail("control descriptor needs t0, t1 and a segments array");
  }
  std::vector<ControlSegment> segs;
  for (const auto& s : j["segments"]) {
    if (!s.is_object() || !s.contains("t") || !s.contains("u")) parse_fail("segment needs t and u");
    segs.push_back({number(s["t"], "segment time"), vector_from_json(s["u"])});
  }
  return ControlSignal(ts, number(j.value("t0", json()), "t0"), number(j.value("t1", json()), "t1"),
                       std::move(segs), j.value("nonnegative", false));
}

json to_json(const DeltaSet& set) {
  json out = json::array();
  for (const auto& p : set.pieces()) out.push_back({p.begin, p.end});
  return out;
}

json to_json(const GramSpec& spec) {
  json M = json::array();
  json S = json::object();
  for (const auto& [k, set] : spec.sets) {
    M.push_back(k + 1);
    S[std::to_string(k + 1)] = to_json(set);
  }
  return json{{"t0", spec.t0}, {"t1", spec.t1}, {"M", std::move(M)}, {"S", std::move(S)}};
}

json to_json(const ExpPath<double>& path) {
  json factors = json::array();
  for (const auto& f : path.factors) {
    json item{{"kind", f.piece.is_atom() ? "discrete" : "continuous"}, {"matrix", to_json(f.value)}};
    if (f.piece.is_atom()) {
      item["t"] = f.piece.begin;
      item["mu"] = f.piece.measure();
    } else {
      item["begin"] = f.piece.begin;
      item["end"] = f.piece.end;
    }
    factors.push_back(std::move(item));
  }
  return json{{"t0", path.from}, {"t", path.to}, {"value", to_json(path.value)}, {"factors", std::move(factors)}};
}

json to_json(const SynthesizedControl& c) {
  return json{{"target", vector_to_json(c.target)},
              {"control", to_json(c.control)},
              {"endpoint", vector_to_json(c.endpoint)},
              {"residual", c.residual}};
}

json to_json(const ReachReport& report) {
  json diag = json::array();
  for (std::size_t i = 0; i < report.diagnostics.size(); ++i) {
    json witnesses = json::array();
    for (const auto& w : report.diagnostics[i]) {
      witnesses.push_back({{"column", w.column + 1},
                           {"kind", w.piece.is_atom() ? "atom" : "continuous"},
                           {"begin", w.piece.begin},
                           {"end", w.piece.end}});
    }
    diag.push_back({{"target", i + 1}, {"witnesses", std::move(witnesses)}});
  }
  json out{{"decision", to_string(report.decision)},
           {"reachable", report.reachable()},
           {"window", {report.t0, report.t1}},
           {"kalman_rank", report.kalman_rank},
           {"accessible", report.accessible ? json(*report.accessible) : json(nullptr)},
           {"diagnostics", std::move(diag)}};
  if (report.certificate) {
    json controls = json::array();
    for (const auto& c : report.certificate->controls) controls.push_back(to_json(c));
    out["certificate"] = {{"spec", to_json(report.certificate->spec)},
                          {"W", to_json(report.certificate->W)},
                          {"monomial", is_monomial(report.certificate->W)},
                          {"controls", std::move(controls)}};
  } else {
    out["certificate"] = nullptr;
  }
  return out;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream os;
  os << "t";
  const Index n = traj.x.empty() ? 0 : traj.x.front().size();
  for (Index i = 0; i < n; ++i) os << ",x" << i + 1;
  os << "\n";
  char buf[32];
  for (std::size_t r = 0; r < traj.t.size(); ++r) {
    std::snprintf(buf, sizeof buf, "%.17g", traj.t[r]);
    os << buf;
    for (Index i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", traj.x[r](i));
      os << "," << buf;
    }
    os << "\n";
  }
  return os.str();
}

std::vector<Index> parse_columns(std::string_view text, Index inputs) {
  std::vector<Index> out;
  for (auto part : split(text, ',')) {
    part = trim(part);
    if (part.empty()) continue;
    const long k = parse_long(part);
    if (k < 1 || k > inputs) parse_fail("column " + std::string(part) + " is out of range");
    out.push_back(static_cast<Index>(k - 1));
  }
  if (out.empty()) throw Error(ErrorKind::EmptyM, "column selection M is empty");
  return out;
}

GramSpec parse_spec(const LinearSystem& sys, double t0, double t1, std::string_view text) {
  GramSpec spec;
  spec.t0 = sys.scale().snap(t0);
  spec.t1 = sys.scale().snap(t1);
  for (auto entry : split(text, ';')) {
    entry = trim(entry);
    if (entry.empty()) continue;
    const std::size_t colon = entry.find(':');
    if (colon == std::string_view::npos) parse_fail("expected 'k:[a,b)|...' in '" + std::string(entry) + "'");
    const long k = parse_long(entry.substr(0, colon));
    if (k < 1 || k > sys.inputs()) parse_fail("column " + std::to_string(k) + " is out of range");
    std::vector<Segment> pieces;
    for (auto piece : split(entry.substr(colon + 1), '|')) {
      piece = trim(piece);
      if (piece.size() < 5 || piece.front() != '[' || piece.back() != ')') {
        parse_fail("Delta-interval must look like [a,b): '" + std::string(piece) + "'");
      }
      const auto ends = split(piece.substr(1, piece.size() - 2), ',');
      if (ends.size() != 2) parse_fail("Delta-interval needs two endpoints");
      pieces.push_back({parse_double(ends[0]), parse_double(ends[1])});
    }
    spec.sets.insert_or_assign(static_cast<Index>(k - 1), DeltaSet(sys.scale(), std::move(pieces)));
  }
  if (spec.sets.empty()) throw Error(ErrorKind::EmptyM, "Delta-set specification is empty");
  return spec;
}

Vec parse_target(std::string_view text, Index states) {
  text = trim(text);
  if (!text.empty() && (text.front() == 'e' || text.front() == 'E')) {
    const long i = parse_long(text.substr(1));
    if (i < 1 || i > states) parse_fail("target index out of range");
    return Vec::Unit(states, static_cast<Index>(i - 1));
  }
  const auto parts = split(text, ',');
  if (static_cast<Index>(parts.size()) != states) parse_fail("target has wrong dimension");
  Vec v(states);
  for (Index i = 0; i < states; ++i) v(i) = parse_double(parts[static_cast<std::size_t>(i)]);
  return v;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) parse_fail("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    parse_fail("'" + path + "': " + e.what());
  }
}

}  // namespace chronos::io
