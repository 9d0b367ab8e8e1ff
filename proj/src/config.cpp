#include "kelvinprobe/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "kelvinprobe/error.hpp"
#include "kelvinprobe/io.hpp"

namespace kp {

namespace {

struct Value {
  enum class Kind { Number, Bool, String, Array } kind = Kind::Number;
  double number = 0.0;
  bool integral = false;
  std::int64_t integer = 0;
  bool boolean = false;
  std::string text;
  std::vector<Value> items;
  int line = 0;
};

[[noreturn]] void syntax(int line, const std::string& msg) {
  fail(ErrorCode::Config, "line " + std::to_string(line) + ": " + msg);
}

// Recursive-descent parser for one value expression.
class ValueParser {
 public:
  ValueParser(std::string_view src, int line) : s_(src), line_(line) {}

  Value parse_all() {
    Value v = parse();
    skip_ws();
    if (pos_ != s_.size()) syntax(line_, "unexpected trailing characters '" + std::string(s_.substr(pos_)) + "'");
    return v;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size()) {
      const char ch = s_[pos_];
      if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r') {
        ++pos_;
      } else if (ch == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  Value parse() {
    skip_ws();
    if (pos_ >= s_.size()) syntax(line_, "missing value");
    Value v;
    v.line = line_;
    const char ch = s_[pos_];
    if (ch == '[') {
      v.kind = Value::Kind::Array;
      ++pos_;
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == ']') {
        ++pos_;
        return v;
      }
      while (true) {
        v.items.push_back(parse());
        skip_ws();
        if (pos_ >= s_.size()) syntax(line_, "unterminated array");
        if (s_[pos_] == ',') {
          ++pos_;
          skip_ws();
          if (pos_ < s_.size() && s_[pos_] == ']') {  // trailing comma
            ++pos_;
            return v;
          }
          continue;
        }
        if (s_[pos_] == ']') {
          ++pos_;
          return v;
        }
        syntax(line_, "expected ',' or ']' in array");
      }
    }
    if (ch == '"') {
      v.kind = Value::Kind::String;
      ++pos_;
      while (true) {
        if (pos_ >= s_.size() || s_[pos_] == '\n') syntax(line_, "unterminated string");
        char c = s_[pos_++];
        if (c == '"') break;
        if (c == '\\') {
          if (pos_ >= s_.size()) syntax(line_, "unterminated escape");
          c = s_[pos_++];
          switch (c) {
            case '"': v.text += '"'; break;
            case '\\': v.text += '\\'; break;
            case 'n': v.text += '\n'; break;
            case 't': v.text += '\t'; break;
            default: syntax(line_, std::string("unsupported escape '\\") + c + "'");
          }
          continue;
        }
        v.text += c;
      }
      return v;
    }
    std::size_t end = pos_;
    while (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '.' ||
                               s_[end] == '-' || s_[end] == '+' || s_[end] == '_'))
      ++end;
    std::string token(s_.substr(pos_, end - pos_));
    pos_ = end;
    if (token == "true" || token == "false") {
      v.kind = Value::Kind::Bool;
      v.boolean = token == "true";
      return v;
    }
    token.erase(std::remove(token.begin(), token.end(), '_'), token.end());
    if (token.empty()) syntax(line_, "expected a value");
    const char* first = token.data();
    const char* last = first + token.size();
    if (*first == '+') ++first;
    std::int64_t iv = 0;
    auto ir = std::from_chars(first, last, iv);
    if (ir.ec == std::errc() && ir.ptr == last) {
      v.integral = true;
      v.integer = iv;
      v.number = static_cast<double>(iv);
      return v;
    }
    double dv = 0.0;
    auto dr = std::from_chars(first, last, dv);
    if (dr.ec != std::errc() || dr.ptr != last || !std::isfinite(dv)) syntax(line_, "invalid value '" + token + "'");
    v.number = dv;
    return v;
  }

  std::string_view s_;
  int line_;
  std::size_t pos_ = 0;
};

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

// Bracket depth after scanning `s`, ignoring strings and comments.
int bracket_balance(std::string_view s) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const char ch = s[k];
    if (in_string) {
      if (ch == '\\') ++k;
      else if (ch == '"') in_string = false;
      continue;
    }
    if (ch == '#') break;
    if (ch == '"') in_string = true;
    if (ch == '[') ++depth;
    if (ch == ']') --depth;
  }
  return depth;
}

struct Table {
  std::map<std::string, std::map<std::string, Value>> sections;
  std::map<std::string, int> header_line;
};

Table parse_table(const std::string& text) {
  Table table;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line[0] == '[') {
      const auto close = line.find(']');
      if (close == std::string::npos) syntax(line_no, "unterminated section header");
      const std::string rest = trim(std::string_view(line).substr(close + 1));
      if (!rest.empty() && rest[0] != '#') syntax(line_no, "unexpected text after section header");
      section = trim(std::string_view(line).substr(1, close - 1));
      if (section.empty()) syntax(line_no, "empty section name");
      if (table.sections.count(section)) syntax(line_no, "duplicate section [" + section + "]");
      table.sections[section];
      table.header_line[section] = line_no;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) syntax(line_no, "expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (key.empty()) syntax(line_no, "missing key");
    for (char ch : key)
      if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-'))
        syntax(line_no, "invalid key '" + key + "'");
    if (section.empty()) syntax(line_no, "key '" + key + "' outside any section");
    std::string expr = line.substr(eq + 1);
    const int start_line = line_no;
    int depth = bracket_balance(expr);
    while (depth > 0) {
      if (!std::getline(in, raw)) syntax(start_line, "unterminated array");
      ++line_no;
      expr += "\n" + raw;
      depth += bracket_balance(raw);
    }
    if (depth < 0) syntax(line_no, "unbalanced ']'");
    auto& entries = table.sections[section];
    if (entries.count(key)) syntax(start_line, "duplicate key '" + section + "." + key + "'");
    entries[key] = ValueParser(expr, start_line).parse_all();
  }
  return table;
}

// Typed extraction with field-path diagnostics.
class Reader {
 public:
  explicit Reader(Table t) : table_(std::move(t)) {}

  void number(const char* sec, const char* key, double& out) {
    if (const Value* v = find(sec, key)) out = as_number(*v, path(sec, key));
  }
  void optional_number(const char* sec, const char* key, std::optional<double>& out) {
    if (const Value* v = find(sec, key)) out = as_number(*v, path(sec, key));
  }
  void integer(const char* sec, const char* key, std::int64_t& out) {
    if (const Value* v = find(sec, key)) {
      if (v->kind != Value::Kind::Number || !v->integral) bad(*v, path(sec, key), "expected an integer");
      out = v->integer;
    }
  }
  void boolean(const char* sec, const char* key, bool& out) {
    if (const Value* v = find(sec, key)) {
      if (v->kind != Value::Kind::Bool) bad(*v, path(sec, key), "expected true or false");
      out = v->boolean;
    }
  }
  void string(const char* sec, const char* key, std::string& out) {
    if (const Value* v = find(sec, key)) out = as_string(*v, path(sec, key));
  }
  void numbers(const char* sec, const char* key, std::vector<double>& out) {
    if (const Value* v = find(sec, key)) {
      const auto& items = as_array(*v, path(sec, key));
      out.clear();
      for (const auto& it : items) out.push_back(as_number(it, path(sec, key)));
    }
  }
  void strings(const char* sec, const char* key, std::vector<std::string>& out) {
    if (const Value* v = find(sec, key)) {
      const auto& items = as_array(*v, path(sec, key));
      out.clear();
      for (const auto& it : items) out.push_back(as_string(it, path(sec, key)));
    }
  }
  void pair(const char* sec, const char* key, double& x, double& y) {
    if (const Value* v = find(sec, key)) {
      const auto p = as_interval(*v, path(sec, key));
      x = p.lo;
      y = p.hi;
    }
  }
  void intervals(const char* sec, const char* key, std::vector<Interval>& out) {
    if (const Value* v = find(sec, key)) {
      out.clear();
      for (const auto& it : as_array(*v, path(sec, key))) out.push_back(as_interval(it, path(sec, key)));
    }
  }
  void optional_intervals(const char* sec, const char* key, std::vector<std::optional<Interval>>& out) {
    if (const Value* v = find(sec, key)) {
      out.clear();
      for (const auto& it : as_array(*v, path(sec, key))) {
        if (it.kind == Value::Kind::Array && it.items.empty()) out.emplace_back();
        else out.emplace_back(as_interval(it, path(sec, key)));
      }
    }
  }

  // Anything left over is unknown.
  void reject_unknown() const {
    for (const auto& [sec, entries] : table_.sections) {
      if (!known_sections_.count(sec)) syntax(table_.header_line.at(sec), "unknown section [" + sec + "]");
      for (const auto& [key, val] : entries)
        if (!consumed_.count(sec + "." + key)) syntax(val.line, "unknown key '" + sec + "." + key + "'");
    }
  }

 private:
  static std::string path(const char* sec, const char* key) { return std::string(sec) + "." + key; }

  [[noreturn]] static void bad(const Value& v, const std::string& field, const std::string& msg) {
    syntax(v.line, field + ": " + msg);
  }

  const Value* find(const char* sec, const char* key) {
    known_sections_.insert(sec);
    auto s = table_.sections.find(sec);
    if (s == table_.sections.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    consumed_.insert(path(sec, key));
    return &k->second;
  }
  static double as_number(const Value& v, const std::string& field) {
    if (v.kind != Value::Kind::Number) bad(v, field, "expected a number");
    return v.number;
  }
  static const std::string& as_string(const Value& v, const std::string& field) {
    if (v.kind != Value::Kind::String) bad(v, field, "expected a string");
    return v.text;
  }
  static const std::vector<Value>& as_array(const Value& v, const std::string& field) {
    if (v.kind != Value::Kind::Array) bad(v, field, "expected an array");
    return v.items;
  }
  static Interval as_interval(const Value& v, const std::string& field) {
    const auto& items = as_array(v, field);
    if (items.size() != 2) bad(v, field, "expected a pair [lo, hi]");
    return {as_number(items[0], field), as_number(items[1], field)};
  }

  Table table_;
  std::set<std::string> consumed_;
  std::set<std::string> known_sections_;
};

[[noreturn]] void invalid(const std::string& field, const std::string& msg) {
  fail(ErrorCode::Config, field + ": " + msg);
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    if (ch == '\n') {
      out += "\\n";
      continue;
    }
    if (ch == '\t') {
      out += "\\t";
      continue;
    }
    out += ch;
  }
  return out + "\"";
}

std::string num(double v) { return format_double(v); }

std::string pair_text(Interval iv) { return "[" + num(iv.lo) + ", " + num(iv.hi) + "]"; }

}  // namespace

std::vector<double> uniform_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) fail(ErrorCode::InvalidArgument, "grid needs step > 0 and hi >= lo");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = std::round((lo + static_cast<double>(k) * step) * 1e12) / 1e12;
  return out;
}

void RunConfig::validate() const {
  const auto& g = geometry;
  if (!(g.a > 0.0)) invalid("geometry.a", "must be positive");
  if (!(g.b > 0.0)) invalid("geometry.b", "must be positive");
  if (!(g.c > 0.0 && g.c < g.b)) invalid("geometry.c", "must satisfy 0 < c < b");

  const double x0 = g.shift_x, x1 = g.shift_x + g.a;
  for (const auto& iv : cracks.intervals) {
    if (!(iv.lo < iv.hi)) invalid("cracks.intervals", "each interval needs lo < hi");
    if (iv.lo < x0 - 1e-12 || iv.hi > x1 + 1e-12) invalid("cracks.intervals", "interval leaves the slab");
  }
  if (!(cracks.width > 0.0 && cracks.width < std::min(g.c, g.b - g.c)))
    invalid("cracks.width", "must satisfy 0 < width < min(c, b - c)");
  if (cracks.target_elements < 1000) invalid("cracks.target_elements", "must be at least 1000");

  if (forcing.kind != "sin3" && forcing.kind != "linear_x1") invalid("forcing.kind", "expected \"sin3\" or \"linear_x1\"");
  if (forcing.support != "top_bottom" && forcing.support != "top" && forcing.support != "full")
    invalid("forcing.support", "expected \"top_bottom\", \"top\" or \"full\"");
  if (!(forcing.corner_exclusion >= 0.0 && forcing.corner_exclusion < 0.5 * std::min(g.a, g.b)))
    invalid("forcing.corner_exclusion", "must lie in [0, min(a,b)/2)");

  const auto& p = probe;
  if (!(p.tau_min > 0.0)) invalid("probe.tau_min", "must be positive");
  if (!(p.tau_max > p.tau_min)) invalid("probe.tau_max", "must exceed tau_min");
  if (!(p.tau_step > 0.0)) invalid("probe.tau_step", "must be positive");
  if (!(p.xi1_max >= p.xi1_min)) invalid("probe.xi1_max", "must not be below xi1_min");
  if (!(p.xi1_step > 0.0)) invalid("probe.xi1_step", "must be positive");
  if (!(p.min_standoff > 0.0)) invalid("probe.min_standoff", "must be positive");
  if (!(p.max_standoff >= p.min_standoff)) invalid("probe.max_standoff", "must not be below min_standoff");
  if (!(p.slope_divisor > 0.0)) invalid("probe.slope_divisor", "must be positive");
  if (p.reference != "user_origin" && p.reference != "slab_top")
    invalid("probe.reference", "expected \"user_origin\" or \"slab_top\"");
  if (p.delta && !(*p.delta > 0.0)) invalid("probe.delta", "must be positive");
  if (p.sup_s_bound && !(*p.sup_s_bound > 0.0)) invalid("probe.sup_s_bound", "must be positive");
  if (p.tau_window_lo && p.tau_window_hi && !(*p.tau_window_hi > *p.tau_window_lo))
    invalid("probe.tau_window_hi", "must exceed tau_window_lo");
  if (!(p.prominence_fraction >= 0.0 && p.prominence_fraction < 1.0))
    invalid("probe.prominence_fraction", "must lie in [0, 1)");
  if (p.threads < 0) invalid("probe.threads", "must be non-negative");

  if (!(noise.level >= 0.0)) invalid("noise.level", "must be non-negative");
  if (noise.seed < 0) invalid("noise.seed", "must be non-negative");
  if (!(noise.min_standoff > 0.0)) invalid("noise.min_standoff", "must be positive");

  const auto& m = monitor;
  for (double x : m.pressure_points)
    if (!(x > x0 && x < x1)) invalid("monitor.pressure_points", "every point must lie inside the slab");
  if (!(m.gap_threshold >= 0.0)) invalid("monitor.gap_threshold", "must be non-negative");
  if (!(m.left_step >= 0.0)) invalid("monitor.left_step", "must be non-negative");
  if (!(m.right_step >= 0.0)) invalid("monitor.right_step", "must be non-negative");
  if (m.max_rounds < 1) invalid("monitor.max_rounds", "must be at least 1");
  if (!m.nuggets.empty() && m.nuggets.size() != m.pressure_points.size())
    invalid("monitor.nuggets", "needs one entry per pressure point ([] for none)");
  for (std::size_t k = 0; k < m.nuggets.size(); ++k)
    if (m.nuggets[k] && !(m.nuggets[k]->lo < m.pressure_points[k] && m.pressure_points[k] < m.nuggets[k]->hi))
      invalid("monitor.nuggets", "each nugget must contain its pressure point");

  if (output.run_dir.empty()) invalid("output.run_dir", "must not be empty");
  for (const auto& f : output.formats)
    if (f != "csv" && f != "svg" && f != "json") invalid("output.formats", "unknown format \"" + f + "\"");

  // Geometry-level checks (probing line above the slab and similar).
  try {
    probing_line().validate(slab());
  } catch (const Error& e) {
    invalid("probe", e.what());
  }
}

SlabGeometry RunConfig::slab() const {
  return SlabGeometry(geometry.a, geometry.b, geometry.c, {geometry.shift_x, geometry.shift_y});
}

CrackSet RunConfig::crack_set(std::vector<std::string>* warnings) const {
  const auto geom = slab();
  std::vector<Interval> in_slab;
  for (const auto& iv : cracks.intervals) {
    const double lo = std::round(geom.x_to_slab(iv.lo) * 1e12) / 1e12;
    const double hi = std::round(geom.x_to_slab(iv.hi) * 1e12) / 1e12;
    in_slab.push_back({lo, hi});
  }
  return CrackSet::create(std::move(in_slab), geometry.c, geometry.a, warnings);
}

std::vector<double> RunConfig::tau_grid() const { return uniform_grid(probe.tau_min, probe.tau_max, probe.tau_step); }

std::vector<double> RunConfig::xi1_grid() const {
  const auto geom = slab();
  auto grid = uniform_grid(probe.xi1_min, probe.xi1_max, probe.xi1_step);
  for (auto& x : grid) x = std::round(geom.x_to_slab(x) * 1e12) / 1e12;
  return grid;
}

ProbingLine RunConfig::probing_line() const {
  ProbingLine line;
  line.min_standoff = noise.enabled ? noise.min_standoff : probe.min_standoff;
  line.max_standoff = std::max(probe.max_standoff, line.min_standoff);
  line.slope_divisor = probe.slope_divisor;
  line.center = probe.center;
  line.reference = probe.reference == "slab_top" ? ProbingLine::Reference::SlabTop : ProbingLine::Reference::UserOrigin;
  return line;
}

SupportMode RunConfig::support_mode() const {
  if (forcing.support == "top") return SupportMode::TopOnly;
  if (forcing.support == "full") return SupportMode::Full;
  return SupportMode::TopAndBottom;
}

MonitorConfig RunConfig::monitor_config() const {
  const auto geom = slab();
  MonitorConfig m;
  for (double x : monitor.pressure_points) m.pressure_points.push_back(geom.x_to_slab(x));
  m.gap_threshold = monitor.gap_threshold;
  m.left_step = monitor.left_step;
  m.right_step = monitor.right_step;
  m.max_rounds = static_cast<std::size_t>(monitor.max_rounds);
  for (const auto& n : monitor.nuggets) {
    if (!n) {
      m.nuggets.emplace_back();
      continue;
    }
    m.nuggets.emplace_back(Interval{std::round(geom.x_to_slab(n->lo) * 1e12) / 1e12,
                                    std::round(geom.x_to_slab(n->hi) * 1e12) / 1e12});
  }
  return m;
}

ProbeSetup RunConfig::probe_setup() const {
  ProbeSetup s;
  s.crack_width = cracks.width;
  s.target_elements = static_cast<std::size_t>(cracks.target_elements);
  s.corner_exclusion = forcing.corner_exclusion;
  s.support = support_mode();
  s.line = probing_line();
  s.xi1_grid = xi1_grid();
  s.tau_grid = tau_grid();
  s.threads = probe.threads > 0 ? static_cast<std::size_t>(probe.threads)
                                : std::max(1u, std::thread::hardware_concurrency());
  s.window.tau_lo = probe.tau_window_lo;
  s.window.tau_hi = probe.tau_window_hi;
  s.prominence_fraction = probe.prominence_fraction;
  s.noise_level = noise.enabled ? noise.level : 0.0;
  s.seed = static_cast<std::uint64_t>(noise.seed);
  if (forcing.kind == "linear_x1")
    s.forcing = [](const Mesh& mesh, std::size_t, std::size_t) { return neumann_linear_x1(mesh); };
  return s;
}

std::string RunConfig::serialize() const {
  std::ostringstream os;
  auto list = [](const auto& items, auto fmt) {
    std::string out = "[";
    for (std::size_t k = 0; k < items.size(); ++k) out += (k ? ", " : "") + fmt(items[k]);
    return out + "]";
  };
  os << "[geometry]\n"
     << "a = " << num(geometry.a) << "\nb = " << num(geometry.b) << "\nc = " << num(geometry.c) << "\n"
     << "shift = [" << num(geometry.shift_x) << ", " << num(geometry.shift_y) << "]\n\n";
  os << "[cracks]\n"
     << "intervals = " << list(cracks.intervals, pair_text) << "\n"
     << "width = " << num(cracks.width) << "\ntarget_elements = " << cracks.target_elements << "\n\n";
  os << "[forcing]\n"
     << "kind = " << quote(forcing.kind) << "\nsupport = " << quote(forcing.support)
     << "\ncorner_exclusion = " << num(forcing.corner_exclusion) << "\n\n";
  os << "[probe]\n"
     << "tau_min = " << num(probe.tau_min) << "\ntau_max = " << num(probe.tau_max)
     << "\ntau_step = " << num(probe.tau_step) << "\nxi1_min = " << num(probe.xi1_min)
     << "\nxi1_max = " << num(probe.xi1_max) << "\nxi1_step = " << num(probe.xi1_step)
     << "\nmin_standoff = " << num(probe.min_standoff) << "\nmax_standoff = " << num(probe.max_standoff)
     << "\nslope_divisor = " << num(probe.slope_divisor) << "\ncenter = " << num(probe.center)
     << "\nreference = " << quote(probe.reference) << "\n";
  if (probe.delta) os << "delta = " << num(*probe.delta) << "\n";
  if (probe.sup_s_bound) os << "sup_s_bound = " << num(*probe.sup_s_bound) << "\n";
  if (probe.tau_window_lo) os << "tau_window_lo = " << num(*probe.tau_window_lo) << "\n";
  if (probe.tau_window_hi) os << "tau_window_hi = " << num(*probe.tau_window_hi) << "\n";
  os << "prominence_fraction = " << num(probe.prominence_fraction) << "\nthreads = " << probe.threads << "\n\n";
  os << "[noise]\n"
     << "enabled = " << (noise.enabled ? "true" : "false") << "\nlevel = " << num(noise.level)
     << "\nseed = " << noise.seed << "\nmin_standoff = " << num(noise.min_standoff) << "\n\n";
  os << "[monitor]\n"
     << "pressure_points = " << list(monitor.pressure_points, num) << "\n"
     << "gap_threshold = " << num(monitor.gap_threshold) << "\nleft_step = " << num(monitor.left_step)
     << "\nright_step = " << num(monitor.right_step) << "\nmax_rounds = " << monitor.max_rounds << "\n"
     << "nuggets = "
     << list(monitor.nuggets, [](const std::optional<Interval>& n) { return n ? pair_text(*n) : std::string("[]"); })
     << "\n\n";
  os << "[output]\n"
     << "run_dir = " << quote(output.run_dir) << "\nformats = " << list(output.formats, quote) << "\n";
  return os.str();
}

std::string RunConfig::hash() const { return fnv1a_hex(serialize()); }

RunConfig parse_config_text(const std::string& text) {
  Reader r(parse_table(text));
  RunConfig cfg;
  r.number("geometry", "a", cfg.geometry.a);
  r.number("geometry", "b", cfg.geometry.b);
  r.number("geometry", "c", cfg.geometry.c);
  r.pair("geometry", "shift", cfg.geometry.shift_x, cfg.geometry.shift_y);

  r.intervals("cracks", "intervals", cfg.cracks.intervals);
  r.number("cracks", "width", cfg.cracks.width);
  r.integer("cracks", "target_elements", cfg.cracks.target_elements);

  r.string("forcing", "kind", cfg.forcing.kind);
  r.string("forcing", "support", cfg.forcing.support);
  r.number("forcing", "corner_exclusion", cfg.forcing.corner_exclusion);

  auto& p = cfg.probe;
  r.number("probe", "tau_min", p.tau_min);
  r.number("probe", "tau_max", p.tau_max);
  r.number("probe", "tau_step", p.tau_step);
  r.number("probe", "xi1_min", p.xi1_min);
  r.number("probe", "xi1_max", p.xi1_max);
  r.number("probe", "xi1_step", p.xi1_step);
  r.number("probe", "min_standoff", p.min_standoff);
  r.number("probe", "max_standoff", p.max_standoff);
  r.number("probe", "slope_divisor", p.slope_divisor);
  r.number("probe", "center", p.center);
  r.string("probe", "reference", p.reference);
  r.optional_number("probe", "delta", p.delta);
  r.optional_number("probe", "sup_s_bound", p.sup_s_bound);
  r.optional_number("probe", "tau_window_lo", p.tau_window_lo);
  r.optional_number("probe", "tau_window_hi", p.tau_window_hi);
  r.number("probe", "prominence_fraction", p.prominence_fraction);
  r.integer("probe", "threads", p.threads);

  r.boolean("noise", "enabled", cfg.noise.enabled);
  r.number("noise", "level", cfg.noise.level);
  r.integer("noise", "seed", cfg.noise.seed);
  r.number("noise", "min_standoff", cfg.noise.min_standoff);

  auto& m = cfg.monitor;
  r.numbers("monitor", "pressure_points", m.pressure_points);
  r.number("monitor", "gap_threshold", m.gap_threshold);
  r.number("monitor", "left_step", m.left_step);
  r.number("monitor", "right_step", m.right_step);
  r.integer("monitor", "max_rounds", m.max_rounds);
  r.optional_intervals("monitor", "nuggets", m.nuggets);

  r.string("output", "run_dir", cfg.output.run_dir);
  r.strings("output", "formats", cfg.output.formats);

  r.reject_unknown();
  cfg.validate();
  return cfg;
}

RunConfig parse_config_file(const std::string& path) { return parse_config_text(read_text_file(path)); }

}  // namespace kp
