#include "tsfrac/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <fstream>
#include <memory>
#include <vector>

#include "tsfrac/errors.hpp"

namespace tsfrac {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double to_number(const std::string& key, const std::string& text) {
  try {
    return parse_double(text);
  } catch (const ArgumentError&) {
    throw IoError("config key '" + key + "' is not a number: '" + text + "'");
  }
}

// name(arg, arg, ...) -> {name, args}
std::pair<std::string, std::vector<double>> parse_call(std::string_view spec) {
  const std::string s = trim(spec);
  const auto open = s.find('(');
  if (open == std::string::npos) return {s, {}};
  if (s.back() != ')') throw IoError("malformed expression '" + s + "'");
  std::vector<double> args;
  std::string_view inner(s.data() + open + 1, s.size() - open - 2);
  std::size_t start = 0;
  while (start <= inner.size()) {
    const auto comma = inner.find(',', start);
    const auto piece = inner.substr(start, comma == std::string_view::npos ? inner.size() - start
                                                                         : comma - start);
    args.push_back(to_number(s, trim(piece)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return {trim(std::string_view(s).substr(0, open)), args};
}

void expect_args(const std::string& name, const std::vector<double>& args, std::size_t n) {
  if (args.size() != n)
    throw IoError("rhs '" + name + "' takes " + std::to_string(n) + " argument(s)");
}

}  // namespace

Config Config::parse(std::istream& in, std::filesystem::path base_dir) {
  Config cfg;
  cfg.base_ = std::move(base_dir);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw IoError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (key.empty()) throw IoError("config line " + std::to_string(lineno) + ": empty key");
    if (!cfg.entries_.emplace(key, trim(std::string_view(line).substr(eq + 1))).second)
      throw IoError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  return parse(in, path.parent_path());
}

const std::string& Config::get(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw IoError("config is missing required key '" + key + "'");
  return it->second;
}

std::string Config::get_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? get(key) : fallback;
}

double Config::number(const std::string& key) const { return to_number(key, get(key)); }

double Config::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

int Config::integer_or(const std::string& key, int fallback) const {
  if (!has(key)) return fallback;
  const double x = number(key);
  if (x != std::floor(x)) throw IoError("config key '" + key + "' must be an integer");
  return static_cast<int>(x);
}

std::filesystem::path Config::resolve(std::string_view path) const {
  std::filesystem::path p{std::string(path)};
  if (p.is_relative() && !base_.empty()) p = base_ / p;
  return p;
}

GridPtr load_grid(const Config& cfg, const std::string& key) {
  const std::string spec = cfg.get(key);
  if (spec.rfind("file:", 0) == 0) {
    const auto path = cfg.resolve(trim(std::string_view(spec).substr(5)));
    std::ifstream in(path);
    if (!in) throw IoError("cannot open grid file " + path.string());
    return share(read_grid(in));
  }
  try {
    return share(parse_grid_descriptor(spec));
  } catch (const ArgumentError& e) {
    throw IoError(std::string("bad grid '") + spec + "': " + e.what());
  }
}

RightHandSide parse_rhs(std::string_view spec_view, const Config& cfg, const GridPtr& grid,
                        double declared_L) {
  const std::string spec = trim(spec_view);
  RightHandSide rhs;
  rhs.name = spec;
  if (spec.rfind("custom-table:", 0) == 0) {
    const auto path = cfg.resolve(trim(std::string_view(spec).substr(13)));
    std::ifstream in(path);
    if (!in) throw IoError("cannot open rhs table " + path.string());
    const GridFunction table = read_function_csv(in, grid);
    if (table.defined().begin != 0 || table.defined().end != grid->size())
      throw IoError("rhs table must cover every grid point");
    auto values = std::make_shared<std::vector<double>>(table.values().begin(),
                                                        table.values().end());
    auto points = std::make_shared<std::vector<double>>(grid->points().begin(),
                                                        grid->points().end());
    rhs.fn = [values, points](double t, double) {
      auto it = std::lower_bound(points->begin(), points->end(), t);
      if (it == points->end() || *it != t) return std::numeric_limits<double>::quiet_NaN();
      return (*values)[static_cast<std::size_t>(it - points->begin())];
    };
    rhs.lipschitz = 0.0;
  } else {
    const auto [name, args] = parse_call(spec);
    if (name == "zero") {
      rhs.fn = [](double, double) { return 0.0; };
      rhs.lipschitz = 0.0;
    } else if (name == "linear") {
      expect_args(name, args, 1);
      const double l = args[0];
      rhs.fn = [l](double, double u) { return l * u; };
      rhs.lipschitz = std::abs(l);
    } else if (name == "affine") {
      expect_args(name, args, 2);
      const double l = args[0], c = args[1];
      rhs.fn = [l, c](double, double u) { return l * u + c; };
      rhs.lipschitz = std::abs(l);
    } else if (name == "logistic") {
      expect_args(name, args, 2);
      const double r = args[0], K = args[1];
      if (K == 0.0) throw IoError("logistic carrying capacity must be nonzero");
      rhs.fn = [r, K](double, double u) { return r * u * (1.0 - u / K); };
      rhs.lipschitz = std::abs(r);
    } else {
      throw IoError("unknown rhs '" + spec + "'");
    }
  }
  if (declared_L >= 0.0) rhs.lipschitz = declared_L;
  return rhs;
}

Representation parse_representation(std::string_view name) {
  const std::string n = trim(name);
  if (n == "rl-type") return Representation::RlType;
  if (n == "caputo-type") return Representation::CaputoType;
  throw IoError("representation must be rl-type or caputo-type, got '" + n + "'");
}

CauchyProblem load_problem(const Config& cfg, const GridPtr& grid, const std::string& suffix) {
  CauchyProblem p;
  p.grid = grid;
  p.alpha = cfg.number("alpha");
  p.eta = cfg.number("eta");
  p.t0_index = static_cast<std::size_t>(cfg.integer_or("t0_index", 0));
  p.representation = parse_representation(cfg.get_or("representation", "rl-type"));
  const std::string w_key = suffix.empty() ? "w" : "w" + suffix;
  const std::string rhs_key = suffix.empty() ? "rhs" : "rhs" + suffix;
  p.w = cfg.has(w_key) ? cfg.number(w_key) : cfg.number("w");
  const std::string rhs_spec = cfg.has(rhs_key) ? cfg.get(rhs_key) : cfg.get("rhs");
  const bool unperturbed = suffix.empty() || !cfg.has(rhs_key);
  p.rhs = parse_rhs(rhs_spec, cfg, grid, unperturbed ? cfg.number_or("L", -1.0) : -1.0);
  try {
    p.validate();
  } catch (const std::exception& e) {
    throw IoError(std::string("invalid problem: ") + e.what());
  }
  return p;
}

}  // namespace tsfrac
