#include "lureobs/config_io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace lureobs {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double to_double(const std::string& raw, const std::string& where) {
  const std::string s = trim(raw);
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError(where + ": expected a number, got '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v))
    throw ConfigError(where + ": expected a number, got '" + s + "'");
  return v;
}

int to_int(const std::string& raw, const std::string& where) {
  const double v = to_double(raw, where);
  const int i = static_cast<int>(std::lround(v));
  if (v != static_cast<double>(i))
    throw ConfigError(where + ": expected an integer, got '" + trim(raw) + "'");
  return i;
}

Mat parse_matrix(const std::string& raw, const std::string& where) {
  const std::string s = trim(raw);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']')
    throw ConfigError(where + ": matrix literal must be bracketed [..]");
  const std::string body = s.substr(1, s.size() - 2);
  std::vector<std::vector<double>> rows;
  for (const std::string& row_text : split(body, ';')) {
    std::istringstream cells(row_text);
    std::vector<double> row;
    std::string cell;
    while (cells >> cell) row.push_back(to_double(cell, where));
    if (row.empty())
      throw ConfigError(where + ": empty matrix row");
    if (!rows.empty() && row.size() != rows.front().size())
      throw ConfigError(where + ": ragged matrix rows");
    rows.push_back(std::move(row));
  }
  Mat m(static_cast<Eigen::Index>(rows.size()),
        static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

Vec parse_vector(const std::string& raw, const std::string& where) {
  Mat m = parse_matrix(raw, where);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw ConfigError(where + ": expected a vector, got a " +
                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                    " matrix");
}

struct KeyValues {
  std::map<std::string, std::string> kv;
  std::string path;

  bool has(const std::string& key) const { return kv.count(key) != 0; }

  const std::string& get(const std::string& key) const {
    auto it = kv.find(key);
    if (it == kv.end())
      throw ConfigError(path + ": missing required key '" + key + "'");
    return it->second;
  }

  double number(const std::string& key) const {
    return to_double(get(key), path + ": " + key);
  }
  int integer(const std::string& key) const {
    return to_int(get(key), path + ": " + key);
  }
  Mat matrix(const std::string& key) const {
    return parse_matrix(get(key), path + ": " + key);
  }
  Vec vector(const std::string& key) const {
    return parse_vector(get(key), path + ": " + key);
  }
};

KeyValues read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  KeyValues out;
  out.path = path;
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
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    if (!out.kv.emplace(key, value).second)
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": duplicate key '" + key + "'");
  }
  return out;
}

SetValuedMap parse_fop(const std::string& raw, int m,
                       const std::string& where) {
  std::istringstream in(trim(raw));
  std::string name;
  in >> name;
  if (name == "sign") {
    std::string extra;
    if (in >> extra) throw ConfigError(where + ": 'sign' takes no arguments");
    return SetValuedMap::sign_map(m);
  }
  if (name == "relay") {
    if (m != 1)
      throw ConfigError(where + ": relay feedback requires m = 1");
    std::string a, b, extra;
    if (!(in >> a >> b) || (in >> extra))
      throw ConfigError(where + ": relay takes exactly two numbers: "
                                "'relay SLOPE OFFSET'");
    return SetValuedMap::relay(to_double(a, where), to_double(b, where));
  }
  throw ConfigError(where + ": unknown feedback map '" + name +
                    "' (known: sign, relay SLOPE OFFSET)");
}

[[noreturn]] void unknown_name(const std::string& slot,
                               const std::string& name,
                               const std::string& known) {
  throw ConfigError("unknown " + slot + " function '" + name +
                    "' (known: " + known + ")");
}

void require_dims(bool ok, const std::string& name, const std::string& need) {
  if (!ok)
    throw ConfigError("function '" + name + "' requires " + need);
}

}  // namespace

StateFn registry_f1(const std::string& name, const SystemDims& dims) {
  if (name == "zero") return zero_state_fn();
  if (name == "example1_mu") {
    require_dims(dims.n == 1, name, "n = 1");
    return [](const Vec& x, const Vec&) {
      Vec v(1);
      v[0] = 3.0 * std::sin(x[0]);
      return v;
    };
  }
  if (name == "example2_f1") {
    require_dims(dims.n == 3 && dims.r == 1, name, "n = 3, r = 1");
    return [](const Vec& x, const Vec& u) {
      Vec v(3);
      v[0] = 3.0 * u[0] + 0.8 * std::sin(x[1]);
      v[1] = 2.0 * u[0] + 0.9 * std::cos(x[0]);
      v[2] = -u[0] + 0.8 * std::sin(x[2]);
      return v;
    };
  }
  if (name == "reduced_f1") {
    require_dims(dims.n == 2, name, "n = 2");
    return [](const Vec& x, const Vec&) {
      Vec v(2);
      v[0] = 0.0;
      v[1] = 0.5 * std::sin(x[1]) + 1.0;
      return v;
    };
  }
  unknown_name("f1", name, "zero, example1_mu, example2_f1, reduced_f1");
}

MatrixFn registry_f2(const std::string& name, const SystemDims& dims) {
  if (name == "zero") return zero_matrix_fn(dims.l);
  if (name == "example2_f2") {
    require_dims(dims.n == 3 && dims.l == 1, name, "n = 3, l = 1");
    return [](const Vec& x, const Vec&) {
      Mat m = Mat::Zero(3, 1);
      m(0, 0) = 3.0 * std::sin(x[1]);
      return m;
    };
  }
  unknown_name("f2", name, "zero, example2_f2");
}

ThetaFn registry_theta(const std::string& name, const SystemDims& dims) {
  if (name == "zero") return zero_theta_fn(dims.l);
  if (name == "example2_theta") {
    require_dims(dims.l == 1, name, "l = 1");
    return [](double t, const Vec&, const Vec&) {
      Vec v(1);
      v[0] = 3.0 * std::sin(t);
      return v;
    };
  }
  unknown_name("theta", name, "zero, example2_theta");
}

InputFn registry_input(const std::string& name, const SystemDims& dims) {
  if (name == "zero") return zero_input_fn(dims.r);
  if (name == "example2_input") {
    require_dims(dims.r == 1, name, "r = 1");
    return [](double t) {
      Vec v(1);
      v[0] = 8.0 * std::cos(t);
      return v;
    };
  }
  unknown_name("input", name, "zero, example2_input");
}

ParsedSystem parse_system_file(const std::string& path) {
  const KeyValues kv = read_key_values(path);
  ParsedSystem out;

  SystemDims dims;
  dims.n = kv.integer("n");
  dims.m = kv.integer("m");
  dims.p = kv.integer("p");
  dims.r = kv.integer("r");
  dims.l = kv.integer("l");

  LureSystem& sys = out.sys;
  sys.dims = dims;
  sys.A = kv.matrix("A");
  sys.B = kv.matrix("B");
  sys.C = kv.matrix("C");
  sys.F = kv.matrix("F");
  sys.fop = parse_fop(kv.get("fop"), dims.m, path + ": fop");
  sys.f1 = registry_f1(kv.has("f1") ? trim(kv.get("f1")) : "zero", dims);
  sys.f2 = registry_f2(kv.has("f2") ? trim(kv.get("f2")) : "zero", dims);
  sys.theta =
      registry_theta(kv.has("theta") ? trim(kv.get("theta")) : "zero", dims);
  sys.input =
      registry_input(kv.has("input") ? trim(kv.get("input")) : "zero", dims);
  try {
    sys.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }

  out.bounds.L1 = kv.number("L1");
  out.bounds.L2 = kv.has("L2") ? kv.number("L2") : 0.0;
  out.bounds.L3 = kv.has("L3") ? kv.number("L3") : 0.0;
  if (kv.has("L4")) out.bounds.L4 = kv.number("L4");

  auto read_state = [&](const char* key) -> std::optional<Vec> {
    if (!kv.has(key)) return std::nullopt;
    Vec v = kv.vector(key);
    return v;
  };
  out.x0 = read_state("x0");
  out.xhat0 = read_state("xhat0");
  out.zhat0 = read_state("zhat0");
  if (out.x0 && out.x0->size() != dims.n)
    throw ConfigError(path + ": x0 must have n entries");
  if (out.xhat0 && out.xhat0->size() != dims.n)
    throw ConfigError(path + ": xhat0 must have n entries");
  return out;
}

ParsedGains parse_gains_file(const std::string& path) {
  const KeyValues kv = read_key_values(path);
  ParsedGains out;
  if (kv.has("Q")) {
    ReducedGains rg;
    out.q = kv.integer("q");
    rg.Q = kv.matrix("Q");
    rg.P21 = kv.matrix("P21");
    rg.P22 = kv.matrix("P22");
    rg.epsilon = kv.number("epsilon");
    try {
      rg.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(path + ": " + e.what());
    }
    out.reduced = std::move(rg);
    return out;
  }
  ObserverGains g;
  g.P = kv.matrix("P");
  g.L = kv.matrix("L");
  g.K = kv.matrix("K");
  g.beta = kv.number("beta");
  g.epsilon = kv.number("epsilon");
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
  out.full = std::move(g);
  return out;
}

SignMode parse_sign_mode(const std::string& text) {
  const std::vector<std::string> parts = split(trim(text), ':');
  const std::string head = trim(parts[0]);
  const std::string where = "sign mode '" + trim(text) + "'";
  if (head == "exact") {
    if (parts.size() != 1) throw ConfigError(where + ": 'exact' takes no fields");
    return SignMode::exact();
  }
  if (head == "sigmoid") {
    if (parts.size() != 3)
      throw ConfigError(where + ": expected sigmoid:EPS:abs|sqrt");
    const double eps = to_double(parts[1], where);
    const std::string variant = trim(parts[2]);
    if (variant != "abs" && variant != "sqrt")
      throw ConfigError(where + ": variant must be abs or sqrt");
    if (!(eps > 0)) throw ConfigError(where + ": eps must be > 0");
    return SignMode::sigmoid(
        eps, variant == "abs" ? SigmoidVariant::Abs : SigmoidVariant::Sqrt);
  }
  if (head == "guided") {
    if (parts.size() != 5)
      throw ConfigError(where + ": expected guided:K1:K2:M:N");
    GuidedSignParams p;
    p.k1 = to_double(parts[1], where);
    p.k2 = to_double(parts[2], where);
    p.M = to_double(parts[3], where);
    p.N = to_double(parts[4], where);
    try {
      p.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ": " + e.what());
    }
    return SignMode::guided(p);
  }
  throw ConfigError(where + ": expected exact, sigmoid:..., or guided:...");
}

}  // namespace lureobs
