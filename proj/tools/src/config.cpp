#include "hflow_cli/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <sstream>
#include <string_view>

#include "hflow/errors.hpp"
#include "hflow/io.hpp"

namespace hflow::cli {

namespace {

constexpr std::array<std::string_view, 20> kKeys = {
    "backend",       "n",            "a",           "alpha",         "curvature.family",
    "curvature.param1", "curvature.param2", "k",     "N",             "u0.kind",
    "u0.radius",     "u0.amp",       "u0.mode",     "cfl_safety",    "t_max",
    "tol_converged", "output_every", "recenter.max_grad", "recenter.min_u", "seed"};

constexpr std::array<std::string_view, 8> kRequired = {
    "backend", "n", "a", "curvature.family", "k", "N", "u0.kind", "u0.radius"};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string message_with_line(const std::string& key, int line, const std::string& msg) {
  std::ostringstream os;
  os << "config error";
  if (line > 0) os << " at line " << line;
  os << " (key '" << key << "'): " << msg;
  return os.str();
}

class Reader {
 public:
  explicit Reader(const RawConfig& raw) : raw_(raw) {}

  bool has(const std::string& key) const { return raw_.count(key) != 0; }
  int line(const std::string& key) const {
    auto it = raw_.find(key);
    return it == raw_.end() ? 0 : it->second.line;
  }
  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    throw ConfigError(key, line(key), msg);
  }

  const std::string& str(const std::string& key) const {
    auto it = raw_.find(key);
    if (it == raw_.end()) fail(key, "missing required key");
    return it->second.value;
  }

  double real(const std::string& key) const {
    const std::string& s = str(key);
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
      fail(key, "expected a finite real number, got '" + s + "'");
    }
    return v;
  }
  double real(const std::string& key, double fallback) const {
    return has(key) ? real(key) : fallback;
  }

  long long integer(const std::string& key) const {
    const std::string& s = str(key);
    long long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
      fail(key, "expected an integer, got '" + s + "'");
    }
    return v;
  }
  long long integer(const std::string& key, long long fallback) const {
    return has(key) ? integer(key) : fallback;
  }

  // integer-valued parameter given as a real (curvature.param1 = 2)
  int whole(const std::string& key) const {
    const double v = real(key);
    if (v != std::floor(v) || std::abs(v) > 1e6) fail(key, "expected an integer value");
    return static_cast<int>(v);
  }

 private:
  const RawConfig& raw_;
};

}  // namespace

ConfigError::ConfigError(const std::string& key, int line, const std::string& message)
    : std::runtime_error(message_with_line(key, line, message)), key_(key), line_(line) {}

RawConfig parse_raw(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(body, lineno, "expected 'key = value'");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
      throw ConfigError(key, lineno, "unknown key");
    }
    if (value.empty()) throw ConfigError(key, lineno, "empty value");
    if (raw.count(key)) throw ConfigError(key, lineno, "duplicate key");
    raw[key] = RawEntry{value, lineno};
  }
  return raw;
}

RawConfig with_override(RawConfig raw, const std::string& key, const std::string& value) {
  if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
    throw ConfigError(key, 0, "unknown key");
  }
  raw[key] = RawEntry{value, 0};
  return raw;
}

RunConfig build_config(const RawConfig& raw) {
  const Reader r(raw);
  for (auto key : kRequired) r.str(std::string(key));

  RunConfig out;
  out.raw = raw;
  FlowConfig& c = out.flow;

  const long long n = r.integer("n");
  if (n < 1 || n > 64) r.fail("n", "must be an integer in [1, 64]");
  const double a = r.real("a");
  if (!(a > 0.0)) r.fail("a", "must be positive");
  c.ambient = AmbientParams(a, static_cast<int>(n));

  const double alpha = r.real("alpha", a);
  if (!(alpha >= 0.0)) r.fail("alpha", "must be non-negative");

  Backend backend{};
  try {
    backend = backend_from_string(r.str("backend"));
  } catch (const DomainError& e) {
    r.fail("backend", e.what());
  }
  if (backend == Backend::FullCircle && n != 1) r.fail("backend", "FullCircle requires n = 1");

  Family family{};
  try {
    family = family_from_string(r.str("curvature.family"));
  } catch (const DomainError& e) {
    r.fail("curvature.family", e.what());
  }
  double p1 = 0.0, p2 = 0.0;
  switch (family) {
    case Family::MeanH:
    case Family::NormA:
      break;
    case Family::CompletelySymmetric: {
      const int kk = r.whole("curvature.param1");
      if (kk < 1 || kk > n) r.fail("curvature.param1", "CompletelySymmetric needs 1 <= k <= n");
      p1 = kk;
      break;
    }
    case Family::ElemSymmetricQuotient: {
      const int kk = r.whole("curvature.param1");
      const int ll = r.whole("curvature.param2");
      if (kk > n || kk < 1) r.fail("curvature.param1", "ElemSymmetricQuotient needs 1 <= k <= n");
      if (ll < 0 || ll >= kk) r.fail("curvature.param2", "ElemSymmetricQuotient needs 0 <= l < k");
      p1 = kk;
      p2 = ll;
      break;
    }
    case Family::PowerMean:
      p1 = r.real("curvature.param1");
      if (!(std::abs(p1) <= 1.0)) r.fail("curvature.param1", "PowerMean needs |r| <= 1");
      break;
  }
  c.curvature = CurvatureSpec::make(family, static_cast<int>(n), p1, p2, alpha);

  const long long k = r.integer("k");
  if (k < 0 || k > n) r.fail("k", "must be in {0..n}");
  c.k = static_cast<int>(k);

  const long long N = r.integer("N");
  if (N < 8 || N > (1 << 20)) r.fail("N", "must be an integer in [8, 1048576]");
  c.initial.backend = backend;
  c.initial.N = static_cast<std::size_t>(N);

  try {
    c.initial.kind = initial_shape_from_string(r.str("u0.kind"));
  } catch (const DomainError& e) {
    r.fail("u0.kind", e.what());
  }
  c.initial.radius = r.real("u0.radius");
  if (!(c.initial.radius > 0.0)) r.fail("u0.radius", "must be positive");
  c.initial.amp = r.real("u0.amp", 0.0);
  if (!(std::abs(c.initial.amp) < c.initial.radius)) {
    r.fail("u0.amp", "|amp| must be smaller than u0.radius");
  }
  const long long mode = r.integer("u0.mode", 1);
  if (mode < 0 || mode > 1000) r.fail("u0.mode", "must be in [0, 1000]");
  c.initial.mode = static_cast<int>(mode);

  c.cfl_safety = r.real("cfl_safety", 0.3);
  if (!(c.cfl_safety > 0.0 && c.cfl_safety < 1.0)) r.fail("cfl_safety", "must be in (0, 1)");
  c.t_max = r.real("t_max", 50.0);
  if (!(c.t_max > 0.0)) r.fail("t_max", "must be positive");
  c.tol_converged = r.real("tol_converged", 1e-8);
  if (!(c.tol_converged > 0.0)) r.fail("tol_converged", "must be positive");
  const long long every = r.integer("output_every", 100);
  if (every < 1) r.fail("output_every", "must be >= 1");
  c.output_every = static_cast<std::size_t>(every);
  c.max_gradient_before_recenter = r.real("recenter.max_grad", 2.0);
  if (!(c.max_gradient_before_recenter > 0.0)) r.fail("recenter.max_grad", "must be positive");
  c.min_u_before_recenter = r.real("recenter.min_u", 0.1 / a);
  if (!(c.min_u_before_recenter > 0.0)) r.fail("recenter.min_u", "must be positive");
  const long long seed = r.integer("seed", 0);
  if (seed < 0) r.fail("seed", "must be non-negative");
  out.seed = static_cast<std::uint64_t>(seed);
  c.initial.seed = out.seed;

  try {
    validate(c);
  } catch (const DomainError& e) {
    throw ConfigError("(config)", 0, e.what());
  }
  return out;
}

RunConfig parse_config_text(const std::string& text) { return build_config(parse_raw(text)); }

RunConfig parse_config(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError("(file)", 0, e.what());
  }
  return parse_config_text(text);
}

}  // namespace hflow::cli
