#include "impactflow/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "impactflow/csv.hpp"
#include "impactflow/errors.hpp"

namespace impactflow {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + what);
}

double parse_double(std::string_view v, const std::string& origin, int line,
                    const std::string& key) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    fail(origin, line, "malformed number for '" + key + "': '" + std::string(v) + "'");
  }
  return out;
}

std::int64_t parse_int(std::string_view v, const std::string& origin, int line,
                       const std::string& key) {
  std::int64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    fail(origin, line, "malformed integer for '" + key + "': '" + std::string(v) + "'");
  }
  return out;
}

bool parse_bool(std::string_view v, const std::string& origin, int line,
                const std::string& key) {
  if (v == "true") return true;
  if (v == "false") return false;
  fail(origin, line, "malformed boolean for '" + key + "': expected true or false");
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string RunConfig::canonical_dump() const {
  std::ostringstream out;
  out << "dp.grid_m=" << grid_m << '\n';
  out << "dp.n=" << n << '\n';
  out << "dp.phi0=" << format_double(phi0) << '\n';
  out << "impact.alpha0=" << format_double(alpha0) << '\n';
  out << "impact.p=" << p << '\n';
  out << "io.plots=" << (plots ? "true" : "false") << '\n';
  out << "io.values_stride=" << values_stride << '\n';
  out << "market.bound=" << format_double(bound) << '\n';
  out << "market.horizon=" << format_double(horizon) << '\n';
  out << "market.mu_tilde=" << format_double(mu_tilde) << '\n';
  out << "market.sigma=" << format_double(sigma) << '\n';
  out << "mc.mode=" << (mode == MiMode::random ? "random" : "deterministic") << '\n';
  out << "mc.paths=" << paths << '\n';
  out << "mc.steps=" << steps << '\n';
  out << "noise.alpha1=" << format_double(noise.alpha1) << '\n';
  out << "noise.beta1=" << format_double(noise.beta1) << '\n';
  out << "noise.gamma=" << format_double(noise.gamma) << '\n';
  out << "strategy.delta=" << format_double(strategy_delta) << '\n';
  out << "strategy.file=" << strategy_file << '\n';
  out << "strategy.kind=" << strategy_kind << '\n';
  out << "strategy.psi=" << format_double(strategy_psi) << '\n';
  out << "strategy.rate=" << format_double(strategy_rate) << '\n';
  out << "value.s=" << format_double(s) << '\n';
  out << "value.w=" << format_double(w) << '\n';
  return out.str();
}

MarketSpec RunConfig::market_spec() const {
  return MarketSpec::from_mu_tilde(mu_tilde, sigma, bound);
}

ImpactSpec RunConfig::impact_spec() const {
  ImpactSpec spec;
  spec.p = p;
  spec.alpha0 = alpha0;
  spec.validate();
  return spec;
}

SimConfig RunConfig::sim_config() const {
  SimConfig config;
  config.market = market_spec();
  config.impact = impact_spec();
  config.noise = noise;
  config.phi0 = phi0;
  config.s0 = s;
  config.w0 = w;
  config.horizon = horizon;
  config.steps = steps;
  config.mode = mode;
  config.validate();
  return config;
}

DpParams RunConfig::dp_params() const {
  DpParams params;
  params.n = n;
  params.k_max = static_cast<std::int64_t>(
      std::floor(static_cast<double>(n) * horizon + 1e-9));
  params.mu_tilde = mu_tilde;
  params.impact = impact_spec();
  params.noise = noise;
  params.phi_max = phi0;
  params.grid_m = grid_m;
  return params;
}

Strategy RunConfig::strategy() const {
  if (strategy_kind == "near-block") {
    return Strategy::near_block(strategy_psi, strategy_delta, horizon);
  }
  if (strategy_kind == "constant") {
    return Strategy::constant(strategy_rate, horizon);
  }
  if (strategy_kind == "zero") {
    return Strategy::zero(horizon);
  }
  if (strategy_kind == "file") {
    if (strategy_file.empty()) {
      throw ConfigError("strategy.kind = file requires strategy.file");
    }
    return load_strategy_csv(strategy_file, horizon);
  }
  throw ConfigError("unknown strategy.kind '" + strategy_kind +
                    "' (expected near-block, constant, zero, or file)");
}

RunConfig parse_config_text(std::string_view text, const std::string& origin) {
  RunConfig config;
  std::vector<std::string> seen;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                           : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(origin, line_no, "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section != "market" && section != "impact" && section != "noise" &&
          section != "dp" && section != "mc" && section != "strategy" &&
          section != "value" && section != "io") {
        fail(origin, line_no, "unknown section [" + section + "]");
      }
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) fail(origin, line_no, "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (section.empty()) fail(origin, line_no, "key '" + key + "' outside any section");
    const std::string qualified = section + "." + key;
    if (std::find(seen.begin(), seen.end(), qualified) != seen.end()) {
      fail(origin, line_no, "duplicate key '" + qualified + "'");
    }
    seen.push_back(qualified);

    if (qualified == "market.sigma") {
      config.sigma = parse_double(value, origin, line_no, qualified);
    } else if (qualified == "market.mu_tilde") {
      config.mu_tilde = parse_double(value, origin, line_no, qualified);
    } else if (qualified == "market.bound") {
      config.bound = parse_double(value, origin, line_no, qualified);
    } else if (qualified == "market.horizon") {
      config.horizon = parse_double(value, origin, line_no, qualified);
    } else if (qualified == "impact.p") {
      config.p = static_cast<int>(parse_int(value, origin, line_no, qualified));
    } else if (qualified == "impact.alpha0") {
      config.alpha0 = parse_double(value, origin, line_no, qualified);
    } else if (qualified == "noise.gamma") {
      config.noise.gamma = parse_double(value, origin, line_no, qualified);
    } else if (qualified == "noise.alpha1") {
      config.noise.alpha1 = parse_double(value, origin, line_no, qualified);
    } else if (qualified == "noise.beta1") {
      config.noise.beta1 = parse_double(value, origin, line_no, qualified);
    } else if (qualified == "dp.n") {
      config.n = parse_int(value, origin, line_no, qualified);
    } else if (qualified == "dp.phi0") {
      config.phi0 = parse_double(value, origin, line_no, qualified);
    } else if (qualified == "dp.grid_m") {
      config.grid_m = parse_int(value, origin, line_no, qualified);
    } else if (qualified == "mc.paths") {
      config.paths = parse_int(value, origin, line_no, qualified);
    } else if (qualified == "mc.steps") {
      config.steps = parse_int(value, origin, line_no, qualified);
    } else if (qualified == "mc.mode") {
      if (value == "random") {
        config.mode = MiMode::random;
      } else if (value == "deterministic") {
        config.mode = MiMode::deterministic;
      } else {
        fail(origin, line_no, "mc.mode must be random or deterministic");
      }
    } else if (qualified == "strategy.kind") {
      config.strategy_kind = std::string(value);
    } else if (qualified == "strategy.psi") {
      config.strategy_psi = parse_double(value, origin, line_no, qualified);
    } else if (qualified == "strategy.delta") {
      config.strategy_delta = parse_double(value, origin, line_no, qualified);
    } else if (qualified == "strategy.rate") {
      config.strategy_rate = parse_double(value, origin, line_no, qualified);
    } else if (qualified == "strategy.file") {
      config.strategy_file = std::string(value);
    } else if (qualified == "value.w") {
      config.w = parse_double(value, origin, line_no, qualified);
    } else if (qualified == "value.s") {
      config.s = parse_double(value, origin, line_no, qualified);
    } else if (qualified == "io.plots") {
      config.plots = parse_bool(value, origin, line_no, qualified);
    } else if (qualified == "io.values_stride") {
      config.values_stride = parse_int(value, origin, line_no, qualified);
    } else {
      fail(origin, line_no, "unknown key '" + key + "' in [" + section + "]");
    }
  }
  return config;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

Strategy load_strategy_csv(const std::string& path, double horizon) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open strategy file '" + path + "'");
  std::vector<double> edges;
  std::vector<double> rates;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view sv = trim(line);
    if (sv.empty() || sv.front() == '#' || sv.front() == ';') continue;
    const std::size_t comma = sv.find(',');
    if (comma == std::string_view::npos) {
      fail(path, line_no, "expected 't,zeta'");
    }
    const std::string_view t_sv = trim(sv.substr(0, comma));
    const std::string_view z_sv = trim(sv.substr(comma + 1));
    double t = 0.0;
    auto [tp, tec] = std::from_chars(t_sv.data(), t_sv.data() + t_sv.size(), t);
    if (tec != std::errc() || tp != t_sv.data() + t_sv.size()) {
      if (edges.empty() && t_sv == "t") continue;  // header row
      fail(path, line_no, "malformed time '" + std::string(t_sv) + "'");
    }
    const double z = parse_double(z_sv, path, line_no, "zeta");
    edges.push_back(t);
    rates.push_back(z);
  }
  if (edges.empty()) throw ConfigError(path + ": no strategy rows");
  edges.push_back(horizon);
  Strategy strategy{std::move(edges), std::move(rates)};
  strategy.validate();
  return strategy;
}

}  // namespace impactflow
