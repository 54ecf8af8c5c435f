#include "sinkdir/config.hpp"

#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace sinkdir {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw ConfigError("config: bad value '" + std::string(value) + "' for key '" +
                    std::string(key) + "'");
}

double to_double(std::string_view key, std::string_view value) {
  const std::string text(trim(value));
  char* end = nullptr;
  errno = 0;
  const double d = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE) bad_value(key, value);
  return d;
}

template <typename Int>
Int to_int(std::string_view key, std::string_view value) {
  const auto text = trim(value);
  Int out{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) bad_value(key, value);
  return out;
}

bool to_bool(std::string_view key, std::string_view value) {
  const auto text = trim(value);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  bad_value(key, value);
}

template <typename T, typename Parse>
std::vector<T> to_list(std::string_view value, Parse parse) {
  std::vector<T> out;
  std::string_view rest = value;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = trim(rest.substr(0, comma));
    if (!item.empty()) out.push_back(parse(item));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

template <typename T>
void write_list(std::ostream& out, const std::vector<T>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) out << (i ? "," : "") << values[i];
}

void require(bool ok, const char* message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

void RunConfig::validate() const {
  require(layout.empty() ? n >= 1 : true, "config: n must be >= 1");
  require(side > 0.0, "config: side must be > 0");
  require(range > 0.0, "config: range must be > 0");
  require(k >= 1, "config: k must be >= 1");
  require(f >= 1.0, "config: f must be >= 1");
  require(cost.a > 0.0, "config: a must be > 0");
  require(cost.b > 0.0, "config: b must be > 0");
  require(cost.gamma > 0.0, "config: gamma must be > 0");
  require(delay_min >= 1, "config: delay_min must be >= 1");
  require(delay_max >= delay_min, "config: delay_max must be >= delay_min");
  require(!v || *v > 0.0, "config: v must be > 0");
  require(horizon >= 1, "config: horizon must be >= 1");
  require(window >= 1, "config: window must be >= 1");
  require(workers >= 0, "config: workers must be >= 0");
  require(!f_list.empty(), "config: f_list must not be empty");
  for (double x : f_list) require(x >= 1.0, "config: every f_list entry must be >= 1");
  require(!k_list.empty(), "config: k_list must not be empty");
  for (auto x : k_list) require(x >= 1, "config: every k_list entry must be >= 1");
  require(!seeds.empty(), "config: seeds must not be empty");
}

ProtocolConfig RunConfig::protocol() const {
  ProtocolConfig p;
  p.variant = variant;
  p.f = f;
  p.gate_mode = gate_mode;
  p.delay_min = delay_min;
  p.delay_max = delay_max;
  p.v = v;
  return p;
}

const std::vector<std::string_view>& config_keys() {
  static const std::vector<std::string_view> keys{
      "n",       "side",      "range",     "k",       "f",       "gate_mode",
      "variant", "a",         "b",         "gamma",   "sink_x",  "sink_y",
      "seed",    "delay_min", "delay_max", "v",       "horizon", "window",
      "layout",  "out",       "workers",   "f_list",  "k_list",  "seeds",
      "compare_gate_modes"};
  return keys;
}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
  try {
    if (key == "n") cfg.n = to_int<std::size_t>(key, value);
    else if (key == "side") cfg.side = to_double(key, value);
    else if (key == "range") cfg.range = to_double(key, value);
    else if (key == "k") cfg.k = to_int<std::size_t>(key, value);
    else if (key == "f") cfg.f = to_double(key, value);
    else if (key == "gate_mode") cfg.gate_mode = parse_gate_mode(trim(value));
    else if (key == "variant") cfg.variant = parse_variant(trim(value));
    else if (key == "a") cfg.cost.a = to_double(key, value);
    else if (key == "b") cfg.cost.b = to_double(key, value);
    else if (key == "gamma") cfg.cost.gamma = to_double(key, value);
    else if (key == "sink_x") cfg.sink.x = to_double(key, value);
    else if (key == "sink_y") cfg.sink.y = to_double(key, value);
    else if (key == "seed") cfg.seed = to_int<std::uint64_t>(key, value);
    else if (key == "delay_min") cfg.delay_min = to_int<TimeStep>(key, value);
    else if (key == "delay_max") cfg.delay_max = to_int<TimeStep>(key, value);
    else if (key == "v") {
      if (trim(value).empty()) cfg.v.reset();
      else cfg.v = to_double(key, value);
    } else if (key == "horizon") cfg.horizon = to_int<TimeStep>(key, value);
    else if (key == "window") cfg.window = to_int<std::size_t>(key, value);
    else if (key == "layout") cfg.layout = std::string(trim(value));
    else if (key == "out") cfg.out = std::string(trim(value));
    else if (key == "workers") cfg.workers = to_int<int>(key, value);
    else if (key == "f_list")
      cfg.f_list = to_list<double>(value, [&](std::string_view s) { return to_double(key, s); });
    else if (key == "k_list")
      cfg.k_list = to_list<std::size_t>(
          value, [&](std::string_view s) { return to_int<std::size_t>(key, s); });
    else if (key == "seeds")
      cfg.seeds = to_list<std::uint64_t>(
          value, [&](std::string_view s) { return to_int<std::uint64_t>(key, s); });
    else if (key == "compare_gate_modes") cfg.compare_gate_modes = to_bool(key, value);
    else throw ConfigError("config: unknown key '" + std::string(key) + "'");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

void load_config(RunConfig& cfg, std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos)
      text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config: line " + std::to_string(line_no) + " is not 'key = value'");
    apply_setting(cfg, trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
  }
}

namespace {

void dump_filtered(std::ostream& out, const RunConfig& cfg, bool for_hash) {
  out << std::setprecision(17);
  out << "n = " << cfg.n << '\n'
      << "side = " << cfg.side << '\n'
      << "range = " << cfg.range << '\n'
      << "k = " << cfg.k << '\n'
      << "f = " << cfg.f << '\n'
      << "gate_mode = " << to_string(cfg.gate_mode) << '\n'
      << "variant = " << to_string(cfg.variant) << '\n'
      << "a = " << cfg.cost.a << '\n'
      << "b = " << cfg.cost.b << '\n'
      << "gamma = " << cfg.cost.gamma << '\n'
      << "sink_x = " << cfg.sink.x << '\n'
      << "sink_y = " << cfg.sink.y << '\n';
  if (!for_hash) out << "seed = " << cfg.seed << '\n';
  out << "delay_min = " << cfg.delay_min << '\n' << "delay_max = " << cfg.delay_max << '\n';
  out << "v = ";
  if (cfg.v) out << *cfg.v;
  out << '\n'
      << "horizon = " << cfg.horizon << '\n'
      << "window = " << cfg.window << '\n'
      << "layout = " << cfg.layout << '\n';
  if (!for_hash) out << "out = " << cfg.out << '\n' << "workers = " << cfg.workers << '\n';
  out << "f_list = ";
  write_list(out, cfg.f_list);
  out << "\nk_list = ";
  write_list(out, cfg.k_list);
  out << '\n';
  if (!for_hash) {
    out << "seeds = ";
    write_list(out, cfg.seeds);
    out << '\n';
  }
  out << "compare_gate_modes = " << (cfg.compare_gate_modes ? "true" : "false") << '\n';
}

}  // namespace

void dump_config(std::ostream& out, const RunConfig& cfg) { dump_filtered(out, cfg, false); }

std::string config_hash(const RunConfig& cfg) {
  std::ostringstream text;
  dump_filtered(text, cfg, true);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text.str()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << h;
  return hex.str();
}

}  // namespace sinkdir
