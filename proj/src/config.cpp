#include "heatbayes/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "heatbayes/errors.hpp"

namespace heatbayes {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(const std::string& key, const std::string& raw) {
  double value = 0.0;
  const char* end = raw.data() + raw.size();
  auto [ptr, ec] = std::from_chars(raw.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ConfigError("config key '" + key + "': not a number: " + raw);
  return value;
}

// Accepts plain numbers and the forms pi, pi/B, A*pi, A*pi/B.
double parse_angle(const std::string& key, const std::string& raw) {
  const auto pos = raw.find("pi");
  if (pos == std::string::npos) return parse_number(key, raw);
  double factor = 1.0;
  double divisor = 1.0;
  const std::string head = trim(std::string_view(raw).substr(0, pos));
  const std::string tail = trim(std::string_view(raw).substr(pos + 2));
  if (!head.empty()) {
    if (head.back() != '*') throw ConfigError("config key '" + key + "': malformed angle " + raw);
    factor = parse_number(key, trim(std::string_view(head).substr(0, head.size() - 1)));
  }
  if (!tail.empty()) {
    if (tail.front() != '/') throw ConfigError("config key '" + key + "': malformed angle " + raw);
    divisor = parse_number(key, trim(std::string_view(tail).substr(1)));
  }
  return factor * std::numbers::pi / divisor;
}

double parse_positive(const std::string& key, const std::string& raw) {
  const double v = parse_number(key, raw);
  if (!(v > 0.0)) throw ConfigError("config key '" + key + "' must be positive");
  return v;
}

int parse_count(const std::string& key, const std::string& raw, int minimum) {
  const double v = parse_number(key, raw);
  if (v != std::floor(v) || v < minimum || v > 1e9) {
    throw ConfigError("config key '" + key + "' must be an integer >= " + std::to_string(minimum));
  }
  return static_cast<int>(v);
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

template <class T>
std::string join(const std::vector<T>& values) {
  std::ostringstream os;
  for (std::size_t i = 0; i < values.size(); ++i) os << (i ? ", " : "") << values[i];
  return os.str();
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key or value");
    if (!kv.emplace(key, value).second) throw ConfigError("config key '" + key + "' given twice");
  }

  ExperimentConfig c;
  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  const std::string domain = take("domain").value_or("rotated_ellipse");
  const auto a = take("ellipse_a");
  const auto b = take("ellipse_b");
  const auto theta = take("ellipse_theta");
  const auto poly = take("polygon");
  try {
    if (domain == "rotated_ellipse") {
      RotatedEllipse e;
      if (a) e.a = parse_positive("ellipse_a", *a);
      if (b) e.b = parse_positive("ellipse_b", *b);
      if (theta) e.theta = parse_angle("ellipse_theta", *theta);
      c.domain = DomainSpec(e);
    } else if (domain == "unit_square") {
      c.domain = DomainSpec(UnitSquare{});
    } else if (domain == "unit_disk") {
      c.domain = DomainSpec(UnitDisk{});
    } else if (domain == "polygon") {
      if (!poly) throw ConfigError("domain = polygon requires a 'polygon' key");
      Polygon p;
      for (const auto& vertex : split(*poly, ';')) {
        std::istringstream vs(vertex);
        Point2 q;
        std::string extra;
        if (!(vs >> q.x >> q.y) || (vs >> extra)) throw ConfigError("config key 'polygon': malformed vertex '" + vertex + "'");
        p.vertices.push_back(q);
      }
      c.domain = DomainSpec(p);
    } else {
      throw ConfigError("config key 'domain': unknown kind '" + domain + "'");
    }
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("invalid domain: ") + e.what());
  }
  if ((a || b || theta) && domain != "rotated_ellipse") throw ConfigError("ellipse_* keys require domain = rotated_ellipse");
  if (poly && domain != "polygon") throw ConfigError("'polygon' key requires domain = polygon");

  if (auto v = take("truth")) c.truth = *v;
  if (auto v = take("conductivity")) c.conductivity = *v;
  if (auto v = take("psi")) c.psi = *v;
  if (auto v = take("T")) c.T = parse_positive("T", *v);
  if (auto v = take("sigma")) c.sigma = parse_positive("sigma", *v);
  if (auto v = take("alpha")) {
    c.alpha = parse_number("alpha", *v);
    if (!(c.alpha >= 0.0)) throw ConfigError("config key 'alpha' must be >= 0");
  }
  if (auto v = take("J")) {
    if (*v == "auto") {
      c.J.reset();
    } else {
      c.J = parse_count("J", *v, 1);
    }
  }
  if (auto v = take("n_list")) {
    c.n_list.clear();
    for (const auto& item : split(*v, ',')) c.n_list.push_back(static_cast<std::size_t>(parse_count("n_list", item, 1)));
    if (!std::is_sorted(c.n_list.begin(), c.n_list.end()) ||
        std::adjacent_find(c.n_list.begin(), c.n_list.end()) != c.n_list.end()) {
      throw ConfigError("config key 'n_list' must be strictly ascending");
    }
  }
  if (auto v = take("seeds")) {
    c.seeds.clear();
    for (const auto& item : split(*v, ',')) {
      std::uint64_t s = 0;
      auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), s);
      if (ec != std::errc() || ptr != item.data() + item.size()) throw ConfigError("config key 'seeds': bad seed '" + item + "'");
      c.seeds.push_back(s);
    }
  }
  if (auto v = take("mesh_h")) c.mesh_h = parse_positive("mesh_h", *v);
  if (auto v = take("heat_steps")) {
    if (*v == "auto") {
      c.heat_steps.reset();
    } else {
      c.heat_steps = parse_count("heat_steps", *v, 1);
    }
  }
  if (auto v = take("gamma")) {
    c.gamma = parse_number("gamma", *v);
    if (!(c.gamma > 0.0 && c.gamma < 1.0)) throw ConfigError("config key 'gamma' must lie in (0, 1)");
  }
  if (auto v = take("output_dir")) c.output_dir = *v;
  if (auto v = take("data_refinement")) c.data_refinement = parse_count("data_refinement", *v, 1);
  if (auto v = take("replicates")) c.replicates = parse_count("replicates", *v, 1);
  if (auto v = take("interval_draws")) c.interval_draws = parse_count("interval_draws", *v, 100);
  if (auto v = take("cross_section_samples")) c.cross_section_samples = parse_count("cross_section_samples", *v, 1);

  if (!kv.empty()) throw ConfigError("unknown config key '" + kv.begin()->first + "'");
  if (c.seeds.empty()) throw ConfigError("config key 'seeds' must not be empty");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string canonical_config(const ExperimentConfig& c) {
  std::ostringstream os;
  std::visit(
      [&](const auto& kind) {
        using K = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<K, RotatedEllipse>) {
          os << "domain = rotated_ellipse\n"
             << "ellipse_a = " << format_double(kind.a) << "\n"
             << "ellipse_b = " << format_double(kind.b) << "\n"
             << "ellipse_theta = " << format_double(kind.theta) << "\n";
        } else if constexpr (std::is_same_v<K, UnitSquare>) {
          os << "domain = unit_square\n";
        } else if constexpr (std::is_same_v<K, UnitDisk>) {
          os << "domain = unit_disk\n";
        } else {
          os << "domain = polygon\npolygon = ";
          for (std::size_t i = 0; i < kind.vertices.size(); ++i) {
            os << (i ? "; " : "") << format_double(kind.vertices[i].x) << ' ' << format_double(kind.vertices[i].y);
          }
          os << "\n";
        }
      },
      c.domain.kind());
  os << "truth = " << c.truth << "\n"
     << "conductivity = " << c.conductivity << "\n"
     << "psi = " << c.psi << "\n"
     << "T = " << format_double(c.T) << "\n"
     << "sigma = " << format_double(c.sigma) << "\n"
     << "alpha = " << format_double(c.alpha) << "\n"
     << "J = " << (c.J ? std::to_string(*c.J) : "auto") << "\n"
     << "n_list = " << join(c.n_list) << "\n"
     << "seeds = " << join(c.seeds) << "\n"
     << "mesh_h = " << format_double(c.mesh_h) << "\n"
     << "heat_steps = " << (c.heat_steps ? std::to_string(*c.heat_steps) : "auto") << "\n"
     << "gamma = " << format_double(c.gamma) << "\n"
     << "output_dir = " << c.output_dir << "\n"
     << "data_refinement = " << c.data_refinement << "\n"
     << "replicates = " << c.replicates << "\n"
     << "interval_draws = " << c.interval_draws << "\n"
     << "cross_section_samples = " << c.cross_section_samples << "\n";
  return os.str();
}

std::string config_hash(const ExperimentConfig& config) {
  // The output location does not influence results, so it is left out.
  ExperimentConfig hashed = config;
  hashed.output_dir = ".";
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_config(hashed)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace heatbayes
