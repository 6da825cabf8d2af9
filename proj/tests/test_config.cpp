#include <doctest.h>

#include <cmath>
#include <numbers>

#include "heatbayes/config.hpp"
#include "heatbayes/errors.hpp"

using namespace heatbayes;

TEST_CASE("shipped study config") {
  const auto c = load_config(HEATBAYES_SOURCE_DIR "/configs/paper.cfg");
  const auto* e = std::get_if<RotatedEllipse>(&c.domain.kind());
  REQUIRE(e != nullptr);
  CHECK(e->a == 1.0);
  CHECK(e->b == 0.75);
  CHECK(e->theta == doctest::Approx(std::numbers::pi / 6).epsilon(1e-15));
  CHECK(c.truth == "f0_paper");
  CHECK(c.conductivity == "s_paper");
  CHECK(c.T == 0.01);
  CHECK(c.sigma == 0.05);
  CHECK(c.alpha == 0.5);
  REQUIRE(c.J.has_value());
  CHECK(*c.J == 84);
  CHECK(c.n_list == std::vector<std::size_t>{100, 250, 500, 1000});
  CHECK(c.seeds.size() == 5);
}

TEST_CASE("defaults and overrides") {
  const auto c = parse_config("# only comments\n\n");
  CHECK(c.alpha == 0.5);
  CHECK_FALSE(c.J.has_value());
  const auto d = parse_config("domain = unit_disk\nJ = auto\nalpha = 0   # flat prior\nseeds = 7\nheat_steps = 250\n");
  CHECK(std::holds_alternative<UnitDisk>(d.domain.kind()));
  CHECK(d.alpha == 0.0);
  CHECK(d.seeds == std::vector<std::uint64_t>{7});
  CHECK(d.heat_steps == 250);
  const auto p = parse_config("domain = polygon\npolygon = 0 0; 2 0; 2 1; 1 1; 1 2; 0 2\n");
  CHECK(p.domain.area() == doctest::Approx(3.0));
}

TEST_CASE("malformed configs name the problem") {
  auto message = [](const char* text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("colour = blue\n").find("colour") != std::string::npos);
  CHECK(message("sigma = 0.1\nsigma = 0.2\n").find("sigma") != std::string::npos);
  CHECK(message("sigma = -1\n").find("sigma") != std::string::npos);
  CHECK(message("n_list = 500, 100\n").find("n_list") != std::string::npos);
  CHECK(message("J = many\n").find("J") != std::string::npos);
  CHECK(message("gamma = 1.5\n").find("gamma") != std::string::npos);
  CHECK(message("domain = triangle\n").find("triangle") != std::string::npos);
  CHECK(message("just words\n").find("line 1") != std::string::npos);
  CHECK(message("interval_draws = 10\n").find("interval_draws") != std::string::npos);
  CHECK_FALSE(message("ellipse_a = 0\n").empty());
  CHECK_THROWS_AS(load_config("/nonexistent/heat.cfg"), ConfigError);
}

TEST_CASE("canonical rendering round trips and hashes ignore output_dir") {
  const auto c = load_config(HEATBAYES_SOURCE_DIR "/configs/paper.cfg");
  const auto again = parse_config(canonical_config(c));
  CHECK(canonical_config(again) == canonical_config(c));
  CHECK(config_hash(again) == config_hash(c));
  auto moved = c;
  moved.output_dir = "/tmp/elsewhere";
  CHECK(config_hash(moved) == config_hash(c));
  auto changed = c;
  changed.sigma = 0.06;
  CHECK(config_hash(changed) != config_hash(c));
  CHECK(config_hash(c).size() == 16);
}
