#include <doctest.h>

#include <sstream>

#include "sinkdir/config.hpp"
#include "sinkdir/experiment.hpp"

using namespace sinkdir;

namespace {

std::string dump(const RunConfig& cfg) {
  std::ostringstream out;
  dump_config(out, cfg);
  return out.str();
}

RunConfig parse(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  load_config(cfg, in);
  return cfg;
}

}  // namespace

TEST_CASE("defaults describe the reference scenario") {
  const RunConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.n == 4000);
  CHECK(cfg.range == 300.0);
  CHECK(cfg.k == 8);
  CHECK(cfg.f == 1.1);
  CHECK(cfg.delay_max == 100);
  CHECK(cfg.protocol().variant == Variant::gated);
  CHECK(cfg.f_list.size() * cfg.k_list.size() == 36);
}

TEST_CASE("dump and load round trip") {
  RunConfig cfg;
  cfg.n = 321;
  cfg.f = 1.0 / 3.0 + 1.0;
  cfg.cost.gamma = 1.7;
  cfg.variant = Variant::time_sync;
  cfg.v = 0.0123456789;
  cfg.sink = {12.5, 0.1};
  cfg.f_list = {1.0, 1.25};
  cfg.k_list = {4, 9};
  cfg.seeds = {3, 5, 8};
  cfg.compare_gate_modes = true;
  const auto text = dump(cfg);
  const auto back = parse(text);
  CHECK(dump(back) == text);
  CHECK(back.f == cfg.f);
  CHECK(back.v == cfg.v);
  CHECK(back.seeds == cfg.seeds);
  for (auto key : config_keys()) CHECK(text.find(std::string(key) + " = ") != std::string::npos);
}

TEST_CASE("config file syntax") {
  const auto cfg = parse("# comment\n\n  n = 50   # trailing\nk=3\nk = 4\nvariant = baseline\n");
  CHECK(cfg.n == 50);
  CHECK(cfg.k == 4);
  CHECK(cfg.variant == Variant::baseline);

  CHECK_THROWS_AS(parse("bogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("n = many\n"), ConfigError);
  CHECK_THROWS_AS(parse("n = 5x\n"), ConfigError);
  CHECK_THROWS_AS(parse("n 5\n"), ConfigError);
  CHECK_THROWS_AS(parse("gate_mode = strict\n"), ConfigError);
}

TEST_CASE("validation names the bad key") {
  auto bad = [](auto mutate) {
    RunConfig cfg;
    mutate(cfg);
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  };
  bad([](RunConfig& c) { c.k = 0; });
  bad([](RunConfig& c) { c.n = 0; });
  bad([](RunConfig& c) { c.range = -1; });
  bad([](RunConfig& c) { c.f = 0.5; });
  bad([](RunConfig& c) { c.cost.a = 0; });
  bad([](RunConfig& c) { c.delay_min = 0; });
  bad([](RunConfig& c) { c.window = 0; });
  bad([](RunConfig& c) { c.f_list.clear(); });

  RunConfig cfg;
  cfg.k = 0;
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find('k') != std::string::npos);
  }
}

TEST_CASE("hash ignores seeds and output location only") {
  RunConfig a, b;
  b.seed = 99;
  b.seeds = {4, 5};
  b.out = "/elsewhere";
  b.workers = 3;
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  b.f = 1.2;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("a dumped config reproduces the run") {
  RunConfig cfg;
  cfg.n = 300;
  cfg.side = 1100;
  cfg.seed = 7;
  const auto again = parse(dump(cfg));

  auto log_of = [](const RunConfig& c) {
    const auto inst = make_instance(c, make_layout(c, c.seed), c.k);
    std::ostringstream out;
    write_event_log_csv(out, run(inst.graph, c.protocol(), c.seed));
    return out.str();
  };
  CHECK(log_of(cfg) == log_of(again));
}
