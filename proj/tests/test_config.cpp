#include <gtest/gtest.h>

#include <string>

#include "hadp/config.hpp"

using namespace hadp;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST(Config, Sec5Defaults) {
  const RunConfig c = parse_config(R"({"model": "paper-sec5"})");
  EXPECT_EQ(c.game.spec.gamma2, 0.6);
  EXPECT_EQ(c.tuning.tau, (std::vector<double>{0.7, 0.7, 0.6}));
  EXPECT_EQ(c.tuning.theta, (std::vector<double>{0.7, 0.7, 0.7}));
  EXPECT_EQ(c.tuning.varrho, 0.6);
  EXPECT_EQ(c.tuning.F2, (std::vector<double>{200, 200, 200}));
  for (const Vector& f : c.tuning.F1) EXPECT_EQ(f, Vector::Constant(5, 100.0));
  EXPECT_EQ(c.sim.x0, Vector::Constant(2, 0.01));
  EXPECT_EQ(c.game.spec.S[0](0, 0), 4.0);
  EXPECT_EQ(c.game.spec.S[1](0, 0), 2.0);
  EXPECT_EQ(c.game.spec.S[2](0, 0), 20.0);
  EXPECT_EQ(c.sim.dt, 1e-3);
  EXPECT_EQ(c.game.mu(), 5);
}

TEST(Config, EmptyDocumentIsSchemaError) {
  EXPECT_FALSE(error_of("").empty());
  EXPECT_FALSE(error_of("null").empty());
  EXPECT_TRUE(contains(error_of("{}"), "'model'"));
}

TEST(Config, NegativeControlWeightCitesInvariant) {
  const std::string err =
      error_of(R"({"model": "paper-sec5", "game": {"R": [[-1, 1], [1, 1], [1, 1]]}})");
  EXPECT_TRUE(contains(err, "R_ii must be positive definite")) << err;
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_TRUE(contains(error_of(R"({"model": "paper-sec5", "tunning": {}})"), "unknown key 'tunning'"));
  const std::string err = error_of(R"({"model": "paper-sec5", "sim": {"dtt": 0.1}})");
  EXPECT_TRUE(contains(err, "unknown key 'sim.dtt'")) << err;
}

TEST(Config, WrongTypeNamesKey) {
  const std::string err = error_of(R"({"model": "paper-sec5", "sim": {"dt": "fast"}})");
  EXPECT_TRUE(contains(err, "'sim.dt'")) << err;
}

TEST(Config, UnknownModelAndEnum) {
  EXPECT_TRUE(contains(error_of(R"({"model": "nope"})"), "unknown model"));
  const std::string err =
      error_of(R"({"model": "paper-sec5", "leader": {"wnu_mode": "symbolic"}})");
  EXPECT_TRUE(contains(err, "leader.wnu_mode")) << err;
}

TEST(Config, InvalidJson) {
  EXPECT_TRUE(contains(error_of("{model: 1"), "not valid JSON"));
}

TEST(Config, OverridesApply) {
  const RunConfig c = parse_config(R"({
    "model": "paper-sec5",
    "tuning": {"F2": [50, 60, 70]},
    "sim": {"dt": 0.002, "t_end": 3, "probing": {"amplitude": 0, "cutoff": "off"},
            "disturbance": {"kind": "none"}},
    "leader": {"apply": "fixed-point", "actor_sum": "followers-only"}
  })");
  EXPECT_EQ(c.tuning.F2, (std::vector<double>{50, 60, 70}));
  EXPECT_EQ(c.sim.dt, 0.002);
  EXPECT_EQ(c.sim.probing.cutoff, ProbingCutoff::kOff);
  EXPECT_EQ(c.sim.disturbance.kind, DisturbanceConfig::Kind::kNone);
  EXPECT_EQ(c.sim.leader.apply, LeaderApply::kFixedPoint);
  EXPECT_EQ(c.sim.leader.actor_sum, ActorSum::kFollowersOnly);
}

TEST(Config, ResolvedJsonRoundTrips) {
  const RunConfig a = parse_config(R"({"model": "paper-sec5", "sim": {"t_end": 12.5}})");
  const std::string ja = resolved_json(a);
  const RunConfig b = parse_config(ja);
  EXPECT_EQ(resolved_json(b), ja);
  EXPECT_EQ(config_hash(a), config_hash(b));
}

TEST(Config, LinearModelRoundTripsWithExplicitWeights) {
  const RunConfig a = parse_config(R"({"model": "linear-test"})");
  EXPECT_EQ(a.sim.init.kind, InitWeights::Kind::kExplicit);
  const RunConfig b = parse_config(resolved_json(a));
  EXPECT_EQ(resolved_json(a), resolved_json(b));
}

TEST(Config, HashTracksChanges) {
  RunConfig a = parse_config(R"({"model": "paper-sec5"})");
  const std::string h = config_hash(a);
  EXPECT_EQ(h.size(), 16u);
  a.sim.dt = 2e-3;
  EXPECT_NE(config_hash(a), h);
}

TEST(Config, ApplySeedIsDeterministicAndDistinct) {
  RunConfig a = parse_config(R"({"model": "paper-sec5"})");
  RunConfig b = a;
  apply_seed(a, 4);
  apply_seed(b, 4);
  EXPECT_EQ(a.sim.init.seed, b.sim.init.seed);
  EXPECT_EQ(a.sim.probing.seed, b.sim.probing.seed);
  EXPECT_NE(a.sim.init.seed, a.sim.probing.seed);
  EXPECT_NE(a.sim.probing.seed, a.sim.disturbance.seed);
  apply_seed(b, 5);
  EXPECT_NE(a.sim.init.seed, b.sim.init.seed);
}

TEST(Config, ManifestReparsesToSameConfig) {
  RunConfig a = parse_config(R"({"model": "paper-sec5"})");
  apply_seed(a, 9);
  ManifestInfo info;
  info.status = "completed";
  info.runtime_seconds = 1.5;
  const std::string manifest = manifest_json(a, info);
  EXPECT_TRUE(contains(manifest, "\"config_hash\""));
  EXPECT_TRUE(contains(manifest, library_version()));
  const RunConfig b = parse_config(manifest);
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(b.sim.probing.seed, a.sim.probing.seed);
}

TEST(Config, MissingFile) {
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}
