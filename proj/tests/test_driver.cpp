#include <doctest.h>

#include <random>

#include "slip/benchmarks.hpp"
#include "slip/driver.hpp"
#include "slip/errors.hpp"
#include "support.hpp"

using namespace slip;
using slip::testing::LinearProblem;

TEST_CASE("policy and termination names") {
  CHECK(parse_radius_policy("nr") == RadiusPolicy::DoubleNoReset);
  CHECK(parse_radius_policy("RT") == RadiusPolicy::ResetOnSuccess);
  CHECK(parse_radius_policy("ResetOnSuccess") == RadiusPolicy::ResetOnSuccess);
  CHECK_THROWS_AS(parse_radius_policy("halve"), ConfigError);
  CHECK(to_string(Termination::RadiusBelowMesh) == "RadiusBelowMesh");
}

TEST_CASE("config defaults and validation") {
  const Grid g(512, -1.0, 1.0);
  const auto c = TrustRegionConfig::defaults(g, LabelSet::range(-2, 2), 1e-4);
  CHECK(c.delta0 == 8.0);
  CHECK(c.delta_max == 8.0);
  CHECK(c.delta_min == g.h());
  CHECK(c.sigma == 1e-3);
  CHECK_NOTHROW(c.validate());
  auto bad = c;
  bad.sigma = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.delta_max = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.alpha = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.delta_min = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("ared") {
  const HeatProblem heat(32);
  const Control w = Control::constant(heat.grid(), heat.labels(), 3);
  CHECK(ared(heat, w, w, 1e-3) == 0.0);
  std::vector<int> cells(32, 3);
  cells[10] = 7;
  const Control v = w.with_cells(cells);
  const double direct = heat.objective(w) - heat.objective(v) + 1e-3 * (0.0 - 8.0);
  CHECK(ared(heat, w, v, 1e-3) == doctest::Approx(direct).epsilon(1e-14));
}

TEST_CASE("stationary start terminates at once") {
  const Grid g(16, 0.0, 1.0);
  const LinearProblem flat(g, LabelSet::range(0, 2), std::vector<double>(16, 0.0));
  const Control w0 = Control::constant(g, flat.labels(), 1);
  const auto cfg = TrustRegionConfig::defaults(g, flat.labels(), 0.1);
  const auto res = run(flat, w0, cfg);
  CHECK(res.termination == Termination::PredZero);
  CHECK(res.history.size() == 1);
  CHECK(res.final_control == w0);
  CHECK(res.history[0].pred == 0.0);
}

TEST_CASE("linear objective accepts every productive step") {
  std::mt19937 rng(3);
  std::normal_distribution<double> normal;
  const Grid g(24, 0.0, 1.0);
  std::vector<double> c(24);
  for (double& x : c) x = normal(rng);
  const LinearProblem lin(g, LabelSet::range(-2, 2), c);
  auto cfg = TrustRegionConfig::defaults(g, lin.labels(), 0.05);
  cfg.delta0 = 0.25;
  cfg.delta_max = 1.0;
  const auto res = run(lin, Control::constant(g, lin.labels(), 0), cfg);
  for (std::size_t k = 0; k < res.history.size(); ++k) {
    const auto& r = res.history[k];
    if (r.pred > 0.0) {
      CHECK(r.accepted);
      CHECK(r.ared == doctest::Approx(r.pred).epsilon(1e-12));
    }
    if (k > 0) CHECK(r.delta >= res.history[k - 1].delta);
  }
  CHECK(res.termination == Termination::PredZero);
  CHECK(slip::testing::audit_run(lin, res, cfg).empty());
}

TEST_CASE("diagnostics arithmetic") {
  TrustRegionConfig cfg;
  IterationRecord rec;
  rec.pred = 2.0;
  rec.ared = 2.0;
  rec.accepted = true;
  CHECK(diagnostics(rec, cfg).r_n == doctest::Approx((1.0 - 1e-3) * 2.0));
  CHECK(diagnostics(rec, cfg).certified);
  cfg.sigma = 0.5;
  rec.pred = 1.0;
  rec.ared = 0.0;
  const auto d = diagnostics(rec, cfg);
  CHECK(d.r_n == -0.5);
  CHECK_FALSE(d.certified);
}

TEST_CASE("benchmark runs are sound under both policies") {
  const HeatProblem heat(64);
  const DeconvProblem deconv(64);
  for (const Problem* p : {static_cast<const Problem*>(&heat), static_cast<const Problem*>(&deconv)}) {
    for (auto policy : {RadiusPolicy::DoubleNoReset, RadiusPolicy::ResetOnSuccess}) {
      for (double alpha : {1e-4, 1e-3}) {
        const auto cfg = TrustRegionConfig::defaults(p->grid(), p->labels(), alpha, policy);
        const auto res = run(*p, Control::constant(p->grid(), p->labels(), 0), cfg);
        const auto bad = slip::testing::audit_run(*p, res, cfg);
        INFO(p->name(), " ", to_string(policy), " alpha=", alpha, " first=", bad.empty() ? "" : bad.front());
        CHECK(bad.empty());
        CHECK(res.termination != Termination::IterationCap);
        CHECK(res.final_objective <= res.initial_objective);
        for (const auto& r : res.history) {
          CHECK(switch_count(res.final_control) <= res.n_max);
          CHECK(r.tv <= p->labels().span() * res.n_max);
        }
      }
    }
  }
}

TEST_CASE("iteration cap") {
  const DeconvProblem deconv(32);
  auto cfg = TrustRegionConfig::defaults(deconv.grid(), deconv.labels(), 1e-4);
  cfg.max_iterations = 2;
  const auto res = run(deconv, Control::constant(deconv.grid(), deconv.labels(), 0), cfg);
  CHECK(res.termination == Termination::IterationCap);
  CHECK(res.history.size() == 2);
}

TEST_CASE("initial control must match the problem") {
  const DeconvProblem deconv(32);
  const auto cfg = TrustRegionConfig::defaults(deconv.grid(), deconv.labels(), 1e-4);
  CHECK_THROWS_AS(run(deconv, Control::constant(Grid(16, -1.0, 1.0), deconv.labels(), 0), cfg), StructuralError);
}
