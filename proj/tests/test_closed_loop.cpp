#include <doctest.h>

#include <cmath>
#include <random>

#include "nilcontrol/closed_loop.hpp"

using namespace nilcontrol;

namespace {

ControlSchedule random_schedule(std::mt19937_64& rng, int s, int m, double T,
                                double scale) {
  std::uniform_real_distribution<double> d(-scale, scale);
  ControlSchedule out;
  out.segment_length = T / s;
  out.segments.resize(s, m);
  for (int k = 0; k < s; ++k) {
    for (int j = 0; j < m; ++j) out.segments(k, j) = d(rng);
  }
  return out;
}

SimulationConfig fixture_config(std::vector<double> x0) {
  SimulationConfig c;
  c.model = "chained_drift";
  c.x0 = std::move(x0);
  return c;
}

}  // namespace

TEST_CASE("fixture plant integrates exactly") {
  // x1' = u1, x2' = u2, x3' = x2: polynomial in t, so RK4 is exact.
  const ModelSpec m = chained_drift_model();
  ControlSchedule s;
  s.segment_length = 0.05;
  s.segments.resize(2, 2);
  s.segments << 1.0, 2.0, -0.5, 1.0;
  const Eigen::Vector3d x0(0.1, 0.2, 0.3);
  const PlantTrajectory tr = integrate_plant(m, x0, s, 4);
  const double x2_mid = 0.2 + 2.0 * 0.05;
  const double x3 = 0.3 + (0.2 * 0.05 + 2.0 * 0.05 * 0.05 / 2) +
                    (x2_mid * 0.05 + 1.0 * 0.05 * 0.05 / 2);
  const Eigen::Vector3d expected(0.1 + 0.05 - 0.025, x2_mid + 0.05, x3);
  CHECK((tr.final_state() - expected).norm() < 1e-15);
  CHECK(tr.t.size() == 9);
  CHECK(tr.t.back() == doctest::Approx(0.1));
  CHECK_FALSE(tr.aborted);
}

TEST_CASE("plant integration aborts outside the valid region") {
  const ModelSpec m = rigid_body_model();
  ControlSchedule s;
  s.segment_length = 0.5;
  s.segments = Eigen::MatrixXd::Constant(4, 2, 40.0);
  const PlantTrajectory tr = integrate_plant(m, Eigen::VectorXd::Zero(6), s, 8);
  CHECK(tr.aborted);
  CHECK_FALSE(tr.message.empty());
}

TEST_CASE("composed exponentials reproduce the fixture plant") {
  std::mt19937_64 rng(31);
  const ModelSpec m = chained_drift_model();
  for (int trial = 0; trial < 5; ++trial) {
    const ControlSchedule s = random_schedule(rng, 6, 2, 0.1, 3.0);
    const FlowCheck fc = flow_correspondence_check(m, s, Eigen::Vector3d(0.2, -0.1, 0.3));
    CHECK(fc.error < 1e-12);
  }
  ControlSchedule zero;
  zero.segment_length = 0.1 / 6;
  zero.segments = Eigen::MatrixXd::Zero(6, 2);
  CHECK(flow_correspondence_check(m, zero, Eigen::Vector3d(0.2, -0.1, 0.3)).error < 1e-13);
}

TEST_CASE("rigid body reconstruction error shrinks with the horizon") {
  std::mt19937_64 rng(32);
  const ModelSpec m = rigid_body_model();
  Eigen::VectorXd x(6);
  x << -0.1, 0, 0.2, 0, 0, 0.1;
  ControlSchedule s = random_schedule(rng, 6, 2, 0.1, 1.0);
  const double e10 = flow_correspondence_check(m, s, x).error;
  s.segment_length /= 2;
  const double e05 = flow_correspondence_check(m, s, x).error;
  CHECK(e05 < e10);
}

TEST_CASE("fixture closed loop meets the strict decrease bound") {
  const TrajectoryLog log = run_closed_loop(fixture_config({0.1, -0.1, 0.2}));
  REQUIRE_FALSE(log.aborted);
  REQUIRE(log.periods.size() == 35);
  const DecreaseReport rep = check_periodic_decrease(log, 1.0, 0.1, DecreaseMode::strict);
  CHECK(rep.all_ok);
  CHECK(rep.worst_slack <= 1e-6);
  for (const auto& p : log.periods) {
    CHECK(p.sp_called);
    CHECK(p.sp_status == SPStatus::feasible);
    CHECK(p.max_amplitude <= 50.0 * p.x_norm * (1 + 1e-12));
    CHECK(p.excursion_ratio >= 1.0);
  }
  CHECK(log.periods.back().V_next < 1e-3 * log.periods.front().V);
  CHECK(std::isfinite(empirical_excursion_rate(log)));
  // The log stitches the periods together without gaps.
  CHECK(log.t.size() == log.x.size());
  CHECK(log.u.size() == log.x.size());
  CHECK(log.t.back() == doctest::Approx(3.5));
}

TEST_CASE("closed loop stays still at the equilibrium") {
  SimulationConfig c = fixture_config({0.0, 0.0, 0.0});
  CHECK(run_closed_loop(c).periods.empty());  // already below stop_norm
  c.stop_norm = 0.0;
  c.periods = 3;
  const TrajectoryLog log = run_closed_loop(c);
  REQUIRE(log.periods.size() == 3);
  CHECK_FALSE(log.periods.front().sp_called);
  CHECK(log.x.back().norm() == 0.0);
}

TEST_CASE("closed loop stops below stop_norm") {
  SimulationConfig c = fixture_config({0.1, -0.1, 0.2});
  c.stop_norm = 0.05;
  const TrajectoryLog log = run_closed_loop(c);
  CHECK(log.periods.size() < 35);
  CHECK(log.x.back().norm() < 0.05);
}

TEST_CASE("closed loop argument checks") {
  CHECK_THROWS_AS(run_closed_loop(fixture_config({0.1, 0.2})), std::invalid_argument);
  CHECK_THROWS_AS(run_closed_loop(fixture_config({3.0, 0.0, 0.0})), std::invalid_argument);
}

TEST_CASE("runs are reproducible and sweeps match single runs") {
  SimulationConfig a = fixture_config({0.05, 0.1, -0.2});
  a.periods = 6;
  SimulationConfig b = fixture_config({-0.2, 0.1, 0.1});
  b.periods = 6;
  b.seed = 7;
  const auto logs = run_sweep({a, b}, true);
  const TrajectoryLog ra = run_closed_loop(a);
  const TrajectoryLog rb = run_closed_loop(b);
  REQUIRE(logs.size() == 2);
  CHECK(logs[0].x == ra.x);
  CHECK(logs[1].x == rb.x);
  const auto serial = run_sweep({a, b}, false);
  CHECK(serial[0].x == logs[0].x);
  CHECK(serial[1].u == logs[1].u);
}

TEST_CASE("decrease checks on a synthetic log") {
  TrajectoryLog log;
  PeriodSummary p;
  p.x_norm = 1.0;
  p.dV = -0.04;
  log.periods.push_back(p);
  p.dV = -0.06;
  log.periods.push_back(p);
  const DecreaseReport strict = check_periodic_decrease(log, 1.0, 0.1, DecreaseMode::strict);
  CHECK_FALSE(strict.period_ok[0]);
  CHECK(strict.period_ok[1]);
  CHECK(strict.worst_slack == doctest::Approx(0.01));
  CHECK(check_periodic_decrease(log, 1.0, 0.1, DecreaseMode::relaxed).all_ok);
  log.periods[0].dV = 0.0;
  CHECK_FALSE(check_periodic_decrease(log, 1.0, 0.1, DecreaseMode::relaxed).all_ok);
}
