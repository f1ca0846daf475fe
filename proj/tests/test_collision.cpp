#include <random>

#include "doctest.h"
#include "sfm/collision.hpp"
#include "sfm/simulator.hpp"

using namespace sfm;

namespace {

igmm::Mixture blank(std::size_t k) {
  igmm::Config c;
  c.sigma_ini_x = Eigen::VectorXd::Ones(1);
  c.sigma_ini_y = Eigen::VectorXd::Ones(1);
  c.novelty_threshold = igmm::calibrated_novelty_threshold(3.0, c.sigma_ini_x, c.sigma_ini_y);
  igmm::Mixture m(1, 1, c);
  for (std::size_t j = 0; j < k; ++j) {
    const auto z = Eigen::VectorXd::Constant(1, 100.0 * static_cast<double>(j));
    m.learn_one(z, z);
  }
  return m;
}

}  // namespace

TEST_CASE("history keeps only the last window entries, oldest first") {
  ActivationHistory h(3);
  for (int t = 0; t < 5; ++t) h.record(t, {{static_cast<std::size_t>(t)}});
  REQUIRE(h.size() == 3);
  CHECK(h[0].t == 2);
  CHECK(h[2].t == 4);
  CHECK_THROWS_AS(ActivationHistory(0), Error);
}

TEST_CASE("credit decays geometrically with age") {
  auto m = blank(1);
  ActivationHistory h(3);
  for (int t = 0; t < 3; ++t) h.record(t, {{0}});
  CreditConfig cfg;
  cfg.gamma = 0.5;
  cfg.window = 3;
  CHECK(assign_credit(m, h, cfg) == 1.75);
  CHECK(m[0].collision_value == 1.75);
}

TEST_CASE("credit added equals the sum over history entries of gamma^age times activations") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> pick(0, 4);
  auto m = blank(5);
  CreditConfig cfg;
  cfg.gamma = 0.8;
  cfg.window = 10;
  ActivationHistory h(cfg.window);
  for (int t = 0; t < 25; ++t) {
    std::vector<std::vector<std::size_t>> cells(6);
    for (auto& c : cells) c = {pick(rng)};
    h.record(t, cells);
  }
  double want = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) want += std::pow(0.8, static_cast<double>(h.size() - 1 - i)) * 6.0;
  const double got = assign_credit(m, h, cfg);
  CHECK(got == doctest::Approx(want).epsilon(1e-12));
  double stored = 0.0;
  for (const auto& c : m.components()) stored += c.collision_value;
  CHECK(stored == doctest::Approx(got).epsilon(1e-12));
}

TEST_CASE("frame-level credit counts a component once per entry") {
  auto m = blank(2);
  ActivationHistory h(1);
  h.record(0, {{0}, {0}, {1}, {0}});
  CreditConfig cfg;
  cfg.per_cell = false;
  CHECK(assign_credit(m, h, cfg) == 2.0);
  CHECK(m[0].collision_value == 1.0);
}

TEST_CASE("signal is the mean over cells of the active components' values") {
  auto m = blank(3);
  m.add_collision_value(0, 2.0);
  m.add_collision_value(2, 6.0);
  CHECK(collision_signal(m, {{0}, {1}, {2}, {2}}) == 3.5);
  CHECK(collision_signal(m, {{0, 2}, {1}}) == 2.0);
  CHECK(collision_signal(m, {}) == 0.0);
}

TEST_CASE("pre-bump labels cover the horizon before each rising edge") {
  const std::vector<bool> b{false, false, false, false, true, true, false, false, true};
  const auto l = pre_bump_labels(b, 2);
  CHECK(l == std::vector<bool>{false, false, true, true, true, false, true, true, true});
}

TEST_CASE("calibrated threshold maximizes F1") {
  const std::vector<double> s{0.0, 1.0, 2.0, 5.0, 6.0, 1.5, 0.5, 7.0};
  const std::vector<bool> l{false, false, false, true, true, false, false, true};
  CHECK(calibrate_threshold(s, l) == 5.0);
  CHECK_THROWS_AS(calibrate_threshold({0.0, 0.0}, {true, false}), Error);
}

TEST_CASE("anticipation uses the onset of the alarm run that reaches contact") {
  std::vector<TraceRecord> tr(40);
  for (std::size_t i = 0; i < tr.size(); ++i) tr[i].t = static_cast<std::int64_t>(i);
  // Episode 0: frames 0..19, contact 19, alarm on from 2..4 and 8..18.
  for (std::size_t i : {2, 3, 4}) tr[i].alarm = true;
  for (std::size_t i = 8; i <= 18; ++i) tr[i].alarm = true;
  // Episode 1: frames 20..39, contact 35, alarm on at contact only.
  tr[35].alarm = true;
  tr[19].bump = tr[35].bump = true;
  const std::vector<ContactEpisode> eps{{0, 19, false}, {20, 35, false}};
  const auto a = score_anticipation(tr, eps, 5);
  CHECK(a.leads == std::vector<long>{11, 0});
  CHECK(a.detected == 1);
  CHECK(a.scored == 2);
  const auto b = episodes_from_bumps(tr);
  REQUIRE(b.size() == 2);
  CHECK(b[1].start == 20);
  CHECK(b[1].contact == 35);
}

TEST_CASE("false alarms count rising edges per minute") {
  std::vector<TraceRecord> tr(900);
  for (std::size_t i = 100; i < 110; ++i) tr[i].alarm = true;
  for (std::size_t i = 500; i < 501; ++i) tr[i].alarm = true;
  CHECK(false_alarms_per_minute(tr, 15.0) == doctest::Approx(2.0));
}

TEST_CASE("each contact on an approach run credits a full geometric window per cell") {
  const auto log = sim::Simulator(sim::preset("approach", 2)).run();
  ForwardModelConfig c;
  c.use_cell_coords = true;
  ForwardModel fm(c, 4, 5, log.header.actions);
  fm.learn(make_pairs(log, 15, fm.pair_options()));
  fm.finish_warmup();
  CreditConfig cc;
  const auto before = fm.mixture().components();
  replay_collisions(fm, log, cc, true);
  double total = 0.0;
  for (const auto& comp : fm.mixture().components()) {
    CHECK(comp.collision_value >= 0.0);
    total += comp.collision_value;
  }
  // 20 episodes, 20 cells, each crediting sum_{k<30} 0.9^k.
  const double per = (1.0 - std::pow(0.9, 30)) / 0.1;
  CHECK(total == doctest::Approx(20.0 * 20.0 * per).epsilon(1e-9));
  // Replaying without credit leaves values unchanged.
  const auto values = fm.mixture().components();
  replay_collisions(fm, log, cc, false);
  for (std::size_t j = 0; j < values.size(); ++j) CHECK(fm.mixture()[j].collision_value == values[j].collision_value);
}
