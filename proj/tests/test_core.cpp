#include <sstream>

#include "doctest.h"
#include "sfm/core.hpp"
#include "sfm/text.hpp"

using namespace sfm;

namespace {

StreamLog small_log() {
  StreamLog log;
  log.header.rows = 2;
  log.header.cols = 3;
  log.header.scenario = "unit";
  log.header.seed = 17;
  log.header.injected_delay = 4;
  for (int t = 0; t < 8; ++t) {
    SensorimotorFrame f;
    f.t = t;
    f.flow = FlowGrid(2, 3);
    for (std::size_t i = 0; i < 6; ++i) f.flow[i] = {0.1 * t + i / 3.0, -1e-17 * (t + 1) - i};
    f.action = ActionCommand::make(t % 2 ? ActionKind::Forward : ActionKind::TurnLeft);
    f.proprio = {0.29 + 1e-3 * t, -0.6 / 7.0};
    f.bump = t == 5;
    log.frames.push_back(f);
  }
  return log;
}

}  // namespace

TEST_CASE("stream log survives a write/read round trip bit for bit") {
  const auto log = small_log();
  std::stringstream s;
  write_stream_log(s, log);
  const auto back = read_stream_log(s);
  CHECK(back == log);
}

TEST_CASE("corrupted logs are rejected") {
  const auto log = small_log();
  std::stringstream s;
  write_stream_log(s, log);
  auto text = s.str();
  SUBCASE("truncated") {
    std::stringstream t(text.substr(0, text.size() / 2));
    CHECK_THROWS_AS(read_stream_log(t), Error);
  }
  SUBCASE("garbage number") {
    const auto pos = text.rfind("0.1");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 3, "x.y");
    std::stringstream t(text);
    CHECK_THROWS_AS(read_stream_log(t), Error);
  }
}

TEST_CASE("validate catches shape and time errors") {
  auto log = small_log();
  log.frames[3].t = 2;
  CHECK_THROWS_AS(log.validate(), Error);
  log = small_log();
  log.frames[1].flow = FlowGrid(3, 2);
  CHECK_THROWS_AS(log.validate(), Error);
}

TEST_CASE("action constants map to commands") {
  const ActionConstants k{0.4, 0.8};
  CHECK(ActionCommand::make(ActionKind::Forward, k).linear == 0.4);
  CHECK(ActionCommand::make(ActionKind::Backward, k).linear == -0.4);
  CHECK(ActionCommand::make(ActionKind::TurnLeft, k).angular == 0.8);
  CHECK(ActionCommand::make(ActionKind::TurnRight, k).angular == -0.8);
  CHECK(ActionCommand::make(ActionKind::Stop, k) == ActionCommand{});
  for (auto a : {ActionKind::Stop, ActionKind::Forward, ActionKind::Backward, ActionKind::TurnLeft,
                 ActionKind::TurnRight}) {
    CHECK(parse_action_kind(to_string(a)) == a);
  }
}

TEST_CASE("training pairs pair frame t - T inputs with the delta at t") {
  const auto log = small_log();
  PairOptions opt;
  opt.use_proprio = false;
  const auto pairs = make_pairs(log, 3, opt);
  REQUIRE(pairs.size() == (8 - 3) * 6);
  CHECK(opt.input_dim() == 4);
  for (const auto& p : pairs) {
    const auto i = p.row * 3 + p.col;
    const auto& src = log.frames[static_cast<std::size_t>(p.t - 3)];
    const auto& dst = log.frames[static_cast<std::size_t>(p.t)];
    CHECK(p.x[0] == src.flow[i].u);
    CHECK(p.x[1] == src.flow[i].v);
    CHECK(p.x[2] == src.action.linear);
    CHECK(p.y.x() == dst.flow[i].u - src.flow[i].u);
    CHECK(p.y.y() == dst.flow[i].v - src.flow[i].v);
  }
  CHECK(make_pairs(log, 8, opt).empty());
}

TEST_CASE("target timing takes the command of the predicted frame") {
  const auto log = small_log();
  PairOptions opt;
  opt.timing = CommandTiming::Target;
  for (const auto& p : make_pairs(log, 2, opt)) {
    CHECK(p.x[2] == log.frames[static_cast<std::size_t>(p.t)].action.linear);
    CHECK(p.x[4] == log.frames[static_cast<std::size_t>(p.t)].proprio.linear);
  }
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.0, -0.0, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5e-17, 0.1 + 0.2}) {
    CHECK(text::parse_double(text::fmt(v)) == v);
  }
  CHECK_THROWS_AS(text::parse_double("1.5abc"), Error);
}

TEST_CASE("FNV-1a digest matches published vectors") {
  CHECK(text::digest("") == "cbf29ce484222325");
  CHECK(text::digest("a") == "af63dc4c8601ec8c");
  CHECK(text::digest("foobar") == "85944171f73967e8");
}
