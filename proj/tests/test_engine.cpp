#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "irqsim/engine.hpp"

using namespace irqsim;

TEST_CASE("events fire in due order regardless of insertion order") {
  Engine eng(1);
  std::vector<int> order;
  eng.schedule(Timestamp{300}, EventKind::custom, [&] { order.push_back(3); });
  eng.schedule(Timestamp{100}, EventKind::custom, [&] { order.push_back(1); });
  eng.schedule(Timestamp{200}, EventKind::custom, [&] { order.push_back(2); });
  eng.run();
  CHECK(order == std::vector<int>{1, 2, 3});
  CHECK(eng.now().ns == 300);
  CHECK(eng.fired_count() == 3);
}

TEST_CASE("same-due events fire in insertion order") {
  Engine eng(1);
  std::vector<int> order;
  for (int i = 0; i < 5; ++i)
    eng.schedule(Timestamp{50}, EventKind::custom, [&order, i] { order.push_back(i); });
  eng.run();
  CHECK(order == std::vector<int>{0, 1, 2, 3, 4});
}

TEST_CASE("an event scheduled at the current instant from a callback still fires") {
  Engine eng(1);
  std::vector<int> order;
  eng.schedule(Timestamp{10}, EventKind::custom, [&] {
    order.push_back(1);
    eng.schedule_in(Duration{0}, EventKind::custom, [&] { order.push_back(2); });
  });
  eng.schedule(Timestamp{10}, EventKind::custom, [&] { order.push_back(3); });
  eng.run();
  // The zero-delay event was inserted after the second t=10 event.
  CHECK(order == std::vector<int>{1, 3, 2});
  CHECK(eng.now().ns == 10);
}

TEST_CASE("scheduling before the clock is rejected") {
  Engine eng(1);
  eng.schedule(Timestamp{100}, EventKind::custom, nullptr);
  eng.step();
  CHECK(eng.now().ns == 100);
  CHECK_THROWS_AS(eng.schedule(Timestamp{99}, EventKind::custom, nullptr), Error);
  try {
    eng.schedule(Timestamp{99}, EventKind::custom, nullptr);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::past_due);
  }
  // Exactly "now" is fine.
  CHECK_NOTHROW(eng.schedule(Timestamp{100}, EventKind::custom, nullptr));
}

TEST_CASE("cancel removes a pending event exactly once") {
  Engine eng(1);
  bool fired = false;
  EventHandle h = eng.schedule(Timestamp{10}, EventKind::custom, [&] { fired = true; });
  eng.schedule(Timestamp{20}, EventKind::custom, nullptr);
  CHECK(eng.cancel(h));
  CHECK_FALSE(eng.cancel(h));  // second cancel is a no-op
  eng.run();
  CHECK_FALSE(fired);
  CHECK(eng.now().ns == 20);  // clock advanced via the surviving event only
  CHECK(eng.fired_count() == 1);
}

TEST_CASE("cancelling the null handle is a no-op") {
  Engine eng(1);
  CHECK_FALSE(eng.cancel(EventHandle{}));
}

TEST_CASE("a cancelled event never advances the clock") {
  Engine eng(1);
  EventHandle h = eng.schedule(Timestamp{500}, EventKind::custom, nullptr);
  eng.cancel(h);
  CHECK_FALSE(eng.step().has_value());
  CHECK(eng.now().ns == 0);
  CHECK(eng.idle());
}

TEST_CASE("step reports kind, due time and sequence") {
  Engine eng(1);
  eng.schedule(Timestamp{42}, EventKind::irq_assert, nullptr);
  auto fired = eng.step();
  REQUIRE(fired.has_value());
  CHECK(fired->kind == EventKind::irq_assert);
  CHECK(fired->due.ns == 42);
  CHECK(eng.pending_count() == 0);
}

TEST_CASE("pending_count tracks live events only") {
  Engine eng(1);
  EventHandle a = eng.schedule(Timestamp{1}, EventKind::custom, nullptr);
  eng.schedule(Timestamp{2}, EventKind::custom, nullptr);
  CHECK(eng.pending_count() == 2);
  eng.cancel(a);
  CHECK(eng.pending_count() == 1);
}

TEST_CASE("callbacks may schedule far ahead while draining") {
  Engine eng(1);
  int hops = 0;
  std::function<void()> hop = [&] {
    if (++hops < 10) eng.schedule_in(Duration{7}, EventKind::custom, hop);
  };
  eng.schedule(Timestamp{0}, EventKind::custom, hop);
  eng.run();
  CHECK(hops == 10);
  CHECK(eng.now().ns == 63);
}
