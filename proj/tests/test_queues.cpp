#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "renewalctl/queues.hpp"
#include "renewalctl/rng.hpp"

using namespace renewalctl;

TEST_CASE("queue update applies max[Q + arrival - service, 0]") {
  VirtualQueue q = make_queue("Q_1");
  queue_update(q, 0.2 * 11.0, 1.0);
  CHECK(q.value == Catch::Approx(1.2).margin(1e-15));

  q = make_queue("Q_1", 5.0);
  queue_update(q, 0.0, 10.0);
  CHECK(q.value == 0.0);

  q = make_queue("Q_1", 3.0);
  queue_update(q, 1.5, 0.5);
  CHECK(q.value == 4.0);
}

TEST_CASE("queue update rejects non-finite increments") {
  VirtualQueue q = make_queue("Q_1");
  CHECK_THROWS_AS(queue_update(q, std::numeric_limits<double>::infinity(), 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(queue_update(q, 0.0, std::numeric_limits<double>::quiet_NaN()),
                  std::invalid_argument);
}

TEST_CASE("lyapunov value is half the squared norm") {
  QueueBank bank;
  CHECK(lyapunov(bank) == 0.0);
  bank.queues.push_back(make_queue("a", 3.0));
  bank.queues.push_back(make_queue("b", 4.0));
  CHECK(lyapunov(bank) == 12.5);

  QueueBank single;
  single.queues.push_back(make_queue("a", 2.0));
  CHECK(lyapunov(single) == 2.0);
}

TEST_CASE("constraint gap is the normalized backlog growth") {
  VirtualQueue q = make_queue("Q");
  CHECK(constraint_gap(q, 10, 0.0) == 0.0);

  q.value = 100.0;
  CHECK(constraint_gap(q, 1000000, 0.0) == Catch::Approx(1e-4));
  CHECK_THROWS_AS(constraint_gap(q, 0, 0.0), std::invalid_argument);
}

TEST_CASE("running averages never exceed the queue gap certificate") {
  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    VirtualQueue q = make_queue("Q");
    q.record_history = true;
    const int frames = 500;
    for (int k = 0; k < frames; ++k)
      queue_update(q, rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0));
    REQUIRE(q.value >= 0.0);
    // replay the recorded increments
    double running = 0.0;
    for (const auto& [arrival, service] : q.history) running += arrival - service;
    CHECK(running == Catch::Approx(q.increment_sum).margin(1e-9));
    CHECK(running / frames <= constraint_gap(q, frames) + 1e-9);
  }
}

TEST_CASE("non-negativity holds through arbitrary update sequences") {
  Rng rng(7);
  VirtualQueue q = make_queue("Q");
  for (int k = 0; k < 20000; ++k) {
    queue_update(q, rng.uniform(0.0, 1.0), rng.uniform(0.0, 3.0));
    REQUIRE(q.value >= 0.0);
    REQUIRE(q.max_value >= q.value);
  }
}

TEST_CASE("per-frame drift matches the lyapunov difference") {
  Rng rng(11);
  QueueBank bank;
  bank.queues.push_back(make_queue("a"));
  bank.queues.push_back(make_queue("b"));
  for (int k = 0; k < 200; ++k) {
    const double before = lyapunov(bank);
    const double a0 = bank.queues[0].value;
    const double a1 = bank.queues[1].value;
    const double arr0 = rng.uniform(0.0, 2.0), srv0 = rng.uniform(0.0, 2.0);
    const double arr1 = rng.uniform(0.0, 2.0), srv1 = rng.uniform(0.0, 2.0);
    queue_update(bank.queues[0], arr0, srv0);
    queue_update(bank.queues[1], arr1, srv1);
    const double drift = lyapunov(bank) - before;
    const double expected =
        0.5 * (bank.queues[0].value * bank.queues[0].value - a0 * a0 +
               bank.queues[1].value * bank.queues[1].value - a1 * a1);
    REQUIRE(drift == Catch::Approx(expected).margin(1e-12));
  }
}
