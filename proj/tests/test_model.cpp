#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "renewalctl/model.hpp"

using namespace renewalctl;

namespace {

TaskModelConfig one_class_config() {
  TaskModelConfig cfg;
  cfg.num_classes = 1;
  cfg.num_modes = 2;
  cfg.energy = {1.0, 3.0};
  cfg.duration = {7.0, 4.0};
  cfg.idle_max = 10.0;
  cfg.rates = {0.2};
  return cfg;
}

struct SampleStats {
  double mean = 0.0;
  double stderr_est = 0.0;
};

SampleStats stats(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(xs.size() - 1);
  return {mean, std::sqrt(var / static_cast<double>(xs.size()))};
}

}  // namespace

TEST_CASE("one-class model builds with two modes") {
  const TaskModel m = build_task_model(one_class_config());
  CHECK(m.num_classes == 1);
  CHECK(m.num_modes == 2);
  CHECK(m.mean_energy(1, 1) == 1.0);
  CHECK(m.mean_energy(1, 2) == 3.0);
  CHECK(m.mean_duration(1, 1) == 7.0);
  CHECK(m.mean_duration(1, 2) == 4.0);
  CHECK(m.idle_max == 10.0);
  CHECK(m.duration_min == 4.0);
}

TEST_CASE("ten-class model derives duration_min from the table") {
  TaskModelConfig cfg;
  cfg.num_classes = 10;
  cfg.num_modes = 2;
  cfg.energy.resize(20);
  cfg.duration.resize(20);
  for (std::size_t i = 1; i <= 10; ++i) {
    cfg.energy[(i - 1) * 2] = static_cast<double>(i);
    cfg.duration[(i - 1) * 2] = 5.0 * static_cast<double>(i);
    cfg.energy[(i - 1) * 2 + 1] = 2.0 * static_cast<double>(i);
    cfg.duration[(i - 1) * 2 + 1] = 3.0 * static_cast<double>(i);
  }
  cfg.idle_max = 10.0;
  const TaskModel m = build_task_model(cfg);
  CHECK(m.num_classes == 10);
  CHECK(m.duration_min == 3.0);
  CHECK(m.mean_duration(10, 1) == 50.0);
  CHECK(m.rates == std::vector<double>(10, 0.0));
}

TEST_CASE("model validation rejects bad tables") {
  TaskModelConfig cfg = one_class_config();
  cfg.duration[0] = 0.0;
  CHECK_THROWS_AS(build_task_model(cfg), std::invalid_argument);

  cfg = one_class_config();
  cfg.num_modes = 0;
  cfg.energy.clear();
  cfg.duration.clear();
  CHECK_THROWS_AS(build_task_model(cfg), std::invalid_argument);

  cfg = one_class_config();
  cfg.energy = {1.0};
  CHECK_THROWS_AS(build_task_model(cfg), std::invalid_argument);

  cfg = one_class_config();
  cfg.noise = {NoiseSpec{NoiseKind::uniform, 5.0}};  // wider than e(1,1)
  CHECK_THROWS_AS(build_task_model(cfg), std::invalid_argument);
}

TEST_CASE("deterministic outcomes return the table means") {
  const TaskModel m = build_task_model(one_class_config());
  Rng rng(7);
  const FrameOutcome slow = sample_outcome(m, {1, 1, 10.0}, rng);
  CHECK(slow.busy == 7.0);
  CHECK(slow.energy == 1.0);
  CHECK(slow.frame_total() == 17.0);
  CHECK(slow.serves(1));
  CHECK_FALSE(slow.serves(0));

  const FrameOutcome fast = sample_outcome(m, {1, 2, 0.0}, rng);
  CHECK(fast.busy == 4.0);
  CHECK(fast.energy == 3.0);
  CHECK(fast.frame_total() == 4.0);
}

TEST_CASE("zero-width uniform noise equals deterministic") {
  TaskModelConfig cfg = one_class_config();
  cfg.noise = {NoiseSpec{NoiseKind::uniform, 0.0}};
  const TaskModel noisy = build_task_model(cfg);
  const TaskModel plain = build_task_model(one_class_config());
  Rng rng_a(42);
  Rng rng_b(42);
  for (int i = 0; i < 100; ++i) {
    const FrameOutcome a = sample_outcome(noisy, {1, 1, 0.0}, rng_a);
    const FrameOutcome b = sample_outcome(plain, {1, 1, 0.0}, rng_b);
    CHECK(a.busy == b.busy);
    CHECK(a.energy == b.energy);
  }
}

TEST_CASE("noisy samplers keep the configured means") {
  TaskModelConfig cfg;
  cfg.num_classes = 1;
  cfg.num_modes = 2;
  cfg.energy = {2.0, 3.0};
  cfg.duration = {7.0, 6.0};
  cfg.duration_min = 4.0;
  cfg.idle_max = 5.0;
  cfg.noise = {NoiseSpec{NoiseKind::uniform, 1.5}, NoiseSpec{NoiseKind::exponential_shifted, 0.0}};
  const TaskModel m = build_task_model(cfg);
  Rng rng(1234);
  const int n = 100000;
  for (std::size_t mode = 1; mode <= 2; ++mode) {
    std::vector<double> busy, energy;
    busy.reserve(n);
    energy.reserve(n);
    for (int i = 0; i < n; ++i) {
      const FrameOutcome out = sample_outcome(m, {1, mode, 0.0}, rng);
      REQUIRE(out.busy >= m.duration_min);
      REQUIRE(out.energy >= 0.0);
      busy.push_back(out.busy);
      energy.push_back(out.energy);
    }
    const SampleStats bs = stats(busy);
    const SampleStats es = stats(energy);
    CHECK(std::abs(bs.mean - m.mean_duration(1, mode)) <= 4.0 * bs.stderr_est);
    CHECK(std::abs(es.mean - m.mean_energy(1, mode)) <= 4.0 * es.stderr_est);
  }
}

TEST_CASE("frame outcome identities hold for sampled frames") {
  TaskModelConfig cfg = one_class_config();
  cfg.duration_min = 3.0;  // leaves room for duration noise on the fast mode
  cfg.noise = {NoiseSpec{NoiseKind::exponential_shifted, 0.0}, NoiseSpec{NoiseKind::uniform, 0.5}};
  const TaskModel m = build_task_model(cfg);
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t mode = 1 + (i % 2);
    const double idle = (i % 3 == 0) ? m.idle_max : 0.0;
    const FrameOutcome out = sample_outcome(m, {1, mode, idle}, rng);
    REQUIRE(out.frame_total() == out.busy + out.idle);
    REQUIRE(out.busy >= m.duration_min);
    int served = 0;
    for (std::size_t n = 0; n <= m.num_classes; ++n) served += out.serves(n) ? 1 : 0;
    REQUIRE(served == 1);  // exactly one class indicator set, class 0 included
  }
}

TEST_CASE("arrival sampling follows the per-slot Bernoulli model") {
  std::vector<double> rates = {0.5};
  Rng rng(9);
  SECTION("zero admission probability yields zero arrivals") {
    TaskModelConfig cfg = one_class_config();
    cfg.rates = {0.5};
    const TaskModel m = build_task_model(cfg);
    for (int i = 0; i < 50; ++i)
      CHECK(sample_arrivals(m, 60, {0.0}, rng)[0] == 0.0);
  }
  SECTION("certain arrivals fill every slot") {
    rates = {1.0};
    CHECK(sample_arrivals(rates, {1.0}, 60, rng)[0] == 60.0);
  }
  SECTION("binomial mean matches rate * slots") {
    rates = {0.8 / 30.0};
    const int n = 100000;
    std::vector<double> draws;
    draws.reserve(n);
    for (int i = 0; i < n; ++i) draws.push_back(sample_arrivals(rates, {1.0}, 60, rng)[0]);
    double sum = 0.0;
    for (double d : draws) sum += d;
    const double mean = sum / n;
    // Binomial(60, 0.8/30): mean 1.6, variance 60 p (1-p)
    const double p = 0.8 / 30.0;
    const double sigma = std::sqrt(60.0 * p * (1.0 - p) / n);
    CHECK(std::abs(mean - 1.6) <= 3.0 * sigma);
  }
  SECTION("per-slot probability above one is rejected") {
    rates = {1.5};
    CHECK_THROWS_AS(sample_arrivals(rates, {1.0}, 10, rng), std::domain_error);
    rates = {0.5};
    CHECK_THROWS_AS(sample_arrivals(rates, {1.5}, 10, rng), std::domain_error);
  }
}

TEST_CASE("attribute model validation") {
  AttributeModel m;
  m.num_constraints = 1;
  m.bounds = {0.5};
  m.add_event(0.6);
  m.add_action(1.0, {1.0, 0.0});
  m.add_event(0.4);
  m.add_action(2.0, {0.5, -1.0});
  CHECK_NOTHROW(validate_attribute_model(m));
  CHECK(m.num_events() == 2);
  CHECK(m.num_actions(0) == 1);
  CHECK(m.frame_mean(1, 0) == 2.0);
  CHECK(m.attr_mean(1, 0, 1) == -1.0);

  SECTION("probabilities must sum to one") {
    m.event_probs[0] = 0.7;
    CHECK_THROWS_AS(validate_attribute_model(m), std::invalid_argument);
  }
  SECTION("frame means must be positive") {
    m.frame_means[0] = 0.0;
    CHECK_THROWS_AS(validate_attribute_model(m), std::invalid_argument);
  }
  SECTION("every event needs an action") {
    m.add_event(0.0);
    m.event_probs = {0.5, 0.5, 0.0};
    CHECK_THROWS_AS(validate_attribute_model(m), std::invalid_argument);
  }
}

TEST_CASE("event sampling follows the distribution") {
  AttributeModel m;
  m.num_constraints = 0;
  m.add_event(0.25);
  m.add_action(1.0, {0.0});
  m.add_event(0.75);
  m.add_action(1.0, {0.0});
  Rng rng(77);
  int hits = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) hits += sample_event(m, rng) == 1 ? 1 : 0;
  const double freq = static_cast<double>(hits) / n;
  CHECK(std::abs(freq - 0.75) < 0.01);
}
