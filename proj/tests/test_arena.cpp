#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "bidding/graph.hpp"
#include "bidding/mechanism.hpp"
#include "bidding/trace.hpp"

using namespace bidding;

TEST_CASE("graph validation accepts the two-vertex arena and a self-loop") {
  GameGraph g = make_bowtie();
  REQUIRE(g.size() == 2);
  REQUIRE(g.weight(0) == 1.0);
  REQUIRE(g.successors(0).size() == 2);

  RawGraph self;
  self.vertices = {{0, 7.0, std::nullopt}};
  self.edges = {{0, 0}};
  REQUIRE(validate_graph(self).weight(0) == 7.0);
}

TEST_CASE("graph validation rejections") {
  RawGraph oneway;
  oneway.vertices = {{0, 0.0, std::nullopt}, {1, 0.0, std::nullopt}};
  oneway.edges = {{0, 1}, {1, 1}};
  REQUIRE_THROWS_MATCHES(validate_graph(oneway), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.code() == Errc::NotStronglyConnected;
                         }));

  RawGraph no_succ;
  no_succ.vertices = {{0, 0.0, std::nullopt}, {1, 0.0, std::nullopt}};
  no_succ.edges = {{0, 1}};
  REQUIRE_THROWS_MATCHES(validate_graph(no_succ), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.code() == Errc::NoSuccessor;
                         }));

  RawGraph inf_w;
  inf_w.vertices = {{0, std::numeric_limits<double>::infinity(), std::nullopt}};
  inf_w.edges = {{0, 0}};
  REQUIRE_THROWS_MATCHES(validate_graph(inf_w), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.code() == Errc::NonFiniteWeight;
                         }));
}

TEST_CASE("resolve_bidding per scheme") {
  SECTION("all-pay Richman transfers the difference regardless of winner") {
    auto [w, b] = resolve_bidding(BiddingMechanism::ap_richman(), {0.6, 0.4}, 0.3, 0.1);
    REQUIRE(w == Player::Max);
    REQUIRE(b.max_budget == Catch::Approx(0.4).margin(1e-15));
    REQUIRE(b.min_budget == Catch::Approx(0.6).margin(1e-15));
  }
  SECTION("ties go to Min in every mechanism") {
    for (auto mech : {BiddingMechanism::fp_richman(), BiddingMechanism::fp_poorman(),
                      BiddingMechanism::ap_richman(), BiddingMechanism::ap_poorman(),
                      BiddingMechanism::taxman(0.3), BiddingMechanism::asymmetric(2.0)}) {
      BudgetState start{0.6, mech.kind == MechanismKind::Asymmetric ? 1.0 : 0.4};
      auto [w, b] = resolve_bidding(mech, start, 0.2, 0.2);
      REQUIRE(w == Player::Min);
    }
  }
  SECTION("asymmetric update pins Min at 1") {
    auto [w, b] = resolve_bidding(BiddingMechanism::asymmetric(2.0), {1.0, 1.0}, 0.3, 0.25);
    REQUIRE(w == Player::Max);
    REQUIRE(b.max_budget == Catch::Approx(1.2).margin(1e-15));
    REQUIRE(b.min_budget == 1.0);
  }
  SECTION("first-price poorman burns only the winner's bid") {
    auto [w, b] = resolve_bidding(BiddingMechanism::fp_poorman(), {3.0, 1.0}, 0.5, 0.2);
    REQUIRE(w == Player::Max);
    REQUIRE(b.max_budget == Catch::Approx(2.5));
    REQUIRE(b.min_budget == Catch::Approx(1.0));
  }
  SECTION("taxman splits the winning payment") {
    auto [w, b] = resolve_bidding(BiddingMechanism::taxman(0.25), {0.6, 0.4}, 0.2, 0.1);
    REQUIRE(w == Player::Max);
    REQUIRE(b.max_budget == Catch::Approx(0.4));
    REQUIRE(b.min_budget == Catch::Approx(0.4 + 0.75 * 0.2));
  }
  SECTION("illegal bids surface") {
    REQUIRE_THROWS_AS(resolve_bidding(BiddingMechanism::ap_richman(), {0.5, 0.5}, 0.6, 0.0), Error);
    REQUIRE_THROWS_AS(resolve_bidding(BiddingMechanism::ap_richman(), {0.5, 0.5}, -0.1, 0.0), Error);
  }
}

TEST_CASE("Richman budget sum is conserved across random bid sequences") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (auto mech : {BiddingMechanism::fp_richman(), BiddingMechanism::ap_richman()}) {
    BudgetState b{0.6180339887, 0.3819660113};
    const double sum0 = b.sum();
    for (int i = 0; i < 2000; ++i) {
      const double x = unif(rng) * b.max_budget;
      const double y = unif(rng) * b.min_budget;
      b = resolve_bidding(mech, b, x, y).second;
      REQUIRE(std::abs(b.sum() - sum0) < 1e-12);
    }
  }
}

TEST_CASE("normalize_budgets per family and ratio preservation") {
  BudgetState r = normalize_budgets(BiddingMechanism::ap_richman(), {3.0, 1.0});
  REQUIRE(r.max_budget == Catch::Approx(0.75).margin(1e-15));
  REQUIRE(r.min_budget == Catch::Approx(0.25).margin(1e-15));

  BudgetState p = normalize_budgets(BiddingMechanism::ap_poorman(), {0.75, 0.25});
  REQUIRE(p.max_budget == Catch::Approx(3.0).margin(1e-15));
  REQUIRE(p.min_budget == 1.0);

  BudgetState a = normalize_budgets(BiddingMechanism::asymmetric(2.0), {1.2, 1.0});
  REQUIRE(a.max_budget == Catch::Approx(1.2).margin(1e-15));
  REQUIRE(a.min_budget == 1.0);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.01, 10.0);
  for (int i = 0; i < 500; ++i) {
    BudgetState b{unif(rng), unif(rng)};
    for (auto mech : {BiddingMechanism::ap_richman(), BiddingMechanism::ap_poorman()}) {
      BudgetState n = normalize_budgets(mech, b);
      REQUIRE(n.ratio() == Catch::Approx(b.ratio()).epsilon(1e-12));
    }
  }

  REQUIRE_THROWS_AS(normalize_budgets(BiddingMechanism::ap_poorman(), {1.0, 0.0}), Error);
}

TEST_CASE("energy prefix sums and payoff proxies") {
  GameGraph g = make_bowtie();

  SECTION("alternating visits average one half") {
    std::vector<VertexId> visited;
    for (int i = 0; i < 1000; ++i) visited.push_back(i % 2);
    EnergyStats e = energy_and_payoff(visited, g);
    REQUIRE(e.payoff_estimate == Catch::Approx(0.5).margin(1e-12));
  }
  SECTION("all steps at the weight-0 vertex") {
    std::vector<VertexId> visited(100, 1);
    EnergyStats e = energy_and_payoff(visited, g);
    REQUIRE(e.payoff_estimate == 0.0);
    REQUIRE(e.tail_min_average == 0.0);
  }
  SECTION("three-step prefix sums recomputed independently") {
    RawGraph raw;
    raw.vertices = {{0, 1.0, std::nullopt}, {1, 0.0, std::nullopt}, {2, 1.0, std::nullopt}};
    raw.edges = {{0, 1}, {1, 2}, {2, 0}};
    GameGraph cyc = validate_graph(raw);
    EnergyStats e = energy_and_payoff(std::vector<VertexId>{0, 1, 2}, cyc);
    REQUIRE(e.energy_prefix == std::vector<double>{0.0, 1.0, 1.0, 2.0});
  }
  SECTION("prefix sums match an independent accumulation on random walks") {
    std::mt19937_64 rng(3);
    std::vector<VertexId> visited;
    VertexId v = 0;
    for (int i = 0; i < 300; ++i) {
      visited.push_back(v);
      v = g.successors(v)[rng() % 2];
    }
    EnergyStats e = energy_and_payoff(visited, g);
    double acc = 0.0;
    for (size_t i = 0; i < visited.size(); ++i) {
      acc += g.weight(visited[i]);
      REQUIRE(e.energy_prefix[i + 1] == Catch::Approx(acc).margin(0.0));
    }
  }
  SECTION("empty trace is rejected") {
    REQUIRE_THROWS_AS(energy_and_payoff(std::vector<VertexId>{}, g), Error);
  }
}
