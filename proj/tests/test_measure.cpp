#include <doctest.h>

#include <random>

#include "apm/construction.hpp"
#include "apm/errors.hpp"
#include "apm/measure.hpp"
#include "oracles.hpp"

using namespace apm;

namespace {

Rational q(long p, long d = 1) {
  Rational r(p, d);
  r.canonicalize();
  return r;
}

DiscreteMeasure random_measure(std::mt19937& rng, std::size_t n, const Interval& window) {
  std::uniform_int_distribution<long> pos(0, 400);
  std::uniform_int_distribution<long> mass(-5, 5);
  std::vector<Atom> atoms;
  const Rational span = window.hi - window.lo;
  for (std::size_t i = 0; i < n; ++i)
    atoms.push_back({window.lo + span * q(pos(rng), 400), q(mass(rng), 3)});
  return make_measure(std::move(atoms), window);
}

}  // namespace

TEST_CASE("rational parsing is exact") {
  CHECK(parse_rational("3/6") == q(1, 2));
  CHECK(parse_rational("-7") == q(-7));
}

TEST_CASE("rational parsing rejects inexact or malformed text") {
  CHECK_THROWS_AS(parse_rational("0.5"), ConfigError);
  CHECK_THROWS_AS(parse_rational("1e3"), ConfigError);
  CHECK_THROWS_AS(parse_rational("1/0"), ConfigError);
  CHECK_THROWS_AS(parse_rational(""), ConfigError);
  CHECK_THROWS_AS(parse_rational("4/-2"), ConfigError);
  CHECK(to_string(q(-3, 4)) == "-3/4");
  CHECK(to_decimal(q(-1, 3), 4) == "~-0.3333");
  CHECK(to_decimal(q(1, 1024), 3) == "~0.000");
}

TEST_CASE("interval membership honors openness") {
  const Interval J = Interval::open(q(-1, 3), q(1, 3));
  CHECK(J.contains(0));
  CHECK_FALSE(J.contains(q(1, 3)));
  CHECK(J.subset_of(J.closure()));
  CHECK_FALSE(J.closure().subset_of(J));
  CHECK_FALSE(intersect(Interval::open(0, 1), Interval::closed(1, 2)).has_value());
  CHECK(intersect(Interval::closed(0, 1), Interval::closed(1, 2))->lo == 1);
}

TEST_CASE("make_measure canonicalizes") {
  const Interval w = Interval::closed(-1, 1);
  auto single = make_measure({{0, 1}}, w);
  CHECK(single.atoms() == std::vector<Atom>{{0, 1}});

  CHECK(make_measure({{0, 1}, {0, -1}}, w).empty());

  auto merged = make_measure({{q(1, 2), q(1, 3)}, {q(1, 2), q(1, 3)}}, Interval::closed(0, 1));
  CHECK(merged.atoms() == std::vector<Atom>{{q(1, 2), q(2, 3)}});

  auto unsorted = make_measure({{1, 2}, {-1, 3}, {0, 5}}, w);
  CHECK(unsorted.atoms().front().position == -1);
  CHECK(make_measure(unsorted.atoms(), w) == unsorted);
}

TEST_CASE("make_measure rejects atoms outside the window") {
  try {
    make_measure({{0, 1}, {2, q(1, 2)}}, Interval::closed(-1, 1));
    FAIL("expected WindowError");
  } catch (const WindowError& e) {
    CHECK(std::string(e.what()).find("(2, 1/2)") != std::string::npos);
  }
  CHECK_THROWS_AS(make_measure({{1, 1}}, Interval::closed(-1, 1).interior()), WindowError);
}

TEST_CASE("shift moves atoms and window") {
  const auto mu = make_measure({{0, 1}}, Interval::closed(-1, 1));
  CHECK(shift(mu, 1).atoms() == std::vector<Atom>{{1, 1}});
  CHECK(shift(mu, 1).window() == Interval::closed(0, 2));
  CHECK(shift(mu, 0) == mu);
  const auto nu = make_measure({{q(1, 16), q(1, 2)}}, Interval::closed(0, 1));
  CHECK(shift(shift(nu, 3), -3) == nu);
}

TEST_CASE("shift is a group action") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<long> t(-50, 50);
  for (int trial = 0; trial < 20; ++trial) {
    const auto mu = random_measure(rng, 12, Interval::closed(-2, 2));
    const Rational a = q(t(rng), 7), b = q(t(rng), 11);
    CHECK(shift(shift(mu, a), b) == shift(mu, a + b));
  }
}

TEST_CASE("averaging operator T_k") {
  const auto delta = make_measure({{0, 1}}, Interval::closed(-1, 1));
  CHECK(averaging_operator(delta, 1).atoms() ==
        std::vector<Atom>{{q(-1, 16), q(1, 2)}, {q(1, 16), q(1, 2)}});
  CHECK(averaging_operator(delta, 2).atoms() == std::vector<Atom>{{q(-1, 512), q(1, 4)},
                                                                  {q(-1, 1024), q(1, 4)},
                                                                  {q(1, 1024), q(1, 4)},
                                                                  {q(1, 512), q(1, 4)}});
  CHECK(averaging_operator(delta, 1).window() == Interval::closed(q(-17, 16), q(17, 16)));

  const auto mu = make_measure({{0, 1}, {1, 2}}, Interval::closed(-1, 2));
  CHECK(averaging_operator(mu, 3).total_mass() == mu.total_mass());
  CHECK_THROWS_AS(averaging_operator(mu, 0), ConfigError);
}

TEST_CASE("averaging preserves mass and variation of positive measures") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<long> pos(0, 100);
  for (unsigned k = 1; k <= 4; ++k) {
    std::vector<Atom> atoms;
    for (int i = 0; i < 8; ++i) atoms.push_back({q(pos(rng), 10), q(1 + i, 5)});
    const auto mu = make_measure(std::move(atoms), Interval::closed(0, 10));
    const auto t = averaging_operator(mu, k);
    CHECK(t.total_mass() == mu.total_mass());
    CHECK(variation_on(t, t.window()) == variation_on(mu, mu.window()));
  }
}

TEST_CASE("combine and scale") {
  const Interval w = Interval::closed(-2, 2);
  const auto a = make_measure({{0, 1}}, w);
  const auto b = make_measure({{1, 1}}, w);
  CHECK(combine(1, a, -1, a).empty());
  CHECK(combine(2, a, 0, b) == scale(a, 2));
  CHECK(combine(1, a, 1, b).atoms() == std::vector<Atom>{{0, 1}, {1, 1}});
  CHECK(combine(1, a, 1, DiscreteMeasure::from_canonical({}, w)) == a);
  CHECK_THROWS_AS(combine(1, a, 1, make_measure({{5, 1}}, Interval::closed(4, 6))), WindowError);

  const auto narrow = make_measure({{1, 1}}, Interval::closed(0, 3));
  const auto mixed = combine(1, make_measure({{-1, 1}, {1, 1}}, w), 1, narrow);
  CHECK(mixed.window() == Interval::closed(0, 2));
  CHECK(mixed.atoms() == std::vector<Atom>{{1, 2}});
}

TEST_CASE("restrict") {
  const auto mu = make_measure({{0, 1}, {2, 1}}, Interval::closed(-3, 3));
  CHECK(restrict(mu, Interval::closed(-1, 1)).atoms() == std::vector<Atom>{{0, 1}});
  CHECK(restrict(mu, mu.window()) == mu);
  CHECK_THROWS_AS(restrict(mu, Interval::closed(-4, 0)), WindowError);

  const auto mu1 = build_stage(1).measure();
  CHECK(restrict(mu1, Interval::open(q(-1, 3), q(1, 3))).atoms() == std::vector<Atom>{{0, 1}});
}

TEST_CASE("variation_on") {
  const auto mu = make_measure({{0, -1}, {1, 1}}, Interval::closed(-1, 2));
  CHECK(variation_on(mu, Interval::closed(0, 1)) == 2);
  CHECK(variation_on(DiscreteMeasure::from_canonical({}, Interval::closed(0, 1)),
                     Interval::closed(0, 1)) == 0);
  const auto mu1 = build_stage(1).measure();
  CHECK(variation_on(mu1, Interval::closed(q(-1, 3), q(1, 3))) == 1);
  CHECK_THROWS_AS(variation_on(mu, Interval::closed(0, 5)), WindowError);
}

TEST_CASE("sliding_variation_sup") {
  const auto mu = make_measure({{0, 1}, {1, 1}, {2, 1}}, Interval::closed(0, 2));
  const auto sup = sliding_variation_sup(mu, 1);
  CHECK(sup.value == 2);
  CHECK(sup.witness == 0);

  const auto mu2 = build_stage(2).measure();
  const auto sup2 = sliding_variation_sup(mu2, 1);
  CHECK(sup2.value <= 2);
  CHECK(sup2.value == oracle::variation_sup(mu2, 1));
  CHECK(variation_on(mu2, Interval::closed(sup2.witness, sup2.witness + 1)) == sup2.value);

  CHECK(sliding_variation_sup(DiscreteMeasure::from_canonical({}, Interval::closed(0, 3)), 1)
            .value == 0);
  CHECK_THROWS_AS(sliding_variation_sup(mu, 0), ConfigError);
  CHECK_THROWS_AS(sliding_variation_sup(mu, 5), ConfigError);
}

TEST_CASE("sliding_variation_sup matches brute force on random measures") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 25; ++trial) {
    const auto mu = random_measure(rng, 15, Interval::closed(0, 4));
    for (const Rational L : {q(1, 3), q(1), q(5, 2)}) {
      const auto sup = sliding_variation_sup(mu, L);
      CHECK(sup.value == oracle::variation_sup(mu, L));
      CHECK(sup.value <= variation_on(mu, mu.window()));
    }
  }
}

TEST_CASE("sliding_count_sup") {
  const auto pair = make_measure({{0, 1}, {1, 1}}, Interval::closed(0, 1));
  CHECK(sliding_count_sup(pair, q(1, 4)).count == 1);
  CHECK_THROWS_AS(sliding_count_sup(pair, 0), ConfigError);

  const auto mu2 = build_stage(2).measure();
  const auto c2 = sliding_count_sup(mu2, q(1, 16));
  CHECK(c2.count == 4);
  CHECK(c2.count == oracle::count_sup(mu2.atoms(), q(1, 16)));
  CHECK(mu2.atoms_in(Interval::open(c2.witness - q(1, 16), c2.witness + q(1, 16))).size() == 4);
  // The cluster around 3 is one of the maximizers.
  CHECK(mu2.atoms_in(Interval::open(3 - q(1, 16), 3 + q(1, 16))).size() == 4);

  const auto mu3 = build_stage(3).measure();
  const auto c3 = sliding_count_sup(mu3, q(1, 16));
  CHECK(c3.count == 24);
  CHECK(c3.count == oracle::count_sup(mu3.atoms(), q(1, 16)));
  CHECK(mu3.atoms_in(Interval::open(12 - q(1, 16), 12 + q(1, 16))).size() == 24);
}

TEST_CASE("sliding_count_sup is monotone in u") {
  const auto mu3 = build_stage(3).measure();
  std::size_t last = 0;
  for (long d : {4096L, 1024L, 256L, 64L, 16L, 4L, 2L, 1L}) {
    const std::size_t c = sliding_count_sup(mu3, Rational(1, d)).count;
    CHECK(c >= last);
    CHECK(c == oracle::count_sup(mu3.atoms(), Rational(1, d)));
    last = c;
  }
}

TEST_CASE("min_gap and common-window equality") {
  const auto mu = make_measure({{0, 1}, {q(1, 4), 1}, {1, 1}}, Interval::closed(0, 1));
  CHECK(min_gap(mu) == q(1, 4));
  const auto nu = make_measure({{0, 1}, {q(1, 4), 1}, {2, 1}}, Interval::closed(0, 2));
  CHECK(equal_on_common_window(restrict(mu, Interval::closed(0, q(1, 2))), nu));
  CHECK_FALSE(equal_on_common_window(mu, nu));
}
