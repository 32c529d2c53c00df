#include <cmath>

#include "doctest.h"
#include "sflow/shift.hpp"

using namespace sflow;

namespace {

using IMat = std::vector<std::vector<long long>>;

IMat mul(const IMat& a, const IMat& b) {
  const size_t k = a.size();
  IMat c(k, std::vector<long long>(k, 0));
  for (size_t i = 0; i < k; ++i)
    for (size_t j = 0; j < k; ++j)
      for (size_t l = 0; l < k; ++l) c[i][j] += a[i][l] * b[l][j];
  return c;
}

IMat power(const std::vector<std::vector<int>>& t, int n) {
  const size_t k = t.size();
  IMat a(k, std::vector<long long>(k));
  IMat r(k, std::vector<long long>(k, 0));
  for (size_t i = 0; i < k; ++i) {
    r[i][i] = 1;
    for (size_t j = 0; j < k; ++j) a[i][j] = t[i][j];
  }
  for (int i = 0; i < n; ++i) r = mul(r, a);
  return r;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("validation of transition matrices") {
  CHECK(SymbolicSystem::validate(2, {{1, 1}, {1, 1}}, 0)->primitivity_power() == 1);
  CHECK(SymbolicSystem::validate(2, {{1, 1}, {1, 0}}, 0)->primitivity_power() == 2);
  CHECK(kind_of([] { SymbolicSystem::validate(2, {{1, 0}, {0, 1}}, 0); }) == ErrorKind::NotPrimitive);
  CHECK(kind_of([] { SymbolicSystem::validate(2, {{1, 1}, {0, 0}}, 0); }) == ErrorKind::ZeroRow);
  CHECK(kind_of([] { SymbolicSystem::validate(2, {{1, 1}}, 0); }) == ErrorKind::InvalidArgument);
  // period-two cycle is irreducible but not aperiodic
  CHECK(kind_of([] { SymbolicSystem::validate(2, {{0, 1}, {1, 0}}, 0); }) == ErrorKind::NotPrimitive);
}

TEST_CASE("word counts match powers of the transition matrix") {
  const std::vector<std::vector<int>> a = {{1, 1, 0}, {0, 1, 1}, {1, 1, 1}};
  auto sys = SymbolicSystem::validate(3, a, 0);
  for (int n = 1; n <= 10; ++n) {
    const IMat p = power(a, n - 1), q = power(a, n);
    long long total = 0, trace = 0;
    for (int i = 0; i < 3; ++i) {
      trace += q[i][i];
      for (int j = 0; j < 3; ++j) total += p[i][j];
    }
    CHECK(static_cast<long long>(enumerate_words(*sys, n).size()) == total);
    CHECK(static_cast<long long>(periodic_orbits(*sys, n).size()) == trace);
  }
}

TEST_CASE("enumeration is lexicographic and admissible") {
  auto sys = SymbolicSystem::validate(2, {{1, 1}, {1, 0}}, 0);
  const auto words = enumerate_words(*sys, 6);
  for (size_t i = 0; i < words.size(); ++i) {
    const Symbols w = sys->decode(words[i]);
    CHECK(sys->admissible(w));
    if (i > 0) CHECK(sys->decode(words[i - 1]) < w);
  }
}

TEST_CASE("enumeration cap") {
  auto sys = SymbolicSystem::validate(2, {{1, 1}, {1, 1}}, 0, 1000);
  CHECK(kind_of([&] { enumerate_words(*sys, 12); }) == ErrorKind::LengthOverflow);
}

TEST_CASE("states are admissible windows") {
  auto sys = SymbolicSystem::validate(2, {{1, 1}, {1, 0}}, 2);
  CHECK(sys->num_states() == 5);  // 000 001 010 100 101
  for (int s = 0; s < sys->num_states(); ++s) {
    CHECK(sys->state_index(sys->state_symbols(s)) == s);
    for (int t : sys->successors(s)) {
      const Symbols& a = sys->state_symbols(s);
      const Symbols& b = sys->state_symbols(t);
      CHECK(std::equal(a.begin() + 1, a.end(), b.begin()));
    }
  }
  CHECK(sys->state_index({1, 1, 0}) == -1);
  CHECK(sys->with_memory(0)->num_states() == 2);
}

TEST_CASE("parse and print round trip") {
  auto sys = SymbolicSystem::validate(12, std::vector<std::vector<int>>(12, std::vector<int>(12, 1)), 0);
  const Symbols w = {0, 11, 10, 3};
  CHECK(sys->to_string(w) == "0ba3");
  CHECK(sys->parse("0ba3") == w);
  CHECK(kind_of([&] { sys->parse("0z"); }) == ErrorKind::ParseError);
  CHECK(sys->decode(sys->encode(w)) == w);
}

TEST_CASE("potential tables") {
  auto sys = SymbolicSystem::validate(2, {{1, 1}, {1, 0}}, 1);
  // prefix key "0" covers 00 and 01
  RealPotential p = potential_from_table(sys, {{"0", 2.0}, {"10", -1.0}});
  CHECK(p.window_value({0, 0}) == 2.0);
  CHECK(p.window_value({0, 1}) == 2.0);
  CHECK(p.window_value({1, 0}) == -1.0);
  CHECK(kind_of([&] { potential_from_table(sys, {{"0", 1.0}}); }) == ErrorKind::MissingEntry);
  CHECK(kind_of([&] { potential_from_table(sys, {{"0", 1.0}, {"01", 1.0}, {"10", 0.0}}); }) ==
        ErrorKind::ValidationError);
  CHECK(kind_of([&] { potential_from_table(sys, {{"0", 1.0}, {"11", 1.0}, {"10", 0.0}}); }) ==
        ErrorKind::ValidationError);
}

TEST_CASE("Birkhoff sums") {
  auto sys = SymbolicSystem::validate(2, {{1, 1}, {1, 1}}, 1);
  RealPotential p = RealPotential::from_function(sys, [](const Symbols& w) { return 10.0 * w[0] + w[1]; });
  const Symbols x = {0, 1, 1, 0, 1};
  CHECK(birkhoff_sum(p, x, 4) == doctest::Approx(1 + 11 + 10 + 1));
  CHECK(kind_of([&] { birkhoff_sum(p, x, 5); }) == ErrorKind::WindowOverrun);
  // cyclic: windows 01 11 10 00 -> 1 + 11 + 10 + 0
  CHECK(cyclic_birkhoff_sum(p, Symbols{0, 1, 1, 0}) == doctest::Approx(1 + 11 + 10 + 0));
}
