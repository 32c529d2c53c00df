#pragma once

#include <cmath>

#include "sflow/config.hpp"

namespace testing_models {

inline sflow::PotentialSpec table(std::map<std::string, double> t) {
  sflow::PotentialSpec p;
  p.form = sflow::PotentialSpec::Form::Table;
  p.table = std::move(t);
  return p;
}
inline sflow::PotentialSpec constant(double c) {
  sflow::PotentialSpec p;
  p.constant = c;
  return p;
}

// Golden-mean shift, potentials on single symbols.
inline sflow::ModelSpec golden() {
  sflow::ModelSpec m;
  m.alphabet_size = 2;
  m.transition = {{1, 1}, {1, 0}};
  m.f = table({{"0", 0.3}, {"1", -0.2}});
  m.tau = table({{"0", 1.0}, {"1", 1.6180339887}});
  m.ghat = table({{"0", 1.0}, {"1", -0.5}});
  return m;
}

// Full 3-shift, roof and G generic per symbol.
inline sflow::ModelSpec three_symbol() {
  sflow::ModelSpec m;
  m.alphabet_size = 3;
  m.transition = {{1, 1, 1}, {1, 1, 1}, {1, 1, 1}};
  m.f = table({{"0", 0.1}, {"1", -0.2}, {"2", 0.05}});
  m.tau = table({{"0", 1.0}, {"1", 1.4142135624}, {"2", 0.7320508076}});
  m.ghat = table({{"0", 0.51}, {"1", 0.06}, {"2", 0.3}});
  return m;
}

// Binary shift with memory one, everything depends on (x0, x1).
inline sflow::ModelSpec chain_memory1() {
  sflow::ModelSpec m;
  m.alphabet_size = 2;
  m.transition = {{1, 1}, {1, 1}};
  m.memory = 1;
  m.f = table({{"00", 0.0}, {"01", 0.2}, {"10", -0.1}, {"11", 0.15}});
  m.tau = table({{"00", 1.0}, {"01", 1.3247179572}, {"10", 0.8284271247}, {"11", 1.5707963268}});
  m.ghat = table({{"00", 0.38}, {"01", 0.19}, {"10", 0.33}, {"11", 0.12}});
  return m;
}

}  // namespace testing_models
