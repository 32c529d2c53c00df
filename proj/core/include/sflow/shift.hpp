#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sflow/error.hpp"

namespace sflow {

using Symbols = std::vector<int>;

// Packed base-k code, first symbol most significant, so numeric order is
// lexicographic order among words of equal length.
struct Word {
  std::uint64_t code = 0;
  int length = 0;
  bool admissible = false;
};

class SymbolicSystem;
using SystemPtr = std::shared_ptr<const SymbolicSystem>;

class SymbolicSystem {
 public:
  static constexpr std::uint64_t kDefaultCap = std::uint64_t{1} << 24;

  // Throws ZeroRow / NotPrimitive / InvalidArgument.
  static SystemPtr validate(int k, const std::vector<std::vector<int>>& transition, int memory,
                            std::uint64_t enumeration_cap = kDefaultCap);

  // Same transition structure, different window length.
  SystemPtr with_memory(int memory) const;

  int alphabet_size() const { return k_; }
  int memory() const { return m_; }
  int window_length() const { return m_ + 1; }
  int primitivity_power() const { return primitivity_power_; }
  std::uint64_t enumeration_cap() const { return cap_; }
  const std::vector<std::vector<int>>& transition() const { return a_; }
  bool allowed(int a, int b) const { return a_[a][b] != 0; }

  bool admissible(const Symbols& w) const;
  bool cyclically_admissible(const Symbols& w) const;

  // States are the admissible (m+1)-windows, in lexicographic order.
  int num_states() const { return static_cast<int>(states_.size()); }
  const Symbols& state_symbols(int s) const { return states_[s]; }
  // -1 when the window is inadmissible or has the wrong length.
  int state_index(const Symbols& window) const;
  int state_at(const Symbols& word, int pos) const;
  const std::vector<int>& successors(int s) const { return succ_[s]; }
  const std::vector<int>& predecessors(int s) const { return pred_[s]; }

  Word encode(const Symbols& w) const;
  Symbols decode(const Word& w) const;
  std::string to_string(const Symbols& w) const;
  // Throws ParseError on an unknown symbol character.
  Symbols parse(const std::string& s) const;

 private:
  SymbolicSystem() = default;
  void build_states();

  int k_ = 0;
  int m_ = 0;
  int primitivity_power_ = 0;
  std::uint64_t cap_ = kDefaultCap;
  std::vector<std::vector<int>> a_;
  std::vector<Symbols> states_;
  std::vector<int> code_to_state_;
  std::vector<std::vector<int>> succ_;
  std::vector<std::vector<int>> pred_;
};

std::vector<Word> enumerate_words(const SymbolicSystem& sys, int n);
std::vector<Word> periodic_orbits(const SymbolicSystem& sys, int n);

// Locally constant function of the first m+1 coordinates, stored per state.
template <class T>
class CylinderPotential {
 public:
  using value_type = T;

  CylinderPotential() = default;
  CylinderPotential(SystemPtr sys, std::vector<T> values) : sys_(std::move(sys)), v_(std::move(values)) {
    if (!sys_ || static_cast<int>(v_.size()) != sys_->num_states())
      throw Error(ErrorKind::MissingEntry, "potential table does not cover the admissible windows");
  }

  static CylinderPotential constant(SystemPtr sys, T c) {
    std::vector<T> v(sys->num_states(), c);
    return CylinderPotential(std::move(sys), std::move(v));
  }

  static CylinderPotential from_function(SystemPtr sys, const std::function<T(const Symbols&)>& fn) {
    std::vector<T> v(sys->num_states());
    for (int s = 0; s < sys->num_states(); ++s) v[s] = fn(sys->state_symbols(s));
    return CylinderPotential(std::move(sys), std::move(v));
  }

  const SystemPtr& system() const { return sys_; }
  int size() const { return static_cast<int>(v_.size()); }
  const std::vector<T>& values() const { return v_; }
  const T& operator[](int s) const { return v_[s]; }
  T& operator[](int s) { return v_[s]; }

  T window_value(const Symbols& window) const {
    int s = sys_->state_index(window);
    if (s < 0) throw Error(ErrorKind::MissingEntry, "no value for window " + sys_->to_string(window));
    return v_[s];
  }

  template <class U>
  CylinderPotential<U> cast() const {
    std::vector<U> out(v_.begin(), v_.end());
    return CylinderPotential<U>(sys_, std::move(out));
  }

  CylinderPotential& operator+=(const CylinderPotential& o) {
    for (int i = 0; i < size(); ++i) v_[i] += o.v_[i];
    return *this;
  }
  CylinderPotential& operator-=(const CylinderPotential& o) {
    for (int i = 0; i < size(); ++i) v_[i] -= o.v_[i];
    return *this;
  }
  CylinderPotential& operator*=(T c) {
    for (auto& x : v_) x *= c;
    return *this;
  }
  friend CylinderPotential operator+(CylinderPotential a, const CylinderPotential& b) { return a += b; }
  friend CylinderPotential operator-(CylinderPotential a, const CylinderPotential& b) { return a -= b; }
  friend CylinderPotential operator*(T c, CylinderPotential a) { return a *= c; }

 private:
  SystemPtr sys_;
  std::vector<T> v_;
};

using RealPotential = CylinderPotential<double>;
using ComplexPotential = CylinderPotential<std::complex<double>>;

// Keys may be admissible words of any length l <= m+1; a key fixes the value
// of every window that starts with it. Keys must cover each window exactly once.
RealPotential potential_from_table(const SystemPtr& sys, const std::map<std::string, double>& table);

// Sum of n window values along word; needs |word| >= n + m.
template <class T>
T birkhoff_sum(const CylinderPotential<T>& phi, const Symbols& word, int n) {
  const auto& sys = *phi.system();
  if (n < 0 || static_cast<int>(word.size()) < n + sys.memory())
    throw Error(ErrorKind::WindowOverrun, "word too short for requested Birkhoff sum");
  T acc{};
  for (int j = 0; j < n; ++j) {
    int s = sys.state_at(word, j);
    if (s < 0) throw Error(ErrorKind::InadmissibleWord, sys.to_string(word));
    acc += phi[s];
  }
  return acc;
}

// Birkhoff sum over one period of the periodic point with period word w.
template <class T>
T cyclic_birkhoff_sum(const CylinderPotential<T>& phi, const Symbols& w) {
  const int n = static_cast<int>(w.size());
  const int m = phi.system()->memory();
  Symbols ext(w);
  for (int j = 0; j < m; ++j) ext.push_back(w[j % n]);
  return birkhoff_sum(phi, ext, n);
}

}  // namespace sflow
