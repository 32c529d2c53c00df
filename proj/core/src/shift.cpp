#include "sflow/shift.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace sflow {
namespace {

using IntMatrix = std::vector<std::vector<std::uint64_t>>;

IntMatrix bool_product(const IntMatrix& x, const IntMatrix& y) {
  const size_t k = x.size();
  IntMatrix out(k, std::vector<std::uint64_t>(k, 0));
  for (size_t i = 0; i < k; ++i)
    for (size_t l = 0; l < k; ++l)
      if (x[i][l])
        for (size_t j = 0; j < k; ++j)
          if (y[l][j]) out[i][j] = 1;
  return out;
}

bool all_positive(const IntMatrix& x) {
  for (const auto& row : x)
    for (auto v : row)
      if (!v) return false;
  return true;
}

// k^n, saturating.
std::uint64_t power_sat(int k, int n) {
  std::uint64_t r = 1;
  for (int i = 0; i < n; ++i) {
    if (r > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(k))
      return std::numeric_limits<std::uint64_t>::max();
    r *= static_cast<std::uint64_t>(k);
  }
  return r;
}

constexpr const char* kDigits = "0123456789abcdefghijklmnopqrstuvwxyz";

}  // namespace

SystemPtr SymbolicSystem::validate(int k, const std::vector<std::vector<int>>& transition, int memory,
                                   std::uint64_t enumeration_cap) {
  if (k < 2) throw Error(ErrorKind::InvalidArgument, "alphabet size must be at least 2");
  if (k > 36) throw Error(ErrorKind::InvalidArgument, "alphabet size above 36 is not supported");
  if (memory < 0) throw Error(ErrorKind::InvalidArgument, "memory must be non-negative");
  if (static_cast<int>(transition.size()) != k)
    throw Error(ErrorKind::InvalidArgument, "transition matrix must be k x k");
  for (int i = 0; i < k; ++i) {
    if (static_cast<int>(transition[i].size()) != k)
      throw Error(ErrorKind::InvalidArgument, "transition matrix must be k x k");
    for (int v : transition[i])
      if (v != 0 && v != 1) throw Error(ErrorKind::InvalidArgument, "transition entries must be 0 or 1");
  }
  for (int i = 0; i < k; ++i) {
    bool any = false;
    for (int j = 0; j < k; ++j) any = any || transition[i][j];
    if (!any) throw Error(ErrorKind::ZeroRow, "symbol " + std::to_string(i) + " has no successor");
  }

  // Wielandt: a primitive k x k matrix has a positive power at most (k-1)^2 + 1.
  IntMatrix a(k, std::vector<std::uint64_t>(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) a[i][j] = transition[i][j];
  IntMatrix p = a;
  int power = 1;
  const int bound = (k - 1) * (k - 1) + 1;
  while (!all_positive(p)) {
    if (++power > bound) throw Error(ErrorKind::NotPrimitive, "transition matrix is reducible or periodic");
    p = bool_product(p, a);
  }

  auto sys = std::shared_ptr<SymbolicSystem>(new SymbolicSystem());
  sys->k_ = k;
  sys->m_ = memory;
  sys->cap_ = enumeration_cap;
  sys->a_ = transition;
  sys->primitivity_power_ = power;
  sys->build_states();
  return sys;
}

SystemPtr SymbolicSystem::with_memory(int memory) const {
  return validate(k_, a_, memory, cap_);
}

void SymbolicSystem::build_states() {
  const std::uint64_t total = power_sat(k_, m_ + 1);
  if (total > cap_) throw Error(ErrorKind::LengthOverflow, "window count k^(m+1) exceeds the enumeration cap");
  code_to_state_.assign(static_cast<size_t>(total), -1);
  for (const Word& w : enumerate_words(*this, m_ + 1)) {
    code_to_state_[w.code] = static_cast<int>(states_.size());
    states_.push_back(decode(w));
  }
  const int n = num_states();
  succ_.assign(n, {});
  pred_.assign(n, {});
  for (int s = 0; s < n; ++s) {
    const Symbols& w = states_[s];
    Symbols next(w.begin() + 1, w.end());
    next.push_back(0);
    for (int b = 0; b < k_; ++b) {
      if (!allowed(w.back(), b)) continue;
      next.back() = b;
      int t = state_index(next);
      succ_[s].push_back(t);
      pred_[t].push_back(s);
    }
  }
}

bool SymbolicSystem::admissible(const Symbols& w) const {
  for (int x : w)
    if (x < 0 || x >= k_) return false;
  for (size_t i = 0; i + 1 < w.size(); ++i)
    if (!allowed(w[i], w[i + 1])) return false;
  return true;
}

bool SymbolicSystem::cyclically_admissible(const Symbols& w) const {
  return !w.empty() && admissible(w) && allowed(w.back(), w.front());
}

int SymbolicSystem::state_index(const Symbols& window) const {
  if (static_cast<int>(window.size()) != m_ + 1) return -1;
  std::uint64_t code = 0;
  for (int x : window) {
    if (x < 0 || x >= k_) return -1;
    code = code * k_ + x;
  }
  return code_to_state_[code];
}

int SymbolicSystem::state_at(const Symbols& word, int pos) const {
  if (pos < 0 || pos + m_ + 1 > static_cast<int>(word.size())) return -1;
  std::uint64_t code = 0;
  for (int j = 0; j <= m_; ++j) {
    int x = word[pos + j];
    if (x < 0 || x >= k_) return -1;
    code = code * k_ + x;
  }
  return code_to_state_[code];
}

Word SymbolicSystem::encode(const Symbols& w) const {
  if (power_sat(k_, static_cast<int>(w.size())) == std::numeric_limits<std::uint64_t>::max())
    throw Error(ErrorKind::LengthOverflow, "word too long to pack");
  Word out;
  out.length = static_cast<int>(w.size());
  for (int x : w) out.code = out.code * k_ + x;
  out.admissible = admissible(w);
  return out;
}

Symbols SymbolicSystem::decode(const Word& w) const {
  Symbols out(w.length);
  std::uint64_t c = w.code;
  for (int i = w.length - 1; i >= 0; --i) {
    out[i] = static_cast<int>(c % k_);
    c /= k_;
  }
  return out;
}

std::string SymbolicSystem::to_string(const Symbols& w) const {
  std::string s;
  for (int x : w) s.push_back((x >= 0 && x < 36) ? kDigits[x] : '?');
  return s;
}

Symbols SymbolicSystem::parse(const std::string& s) const {
  Symbols out;
  for (char c : s) {
    const char* p = std::find(kDigits, kDigits + k_, static_cast<char>(std::tolower(c)));
    if (p == kDigits + k_) throw Error(ErrorKind::ParseError, "unknown symbol '" + std::string(1, c) + "' in word " + s);
    out.push_back(static_cast<int>(p - kDigits));
  }
  return out;
}

std::vector<Word> enumerate_words(const SymbolicSystem& sys, int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "word length must be at least 1");
  const int k = sys.alphabet_size();
  if (power_sat(k, n) > sys.enumeration_cap())
    throw Error(ErrorKind::LengthOverflow, "k^n exceeds the enumeration cap");
  // Depth-first over admissible extensions; visiting symbols in increasing
  // order keeps the output lexicographic.
  std::vector<Word> out;
  Symbols w(n);
  std::function<void(int, std::uint64_t)> rec = [&](int depth, std::uint64_t code) {
    if (depth == n) {
      out.push_back(Word{code, n, true});
      return;
    }
    for (int b = 0; b < k; ++b) {
      if (depth > 0 && !sys.allowed(w[depth - 1], b)) continue;
      w[depth] = b;
      rec(depth + 1, code * k + b);
    }
  };
  rec(0, 0);
  return out;
}

std::vector<Word> periodic_orbits(const SymbolicSystem& sys, int n) {
  std::vector<Word> out;
  for (const Word& w : enumerate_words(sys, n)) {
    Symbols s = sys.decode(w);
    if (sys.allowed(s.back(), s.front())) out.push_back(w);
  }
  return out;
}

RealPotential potential_from_table(const SystemPtr& sys, const std::map<std::string, double>& table) {
  const int n = sys->num_states();
  std::vector<double> v(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<int> hits(n, 0);
  for (const auto& [key, value] : table) {
    Symbols w = sys->parse(key);
    if (w.empty() || static_cast<int>(w.size()) > sys->window_length())
      throw Error(ErrorKind::ValidationError, "key '" + key + "' must have length 1.." + std::to_string(sys->window_length()));
    if (!sys->admissible(w)) throw Error(ErrorKind::ValidationError, "key '" + key + "' is not an admissible word");
    if (!std::isfinite(value)) throw Error(ErrorKind::ValidationError, "value for '" + key + "' is not finite");
    for (int s = 0; s < n; ++s) {
      const Symbols& st = sys->state_symbols(s);
      if (std::equal(w.begin(), w.end(), st.begin())) {
        v[s] = value;
        ++hits[s];
      }
    }
  }
  for (int s = 0; s < n; ++s) {
    if (hits[s] == 0) throw Error(ErrorKind::MissingEntry, "no value for window " + sys->to_string(sys->state_symbols(s)));
    if (hits[s] > 1) throw Error(ErrorKind::ValidationError, "window " + sys->to_string(sys->state_symbols(s)) + " covered by more than one key");
  }
  return RealPotential(sys, std::move(v));
}

}  // namespace sflow
