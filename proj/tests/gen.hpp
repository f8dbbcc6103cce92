#pragma once

#include <random>
#include <vector>

#include "affhecke/engine.hpp"

namespace gen {

// deterministic generators for the property tests
inline ahk::IVec vec(std::mt19937_64& rng, int n, int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  ahk::IVec v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

inline ahk::Elt elt(std::mt19937_64& rng, const ahk::Engine& E, int lo = -3, int hi = 3) {
  std::uniform_int_distribution<int> g(0, E.group_size() - 1);
  return ahk::Elt{ahk::to_vec8(vec(rng, E.rank(), lo, hi)), g(rng)};
}

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
  return v[std::uniform_int_distribution<size_t>(0, v.size() - 1)(rng)];
}

// GL3 with the diagram automorphism x -> -w0(x) as Gamma
inline const char* kTwistedGL3 = R"({"name":"GL3tw","rank":3,
  "roots":[[1,-1,0],[0,1,-1],[1,0,-1],[-1,1,0],[0,-1,1],[-1,0,1]],
  "coroots":[[1,-1,0],[0,1,-1],[1,0,-1],[-1,1,0],[0,-1,1],[-1,0,1]],
  "pairing":[[1,0,0],[0,1,0],[0,0,1]],"simples":[0,1],
  "gammas":[[[0,0,-1],[0,-1,0],[-1,0,0]]]})";

}  // namespace gen
