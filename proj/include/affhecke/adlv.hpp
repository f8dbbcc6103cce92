#pragma once

#include <optional>
#include <string>
#include <vector>

#include "affhecke/cocenter.hpp"
#include "json.hpp"

namespace ahk {

// b enters only through its Newton point and Kottwitz value. levi empty means context G;
// otherwise kappa is a value of the Levi engine W~_J.
struct SigmaClassSpec {
  QVec nu_bar;
  KottwitzValue kappa;
  std::optional<std::vector<int>> levi;
};
nlohmann::json spec_json(const SigmaClassSpec& s);

struct Contributor {
  int cls = -1;
  int len_O = 0;
  int deg = 0;
  Q value;
};

struct DimensionReport {
  Elt w;
  int delta = 0;
  SigmaClassSpec spec;
  std::vector<Contributor> contributors;
  std::optional<Q> dim;  // empty reading when no contributor
};
nlohmann::json dimension_json(Cocenter& cc, const DimensionReport& r);

// the (nu, kappa) of each class in the support of f_{w delta}; one spec per distinct pair
std::vector<SigmaClassSpec> support_specs(Cocenter& cc, const Elt& w, int delta);

DimensionReport adlv_dimension(Cocenter& cc, const Elt& w, const SigmaClassSpec& spec, int delta = 0);

struct EmptinessReport {
  Elt w;
  std::vector<int> J;
  int z = 0;
  int delta = 0;
  KottwitzValue kappa_J;  // of z w delta z^-1 inside W~_J
  bool empty = false;     // false means the criterion does not decide
  bool audit_ok = true;   // no W~_J-class with f^J != 0 matches (nu, kappa) when empty
  std::vector<std::string> matching_classes;
};
nlohmann::json emptiness_json(Cocenter& cc, const EmptinessReport& r);

EmptinessReport emptiness_check(Cocenter& cc, const Elt& w, const std::vector<int>& J, int z,
                                const SigmaClassSpec& spec, int delta = 0);

}  // namespace ahk
