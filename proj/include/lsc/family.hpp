// Test fixtures: the exponential family t_n / r_n, exhaustive enumeration of
// small terms and random terms.
#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "lsc/term.hpp"

namespace lsc {

class FamilyTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Family {
  Term t;  // (λx.(...(λx.u) u ...)) u, size linear in n
  Term r;  // y r_{n-1} r_{n-1}, a tree of size 5·2^n − 2
};

/// u = y x x, t_0 = u, t_{n+1} = (λx.t_n) u; r_0 = u, r_{n+1} = y r_n r_n.
/// Refuses to build r_n for n > cap.
Family gen_family(unsigned n, unsigned cap = 24);
Term family_t(unsigned n);
/// Concrete syntax of t_n.
std::string family_source(unsigned n);

enum class TermClass { Pure, Shallow, Full };

/// All terms of exactly `size` nodes over the given names (used both as
/// variables and as binders). Subterms are shared between results.
class TermEnumerator {
 public:
  TermEnumerator(std::vector<Name> names, TermClass cls);

  const std::vector<Term>& of_size(std::size_t size);
  void for_each_up_to(std::size_t max_size, const std::function<void(const Term&)>& f);

 private:
  const std::vector<Term>& pure_of_size(std::size_t size);

  std::vector<Name> names_;
  TermClass cls_;
  std::vector<std::vector<Term>> table_;
  std::vector<std::vector<Term>> pure_;
  std::vector<bool> built_;
  std::vector<bool> pure_built_;
};

/// Default two-name alphabet {x, y}.
std::vector<Name> default_names();

/// Random term with exactly `size` nodes.
Term random_term(std::mt19937_64& rng, std::size_t size, const std::vector<Name>& names,
                 TermClass cls);

}  // namespace lsc
