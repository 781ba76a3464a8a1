#include "lsc/family.hpp"

#include "lsc/syntax.hpp"

namespace lsc {

namespace {

Term family_u() {
  return app(app(var("y"), var("x")), var("x"));
}

}  // namespace

Term family_t(unsigned n) {
  Term u = family_u();
  Term t = u;
  for (unsigned i = 0; i < n; ++i) t = app(lam("x", t), u);
  return t;
}

Family gen_family(unsigned n, unsigned cap) {
  if (n > cap)
    throw FamilyTooLarge("r_" + std::to_string(n) + " exceeds the family cap " +
                         std::to_string(cap));
  Term r = family_u();
  for (unsigned i = 0; i < n; ++i) r = app(app(var("y"), r), deep_copy(r));
  return Family{family_t(n), r};
}

std::string family_source(unsigned n) { return print(family_t(n)); }

std::vector<Name> default_names() { return {Name("x"), Name("y")}; }

TermEnumerator::TermEnumerator(std::vector<Name> names, TermClass cls)
    : names_(std::move(names)), cls_(cls) {}

const std::vector<Term>& TermEnumerator::pure_of_size(std::size_t size) {
  if (cls_ == TermClass::Pure) return of_size(size);
  if (pure_.size() <= size) {
    pure_.resize(size + 1);
    pure_built_.resize(size + 1, false);
  }
  if (!pure_built_[size]) {
    TermEnumerator pure(names_, TermClass::Pure);
    for (std::size_t k = 1; k <= size; ++k)
      if (!pure_built_[k]) {
        pure_[k] = pure.of_size(k);
        pure_built_[k] = true;
      }
  }
  return pure_[size];
}

const std::vector<Term>& TermEnumerator::of_size(std::size_t size) {
  if (table_.size() <= size) {
    table_.resize(size + 1);
    built_.resize(size + 1, false);
  }
  if (built_[size]) return table_[size];
  std::vector<Term> out;
  if (size == 1) {
    for (const auto& x : names_) out.push_back(var(x));
  } else if (size >= 2) {
    for (const auto& x : names_)
      for (const auto& b : of_size(size - 1)) out.push_back(lam(x, b));
    for (std::size_t l = 1; l + 1 < size; ++l) {
      std::size_t r = size - 1 - l;
      const auto& fs = of_size(l);
      const auto& as = of_size(r);
      for (const auto& f : fs)
        for (const auto& a : as) out.push_back(app(f, a));
    }
    if (cls_ != TermClass::Pure) {
      for (std::size_t l = 1; l + 1 < size; ++l) {
        std::size_t r = size - 1 - l;
        const auto& bodies = of_size(l);
        const auto& args = cls_ == TermClass::Shallow ? pure_of_size(r) : of_size(r);
        for (const auto& x : names_)
          for (const auto& b : bodies)
            for (const auto& a : args) out.push_back(sub(b, x, a));
      }
    }
  }
  table_[size] = std::move(out);
  built_[size] = true;
  return table_[size];
}

void TermEnumerator::for_each_up_to(std::size_t max_size,
                                    const std::function<void(const Term&)>& f) {
  for (std::size_t k = 1; k <= max_size; ++k)
    for (const auto& t : of_size(k)) f(t);
}

Term random_term(std::mt19937_64& rng, std::size_t size, const std::vector<Name>& names,
                 TermClass cls) {
  auto pick_name = [&]() {
    return names[std::uniform_int_distribution<std::size_t>(0, names.size() - 1)(rng)];
  };
  if (size <= 1) return var(pick_name());
  if (size == 2) return lam(pick_name(), var(pick_name()));
  // Applications are drawn twice as often as the other constructors.
  int k = std::uniform_int_distribution<int>(0, cls == TermClass::Pure ? 2 : 3)(rng);
  if (k == 0) return lam(pick_name(), random_term(rng, size - 1, names, cls));
  std::size_t l = std::uniform_int_distribution<std::size_t>(1, size - 2)(rng);
  std::size_t r = size - 1 - l;
  if (k <= 2) return app(random_term(rng, l, names, cls), random_term(rng, r, names, cls));
  TermClass arg_cls = cls == TermClass::Shallow ? TermClass::Pure : cls;
  return sub(random_term(rng, l, names, cls), pick_name(), random_term(rng, r, names, arg_cls));
}

}  // namespace lsc
