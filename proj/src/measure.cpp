#include "lsc/measure.hpp"

#include <vector>

namespace lsc {

std::optional<Name> hh_variable(const Term& t) {
  struct Binder {
    Name name;
    const Term* sub;  // null for λ
    std::size_t outer;  // binders in scope at the binding node
  };
  std::vector<Binder> binders;
  const Term* cur = &t;
  for (;;) {
    switch (cur->kind()) {
      case Kind::Var: {
        auto it = binders.rbegin();
        while (it != binders.rend() && it->name != cur->name()) ++it;
        if (it == binders.rend()) return cur->name();
        if (it->sub == nullptr) return std::nullopt;
        const Term* arg = &it->sub->right();
        binders.resize(it->outer);
        cur = arg;
        continue;
      }
      case Kind::App:
        break;
      case Kind::Abs:
        binders.push_back({cur->name(), nullptr, binders.size()});
        break;
      case Kind::Sub:
        binders.push_back({cur->name(), cur, binders.size()});
        break;
    }
    cur = &cur->left();
  }
}

bool is_hh_occurrence(const Term& t, const Name& x) {
  auto h = hh_variable(t);
  return h && *h == x;
}

std::uint64_t head_measure(const Term& t) {
  if (!t.is_shallow()) throw NotShallow("the head measure is defined on shallow terms only");
  std::uint64_t n = 0;
  const Term* cur = &t;
  while (!cur->is_var()) {
    if (cur->is_sub() && is_hh_occurrence(cur->left(), cur->name())) ++n;
    cur = &cur->left();
  }
  return n;
}

TraceStats trace_stats(const Trace& tr) {
  TraceStats s;
  bool in_db_run = false;
  for (const auto& step : tr.steps) {
    switch (step.step.rule) {
      case Rule::DB:
      case Rule::HeadDB:
        ++s.mult;
        if (!in_db_run) ++s.phases;
        in_db_run = true;
        break;
      case Rule::LS:
      case Rule::HeadLS:
        ++s.expo;
        in_db_run = false;
        break;
      case Rule::GC:
        break;
      case Rule::Beta:
      case Rule::HeadBeta:
        throw std::invalid_argument(std::string("not a ⊸ step: ") + rule_name(step.step.rule));
    }
  }
  s.total = s.mult + s.expo;
  s.quadratic_ok = s.total <= s.mult * s.mult + s.mult;
  return s;
}

nlohmann::ordered_json stats_to_json(const TraceStats& s) {
  nlohmann::ordered_json j;
  j["total"] = s.total;
  j["mult"] = s.mult;
  j["expo"] = s.expo;
  j["phases"] = s.phases;
  j["quadratic_ok"] = s.quadratic_ok;
  return j;
}

}  // namespace lsc
