#include "lsc/cli.hpp"

#include <pthread.h>

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#include "CLI11.hpp"
#include "lsc/family.hpp"
#include "lsc/measure.hpp"
#include "lsc/reduction.hpp"
#include "lsc/syntax.hpp"
#include "lsc/tm.hpp"
#include "lsc/unfold_check.hpp"

namespace lsc {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// '@path' reads the term from a file.
Term term_arg(const std::string& arg) {
  if (!arg.empty() && arg[0] == '@') return parse(read_file(arg.substr(1)));
  return parse(arg);
}

TMachine machine_arg(const std::string& arg) {
  std::string path = !arg.empty() && arg[0] == '@' ? arg.substr(1) : arg;
  TMachine m = TMachine::from_json(nlohmann::json::parse(read_file(path)));
  m.validate();
  return m;
}

Alphabet default_delta(const TMachine& m) {
  Alphabet d;
  for (char c : m.sigma)
    if (c != m.blank) d += c;
  return d;
}

void write_json(const std::string& path, const nlohmann::ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  out << j.dump(2) << "\n";
}

struct Strategy {
  RuleSet rules;
  bool linear;  // trace_stats applies
};

Strategy strategy_of(const std::string& s) {
  if (s == "head") return {{Rule::HeadBeta}, false};
  if (s == "linear-head") return {{Rule::HeadDB, Rule::HeadLS}, true};
  if (s == "s") return {{Rule::LS, Rule::GC}, true};
  if (s == "beta") return {{Rule::Beta}, false};
  throw UsageError("unknown strategy " + s);
}

nlohmann::ordered_json trace_json(const Trace& tr, bool linear) {
  auto j = trace_to_json(tr);
  if (linear) j["stats"] = stats_to_json(trace_stats(tr));
  return j;
}

void print_counts(std::ostream& out, const Trace& tr) {
  out << "steps: " << tr.length() << "\n";
  for (const auto& [r, n] : tr.counts) out << rule_name(r) << ": " << n << "\n";
}

struct Options {
  std::string term, term2, strategy = "head", policy = "lo", trace, matrix, machine, input,
                          delta, engine = "head";
  std::uint64_t max_steps = 1'000'000;
  std::uint64_t cap = kDefaultUnfoldCap;
  unsigned n = 0;
  bool with_r = false;
  bool delta_set = false;
};

int do_reduce(const Options& o, std::ostream& out, std::ostream& err) {
  Strategy st = strategy_of(o.strategy);
  auto policy = policy_from_name(o.policy);
  if (!policy) throw UsageError("unknown policy " + o.policy);
  Term t = term_arg(o.term);
  try {
    auto res = normalize(t, st.rules, *policy, o.max_steps);
    out << print(res.term) << "\n";
    print_counts(out, res.trace);
    if (st.linear) {
      auto s = trace_stats(res.trace);
      out << "mult: " << s.mult << "\nexpo: " << s.expo << "\n";
    }
    if (!o.trace.empty()) write_json(o.trace, trace_json(res.trace, st.linear));
    return kExitOk;
  } catch (const StepLimitExceeded& e) {
    std::string path = o.trace;
    if (path.empty())
      path = (std::filesystem::temp_directory_path() /
              ("lsc-partial-" + std::to_string(::getpid()) + ".json"))
                 .string();
    write_json(path, trace_json(e.trace(), st.linear));
    err << "step limit of " << o.max_steps << " exceeded; partial trace: " << path << "\n";
    return kExitError;
  }
}

int do_measure(const Options& o, std::ostream& out) {
  Term t = term_arg(o.term);
  if (t.is_shallow())
    out << "head_measure: " << head_measure(t) << "\n";
  else
    out << "head_measure: undefined\n";
  out << "es_count: " << t.es_count() << "\n";
  out << "shallow: " << (t.is_shallow() ? "true" : "false") << "\n";
  return kExitOk;
}

int do_unfold_eq(const Options& o, std::ostream& out) {
  Term a = term_arg(o.term), b = term_arg(o.term2);
  bool eq = unfold_eq(a, b);
  if (!o.matrix.empty()) {
    std::ofstream m(o.matrix);
    if (!m) throw UsageError("cannot write " + o.matrix);
    fill_matrix(preprocess(a, b)).write_tsv(m);
  }
  out << (eq ? "yes" : "no") << "\n";
  return eq ? kExitOk : kExitNo;
}

int do_tm_run(const Options& o, std::ostream& out) {
  TMachine m = machine_arg(o.machine);
  Engine engine;
  if (o.engine == "head")
    engine = Engine::HeadBeta;
  else if (o.engine == "linear-head")
    engine = Engine::LinearHead;
  else
    throw UsageError("unknown engine " + o.engine);
  Alphabet delta = o.delta_set ? o.delta : default_delta(m);
  auto r = run_encoded(m, delta, o.input, engine, o.max_steps);
  out << "output: " << r.output << "\n";
  out << "steps: " << r.steps << "\n";
  out << "machine_steps: " << r.machine_steps << "\n";
  if (r.stats) out << "mult: " << r.stats->mult << "\nexpo: " << r.stats->expo << "\n";
  return kExitOk;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Linear substitution calculus toolkit", "lsc"};
  app.require_subcommand(1);
  Options o;

  auto* reduce = app.add_subcommand("reduce", "Normalize a term and print the result and step counts");
  reduce->add_option("term", o.term, "Term, or @file")->required();
  reduce->add_option("--strategy", o.strategy, "head | linear-head | s | beta");
  reduce->add_option("--policy", o.policy, "lo | ls-first | db-first");
  reduce->add_option("--max-steps", o.max_steps);
  reduce->add_option("--trace", o.trace, "Write the trace as JSON");

  auto* measure = app.add_subcommand("measure", "Print head measure, substitution count and shallowness");
  measure->add_option("term", o.term)->required();

  auto* unf = app.add_subcommand("unfold", "Print the unfolding");
  unf->add_option("term", o.term)->required();
  unf->add_option("--cap", o.cap, "Maximum unfolding size");

  auto* ueq = app.add_subcommand("unfold-eq", "Decide whether two terms have α-equal unfoldings");
  ueq->add_option("a", o.term)->required();
  ueq->add_option("b", o.term2)->required();
  ueq->add_option("--matrix", o.matrix, "Write the unfolding matrix as TSV");

  auto* tm = app.add_subcommand("tm", "Turing machine encodings");
  tm->require_subcommand(1);
  auto* compile = tm->add_subcommand("compile", "Print U(M,Δ)");
  compile->add_option("machine", o.machine)->required();
  compile->add_option("--delta", o.delta, "Output alphabet")->each([&](const std::string&) { o.delta_set = true; });
  auto* run = tm->add_subcommand("run", "Run the encoded machine and check it against direct simulation");
  run->add_option("machine", o.machine)->required();
  run->add_option("input", o.input)->required();
  run->add_option("--engine", o.engine, "head | linear-head");
  run->add_option("--delta", o.delta, "Output alphabet")->each([&](const std::string&) { o.delta_set = true; });
  run->add_option("--max-steps", o.max_steps);

  auto* gen = app.add_subcommand("gen", "Generate terms");
  gen->require_subcommand(1);
  auto* family = gen->add_subcommand("family", "Print t_n");
  family->add_option("n", o.n)->required();
  family->add_flag("--r", o.with_r, "Also print r_n");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*reduce) return do_reduce(o, out, err);
    if (*measure) return do_measure(o, out);
    if (*unf) {
      out << print(unfold(term_arg(o.term), o.cap)) << "\n";
      return kExitOk;
    }
    if (*ueq) return do_unfold_eq(o, out);
    if (*compile) {
      TMachine m = machine_arg(o.machine);
      out << print(machine_term(m, o.delta_set ? o.delta : default_delta(m))) << "\n";
      return kExitOk;
    }
    if (*run) return do_tm_run(o, out);
    if (*family) {
      Family f = gen_family(o.n);
      out << print(f.t) << "\n";
      if (o.with_r) out << print(f.r) << "\n";
      return kExitOk;
    }
  } catch (const SyntaxError& e) {
    err << "syntax error at " << e.line() << ":" << e.column() << ": " << e.what() << "\n";
  } catch (const StepLimitExceeded& e) {
    err << "step limit exceeded after " << e.trace().length() << " steps\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitError;
}

int run_with_stack(std::size_t bytes, const std::function<int()>& f) {
  struct Job {
    const std::function<int()>* f;
    int result = kExitError;
  } job{&f};
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, bytes);
  pthread_t th;
  auto body = [](void* p) -> void* {
    auto* j = static_cast<Job*>(p);
    j->result = (*j->f)();
    return nullptr;
  };
  if (pthread_create(&th, &attr, body, &job) != 0) {
    pthread_attr_destroy(&attr);
    return f();
  }
  pthread_join(th, nullptr);
  pthread_attr_destroy(&attr);
  return job.result;
}

}  // namespace lsc
