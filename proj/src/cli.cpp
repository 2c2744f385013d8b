#include "reyeweb/cli.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>

#include "CLI11.hpp"
#include "reyeweb/batch.hpp"
#include "reyeweb/errors.hpp"
#include "reyeweb/report.hpp"

namespace reyeweb {

namespace {

struct Opts {
  std::uint64_t seed = 1;
  std::string web_path;
  double tol = 1e-8;
  std::string out;
  int samples = -1;
  int threads = 0;

  int samples_or(int fallback) const { return samples > 0 ? samples : fallback; }
};

void add_common(CLI::App* cmd, Opts& o) {
  cmd->add_option("--seed", o.seed, "web generation seed (ignored with --web)");
  cmd->add_option("--web", o.web_path, "load the web from this JSON file instead of generating");
  cmd->add_option("--tol", o.tol, "numeric rank tolerance (default 1e-8)");
  cmd->add_option("--out", o.out, "write the JSON artifact here instead of stdout");
  cmd->add_option("--samples", o.samples, "sample count where applicable");
  cmd->add_option("--threads", o.threads, "OpenMP thread cap (0 keeps the runtime default)");
}

Web acquire(const Opts& o) {
  if (!o.web_path.empty()) return load_web(o.web_path);
  return generate_web(o.seed);
}

void emit(const Json& j, const Opts& o) {
  if (o.out.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw IoError("cannot open " + o.out + " for writing");
  f << j.dump(2) << "\n";
  if (!f) throw IoError("write to " + o.out + " failed");
}

using ExpFn = std::function<Experiment(const Web&, const Opts&)>;

int run_suite(const Opts& o, const std::vector<std::pair<std::string, ExpFn>>& plan) {
  Web web = acquire(o);
  if (o.threads > 0) set_threads(o.threads);

  std::vector<Experiment> exps;
  std::vector<std::pair<std::string, double>> runtimes;
  for (const auto& [name, fn] : plan) {
    auto t0 = std::chrono::steady_clock::now();
    try {
      exps.push_back(fn(web, o));
    } catch (const CountMismatch& e) {
      std::cerr << "count mismatch in criterion '" << name << "': " << e.what() << "\n";
      return 2;
    } catch (const IoError& e) {
      std::cerr << "i/o failure in criterion '" << name << "': " << e.what() << "\n";
      return 3;
    } catch (const Error& e) {
      std::cerr << "criterion '" << name << "' failed: " << e.what() << "\n";
      return 1;
    }
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
    runtimes.push_back({name, ms});
  }

  emit(make_report(web, exps, runtimes), o);

  bool all = true;
  for (const Experiment& e : exps) {
    if (!e.pass) {
      std::cerr << "criterion '" << e.name << "' did not pass\n";
      all = false;
    }
  }
  return all ? 0 : 1;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{"webs of quadrics in P^3: symmetroid nodes, Reye congruence counts, "
               "ruling monodromy, and Chow classes"};
  app.require_subcommand(1);
  Opts o;

  CLI::App* c_generate =
      app.add_subcommand("generate", "generate a seeded general web and write its JSON");
  CLI::App* c_nodes =
      app.add_subcommand("nodes", "locate and certify the ten symmetroid nodes");
  CLI::App* c_reye = app.add_subcommand(
      "reye-count", "rays through a point (7), base points (8), rays in a plane (3)");
  CLI::App* c_sample =
      app.add_subcommand("sample", "sample Reye lines through the Steinerian chain");
  CLI::App* c_bit =
      app.add_subcommand("bitangent", "bitangency certificates for sampled Reye pencils");
  CLI::App* c_mono =
      app.add_subcommand("monodromy", "ruling transport around branch and contact loops");
  CLI::App* c_fano =
      app.add_subcommand("fano-degree", "degree-6 fundamental form on a rank-4 member");
  CLI::App* c_chow =
      app.add_subcommand("chow", "Schubert classes and the Porteous class of the congruence");
  CLI::App* c_full =
      app.add_subcommand("full-suite", "run every experiment and emit a single report");
  for (CLI::App* c : {c_generate, c_nodes, c_reye, c_sample, c_bit, c_mono, c_fano, c_chow,
                      c_full})
    add_common(c, o);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const auto genericity = [](const Web& w, const Opts& op) { return exp_genericity(w, op.tol); };
  const auto nodes = [](const Web& w, const Opts& op) { return exp_nodes(w, op.tol); };
  const auto reye_count = [](const Web& w, const Opts& op) { return exp_reye_count(w, op.tol); };
  const auto sample = [](const Web& w, const Opts& op) {
    return exp_sample(w, op.tol, op.samples_or(50));
  };
  const auto bitangent = [](const Web& w, const Opts& op) {
    return exp_bitangent(w, op.tol, op.samples_or(10));
  };
  const auto monodromy = [](const Web& w, const Opts& op) { return exp_monodromy(w, op.tol); };
  const auto fano = [](const Web& w, const Opts& op) { return exp_fano_degree(w, op.tol); };
  const auto chow = [](const Web& w, const Opts& op) { return exp_chow(w, op.tol); };

  try {
    if (app.got_subcommand(c_generate)) {
      Web web = acquire(o);
      emit(web_to_json(web), o);
      return 0;
    }
    if (app.got_subcommand(c_nodes)) return run_suite(o, {{"nodes", nodes}});
    if (app.got_subcommand(c_reye)) return run_suite(o, {{"reye_count", reye_count}});
    if (app.got_subcommand(c_sample)) return run_suite(o, {{"sample", sample}});
    if (app.got_subcommand(c_bit)) return run_suite(o, {{"bitangent", bitangent}});
    if (app.got_subcommand(c_mono)) return run_suite(o, {{"monodromy", monodromy}});
    if (app.got_subcommand(c_fano)) return run_suite(o, {{"fano_degree", fano}});
    if (app.got_subcommand(c_chow)) return run_suite(o, {{"chow", chow}});
    if (app.got_subcommand(c_full))
      return run_suite(o, {{"genericity", genericity},
                           {"nodes", nodes},
                           {"reye_count", reye_count},
                           {"sample", sample},
                           {"bitangent", bitangent},
                           {"monodromy", monodromy},
                           {"fano_degree", fano},
                           {"chow", chow}});
  } catch (const CountMismatch& e) {
    std::cerr << "count mismatch: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "i/o failure: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace reyeweb
