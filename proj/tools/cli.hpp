#ifndef LDYN_TOOLS_CLI_HPP
#define LDYN_TOOLS_CLI_HPP

// The `ldyn` command line: subcommands tower, lyap, conj, design, induce,
// kneading and scan. Exit codes: 0 success, 1 computation error, 2 usage.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ldyn/ldyn.hpp"

namespace ldyn::cli {

inline constexpr const char* kVersion = "1.0.0";

struct Global {
  std::uint64_t seed = 1;
  std::string out;
  std::string fidelity = "fast";
  std::string schema_dir;
};

/// Counts may be written in exponent form ("1e6").
inline std::size_t parse_count(const std::string& text, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !(v >= 0.0) || v != std::floor(v) || v > 1e15)
    throw CLI::ValidationError(what, "expected a non-negative integer, got '" + text + "'");
  return static_cast<std::size_t>(v);
}

inline std::vector<std::size_t> parse_checkpoints(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_count(item, "--checkpoints"));
  return out;
}

/// 10, 100, ..., plus N itself.
inline std::vector<std::size_t> default_checkpoints(std::size_t N) {
  std::vector<std::size_t> cps;
  for (std::size_t p = 10; p < N; p *= 10) cps.push_back(p);
  cps.push_back(N);
  return cps;
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(int argc, const char* const* argv) {
    CLI::App app{"Lyapunov exponents, towers and conjugacies for interval maps", "ldyn"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--seed", g_.seed, "random seed")->capture_default_str();
    app.add_option("--out", g_.out, "output file (default: stdout)");
    app.add_option("--fidelity", g_.fidelity, "orbit evaluation: fast or high")
        ->check(CLI::IsMember({"fast", "high"}))
        ->capture_default_str();
    app.add_option("--json-schema-dir", g_.schema_dir, "directory of schema files referenced from JSON output");
    app.set_version_flag("--version", kVersion);

    setup_tower(app);
    setup_lyap(app);
    setup_conj(app);
    setup_design(app);
    setup_induce(app);
    setup_kneading(app);
    setup_scan(app);

    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      out_ << app.help();
      return 0;
    } catch (const CLI::CallForVersion& e) {
      out_ << kVersion << '\n';
      return 0;
    } catch (const CLI::ParseError& e) {
      err_ << "error: " << e.what() << "\n\n" << app.help();
      return 2;
    }
    const auto t0 = std::chrono::steady_clock::now();
    try {
      action_();
    } catch (const Error& e) {
      err_ << "error: " << e.what();
      if (e.index()) err_ << " (step " << *e.index() << ")";
      err_ << '\n';
      return 1;
    } catch (const CLI::ValidationError& e) {
      err_ << "error: " << e.what() << '\n';
      return 2;
    } catch (const std::exception& e) {
      err_ << "error: " << e.what() << '\n';
      return 1;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    err_ << "runtime " << secs << " s\n";
    return 0;
  }

 private:
  [[nodiscard]] Fidelity fidelity() const { return g_.fidelity == "high" ? Fidelity::high : Fidelity::fast; }

  json base_config(const std::string& command) const {
    json c;
    c["command"] = command;
    c["version"] = kVersion;
    c["seed"] = g_.seed;
    c["fidelity"] = g_.fidelity;
    return c;
  }

  /// Writes to --out (or a per-command path) or to the runner's stream.
  void emit(const std::string& path, const std::string& text) const {
    if (path.empty() || path == "-") {
      out_ << text;
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::invalid_argument, "cannot open output file '" + path + "'");
    f << text;
  }

  void emit_json(const std::string& path, json doc, const std::string& schema) const {
    if (!g_.schema_dir.empty()) {
      json with;
      with["$schema"] = g_.schema_dir + "/" + schema + ".schema.json";
      for (auto& [k, v] : doc.items()) with[k] = v;
      doc = std::move(with);
    }
    emit(path, doc.dump(2) + "\n");
  }

  void setup_tower(CLI::App& app) {
    auto* sub = app.add_subcommand("tower", "build the Hofbauer tower of a map");
    auto o = std::make_shared<TowerOptions>();
    auto map = std::make_shared<std::string>();
    auto format = std::make_shared<std::string>("json");
    sub->add_option("--map", *map, "map, e.g. logistic:4, tent:1.5, sine")->required();
    sub->add_option("--depth-cap", o->depth_cap)->capture_default_str()->check(CLI::Range(0, 100000));
    sub->add_option("--node-limit", o->node_limit)->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--eps-id", o->eps_id)->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--format", *format)->check(CLI::IsMember({"json", "dot"}))->capture_default_str();
    sub->callback([this, o, map, format] {
      action_ = [this, o, map, format] {
        const IntervalMap m = parse_map(*map);
        const Tower t = build_tower(m, *o);
        if (*format == "dot") {
          std::ostringstream os;
          write_dot(os, t);
          emit(g_.out, os.str());
          return;
        }
        json cfg = base_config("tower");
        cfg["map"] = to_json(m);
        cfg["depth_cap"] = o->depth_cap;
        cfg["node_limit"] = o->node_limit;
        cfg["eps_id"] = o->eps_id;
        const MarkovReport mr = check_markov(t, m);
        json doc{{"config", cfg}, {"tower", to_json(t)}};
        doc["markov"] = {{"checked_edges", mr.checked_edges},
                         {"missing_edges", mr.missing_edges},
                         {"max_edge_residual", mr.max_edge_residual},
                         {"max_provenance_residual", mr.max_provenance_residual}};
        emit_json(g_.out, doc, "tower");
      };
    });
  }

  void setup_lyap(CLI::App& app) {
    auto* sub = app.add_subcommand("lyap", "finite-time Lyapunov exponent profile of an orbit");
    struct Opts {
      std::string map;
      std::string n = "100000";
      std::string burn_in = "1000";
      std::string checkpoints;
      std::optional<double> x0;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("--map", o->map)->required();
    sub->add_option("--n", o->n, "orbit length N")->capture_default_str();
    sub->add_option("--burn-in", o->burn_in)->capture_default_str();
    sub->add_option("--checkpoints", o->checkpoints, "comma-separated n values (default 10, 100, ..., N)");
    sub->add_option("--x0", o->x0, "start point (default: uniform from the seed)");
    sub->callback([this, o] {
      action_ = [this, o] {
        const IntervalMap m = parse_map(o->map);
        const std::size_t N = parse_count(o->n, "--n");
        const std::size_t burn = parse_count(o->burn_in, "--burn-in");
        const std::vector<std::size_t> cps =
            o->checkpoints.empty() ? default_checkpoints(N) : parse_checkpoints(o->checkpoints);
        double x = 0.0;
        if (o->x0) {
          x = *o->x0;
        } else {
          std::mt19937_64 rng(g_.seed);
          x = unit_uniform(rng);
        }
        const double start = x;
        for (std::size_t i = 0; i < burn; ++i) x = step(m, x, i + 1);
        const LyapunovProfile p = profile(m, x, N, cps, fidelity());
        json cfg = base_config("lyap");
        cfg["map"] = m.name();
        cfg["n"] = N;
        cfg["burn_in"] = burn;
        cfg["x0"] = start;
        cfg["lambda_minus_est"] = num(p.lambda_minus_est);
        cfg["lambda_plus_est"] = num(p.lambda_plus_est);
        std::ostringstream os;
        write_profile_csv(os, p, cfg);
        emit(g_.out, os.str());
      };
    });
  }

  void setup_conj(CLI::App& app) {
    auto* conj = app.add_subcommand("conj", "conjugacies between unimodal maps");
    conj->require_subcommand(1);
    struct Opts {
      std::string from;
      std::string to;
      std::string mode = "itinerary";
      std::size_t depth = 48;
      std::vector<double> x;
      std::string samples = "100000";
      std::size_t burn_in = 1000;
    };
    auto o = std::make_shared<Opts>();
    auto add_common = [o](CLI::App* s) {
      s->add_option("--from", o->from, "source map f")->required();
      s->add_option("--to", o->to, "target map g")->required();
      s->add_option("--depth", o->depth, "itinerary depth M")->capture_default_str()->check(CLI::Range(1, 4096));
      s->add_option("--mode", o->mode)->check(CLI::IsMember({"explicit", "itinerary"}))->capture_default_str();
    };
    auto mode_of = [o] { return o->mode == "explicit" ? ConjugacyMode::explicit_formula : ConjugacyMode::itinerary; };

    auto* ev = conj->add_subcommand("eval", "evaluate h at points");
    add_common(ev);
    ev->add_option("--x", o->x, "points to map")->required();
    ev->callback([this, o, mode_of] {
      action_ = [this, o, mode_of] {
        const IntervalMap f = parse_map(o->from);
        const IntervalMap g = parse_map(o->to);
        const ConjugacyMap h = make_conjugacy(f, g, mode_of(), o->depth);
        json cfg = base_config("conj eval");
        cfg["from"] = to_json(f);
        cfg["to"] = to_json(g);
        cfg["mode"] = std::string(to_string(h.mode()));
        cfg["depth"] = o->depth;
        json vals = json::array();
        for (double x : o->x) {
          const ConjugacyValue v = h.evaluate(x);
          vals.push_back({{"x", x}, {"h", v.value}, {"width", v.width}, {"depth", v.depth}});
        }
        emit_json(g_.out, {{"config", cfg}, {"values", vals}}, "conj_eval");
      };
    });

    auto* ex = conj->add_subcommand("experiment", "sign invariance of λ under the conjugacy");
    add_common(ex);
    ex->add_option("--samples", o->samples)->capture_default_str();
    ex->add_option("--burn-in", o->burn_in)->capture_default_str();
    ex->callback([this, o, mode_of] {
      action_ = [this, o, mode_of] {
        const IntervalMap f = parse_map(o->from);
        const IntervalMap g = parse_map(o->to);
        const ConjugacyMap h = make_conjugacy(f, g, mode_of(), o->depth);
        const std::size_t n = parse_count(o->samples, "--samples");
        SignInvarianceOptions so;
        so.seed = g_.seed;
        so.burn_in = o->burn_in;
        const SignInvarianceReport r = sign_invariance_experiment(h, n, so);
        json cfg = base_config("conj experiment");
        cfg["from"] = to_json(f);
        cfg["to"] = to_json(g);
        cfg["mode"] = std::string(to_string(h.mode()));
        cfg["depth"] = o->depth;
        cfg["samples"] = n;
        cfg["burn_in"] = o->burn_in;
        emit_json(g_.out, {{"config", cfg}, {"report", to_json(r)}}, "conj_experiment");
      };
    });
  }

  void setup_design(CLI::App& app) {
    auto* design = app.add_subcommand("design", "designed orbits and the lower-exponent counterexample");
    design->require_subcommand(1);
    struct Opts {
      std::size_t n1 = 200;
      std::size_t depth = 2;
      std::size_t growth = 10;
      double total_factor = 2.1;
      std::string map = "logistic:4";
      std::string conjugate = "sine";
      std::string report;
    };
    auto o = std::make_shared<Opts>();
    auto* run = design->add_subcommand("run", "run the counterexample experiment");
    run->add_option("--n1", o->n1)->capture_default_str()->check(CLI::Range(100, 1000000));
    run->add_option("--depth", o->depth)->capture_default_str()->check(CLI::Range(1, 3));
    run->add_option("--growth", o->growth)->capture_default_str()->check(CLI::Range(2, 1000));
    run->add_option("--total-factor", o->total_factor)->capture_default_str()->check(CLI::Range(1.5, 4.0));
    run->add_option("--map", o->map)->capture_default_str();
    run->add_option("--conjugate", o->conjugate)->capture_default_str();
    run->add_option("--report", o->report, "JSON report path ('-' for stdout)");
    run->callback([this, o] {
      action_ = [this, o] {
        if (fidelity() != Fidelity::high)
          err_ << "note: designed orbits are always evaluated in high fidelity\n";
        const IntervalMap f = parse_map(o->map);
        const IntervalMap g = parse_map(o->conjugate);
        const CounterexampleReport r = counterexample_experiment(o->n1, o->depth, f, g, o->growth, o->total_factor);
        json cfg = base_config("design run");
        cfg["fidelity"] = "high";
        cfg["n1"] = o->n1;
        cfg["depth"] = o->depth;
        cfg["growth"] = o->growth;
        cfg["total_factor"] = o->total_factor;
        cfg["map"] = f.name();
        cfg["conjugate"] = g.name();
        std::ostringstream os;
        write_profiles_csv(os, {{f.name(), r.profile_f}, {g.name(), r.profile_g}}, cfg);
        emit(g_.out, os.str());
        if (!o->report.empty()) emit_json(o->report, {{"config", cfg}, {"report", to_json(r)}}, "design_report");
        err_ << "signs (" << (r.sign_f < 0 ? '-' : '+') << ", " << (r.sign_g < 0 ? '-' : '+') << ")\n";
      };
    });
  }

  void setup_induce(CLI::App& app) {
    auto* induce = app.add_subcommand("induce", "induced Markov maps over closest precritical points");
    induce->require_subcommand(1);
    struct Opts {
      std::string map;
      std::size_t k = 10;
      std::size_t grid = 64;
      std::string report = "json";
    };
    auto o = std::make_shared<Opts>();
    auto* build = induce->add_subcommand("build", "build branches k = 0..K");
    build->add_option("--map", o->map)->required();
    build->add_option("--k", o->k)->capture_default_str()->check(CLI::Range(0, 200));
    build->add_option("--grid", o->grid)->capture_default_str()->check(CLI::Range(2, 100000));
    build->add_option("--report", o->report)->check(CLI::IsMember({"json"}))->capture_default_str();
    build->callback([this, o] {
      action_ = [this, o] {
        const IntervalMap m = parse_map(o->map);
        InducedOptions io;
        io.grid = o->grid;
        const InducedMap im = build_induced(m, o->k, io);
        json cfg = base_config("induce build");
        cfg["map"] = to_json(m);
        cfg["k"] = o->k;
        cfg["grid"] = o->grid;
        emit_json(g_.out, {{"config", cfg}, {"induced", to_json(im)}}, "induced");
      };
    });
  }

  void setup_kneading(CLI::App& app) {
    auto* sub = app.add_subcommand("kneading", "closest precritical points and cutting times");
    auto map = std::make_shared<std::string>();
    auto k = std::make_shared<std::size_t>(10);
    sub->add_option("--map", *map)->required();
    sub->add_option("--k", *k)->capture_default_str()->check(CLI::Range(0, 10000));
    sub->callback([this, map, k] {
      action_ = [this, map, k] {
        const IntervalMap m = parse_map(*map);
        json cfg = base_config("kneading");
        cfg["map"] = to_json(m);
        cfg["k"] = *k;
        emit_json(g_.out, {{"config", cfg}, {"kneading", to_json(kneading(m, *k))}}, "kneading");
      };
    });
  }

  void setup_scan(CLI::App& app) {
    auto* sub = app.add_subcommand("scan", "negative exponents must come with attracting cycles");
    struct Opts {
      std::string family = "logistic";
      double pmin = 2.2;
      double pmax = 4.0;
      std::size_t params = 20;
      std::size_t trials = 5;
      std::string n = "10000";
      std::string burn_in = "1000";
      double threshold = -0.05;
      std::size_t threads = 0;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("--family", o->family)->capture_default_str();
    sub->add_option("--pmin", o->pmin)->capture_default_str();
    sub->add_option("--pmax", o->pmax)->capture_default_str();
    sub->add_option("--params", o->params, "number of evenly spaced parameters")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--trials", o->trials, "random starts per parameter")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--n", o->n)->capture_default_str();
    sub->add_option("--burn-in", o->burn_in)->capture_default_str();
    sub->add_option("--threshold", o->threshold)->capture_default_str();
    sub->add_option("--threads", o->threads, "worker threads (0 = all cores)")->capture_default_str();
    sub->callback([this, o] {
      action_ = [this, o] {
        if (o->pmax < o->pmin) throw CLI::ValidationError("--pmax", "must not be below --pmin");
        std::vector<double> ps;
        for (std::size_t i = 0; i < o->params; ++i)
          ps.push_back(o->params == 1 ? o->pmin
                                      : o->pmin + (o->pmax - o->pmin) * static_cast<double>(i) /
                                                      static_cast<double>(o->params - 1));
        ScanOptions so;
        so.N = parse_count(o->n, "--n");
        so.burn_in = parse_count(o->burn_in, "--burn-in");
        so.negative_threshold = o->threshold;
        so.seed = g_.seed;
        so.threads = o->threads;
        const auto entries = attractor_scan(parse_family(o->family), ps, o->trials, so);
        json cfg = base_config("scan");
        cfg["family"] = o->family;
        cfg["pmin"] = o->pmin;
        cfg["pmax"] = o->pmax;
        cfg["params"] = o->params;
        cfg["trials"] = o->trials;
        cfg["n"] = so.N;
        cfg["burn_in"] = so.burn_in;
        cfg["threshold"] = so.negative_threshold;
        json arr = json::array();
        std::size_t violations = 0;
        for (const ScanEntry& e : entries) {
          arr.push_back(to_json(e));
          violations += e.violation ? 1 : 0;
        }
        emit_json(g_.out, {{"config", cfg}, {"entries", arr}, {"violations", violations}}, "scan");
      };
    });
  }

  std::ostream& out_;
  std::ostream& err_;
  Global g_;
  std::function<void()> action_;
};

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return Runner(out, err).run(argc, argv);
}

}  // namespace ldyn::cli

#endif  // LDYN_TOOLS_CLI_HPP
