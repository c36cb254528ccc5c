#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <thread>

#include "commands.hpp"
#include "csq/error.hpp"
#include "csq/parallel.hpp"

namespace {

unsigned threads_from_env() {
  if (const char* v = std::getenv("CSQ_LAB_THREADS")) {
    char* end = nullptr;
    const long t = std::strtol(v, &end, 10);
    if (end != v && *end == '\0' && t > 0) return static_cast<unsigned>(t);
    throw csq::ConfigError(std::string("CSQ_LAB_THREADS: expected a positive integer, got '") +
                           v + "'");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void write_outputs(const csq::report::Report& rep, const std::string& out) {
  const std::string json = csq::report::dump(rep.to_json());
  if (out.empty()) {
    std::cout << json;
    return;
  }
  csq::report::write_file(out, json);
  const std::filesystem::path p(out);
  const auto base = p.parent_path() / p.stem();
  for (const auto& s : rep.suites)
    for (const auto& [name, t] : s.tables) {
      std::string file = name;
      for (char& ch : file)
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_' && ch != '-') ch = '_';
      csq::report::write_file(base.string() + "_" + file + ".csv", t.to_csv());
    }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"csq_lab: numerical checks for propagator quantization"};
  app.set_config("--config", "", "Read options from a TOML/INI file (same keys as flags)");
  app.require_subcommand(1);

  csq::cli::RunConfig cfg;
  std::string levels;
  int threads = -1;
  app.add_option("--model", cfg.model, "sphere | plane | halfplane | podles | quartic")
      ->capture_default_str();
  app.add_option("--n", cfg.n, "Sphere level")->capture_default_str();
  app.add_option("--hbar", cfg.hbar, "Planck constant (plane, podles, quartic)")
      ->capture_default_str();
  app.add_option("--k", cfg.k, "Half-plane level, hbar = 2/k")->capture_default_str();
  app.add_option("--mesh", cfg.mesh, "Icosphere subdivision level")->capture_default_str();
  app.add_option("--levels", cfg.levels, "Comma-separated convergence levels")->delimiter(',');
  app.add_option("--samples", cfg.samples, "Sample points")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Sampling seed")->capture_default_str();
  app.add_option("--tol", cfg.tol, "Quadrature tolerance (<= 0: model default)")
      ->capture_default_str();
  app.add_option("--out", cfg.out, "JSON output path; CSV tables go next to it");
  app.add_option("--threads", threads, "Worker cap (default: CSQ_LAB_THREADS, then all cores)");
  app.add_option("--check", cfg.check, "Suite selection within a command");
  app.add_option("--loop", cfg.loop, "latitude:r | circle:x,y,r | segment:x0,y0,x1,y1")
      ->capture_default_str();

  for (const char* name : {"verify", "quantize", "star", "chern", "slice", "podles"}) {
    auto* sub = app.add_subcommand(name);
    sub->fallthrough();
  }
  app.get_subcommand("verify")->description("Calibration and propagator axioms");
  app.get_subcommand("quantize")->description("Coherent states, Toeplitz operators, Berezin limit");
  app.get_subcommand("star")->description("Exact star product at finite level");
  app.get_subcommand("chern")->description("Chern number from the 3-point function");
  app.get_subcommand("slice")->description("Sliced path products and holonomy");
  app.get_subcommand("podles")->description("Podles sphere series and axioms");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    cfg.command = app.get_subcommands().front()->get_name();
    cfg.threads = threads > 0 ? static_cast<unsigned>(threads) : threads_from_env();
    if (threads == 0) throw csq::ConfigError("--threads must be positive");
    csq::set_default_threads(cfg.threads);
    cfg.resolve();
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = csq::cli::run(cfg);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_outputs(rep, cfg.out);
    for (const auto& s : rep.suites)
      std::cerr << s.name << ": " << (s.pass ? "pass" : "FAIL") << "\n";
    std::cerr << cfg.command << " finished in " << secs << " s\n";
    return rep.pass() ? 0 : 1;
  } catch (const csq::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const csq::Error& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 1;
  }
}
