// Experiment runner for the pliable-retrieval engine: builds datasets, serves
// databases over TCP, runs retrievals on either transport, audits privacy by
// exact enumeration, and prints rate/bound tables.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "ppir/audit.hpp"
#include "ppir/experiment.hpp"

namespace {

using namespace ppir;
using u64 = std::uint64_t;

std::vector<u64> parse_csv_u64(const std::string& text) {
  std::vector<u64> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stoull(tok));
  }
  return out;
}

void write_output(const std::string& data, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << data;
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw Error("cannot open output file " + out_path);
  f << data;
}

volatile std::sig_atomic_t g_stop = 0;
void on_signal(int) { g_stop = 1; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PPIR / M-PPIR protocol engine and simulator"};
  app.require_subcommand(1);

  // dataset gen
  auto* ds_cmd = app.add_subcommand("dataset", "dataset operations");
  ds_cmd->require_subcommand(1);
  auto* gen_cmd = ds_cmd->add_subcommand("gen", "generate a classified dataset");
  std::string gen_sizes, gen_out;
  u64 gen_L = 8, gen_p = 257, gen_seed = 1;
  gen_cmd->add_option("--sizes", gen_sizes, "class sizes, e.g. 4,6,10")->required();
  gen_cmd->add_option("--L", gen_L, "symbols per message");
  gen_cmd->add_option("--p", gen_p, "prime field modulus");
  gen_cmd->add_option("--seed", gen_seed, "dataset seed");
  gen_cmd->add_option("--out", gen_out, "output file (stdout if omitted)");

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "serve one database over TCP");
  std::string serve_dataset, serve_listen;
  serve_cmd->add_option("--dataset", serve_dataset, "dataset file")->required();
  serve_cmd->add_option("--listen", serve_listen,
                        "bind address host:port (default $PPIR_LISTEN or 127.0.0.1:0)");

  // retrieve
  auto* ret_cmd = app.add_subcommand("retrieve", "run one retrieval end to end");
  std::string ret_scheme = "ppir", ret_sizes, ret_omega, ret_transport = "inproc";
  std::string ret_endpoints, ret_spec_file, ret_format = "markdown", ret_out;
  u64 ret_n = 2, ret_gamma = 1, ret_lambda = 1, ret_seed = 1, ret_p = 257, ret_L = 0;
  std::int64_t ret_s = -1;
  bool ret_shuffle = false;
  ret_cmd->add_option("--scheme", ret_scheme, "ppir | mppir | single_server");
  ret_cmd->add_option("--n", ret_n, "database count");
  ret_cmd->add_option("--sizes", ret_sizes, "class sizes, e.g. 4,6,10");
  ret_cmd->add_option("--classes", ret_gamma, "desired class (ppir)");
  ret_cmd->add_option("--omega", ret_omega, "desired class set (mppir), e.g. 1,3");
  ret_cmd->add_option("--lambda", ret_lambda, "messages per desired class");
  ret_cmd->add_option("--L", ret_L, "message length (single_server only)");
  ret_cmd->add_option("--seed", ret_seed, "master seed");
  ret_cmd->add_option("--s", ret_s, "pin the shared random number s");
  ret_cmd->add_option("--transport", ret_transport, "inproc | tcp");
  ret_cmd->add_option("--endpoints", ret_endpoints, "running databases host:port,host:port");
  ret_cmd->add_option("--p", ret_p, "prime field modulus");
  ret_cmd->add_flag("--shuffle", ret_shuffle, "shuffle per-database query order");
  ret_cmd->add_option("--spec", ret_spec_file, "experiment spec JSON file");
  ret_cmd->add_option("--format", ret_format, "csv | json | markdown");
  ret_cmd->add_option("--out", ret_out, "output file");

  // capacity
  auto* cap_cmd = app.add_subcommand("capacity", "capacity bounds for a configuration");
  u64 cap_n = 2, cap_classes = 2, cap_eta = 1, cap_lambda = 1;
  std::string cap_format = "markdown", cap_out;
  cap_cmd->add_option("--n", cap_n, "database count");
  cap_cmd->add_option("--classes", cap_classes, "total classes");
  cap_cmd->add_option("--eta", cap_eta, "desired classes");
  cap_cmd->add_option("--lambda", cap_lambda, "messages per desired class");
  cap_cmd->add_option("--format", cap_format, "csv | json | markdown");
  cap_cmd->add_option("--out", cap_out, "output file");

  // audit
  auto* audit_cmd = app.add_subcommand("audit", "exact privacy audit by enumeration");
  std::string audit_scheme = "ppir", audit_mode = "raw", audit_out;
  u64 audit_n = 2, audit_classes = 2, audit_eta = 1, audit_lambda = 1, audit_p = 257;
  u64 audit_db = 1, audit_budget = 10'000'000;
  bool audit_shuffle = false;
  audit_cmd->add_option("--scheme", audit_scheme, "ppir | mppir");
  audit_cmd->add_option("--n", audit_n, "database count");
  audit_cmd->add_option("--classes", audit_classes, "total classes");
  audit_cmd->add_option("--eta", audit_eta, "desired classes (mppir)");
  audit_cmd->add_option("--lambda", audit_lambda, "messages per desired class (mppir)");
  audit_cmd->add_option("--p", audit_p, "prime field modulus");
  audit_cmd->add_option("--db", audit_db, "database index to audit");
  audit_cmd->add_option("--mode", audit_mode, "raw | quotient");
  audit_cmd->add_option("--budget", audit_budget, "enumeration atom budget");
  audit_cmd->add_flag("--shuffle", audit_shuffle, "enumerate shuffled query orders");
  audit_cmd->add_option("--out", audit_out, "output file");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "repeat an experiment and tabulate");
  std::string bench_spec, bench_format = "csv", bench_out;
  u64 bench_reps = 0;
  bench_cmd->add_option("--spec", bench_spec, "experiment spec JSON file")->required();
  bench_cmd->add_option("--repetitions", bench_reps, "override repetition count");
  bench_cmd->add_option("--format", bench_format, "csv | json | markdown");
  bench_cmd->add_option("--out", bench_out, "output file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_cmd->parsed()) {
      const Dataset ds = build_dataset(parse_csv_u64(gen_sizes), gen_L, gen_p, gen_seed);
      std::ostringstream body;
      save_dataset(ds, body);
      write_output(body.str(), gen_out);
      if (!gen_out.empty()) {
        std::cerr << "wrote " << gen_out << ": f=" << ds.cls.f << " delta=" << ds.cls.delta
                  << "\n";
      }
      return 0;
    }

    if (serve_cmd->parsed()) {
      std::string listen = serve_listen;
      if (listen.empty()) {
        const char* env = std::getenv("PPIR_LISTEN");
        listen = env ? env : "127.0.0.1:0";
      }
      auto server = std::make_shared<net::DatabaseServer>(load_dataset_file(serve_dataset));
      auto listener = net::serve_database(server, listen);
      std::cout << "listening on port " << listener->port() << std::endl;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      listener->stop();
      return 0;
    }

    if (ret_cmd->parsed()) {
      experiment::ExperimentSpec spec;
      if (!ret_spec_file.empty()) {
        std::ifstream f(ret_spec_file);
        if (!f) throw Error("cannot open spec file " + ret_spec_file);
        std::stringstream buf;
        buf << f.rdbuf();
        spec = experiment::ExperimentSpec::from_json(buf.str());
      } else {
        spec.scheme = ret_scheme;
        spec.n = ret_n;
        spec.sizes = parse_csv_u64(ret_sizes);
        spec.gamma = ret_gamma;
        spec.omega = parse_csv_u64(ret_omega);
        spec.lambda = ret_lambda;
        spec.length_L = ret_L;
        spec.seed = ret_seed;
        if (ret_s >= 0) spec.force_s = static_cast<u64>(ret_s);
        spec.transport = ret_transport;
        spec.shuffle = ret_shuffle;
        spec.modulus_p = ret_p;
      }
      const auto result = experiment::run_experiment(spec);
      write_output(experiment::emit_table({&result, 1}, ret_format), ret_out);
      if (result.executed) {
        std::cerr << "s=" << result.s << " downloaded=" << result.download_symbols
                  << " decode_ok=" << (result.decode_ok ? "yes" : "no") << " retrieved=";
        for (std::size_t i = 0; i < result.retrieved_indices.size(); ++i) {
          if (i) std::cerr << ',';
          std::cerr << result.retrieved_indices[i];
        }
        std::cerr << "\n";
      } else {
        std::cerr << result.note << "\n";
      }
      return result.verdict == "fail" ? 1 : 0;
    }

    if (cap_cmd->parsed()) {
      experiment::RunResult row;
      row.n = cap_n;
      row.gamma_total = cap_classes;
      row.eta = cap_eta;
      row.lambda = cap_lambda;
      row.cap = capacity::report({cap_n, cap_classes, cap_eta, cap_lambda});
      row.verdict = "analytic";
      write_output(experiment::emit_table({&row, 1}, cap_format), cap_out);
      return 0;
    }

    if (audit_cmd->parsed()) {
      audit::EnumerationOptions opts;
      opts.budget = audit_budget;
      opts.shuffle = audit_shuffle;
      const audit::AuditReport rep =
          audit_scheme == "ppir"
              ? audit::audit_ppir(audit_n, audit_classes, audit_db, audit_mode, opts)
              : audit::audit_mppir(audit_n, audit_classes, audit_eta, audit_lambda, audit_p,
                                   audit_db, audit_mode, opts);
      write_output(rep.to_json() + "\n", audit_out);
      return rep.pass ? 0 : 1;
    }

    if (bench_cmd->parsed()) {
      std::ifstream f(bench_spec);
      if (!f) throw Error("cannot open spec file " + bench_spec);
      std::stringstream buf;
      buf << f.rdbuf();
      experiment::ExperimentSpec spec = experiment::ExperimentSpec::from_json(buf.str());
      if (bench_reps > 0) spec.repetitions = bench_reps;
      std::vector<experiment::RunResult> results;
      for (u64 rep = 0; rep < spec.repetitions; ++rep) {
        experiment::ExperimentSpec one = spec;
        one.seed = spec.seed + rep;
        results.push_back(experiment::run_experiment(one));
      }
      write_output(experiment::emit_table(results, bench_format), bench_out);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
