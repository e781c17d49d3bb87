#include "ppir/experiment.hpp"

#include <json.hpp>

#include "ppir/rng.hpp"

namespace ppir::experiment {

namespace {

using u64 = std::uint64_t;
using json = nlohmann::ordered_json;
using capacity::Rat;

u64 ipow(u64 b, u64 e) {
  u64 r = 1;
  for (u64 i = 0; i < e; ++i) r *= b;
  return r;
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string lower_string(const capacity::CapacityReport& cap) {
  if (cap.lower_exact) return capacity::to_string(*cap.lower_exact);
  return format_real(cap.lower);
}

}  // namespace

std::string ExperimentSpec::to_json() const {
  json j;
  j["scheme"] = scheme;
  j["n"] = n;
  j["sizes"] = sizes;
  j["L"] = length_L;
  j["gamma"] = gamma;
  j["omega"] = omega;
  j["lambda"] = lambda;
  j["seed"] = seed;
  if (force_s) j["s"] = *force_s;
  j["transport"] = transport;
  j["shuffle"] = shuffle;
  j["p"] = modulus_p;
  j["repetitions"] = repetitions;
  return j.dump(2);
}

ExperimentSpec ExperimentSpec::from_json(const std::string& text) {
  json j = json::parse(text);
  ExperimentSpec s;
  if (j.contains("scheme")) s.scheme = j["scheme"].get<std::string>();
  if (j.contains("n")) s.n = j["n"].get<u64>();
  if (j.contains("sizes")) s.sizes = j["sizes"].get<std::vector<u64>>();
  if (j.contains("L")) s.length_L = j["L"].get<u64>();
  if (j.contains("gamma")) s.gamma = j["gamma"].get<u64>();
  if (j.contains("omega")) s.omega = j["omega"].get<std::vector<u64>>();
  if (j.contains("lambda")) s.lambda = j["lambda"].get<u64>();
  if (j.contains("seed")) s.seed = j["seed"].get<u64>();
  if (j.contains("s")) s.force_s = j["s"].get<u64>();
  if (j.contains("transport")) s.transport = j["transport"].get<std::string>();
  if (j.contains("shuffle")) s.shuffle = j["shuffle"].get<bool>();
  if (j.contains("p")) s.modulus_p = j["p"].get<u64>();
  if (j.contains("repetitions")) s.repetitions = j["repetitions"].get<u64>();
  return s;
}

RunResult run_experiment(const ExperimentSpec& spec) {
  if (spec.scheme != "ppir" && spec.scheme != "mppir" && spec.scheme != "single_server")
    throw Error("run_experiment: unknown scheme '" + spec.scheme + "'");
  if (spec.sizes.empty()) throw Error("run_experiment: sizes required");
  const u64 G = spec.sizes.size();

  RunResult res;
  res.n = spec.n;
  res.gamma_total = G;
  res.lambda = spec.scheme == "ppir" ? 1 : spec.lambda;

  std::vector<u64> omega = spec.omega;
  if (spec.scheme == "ppir") {
    omega = {spec.gamma};
  } else if (omega.empty()) {
    throw Error("run_experiment: omega required for " + spec.scheme);
  }
  res.eta = omega.size();

  const capacity::ProblemConfig cfg{spec.n, G, res.eta, res.lambda};
  res.cap = capacity::report(cfg);

  // Resolve the protocol message length.
  u64 L = spec.length_L;
  MppirRegime regime = MppirRegime::analytical_only;
  if (spec.scheme == "ppir") {
    if (spec.n < 2) throw UnsupportedSingleDB("run_experiment: ppir needs n >= 2");
    L = ipow(spec.n, G);
  } else if (spec.scheme == "single_server") {
    if (spec.n != 1) throw Error("run_experiment: single_server needs n == 1");
    regime = MppirRegime::single_server;
    if (L == 0) L = 4;
  } else {
    regime = classify_regime(spec.n, G, res.eta);
    if (regime == MppirRegime::analytical_only) {
      res.verdict = "analytic_only";
      res.note = "no executable construction for 1 < eta < gamma_total/2";
      return res;
    }
    if (regime == MppirRegime::single_server)
      throw Error("run_experiment: use scheme single_server for n == 1");
    L = regime == MppirRegime::mds ? spec.n * spec.n : ipow(spec.n, G);
  }
  if (spec.length_L != 0 && spec.length_L != L)
    throw Error("run_experiment: L must be " + std::to_string(L) + " for this configuration");

  Rng master(spec.seed);
  const Dataset dataset =
      build_dataset(spec.sizes, L, spec.modulus_p, master.fork(0).next());
  Rng client_rng = master.fork(1);
  MdsRandomness rnd =
      MdsRandomness::sample(client_rng, dataset.cls.delta, G, L, spec.n);
  if (spec.force_s) {
    if (*spec.force_s < 1 || *spec.force_s > dataset.cls.delta)
      throw BadSeed("run_experiment: forced s outside [delta]");
    rnd.s = *spec.force_s;
  }
  res.s = rnd.s;

  // Build the query plan.
  std::vector<std::vector<Query>> db_queries;
  PpirParams ppir_params;
  MppirParams mppir_params;
  if (spec.scheme == "ppir") {
    ppir_params = PpirParams{spec.n, G, spec.gamma, spec.shuffle};
    db_queries = gen_queries_ppir(ppir_params, rnd.client_part()).db_queries;
  } else {
    mppir_params = MppirParams{spec.n, G, omega, res.lambda, spec.modulus_p, spec.shuffle};
    db_queries = spec.scheme == "single_server"
                     ? gen_queries_single_server(mppir_params, L, rnd).db_queries
                     : gen_queries_mppir(mppir_params, rnd).db_queries;
  }

  // Stand up the replicated databases on the requested transport.
  std::vector<std::shared_ptr<net::DatabaseServer>> servers;
  std::vector<std::unique_ptr<net::TcpListener>> listeners;
  std::vector<std::shared_ptr<net::Endpoint>> endpoints;
  for (u64 j = 0; j < spec.n; ++j)
    servers.push_back(std::make_shared<net::DatabaseServer>(dataset));
  if (spec.transport == "inproc") {
    for (auto& srv : servers) endpoints.push_back(std::make_shared<net::InprocEndpoint>(srv));
  } else if (spec.transport == "tcp") {
    for (auto& srv : servers) {
      listeners.push_back(net::serve_database(srv, "127.0.0.1:0"));
      endpoints.push_back(
          std::make_shared<net::TcpEndpoint>("127.0.0.1", listeners.back()->port()));
    }
  } else {
    throw Error("run_experiment: unknown transport '" + spec.transport + "'");
  }

  const std::string session = "exp-" + std::to_string(spec.seed);
  const Transcript t =
      net::orchestrate(rnd.s, spec.scheme, res.lambda, db_queries, endpoints, session);
  res.executed = true;
  res.download_symbols = t.total_answer_symbols();
  res.measured_rate = measure_rate(t, L, res.eta * res.lambda);
  res.transcript_digest = transcript_fingerprint(t);

  // Decode and verify against ground truth resolved through the oracle side.
  bool ok = true;
  if (spec.scheme == "ppir") {
    const auto symbols = decode_ppir(t, ppir_params, rnd.client_part(), spec.modulus_p);
    const u64 idx = select_candidate(dataset.cls, rnd.s, spec.gamma);
    res.retrieved_indices = {idx};
    ok = symbols == dataset.symbols[idx - 1];
  } else {
    const MppirDecodeResult dec = spec.scheme == "single_server"
                                      ? decode_single_server(t, mppir_params, L, rnd)
                                      : decode_mppir(t, mppir_params, rnd);
    for (u64 i = 0; i < res.eta && ok; ++i) {
      const auto members = select_candidates_cyclic(dataset.cls, rnd.s, omega[i], res.lambda);
      for (u64 k = 0; k < res.lambda && ok; ++k) {
        res.retrieved_indices.push_back(members[k]);
        ok = dec.messages[i][k] == dataset.symbols[members[k] - 1];
      }
    }
  }
  res.decode_ok = ok;

  const bool within_converse = res.measured_rate <= res.cap.upper;
  res.verdict = (ok && within_converse) ? "pass" : "fail";
  if (!within_converse) res.note = "measured rate exceeds converse bound";
  return res;
}

std::string emit_table(std::span<const RunResult> results, const std::string& format) {
  const std::vector<std::string> cols = {"n",     "gamma", "eta",      "lambda",
                                         "upper", "lower", "measured", "verdict"};
  auto cells = [&](const RunResult& r) {
    return std::vector<std::string>{
        std::to_string(r.n),
        std::to_string(r.gamma_total),
        std::to_string(r.eta),
        std::to_string(r.lambda),
        capacity::to_string(r.cap.upper),
        lower_string(r.cap),
        r.executed ? capacity::to_string(r.measured_rate) : "",
        r.verdict};
  };

  std::string out;
  if (format == "csv") {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) out += ',';
      out += cols[i];
    }
    out += '\n';
    for (const RunResult& r : results) {
      const auto row = cells(r);
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        out += row[i];
      }
      out += '\n';
    }
    return out;
  }
  if (format == "json") {
    json arr = json::array();
    for (const RunResult& r : results) {
      json obj;
      const auto row = cells(r);
      for (std::size_t i = 0; i < cols.size(); ++i) obj[cols[i]] = row[i];
      arr.push_back(std::move(obj));
    }
    return arr.dump(2) + "\n";
  }
  if (format == "markdown") {
    out += "|";
    for (const auto& c : cols) out += " " + c + " |";
    out += "\n|";
    for (std::size_t i = 0; i < cols.size(); ++i) out += " --- |";
    out += "\n";
    for (const RunResult& r : results) {
      out += "|";
      for (const auto& cell : cells(r)) out += " " + cell + " |";
      out += "\n";
    }
    return out;
  }
  throw Error("emit_table: format must be csv, json, or markdown");
}

}  // namespace ppir::experiment
