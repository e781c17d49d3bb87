#include "ppir/dataset.hpp"

#include <fstream>
#include <numeric>
#include <sstream>

#include "ppir/gf.hpp"
#include "ppir/rng.hpp"

namespace ppir {

namespace {
using u64 = std::uint64_t;
}

Classification::Classification(std::vector<u64> class_sizes) : sizes(std::move(class_sizes)) {
  if (sizes.empty()) throw Error("Classification: at least one class required");
  delta = 1;
  for (u64 m : sizes) {
    if (m == 0) throw Error("Classification: empty class");
    f += m;
    delta = std::lcm(delta, m);
  }
}

u64 Classification::class_first(u64 gamma) const {
  if (gamma < 1 || gamma > gamma_total()) throw IndexOutOfClass("class index out of range");
  u64 acc = 1;
  for (u64 l = 1; l < gamma; ++l) acc += sizes[l - 1];
  return acc;
}

u64 Classification::class_last(u64 gamma) const {
  return class_first(gamma) + sizes[gamma - 1] - 1;
}

u64 theta(const Classification& cls, u64 gamma, u64 beta) {
  if (gamma < 1 || gamma > cls.gamma_total())
    throw IndexOutOfClass("theta: class index " + std::to_string(gamma) + " out of range");
  if (beta < 1 || beta > cls.sizes[gamma - 1])
    throw IndexOutOfClass("theta: sub-class index " + std::to_string(beta) + " out of range");
  return cls.class_first(gamma) + beta - 1;
}

u64 select_candidate(const Classification& cls, u64 s, u64 gamma) {
  if (s < 1 || s > cls.delta)
    throw BadSeed("select_candidate: s = " + std::to_string(s) + " outside [δ]");
  const u64 m = cls.sizes.at(gamma - 1);
  // β = ⌈s·M_γ/δ⌉ with exact integers; floating-point ceil would risk an
  // off-by-one at exact multiples.
  const u64 beta = (s * m + cls.delta - 1) / cls.delta;
  return theta(cls, gamma, beta);
}

std::vector<u64> select_candidates_cyclic(const Classification& cls, u64 s, u64 gamma,
                                          u64 lambda) {
  const u64 m = cls.sizes.at(gamma - 1);
  if (lambda > m)
    throw LambdaTooLarge("select_candidates_cyclic: λ = " + std::to_string(lambda) +
                         " exceeds class size " + std::to_string(m));
  std::vector<u64> out;
  out.reserve(lambda);
  u64 idx = select_candidate(cls, s, gamma);
  out.push_back(idx);
  const u64 last = cls.class_last(gamma);
  for (u64 k = 1; k < lambda; ++k) {
    idx = (idx == last) ? idx - m + 1 : idx + 1;
    out.push_back(idx);
  }
  return out;
}

u64 Dataset::symbol(u64 message, u64 position) const {
  if (message < 1 || message > cls.f) throw Error("Dataset::symbol: message index out of range");
  if (position < 1 || position > length_L)
    throw Error("Dataset::symbol: position out of range");
  return symbols[message - 1][position - 1];
}

Dataset build_dataset(std::vector<u64> sizes, u64 length_L, u64 modulus_p, u64 seed) {
  if (length_L == 0) throw Error("build_dataset: L must be positive");
  if (!gf::is_prime(modulus_p)) throw Error("build_dataset: modulus must be prime");
  Dataset ds{Classification(std::move(sizes)), length_L, modulus_p, {}};
  Rng rng(seed);
  ds.symbols.assign(ds.cls.f, std::vector<u64>(length_L, 0));
  for (auto& row : ds.symbols) {
    for (auto& v : row) v = rng.below(modulus_p);
  }
  return ds;
}

void save_dataset(const Dataset& ds, std::ostream& out) {
  out << "ppir-dataset v1 p=" << ds.modulus_p << " L=" << ds.length_L << " sizes=";
  for (std::size_t i = 0; i < ds.cls.sizes.size(); ++i) {
    if (i) out << ',';
    out << ds.cls.sizes[i];
  }
  out << '\n';
  for (const auto& row : ds.symbols) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ' ';
      out << row[i];
    }
    out << '\n';
  }
}

void save_dataset_file(const Dataset& ds, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("save_dataset_file: cannot open " + path);
  save_dataset(ds, f);
}

Dataset load_dataset(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw Error("load_dataset: missing header");
  std::istringstream hs(header);
  std::string magic, version, field;
  hs >> magic >> version;
  if (magic != "ppir-dataset" || version != "v1")
    throw Error("load_dataset: bad header '" + header + "'");
  u64 p = 0, L = 0;
  std::vector<u64> sizes;
  while (hs >> field) {
    if (field.rfind("p=", 0) == 0) {
      p = std::stoull(field.substr(2));
    } else if (field.rfind("L=", 0) == 0) {
      L = std::stoull(field.substr(2));
    } else if (field.rfind("sizes=", 0) == 0) {
      std::istringstream ss(field.substr(6));
      std::string tok;
      while (std::getline(ss, tok, ',')) sizes.push_back(std::stoull(tok));
    } else {
      throw Error("load_dataset: unknown header field '" + field + "'");
    }
  }
  if (p == 0 || L == 0 || sizes.empty()) throw Error("load_dataset: incomplete header");
  Dataset ds{Classification(std::move(sizes)), L, p, {}};
  ds.symbols.assign(ds.cls.f, {});
  for (u64 m = 0; m < ds.cls.f; ++m) {
    std::string line;
    if (!std::getline(in, line)) throw Error("load_dataset: truncated symbol grid");
    std::istringstream ls(line);
    std::vector<u64> row;
    row.reserve(L);
    u64 v;
    while (ls >> v) {
      if (v >= p) throw Error("load_dataset: symbol out of field range");
      row.push_back(v);
    }
    if (row.size() != L) throw Error("load_dataset: wrong symbol count on line");
    ds.symbols[m] = std::move(row);
  }
  return ds;
}

Dataset load_dataset_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("load_dataset_file: cannot open " + path);
  return load_dataset(f);
}

}  // namespace ppir
