#include "dfpv/datagen/dgp.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dfpv/datagen/demand.hpp"
#include "dfpv/datagen/dsprite.hpp"
#include "dfpv/errors.hpp"

namespace dfpv::datagen {

std::string to_string(DgpKind k) {
  switch (k) {
    case DgpKind::demand: return "demand";
    case DgpKind::mastouri: return "mastouri";
    case DgpKind::dsprite_surrogate: return "dsprite_surrogate";
  }
  return "unknown";
}

DgpKind dgp_from_string(const std::string& s) {
  if (s == "demand") return DgpKind::demand;
  if (s == "mastouri") return DgpKind::mastouri;
  if (s == "dsprite_surrogate" || s == "dsprite") return DgpKind::dsprite_surrogate;
  throw InvalidArgument("unknown dgp '" + s + "' (expected demand, mastouri or dsprite_surrogate)");
}

void to_json(nlohmann::json& j, const DgpOptions& o) {
  j = nlohmann::json{{"noise_convention", to_string(o.noise)},
                     {"embed_dim", o.embed_dim},
                     {"truth_mc", o.truth_mc},
                     {"truth_seed", o.truth_seed}};
}

void from_json(const nlohmann::json& j, DgpOptions& o) {
  if (!j.is_object()) throw InvalidArgument("dgp_options must be a table/object");
  for (const auto& [k, v] : j.items())
    if (k != "noise_convention" && k != "embed_dim" && k != "truth_mc" && k != "truth_seed")
      throw InvalidArgument("dgp_options: unknown key '" + k + "'");
  DgpOptions d;
  o.noise = noise_convention_from_string(j.value("noise_convention", to_string(d.noise)));
  o.embed_dim = j.value("embed_dim", d.embed_dim);
  o.truth_mc = j.value("truth_mc", d.truth_mc);
  o.truth_seed = j.value("truth_seed", d.truth_seed);
}

ObservationSet generate(DgpKind kind, std::size_t n, std::uint64_t seed, const DgpOptions& opts, std::size_t n_ope) {
  if (n_ope > 0 && kind != DgpKind::demand)
    throw InvalidArgument("policy-evaluation samples are only defined for the demand design");
  switch (kind) {
    case DgpKind::demand: return gen_demand(n, n, seed, n_ope);
    case DgpKind::mastouri: return gen_mastouri(n, n, seed, opts.noise);
    case DgpKind::dsprite_surrogate:
      return gen_dsprite_surrogate(SpriteSurrogate(opts.embed_dim, opts.truth_seed), n, n, seed);
  }
  throw InvalidArgument("generate: unknown dgp");
}

GroundTruth ground_truth(DgpKind kind, const DgpOptions& opts) {
  switch (kind) {
    case DgpKind::demand: return demand_truth_mc(demand_grid(), opts.truth_mc, opts.truth_seed);
    case DgpKind::mastouri: return mastouri_truth(mastouri_grid());
    case DgpKind::dsprite_surrogate: return dsprite_truth(SpriteSurrogate(opts.embed_dim, opts.truth_seed));
  }
  throw InvalidArgument("ground_truth: unknown dgp");
}

namespace {

void write_row(std::ofstream& out, int stage, const Split& s, std::size_t i) {
  char buf[32];
  out << stage;
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << ',' << buf;
  };
  for (double v : s.a.row(i)) put(v);
  for (double v : s.z.row(i)) put(v);
  for (double v : s.w.row(i)) put(v);
  put(s.y[i]);
  out << '\n';
}

std::size_t count_prefix(const std::vector<std::string>& header, const std::string& prefix) {
  std::size_t n = 0;
  for (const auto& h : header)
    if (h.rfind(prefix, 0) == 0) ++n;
  return n;
}

}  // namespace

void write_dataset_csv(const std::string& path, const ObservationSet& data) {
  data.validate();
  auto check = [](const Split& s) {
    if (!s.has_w() || !s.has_y()) throw InvalidArgument("write_dataset_csv: every block needs w and y");
  };
  check(data.stage1);
  check(data.stage2);
  if (data.ope) check(*data.ope);
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write dataset " + path);
  out << "stage";
  for (std::size_t j = 0; j < data.stage1.a.cols(); ++j) out << ",a_" << j;
  for (std::size_t j = 0; j < data.stage1.z.cols(); ++j) out << ",z_" << j;
  for (std::size_t j = 0; j < data.stage1.w.cols(); ++j) out << ",w_" << j;
  out << ",y\n";
  for (std::size_t i = 0; i < data.stage1.size(); ++i) write_row(out, 1, data.stage1, i);
  for (std::size_t i = 0; i < data.stage2.size(); ++i) write_row(out, 2, data.stage2, i);
  if (data.ope)
    for (std::size_t i = 0; i < data.ope->size(); ++i) write_row(out, 3, *data.ope, i);
}

ObservationSet read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("dataset not found: " + path);
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("dataset " + path + " is empty");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  const std::size_t da = count_prefix(header, "a_"), dz = count_prefix(header, "z_"),
                    dw = count_prefix(header, "w_");
  if (header.empty() || header.front() != "stage" || header.back() != "y" || header.size() != 2 + da + dz + dw)
    throw InvalidArgument("dataset " + path + ": header must be stage,a_*,z_*,w_*,y");

  std::vector<Vector> rows[3];
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    Vector r;
    try {
      while (std::getline(ss, cell, ',')) r.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw InvalidArgument("dataset " + path + ": bad number '" + cell + "'");
    }
    if (r.size() != header.size()) throw InvalidArgument("dataset " + path + ": ragged row");
    const int stage = static_cast<int>(r[0]);
    if (stage < 1 || stage > 3 || r[0] != stage) throw InvalidArgument("dataset " + path + ": stage must be 1, 2 or 3");
    rows[stage - 1].push_back(std::move(r));
  }
  auto build = [&](const std::vector<Vector>& rs) {
    Split s{DenseMatrix(rs.size(), da), DenseMatrix(rs.size(), dz), DenseMatrix(rs.size(), dw), Vector(rs.size())};
    for (std::size_t i = 0; i < rs.size(); ++i) {
      std::size_t c = 1;
      for (std::size_t j = 0; j < da; ++j) s.a(i, j) = rs[i][c++];
      for (std::size_t j = 0; j < dz; ++j) s.z(i, j) = rs[i][c++];
      for (std::size_t j = 0; j < dw; ++j) s.w(i, j) = rs[i][c++];
      s.y[i] = rs[i][c];
    }
    return s;
  };
  ObservationSet data;
  data.stage1 = build(rows[0]);
  data.stage2 = build(rows[1]);
  if (!rows[2].empty()) data.ope = build(rows[2]);
  data.validate();
  return data;
}

void write_dataset_sidecar(const std::string& path, const DatasetMeta& meta, const ObservationSet& data) {
  nlohmann::json j{{"dgp", meta.dgp},
                   {"seed", meta.seed},
                   {"n_stage1", meta.n_stage1},
                   {"n_stage2", meta.n_stage2},
                   {"n_ope", meta.n_ope},
                   {"noise_convention", meta.noise_convention},
                   {"dims", {{"a", data.stage1.a.cols()}, {"z", data.stage1.z.cols()}, {"w", data.stage1.w.cols()}}}};
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace dfpv::datagen
