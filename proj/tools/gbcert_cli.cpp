// gbcert command-line frontend.
//
// Exit codes: 0 accept/success, 1 reject, 2 usage or I/O error.

#include <chrono>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "gbcert/cert.hpp"
#include "gbcert/commit.hpp"
#include "gbcert/cs/compile.hpp"
#include "gbcert/cs/gadgets.hpp"
#include "gbcert/dataset.hpp"
#include "gbcert/forest.hpp"
#include "gbcert/model_io.hpp"
#include "gbcert/mutate.hpp"
#include "gbcert/oracle.hpp"
#include "gbcert/train.hpp"
#include "gbcert/train_float.hpp"

#include <json.hpp>

namespace {

using namespace gbcert;
using nlohmann::ordered_json;

struct HyperFlags {
  int trees = 50;
  int depth = 4;
  int bins = 128;
  std::string eta = "0.3";
  std::string lambda = "1";
  std::string gamma = "0";
  std::string p_min = "0.000001";
  int frac_bits = 20;

  void attach(CLI::App* cmd) {
    cmd->add_option("--trees", trees, "boosting rounds");
    cmd->add_option("--depth", depth, "tree height");
    cmd->add_option("--bins", bins, "equal-width bins per feature");
    cmd->add_option("--eta", eta, "learning rate (decimal)");
    cmd->add_option("--lambda", lambda, "L2 regularizer (decimal)");
    cmd->add_option("--gamma", gamma, "split penalty (decimal)");
    cmd->add_option("--p-min", p_min, "probability clip (decimal)");
    cmd->add_option("--frac-bits", frac_bits, "fixed-point fractional bits");
  }

  FxpConfig cfg() const { return FxpConfig{frac_bits}; }

  Hyperparams to_hyperparams() const {
    FxpConfig c = cfg();
    Hyperparams hp;
    hp.trees = trees;
    hp.depth = depth;
    hp.bins = bins;
    hp.eta = quantize_decimal(eta, c);
    hp.lambda = quantize_decimal(lambda, c);
    hp.gamma = quantize_decimal(gamma, c);
    hp.p_min = quantize_decimal(p_min, c);
    if (hp.p_min.raw < 1) hp.p_min.raw = 1;
    return hp;
  }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

int cmd_train(const std::string& data, const std::string& label_col,
              const HyperFlags& hf, const std::string& out,
              const std::string& leaves_out) {
  LoadedCsv csv = load_csv(data, hf.cfg(), label_col);
  TrainResult result = train(csv.ds, hf.to_hyperparams());
  save_model(result.model, out);
  if (!leaves_out.empty()) save_assignment(result.assignment, leaves_out);
  std::printf("trained %d trees (depth %d, bins %d) on %zu x %zu; model -> %s\n",
              hf.trees, hf.depth, hf.bins, csv.ds.rows, csv.ds.cols, out.c_str());
  return 0;
}

int cmd_certify(const std::string& data, const std::string& label_col,
                const std::string& model_path, const std::string& leaves_path,
                const std::string& report_path, int threads) {
  Model model = load_model(model_path);
  LoadedCsv csv = load_csv(data, model.cfg, label_col);
  LeafAssignment la;
  const LeafAssignment* lap = nullptr;
  if (!leaves_path.empty()) {
    la = load_assignment(leaves_path);
    lap = &la;
  }
  CertReport report = certify(csv.ds, model, lap, threads);
  std::string text = report_to_json(report);
  if (!report_path.empty())
    write_text(report_path, text);
  else
    std::fputs(text.c_str(), stdout);
  return report.accepted ? 0 : 1;
}

int cmd_prove(const std::string& data, const std::string& label_col,
              const std::string& model_path, const std::string& leaves_path,
              std::uint64_t seed, const std::string& transcript_path,
              const std::string& commitments_path) {
  Model model = load_model(model_path);
  LoadedCsv csv = load_csv(data, model.cfg, label_col);
  LeafAssignment la;
  const LeafAssignment* lap = nullptr;
  if (!leaves_path.empty()) {
    la = load_assignment(leaves_path);
    lap = &la;
  }

  Commitment cd = commit(canonical_bytes(csv.ds), randomness_from_seed(seed, "dataset"));
  Commitment cm = commit(canonical_bytes(model), randomness_from_seed(seed, "model"));
  Digest stmt = statement(cd.digest, cm.digest);

  cs::Transcript tr = cs::compile_cert(csv.ds, model, lap, stmt);
  cs::save_transcript(tr, transcript_path);

  if (!commitments_path.empty()) {
    ordered_json j;
    j["dataset"] = {{"digest", hex(cd.digest)}, {"randomness", hex(cd.randomness)}};
    j["model"] = {{"digest", hex(cm.digest)}, {"randomness", hex(cm.randomness)}};
    j["statement"] = hex(stmt);
    write_text(commitments_path, j.dump(2) + "\n");
  }
  std::printf("transcript: %zu wires, %zu constraints (%llu data-linear) -> %s\n",
              tr.wire_count(), tr.constraint_count(),
              static_cast<unsigned long long>(tr.data_linear_count()),
              transcript_path.c_str());
  return 0;
}

int cmd_verify(const std::string& transcript_path, std::uint64_t challenge_seed,
               const std::string& commitments_path, const std::string& data,
               const std::string& label_col, const std::string& model_path) {
  cs::Transcript tr = cs::load_transcript(transcript_path);

  if (!commitments_path.empty()) {
    std::ifstream in(commitments_path);
    if (!in) throw std::runtime_error("cannot open " + commitments_path);
    nlohmann::json j = nlohmann::json::parse(in);
    Digest cd = from_hex(j.at("dataset").at("digest").get<std::string>());
    Digest cm = from_hex(j.at("model").at("digest").get<std::string>());
    if (statement(cd, cm) != tr.statement()) {
      std::puts("reject: transcript statement does not match commitments");
      return 1;
    }
    if (!data.empty()) {
      cs::Transcript probe = tr;  // frac_bits needed before opening the data
      LoadedCsv csv = load_csv(data, FxpConfig{probe.frac_bits()}, label_col);
      Digest r = from_hex(j.at("dataset").at("randomness").get<std::string>());
      if (!verify_open(cd, canonical_bytes(csv.ds), r)) {
        std::puts("reject: dataset commitment does not open to --data");
        return 1;
      }
    }
    if (!model_path.empty()) {
      Model model = load_model(model_path);
      Digest r = from_hex(j.at("model").at("randomness").get<std::string>());
      if (!verify_open(cm, canonical_bytes(model), r)) {
        std::puts("reject: model commitment does not open to --model");
        return 1;
      }
    }
  }

  // challenge for the batched multiplication check
  Digest ch = randomness_from_seed(challenge_seed, "challenge");
  Felt challenge = 0;
  for (int i = 0; i < 8; ++i) challenge = (challenge << 8) | ch[i];
  challenge %= kPrime;

  cs::VerifyResult res = cs::verify_transcript(tr, challenge);
  if (res.ok) {
    std::printf("accept: %zu constraints verified\n", tr.constraint_count());
    return 0;
  }
  if (res.first_violation >= 0)
    std::printf("reject: constraint %lld violated\n",
                static_cast<long long>(res.first_violation));
  else
    std::puts("reject: batched multiplication check failed");
  return 1;
}

int cmd_mutate(const std::string& data, const std::string& label_col,
               const std::string& model_path, const std::string& mutation,
               std::uint64_t seed, const std::string& out) {
  Model model = load_model(model_path);
  LoadedCsv csv = load_csv(data, model.cfg, label_col);
  Model mutated =
      mutate_model(model, csv.ds, mutation_kind_from_string(mutation), seed);
  save_model(mutated, out);
  std::printf("mutated (%s, seed %llu) -> %s\n", mutation.c_str(),
              static_cast<unsigned long long>(seed), out.c_str());
  return 0;
}

int cmd_parity(const std::string& data, const std::string& label_col,
               const HyperFlags& hf, std::uint64_t seed,
               const std::string& report_path) {
  LoadedCsv csv;
  if (data.empty())
    csv = make_synthetic(400, 6, seed ^ 0xD5A7A5EEDULL, 2.0, hf.cfg());
  else
    csv = load_csv(data, hf.cfg(), label_col);

  SplitIndices split = split_dataset(csv.ds.rows, 70, seed);
  Dataset train_ds = subset(csv.ds, split.train);
  Dataset test_ds = subset(csv.ds, split.test);

  std::vector<double> train_x, test_x;
  std::vector<std::uint8_t> train_y, test_y;
  for (std::uint32_t i : split.train) {
    for (std::size_t f = 0; f < csv.ds.cols; ++f)
      train_x.push_back(csv.x_real[i * csv.ds.cols + f]);
    train_y.push_back(csv.ds.y[i]);
  }
  for (std::uint32_t i : split.test) {
    for (std::size_t f = 0; f < csv.ds.cols; ++f)
      test_x.push_back(csv.x_real[i * csv.ds.cols + f]);
    test_y.push_back(csv.ds.y[i]);
  }

  Hyperparams hp = hf.to_hyperparams();
  auto t0 = std::chrono::steady_clock::now();
  TrainResult fixed = train(train_ds, hp);
  auto t1 = std::chrono::steady_clock::now();
  FloatModel fm = train_float_reference(train_x, train_y, split.train.size(),
                                        csv.ds.cols, hp, hf.cfg());
  auto t2 = std::chrono::steady_clock::now();

  double acc_fixed = accuracy(fixed.model, test_ds);
  double acc_float =
      accuracy_float(fm, test_x, test_y, split.test.size(), csv.ds.cols);
  double delta = acc_fixed > acc_float ? acc_fixed - acc_float : acc_float - acc_fixed;

  auto secs = [](auto a, auto b) {
    return std::chrono::duration<double>(b - a).count();
  };
  ordered_json j;
  j["rows_train"] = split.train.size();
  j["rows_test"] = split.test.size();
  j["acc_fixed"] = acc_fixed;
  j["acc_float"] = acc_float;
  j["abs_delta"] = delta;
  j["time_fixed_s"] = secs(t0, t1);
  j["time_float_s"] = secs(t1, t2);
  std::string text = j.dump(2) + "\n";
  if (!report_path.empty())
    write_text(report_path, text);
  std::fputs(text.c_str(), stdout);
  return delta <= 0.01 ? 0 : 1;
}

int cmd_forest_train(const std::string& data, const std::string& label_col,
                     int trees, int depth, int bins, int frac_bits,
                     std::uint64_t seed, const std::string& out,
                     const std::string& spec_out) {
  LoadedCsv csv = load_csv(data, FxpConfig{frac_bits}, label_col);
  ForestSpec spec = make_forest_spec(csv.ds.rows, trees, depth, bins, seed);
  ForestModel model = forest_train(csv.ds, spec);
  save_forest(model, out);
  if (!spec_out.empty()) save_spec(spec, spec_out);
  std::printf("forest: %d trees (depth %d, bins %d) -> %s\n", trees, depth,
              bins, out.c_str());
  return 0;
}

int cmd_forest_certify(const std::string& data, const std::string& label_col,
                       const std::string& model_path, const std::string& spec_path,
                       const std::string& report_path) {
  ForestModel model = load_forest(model_path);
  ForestSpec spec = load_spec(spec_path);
  LoadedCsv csv = load_csv(data, model.cfg, label_col);
  CertReport report = forest_certify(csv.ds, model, spec);
  std::string text = report_to_json(report);
  if (!report_path.empty())
    write_text(report_path, text);
  else
    std::fputs(text.c_str(), stdout);
  return report.accepted ? 0 : 1;
}

int cmd_gadget_selftest() {
  using namespace gbcert::cs;
  int failures = 0;
  auto expect = [&](bool cond, const char* what) {
    std::printf("[%s] %s\n", cond ? "ok" : "FAIL", what);
    if (!cond) ++failures;
  };

  {  // comparison agrees with integer < on a signed grid
    bool all = true;
    for (std::int64_t x = -32; x <= 32 && all; ++x)
      for (std::int64_t y = -32; y <= 32; ++y) {
        Transcript tr;
        WireId xw = tr.alloc(encode_signed(x));
        WireId yw = tr.alloc(encode_signed(y));
        WireId s = g_compare(tr, xw, yw);
        if ((tr.value(s) == 1) != (x < y) || !verify_transcript(tr, 3).ok) {
          all = false;
          break;
        }
      }
    expect(all, "comparison grid |x|,|y| <= 32");
  }
  {  // division accepts the honest witness, rejects a perturbed residue
    Transcript tr;
    WireId x = tr.alloc(encode_signed(17));
    WireId y = tr.alloc(encode_signed(5));
    WireId z = tr.alloc(encode_signed(3));
    DivisionWires w = g_division(tr, x, y, z, DivBounds{16, 8});
    expect(verify_transcript(tr, 7).ok, "division 17/5 = 3 r 2");
    tr.poke(w.residue, f_add(tr.value(w.residue), 1));
    expect(!verify_transcript(tr, 7).ok, "division residue +1 rejected");
  }
  {  // truncation of a negative value rounds toward zero
    Transcript tr;
    WireId x = tr.alloc(encode_signed(-100));
    WireId z = tr.alloc(encode_signed(-6));
    g_truncation(tr, x, z, 4);
    expect(verify_transcript(tr, 11).ok, "trunc(-100 / 16) = -6");
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic fixed-point GBDT training and certification"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value config file (flags take precedence)");

  std::string data, label_col = "label", model_path, leaves_path, out,
              report_path, transcript_path, commitments_path, spec_path,
              mutation = "z0";
  std::uint64_t seed = 0;
  int threads = 1;
  HyperFlags hf;

  auto* train_cmd = app.add_subcommand("train", "train a fixed-point model");
  train_cmd->add_option("--data", data, "training CSV")->required();
  train_cmd->add_option("--label-col", label_col, "label column name");
  hf.attach(train_cmd);
  train_cmd->add_option("--out", out, "model JSON path")->required();
  train_cmd->add_option("--leaves-out", leaves_path, "leaf-assignment JSON path");

  auto* certify_cmd = app.add_subcommand("certify", "check a model against its data");
  certify_cmd->add_option("--data", data)->required();
  certify_cmd->add_option("--label-col", label_col);
  certify_cmd->add_option("--model", model_path)->required();
  certify_cmd->add_option("--leaves", leaves_path, "witness leaf assignment");
  certify_cmd->add_option("--report", report_path, "report JSON path");
  certify_cmd->add_option("--threads", threads, "per-tree validation threads");

  auto* prove_cmd = app.add_subcommand("prove", "compile certification to a transcript");
  prove_cmd->add_option("--data", data)->required();
  prove_cmd->add_option("--label-col", label_col);
  prove_cmd->add_option("--model", model_path)->required();
  prove_cmd->add_option("--leaves", leaves_path);
  prove_cmd->add_option("--seed", seed, "commitment randomness seed")->required();
  prove_cmd->add_option("--transcript", transcript_path)->required();
  prove_cmd->add_option("--commitments", commitments_path, "openings JSON path");

  auto* verify_cmd = app.add_subcommand("verify", "replay a transcript");
  verify_cmd->add_option("--transcript", transcript_path)->required();
  verify_cmd->add_option("--seed", seed, "challenge seed");
  verify_cmd->add_option("--commitments", commitments_path);
  verify_cmd->add_option("--data", data, "open the dataset commitment");
  verify_cmd->add_option("--label-col", label_col);
  verify_cmd->add_option("--model", model_path, "open the model commitment");

  auto* mutate_cmd = app.add_subcommand("mutate", "corrupt one model field");
  mutate_cmd->add_option("--data", data)->required();
  mutate_cmd->add_option("--label-col", label_col);
  mutate_cmd->add_option("--model", model_path)->required();
  mutate_cmd->add_option("--mutation", mutation, "z0|feat|thresh|weight|dummy");
  mutate_cmd->add_option("--seed", seed)->required();
  mutate_cmd->add_option("--out", out)->required();

  auto* parity_cmd = app.add_subcommand("parity", "fixed vs float accuracy");
  parity_cmd->add_option("--data", data, "CSV (bundled synthetic when absent)");
  parity_cmd->add_option("--label-col", label_col);
  hf.attach(parity_cmd);
  parity_cmd->add_option("--seed", seed, "split seed")->required();
  parity_cmd->add_option("--report", report_path);

  auto* ftrain_cmd = app.add_subcommand("forest-train", "train a random forest");
  ftrain_cmd->add_option("--data", data)->required();
  ftrain_cmd->add_option("--label-col", label_col);
  ftrain_cmd->add_option("--trees", hf.trees);
  ftrain_cmd->add_option("--depth", hf.depth);
  ftrain_cmd->add_option("--bins", hf.bins);
  ftrain_cmd->add_option("--frac-bits", hf.frac_bits);
  ftrain_cmd->add_option("--seed", seed, "bagging seed")->required();
  ftrain_cmd->add_option("--out", out)->required();
  ftrain_cmd->add_option("--spec-out", spec_path, "index-set spec JSON path");

  auto* fcert_cmd = app.add_subcommand("forest-certify", "check a forest");
  fcert_cmd->add_option("--data", data)->required();
  fcert_cmd->add_option("--label-col", label_col);
  fcert_cmd->add_option("--model", model_path)->required();
  fcert_cmd->add_option("--spec", spec_path, "index-set spec JSON")->required();
  fcert_cmd->add_option("--report", report_path);

  app.add_subcommand("gadget-selftest", "quick gadget soundness probes");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed())
      return cmd_train(data, label_col, hf, out, leaves_path);
    if (certify_cmd->parsed())
      return cmd_certify(data, label_col, model_path, leaves_path, report_path,
                         threads);
    if (prove_cmd->parsed())
      return cmd_prove(data, label_col, model_path, leaves_path, seed,
                       transcript_path, commitments_path);
    if (verify_cmd->parsed())
      return cmd_verify(transcript_path, seed, commitments_path, data,
                        label_col, model_path);
    if (mutate_cmd->parsed())
      return cmd_mutate(data, label_col, model_path, mutation, seed, out);
    if (parity_cmd->parsed())
      return cmd_parity(data, label_col, hf, seed, report_path);
    if (ftrain_cmd->parsed())
      return cmd_forest_train(data, label_col, hf.trees, hf.depth, hf.bins,
                              hf.frac_bits, seed, out, spec_path);
    if (fcert_cmd->parsed())
      return cmd_forest_certify(data, label_col, model_path, spec_path,
                                report_path);
    return cmd_gadget_selftest();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
