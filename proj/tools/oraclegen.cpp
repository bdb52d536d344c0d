// Mints golden expected values with the independent reference computations
// (wide-integer replays of the defining formulas). Output is JSON with the
// derivation noted per case; files live under testdata/golden/.

#include <cstdio>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gbcert/oracle.hpp"

using nlohmann::ordered_json;

namespace {

ordered_json fxp_cases() {
  ordered_json cases = ordered_json::array();
  auto add = [&](const char* op, ordered_json inputs, std::int64_t expected,
                 const char* trace) {
    ordered_json c;
    c["op"] = op;
    c["inputs"] = std::move(inputs);
    c["expected"] = std::to_string(expected);
    c["trace"] = trace;
    cases.push_back(std::move(c));
  };

  add("fxp_div", {{"x_raw", 16}, {"y_raw", 48}, {"frac_bits", 4}},
      gbcert::oracle::fxp_div(16, 48, 4), "floor(16*16/48)");
  add("fxp_div", {{"x_raw", -16}, {"y_raw", 48}, {"frac_bits", 4}},
      gbcert::oracle::fxp_div(-16, 48, 4), "sign XOR, magnitude floor(16*16/48)");
  add("fxp_mul", {{"x_raw", 24}, {"y_raw", 32}, {"frac_bits", 4}},
      gbcert::oracle::fxp_mul(24, 32, 4), "floor(24*32/16)");
  add("sigmoid_wide", {{"z_raw", 0}, {"frac_bits", 4}},
      gbcert::oracle::sigmoid_wide(0, 4), "(0+32)/4");
  add("sigmoid_wide", {{"z_raw", 40}, {"frac_bits", 4}},
      gbcert::oracle::sigmoid_wide(40, 4), "z >= 2 saturates at scale");

  // logit(0.75) at F=20, every mul/div replayed with 128-bit flooring
  const int F = 20;
  const std::int64_t p = 786432;  // 0.75 * 2^20 exactly
  add("logit_from_prob", {{"p_raw", p}, {"frac_bits", F}},
      gbcert::oracle::logit_from_prob(p, F),
      "u=2p-S; u2=trunc(u*u/S); u3=trunc(u2*u/S); u5=trunc(u3*u2/S); "
      "2*(u + u3/3 + u5/5) toward zero");
  return cases;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"golden expected-value generator"};
  std::string out;
  app.add_option("--out", out, "output JSON path")->required();
  CLI11_PARSE(app, argc, argv);

  ordered_json j;
  j["generator"] = "gbcert-oraclegen";
  j["generator_version"] = 1;
  j["command"] = "gbcert-oraclegen --out " + out;
  j["cases"] = fxp_cases();

  FILE* f = std::fopen(out.c_str(), "w");
  if (!f) {
    std::fprintf(stderr, "error: cannot write %s\n", out.c_str());
    return 2;
  }
  std::string text = j.dump(2) + "\n";
  std::fwrite(text.data(), 1, text.size(), f);
  std::fclose(f);
  std::printf("wrote %zu golden cases -> %s\n", j["cases"].size(), out.c_str());
  return 0;
}
