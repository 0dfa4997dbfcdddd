#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/csv.hpp"
#include "jampa/error.hpp"
#include "jampa/noisecal.hpp"

namespace fs = std::filesystem;
using namespace jampa;
using std::numbers::pi;

namespace {

struct Result {
  int code = -1;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() / ("jampa_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name, const std::string& content) const {
    const fs::path p = path_ / name;
    std::ofstream(p) << content;
    return p.string();
  }
  std::string path(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::vector<std::string>> parse(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    rows.push_back(cells);
  }
  return rows;
}

std::string config(int M, const std::string& resonator, const std::string& snail = R"("alpha": 0.1, "L_S": 110e-12)") {
  return R"({"name": "t", "snail": {)" + snail + R"(}, "array": {"M": )" + std::to_string(M) +
         R"(, "C_0": 0.71e-15, "C_S": 0.11e-12}, "resonator": {"Z_c": 46, "v_r": 1.2e8, )" + resonator + "}}";
}

}  // namespace

TEST_CASE("number formatting") {
  CHECK(cli::format_number(8e9) == "8000000000");
  CHECK(cli::format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(cli::format_number(std::nan("")) == "nan");
  CHECK(cli::format_number(-1.5e-20) == "-1.5e-20");
}

TEST_CASE("modes command") {
  TempDir tmp;
  SUBCASE("short array has a single mode in the band") {
    const auto cfg = tmp.file("a.json", config(20, R"("fundamental_Hz": 8e9)"));
    const Result r = run({"modes", "--config", cfg, "--band", "4e9:12e9"});
    REQUIRE(r.code == 0);
    const auto rows = parse(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"n", "parity", "freq_Hz", "epr", "kerr_Hz"});
    CHECK(rows[1][0] == "1");
    CHECK(rows[1][1] == "odd");
    CHECK(std::stod(rows[1][2]) == doctest::Approx(8e9).epsilon(1e-11));
  }
  SUBCASE("long array has equally spaced low modes") {
    const auto cfg = tmp.file("c.json", config(1000, R"("d_r": 0)"));
    const Result r = run({"modes", "--config", cfg, "--band", "0:6e9"});
    REQUIRE(r.code == 0);
    const auto rows = parse(r.out);
    REQUIRE(rows.size() >= 4);
    const double w0 = 1.0 / std::sqrt(110e-12 * 0.71e-15);
    const double spacing = std::stod(rows[2][2]) - std::stod(rows[1][2]);
    CHECK(spacing == doctest::Approx(pi * w0 / 1000 / (2 * pi)).epsilon(0.02));
  }
  SUBCASE("empty band gives only the header") {
    const auto cfg = tmp.file("a.json", config(20, R"("fundamental_Hz": 8e9)"));
    const Result r = run({"modes", "--config", cfg, "--band", "1e9:2e9"});
    CHECK(r.code == 0);
    CHECK(r.out == "n,parity,freq_Hz,epr,kerr_Hz\n");
  }
  SUBCASE("band above the plasma frequency is an input error") {
    const auto cfg = tmp.file("a.json", config(20, R"("fundamental_Hz": 8e9)"));
    const Result r = run({"modes", "--config", cfg, "--band", "0:60e9"});
    CHECK(r.code == 2);
    CHECK(r.err.find("plasma") != std::string::npos);
  }
}

TEST_CASE("config validation") {
  TempDir tmp;
  auto code_for = [&](const std::string& json) {
    return run({"modes", "--config", tmp.file("x.json", json)}).code;
  };
  CHECK(code_for(config(20, R"("fundamental_Hz": 8e9)")) == 0);
  CHECK(code_for(config(20, R"("fundamental_Hz": 8e9, "colour": 1)")) == 2);
  CHECK(code_for(config(20, R"("fundamental_Hz": 8e9, "d_r": 1e-3)")) == 2);
  CHECK(code_for(config(20, R"("fundamental_Hz": 8e9)", R"("L_S": 1e-10, "L_J": 1e-10)")) == 2);
  CHECK(code_for(config(20, R"("fundamental_Hz": 8e9)", R"("L_S": "big")")) == 2);
  CHECK(code_for(config(0, R"("d_r": 1e-3)")) == 2);
  CHECK(code_for("{\"snail\": ") == 2);
  CHECK(code_for(R"({"snail": {"L_S": 1e-10}, "array": {"M": 2, "C_0": 1e-15, "C_S": 1e-13}, "resonator": {"Z_c": 50, "v_r": 1e8, "d_r": 1e-3}, "extra": 0})") == 2);
  CHECK(run({"modes", "--config", tmp.path("missing.json")}).code == 2);

  const Result r = run({"modes", "--config", tmp.file("y.json", config(20, R"("d_r": 1e-3)", R"("L_S": 110e-12)"))});
  CHECK(r.code == 0);
  CHECK(r.err.find("alpha") != std::string::npos);

  const cli::DeviceConfig parsed = cli::load_config(tmp.file("z.json", config(20, R"("fundamental_Hz": 8e9)")));
  CHECK(parsed.device.array.a == 1.0);
  CHECK(parsed.device.resonator.d_r > 0.0);
  CHECK(parsed.device.array.snail.L_J == doctest::Approx(110e-12 * (0.1 + 1.0 / 3.0)).epsilon(1e-15));
}

TEST_CASE("shipped example configs load") {
  for (const char* name : {"sweep_8ghz", "device_a", "device_b", "device_c"}) {
    const std::string path = std::string(JAMPA_SOURCE_DIR) + "/configs/" + name + ".json";
    CAPTURE(path);
    CHECK_NOTHROW(cli::load_config(path));
  }
}

TEST_CASE("sweep-m command") {
  TempDir tmp;
  const auto cfg = tmp.file("p.json", config(20, R"("fundamental_Hz": 8e9)"));
  SUBCASE("fundamental is pinned until the critical size") {
    const Result r = run({"sweep-m", "--config", cfg, "--m-range", "2:2000:30", "--band", "0:9e9"});
    REQUIRE(r.code == 0);
    const auto rows = parse(r.out);
    CHECK(rows[0] == std::vector<std::string>{"M", "d_r_m", "mode_n", "freq_Hz", "kerr_Hz", "epr", "epr_per_cell",
                                              "region_label"});
    double prev = 8e9 * 1.0001;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i][2] != "1") continue;
      const int M = std::stoi(rows[i][0]);
      const double f = std::stod(rows[i][3]);
      if (M < 220) {
        CHECK(f == doctest::Approx(8e9).epsilon(1e-6));
        CHECK(rows[i][7] != "IV");
      } else {
        CHECK(f < prev);
        CHECK(rows[i][7] == "IV");
        CHECK(rows[i][1] == "0");
      }
      prev = f;
    }
  }
  SUBCASE("a single size reproduces the modes command") {
    const Result s = run({"sweep-m", "--config", cfg, "--m-range", "20:20:1", "--band", "0:40e9"});
    const Result m = run({"modes", "--config", cfg, "--band", "0:40e9"});
    REQUIRE(s.code == 0);
    REQUIRE(m.code == 0);
    const auto a = parse(s.out), b = parse(m.out);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 1; i < a.size(); ++i) {
      CHECK(a[i][2] == b[i][0]);
      CHECK(a[i][3] == b[i][2]);
      CHECK(a[i][5] == b[i][3]);
      CHECK(a[i][4] == b[i][4]);
    }
  }
  SUBCASE("byte-identical reruns and thread counts") {
    const auto out1 = tmp.path("s1.csv"), out2 = tmp.path("s2.csv");
    REQUIRE(run({"sweep-m", "--config", cfg, "--m-range", "1:500:12", "--threads", "1", "--out", out1}).code == 0);
    REQUIRE(run({"sweep-m", "--config", cfg, "--m-range", "1:500:12", "--threads", "7", "--out", out2}).code == 0);
    CHECK(slurp(out1) == slurp(out2));
    CHECK(!slurp(out1).empty());
  }
  SUBCASE("bad ranges") {
    CHECK(run({"sweep-m", "--config", cfg, "--m-range", "5:2"}).code == 2);
    CHECK(run({"sweep-m", "--config", cfg, "--m-range", "0:10:3"}).code == 2);
    CHECK(run({"sweep-m", "--config", cfg, "--band", "3e9"}).code == 2);
    CHECK(run({"sweep-m", "--config", cfg, "--threads", "0"}).code == 2);
    CHECK(run({"sweep-m"}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
  }
}

TEST_CASE("flux-map command") {
  TempDir tmp;
  const auto b = tmp.file("b.json", config(200, R"("fundamental_Hz": 8e9)"));
  const auto c = tmp.file("c.json", config(1000, R"("d_r": 0)"));
  auto summary = [&](const std::string& cfg, const std::string& tol) {
    const auto out = tmp.path("map.csv");
    const Result r = run({"flux-map", "--config", cfg, "--band", "4e9:12e9", "--step", "20e6", "--tolerance", tol,
                          "--out", out});
    REQUIRE(r.code == 0);
    return nlohmann::json::parse(slurp(out + ".gaps.json"));
  };
  const auto inf = summary(b, "inf");
  CHECK(inf["gap_count"] == 0);
  const auto sb = summary(b, "10e6");
  const auto sc = summary(c, "10e6");
  CHECK(sc["coverage_fraction"].get<double>() > sb["coverage_fraction"].get<double>());
  for (const auto& s : {sb, sc}) {
    CHECK(s["covered_width_Hz"].get<double>() + s["gap_width_Hz"].get<double>() == doctest::Approx(8e9).epsilon(1e-12));
  }

  const Result r = run({"flux-map", "--config", b, "--band", "4e9:5e9", "--step", "100e6"});
  REQUIRE(r.code == 0);
  const auto rows = parse(r.out);
  CHECK(rows[0] == std::vector<std::string>{"target_Hz", "covered", "flux_frac", "parity", "level", "freq_Hz", "miss_Hz"});
  CHECK(rows.size() == 12);
  CHECK(run({"flux-map", "--config", b, "--tolerance", "-1"}).code == 2);
  CHECK(run({"flux-map", "--config", b, "--step", "0"}).code == 2);
}

TEST_CASE("noise-fit command") {
  TempDir tmp;
  const double T = 0.05, B = 1e6;
  std::ostringstream csv;
  csv << "bias_V,freq_Hz,power_W\n";
  for (double f : {6e9, 8e9}) {
    for (int i = 0; i <= 100; ++i) {
      const double V = -0.6e-3 + 1.2e-3 * i / 100;
      csv << cli::format_number(V) << ',' << cli::format_number(f) << ','
          << cli::format_number(sntj_noise_power(1e8, 3.0, T, V, B, 2 * pi * f)) << '\n';
    }
  }
  const auto samples = tmp.file("s.csv", csv.str());
  const std::vector<std::string> base{"noise-fit", "--input", samples, "--temperature", "0.05", "--bandwidth", "1e6"};

  SUBCASE("round trip") {
    const Result r = run(base);
    REQUIRE(r.code == 0);
    const auto rows = parse(r.out);
    CHECK(rows[0] == std::vector<std::string>{"freq_Hz", "G_sys_dB", "T_sys_K", "T_N_K", "residual"});
    REQUIRE(rows.size() == 3);
    for (std::size_t i = 1; i < 3; ++i) {
      CHECK(std::stod(rows[i][1]) == doctest::Approx(80.0).epsilon(1e-3));
      CHECK(std::stod(rows[i][2]) == doctest::Approx(3.0).epsilon(0.02));
      CHECK(rows[i][3] == "nan");
    }
  }
  SUBCASE("eta omitted equals eta one") {
    auto with = base;
    with.insert(with.end(), {"--eta", "1"});
    CHECK(run(base).out == run(with).out);
    auto lossy = base;
    lossy.insert(lossy.end(), {"--eta", "0.8"});
    CHECK(run(lossy).out != run(base).out);
  }
  SUBCASE("noise temperature from a visibility file") {
    const double TQ = quantum_temperature(2 * pi * 8e9);
    const double nvr = (3.0 + 100.0 * (TQ + 0.3)) / (3.0 + TQ);
    const auto nf = tmp.file("n.csv", "freq_Hz,nvr,gain_dB\n8e9," + cli::format_number(nvr) + ",20\n");
    auto args = base;
    args.insert(args.end(), {"--nvr", nf});
    const Result r = run(args);
    REQUIRE(r.code == 0);
    const auto rows = parse(r.out);
    CHECK(rows[1][3] == "nan");
    CHECK(std::stod(rows[2][3]) == doctest::Approx(0.3).epsilon(0.05));
  }
  SUBCASE("missing column") {
    const auto bad = tmp.file("bad.csv", "freq_Hz,bias_V\n8e9,1e-3\n");
    const Result r = run({"noise-fit", "--input", bad, "--temperature", "0.05", "--bandwidth", "1e6"});
    CHECK(r.code == 2);
    CHECK(r.err.find("power_W") != std::string::npos);
  }
  SUBCASE("malformed line carries its line number") {
    const auto bad = tmp.file("bad.csv", "freq_Hz,bias_V,power_W\n8e9,1e-3,1e-12\n8e9,oops,1e-12\n");
    const Result r = run({"noise-fit", "--input", bad, "--temperature", "0.05", "--bandwidth", "1e6"});
    CHECK(r.code == 2);
    CHECK(r.err.find(":3:") != std::string::npos);
  }
  SUBCASE("bandwidth is required") {
    CHECK(run({"noise-fit", "--input", samples, "--temperature", "0.05"}).code == 2);
  }
  SUBCASE("no usable frequency is a solver failure") {
    auto args = base;
    args.insert(args.end(), {"--v-threshold", "1"});
    const Result r = run(args);
    CHECK(r.code == 3);
    CHECK(r.err.find("InsufficientData") != std::string::npos);
  }
}
