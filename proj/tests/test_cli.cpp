#include <catch2/catch.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include <armagf/armagf.hpp>
#include <armagf/io.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = ARMAGF_CLI_PATH;

int run_cli(const std::string& args) {
  const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "armagf_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json soft_config(const fs::path& out_dir) {
  return json{{"lambda_p", 0.5},   {"lambda_s", 0.9},      {"order_p", 4},
              {"order_q", 4},      {"grid_l", 120},        {"epsilon", 1e-5},
              {"gamma", 0.25},     {"delta_t", 1e-6},      {"k_max", 40},
              {"passband_weight", 1.0}, {"stopband_weight", 1.0},
              {"solver_tol", 1e-9}, {"output_dir", out_dir.string()}};
}

int count_lines(const std::string& text) {
  int lines = 0;
  for (char c : text) lines += c == '\n';
  return lines;
}

}  // namespace

TEST_CASE("design subcommand writes the full report set") {
  const auto dir = fresh_dir("design");
  const auto cfg_path = dir / "config.json";
  write_json(cfg_path, soft_config(dir / "out"));

  const int code = run_cli("design " + cfg_path.string());
  CHECK(code == 0);  // the soft spec converges

  REQUIRE(fs::exists(dir / "out" / "coefficients.json"));
  REQUIRE(fs::exists(dir / "out" / "response.csv"));
  REQUIRE(fs::exists(dir / "out" / "trace.csv"));
  REQUIRE(fs::exists(dir / "out" / "report.json"));

  const json report = json::parse(slurp(dir / "out" / "report.json"));
  CHECK(report.at("converged").get<bool>());
  CHECK(report.at("stable").get<bool>());
  CHECK(report.at("iterations").get<int>() >= 1);
  CHECK(report.at("sse_db").get<double>() < 0.0);
  CHECK(report.at("stability_margin").get<double>() >= 1e-5);

  // response.csv: header + 1001 rows of the default export grid, LF endings.
  const std::string response = slurp(dir / "out" / "response.csv");
  CHECK(count_lines(response) == 1002);
  CHECK(response.rfind("lambda,h,mag_db\n", 0) == 0);
  CHECK(response.find("\r\n") == std::string::npos);

  // trace.csv rows match the reported iteration count.
  const std::string trace = slurp(dir / "out" / "trace.csv");
  CHECK(count_lines(trace) == report.at("iterations").get<int>() + 1);

  // coefficients round-trip; orders <= 8 carry the monomial block.
  const json coeffs = json::parse(slurp(dir / "out" / "coefficients.json"));
  CHECK(coeffs.at("beta").size() == 5);
  CHECK(coeffs.at("alpha").size() == 4);
  CHECK(coeffs.contains("monomial"));
  const auto filter = armagf::load_coefficients_json((dir / "out" / "coefficients.json").string());
  CHECK(filter.order_p() == 4);
  CHECK(filter.order_q() == 4);
}

TEST_CASE("design outputs are byte-identical across runs") {
  const auto dir = fresh_dir("determinism");
  write_json(dir / "a.json", soft_config(dir / "a"));
  write_json(dir / "b.json", soft_config(dir / "b"));
  REQUIRE(run_cli("design " + (dir / "a.json").string()) == 0);
  REQUIRE(run_cli("design " + (dir / "b.json").string()) == 0);
  for (const char* name : {"coefficients.json", "response.csv", "trace.csv"}) {
    INFO(name);
    CHECK(slurp(dir / "a" / name) == slurp(dir / "b" / name));
  }
  // report.json differs only in output_dir-independent content; compare too.
  CHECK(slurp(dir / "a" / "report.json") == slurp(dir / "b" / "report.json"));
}

TEST_CASE("gamma = 0 runs to k_max, reports nonconvergence via exit code 2") {
  const auto dir = fresh_dir("gamma0");
  json cfg = soft_config(dir / "out");
  cfg["gamma"] = 0.0;
  cfg["k_max"] = 5;
  write_json(dir / "config.json", cfg);
  CHECK(run_cli("design " + (dir / "config.json").string()) == 2);

  const std::string trace = slurp(dir / "out" / "trace.csv");
  REQUIRE(count_lines(trace) == 6);
  // constant J in every data row
  std::istringstream in(trace);
  std::string line;
  std::getline(in, line);  // header
  std::string first_j;
  while (std::getline(in, line)) {
    const auto a = line.find(',');
    const auto b = line.find(',', a + 1);
    const std::string j = line.substr(a + 1, b - a - 1);
    if (first_j.empty()) first_j = j;
    CHECK(j == first_j);
  }
}

TEST_CASE("malformed configs exit with code 1") {
  const auto dir = fresh_dir("badcfg");
  SECTION("missing file") {
    CHECK(run_cli("design " + (dir / "nonexistent.json").string()) == 1);
  }
  SECTION("unknown key") {
    json cfg = soft_config(dir / "out");
    cfg["lambda_q"] = 0.3;
    write_json(dir / "config.json", cfg);
    CHECK(run_cli("design " + (dir / "config.json").string()) == 1);
  }
  SECTION("inverted band edges") {
    json cfg = soft_config(dir / "out");
    cfg["lambda_p"] = 1.2;
    cfg["lambda_s"] = 0.4;
    write_json(dir / "config.json", cfg);
    CHECK(run_cli("design " + (dir / "config.json").string()) == 1);
  }
}

TEST_CASE("compare writes two data rows and the proposed design wins") {
  const auto dir = fresh_dir("compare");
  write_json(dir / "config.json", soft_config(dir / "out"));
  REQUIRE(run_cli("compare " + (dir / "config.json").string()) == 0);

  const std::string csv = slurp(dir / "out" / "comparison.csv");
  REQUIRE(count_lines(csv) == 3);

  std::istringstream in(csv);
  std::string header, proposed, baseline;
  std::getline(in, header);
  std::getline(in, proposed);
  std::getline(in, baseline);
  CHECK(header == "method,delta_p_db,delta_s_db,sse_db,j");
  CHECK(proposed.rfind("proposed,", 0) == 0);
  CHECK(baseline.rfind("modified_error,", 0) == 0);

  const auto last_field = [](const std::string& row) {
    return std::stod(row.substr(row.rfind(',') + 1));
  };
  CHECK(last_field(proposed) <= last_field(baseline) + 1e-12);
}

TEST_CASE("apply filters a signal through exported coefficients") {
  const auto dir = fresh_dir("apply");
  const auto out = dir / "out";
  fs::create_directories(out);
  json cfg = soft_config(out);
  write_json(dir / "config.json", cfg);

  SECTION("all-pass coefficients reproduce the signal") {
    write_json(out / "coefficients.json",
               json{{"order_p", 0}, {"order_q", 0}, {"epsilon", 1e-5},
                    {"beta", {1.0}}, {"alpha", json::array()}});
    write_text(dir / "graph.txt", "0 1 1.0\n1 2 1.0\n2 0 1.0\n");
    write_text(dir / "signal.txt", "0.5\n-1.25\n3.0\n");
    REQUIRE(run_cli("apply " + (dir / "config.json").string() + " " +
                    (dir / "graph.txt").string() + " " +
                    (dir / "signal.txt").string()) == 0);
    const auto filtered = armagf::load_signal((out / "filtered_signal.txt").string());
    REQUIRE(filtered.size() == 3);
    CHECK(filtered[0] == Approx(0.5).margin(1e-10));
    CHECK(filtered[1] == Approx(-1.25).margin(1e-10));
    CHECK(filtered[2] == Approx(3.0).margin(1e-10));
  }

  SECTION("zero numerator gives the zero signal") {
    write_json(out / "coefficients.json",
               json{{"order_p", 1}, {"order_q", 1}, {"epsilon", 1e-5},
                    {"beta", {0.0, 0.0}}, {"alpha", {0.3}}});
    write_text(dir / "graph.txt", "0 1 2.0\n");
    write_text(dir / "signal.txt", "1.0\n2.0\n");
    REQUIRE(run_cli("apply " + (dir / "config.json").string() + " " +
                    (dir / "graph.txt").string() + " " +
                    (dir / "signal.txt").string()) == 0);
    const auto filtered = armagf::load_signal((out / "filtered_signal.txt").string());
    CHECK(filtered.lpNorm<Eigen::Infinity>() <= 1e-14);
  }

  SECTION("K_2 high-frequency eigenvector scales by h(2)") {
    write_json(out / "coefficients.json",
               json{{"order_p", 1}, {"order_q", 1}, {"epsilon", 1e-5},
                    {"beta", {0.5, 0.2}}, {"alpha", {0.3}}});
    write_text(dir / "graph.txt", "0 1 1.0\n");
    write_text(dir / "signal.txt", "1.0\n-1.0\n");
    REQUIRE(run_cli("apply " + (dir / "config.json").string() + " " +
                    (dir / "graph.txt").string() + " " +
                    (dir / "signal.txt").string()) == 0);
    armagf::ArmaChebFilter f;
    f.beta = armagf::Vector(2);
    f.beta << 0.5, 0.2;
    f.alpha = armagf::Vector(1);
    f.alpha << 0.3;
    const double gain = armagf::freq_response(f, 2.0);
    const auto filtered = armagf::load_signal((out / "filtered_signal.txt").string());
    REQUIRE(filtered.size() == 2);
    CHECK(filtered[0] == Approx(gain).margin(1e-10));
    CHECK(filtered[1] == Approx(-gain).margin(1e-10));
  }

  SECTION("edge index beyond the signal length exits with code 1") {
    write_json(out / "coefficients.json",
               json{{"order_p", 0}, {"order_q", 0}, {"epsilon", 1e-5},
                    {"beta", {1.0}}, {"alpha", json::array()}});
    write_text(dir / "graph.txt", "0 5 1.0\n");
    write_text(dir / "signal.txt", "1.0\n2.0\n");
    CHECK(run_cli("apply " + (dir / "config.json").string() + " " +
                  (dir / "graph.txt").string() + " " +
                  (dir / "signal.txt").string()) == 1);
  }
}

TEST_CASE("file loaders reject malformed inputs") {
  const auto dir = fresh_dir("loaders");
  SECTION("garbled edge list line") {
    write_text(dir / "graph.txt", "0 1 1.0\nnot an edge\n");
    CHECK_THROWS_AS(armagf::load_edge_list((dir / "graph.txt").string(), 4),
                    armagf::Error);
  }
  SECTION("garbled signal line") {
    write_text(dir / "signal.txt", "1.0\ntwo\n");
    CHECK_THROWS_AS(armagf::load_signal((dir / "signal.txt").string()), armagf::Error);
  }
  SECTION("blank lines are tolerated") {
    write_text(dir / "graph.txt", "\n0 1 0.5\n\n");
    const auto g = armagf::load_edge_list((dir / "graph.txt").string(), 2);
    REQUIRE(g.edges.size() == 1);
    CHECK(g.edges[0].weight == 0.5);
  }
  SECTION("missing files") {
    CHECK_THROWS_AS(armagf::load_edge_list((dir / "nope.txt").string(), 2),
                    armagf::Error);
    CHECK_THROWS_AS(armagf::load_signal((dir / "nope.txt").string()), armagf::Error);
    CHECK_THROWS_AS(armagf::load_coefficients_json((dir / "nope.json").string()),
                    armagf::Error);
  }
  SECTION("signal round-trip keeps every bit") {
    armagf::Vector signal(3);
    signal << 1.0 / 3.0, -2.718281828459045, 1e-17;
    armagf::save_signal((dir / "sig.txt").string(), signal);
    const auto loaded = armagf::load_signal((dir / "sig.txt").string());
    REQUIRE(loaded.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(loaded[i] == signal[i]);
  }
}

TEST_CASE("response.csv magnitudes match freq_response on the export grid") {
  const auto dir = fresh_dir("respcheck");
  json cfg = soft_config(dir / "out");
  cfg["response_grid_l"] = 64;
  write_json(dir / "config.json", cfg);
  REQUIRE(run_cli("design " + (dir / "config.json").string()) == 0);

  const auto filter =
      armagf::load_coefficients_json((dir / "out" / "coefficients.json").string());
  std::istringstream in(slurp(dir / "out" / "response.csv"));
  std::string line;
  std::getline(in, line);  // header
  int row = 0;
  while (std::getline(in, line)) {
    const auto a = line.find(',');
    const auto b = line.find(',', a + 1);
    const double lambda = std::stod(line.substr(0, a));
    const double h = std::stod(line.substr(a + 1, b - a - 1));
    CHECK(lambda == 2.0 * row / 64);
    CHECK(h == armagf::freq_response(filter, lambda));  // same code path, 17 digits
    ++row;
  }
  CHECK(row == 65);
}
