#include <doctest.h>

#include <cstdlib>
#include <ellface/suites.hpp>
#include <filesystem>

using namespace ellface;

namespace {

RunConfig small_verify() {
  RunConfig c;
  c.family = Family::A;
  c.rank = 1;
  c.suites = {"face-ybe", "unitarity", "kappa", "conn-formula", "qybe"};
  c.u = std::vector<double>{0.13, 0.41};
  c.u_text = "0.13:0.41:2";
  return c;
}

}  // namespace

TEST_SUITE("report") {
  TEST_CASE("number formatting round-trips") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e300, 0.0, 12345.678}) CHECK(parse_double(format_double(v)) == v);
    CHECK(format_double(INFINITY) == "inf");
    CHECK(std::isnan(parse_double("nan")));
    CHECK_THROWS_AS(parse_double("1.2x"), Error);
  }

  TEST_CASE("grid and complex parsing") {
    const auto g = parse_grid<double>("0:1:5", parse_real);
    REQUIRE(g.size() == 5);
    CHECK(g[1] == doctest::Approx(0.25));
    CHECK(g[4] == 1.0);
    CHECK(parse_grid<double>("0.3", parse_real) == std::vector<double>{0.3});
    CHECK_THROWS_AS(parse_grid<double>("0:1", parse_real), Error);
    CHECK_THROWS_AS(parse_grid<double>("0:1:0", parse_real), Error);
    CHECK(parse_complex("0.5+0.25i") == cplx(0.5, 0.25));
    CHECK(parse_complex("-1e-2-3i") == cplx(-0.01, -3.0));
    CHECK(parse_complex("2i") == cplx(0.0, 2.0));
    CHECK(parse_complex("1.5") == cplx(1.5, 0.0));
    const auto zg = parse_grid<cplx>("0.1+0.1i:0.5-0.1i:3", parse_complex);
    CHECK(std::abs(zg[1] - cplx(0.3, 0.0)) < 1e-15);
  }

  TEST_CASE("CSV quoting") {
    const auto f = csv_split("a,\"b,c\",\"d\"\"e\",");
    REQUIRE(f.size() == 4);
    CHECK(f[1] == "b,c");
    CHECK(f[2] == "d\"e");
    CHECK(f[3].empty());
    CHECK(csv_quote("x,y") == "\"x,y\"");
  }

  TEST_CASE("verify tables round-trip byte-identically in both formats") {
    const auto res = run_verify(small_verify());
    CHECK(res.pass);
    const std::string js = to_json_text(res.table);
    const std::string cs = to_csv_text(res.table);
    CHECK(to_json_text(from_json_text(js)) == js);
    CHECK(to_csv_text(from_csv_text(cs)) == cs);
    // the two formats carry identical values
    CHECK(to_json_text(from_csv_text(cs)) == js);
    CHECK(to_csv_text(from_json_text(js)) == cs);
  }

  TEST_CASE("weights table: entry counts and formats") {
    RunConfig c;
    c.family = Family::A;
    c.rank = 1;
    c.u = std::vector<double>{0.2, 0.5};
    const Table t = run_weights(c);
    CHECK(t.meta.at("rows_per_u").get<int>() == 6);
    CHECK(t.rows.size() == 12);
    const std::string cs = to_csv_text(t);
    CHECK(to_json_text(from_csv_text(cs)) == to_json_text(t));
    RunConfig b;
    b.family = Family::B;
    b.rank = 2;
    b.u = std::vector<double>{0.2};
    const Table tb = run_weights(b);
    int part2 = 0;
    for (const auto& r : tb.rows) {
      const auto& ty = std::get<std::string>(r[tb.col("type")]);
      if (ty == "II1" || ty == "II2") ++part2;
    }
    CHECK(part2 > 0);
  }

  TEST_CASE("output order does not depend on the worker count") {
    RunConfig c = small_verify();
    c.workers = 1;
    const std::string one = to_json_text(run_verify(c).table);
    c.workers = 8;
    CHECK(to_json_text(run_verify(c).table) == one);
  }

  TEST_CASE("verify rejects empty and unknown suites") {
    RunConfig c;
    CHECK_THROWS_AS(run_verify(c), Error);
    c.suites = {"nonsense"};
    CHECK_THROWS_AS(run_verify(c), Error);
  }

  TEST_CASE("per-point errors are recorded and the run continues") {
    RunConfig c;
    c.family = Family::A;
    c.rank = 2;
    c.suites = {"crossing", "unitarity"};
    c.u = std::vector<double>{0.3};
    const auto res = run_verify(c);
    CHECK_FALSE(res.pass);
    const Table& t = res.table;
    bool saw_error = false, saw_pass = false;
    for (const auto& r : t.rows) {
      if (std::holds_alternative<std::string>(r[t.col("error")])) saw_error = true;
      if (std::get<bool>(r[t.col("pass")])) saw_pass = true;
    }
    CHECK(saw_error);
    CHECK(saw_pass);
  }

  TEST_CASE("face-ybe suite on the A_1 default grid") {
    RunConfig c;
    c.family = Family::A;
    c.rank = 1;
    c.suites = {"face-ybe"};
    const auto res = run_verify(c);
    CHECK(res.pass);
    CHECK(json_to_double(res.table.meta.at("summary").at("face-ybe").at("max_residual")) < 1e-9);
  }

  TEST_CASE("gauge suite on D_3 reports both stages") {
    RunConfig c;
    c.family = Family::D;
    c.rank = 3;
    c.suites = {"gauge"};
    const auto res = run_verify(c);
    CHECK(res.pass);
    CHECK(res.table.meta.at("gauge").contains("stage1"));
    CHECK(res.table.meta.at("gauge").contains("stage2"));
  }

  TEST_CASE("twistor dump: triangular A_1 and method agreement") {
    RunConfig c;
    c.family = Family::A;
    c.rank = 1;
    const Table t = run_twistor(c);
    CHECK(t.rows.size() == 16 * default_z_grid().size());
    for (const auto& conv : t.meta.at("convergence")) CHECK(json_to_double(conv.at("max_abs_diff")) < 1e-8);
    const std::string js = to_json_text(t);
    CHECK(to_json_text(from_json_text(js)) == js);
  }
}

#ifdef ELLFACE_CLI_PATH
TEST_SUITE("cli") {
  namespace fs = std::filesystem;

  int run(const std::string& args) {
    const int rc = std::system((std::string(ELLFACE_CLI_PATH) + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  }

  TEST_CASE("exit codes") {
    CHECK(run("verify --family A --rank 1 --suite face-ybe,unitarity") == 0);
    CHECK(run("verify --family A --rank 1 --suite ''") == 2);
    CHECK(run("verify --family A --rank 1 --suite bogus") == 2);
    CHECK(run("weights --family E --rank 1") == 2);
    CHECK(run("weights --family A --rank 1 --u 0:1") == 2);
    // an absurd tolerance makes the verification fail
    CHECK(run("verify --family A --rank 1 --suite face-ybe --tol 1e-30") == 1);
    CHECK(run("frobnicate") == 2);
  }

  TEST_CASE("config file with flag override, and byte-identical re-emission") {
    const fs::path dir = fs::temp_directory_path() / "ellface_cli_test";
    fs::create_directories(dir);
    const fs::path cfg = dir / "run.cfg", out = dir / "out.csv";
    {
      std::ofstream f(cfg);
      f << "family=B\nrank=2\nq=0.4\nr=14\nu=0.2:0.6:3\nformat=json\n";
    }
    CHECK(run("weights --config " + cfg.string() + " --format csv --out " + out.string()) == 0);
    const std::string text = read_file(out.string());
    CHECK(text.rfind("# meta ", 0) == 0);
    const Table t = parse_table(text);
    CHECK(t.meta.at("algebra") == "B2");
    CHECK(to_csv_text(t) == text);
    fs::remove_all(dir);
  }
}
#endif
