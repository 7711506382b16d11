// ellface: weight tables, verification suites and twistor dumps.
//
// Exit codes: 0 pass, 1 verification failure, 2 usage or domain error.

#include <CLI11.hpp>
#include <ellface/suites.hpp>
#include <iostream>

namespace {

using namespace ellface;

struct Options {
  std::string family = "A";
  int rank = 1;
  double q = kDefaultQ;
  double r = kDefaultR;
  std::string weights, a, u, z, suite, out = "-", format = "json", lambda_sign = "standard";
  double v = kDefaultV;
  int K = kDefaultK;
  int series_cutoff = 4000;
  double tol = 0.0;
  int workers = 0;
};

void error_record(const std::string& kind, const std::string& msg) {
  ojson e = ojson::object();
  e["error"] = {{"kind", kind}, {"message", msg}};
  std::cerr << e.dump() << "\n";
}

RunConfig to_config(const Options& o, const std::string& command) {
  RunConfig c;
  c.family = parse_family(o.family);
  c.rank = o.rank;
  c.q = o.q;
  c.r = o.r;
  if (!o.weights.empty()) c.weights = parse_list(o.weights);
  if (!o.a.empty()) c.a = parse_list(o.a);
  if (!o.u.empty()) {
    c.u = parse_grid<double>(o.u, parse_real);
    c.u_text = o.u;
  }
  if (!o.z.empty()) {
    c.z = parse_grid<cplx>(o.z, parse_complex);
    c.z_text = o.z;
  }
  c.v = o.v;
  c.K = o.K;
  c.series_cutoff = o.series_cutoff;
  if (o.tol != 0.0) c.tol = o.tol;
  c.workers = o.workers;
  if (o.lambda_sign == "negated")
    c.lambda_sign = LambdaSign::negated;
  else if (o.lambda_sign != "standard")
    throw Error(ErrorKind::domain, "lambda-sign must be standard or negated");
  if (command == "verify") {
    std::stringstream ss(o.suite);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) c.suites.push_back(item);
    validate_suites(c.suites);
  }
  if (o.format != "json" && o.format != "csv") throw Error(ErrorKind::domain, "format must be json or csv");
  return c;
}

void emit(const Table& t, const Options& o) {
  const std::string text = render(t, o.format);
  if (o.out == "-")
    std::cout << text;
  else
    write_file(o.out, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Elliptic dynamical R matrices and face weights"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "flat key=value file; flags override its values");
  Options o;
  app.add_option("--family", o.family, "A, B, C or D")->capture_default_str();
  app.add_option("--rank", o.rank, "rank n")->capture_default_str();
  app.add_option("--q", o.q, "0 < q < 1")->capture_default_str();
  app.add_option("--r", o.r, "elliptic modulus, p = q^(2r)")->capture_default_str();
  // list options accept "x,y" both as flags and in the config file, which splits on commas
  app.add_option("--weights", o.weights, "dynamical weight, comma-separated s_1..s_n or s_0..s_n")
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::Join);
  app.add_option("--a", o.a, "dynamical weight in a-coordinates (alternative to --weights)")
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::Join);
  app.add_option("--u", o.u, "spectral parameter: value or start:stop:count");
  app.add_option("--z", o.z, "multiplicative spectral parameter x, x+yi, or start:stop:count");
  app.add_option("--v", o.v, "second spectral parameter of the face YBE")->capture_default_str();
  app.add_option("--trunc-K", o.K, "number of twistor factors")->capture_default_str();
  app.add_option("--series-cutoff", o.series_cutoff, "maximum terms of a basic hypergeometric series")
      ->capture_default_str();
  app.add_option("--tol", o.tol, "override every tolerance");
  app.add_option("--suite", o.suite, "comma-separated verification suites")
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::Join);
  app.add_option("--out", o.out, "output path, - for stdout")->capture_default_str();
  app.add_option("--format", o.format, "json or csv")->capture_default_str();
  app.add_option("--workers", o.workers, "worker threads, 0 for all cores")->capture_default_str();
  app.add_option("--lambda-sign", o.lambda_sign, "standard or negated")->capture_default_str();
  auto* weights = app.add_subcommand("weights", "face weight table over a u grid");
  auto* verify = app.add_subcommand("verify", "run verification suites");
  auto* twist = app.add_subcommand("twistor", "twistor entries by product and closed methods");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (weights->parsed()) {
      emit(run_weights(to_config(o, "weights")), o);
      return 0;
    }
    if (twist->parsed()) {
      emit(run_twistor(to_config(o, "twistor")), o);
      return 0;
    }
    if (verify->parsed()) {
      const VerifyResult res = run_verify(to_config(o, "verify"));
      emit(res.table, o);
      return res.pass ? 0 : 1;
    }
  } catch (const Error& e) {
    error_record(to_string(e.kind()), e.what());
    return 2;
  } catch (const std::exception& e) {
    error_record("error", e.what());
    return 2;
  }
  return 2;
}
