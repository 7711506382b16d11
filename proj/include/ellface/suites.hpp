#pragma once

// Drivers behind the command-line subcommands: weight tables, verification
// suites and twistor dumps, each producing a Table.

#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include "defaults.hpp"
#include "report.hpp"
#include "verify.hpp"

namespace ellface {

inline constexpr const char* kToolName = "ellface";
inline constexpr const char* kToolVersion = "1.0.0";

inline const std::vector<std::string>& known_suites() {
  static const std::vector<std::string> v{"qybe",      "twistor-diff", "dybe",     "cocycle",
                                          "face-ybe",  "unitarity",    "inversion2", "crossing",
                                          "gauge",     "part2-unique", "kappa",    "conn-formula"};
  return v;
}

struct RunConfig {
  Family family = Family::A;
  int rank = 1;
  double q = kDefaultQ;
  double r = kDefaultR;
  std::vector<double> weights;  // s-coordinates: s_1..s_n or s_0..s_n
  std::vector<double> a;        // alternatively a-coordinates
  std::optional<std::vector<double>> u;
  std::optional<std::vector<cplx>> z;
  std::string u_text, z_text;
  double v = kDefaultV;
  int K = kDefaultK;
  int series_cutoff = 4000;
  std::optional<double> tol;
  std::vector<std::string> suites;
  int workers = 0;
  LambdaSign lambda_sign = LambdaSign::standard;
  int mu = 1, nu = 2;  // steps of the part-II uniqueness check
};

// "x" or "start:stop:count" (inclusive linear grid)
template <class T>
std::vector<T> parse_grid(const std::string& text, T (*parse_one)(const std::string&)) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string p;
  while (std::getline(ss, p, ':')) parts.push_back(p);
  if (parts.size() == 1) return {parse_one(parts[0])};
  if (parts.size() != 3) throw Error(ErrorKind::domain, "grid must be 'value' or 'start:stop:count'");
  const T a = parse_one(parts[0]), b = parse_one(parts[1]);
  int n = 0;
  try {
    n = std::stoi(parts[2]);
  } catch (...) {
    throw Error(ErrorKind::domain, "grid count '" + parts[2] + "' is not an integer");
  }
  if (n < 1) throw Error(ErrorKind::domain, "grid count must be positive");
  std::vector<T> out;
  for (int i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * (static_cast<double>(i) / (n - 1)));
  return out;
}

inline double parse_real(const std::string& s) {
  try {
    size_t k = 0;
    const double v = std::stod(s, &k);
    if (k == s.size()) return v;
  } catch (...) {
  }
  throw Error(ErrorKind::domain, "malformed number '" + s + "'");
}

// "x", "yi", "x+yi" or "x-yi"
inline cplx parse_complex(const std::string& s) {
  if (s.empty()) throw Error(ErrorKind::domain, "empty complex number");
  if (s.back() != 'i') return parse_real(s);
  const std::string body = s.substr(0, s.size() - 1);
  for (size_t k = body.size(); k-- > 1;)
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E')
      return {parse_real(body.substr(0, k)), parse_real(body.substr(k))};
  if (body.empty() || body == "+") return {0.0, 1.0};
  if (body == "-") return {0.0, -1.0};
  return {0.0, parse_real(body)};
}

inline std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string p;
  while (std::getline(ss, p, ',')) out.push_back(parse_real(p));
  return out;
}

struct Context {
  RunConfig cfg;
  AlgebraSpec spec;
  ModulusParams m;
};

inline Context make_context(const RunConfig& cfg) {
  Context c{cfg, build_algebra(cfg.family, cfg.rank, cfg.q), ModulusParams::make(cfg.q, cfg.r, 1e-10, cfg.series_cutoff)};
  if (cfg.K < 1) throw Error(ErrorKind::domain, "trunc-K must be positive");
  if (cfg.tol && !(*cfg.tol > 0.0)) throw Error(ErrorKind::domain, "tol must be positive");
  if (!cfg.weights.empty() && !cfg.a.empty()) throw Error(ErrorKind::domain, "give either weights or a, not both");
  c.m.validate();
  return c;
}

enum class Purpose { face, gauge, twistor };

inline DynamicalWeight resolve_weight(const Context& c, Purpose p) {
  const auto& s = c.spec;
  DynamicalWeight w;
  if (!c.cfg.weights.empty()) {
    const auto& x = c.cfg.weights;
    if (static_cast<int>(x.size()) == s.n) {
      w.s = {0.0};
      w.s.insert(w.s.end(), x.begin(), x.end());
    } else if (static_cast<int>(x.size()) == s.n + 1) {
      w.s = x;
    } else {
      throw Error(ErrorKind::domain, "weights needs n or n+1 s-coordinates");
    }
  } else {
    const auto d = default_points(s);
    const auto& a = !c.cfg.a.empty() ? c.cfg.a : (p == Purpose::face ? d.face : p == Purpose::gauge ? d.gauge : d.twistor);
    w = weight_from_a(a, s);
  }
  check_weight(w, s);
  return apply_lambda_sign(w, c.cfg.lambda_sign);
}

inline Heights resolve_heights(const Context& c, Purpose p) {
  const Heights h = heights(resolve_weight(c, p), c.spec);
  if (!is_generic(h, c.spec, c.m)) throw Error(ErrorKind::degenerate, "dynamical weight is not generic");
  return h;
}

inline ojson doubles_json(const std::vector<double>& v) {
  ojson a = ojson::array();
  for (double x : v) a.push_back(double_to_json(x));
  return a;
}

inline ojson base_meta(const Context& c, const std::string& command) {
  ojson m = ojson::object();
  m["tool"] = kToolName;
  m["version"] = kToolVersion;
  m["command"] = command;
  m["family"] = std::string(1, family_char(c.spec.family));
  m["rank"] = c.spec.n;
  m["algebra"] = c.spec.name();
  m["q"] = c.m.q;
  m["r"] = c.m.r;
  m["p"] = c.m.p;
  m["eta"] = c.spec.eta;
  m["trunc_K"] = c.cfg.K;
  m["series_cutoff"] = c.m.series_cutoff;
  m["product_cutoff"] = c.m.product_cutoff;
  m["lambda_sign"] = c.cfg.lambda_sign == LambdaSign::standard ? "standard" : "negated";
  if (!c.cfg.u_text.empty()) m["u_grid"] = c.cfg.u_text;
  if (!c.cfg.z_text.empty()) m["z_grid"] = c.cfg.z_text;
  return m;
}

inline ojson point_json(const Context& c, Purpose p) {
  ojson o = ojson::object();
  const DynamicalWeight w = resolve_weight(c, p);
  o["s"] = doubles_json(w.s);
  o["a"] = doubles_json(heights(w, c.spec).a);
  return o;
}

// ---------------------------------------------------------------------------
// weights

inline Table run_weights(const RunConfig& cfg) {
  const Context c = make_context(cfg);
  const auto& s = c.spec;
  const Heights a = resolve_heights(c, Purpose::face);
  const std::vector<double> us = cfg.u.value_or(default_u_grid());
  const Kappa kap(s, c.m);
  Table t;
  t.meta = base_meta(c, "weights");
  t.meta["point"] = point_json(c, Purpose::face);
  t.meta["kappa_residuals"] = {{"inversion", kap.residuals().inversion}, {"family", kap.residuals().family}};
  t.columns = {{"grid", CellType::integer}, {"u", CellType::real},     {"type", CellType::str},
               {"beta", CellType::integer}, {"delta", CellType::integer}, {"gamma", CellType::integer},
               {"epsilon", CellType::integer}, {"kappa", CellType::complex}, {"wbar", CellType::complex},
               {"w", CellType::complex}};
  std::vector<FacePlaquette> plqs;
  for (int beta : admissible_steps(a, s, c.m)) {
    const Heights b = shift(a, beta, s);
    for (int gamma : admissible_steps(a, s, c.m)) {
      const Heights cc = shift(a, gamma, s);
      for (int delta : admissible_steps(b, s, c.m)) {
        const Heights d = shift(b, delta, s);
        if (!adjacent(cc, d, s)) continue;
        plqs.push_back(make_plaquette(a, b, cc, d, s));
      }
    }
  }
  std::vector<std::vector<std::vector<Cell>>> out(us.size());
  parallel_for(static_cast<int>(us.size()), cfg.workers ? cfg.workers : default_workers(), [&](int g) {
    const double u = us[g];
    const cplx k = kap(u);
    for (const auto& f : plqs) {
      const cplx wb = wbar(f, u, s, c.m);
      out[g].push_back({static_cast<long long>(g), u, std::string(to_string(f.type)), static_cast<long long>(f.beta),
                        static_cast<long long>(f.delta), static_cast<long long>(f.gamma),
                        static_cast<long long>(f.epsl), k, wb, k * wb});
    }
  });
  for (auto& rows : out)
    for (auto& r : rows) t.rows.push_back(std::move(r));
  t.meta["rows_per_u"] = plqs.size();
  return t;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyRow {
  std::string identity;
  int grid = 0;
  std::optional<cplx> u, v, z1, z2, z3;
  std::optional<double> residual, aux;
  std::optional<long long> configurations;
  double tolerance = 0.0;
  bool pass = false;
  std::string error;
};

inline VerifyRow verify_row(std::string identity, int grid) {
  VerifyRow r;
  r.identity = std::move(identity);
  r.grid = grid;
  return r;
}

inline std::vector<Column> verify_columns() {
  return {{"identity", CellType::str},   {"grid", CellType::integer},     {"u", CellType::complex},
          {"v", CellType::complex},      {"z1", CellType::complex},       {"z2", CellType::complex},
          {"z3", CellType::complex},     {"residual", CellType::real},    {"tolerance", CellType::real},
          {"pass", CellType::boolean},   {"configurations", CellType::integer}, {"aux", CellType::real},
          {"error", CellType::str}};
}

inline std::vector<Cell> verify_cells(const VerifyRow& r) {
  const auto oc = [](const std::optional<cplx>& x) -> Cell { return x ? Cell(*x) : Cell(); };
  const auto od = [](const std::optional<double>& x) -> Cell { return x ? Cell(*x) : Cell(); };
  return {r.identity,
          static_cast<long long>(r.grid),
          oc(r.u),
          oc(r.v),
          oc(r.z1),
          oc(r.z2),
          oc(r.z3),
          od(r.residual),
          r.tolerance,
          r.pass,
          r.configurations ? Cell(*r.configurations) : Cell(),
          od(r.aux),
          r.error.empty() ? Cell() : Cell(r.error)};
}

struct VerifyResult {
  Table table;
  bool pass = false;
};

inline void validate_suites(const std::vector<std::string>& suites) {
  if (suites.empty()) throw Error(ErrorKind::domain, "verification suite is empty");
  for (const auto& s : suites)
    if (s != "all" && std::find(known_suites().begin(), known_suites().end(), s) == known_suites().end())
      throw Error(ErrorKind::domain, "unknown suite '" + s + "'");
}

// suites whose identities exist for the algebra: crossing needs A_1 or B/C/D,
// part-II weights exist only for B/C/D
inline bool suite_defined(const std::string& name, const AlgebraSpec& s) {
  if (name == "crossing") return !(s.family == Family::A && s.n > 1);
  if (name == "part2-unique") return s.family != Family::A;
  return true;
}

// "all" stands for every suite defined for the algebra
inline std::set<std::string> expand_suites(const std::vector<std::string>& suites, const AlgebraSpec& s) {
  std::set<std::string> out(suites.begin(), suites.end());
  if (out.erase("all"))
    for (const auto& k : known_suites())
      if (suite_defined(k, s)) out.insert(k);
  return out;
}

inline VerifyResult run_verify(const RunConfig& cfg) {
  validate_suites(cfg.suites);
  const Context c = make_context(cfg);
  const auto& s = c.spec;
  const auto& m = c.m;
  const std::set<std::string> want = expand_suites(cfg.suites, s);
  const auto tol_for = [&](const std::string& id) { return cfg.tol.value_or(default_tolerance(id, s)); };

  // kappa is shared read-only; a construction failure is recorded per point
  std::unique_ptr<Kappa> kap;
  std::string kap_error;
  try {
    kap = std::make_unique<Kappa>(s, m);
  } catch (const Error& e) {
    kap_error = std::string(to_string(e.kind())) + ": " + e.what();
  }
  const auto need_kappa = [&]() -> const Kappa& {
    if (!kap) throw Error(ErrorKind::construction, kap_error);
    return *kap;
  };

  using Task = std::function<std::vector<VerifyRow>()>;
  std::vector<Task> tasks;
  ojson gauge_meta = nullptr;

  const auto finish = [&](VerifyRow r) {
    r.tolerance = tol_for(r.identity);
    r.pass = r.error.empty() && r.residual && *r.residual < r.tolerance;
    return r;
  };
  // wraps a task so that errors become rows carrying the identity and point
  const auto guarded = [&](VerifyRow proto, std::function<std::vector<VerifyRow>(VerifyRow)> body) -> Task {
    return [=, &finish]() {
      std::vector<VerifyRow> rows;
      try {
        rows = body(proto);
      } catch (const Error& e) {
        VerifyRow r = proto;
        r.error = std::string(to_string(e.kind())) + ": " + e.what();
        rows = {r};
      } catch (const std::exception& e) {
        VerifyRow r = proto;
        r.error = std::string("error: ") + e.what();
        rows = {r};
      }
      for (auto& r : rows) r = finish(r);
      return rows;
    };
  };
  const auto heights_for = [&](Purpose p) { return resolve_heights(c, p); };

  const std::vector<cplx> zs = cfg.z.value_or(default_z_grid());
  const std::vector<double> us = cfg.u.value_or(default_u_grid());

  if (want.count("conn-formula")) {
    const std::vector<cplx> zc = cfg.z.value_or(std::vector<cplx>{{2.3, 0.7}, {-1.9, 1.1}, {3.1, -0.4}});
    for (size_t g = 0; g < zc.size(); ++g) {
      VerifyRow p = verify_row("conn-formula", static_cast<int>(g));
      p.z1 = zc[g];
      tasks.push_back(guarded(p, [=](VerifyRow r) {
        r.residual = connection_residual(kConnA, kConnB, kConnC, m.q, *r.z1);
        return std::vector<VerifyRow>{r};
      }));
    }
  }
  if (want.count("qybe"))
    for (size_t g = 0; g < zs.size(); ++g) {
      VerifyRow p = verify_row("qybe", static_cast<int>(g));
      p.z1 = zs[g];
      p.z2 = zs[g] * kZPartner;
      tasks.push_back(guarded(p, [=](VerifyRow r) {
        r.residual = qybe_residual(*r.z1, *r.z2, s);
        return std::vector<VerifyRow>{r};
      }));
    }
  if (want.count("twistor-diff"))
    for (size_t g = 0; g < zs.size(); ++g) {
      VerifyRow p = verify_row("twistor-diff/product", static_cast<int>(g));
      p.z1 = zs[g];
      tasks.push_back(guarded(p, [=, &heights_for](VerifyRow r) {
        const Heights h = heights_for(Purpose::twistor);
        const cplx z = *r.z1;
        const MatC Fp = twistor(z, h, s, m, TwistorMethod::product, cfg.K).F.m;
        const MatC Fpp = twistor(m.p * z, h, s, m, TwistorMethod::product, cfg.K).F.m;
        const BlockMatrix Fc = twistor(z, h, s, m, TwistorMethod::hybrid, cfg.K).F;
        const MatC Fcp = twistor(m.p * z, h, s, m, TwistorMethod::hybrid, cfg.K).F.m;
        VerifyRow rc = r, ra = r;
        r.residual = twistor_diff_residual_of(Fpp, Fp, z, h, s, m);
        rc.identity = "twistor-diff/closed";
        rc.residual = twistor_diff_residual_of(Fcp, Fc.m, z, h, s, m);
        ra.identity = "twistor-agree";
        double worst = 0.0;
        for (int i : s.J)
          for (int j : s.J)
            for (int k : s.J)
              for (int l : s.J)
                if (!(k == -i && l == -j)) {  // N x N sector comes from the product for B, C, D
                  const int row = Fc.pair(i, k), col = Fc.pair(j, l);
                  worst = std::max(worst, std::abs(Fp(row, col) - Fc.m(row, col)));
                }
        ra.residual = worst;
        return std::vector<VerifyRow>{r, rc, ra};
      }));
    }
  if (want.count("dybe"))
    for (size_t g = 0; g < zs.size(); ++g) {
      VerifyRow p = verify_row("dybe", static_cast<int>(g));
      p.z1 = zs[g];
      p.z2 = zs[g] * kZPartner;
      tasks.push_back(guarded(p, [=, &heights_for](VerifyRow r) {
        r.residual = dybe_residual(*r.z1, *r.z2, heights_for(Purpose::twistor), s, m, TwistorMethod::product, cfg.K);
        return std::vector<VerifyRow>{r};
      }));
    }
  if (want.count("cocycle"))
    for (size_t g = 0; g < zs.size(); ++g) {
      VerifyRow p = verify_row("cocycle", static_cast<int>(g));
      p.z1 = zs[g];
      p.z2 = zs[g] * kZPartner;
      p.z3 = zs[g] * kZPartner * kZPartner;
      tasks.push_back(guarded(p, [=, &heights_for](VerifyRow r) {
        r.residual = cocycle_residual(*r.z1, *r.z2, *r.z3, heights_for(Purpose::twistor), s, m, cfg.K);
        return std::vector<VerifyRow>{r};
      }));
    }
  const auto per_u = [&](const std::string& id, std::function<void(VerifyRow&, const Heights&)> fn) {
    for (size_t g = 0; g < us.size(); ++g) {
      VerifyRow p = verify_row(id, static_cast<int>(g));
      p.u = us[g];
      tasks.push_back(guarded(p, [=, &heights_for](VerifyRow r) {
        fn(r, heights_for(Purpose::face));
        return std::vector<VerifyRow>{r};
      }));
    }
  };
  if (want.count("face-ybe"))
    per_u("face-ybe", [&, s, m](VerifyRow& r, const Heights& h) {
      int n = 0;
      r.v = cfg.v;
      r.residual = face_ybe_scan_with(wbar_fn(s, m), h, *r.u, *r.v, s, m, &n);
      r.configurations = n;
    });
  if (want.count("unitarity"))
    per_u("unitarity", [s, m](VerifyRow& r, const Heights& h) {
      int n = 0;
      r.residual = unitarity_scan_with(wbar_fn(s, m), h, *r.u, s, m, &n);
      r.configurations = n;
    });
  if (want.count("inversion2"))
    per_u("inversion2", [s, m, &need_kappa](VerifyRow& r, const Heights& h) {
      int n = 0;
      r.residual = second_inversion_scan_with(weight_fn(s, m, need_kappa()), h, *r.u, s, m, &n);
      r.configurations = n;
    });
  if (want.count("crossing"))
    per_u("crossing", [s, m, &need_kappa](VerifyRow& r, const Heights& h) {
      int n = 0;
      const auto x = crossing_scan_with(weight_fn(s, m, need_kappa()), h, *r.u, s, m, &n);
      r.residual = x.rel;
      r.aux = x.rel_sq;
      r.configurations = n;
    });
  if (want.count("part2-unique"))
    per_u("part2-unique", [s, m, &cfg](VerifyRow& r, const Heights& h) {
      const auto x = part2_uniqueness(h, cfg.mu, cfg.nu, r.u->real(), s, m);
      r.residual = x.residual;
      r.aux = x.condition;
    });
  if (want.count("kappa")) {
    const std::vector<double> ku = cfg.u.value_or(Kappa::default_grid());
    for (size_t g = 0; g < ku.size(); ++g) {
      VerifyRow p = verify_row("kappa/inversion", static_cast<int>(g));
      p.u = ku[g];
      tasks.push_back(guarded(p, [&need_kappa](VerifyRow r) {
        const auto x = need_kappa().check({r.u->real()});
        VerifyRow f = r;
        r.residual = x.inversion;
        f.identity = "kappa/family";
        f.residual = x.family;
        f.aux = x.family_rel;
        return std::vector<VerifyRow>{r, f};
      }));
    }
  }
  if (want.count("gauge")) {
    const std::vector<double> gu = cfg.u.value_or(default_gauge_grid());
    VerifyRow p = verify_row("gauge/stage2", 0);
    tasks.push_back(guarded(p, [=, &gauge_meta, &heights_for, &need_kappa](VerifyRow r) {
      GaugeOptions opt;
      opt.us = gu;
      opt.K = cfg.K;
      const auto rep = gauge_equivalence(heights_for(Purpose::gauge), s, m, need_kappa(), opt);
      const auto& s1 = rep.stage1;
      const auto& s2 = rep.stage2;
      std::vector<VerifyRow> rows;
      const auto add = [&](const char* id, double res) {
        VerifyRow x = r;
        x.identity = id;
        x.residual = res;
        x.configurations = static_cast<long long>(s1.rows.size());
        rows.push_back(x);
      };
      add("gauge/stage1/cross-ratio", s1.cross_ratio);
      add("gauge/stage1/diag-double-ratio", s1.diag_double_ratio);
      add("gauge/stage1/equal-second-ratio", s1.equal_second_ratio);
      add("gauge/stage1/equal-double-ratio", s1.equal_double_ratio);
      r.residual = s2.max_residual;
      r.aux = s2.vertex_coeff;
      r.configurations = s2.equations;
      if (!s2.signs_consistent) r.error = "degenerate: sign pattern admits no vertex gauge";
      rows.push_back(r);
      ojson g = ojson::object();
      g["grid"] = doubles_json(gu);
      g["stage1"] = {{"pairs_times_points", s1.rows.size()},
                     {"cross_ratio", double_to_json(s1.cross_ratio)},
                     {"diag_double_ratio", double_to_json(s1.diag_double_ratio)},
                     {"equal_second_ratio", double_to_json(s1.equal_second_ratio)},
                     {"equal_double_ratio", double_to_json(s1.equal_double_ratio)}};
      g["stage2"] = {{"equations", s2.equations},
                     {"unknowns", s2.unknowns},
                     {"rank", s2.rank},
                     {"log_residual", double_to_json(s2.log_residual)},
                     {"max_residual", double_to_json(s2.max_residual)},
                     {"vertex_coeff", double_to_json(s2.vertex_coeff)},
                     {"signs_consistent", s2.signs_consistent}};
      gauge_meta = g;
      return rows;
    }));
  }

  std::vector<std::vector<VerifyRow>> results(tasks.size());
  parallel_for(static_cast<int>(tasks.size()), cfg.workers ? cfg.workers : default_workers(),
               [&](int i) { results[i] = tasks[i](); });

  VerifyResult out;
  Table& t = out.table;
  t.meta = base_meta(c, "verify");
  ojson suites = ojson::array();
  for (const auto& x : cfg.suites) suites.push_back(x);
  t.meta["suite"] = suites;
  t.meta["v"] = cfg.v;
  if (cfg.tol) t.meta["tol"] = *cfg.tol;
  ojson pts = ojson::object();
  for (auto [name, p] : {std::pair{"face", Purpose::face}, {"gauge", Purpose::gauge}, {"twistor", Purpose::twistor}})
    pts[name] = point_json(c, p);
  t.meta["points"] = pts;
  if (kap)
    t.meta["kappa_residuals"] = {{"inversion", kap->residuals().inversion}, {"family", kap->residuals().family}};
  else
    t.meta["kappa_error"] = kap_error;
  if (!gauge_meta.is_null()) t.meta["gauge"] = gauge_meta;
  t.columns = verify_columns();
  ojson summary = ojson::object();
  out.pass = true;
  for (const auto& rows : results)
    for (const auto& r : rows) {
      t.rows.push_back(verify_cells(r));
      if (!summary.contains(r.identity))
        summary[r.identity] = {{"points", 0}, {"failures", 0}, {"errors", 0}, {"max_residual", 0.0},
                               {"tolerance", r.tolerance}};
      auto& e = summary[r.identity];
      e["points"] = e["points"].get<int>() + 1;
      if (!r.pass) e["failures"] = e["failures"].get<int>() + 1;
      if (!r.error.empty()) e["errors"] = e["errors"].get<int>() + 1;
      if (r.residual) e["max_residual"] = double_to_json(std::max(json_to_double(e["max_residual"]), *r.residual));
      out.pass = out.pass && r.pass;
    }
  t.meta["summary"] = summary;
  t.meta["pass"] = out.pass;
  return out;
}

// ---------------------------------------------------------------------------
// twistor

inline Table run_twistor(const RunConfig& cfg) {
  const Context c = make_context(cfg);
  const auto& s = c.spec;
  const auto& m = c.m;
  const Heights h = resolve_heights(c, Purpose::twistor);
  const std::vector<cplx> zs = cfg.z.value_or(default_z_grid());
  const int half = std::max(1, cfg.K / 2);
  Table t;
  t.meta = base_meta(c, "twistor");
  t.meta["point"] = point_json(c, Purpose::twistor);
  t.meta["closed_method"] = s.family == Family::A ? "closed" : "hybrid";
  t.columns = {{"grid", CellType::integer}, {"z", CellType::complex}, {"i", CellType::integer},
               {"j", CellType::integer},    {"k", CellType::integer}, {"l", CellType::integer},
               {"product", CellType::complex}, {"closed", CellType::complex}, {"abs_diff", CellType::real}};
  struct PerZ {
    std::vector<std::vector<Cell>> rows;
    double worst = 0.0, worst_half = 0.0;
  };
  std::vector<PerZ> out(zs.size());
  parallel_for(static_cast<int>(zs.size()), cfg.workers ? cfg.workers : default_workers(), [&](int g) {
    const cplx z = zs[g];
    const BlockMatrix Fp = twistor(z, h, s, m, TwistorMethod::product, cfg.K).F;
    const BlockMatrix Fh = twistor(z, h, s, m, TwistorMethod::product, half).F;
    const BlockMatrix Fc = twistor(z, h, s, m, TwistorMethod::hybrid, cfg.K).F;
    for (int i : s.J)
      for (int j : s.J)
        for (int k : s.J)
          for (int l : s.J) {
            const cplx a = Fp.coeff(i, j, k, l), b = Fc.coeff(i, j, k, l);
            const double d = std::abs(a - b);
            out[g].worst = std::max(out[g].worst, d);
            out[g].worst_half = std::max(out[g].worst_half, std::abs(Fh.coeff(i, j, k, l) - b));
            out[g].rows.push_back({static_cast<long long>(g), z, static_cast<long long>(i), static_cast<long long>(j),
                                   static_cast<long long>(k), static_cast<long long>(l), a, b, d});
          }
  });
  ojson conv = ojson::array();
  for (auto& pz : out) {
    for (auto& r : pz.rows) t.rows.push_back(std::move(r));
    conv.push_back({{"max_abs_diff", double_to_json(pz.worst)}, {"max_abs_diff_half_K", double_to_json(pz.worst_half)}});
  }
  t.meta["half_K"] = half;
  t.meta["convergence"] = conv;
  return t;
}

}  // namespace ellface
