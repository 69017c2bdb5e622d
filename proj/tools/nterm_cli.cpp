// nterm: command-line front end.
//
//   nterm shells   --r inf --d 2 --m-max 3
//   nterm hfunc    --psi power:s=2 --s 0.5 --n 16
//   nterm en-class --psi power:s=2 --q 1 --p 1 --n-grid 16,32,64
//   nterm greedy   --in f.json --n 1 --p 1
//   nterm lemma51  --p 2,4,6 --n-grid 8,16,32
//   nterm rates    --quantity class_sp --psi power:s=2
//   nterm check-psi --psi log:eps=-1
//
// Global flags: --out (CSV, default stdout), --json (JSON mirror), --threads,
// --budget (lattice/grid points; NTERM_BUDGET_POINTS otherwise).
// Exit status: 0 ok, 1 compute error, 2 bad input. Errors go to stderr as one
// JSON line {"error": {"kind": ..., "message": ...}}.

#include <nterm/nterm.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using nterm::kInf;
using ojson = nlohmann::ordered_json;

namespace {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int fail(int code, const std::string& kind, const std::string& message) {
  ojson e;
  e["error"]["kind"] = kind;
  e["error"]["message"] = message;
  e["error"]["exit_code"] = code;
  std::cerr << e.dump() << '\n';
  return code;
}

double parse_r(const std::string& s) {
  if (s == "inf" || s == "infinity") return kInf;
  std::size_t pos = 0;
  double r;
  try {
    r = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw InputError("--r: expected a number or 'inf', got '" + s + "'");
  }
  if (pos != s.size() || !(r > 0)) throw InputError("--r: expected a positive number or 'inf', got '" + s + "'");
  return r;
}

template <class T>
std::vector<T> parse_list(const std::string& s, const char* flag) {
  std::vector<T> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    T v;
    if (!(is >> v) || !is.eof()) throw InputError(std::string(flag) + ": bad list item '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw InputError(std::string(flag) + ": empty list");
  return out;
}

std::vector<std::uint64_t> parse_grid(const std::string& s) {
  if (s == "dyadic") return nterm::dyadic_grid();
  auto g = parse_list<long long>(s, "--n-grid");
  std::vector<std::uint64_t> out;
  for (auto v : g) {
    if (v < 0) throw InputError("--n-grid: entries must be nonnegative");
    out.push_back(static_cast<std::uint64_t>(v));
  }
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i] <= out[i - 1]) throw InputError("--n-grid: must be strictly increasing");
  return out;
}

nterm::WeightFunction parse_psi(const std::string& s) {
  try {
    return nterm::WeightFunction::parse(s);
  } catch (const nterm::DomainError& e) {
    throw InputError(std::string("--psi: ") + e.what());
  }
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw InputError(msg);
}

std::string g17(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return nterm::format_g17(x);
}

ojson num(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? ojson("nan") : ojson(x > 0 ? "inf" : "-inf");
}

// every option of the app and the chosen subcommand, as given or defaulted
ojson flags_block(const CLI::App& app, const CLI::App& sub) {
  ojson f;
  f["command"] = sub.get_name();
  auto add = [&](const CLI::App& a) {
    for (const CLI::Option* o : a.get_options()) {
      const std::string name = o->get_single_name();
      if (name == "help" || name.empty()) continue;
      if (o->count() > 0) f[name] = o->as<std::string>();
      else if (!o->get_default_str().empty()) f[name] = o->get_default_str();
      else f[name] = nullptr;
    }
  };
  add(app);
  add(sub);
  return f;
}

struct Output {
  std::string csv;
  ojson json;
};

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"n-term approximation characteristics"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_path, json_path;
  unsigned threads = 1;
  unsigned long long budget_points = 0;
  app.add_option("--out", out_path, "CSV output file (default stdout)");
  app.add_option("--json", json_path, "JSON mirror output file");
  app.add_option("--threads", threads, "maximum worker threads")->default_val(1)->check(CLI::Range(1u, 1024u));
  app.add_option("--budget", budget_points, "lattice/grid point budget");

  // shared parameter storage
  std::string psi_s = "power:s=1", r_s = "inf", grid_s, lemma_grid_s, rates_grid_s, p_list_s = "2,4,6", in_path, quantity_s = "class_sp", theorem_s;
  int d = 1, m_max = 16, k0 = 4, samples = 50;
  double q = 1, p = 1, s = 1, c = 2, tol = 1e-10, t_max = 1e6;
  long long n = -1;
  unsigned long long seed = 1, scan_budget = 1'000'000;

  auto add_psi = [&](CLI::App* sc) { sc->add_option("--psi", psi_s, "weight, e.g. power:s=1.5")->default_val("power:s=1"); };
  auto add_r = [&](CLI::App* sc) { sc->add_option("--r", r_s, "norm exponent or inf")->default_val("inf"); };
  auto add_d = [&](CLI::App* sc) { sc->add_option("--d", d, "dimension")->default_val(1); };
  auto add_n = [&](CLI::App* sc) {
    sc->add_option("--n", n, "single n");
    sc->add_option("--n-grid", grid_s, "comma separated n values or 'dyadic'");
  };
  auto add_tol = [&](CLI::App* sc) {
    sc->add_option("--tol", tol, "relative tail tolerance")->default_val(1e-10);
    sc->add_option("--scan-budget", scan_budget, "supremum scan limit")->default_val(1000000);
  };

  auto* shells = app.add_subcommand("shells", "shell counts V_m and growth fit");
  add_r(shells);
  add_d(shells);
  shells->add_option("--m-max", m_max, "largest shell radius")->default_val(16);
  shells->add_option("--k0", k0, "burn-in index for the fit")->default_val(4);

  auto* hfunc = app.add_subcommand("hfunc", "H_n(psibar^p, s)");
  add_psi(hfunc);
  add_r(hfunc);
  add_d(hfunc);
  hfunc->add_option("--s", s, "exponent s > 0")->default_val(1);
  hfunc->add_option("--p", p, "power applied to psibar")->default_val(1);
  add_n(hfunc);
  add_tol(hfunc);

  auto* enclass = app.add_subcommand("en-class", "class best n-term error in S^p");
  add_psi(enclass);
  add_r(enclass);
  add_d(enclass);
  enclass->add_option("--q", q, "class exponent q")->default_val(1);
  enclass->add_option("--p", p, "S^p exponent")->default_val(1);
  add_n(enclass);
  add_tol(enclass);

  auto* greedy = app.add_subcommand("greedy", "greedy S^p error of a coefficient file");
  greedy->add_option("--in", in_path, "coefficient JSON file")->required();
  greedy->add_option("--n", n, "number of terms")->required();
  greedy->add_option("--p", p, "S^p exponent")->default_val(1);

  auto* lemma = app.add_subcommand("lemma51", "exponential sum norms over random index sets");
  add_d(lemma);
  lemma->add_option("--p", p_list_s, "comma separated p values (>= 2)")->default_val("2,4,6");
  lemma->add_option("--n-grid", lemma_grid_s, "comma separated n values")->default_val("8,16,32,64,128,256");
  lemma->add_option("--samples", samples, "random sets per n")->default_val(50);
  lemma->add_option("--c", c, "box half-width factor")->default_val(2);
  lemma->add_option("--seed", seed, "random seed")->default_val(1);

  auto* rates = app.add_subcommand("rates", "rate table and ratio window");
  rates->add_option("--quantity", quantity_s, "class_sp | h_functional | greedy_lp_witness")->default_val("class_sp");
  rates->add_option("--theorem", theorem_s, "thm31_p_le_2 | thm31_p_ge_2 | lemma41 | assertion41");
  add_psi(rates);
  add_r(rates);
  add_d(rates);
  rates->add_option("--q", q, "class exponent q")->default_val(1);
  rates->add_option("--p", p, "norm exponent p")->default_val(1);
  rates->add_option("--s", s, "functional exponent s")->default_val(1);
  rates->add_option("--n-grid", rates_grid_s, "comma separated n values or 'dyadic'")->default_val("dyadic");
  add_tol(rates);

  auto* checkpsi = app.add_subcommand("check-psi", "class B and decay evidence");
  add_psi(checkpsi);
  add_d(checkpsi);
  checkpsi->add_option("--c", c, "ratio constant c > 1")->default_val(2);
  checkpsi->add_option("--s", s, "exponent s > 1 for the decay condition")->default_val(2);
  checkpsi->add_option("--t-max", t_max, "largest grid point")->default_val(1e6);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(2, "parse_error", e.what());
  }

  CLI::App* sub = app.get_subcommands().front();
  nterm::Budget budget = nterm::Budget::from_env();
  if (budget_points > 0) budget.points = budget_points;
  nterm::FunctionalOptions opt;
  opt.tol = tol;
  opt.scan_budget = scan_budget;

  const ojson flags = flags_block(app, *sub);
  Output out;
  std::ostringstream csv;

  // validation: everything that can be checked without computing
  double r = kInf;
  nterm::WeightFunction psi = nterm::WeightFunction::power(1);
  std::vector<std::uint64_t> grid;
  try {
    require(d >= 1, "--d must be >= 1");
    if (sub != greedy && sub != lemma) {
      r = parse_r(r_s);
      psi = parse_psi(psi_s);
    }
    if (sub == hfunc || sub == enclass) {
      require((n >= 0) != !grid_s.empty(), "give exactly one of --n and --n-grid");
      grid = n >= 0 ? std::vector<std::uint64_t>{static_cast<std::uint64_t>(n)} : parse_grid(grid_s);
      require(tol > 0, "--tol must be > 0");
    }
    if (sub == hfunc) require(s > 0 && p > 0, "--s and --p must be > 0");
    if (sub == enclass) require(q > 0 && p > 0 && std::isfinite(q) && std::isfinite(p), "--q and --p must be in (0, inf)");
    if (sub == shells) require(m_max >= 1 && k0 >= 0, "--m-max must be >= 1 and --k0 >= 0");
    if (sub == greedy) require(n >= 0 && p > 0 && std::isfinite(p), "--n must be >= 0 and --p in (0, inf)");
    if (sub == lemma) {
      grid = parse_grid(lemma_grid_s);
      require(grid.front() >= 1, "--n-grid entries must be >= 1");
      require(samples >= 1 && c > 0, "--samples must be >= 1 and --c > 0");
      require(d <= 2, "lemma51 supports d <= 2");
      for (double pv : parse_list<double>(p_list_s, "--p")) require(pv >= 2 && std::isfinite(pv), "--p values must be in [2, inf)");
    }
    if (sub == rates) {
      grid = parse_grid(rates_grid_s);
      require(grid.front() >= 1, "--n-grid entries must be >= 1");
      require(quantity_s == "class_sp" || quantity_s == "h_functional" || quantity_s == "greedy_lp_witness",
              "--quantity: unknown value '" + quantity_s + "'");
      require(theorem_s.empty() || theorem_s == "thm31_p_le_2" || theorem_s == "thm31_p_ge_2" || theorem_s == "lemma41" ||
                  theorem_s == "assertion41",
              "--theorem: unknown value '" + theorem_s + "'");
      require(q > 0 && p > 0 && s > 0, "--q, --p and --s must be > 0");
      require(quantity_s != "greedy_lp_witness" || (d == 1 && p >= 1), "greedy_lp_witness needs --d 1 and --p >= 1");
    }
    if (sub == checkpsi) require(c > 1 && s > 1 && t_max >= 1, "--c must be > 1, --s > 1, --t-max >= 1");
  } catch (const InputError& e) {
    return fail(2, "invalid_argument", e.what());
  }

  try {
    ojson j;
    j["metadata"] = flags;

    if (sub == shells) {
      const auto sd = nterm::shell_counts(r, d, m_max, budget);
      const auto fit = nterm::fit_growth_bounds(sd, k0);
      csv << "m,nu,V\n";
      auto& rows = j["rows"] = ojson::array();
      for (int m = 0; m <= sd.m_max(); ++m) {
        csv << m << ',' << sd.nu[m] << ',' << sd.V[m] << '\n';
        rows.push_back({{"m", m}, {"nu", sd.nu[m]}, {"V", sd.V[m]}});
      }
      j["fit"] = {{"M0", num(fit.M0)}, {"c1", num(fit.c1)}, {"c2", num(fit.c2)}, {"ok", fit.ok}};
    } else if (sub == hfunc || sub == enclass) {
      csv << "n,value,l_star,regime,certified,tail_error_bound\n";
      auto& rows = j["rows"] = ojson::array();
      for (auto nv : grid) {
        nterm::FunctionalResult res;
        if (sub == hfunc) {
          const nterm::RearrangedWeight rw(psi, r, d, p, 64, budget);
          res = nterm::h_functional(rw, nv, s, opt);
        } else {
          res = nterm::class_best_nterm_sp({q, r, psi, d}, nv, p, opt, 64, budget);
        }
        const char* regime = res.regime == nterm::Regime::sup_regime ? "sup" : "tail";
        csv << nv << ',' << g17(res.value) << ',' << (res.l_star ? std::to_string(*res.l_star) : "") << ',' << regime << ','
            << (res.certified ? "true" : "false") << ',' << g17(res.tail_truncation_error_bound) << '\n';
        rows.push_back({{"n", nv},
                        {"value", num(res.value)},
                        {"l_star", res.l_star ? ojson(*res.l_star) : ojson(nullptr)},
                        {"regime", regime},
                        {"certified", res.certified},
                        {"tail_error_bound", num(res.tail_truncation_error_bound)}});
      }
    } else if (sub == greedy) {
      std::ifstream in(in_path);
      if (!in) return fail(2, "io_error", "cannot open '" + in_path + "'");
      nterm::CoefficientSequence f(1);
      try {
        f = nterm::coefficients_from_json(nlohmann::json::parse(in));
      } catch (const nlohmann::json::exception& e) {
        return fail(2, "invalid_input", std::string("coefficient file: ") + e.what());
      } catch (const nterm::DomainError& e) {
        return fail(2, "invalid_input", e.what());
      }
      const double err = nterm::greedy_remainder_sp(f, static_cast<std::size_t>(n), p);
      csv << "n,p,sp_error\n" << n << ',' << g17(p) << ',' << g17(err) << '\n';
      j["rows"] = ojson::array({{{"n", n}, {"p", p}, {"sp_error", num(err)}}});
      auto& kept = j["kept"] = ojson::array();
      const auto order = nterm::greedy_order(f);
      for (std::size_t i = 0; i < std::min<std::size_t>(static_cast<std::size_t>(n), order.size()); ++i)
        kept.push_back(order[i].coords());
    } else if (sub == lemma) {
      const auto ps = parse_list<double>(p_list_s, "--p");
      std::mt19937_64 rng(seed);
      csv << "n,p,min_ratio,max_ratio,min_hy_gap\n";
      auto& rows = j["rows"] = ojson::array();
      for (auto nv : grid) {
        const auto box = static_cast<std::int64_t>(std::floor(c * std::pow(static_cast<double>(nv), 1.0 / d)));
        const std::uint64_t cells = static_cast<std::uint64_t>(std::pow(2.0 * box + 1, d));
        if (cells < nv) throw nterm::DomainError("lemma51: box too small for n distinct indices");
        std::uniform_int_distribution<std::int64_t> coord(-box, box);
        std::vector<std::vector<nterm::MultiIndex>> sets;
        for (int t = 0; t < samples; ++t) {
          std::set<nterm::MultiIndex> picked;
          while (picked.size() < nv) {
            std::vector<std::int64_t> k(static_cast<std::size_t>(d));
            for (auto& x : k) x = coord(rng);
            picked.insert(nterm::MultiIndex(k));
          }
          sets.emplace_back(picked.begin(), picked.end());
        }
        for (double pv : ps) {
          double lo = kInf, hi = 0, gap = kInf;
          const bool even = pv == std::floor(pv) && static_cast<long long>(pv) % 2 == 0;
          for (const auto& gamma : sets) {
            std::int64_t K = 0;
            for (const auto& k : gamma) K = std::max(K, k.max_abs());
            const nterm::GridSpec g{d, (even ? static_cast<std::int64_t>(pv) : 8) * K + 1};
            const auto res = nterm::exponential_sum_norm(gamma, pv, g, c, budget);
            const double ratio = res.value / std::pow(static_cast<double>(nv), 1.0 - 1.0 / pv);
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
            gap = std::min(gap, std::pow(static_cast<double>(nv), 1.0 - 1.0 / pv) - res.value);
          }
          csv << nv << ',' << g17(pv) << ',' << g17(lo) << ',' << g17(hi) << ',' << g17(gap) << '\n';
          rows.push_back({{"n", nv}, {"p", pv}, {"min_ratio", lo}, {"max_ratio", hi}, {"min_hy_gap", gap}});
        }
      }
    } else if (sub == rates) {
      const auto quantity = quantity_s == "class_sp"       ? nterm::Quantity::class_sp
                            : quantity_s == "h_functional" ? nterm::Quantity::h_functional
                                                           : nterm::Quantity::greedy_lp_witness;
      std::optional<nterm::Theorem> theorem;
      if (theorem_s == "thm31_p_le_2") theorem = nterm::Theorem::thm31_p_le_2;
      else if (theorem_s == "thm31_p_ge_2") theorem = nterm::Theorem::thm31_p_ge_2;
      else if (theorem_s == "lemma41") theorem = nterm::Theorem::lemma41;
      else if (theorem_s == "assertion41") theorem = nterm::Theorem::assertion41;
      const nterm::RateParams prm{psi, q, p, s, d, r};
      const auto table = nterm::rate_table(quantity, prm, grid, theorem, opt, threads, budget);
      nterm::write_csv(csv, table);
      ojson tj = nterm::to_json(table);
      for (auto& [k, v] : tj["metadata"].items()) j["metadata"]["table"][k] = v;
      j["rows"] = tj["rows"];
    } else if (sub == checkpsi) {
      const auto grid_b = nterm::log_grid(1.0, t_max, 61);
      const auto b = nterm::check_class_B(psi, c, grid_b);
      const auto dec = nterm::check_decay_condition(psi, s, d, 1.0, t_max);
      const std::vector<std::pair<std::string, ojson>> fields{
          {"B.min_ratio", num(b.min_ratio)},       {"B.max_ratio", num(b.max_ratio)},
          {"B.ratio_above_one", b.ratio_above_one}, {"B.vanishing", b.vanishing},
          {"B.unbounded_ratio", b.unbounded_ratio}, {"B.in_class", b.in_class},
          {"decay.K_psi", num(dec.K_psi)},          {"decay.inv_alpha_inf", num(dec.inv_alpha_inf)},
          {"decay.s_prime", num(dec.s_prime)},      {"decay.threshold", num(dec.threshold)},
          {"decay.passes", dec.passes},             {"decay.convex", dec.convex}};
      csv << "field,value\n";
      for (const auto& [k, v] : fields) {
        csv << k << ',';
        if (v.is_number_float()) csv << g17(v.get<double>());
        else if (v.is_string()) csv << v.get<std::string>();
        else csv << v.dump();
        csv << '\n';
        j["report"][k] = v;
      }
    }

    out.csv = csv.str();
    out.json = std::move(j);
  } catch (const nterm::Error& e) {
    return fail(1, e.kind(), e.what());
  } catch (const std::exception& e) {
    return fail(1, "error", e.what());
  }

  if (out_path.empty()) {
    std::cout << out.csv;
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!(f << out.csv)) return fail(1, "io_error", "cannot write '" + out_path + "'");
  }
  if (!json_path.empty()) {
    std::ofstream f(json_path, std::ios::binary);
    if (!(f << out.json.dump(2) << '\n')) return fail(1, "io_error", "cannot write '" + json_path + "'");
  }
  return 0;
}
