#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "stokes_evans/indices.hpp"

using namespace stokes_evans;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr double kGuardDelta = 0.05, kGuardGamma = 0.05, kGuardEps = 0.01;

struct usage_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

json provenance(const std::string& command) {
  return {{"tool", "stokes_evans_cli"},
          {"version", kVersion},
          {"command", command},
          {"validity_guard", {{"max_abs_delta", kGuardDelta}, {"max_abs_gamma", kGuardGamma}, {"max_eps", kGuardEps}}}};
}

void emit(const json& inputs, const json& outputs, const std::string& command) {
  json j;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["provenance"] = provenance(command);
  std::cout << j.dump(2) << "\n";
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << content;
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::AtZero:
      return "at_zero";
    case Regime::BelowCritical:
      return "below_critical";
    case Regime::AtCritical:
      return "at_critical";
    case Regime::AboveCritical:
      return "above_critical";
  }
  return "unknown";
}

json freq_json(const Freq& f) { return json(f.n); }

json term_function_json(const TermFunction& tf, const Realization& R) {
  json arr = json::array();
  for (auto& [k, c] : tf.terms()) {
    const char* kind = k.kind == YKind::Const ? "const" : k.kind == YKind::Cosh ? "cosh" : "sinh";
    arr.push_back({{"coeff", cjson(c)},
                   {"x_freq", R.eval(k.xf)},
                   {"x_freq_lattice", freq_json(k.xf)},
                   {"x_power", k.xp},
                   {"y_power", k.yp},
                   {"y_kind", kind},
                   {"y_rate", R.eval(k.yr)},
                   {"y_rate_lattice", freq_json(k.yr)}});
  }
  return arr;
}

// "v" or "res:N"
SpectralPoint parse_sigma(const WaveParams& wp, const std::string& s) {
  if (s.rfind("res:", 0) == 0) {
    int N = 0;
    try {
      N = std::stoi(s.substr(4));
    } catch (const std::exception&) {
      throw usage_error("--sigma res:N needs an integer N");
    }
    return resonant_point(wp, N);
  }
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return spectral_point(wp, v);
  } catch (const std::invalid_argument&) {
    throw usage_error("--sigma expects a number or res:N");
  }
}

struct Range {
  double lo = 0.0, hi = 0.0;
  int count = 1;
};

Range parse_range(const std::string& s) {
  Range r;
  char c1 = 0, c2 = 0;
  std::istringstream in(s);
  if (!(in >> r.lo >> c1 >> r.hi >> c2 >> r.count) || c1 != ':' || c2 != ':' || !in.eof())
    throw usage_error("--kappa expects lo:hi:count");
  if (!(r.lo > 0.0) || r.count < 1 || r.hi < r.lo) throw usage_error("--kappa range needs 0 < lo <= hi and count >= 1");
  return r;
}

// ---------------------------------------------------------------------------

void run_dispersion(double kappa, double sigma) {
  const WaveParams wp = make_wave_params(kappa);
  const DispersionPoint d = roots_k(wp, sigma);
  json roots = json::array();
  roots.push_back(d.k1 ? json(*d.k1) : json(nullptr));
  roots.push_back(d.k2);
  roots.push_back(d.k3 ? json(*d.k3) : json(nullptr));
  roots.push_back(d.k4);
  emit({{"kappa", kappa}, {"sigma", sigma}},
       {{"regime", regime_name(d.regime)},
        {"roots_k", roots},
        {"sigma_c", d.sigma_c},
        {"k_c", d.k_c},
        {"mu0", wp.mu0},
        {"period", wp.period}},
       "dispersion");
}

void run_stokes(double kappa, int order) {
  if (order < 1 || order > 3) throw usage_error("--order must be 1..3");
  const WaveParams wp = make_wave_params(kappa);
  const StokesExpansion se = build_stokes(wp);
  json orders = json::array();
  for (int n = 1; n <= order; ++n)
    orders.push_back({{"order", n},
                      {"phi", term_function_json(se.phi[n], se.R)},
                      {"eta", term_function_json(se.eta[n], se.R)},
                      {"phibar", se.phibar[n]},
                      {"mu", se.mu[n]},
                      {"residual", stokes_residual(se, n)}});
  emit({{"kappa", kappa}, {"order", order}}, {{"mu0", wp.mu0}, {"orders", orders}}, "stokes");
}

void run_monodromy(double kappa, const std::string& sigma, int order) {
  if (order < 0 || order > 2) throw usage_error("--order must be 0..2");
  const WaveParams wp = make_wave_params(kappa);
  const SpectralPoint sp = parse_sigma(wp, sigma);
  const MonodromySeries ms = build_series(sp, order);
  json mats = json::array();
  for (auto& [o, A] : ms.coeffs) {
    json re = json::array(), im = json::array(), src = json::array();
    for (int j = 0; j < ms.dim; ++j) {
      json r = json::array(), i = json::array(), s = json::array();
      for (int k = 0; k < ms.dim; ++k) {
        r.push_back(A(j, k).real());
        i.push_back(A(j, k).imag());
        s.push_back(ms.source.at(o)(j, k) == EntrySource::Closed ? "closed" : "pipeline");
      }
      re.push_back(r);
      im.push_back(i);
      src.push_back(s);
    }
    mats.push_back({{"m", o.m}, {"n", o.n}, {"re", re}, {"im", im}, {"source", src}});
  }
  json modes = json::array();
  for (int j : sp.modes) modes.push_back({{"j", j}, {"k", sp.k(j)}});
  emit({{"kappa", kappa}, {"sigma", sigma}, {"order", order}},
       {{"sigma", sp.sigma},
        {"regime", regime_name(sp.dp.regime)},
        {"resonance", sp.resonance ? json(*sp.resonance) : json(nullptr)},
        {"period", sp.R.period()},
        {"modes", modes},
        {"a_at_period", mats}},
       "monodromy");
}

json bf_json(const BFCoeffs& b) {
  json a10 = json::array(), a20 = json::array();
  for (const cplx& z : b.alpha10) a10.push_back(cjson(z));
  for (const cplx& z : b.alpha20) a20.push_back(cjson(z));
  return {{"ind1", b.ind1},
          {"nu", b.nu},
          {"alpha10", a10},
          {"alpha20", a20},
          {"alpha11_sq", cjson(b.alpha11_sq)},
          {"alpha11", cjson(b.alpha11)},
          {"f1", cjson(b.f1)},
          {"f2", cjson(b.f2)},
          {"f2_printed_identity", cjson(b.f2_closed)}};
}

json bubble_json(const BubbleCoeffs& b) {
  return {{"ind2", b.ind2},
          {"ind2_scale", b.ind2_scale},
          {"witness1", b.witness1},
          {"witness2", b.witness2},
          {"sigma2", b.sigma},
          {"k4", b.k4},
          {"d200", cjson(b.d200)},
          {"d020", cjson(b.d020)},
          {"d004", cjson(b.d004)},
          {"d110", cjson(b.d110)},
          {"d102", cjson(b.d102)},
          {"d012", cjson(b.d012)},
          {"alpha10", cjson(b.alpha10)},
          {"alpha02", cjson(b.alpha02)},
          {"alpha20", b.alpha20},
          {"alpha12", b.alpha12},
          {"alpha04", b.alpha04},
          {"gamma_star_per_eps2", b.gamma_star},
          {"imag_residual", b.imag_residual}};
}

void run_indices(double kappa, const std::string& which) {
  if (which != "ind1" && which != "ind2" && which != "both") throw usage_error("--which must be ind1, ind2 or both");
  const WaveParams wp = make_wave_params(kappa);
  json out;
  if (which != "ind2") out["bf"] = bf_json(bf_coefficients(wp));
  if (which != "ind1") out["bubble"] = bubble_json(ind2(wp));
  emit({{"kappa", kappa}, {"which", which}}, out, "indices");
}

void print_root(const char* name, double v, bool as_json) {
  if (as_json) {
    emit(json::object(), {{name, v}}, std::string("indices find-") + name);
  } else {
    std::printf("%.9f\n", v);
  }
}

void run_bubble(double kappa, double eps, const std::string& out, int samples) {
  if (eps > kGuardEps) throw domain_error("eps exceeds the validity guard 0.01");
  const WaveParams wp = make_wave_params(kappa);
  const BubbleCoeffs bc = ind2(wp);
  const BubbleCurve cv = bubble_spectrum(bc, eps, samples);
  for (const auto* br : {&cv.upper, &cv.lower})
    for (const BubblePoint& p : *br)
      if (std::abs(p.delta) > kGuardDelta || std::abs(p.gamma) > kGuardGamma)
        throw domain_error("bubble leaves the validity guard |delta|, |gamma| <= 0.05");

  std::string csv = "gamma,re_delta,im_delta\n";
  for (const BubblePoint& p : cv.upper) csv += num(p.gamma) + "," + num(p.delta.real()) + "," + num(p.delta.imag()) + "\n";
  for (auto it = cv.lower.rbegin(); it != cv.lower.rend(); ++it)
    csv += num(it->gamma) + "," + num(it->delta.real()) + "," + num(it->delta.imag()) + "\n";
  write_file(out, csv);

  json j;
  j["inputs"] = {{"kappa", kappa}, {"eps", eps}, {"samples", samples}, {"csv", out}};
  j["outputs"] = {{"coefficients", bubble_json(bc)},
                  {"empty", cv.empty},
                  {"gamma_lo", cv.gamma_lo},
                  {"gamma_hi", cv.gamma_hi},
                  {"gamma_star", cv.gamma_star},
                  {"max_re_delta", cv.max_re},
                  {"points", cv.upper.size() + cv.lower.size()}};
  j["provenance"] = provenance("spectrum bubble");
  write_file(out + ".json", j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
}

struct SweepRow {
  double kappa = 0.0;
  std::vector<std::string> cells;
};

void run_sweep(const std::string& range, const std::vector<std::string>& targets, double eps, const std::string& out,
               const std::string& format, int threads) {
  const Range r = parse_range(range);
  if (eps < 0.0 || eps > kGuardEps) throw domain_error("eps must lie in [0, 0.01]");
  if (format != "csv" && format != "json") throw usage_error("--format must be csv or json");
  bool t_ind1 = false, t_ind2 = false, t_res = false, t_bub = false;
  for (const std::string& t : targets) {
    if (t == "ind1") t_ind1 = true;
    else if (t == "ind2") t_ind2 = true;
    else if (t == "resonances") t_res = true;
    else if (t == "bubble") t_bub = true;
    else throw usage_error("unknown target " + t);
  }
  std::vector<std::string> header{"kappa"};
  if (t_ind1) header.insert(header.end(), {"ind1", "nu"});
  if (t_res) header.insert(header.end(), {"sigma_c", "sigma2", "sigma3"});
  if (t_ind2) header.insert(header.end(), {"ind2", "witness1", "witness2"});
  if (t_bub) header.insert(header.end(), {"bubble_max_re", "bubble_gamma_lo", "bubble_gamma_hi"});

  std::vector<SweepRow> rows(r.count);
  std::vector<std::string> errors(r.count);
  auto work = [&](int i) {
    const double k = r.count == 1 ? r.lo : r.lo + (r.hi - r.lo) * i / (r.count - 1);
    SweepRow row;
    row.kappa = k;
    row.cells.push_back(num(k));
    try {
      const WaveParams wp = make_wave_params(k);
      if (t_ind1) {
        row.cells.push_back(num(ind1(wp)));
        double nu = std::numeric_limits<double>::quiet_NaN();
        try {
          nu = nu_bridges_mielke(wp);
        } catch (const std::domain_error&) {
        }
        row.cells.push_back(num(nu));
      }
      if (t_res) {
        row.cells.push_back(num(critical_point(wp).sigma_c));
        row.cells.push_back(num(resonance_sigma(wp, 2).sigma_N));
        row.cells.push_back(num(resonance_sigma(wp, 3).sigma_N));
      }
      if (t_ind2 || t_bub) {
        const BubbleCoeffs bc = ind2(wp);
        if (t_ind2) {
          row.cells.push_back(num(bc.ind2));
          row.cells.push_back(num(bc.witness1));
          row.cells.push_back(num(bc.witness2));
        }
        if (t_bub) {
          const BubbleCurve cv = bubble_spectrum(bc, eps);
          row.cells.push_back(num(cv.max_re));
          row.cells.push_back(num(cv.gamma_lo));
          row.cells.push_back(num(cv.gamma_hi));
        }
      }
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
    rows[i] = std::move(row);
  };
  const int nt = std::max(1, std::min(threads, r.count));
  std::vector<std::thread> pool;
  for (int t = 0; t < nt; ++t)
    pool.emplace_back([&, t] {
      for (int i = t; i < r.count; i += nt) work(i);
    });
  for (auto& th : pool) th.join();
  for (int i = 0; i < r.count; ++i)
    if (!errors[i].empty()) throw std::runtime_error("sweep row " + std::to_string(i) + ": " + errors[i]);

  json meta;
  meta["inputs"] = {{"kappa", range}, {"targets", targets}, {"eps", eps}, {"format", format}};
  if (format == "csv") {
    std::string csv;
    for (std::size_t c = 0; c < header.size(); ++c) csv += (c ? "," : "") + header[c];
    csv += "\n";
    for (const SweepRow& row : rows) {
      for (std::size_t c = 0; c < row.cells.size(); ++c) csv += (c ? "," : "") + row.cells[c];
      csv += "\n";
    }
    if (out.empty()) {
      std::cout << csv;
      return;
    }
    write_file(out, csv);
    meta["outputs"] = {{"rows", r.count}, {"columns", header}, {"csv", out}};
    meta["provenance"] = provenance("sweep");
    write_file(out + ".json", meta.dump(2) + "\n");
  } else {
    json table = json::array();
    for (const SweepRow& row : rows) {
      json o;
      for (std::size_t c = 0; c < header.size(); ++c) o[header[c]] = std::stod(row.cells[c]);
      table.push_back(o);
    }
    meta["outputs"] = {{"rows", table}};
    meta["provenance"] = provenance("sweep");
    if (out.empty())
      std::cout << meta.dump(2) << "\n";
    else
      write_file(out, meta.dump(2) + "\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral instability of small-amplitude Stokes waves"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  double kappa = 1.0, sigma = 0.0, eps = 0.001;
  int order = 2, samples = 201, threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string sigma_s = "0", which = "both", out, range, format = "csv";
  std::vector<std::string> targets{"ind1"};
  bool as_json = false;

  auto* disp = app.add_subcommand("dispersion", "roots k_j(sigma) of the dispersion relation");
  disp->add_option("--kappa", kappa)->required();
  disp->add_option("--sigma", sigma)->required();

  auto* stokes = app.add_subcommand("stokes", "Stokes expansion coefficients");
  stokes->add_option("--kappa", kappa)->required();
  int stokes_order = 3;
  stokes->add_option("--order", stokes_order, "1..3");

  auto* mono = app.add_subcommand("monodromy", "monodromy coefficients a^(m,n)(T)");
  mono->add_option("--kappa", kappa)->required();
  mono->add_option("--sigma", sigma_s, "value or res:N");
  mono->add_option("--order", order, "0..2");

  auto* idx = app.add_subcommand("indices", "instability indices");
  idx->add_option("--kappa", kappa);
  idx->add_option("--which", which, "ind1|ind2|both");
  idx->require_subcommand(0, 1);
  auto* fk1 = idx->add_subcommand("find-kappa1", "zero of ind1");
  fk1->add_flag("--json", as_json);
  auto* fk2 = idx->add_subcommand("find-kappa2", "zero of ind2");
  fk2->add_flag("--json", as_json);

  auto* spec = app.add_subcommand("spectrum", "spectrum tracing");
  spec->require_subcommand(1);
  auto* bub = spec->add_subcommand("bubble", "high-frequency instability bubble");
  bub->add_option("--kappa", kappa)->required();
  bub->add_option("--eps", eps)->required();
  bub->add_option("--out", out, "CSV path; a JSON sidecar is written next to it")->required();
  bub->add_option("--samples", samples);

  auto* sweep = app.add_subcommand("sweep", "kappa sweep");
  sweep->add_option("--kappa", range, "lo:hi:count")->required();
  sweep->add_option("--targets", targets, "ind1 ind2 resonances bubble")->delimiter(',');
  sweep->add_option("--eps", eps);
  sweep->add_option("--out", out);
  sweep->add_option("--format", format, "csv|json");
  sweep->add_option("--threads", threads);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*disp) {
      run_dispersion(kappa, sigma);
    } else if (*stokes) {
      run_stokes(kappa, stokes_order);
    } else if (*mono) {
      run_monodromy(kappa, sigma_s, order);
    } else if (*idx) {
      if (*fk1)
        print_root("kappa1", find_kappa1(), as_json);
      else if (*fk2)
        print_root("kappa2", find_kappa2(), as_json);
      else if (idx->count("--kappa") == 0)
        throw usage_error("indices needs --kappa or a find-kappa subcommand");
      else
        run_indices(kappa, which);
    } else if (*bub) {
      run_bubble(kappa, eps, out, samples);
    } else if (*sweep) {
      run_sweep(range, targets, eps, out, format, threads);
    }
  } catch (const usage_error& e) {
    std::cerr << "usage: " << e.what() << "\nRun with --help for more information.\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "consistency error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
