// Command-line interface to the stripe-energy toolkit: critical couplings,
// torus energies and their slicewise decomposition, optimal stripe widths,
// exhaustive and annealed ground-state searches, stripe scans, region maps,
// checkerboard refinement comparisons, and the inequality report.
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "stripes/diagnostics.hpp"
#include "stripes/energy.hpp"
#include "stripes/kernels.hpp"
#include "stripes/lattice.hpp"
#include "stripes/numerics.hpp"
#include "stripes/search.hpp"
#include "stripes/stripes1d.hpp"

namespace {

using nlohmann::ordered_json;
using namespace stripes;

// JSON has no literal for infinities (nlohmann serializes them as null);
// report files spell them out instead.
ordered_json json_number(double v) {
  if (std::isfinite(v)) return v;
  if (v > 0) return "inf";
  if (v < 0) return "-inf";
  return "nan";
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(15);
  os << v;
  return os.str();
}

std::string grid_string(const TorusConfig& cfg) {
  std::ostringstream os;
  write_grid(cfg, os);
  return os.str();
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(out_path);
  if (!os) throw std::invalid_argument("cannot open output file: " + out_path);
  os << text;
}

KernelFamily parse_family(const std::string& name) {
  if (name == "onenorm") return KernelFamily::OneNorm;
  if (name == "euclidean") return KernelFamily::Euclidean;
  throw std::invalid_argument("unknown kernel family: " + name);
}

ConvPath parse_path(const std::string& name) {
  if (name == "auto") return ConvPath::Auto;
  if (name == "direct") return ConvPath::Direct;
  if (name == "fft") return ConvPath::Fft;
  throw std::invalid_argument("unknown convolution path: " + name);
}

const char* method_name(SearchMethod m) {
  switch (m) {
    case SearchMethod::Exhaustive:
      return "exhaustive";
    case SearchMethod::Anneal:
      return "anneal";
    case SearchMethod::StripeScan:
      return "stripe_scan";
  }
  return "unknown";
}

ordered_json report_json(const SearchReport& rep) {
  ordered_json j;
  j["method"] = method_name(rep.method);
  j["best_energy"] = json_number(rep.best_energy);
  j["visited"] = rep.visited;
  j["minimizer_count"] = rep.minimizers.size();
  j["is_stripe"] = rep.is_stripe;
  if (rep.stripe_spec) {
    j["stripe_spec"] = {{"direction", rep.stripe_spec->direction},
                        {"width", rep.stripe_spec->width},
                        {"phase", rep.stripe_spec->phase}};
  }
  ordered_json grids = ordered_json::array();
  for (const TorusConfig& cfg : rep.minimizers) grids.push_back(grid_string(cfg));
  j["minimizers"] = grids;
  return j;
}

struct JcArgs {
  int d = 1;
  double p = 3;
  double tol = 1e-8;
  bool continuum = false;
};

int cmd_jc(const JcArgs& a) {
  const double v = a.continuum ? jc_continuum(a.d, a.p) : jc_dsc(a.d, a.p, a.tol);
  std::cout << format_number(v) << "\n";
  return 0;
}

struct EvalArgs {
  std::string in;
  double J = 0;
  double p = 4;
  double tol = 1e-12;
  std::string path = "auto";
};

int cmd_eval(const EvalArgs& a) {
  const TorusConfig cfg = read_grid_file(a.in);
  if (std::fabs(cfg.spacing - 1.0) > 1e-12)
    throw std::invalid_argument("eval expects a unit-spacing grid");
  const KernelSpec flat(cfg.d, a.p, 0.0, KernelFamily::Euclidean);
  const PeriodizedKernel w = periodize(flat, cfg.side(), 1.0, a.tol);
  const double e = energy_dsc(cfg, a.J, w, parse_path(a.path));
  std::cout << format_number(e) << "\n";
  return 0;
}

struct DecomposeArgs {
  std::string in;
  double p = 4;
  double tau = 0;
  std::string family = "onenorm";
  std::string out;
  bool csv = false;
};

int cmd_decompose(const DecomposeArgs& a) {
  const TorusConfig cfg = read_grid_file(a.in);
  const KernelSpec spec(cfg.d, a.p, a.tau, parse_family(a.family));
  const EnergyBreakdown bd = decompose(cfg, spec);
  const auto fields = breakdown_fields(bd);
  std::ostringstream os;
  if (a.csv) {
    for (std::size_t i = 0; i < fields.size(); ++i)
      os << fields[i].first << (i + 1 < fields.size() ? "," : "\n");
    for (std::size_t i = 0; i < fields.size(); ++i)
      os << format_number(fields[i].second)
         << (i + 1 < fields.size() ? "," : "\n");
  } else {
    ordered_json j;
    for (const auto& [name, value] : fields) j[name] = json_number(value);
    os << j.dump(2) << "\n";
  }
  emit(os.str(), a.out);
  return 0;
}

struct StripesArgs {
  int d = 1;
  std::vector<double> p{3.0};
  std::vector<double> tau{0.0};
  std::string out;
};

int cmd_stripes(const StripesArgs& a) {
  std::ostringstream os;
  os << "tau,p,d,h_star,c_star,second_derivative\n";
  for (double tau : a.tau)
    for (double p : a.p) {
      const KernelSpec spec(a.d, p, tau, KernelFamily::OneNorm);
      const StripeOptimum so = optimal_h(spec);
      os << format_number(tau) << "," << format_number(p) << "," << a.d << ","
         << format_number(so.h_star) << "," << format_number(so.c_star) << ","
         << format_number(so.second_derivative) << "\n";
    }
  emit(os.str(), a.out);
  return 0;
}

struct SearchArgs {
  int d = 1;
  int n = 8;
  double p = 3;
  double J = 0;
  bool has_j = false;
  double tau = 0;
  std::string out;
};

int cmd_search(const SearchArgs& a) {
  SearchReport rep;
  if (a.tau > 0) {
    const KernelSpec spec(a.d, a.p, a.tau, KernelFamily::Euclidean);
    rep = enumerate_ground_states(a.n, spec);
  } else {
    if (!a.has_j)
      throw std::invalid_argument(
          "search needs --J, or --tau > 0 for the rescaled energy");
    rep = enumerate_ground_states(a.d, a.n, a.J, a.p);
  }
  emit(report_json(rep).dump(2) + "\n", a.out);
  return 0;
}

struct ScanArgs {
  int d = 1;
  int n = 8;
  double p = 3;
  double tau = 0.5;
  std::string out;
};

int cmd_scan(const ScanArgs& a) {
  const KernelSpec spec(a.d, a.p, a.tau, KernelFamily::Euclidean);
  const SearchReport rep = stripe_scan(a.n, spec);
  emit(report_json(rep).dump(2) + "\n", a.out);
  return 0;
}

struct AnnealArgs {
  int d = 2;
  int n = 8;
  double p = 4;
  double tau = 0.5;
  double density = 0.5;
  std::string in;
  double t0 = 1.0;
  double cool = 0.999;
  long long steps = 100000;
  std::uint32_t seed = 0;
  std::string out;
};

int cmd_anneal(const AnnealArgs& a) {
  const KernelSpec spec(a.d, a.p, a.tau, KernelFamily::Euclidean);
  TorusConfig start;
  if (!a.in.empty()) {
    start = read_grid_file(a.in);
  } else {
    start = TorusConfig(a.d, a.n, spec.range());
    std::mt19937 rng(a.seed);
    std::bernoulli_distribution bit(a.density);
    for (auto& c : start.cells) c = bit(rng) ? 1 : 0;
  }
  const AnnealSchedule schedule{a.t0, a.cool, a.steps, a.seed};
  const SearchReport rep = anneal(start, spec, schedule);
  ordered_json j = report_json(rep);
  j["start"] = grid_string(start);
  j["schedule"] = {{"t0", a.t0},
                   {"cooling", a.cool},
                   {"steps", a.steps},
                   {"seed", a.seed}};
  emit(j.dump(2) + "\n", a.out);
  return 0;
}

struct RegionsArgs {
  std::string in;
  double p = 4;
  double tau = 0.5;
  double l = 2;
  double eta = 1;
  double delta = 0.1;
  double rho = 1;
  double m = 0;
  std::string out;
};

int cmd_regions(const RegionsArgs& a) {
  const TorusConfig cfg = read_grid_file(a.in);
  const KernelSpec spec(cfg.d, a.p, a.tau, KernelFamily::OneNorm);
  const RegionParams params{a.l, a.eta, a.delta, a.rho, a.m};
  const RegionMap map = region_decompose(cfg, params, spec);
  if (a.out.empty()) {
    write_region_map(map, std::cout);
  } else {
    write_region_map_file(map, a.out);
    for (int label = -1; label <= cfg.d; ++label)
      std::cout << "label " << region_label_char(label) << ": "
                << map.count(label) << " cells\n";
  }
  return 0;
}

struct ReportArgs {
  int n = 8;
  double p = 4;
  double tau = 0.5;
  std::uint32_t seed = 1;
  std::string out;
};

int cmd_report(const ReportArgs& a) {
  const KernelSpec spec(2, a.p, a.tau, KernelFamily::OneNorm);
  const VerificationReport rep = verification_report(spec, a.n, a.seed);
  emit(rep.text, a.out);
  for (const FittedBound& b : rep.items)
    if (!b.holds) return 2;
  return 0;
}

struct CheckerboardArgs {
  int n = 4;
  double kappa = 1;
  double p = 4;
  double tau = 0.5;
  int levels = 3;
  std::string out;
};

int cmd_checkerboard(const CheckerboardArgs& a) {
  const KernelSpec spec(2, a.p, a.tau, KernelFamily::OneNorm);
  const CheckerboardReport rep =
      checkerboard_report(2, a.n, a.kappa, spec, a.levels);
  ordered_json j;
  j["d"] = rep.d;
  j["n"] = rep.n;
  j["best_stripe_total"] = json_number(rep.best_stripe_total);
  j["best_stripe_width_cells"] = rep.best_stripe_width_cells;
  ordered_json levels = ordered_json::array();
  for (const CheckerboardLevel& lvl : rep.levels)
    levels.push_back({{"kappa", lvl.kappa},
                      {"n", lvl.n},
                      {"total", json_number(lvl.total)},
                      {"cross", json_number(lvl.cross)}});
  j["levels"] = levels;
  emit(j.dump(2) + "\n", a.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "stripetool: energies, decompositions, stripe optima, ground-state "
      "searches and window diagnostics on periodic lattice tori"};
  app.require_subcommand(1);

  JcArgs jc;
  CLI::App* jc_cmd =
      app.add_subcommand("jc", "critical coupling of the competition");
  jc_cmd->add_option("--d", jc.d, "dimension")->required();
  jc_cmd->add_option("--p", jc.p, "kernel exponent")->required();
  jc_cmd->add_option("--tol", jc.tol, "certified tolerance (lattice value)");
  jc_cmd->add_flag("--continuum", jc.continuum,
                   "print the continuum constant instead of the lattice one");

  EvalArgs ev;
  CLI::App* ev_cmd = app.add_subcommand(
      "eval", "total energy of a unit-spacing grid at coupling J");
  ev_cmd->add_option("--in", ev.in, "grid file")->required();
  ev_cmd->add_option("--J", ev.J, "perimeter coupling")->required();
  ev_cmd->add_option("--p", ev.p, "kernel exponent")->required();
  ev_cmd->add_option("--tol", ev.tol, "kernel periodization tolerance");
  ev_cmd->add_option("--path", ev.path, "pair-sum path")
      ->check(CLI::IsMember({"auto", "direct", "fft"}));

  DecomposeArgs dc;
  CLI::App* dc_cmd = app.add_subcommand(
      "decompose", "slicewise energy decomposition of a grid");
  dc_cmd->add_option("--in", dc.in, "grid file")->required();
  dc_cmd->add_option("--p", dc.p, "kernel exponent")->required();
  dc_cmd->add_option("--tau", dc.tau, "smoothing parameter");
  dc_cmd->add_option("--family", dc.family, "kernel family")
      ->check(CLI::IsMember({"onenorm", "euclidean"}));
  dc_cmd->add_option("--out", dc.out, "output file (default stdout)");
  dc_cmd->add_flag("--csv", dc.csv, "emit CSV instead of JSON");

  StripesArgs st;
  CLI::App* st_cmd = app.add_subcommand(
      "stripes", "optimal stripe widths over a tau/p sweep (CSV)");
  st_cmd->add_option("--d", st.d, "dimension");
  st_cmd->add_option("--p", st.p, "kernel exponents (repeatable)");
  st_cmd->add_option("--tau", st.tau, "smoothing values (repeatable)");
  st_cmd->add_option("--out", st.out, "output file (default stdout)");

  SearchArgs se;
  CLI::App* se_cmd = app.add_subcommand(
      "search", "exhaustive ground states (absolute J or rescaled via tau)");
  se_cmd->add_option("--d", se.d, "dimension")->required();
  se_cmd->add_option("--n", se.n, "cells per axis")->required();
  se_cmd->add_option("--p", se.p, "kernel exponent")->required();
  CLI::Option* jopt = se_cmd->add_option("--J", se.J, "perimeter coupling");
  se_cmd->add_option("--tau", se.tau,
                     "smoothing; > 0 selects the rescaled energy");
  se_cmd->add_option("--out", se.out, "output file (default stdout)");

  ScanArgs sc;
  CLI::App* sc_cmd = app.add_subcommand(
      "scan", "rescaled energies of all admissible stripe widths");
  sc_cmd->add_option("--d", sc.d, "dimension")->required();
  sc_cmd->add_option("--n", sc.n, "cells per axis")->required();
  sc_cmd->add_option("--p", sc.p, "kernel exponent")->required();
  sc_cmd->add_option("--tau", sc.tau, "smoothing parameter")->required();
  sc_cmd->add_option("--out", sc.out, "output file (default stdout)");

  AnnealArgs an;
  CLI::App* an_cmd = app.add_subcommand(
      "anneal", "Metropolis annealing of the rescaled energy");
  an_cmd->add_option("--d", an.d, "dimension (random start)");
  an_cmd->add_option("--n", an.n, "cells per axis (random start)");
  an_cmd->add_option("--p", an.p, "kernel exponent")->required();
  an_cmd->add_option("--tau", an.tau, "smoothing parameter")->required();
  an_cmd->add_option("--density", an.density, "random start fill fraction");
  an_cmd->add_option("--in", an.in, "start grid file (overrides --n)");
  an_cmd->add_option("--t0", an.t0, "initial temperature");
  an_cmd->add_option("--cool", an.cool, "geometric cooling factor");
  an_cmd->add_option("--steps", an.steps, "Metropolis proposals");
  an_cmd->add_option("--seed", an.seed, "RNG seed");
  an_cmd->add_option("--out", an.out, "output file (default stdout)");

  RegionsArgs rg;
  CLI::App* rg_cmd = app.add_subcommand(
      "regions", "stripe-direction region labels of a grid");
  rg_cmd->add_option("--in", rg.in, "grid file")->required();
  rg_cmd->add_option("--p", rg.p, "kernel exponent (bookkeeping only)");
  rg_cmd->add_option("--tau", rg.tau, "smoothing (bookkeeping only)");
  rg_cmd->add_option("--l", rg.l, "cube side");
  rg_cmd->add_option("--eta", rg.eta, "minimal stripe gap");
  rg_cmd->add_option("--delta", rg.delta, "closeness threshold");
  rg_cmd->add_option("--rho", rg.rho, "dilation radius of the far region");
  rg_cmd->add_option("--m", rg.m, "energy gate recorded in the map header");
  rg_cmd->add_option("--out", rg.out, "map file (default stdout)");

  ReportArgs rp;
  CLI::App* rp_cmd = app.add_subcommand(
      "report", "window-energy inequality report on seeded fixtures");
  rp_cmd->add_option("--n", rp.n, "torus cells per axis (even, 4..16)");
  rp_cmd->add_option("--p", rp.p, "kernel exponent");
  rp_cmd->add_option("--tau", rp.tau, "smoothing parameter");
  rp_cmd->add_option("--seed", rp.seed, "fixture seed");
  rp_cmd->add_option("--out", rp.out, "output file (default stdout)");

  CheckerboardArgs cb;
  CLI::App* cb_cmd = app.add_subcommand(
      "checkerboard", "checkerboard refinement versus best stripes");
  cb_cmd->add_option("--n", cb.n, "cells per axis")->required();
  cb_cmd->add_option("--kappa", cb.kappa, "base cell spacing");
  cb_cmd->add_option("--p", cb.p, "kernel exponent")->required();
  cb_cmd->add_option("--tau", cb.tau, "smoothing parameter")->required();
  cb_cmd->add_option("--levels", cb.levels, "refinement levels");
  cb_cmd->add_option("--out", cb.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    se.has_j = jopt->count() > 0;
    if (jc_cmd->parsed()) return cmd_jc(jc);
    if (ev_cmd->parsed()) return cmd_eval(ev);
    if (dc_cmd->parsed()) return cmd_decompose(dc);
    if (st_cmd->parsed()) return cmd_stripes(st);
    if (se_cmd->parsed()) return cmd_search(se);
    if (sc_cmd->parsed()) return cmd_scan(sc);
    if (an_cmd->parsed()) return cmd_anneal(an);
    if (rg_cmd->parsed()) return cmd_regions(rg);
    if (rp_cmd->parsed()) return cmd_report(rp);
    if (cb_cmd->parsed()) return cmd_checkerboard(cb);
  } catch (const tolerance_error& e) {
    std::cerr << "tolerance failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
