#include "rauzylab/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rauzylab/config.hpp"
#include "rauzylab/dynamics.hpp"
#include "rauzylab/errors.hpp"
#include "rauzylab/quasirandom.hpp"
#include "rauzylab/rvgroup.hpp"
#include "rauzylab/transfer.hpp"

namespace rauzylab {

namespace {

struct CommandContext {
  ExperimentConfig cfg;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
  std::chrono::steady_clock::time_point start;

  RunManifest manifest() const {
    RunManifest m;
    m.config_hash = config_hash_hex(cfg);
    m.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - start)
                    .count();
    return m;
  }
};

PathSelection resolve_selection(const ExperimentConfig& cfg) {
  PermutationPair base = parse_pair(cfg.class_spec);
  RauzyClass cls = rauzy_class(base);
  if (cfg.gamma0_spec == "auto") return build_gamma0(cls, base, {});
  if (cfg.gamma0_spec == "tree")
    return build_gamma0(cls, base, spanning_tree_loops(cls, base));
  RauzyPath path = parse_path(cfg.gamma0_spec);
  if (!(path.start == base))
    fail(ErrorKind::ValidationError, "gamma0 does not start at the class");
  if (!is_strongly_positive(path) || !is_neat(path))
    fail(ErrorKind::ValidationError,
         "gamma0 must be strongly positive and neat");
  PathSelection sel;
  sel.gamma0 = std::move(path);
  return sel;
}

FlowSystem resolve_flow(const ExperimentConfig& cfg) {
  FlowSystem sys = make_flow_system(resolve_selection(cfg));
  sys.step_budget = cfg.step_budget;
  return sys;
}

std::string format_double(double v) {
  std::ostringstream s;
  s.precision(12);
  s << v;
  return s.str();
}

// ---- optional binary cache keyed by the config hash ----

std::filesystem::path cache_path(const std::string& kind,
                                 const ExperimentConfig& cfg) {
  const char* dir = std::getenv("RAUZY_LAB_CACHE");
  if (!dir || !*dir) return {};
  return std::filesystem::path(dir) /
         (kind + "_" + config_hash_hex(cfg) + ".bin");
}

bool cache_load_closure(const std::filesystem::path& p, std::uint64_t& size,
                        bool& surjective) {
  if (p.empty()) return false;
  std::ifstream in(p, std::ios::binary);
  if (!in) return false;
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "RZC1") return false;
  std::uint8_t s8 = 0;
  in.read(reinterpret_cast<char*>(&s8), 1);
  in.read(reinterpret_cast<char*>(&size), sizeof(size));
  if (!in) return false;
  surjective = s8 != 0;
  return true;
}

void cache_store_closure(const std::filesystem::path& p, std::uint64_t size,
                         bool surjective) {
  if (p.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary);
  if (!out) return;
  out.write("RZC1", 4);
  std::uint8_t s8 = surjective ? 1 : 0;
  out.write(reinterpret_cast<const char*>(&s8), 1);
  out.write(reinterpret_cast<const char*>(&size), sizeof(size));
}

// ---- subcommand bodies ----

int cmd_rauzy_class(CommandContext& ctx, const std::string& export_file) {
  RauzyClass cls = rauzy_class(parse_pair(ctx.cfg.class_spec));
  if (!export_file.empty()) {
    std::ofstream f(export_file);
    if (!f) fail(ErrorKind::ValidationError, "cannot open " + export_file);
    f << ctx.manifest().header_comment() << "\n" << cls.export_edges();
  }
  *ctx.out << "vertices=" << cls.vertices.size()
           << " arrows=" << cls.arrows.size() << "\n";
  return 0;
}

int cmd_rauzy_gamma0(CommandContext& ctx, const std::string& upsilon_mode) {
  PermutationPair base = parse_pair(ctx.cfg.class_spec);
  RauzyClass cls = rauzy_class(base);
  std::vector<RauzyPath> upsilon0;
  if (upsilon_mode == "tree")
    upsilon0 = spanning_tree_loops(cls, base);
  else if (upsilon_mode != "none")
    fail(ErrorKind::ValidationError, "upsilon must be 'none' or 'tree'");
  PathSelection sel = build_gamma0(cls, base, upsilon0);
  bool avoided = true;
  for (const auto& g : sel.upsilon)
    if (!contains_subpath(g, sel.gamma0).empty()) avoided = false;
  *ctx.out << "gamma0=" << sel.gamma0.to_text()
           << " length=" << sel.gamma0.length()
           << " strongly_positive=" << std::boolalpha
           << is_strongly_positive(sel.gamma0)
           << " neat=" << is_neat(sel.gamma0) << " avoided=" << avoided
           << "\n";
  return 0;
}

int cmd_rvgroup_modq(CommandContext& ctx) {
  long long q = ctx.cfg.q_list.front();
  auto path = cache_path("modq", ctx.cfg);
  std::uint64_t size = 0;
  bool surjective = false;
  if (!cache_load_closure(path, size, surjective)) {
    PermutationPair base = parse_pair(ctx.cfg.class_spec);
    RauzyClass cls = rauzy_class(base);
    SymplecticBasis basis = symplectic_basis(base);
    std::vector<SpElement> gens;
    for (auto& loop : spanning_tree_loops(cls, base))
      gens.push_back(induced_sp(loop, basis));
    auto [sz, onto] = mod_q_closure(gens, basis.genus, q, ctx.cfg.closure_cap);
    size = sz.convert_to<std::uint64_t>();
    surjective = onto;
    cache_store_closure(path, size, surjective);
  }
  *ctx.out << "size=" << size << " surjective=" << std::boolalpha
           << surjective << "\n";
  return 0;
}

int cmd_rvgroup_gap(CommandContext& ctx) {
  long long q = ctx.cfg.q_list.front();
  PermutationPair base = parse_pair(ctx.cfg.class_spec);
  RauzyClass cls = rauzy_class(base);
  SymplecticBasis basis = symplectic_basis(base);
  std::vector<SpElement> gens;
  for (auto& loop : spanning_tree_loops(cls, base))
    gens.push_back(induced_sp(loop, basis));
  CayleyGap gap =
      cayley_gap(gens, basis.genus, q, ctx.cfg.seed, ctx.cfg.closure_cap);
  *ctx.out << "lambda1=" << format_double(gap.lambda1) << "\n";
  return 0;
}

int cmd_flow_sample(CommandContext& ctx) {
  if (ctx.cfg.out.empty())
    fail(ErrorKind::ValidationError, "flow sample needs --out");
  FlowSystem sys = resolve_flow(ctx.cfg);
  long long q = ctx.cfg.q_list.front();
  std::ofstream f(ctx.cfg.out);
  if (!f) fail(ErrorKind::ValidationError, "cannot open " + ctx.cfg.out);
  f << ctx.manifest().header_comment() << "\n";
  f << "return_index,roof,cocycle,lambda\n";
  f.precision(17);
  std::size_t index = 0;
  orbit_run(ctx.cfg.seed, ctx.cfg.samples, sys, [&](const ReturnRecord& rec) {
    SpElement c = reduce_mod(rec.cocycle, q);
    f << index++ << "," << rec.roof << ",";
    for (std::size_t i = 0; i < c.m.rows(); ++i)
      for (std::size_t j = 0; j < c.m.cols(); ++j) {
        if (i || j) f << ':';
        f << c.m.at(i, j);
      }
    f << ",";
    const auto& lam = rec.endpoint.datum.lambda;
    for (std::size_t i = 0; i < lam.size(); ++i) {
      if (i) f << ';';
      f << lam[i];
    }
    f << "\n";
  });
  *ctx.out << "written=" << ctx.cfg.out << " returns=" << ctx.cfg.samples
           << "\n";
  return 0;
}

std::vector<double> read_roof_column(const std::string& file) {
  std::ifstream f(file);
  if (!f) fail(ErrorKind::ValidationError, "cannot open " + file);
  std::vector<double> roofs;
  std::string line;
  int roof_col = -1;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (roof_col < 0) {
      for (std::size_t i = 0; i < cells.size(); ++i)
        if (cells[i] == "roof") roof_col = static_cast<int>(i);
      if (roof_col < 0)
        fail(ErrorKind::ParseError, "csv lacks a 'roof' column");
      continue;
    }
    if (static_cast<int>(cells.size()) <= roof_col)
      fail(ErrorKind::ParseError, "short csv row");
    roofs.push_back(std::stod(cells[roof_col]));
  }
  return roofs;
}

int cmd_flow_tails(CommandContext& ctx, const std::string& input) {
  std::vector<double> roofs;
  if (!input.empty()) {
    roofs = read_roof_column(input);
  } else {
    FlowSystem sys = resolve_flow(ctx.cfg);
    orbit_run(ctx.cfg.seed, ctx.cfg.samples, sys,
              [&](const ReturnRecord& rec) { roofs.push_back(rec.roof); });
  }
  TailFit fit = roof_tail_stats(std::move(roofs));
  *ctx.out << "slope=" << format_double(fit.slope)
           << " r2=" << format_double(fit.r2)
           << " min_roof=" << format_double(fit.min_roof) << " n=" << fit.n
           << "\n";
  return 0;
}

int cmd_flow_cocycle_dist(CommandContext& ctx) {
  FlowSystem sys = resolve_flow(ctx.cfg);
  long long q = ctx.cfg.q_list.front();
  CocycleHistogram hist =
      cocycle_distribution(ctx.cfg.seed, ctx.cfg.samples, sys, q);
  if (!ctx.cfg.out.empty()) {
    std::ofstream f(ctx.cfg.out);
    if (!f) fail(ErrorKind::ValidationError, "cannot open " + ctx.cfg.out);
    f << ctx.manifest().header_comment() << "\n";
    f << "group_index,count\n";
    for (std::size_t i = 0; i < hist.counts.size(); ++i)
      f << i << "," << hist.counts[i] << "\n";
  }
  *ctx.out << "chi2=" << format_double(hist.chi2) << " dof=" << hist.dof
           << " p=" << format_double(hist.p_value) << "\n";
  return 0;
}

int cmd_flow_correlate(CommandContext& ctx, double t) {
  FlowSystem sys = resolve_flow(ctx.cfg);
  long long q = ctx.cfg.q_list.front();
  FiniteGroup group = fiber_group(sys, q, ctx.cfg.closure_cap);
  const double inv_n = 1.0 / static_cast<double>(group.size());
  // mean-zero indicator of the identity fiber
  FiberObservable obs = [inv_n](const SectionPoint&, std::size_t g) {
    return (g == 0 ? 1.0 : 0.0) - inv_n;
  };
  double estimate = correlation_estimate(obs, obs, t, ctx.cfg.seed,
                                         ctx.cfg.samples, sys, q);
  *ctx.out << "estimate=" << format_double(estimate) << " t=" << t << "\n";
  return 0;
}

int cmd_transfer_rpf(CommandContext& ctx, double sigma) {
  TransferConfig config = make_transfer_config(
      resolve_selection(ctx.cfg), ctx.cfg.grid, ctx.cfg.cutoff, sigma);
  RPFData rpf = rpf_leading(config, sigma);
  *ctx.out << "lambda=" << format_double(rpf.lambda_sigma)
           << " residual=" << format_double(rpf.residual)
           << " tail_bound=" << format_double(config.tail_bound)
           << " branches=" << config.branches.size()
           << " markoff_defect=" << format_double(markoff_defect(config, rpf,
                                                                 sigma))
           << "\n";
  return 0;
}

int cmd_transfer_decay(CommandContext& ctx, const std::string& s_text,
                       std::size_t kmax, const std::string& subspace_name) {
  double sigma = 0.0, t = 0.0;
  {
    auto comma = s_text.find(',');
    try {
      if (comma == std::string::npos) {
        sigma = std::stod(s_text);
      } else {
        sigma = std::stod(s_text.substr(0, comma));
        t = std::stod(s_text.substr(comma + 1));
      }
    } catch (const std::exception&) {
      fail(ErrorKind::ParseError, "--s expects 'sigma,t'");
    }
  }
  FiberSubspace subspace;
  if (subspace_name == "full")
    subspace = FiberSubspace::Full;
  else if (subspace_name == "mean_zero")
    subspace = FiberSubspace::MeanZero;
  else if (subspace_name == "new")
    subspace = FiberSubspace::New;
  else
    fail(ErrorKind::ValidationError, "subspace must be full|mean_zero|new");

  PathSelection sel = resolve_selection(ctx.cfg);
  TransferConfig config =
      make_transfer_config(sel, ctx.cfg.grid, ctx.cfg.cutoff, sigma, t);
  RPFData rpf = rpf_leading(config, sigma);
  long long q = ctx.cfg.q_list.front();
  FlowSystem sys = make_flow_system(sel);
  FiniteGroup group = fiber_group(sys, q, ctx.cfg.closure_cap);
  DecayReport report =
      twisted_radius(config, rpf, group, kmax, subspace, ctx.cfg.seed);

  std::ostream* csv = ctx.out;
  std::ofstream file;
  if (!ctx.cfg.out.empty()) {
    file.open(ctx.cfg.out);
    if (!file) fail(ErrorKind::ValidationError, "cannot open " + ctx.cfg.out);
    file << ctx.manifest().header_comment() << "\n";
    csv = &file;
  }
  *csv << "k,norm\n";
  for (std::size_t k = 0; k < report.norms.size(); ++k)
    *csv << k << "," << format_double(report.norms[k]) << "\n";
  *ctx.out << "rate=" << format_double(report.rate)
           << " residual=" << format_double(report.rpf_residual)
           << " tail_bound=" << format_double(report.tail_bound) << "\n";
  return 0;
}

int cmd_qr_bound(CommandContext& ctx, std::size_t genus) {
  DimBound b = min_dim_bound(ctx.cfg.q_list.front(), genus);
  const char* method = b.method == DimBoundMethod::PrimeExact
                           ? "prime_exact"
                           : (b.method == DimBoundMethod::PrimePowerOrbit
                                  ? "prime_power_orbit"
                                  : "crt_composite");
  *ctx.out << "bound=" << b.bound << " method=" << method << "\n";
  return 0;
}

int cmd_qr_dims(CommandContext& ctx, std::size_t genus) {
  long long q = ctx.cfg.q_list.front();
  auto dims = dixon_dims(q, genus, ctx.cfg.group_cap);
  *ctx.out << "dims=";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) *ctx.out << ',';
    *ctx.out << dims[i];
  }
  *ctx.out << " min_new=" << min_new_dim(q, genus, ctx.cfg.group_cap) << "\n";
  return 0;
}

int cmd_qr_orbit(CommandContext& ctx, long long p, int r, std::size_t genus,
                 const std::string& matrix_text) {
  LieAlgebraElement x =
      make_lie_element(p, r, genus, BigMatrix::from_text(matrix_text));
  *ctx.out << "orbit=" << adjoint_orbit_size(x, ctx.cfg.group_cap) << "\n";
  return 0;
}

int cmd_qr_decouple(CommandContext& ctx, std::size_t L, std::size_t K) {
  PathSelection sel = resolve_selection(ctx.cfg);
  TransferConfig config =
      make_transfer_config(sel, ctx.cfg.grid, ctx.cfg.cutoff, 0.0);
  RPFData rpf = rpf_leading(config, 0.0);
  FiniteGroup group =
      sp_group(config.basis.genus, ctx.cfg.q_list.front(), ctx.cfg.group_cap);
  DecouplingReport rep =
      decoupling_check(config, rpf, group, L, K, ctx.cfg.seed);
  *ctx.out << "dominated=" << std::boolalpha << rep.dominated
           << " c=" << format_double(rep.c_deviation)
           << " B=" << format_double(rep.measured_b)
           << " rate=" << format_double(rep.conv_rate)
           << " block_rate=" << format_double(rep.block_rate)
           << " tuples=" << rep.tuple_count << "\n";
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err) {
  CommandContext ctx;
  ctx.out = &out;
  ctx.err = &err;
  ctx.start = std::chrono::steady_clock::now();

  CLI::App app{"exact and numerical toolkit for Rauzy-Veech dynamics"};
  app.name("rauzylab");
  app.require_subcommand(1);

  std::string config_file;
  app.add_option("--config", config_file, "key=value configuration file");

  // shared options bound straight into the config; subcommands pick what
  // they need
  auto add_common = [&](CLI::App* cmd, bool pair_opt = true) {
    if (pair_opt)
      cmd->add_option("--pair,--class", ctx.cfg.class_spec,
                      "permutation pair, e.g. AB/BA or top=AB;bottom=BA");
    cmd->add_option("--seed", ctx.cfg.seed, "rng seed");
    cmd->add_option("--threads", ctx.cfg.threads, "worker cap");
    cmd->add_option("--out", ctx.cfg.out, "output file");
    return cmd;
  };

  // rauzy
  auto* rauzy = app.add_subcommand("rauzy", "combinatorial layer");
  std::string export_file;
  auto* rauzy_class_cmd =
      add_common(rauzy->add_subcommand("class", "BFS the Rauzy class"));
  rauzy_class_cmd->add_option("--export", export_file, "edge list file");
  std::string upsilon_mode = "tree";
  auto* rauzy_gamma0_cmd = add_common(
      rauzy->add_subcommand("gamma0", "construct the base loop gamma0"));
  rauzy_gamma0_cmd->add_option("--upsilon", upsilon_mode, "none or tree");

  // rvgroup
  auto* rvgroup = app.add_subcommand("rvgroup", "Rauzy-Veech group layer");
  auto* modq_cmd =
      add_common(rvgroup->add_subcommand("modq", "mod-q closure size"));
  modq_cmd->add_option("--q", ctx.cfg.q_list, "modulus")->required();
  modq_cmd->add_option("--cap", ctx.cfg.closure_cap, "closure cap");
  auto* gap_cmd =
      add_common(rvgroup->add_subcommand("gap", "Cayley spectral gap"));
  gap_cmd->add_option("--q", ctx.cfg.q_list, "modulus")->required();

  // flow
  auto* flow = app.add_subcommand("flow", "suspension flow layer");
  std::string gamma0_spec = "auto";
  double corr_t = 1.0;
  std::string tails_input;
  auto* sample_cmd =
      add_common(flow->add_subcommand("sample", "sample return records"));
  sample_cmd->add_option("--gamma0", ctx.cfg.gamma0_spec,
                         "auto | tree | path text");
  sample_cmd->add_option("--q", ctx.cfg.q_list, "modulus");
  sample_cmd->add_option("--n", ctx.cfg.samples, "number of returns");
  sample_cmd->add_option("--budget", ctx.cfg.step_budget, "step budget");
  auto* tails_cmd =
      add_common(flow->add_subcommand("tails", "roof tail statistics"));
  tails_cmd->add_option("--in", tails_input, "csv from flow sample");
  tails_cmd->add_option("--gamma0", ctx.cfg.gamma0_spec);
  tails_cmd->add_option("--n", ctx.cfg.samples);
  auto* dist_cmd = add_common(
      flow->add_subcommand("cocycle-dist", "mod-q cocycle histogram"));
  dist_cmd->add_option("--q", ctx.cfg.q_list);
  dist_cmd->add_option("--n", ctx.cfg.samples);
  dist_cmd->add_option("--gamma0", ctx.cfg.gamma0_spec);
  auto* corr_cmd = add_common(
      flow->add_subcommand("correlate", "fiber correlation estimate"));
  corr_cmd->add_option("--t", corr_t, "flow time");
  corr_cmd->add_option("--q", ctx.cfg.q_list);
  corr_cmd->add_option("--n", ctx.cfg.samples);
  corr_cmd->add_option("--gamma0", ctx.cfg.gamma0_spec);

  // transfer
  auto* transfer = app.add_subcommand("transfer", "transfer operator layer");
  double sigma = 0.0;
  std::string s_text = "0,0";
  std::size_t kmax = 12;
  std::string subspace_name = "mean_zero";
  auto* rpf_cmd =
      add_common(transfer->add_subcommand("rpf", "leading RPF data"));
  rpf_cmd->add_option("--sigma", sigma, "real weight exponent");
  rpf_cmd->add_option("--grid", ctx.cfg.grid, "simplex subdivisions");
  rpf_cmd->add_option("--cutoff", ctx.cfg.cutoff, "branch norm cutoff");
  rpf_cmd->add_option("--gamma0", ctx.cfg.gamma0_spec);
  auto* decay_cmd = add_common(
      transfer->add_subcommand("decay", "twisted operator norm decay"));
  decay_cmd->add_option("--q", ctx.cfg.q_list);
  decay_cmd->add_option("--s", s_text, "sigma,t");
  decay_cmd->add_option("--kmax", kmax, "iterations");
  decay_cmd->add_option("--subspace", subspace_name, "full|mean_zero|new");
  decay_cmd->add_option("--grid", ctx.cfg.grid);
  decay_cmd->add_option("--cutoff", ctx.cfg.cutoff);
  decay_cmd->add_option("--gamma0", ctx.cfg.gamma0_spec);

  // quasirandom
  auto* qr = app.add_subcommand("quasirandom", "finite group layer");
  std::size_t genus = 1;
  long long orbit_p = 3;
  int orbit_r = 1;
  std::string orbit_x = "0,1;0,0";
  std::size_t dec_l = 2, dec_k = 2;
  auto* bound_cmd =
      add_common(qr->add_subcommand("bound", "minimal new dimension bound"),
                 false);
  bound_cmd->add_option("--q", ctx.cfg.q_list)->required();
  bound_cmd->add_option("--g", genus, "genus");
  auto* dims_cmd = add_common(
      qr->add_subcommand("dims", "Dixon irreducible dimensions"), false);
  dims_cmd->add_option("--q", ctx.cfg.q_list)->required();
  dims_cmd->add_option("--g", genus);
  dims_cmd->add_option("--cap", ctx.cfg.group_cap);
  auto* orbit_cmd = add_common(
      qr->add_subcommand("orbit", "adjoint orbit size"), false);
  orbit_cmd->add_option("--p", orbit_p, "odd prime")->required();
  orbit_cmd->add_option("--R", orbit_r, "power");
  orbit_cmd->add_option("--g", genus);
  orbit_cmd->add_option("--x", orbit_x, "matrix text");
  auto* dec_cmd = add_common(
      qr->add_subcommand("decouple", "decoupling majorization check"));
  dec_cmd->add_option("--L", dec_l, "block length")->required();
  dec_cmd->add_option("--K", dec_k, "block count")->required();
  dec_cmd->add_option("--q", ctx.cfg.q_list)->required();
  dec_cmd->add_option("--grid", ctx.cfg.grid);
  dec_cmd->add_option("--cutoff", ctx.cfg.cutoff);
  dec_cmd->add_option("--gamma0", ctx.cfg.gamma0_spec);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    // load config file defaults first, then let flags override
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
      if (args[i] == "--config") {
        std::ifstream f(args[i + 1]);
        if (!f)
          fail(ErrorKind::ValidationError, "cannot open " + args[i + 1]);
        std::stringstream buf;
        buf << f.rdbuf();
        ctx.cfg = parse_config(buf.str());
      }
    app.parse(rev);

    if (rauzy_class_cmd->parsed()) return cmd_rauzy_class(ctx, export_file);
    if (rauzy_gamma0_cmd->parsed())
      return cmd_rauzy_gamma0(ctx, upsilon_mode);
    if (modq_cmd->parsed()) return cmd_rvgroup_modq(ctx);
    if (gap_cmd->parsed()) return cmd_rvgroup_gap(ctx);
    if (sample_cmd->parsed()) return cmd_flow_sample(ctx);
    if (tails_cmd->parsed()) return cmd_flow_tails(ctx, tails_input);
    if (dist_cmd->parsed()) return cmd_flow_cocycle_dist(ctx);
    if (corr_cmd->parsed()) return cmd_flow_correlate(ctx, corr_t);
    if (rpf_cmd->parsed()) return cmd_transfer_rpf(ctx, sigma);
    if (decay_cmd->parsed())
      return cmd_transfer_decay(ctx, s_text, kmax, subspace_name);
    if (bound_cmd->parsed()) return cmd_qr_bound(ctx, genus);
    if (dims_cmd->parsed()) return cmd_qr_dims(ctx, genus);
    if (orbit_cmd->parsed())
      return cmd_qr_orbit(ctx, orbit_p, orbit_r, genus, orbit_x);
    if (dec_cmd->parsed()) return cmd_qr_decouple(ctx, dec_l, dec_k);
    err << "error: no subcommand selected\n";
    return 2;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help and friends print through CLI11
      std::ostringstream help;
      help << app.help();
      out << help.str();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.is_resource_error() ? 3 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

int run_command(const std::vector<std::string>& args) {
  return run_command(args, std::cout, std::cerr);
}

}  // namespace rauzylab
