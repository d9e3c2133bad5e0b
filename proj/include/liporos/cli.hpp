#pragma once

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "liporos/io.hpp"
#include "liporos/report.hpp"
#include "liporos/verify.hpp"

namespace liporos::cli {

// Exit codes: 0 success, 2 input error, 3 assertion failure, 4 numeric or
// internal error.
enum ExitCode { exit_ok = 0, exit_input = 2, exit_assertion = 3, exit_numeric = 4 };

struct CommonOpts {
  std::string space_text = R"({"kind":"euclidean","dim":2,"p":2})";
  std::string input;
  std::string out;
  bool csv = false;
  double h = 0.0;  // 0 = per-command default
  std::uint64_t seed = 0;
  bool seed_set = false;
  double tol = 1e-10;
  bool tol_set = false;
};

namespace detail {

inline Space resolve_space(const CommonOpts& c, std::vector<InputRecord>& inputs) {
  std::string text = c.space_text;
  if (!text.empty() && text[0] == '@') {
    std::string path = text.substr(1);
    inputs.push_back(hash_input(path));
    text = read_file(path);
  }
  Space space = space_from_string(text);
  if (c.tol_set && space.kind() == SpaceKind::heisenberg) return Space::heisenberg(c.tol);
  return space;
}

inline void emit(const json& report, const std::string& out_path) {
  std::string text = report.dump(2);
  text.push_back('\n');
  if (out_path.empty())
    std::cout << text;
  else
    write_file(out_path, text);
}

/// Optional flat CSV companion for per-scale / per-record tables.
inline std::optional<std::string> flatten_csv(const std::string& command, const json& result) {
  std::ostringstream csv;
  csv.precision(17);
  if (command == "analyze-porosity") {
    csv << "scale,resolution,lambda_hat\n";
    for (const auto& sc : result["scales"])
      csv << sc["scale"].get<double>() << "," << sc["resolution"].get<double>() << ","
          << sc["lambda_hat"].get<double>() << "\n";
    return csv.str();
  }
  if (command == "density") {
    csv << "index,covering_radius,epsilon\n";
    const auto& cr = result["covering_radii"];
    const auto& ep = result["epsilons"];
    for (std::size_t i = 0; i < cr.size(); ++i)
      csv << i << "," << cr[i].get<double>() << "," << ep[i].get<double>() << "\n";
    return csv.str();
  }
  if (command == "example-squares") {
    csv << "n,hole_ratio,bound,holds\n";
    for (const auto& r : result["records"])
      csv << r["n"].get<std::size_t>() << "," << r["hole_ratio"].get<double>() << ","
          << r["bound"].get<double>() << "," << int(r["holds"].get<bool>()) << "\n";
    return csv.str();
  }
  return std::nullopt;
}

inline void emit_with_csv(const std::string& command, const json& config,
                          const std::vector<InputRecord>& inputs, json result,
                          const CommonOpts& c) {
  if (c.csv) {
    auto flat = flatten_csv(command, result);
    if (flat && !c.out.empty()) write_file(c.out + ".csv", *flat);
    if (flat && c.out.empty()) std::cout << *flat;
  }
  emit(make_report(command, config, inputs, std::move(result)), c.out);
}

inline std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (cell.empty()) continue;
    out.push_back(std::stod(cell));
  }
  if (out.empty()) throw input_error("expected a comma-separated list of numbers");
  return out;
}

inline Point parse_point(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_array()) throw input_error("expected a JSON array point");
  return j.get<Point>();
}

inline void require_seed(const CommonOpts& c, const char* command) {
  if (!c.seed_set)
    throw input_error(std::string(command) + ": --seed is mandatory for randomized commands");
}

}  // namespace detail

/// Builds and runs the command line. Returns the process exit code.
inline int run(const std::vector<std::string>& args) {
  CLI::App app{"liporos: porosity, Lipschitz extension and Kantorovich-Rubinstein toolkit"};
  app.set_config("--config", "", "TOML config file; flags given on the command line win");
  app.fallthrough();  // lets --config appear after the subcommand name

  CommonOpts c;
  double lp_skew = 0.0;

  auto add_common = [&](CLI::App* cmd, bool needs_input) {
    // The resolution flag is --h, so the help flag keeps only its long form.
    cmd->set_help_flag("--help", "print help and exit");
    cmd->add_option("--space", c.space_text,
                    "space descriptor JSON, or @file (default euclidean 2, l2)");
    if (needs_input) cmd->add_option("--input", c.input, "point cloud file (.csv or .json)")->required();
    cmd->add_option("--out", c.out, "report path (default: stdout)");
    cmd->add_flag("--csv", c.csv, "also emit a flattened CSV table");
    cmd->add_option("--h", c.h, "grid resolution (see per-command help)");
    cmd->add_option("--seed", c.seed, "random seed")->each([&](const std::string&) {
      c.seed_set = true;
    });
    cmd->add_option("--tol", c.tol, "solver tolerance override (Heisenberg spaces)")
        ->each([&](const std::string&) { c.tol_set = true; });
  };

  // analyze-porosity ----------------------------------------------------------
  auto* porosity_cmd = app.add_subcommand("analyze-porosity",
                                          "porosity profile across scales; --h is the h/r ratio");
  std::string scales_text;
  std::size_t probes = 8;
  bool small_scales_only = false;
  add_common(porosity_cmd, true);
  porosity_cmd->add_option("--scales", scales_text, "comma-separated probe radii")->required();
  porosity_cmd->add_option("--probes", probes, "probes per scale (default 8)");
  porosity_cmd->add_flag("--small-scales-only", small_scales_only,
                         "annotate the report as a small-scales-only reading");

  // density --------------------------------------------------------------------
  auto* density_cmd =
      app.add_subcommand("density", "covering radii along a ball sequence; --h is absolute");
  std::string balls_path;
  add_common(density_cmd, true);
  density_cmd->add_option("--balls", balls_path, "ball sequence JSON")->required();

  // extract-balls ---------------------------------------------------------------
  auto* extract_cmd = app.add_subcommand("extract-balls",
                                         "well-separated subsequence with certificate and trace");
  std::string candidates_path, x0_text;
  add_common(extract_cmd, true);
  extract_cmd->add_option("--candidates", candidates_path, "candidate balls + densities JSON")
      ->required();
  extract_cmd->add_option("--x0", x0_text, "base point as a JSON array")->required();

  // extend ------------------------------------------------------------------------
  auto* extend_cmd = app.add_subcommand("extend", "McShane inf-convolution extension");
  std::string values_path, queries_path, subset_path;
  double ext_L = 0.0;
  add_common(extend_cmd, true);
  extend_cmd->add_option("--values", values_path, "function values on the subdomain")->required();
  extend_cmd->add_option("--queries", queries_path, "query points (.csv or .json)")->required();
  extend_cmd->add_option("--subset", subset_path,
                         "JSON array of cloud indices forming the subdomain (default: all)");
  extend_cmd->add_option("--L", ext_L, "extension constant (default: exact Lipschitz norm)");

  // kr-norm -------------------------------------------------------------------------
  auto* kr_cmd = app.add_subcommand("kr-norm", "Kantorovich-Rubinstein norm of a molecule");
  std::string molecule_path;
  add_common(kr_cmd, true);
  kr_cmd->add_option("--molecule", molecule_path, "molecule JSON")->required();
  kr_cmd->add_option("--selftest-skew", lp_skew,
                     "testing aid: perturb the LP route to exercise the solver-disagreement path");

  // decompose --------------------------------------------------------------------------
  auto* dec_cmd = app.add_subcommand("decompose", "Kalton dyadic decomposition with layer norms");
  add_common(dec_cmd, true);
  dec_cmd->add_option("--molecule", molecule_path, "molecule JSON")->required();
  dec_cmd->add_option("--selftest-skew", lp_skew,
                      "testing aid: perturb the LP route to exercise the solver-disagreement path");

  // glue ----------------------------------------------------------------------------------
  auto* glue_cmd = app.add_subcommand("glue", "glue block functions over a separated family");
  std::string blocks_path;
  std::size_t x0_index = 0;
  double lambda_override = 0.0;
  add_common(glue_cmd, true);
  glue_cmd->add_option("--blocks", blocks_path, "JSON [{indices:[...], values:[...]}, ...]")
      ->required();
  glue_cmd->add_option("--x0-index", x0_index, "shared base point index")->required();
  glue_cmd->add_option("--lambda", lambda_override,
                       "separation constant (default: certified from the blocks)");

  // verify-suite ----------------------------------------------------------------------------
  auto* verify_cmd = app.add_subcommand("verify-suite", "run the whole verification battery");
  add_common(verify_cmd, false);

  // example ------------------------------------------------------------------------------------
  auto* example_cmd = app.add_subcommand("example", "worked examples and synthetic fixtures");
  example_cmd->require_subcommand(1);
  auto* ex_powers = example_cmd->add_subcommand("powers", "power lattice constants 4, 5, 1/5");
  std::size_t powers_N = 12;
  add_common(ex_powers, false);
  ex_powers->add_option("--N", powers_N, "truncation (default 12)");
  auto* ex_squares = example_cmd->add_subcommand("squares", "square lattice hole ratios <= 4/n");
  std::string squares_ns = "5,10,20";
  add_common(ex_squares, false);
  ex_squares->add_option("--n", squares_ns, "comma-separated n values");
  auto* ex_annuli = example_cmd->add_subcommand("annuli", "dyadic annuli, lambda >= 1/16");
  std::size_t annuli_nmax = 6, annuli_samples = 1000;
  add_common(ex_annuli, false);
  ex_annuli->add_option("--nmax", annuli_nmax, "number of annuli (default 6)");
  ex_annuli->add_option("--samples", annuli_samples, "samples per annulus (default 1000)");
  auto* ex_dust = example_cmd->add_subcommand("dust", "porous Cantor dust fixture");
  double dust_ratio = 0.25;
  std::size_t dust_depth = 6;
  add_common(ex_dust, false);
  ex_dust->add_option("--ratio", dust_ratio, "end-interval fraction (default 0.25)");
  ex_dust->add_option("--depth", dust_depth, "construction depth (default 6)");
  auto* ex_fat = example_cmd->add_subcommand("fatcantor", "positive-measure fat Cantor product");
  double fat_q = 0.25;
  std::size_t fat_depth = 6;
  add_common(ex_fat, false);
  ex_fat->add_option("--q", fat_q, "removed fraction base (default 0.25)");
  ex_fat->add_option("--depth", fat_depth, "construction depth (default 6)");

  app.require_subcommand(1);

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      std::cout << app.help() << std::endl;
      return exit_ok;
    }
    std::cerr << e.what() << std::endl;
    std::cout << json{{"error", {{"kind", "input"}, {"message", e.what()}}}}.dump(2) << std::endl;
    return exit_input;
  }

  std::vector<InputRecord> inputs;
  try {
    if (porosity_cmd->parsed()) {
      detail::require_seed(c, "analyze-porosity");
      Space space = detail::resolve_space(c, inputs);
      inputs.push_back(hash_input(c.input));
      PointCloud cloud = load_cloud(space, c.input);
      std::vector<double> scales = detail::parse_number_list(scales_text);
      double h_over_r = c.h > 0.0 ? c.h : 1.0 / 64.0;
      PorosityReport rep = porosity_profile(cloud, scales, probes, c.seed, h_over_r);
      rep.zajicek_small_scales = small_scales_only;
      json config{{"space", space_to_json(space)}, {"scales", scales},       {"probes", probes},
                  {"seed", c.seed},                {"h_over_r", h_over_r}};
      detail::emit_with_csv("analyze-porosity", config, inputs, porosity_report_to_json(rep), c);
    } else if (density_cmd->parsed()) {
      Space space = detail::resolve_space(c, inputs);
      inputs.push_back(hash_input(c.input));
      inputs.push_back(hash_input(balls_path));
      PointCloud cloud = load_cloud(space, c.input);
      BallSequence seq = ball_sequence_from_json(json::parse(read_file(balls_path)));
      json config{{"space", space_to_json(space)}, {"h", c.h}};
      json result;
      if (c.h > 0.0) {
        result = density_profile_to_json(density_profile(cloud, seq, c.h));
      } else {
        // Default resolution r/64 per ball.
        DensityProfile prof;
        for (std::size_t i = 0; i < seq.size(); ++i) {
          BallSequence one;
          one.balls.push_back(seq.balls[i]);
          DensityProfile p = density_profile(cloud, one, seq.balls[i].radius / 64.0);
          prof.covering_radii.push_back(p.covering_radii[0]);
          prof.epsilons.push_back(p.epsilons[0]);
          prof.grid_error = std::max(prof.grid_error, p.grid_error);
        }
        result = density_profile_to_json(prof);
      }
      detail::emit_with_csv("density", config, inputs, std::move(result), c);
    } else if (extract_cmd->parsed()) {
      Space space = detail::resolve_space(c, inputs);
      inputs.push_back(hash_input(c.input));
      inputs.push_back(hash_input(candidates_path));
      PointCloud cloud = load_cloud(space, c.input);
      BallSequence cand = ball_sequence_from_json(json::parse(read_file(candidates_path)));
      Point x0 = detail::parse_point(x0_text);
      ExtractionResult res = extract_well_separated(cloud, cand, x0);
      json config{{"space", space_to_json(space)}, {"x0", x0}};
      detail::emit_with_csv("extract-balls", config, inputs, extraction_to_json(res), c);
    } else if (extend_cmd->parsed()) {
      Space space = detail::resolve_space(c, inputs);
      inputs.push_back(hash_input(c.input));
      inputs.push_back(hash_input(values_path));
      inputs.push_back(hash_input(queries_path));
      PointCloud cloud = load_cloud(space, c.input);
      std::vector<double> f = values_from_file(values_path);
      std::vector<std::size_t> sub;
      if (!subset_path.empty()) {
        inputs.push_back(hash_input(subset_path));
        sub = json::parse(read_file(subset_path)).get<std::vector<std::size_t>>();
      } else {
        sub.resize(cloud.size());
        for (std::size_t i = 0; i < sub.size(); ++i) sub[i] = i;
      }
      if (f.size() != sub.size()) throw input_error("extend: values/subdomain size mismatch");
      std::vector<Point> queries = points_from_file(space, queries_path);
      SubMetric dom(cloud, sub, 0);
      double L = ext_L > 0.0 ? ext_L : (sub.size() >= 2 ? lip_norm(dom, f) : 0.0);
      std::vector<double> ext = mcshane_extend_batch(cloud, sub, f, L, queries);
      json config{{"space", space_to_json(space)}, {"L", L}};
      detail::emit_with_csv("extend", config, inputs,
                            json{{"L", L}, {"values", ext}}, c);
    } else if (kr_cmd->parsed() || dec_cmd->parsed()) {
      Space space = detail::resolve_space(c, inputs);
      inputs.push_back(hash_input(c.input));
      inputs.push_back(hash_input(molecule_path));
      PointCloud cloud = load_cloud(space, c.input);
      CachedMetric metric(cloud);
      Molecule mu = molecule_from_json(metric, json::parse(read_file(molecule_path)));
      json config{{"space", space_to_json(space)}};
      if (kr_cmd->parsed()) {
        KrResult kr = kr_norm_detailed(metric, mu, lp_skew);
        detail::emit_with_csv("kr-norm", config, inputs, kr_to_json(kr), c);
      } else {
        KaltonDecomposition dec = kalton_decompose(metric, mu, 45.0, lp_skew);
        detail::emit_with_csv("decompose", config, inputs, kalton_to_json(dec), c);
      }
    } else if (glue_cmd->parsed()) {
      Space space = detail::resolve_space(c, inputs);
      inputs.push_back(hash_input(c.input));
      inputs.push_back(hash_input(blocks_path));
      PointCloud cloud = load_cloud(space, c.input);
      json bj = json::parse(read_file(blocks_path));
      std::vector<Block> blocks;
      std::vector<std::vector<std::size_t>> groups;
      for (const auto& b : bj) {
        Block blk{b.at("indices").get<std::vector<std::size_t>>(),
                  b.at("values").get<std::vector<double>>()};
        std::vector<std::size_t> group;
        for (std::size_t idx : blk.indices)
          if (idx != x0_index) group.push_back(idx);
        groups.push_back(std::move(group));
        blocks.push_back(std::move(blk));
      }
      double lambda = lambda_override;
      if (!(lambda > 0.0)) lambda = well_separation(cloud, groups, x0_index).lambda;
      GlueResult g = glue(cloud, blocks, x0_index, lambda);
      json config{{"space", space_to_json(space)}, {"x0_index", x0_index}, {"lambda", lambda}};
      detail::emit_with_csv("glue", config, inputs,
                            json{{"union_indices", g.union_indices},
                                 {"values", g.values},
                                 {"measured_lip", g.measured_lip},
                                 {"bound", g.bound}},
                            c);
    } else if (verify_cmd->parsed()) {
      detail::require_seed(c, "verify-suite");
      std::vector<CheckResult> results = run_verify_suite(c.seed);
      json config{{"seed", c.seed}};
      bool all = true;
      for (const auto& r : results) all = all && r.pass;
      detail::emit_with_csv("verify-suite", config, inputs, verify_suite_to_json(results), c);
      if (!all) return exit_assertion;
    } else if (ex_powers->parsed()) {
      CheckResult r = power_lattice_check(powers_N);
      json config{{"N", powers_N}};
      detail::emit_with_csv("example-powers", config, inputs, r.details, c);
      if (!r.pass) return exit_assertion;
    } else if (ex_squares->parsed()) {
      std::vector<std::size_t> ns;
      for (double v : detail::parse_number_list(squares_ns)) ns.push_back(std::size_t(v));
      double h_over_r = c.h > 0.0 ? c.h : 1.0 / 64.0;
      SquareLatticeReport rep = verify_square_lattice_nonporous(ns, h_over_r);
      json config{{"n", ns}, {"h_over_r", h_over_r}};
      detail::emit_with_csv("example-squares", config, inputs, square_lattice_to_json(rep), c);
      if (!rep.all_hold()) return exit_assertion;
    } else if (ex_annuli->parsed()) {
      detail::require_seed(c, "example annuli");
      AnnuliFamily fam = build_annuli_family(Space::euclidean(2, LpExponent::l2()), annuli_nmax,
                                             annuli_samples, c.seed);
      SeparationCertificate cert = well_separation(fam.cloud, fam.groups, 0);
      json config{{"nmax", annuli_nmax}, {"samples", annuli_samples}, {"seed", c.seed}};
      json result{{"lambda", cert.lambda},
                  {"bound", 1.0 / 16.0},
                  {"holds", cert.lambda >= 1.0 / 16.0},
                  {"certificate", certificate_to_json(cert)}};
      if (c.csv && !c.out.empty()) write_file(c.out + ".csv", cloud_to_csv(fam.cloud));
      detail::emit(make_report("example-annuli", config, inputs, result), c.out);
      if (cert.lambda < 1.0 / 16.0) return exit_assertion;
    } else if (ex_dust->parsed()) {
      detail::require_seed(c, "example dust");
      PointCloud dust = build_cantor_dust(dust_ratio, dust_depth);
      std::vector<double> scales;
      double s = 1.0;
      for (std::size_t k = 0; k + 1 < dust_depth && k < 4; ++k) {
        s *= dust_ratio;
        scales.push_back(s);
      }
      std::sort(scales.begin(), scales.end());
      PorosityReport rep = porosity_profile(dust, scales, 6, c.seed);
      json config{{"ratio", dust_ratio}, {"depth", dust_depth}, {"seed", c.seed}};
      if (c.csv && !c.out.empty()) write_file(c.out + ".csv", cloud_to_csv(dust));
      detail::emit(make_report("example-dust", config, inputs, porosity_report_to_json(rep)),
                   c.out);
    } else if (ex_fat->parsed()) {
      FatCantorProduct fat = build_fat_cantor_product(fat_q, fat_depth);
      Point corner{0.0, 0.0};
      std::vector<double> radii;
      for (std::size_t k = 2; k <= fat_depth; ++k) radii.push_back(fat.level_length[k]);
      std::sort(radii.begin(), radii.end());
      std::vector<double> density = lebesgue_density_scan(fat.grid, corner, radii);
      json config{{"q", fat_q}, {"depth", fat_depth}};
      json result{{"total_measure", fat.total_measure},
                  {"radii", radii},
                  {"density", density},
                  {"trend_to_one", density.size() >= 2 && density.front() >= density.back()}};
      detail::emit(make_report("example-fatcantor", config, inputs, result), c.out);
    }
  } catch (const input_error& e) {
    std::cerr << "input error: " << e.what() << std::endl;
    std::cout << json{{"error", {{"kind", "input"}, {"message", e.what()}}}}.dump(2) << std::endl;
    return exit_input;
  } catch (const check_error& e) {
    std::cerr << "assertion failure: " << e.what() << std::endl;
    std::cout << json{{"error", {{"kind", "assertion"}, {"message", e.what()}}}}.dump(2)
              << std::endl;
    return exit_assertion;
  } catch (const numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << " (residual " << e.residual << ")" << std::endl;
    std::cout << json{{"error",
                       {{"kind", "numeric"}, {"message", e.what()}, {"residual", e.residual}}}}
                     .dump(2)
              << std::endl;
    return exit_numeric;
  } catch (const internal_error& e) {
    std::cerr << "internal error: " << e.what() << std::endl;
    std::cout << json{{"error", {{"kind", "internal"}, {"message", e.what()}}}}.dump(2)
              << std::endl;
    return exit_numeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    std::cout << json{{"error", {{"kind", "input"}, {"message", e.what()}}}}.dump(2) << std::endl;
    return exit_input;
  }
  return exit_ok;
}

inline int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args);
}

}  // namespace liporos::cli
