#pragma once

#include <chrono>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "liporos/extraction.hpp"
#include "liporos/glue.hpp"
#include "liporos/io.hpp"
#include "liporos/kalton.hpp"
#include "liporos/kr.hpp"
#include "liporos/lipschitz.hpp"
#include "liporos/porosity.hpp"
#include "liporos/quotient.hpp"
#include "liporos/separation.hpp"
#include "liporos/showcase.hpp"
#include "liporos/space.hpp"

namespace liporos {

// ---------------------------------------------------------------------------
// The verification battery: every pinned constant the toolkit can check at
// desk scale, with fixed tolerances. The CLI's verify-suite emits these as
// a report; the acceptance suite asserts them one by one. Wall-clock timing
// is kept out of the serialized details so identical seeds give identical
// report bytes.
// ---------------------------------------------------------------------------

struct CheckResult {
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  json details;
};

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

/// Exact pair-scan Lipschitz constant of values over raw l2 points; the
/// brute-force oracle used against extensions.
inline double scan_lip_l2(const std::vector<Point>& pts, const std::vector<double>& vals) {
  std::size_t n = pts.size();
  std::vector<double> worst_by_row(n, 0.0);
  parallel_for_index(n, [&](std::size_t i) {
    double w = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < pts[i].size(); ++k) {
        double d = pts[i][k] - pts[j][k];
        s += d * d;
      }
      double slope = std::fabs(vals[i] - vals[j]) / std::sqrt(s);
      if (slope > w) w = slope;
    }
    worst_by_row[i] = w;
  });
  double worst = 0.0;
  for (double w : worst_by_row) worst = std::max(worst, w);
  return worst;
}

/// Random molecule over a fresh little cloud: base at the origin plus up to
/// `max_support` points at distances log-uniform in [2^-4, 2^4].
struct RandomMolecule {
  PointCloud cloud;
  Molecule mu;
};

inline RandomMolecule random_molecule(Rng& rng, std::size_t max_support) {
  std::size_t k = 1 + rng.index(max_support);
  std::vector<Point> pts{Point{0.0, 0.0}};
  for (std::size_t i = 0; i < k; ++i) {
    double r = rng.log_uniform(std::ldexp(1.0, -4), std::ldexp(1.0, 4));
    double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
    pts.push_back(Point{r * std::cos(th), r * std::sin(th)});
  }
  PointCloud cloud(Space::euclidean(2, LpExponent::l2()), std::move(pts), 0);
  std::vector<MoleculeTerm> terms;
  for (std::size_t i = 0; i < k; ++i) {
    double w = rng.uniform(-1.0, 1.0);
    if (std::fabs(w) < 1e-3) w = w < 0.0 ? -1e-3 : 1e-3;
    terms.push_back({i + 1, w});
  }
  Molecule mu = make_molecule(cloud, std::move(terms));
  return RandomMolecule{std::move(cloud), std::move(mu)};
}

}  // namespace detail

// --- 1. Power lattice constants (4, 5, 1/5) --------------------------------

inline CheckResult power_lattice_check(std::size_t truncation = 12) {
  detail::Stopwatch timer;
  LatticeSpec spec;
  spec.rule = LatticeSpec::Powers{2.0};
  spec.truncation = truncation;
  LatticeConstantsReport rep = verify_lattice_constants(spec);
  CheckResult out;
  out.name = "power-lattice";
  out.pass = rep.all_hold();
  out.details = lattice_constants_to_json(rep);
  out.seconds = timer.seconds();
  return out;
}

// --- 2. Square lattice hole ratios ------------------------------------------

inline CheckResult square_lattice_check(std::vector<std::size_t> ns = {5, 10, 20},
                                        double h_over_r = 1.0 / 64.0) {
  detail::Stopwatch timer;
  SquareLatticeReport rep = verify_square_lattice_nonporous(ns, h_over_r);
  CheckResult out;
  out.name = "square-lattice";
  out.pass = rep.all_hold();
  out.details = square_lattice_to_json(rep);
  out.seconds = timer.seconds();
  return out;
}

// --- 3. Kalton suite ---------------------------------------------------------

inline CheckResult kalton_check(std::size_t partition_samples = 100000,
                                std::size_t molecule_count = 1000, std::uint64_t seed = 1) {
  detail::Stopwatch timer;
  Rng rng(seed ^ 0x6b616c746full);
  double worst_partition = 0.0;
  for (std::size_t s = 0; s < partition_samples; ++s) {
    double t = rng.log_uniform(std::ldexp(1.0, -20), std::ldexp(1.0, 20));
    double sum = 0.0;
    for (int n : kalton_active_layers(t)) sum += kalton_weight(n, t);
    worst_partition = std::max(worst_partition, std::fabs(sum - 1.0));
  }
  double worst_recon = 0.0, worst_ratio = 0.0;
  std::size_t two_term_points = 0;
  for (std::size_t s = 0; s < molecule_count; ++s) {
    auto rm = detail::random_molecule(rng, 12);
    KaltonDecomposition dec = kalton_decompose(rm.cloud, rm.mu);
    double scale = 0.0;
    for (const auto& t : rm.mu.support) scale = std::max(scale, std::fabs(t.weight));
    worst_recon =
        std::max(worst_recon, kalton_reconstruction_error(rm.cloud, rm.mu, dec) / scale);
    worst_ratio = std::max(worst_ratio, dec.ratio);
    for (const auto& t : rm.mu.support)
      if (kalton_active_layers(rm.cloud.distance(t.point, 0)).size() == 2) ++two_term_points;
  }
  CheckResult out;
  out.name = "kalton";
  out.pass = worst_partition <= 1e-12 && worst_recon <= 1e-12 && worst_ratio <= 45.0;
  out.details = json{{"partition_samples", partition_samples},
                     {"worst_partition_error", worst_partition},
                     {"molecules", molecule_count},
                     {"worst_reconstruction_error", worst_recon},
                     {"max_layer_ratio", worst_ratio},
                     {"ratio_bound", 45.0},
                     {"two_term_support_points", two_term_points}};
  out.seconds = timer.seconds();
  return out;
}

// --- 4. KR norm solver cross-validation --------------------------------------

inline CheckResult kr_cross_check(std::size_t molecule_count = 1000, std::size_t max_support = 10,
                                  std::size_t pair_count = 1000, std::uint64_t seed = 1) {
  detail::Stopwatch timer;
  Rng rng(seed ^ 0x6b72ull);
  double worst_gap = 0.0;
  for (std::size_t s = 0; s < molecule_count; ++s) {
    auto rm = detail::random_molecule(rng, max_support);
    KrResult kr = kr_norm_detailed(rm.cloud, rm.mu);
    worst_gap = std::max(worst_gap, std::fabs(kr.lp_value - kr.flow_value));
  }
  double worst_pair = 0.0;
  for (std::size_t s = 0; s < pair_count; ++s) {
    double r1 = rng.log_uniform(std::ldexp(1.0, -4), std::ldexp(1.0, 4));
    double r2 = rng.log_uniform(std::ldexp(1.0, -4), std::ldexp(1.0, 4));
    double t1 = rng.uniform(0.0, 2.0 * std::numbers::pi);
    double t2 = rng.uniform(0.0, 2.0 * std::numbers::pi);
    Point x{r1 * std::cos(t1), r1 * std::sin(t1)}, y{r2 * std::cos(t2), r2 * std::sin(t2)};
    if (x == y) continue;
    PointCloud cloud(Space::euclidean(2, LpExponent::l2()), {Point{0.0, 0.0}, x, y}, 0);
    Molecule mu = make_molecule(cloud, {{1, 1.0}, {2, -1.0}});
    worst_pair = std::max(worst_pair, std::fabs(kr_norm(cloud, mu) - cloud.distance(1, 2)));
  }
  CheckResult out;
  out.name = "kr-cross";
  out.pass = worst_gap <= 1e-8 && worst_pair <= 1e-10;
  out.details = json{{"molecules", molecule_count},
                     {"worst_lp_flow_gap", worst_gap},
                     {"pairs", pair_count},
                     {"worst_two_point_error", worst_pair}};
  out.seconds = timer.seconds();
  return out;
}

// --- 5. Glue operator bound ---------------------------------------------------

inline CheckResult glue_check(std::size_t family_count = 100, std::uint64_t seed = 1) {
  detail::Stopwatch timer;
  Rng rng(seed ^ 0x676c7565ull);
  double worst_excess = -std::numeric_limits<double>::infinity();
  std::size_t families_run = 0;
  double quotient_lambda = 0.0;

  // Family 0: the power-lattice quotient singletons, λ >= 1/5.
  {
    LatticeSpec spec;
    spec.rule = LatticeSpec::Powers{2.0};
    spec.truncation = 12;
    spec.metric = LpExponent::l1();
    Lattice lat = build_lattice(spec);
    QuotientSpace q(lat.cloud, lat.boundary);
    std::vector<std::vector<std::size_t>> singles;
    for (std::size_t i = 1; i < q.size(); ++i) singles.push_back({i});
    SeparationCertificate cert = well_separation(q, singles, 0);
    quotient_lambda = cert.lambda;
    std::vector<Block> blocks;
    for (std::size_t i = 1; i < q.size(); ++i) {
      double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      blocks.push_back(Block{{0, i}, {0.0, sign * q.distance(0, i)}});  // unit norm on {x0, i}
    }
    GlueResult g = glue(q, blocks, 0, cert.lambda);
    worst_excess = std::max(worst_excess, g.measured_lip - 1.0 / cert.lambda);
    ++families_run;
  }

  // Random certified cluster families.
  Space space = Space::euclidean(2, LpExponent::l2());
  while (families_run < family_count) {
    std::size_t clusters = 3 + rng.index(5);
    std::vector<Point> pts{Point{0.0, 0.0}};
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t c = 0; c < clusters; ++c) {
      double rc = rng.log_uniform(0.5, 8.0);
      double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
      Point center{rc * std::cos(th), rc * std::sin(th)};
      std::size_t sz = 2 + rng.index(4);
      std::vector<std::size_t> group;
      for (std::size_t i = 0; i < sz; ++i) {
        group.push_back(pts.size());
        pts.push_back(Point{center[0] + rng.uniform(-0.05, 0.05) * rc,
                            center[1] + rng.uniform(-0.05, 0.05) * rc});
      }
      groups.push_back(std::move(group));
    }
    PointCloud cloud(space, std::move(pts), 0);
    SeparationCertificate cert = well_separation(cloud, groups, 0);
    if (!(cert.lambda > 0.0)) continue;
    std::vector<Block> blocks;
    bool degenerate = false;
    for (const auto& g : groups) {
      Block blk;
      blk.indices = {0};
      blk.values = {0.0};
      for (std::size_t idx : g) {
        blk.indices.push_back(idx);
        blk.values.push_back(rng.uniform(-1.0, 1.0));
      }
      SubMetric sub(cloud, blk.indices, 0);
      double norm = lip_norm(sub, blk.values);
      if (!(norm > 0.0)) {
        degenerate = true;
        break;
      }
      for (double& v : blk.values) v /= norm;  // unit block norm
      blocks.push_back(std::move(blk));
    }
    if (degenerate) continue;
    GlueResult g = glue(cloud, blocks, 0, cert.lambda);
    worst_excess = std::max(worst_excess, g.measured_lip - 1.0 / std::min(cert.lambda, 1.0));
    ++families_run;
  }
  CheckResult out;
  out.name = "glue-bound";
  out.pass = worst_excess <= 1e-9 && quotient_lambda >= 0.2;
  out.details = json{{"families", families_run},
                     {"quotient_lambda", quotient_lambda},
                     {"worst_excess_over_bound", worst_excess}};
  out.seconds = timer.seconds();
  return out;
}

// --- 6. Annuli family ---------------------------------------------------------

inline CheckResult annuli_check(std::size_t n_max = 6, std::size_t samples = 1000,
                                std::size_t sound_pairs = 10000, std::uint64_t seed = 1) {
  detail::Stopwatch timer;
  AnnuliFamily fam =
      build_annuli_family(Space::euclidean(2, LpExponent::l2()), n_max, samples, seed ^ 0xa11u);
  SeparationCertificate cert = well_separation(fam.cloud, fam.groups, 0);
  // Point-sampled ratios can never undercut the exhaustive certificate.
  Rng rng(seed ^ 0xa12u);
  double worst_sampled = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < sound_pairs; ++s) {
    std::size_t gi = rng.index(fam.groups.size());
    std::size_t gj = rng.index(fam.groups.size() - 1);
    if (gj >= gi) ++gj;
    std::size_t a = fam.groups[gi][rng.index(fam.groups[gi].size())];
    std::size_t b = fam.groups[gj][rng.index(fam.groups[gj].size())];
    double den = fam.cloud.distance(a, 0) + fam.cloud.distance(b, 0);
    worst_sampled = std::min(worst_sampled, fam.cloud.distance(a, b) / den);
  }
  CheckResult out;
  out.name = "annuli";
  out.pass = cert.lambda >= 1.0 / 16.0 && worst_sampled >= cert.lambda;
  out.details = json{{"n_max", n_max},
                     {"samples_per_annulus", samples},
                     {"lambda", cert.lambda},
                     {"bound", 1.0 / 16.0},
                     {"worst_sampled_ratio", worst_sampled}};
  out.seconds = timer.seconds();
  return out;
}

// --- 7. Extractor regimes -----------------------------------------------------

inline CheckResult extractor_check(std::uint64_t seed = 1) {
  detail::Stopwatch timer;
  Space space = Space::euclidean(2, LpExponent::l2());
  Rng rng(seed ^ 0xe87u);
  json details;
  bool pass = true;

  // Shrinking balls toward an accumulation point (the origin), target 1/4.
  {
    BallSequence cand;
    std::vector<Point> cloud_pts{Point{5.0, 5.0}};
    for (int n = 1; n <= 8; ++n) {
      double d = std::pow(9.0, -n);
      cand.balls.push_back(Ball{Point{d, 0.0}, d / 8.0});
      cand.densities.push_back(1.0 / double(n + 2));
      cand.density_bound_valid.push_back(1);
      cloud_pts.push_back(Point{d, 0.0});
    }
    PointCloud cloud(space, std::move(cloud_pts), 0);
    ExtractionResult res = extract_well_separated(cloud, cand, Point{0.0, 0.0});
    double sampled = sampled_separation_ratio(space, res.balls.balls, res.x0, 10000, rng);
    bool ok = res.certificate.lambda >= 0.25 && pairwise_disjoint(space, res.balls.balls) &&
              sampled >= res.certificate.lambda && res.balls.size() >= 3;
    pass = pass && ok;
    details["shrinking"] = json{{"lambda", res.certificate.lambda},
                                {"target", 0.25},
                                {"balls", res.balls.size()},
                                {"sampled_min_ratio", sampled},
                                {"regime", res.trace.regime},
                                {"ok", ok}};
  }

  // Growing balls with d(B_n, x0) >= r_n, target 1/2.
  {
    BallSequence cand;
    std::vector<Point> cloud_pts{Point{0.0, 1.0}};
    for (int n = 1; n <= 10; ++n) {
      double r = std::pow(9.0, n);
      cand.balls.push_back(Ball{Point{6.0 * r, 0.0}, r});
      cand.densities.push_back(1.0 / double(n + 2));
      cand.density_bound_valid.push_back(1);
      cloud_pts.push_back(Point{6.0 * r, 0.0});
    }
    PointCloud cloud(space, std::move(cloud_pts), 0);
    ExtractionResult res = extract_well_separated(cloud, cand, Point{0.0, 0.0});
    double sampled = sampled_separation_ratio(space, res.balls.balls, res.x0, 10000, rng);
    bool ok = res.certificate.lambda >= 0.5 && pairwise_disjoint(space, res.balls.balls) &&
              sampled >= res.certificate.lambda && res.balls.size() >= 3;
    pass = pass && ok;
    details["growing"] = json{{"lambda", res.certificate.lambda},
                              {"target", 0.5},
                              {"balls", res.balls.size()},
                              {"sampled_min_ratio", sampled},
                              {"regime", res.trace.regime},
                              {"ok", ok}};
  }

  CheckResult out;
  out.name = "extractor";
  out.pass = pass;
  out.details = std::move(details);
  out.seconds = timer.seconds();
  return out;
}

// --- 8. Density transfer property ---------------------------------------------

inline CheckResult density_transfer_check(std::size_t trials = 1000, std::uint64_t seed = 1) {
  detail::Stopwatch timer;
  Rng rng(seed ^ 0x24u);
  Space space = Space::euclidean(2, LpExponent::l2());
  std::size_t failures = 0, run = 0, skipped = 0;
  while (run < trials) {
    std::vector<Point> pts;
    for (std::size_t i = 0; i < 120; ++i)
      pts.push_back(Point{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)});
    PointCloud cloud(space, std::move(pts), 0);
    Ball region{cloud.point(rng.index(120)), rng.uniform(0.25, 0.45)};
    double h = region.radius / 24.0;
    double delta = covering_radius(cloud, region, h) + grid_cover_error(space, h);
    if (delta > region.radius / 2.0) {
      // Too sparse to host an inner ball of radius >= delta; resample.
      if (++skipped > 30 * trials) break;
      continue;
    }
    double inner_r = rng.uniform(delta, region.radius / 2.0);
    double off_max = region.radius - inner_r;
    double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
    double off = rng.uniform(0.0, off_max);
    Ball inner{Point{region.center[0] + off * std::cos(th), region.center[1] + off * std::sin(th)},
               inner_r};
    DensityTransferReport rep = verify_density_transfer(cloud, region, delta, inner, h);
    if (!rep.hypothesis_met) {
      if (++skipped > 30 * trials) break;
      continue;
    }
    ++run;
    if (!rep.transfer_ok) ++failures;
  }
  CheckResult out;
  out.name = "density-transfer";
  out.pass = run == trials && failures == 0;
  out.details = json{{"trials", run}, {"failures", failures}, {"resampled", skipped}};
  out.seconds = timer.seconds();
  return out;
}

// --- 9. Heisenberg metric -----------------------------------------------------

inline CheckResult heisenberg_check(std::size_t triples = 1000, std::uint64_t seed = 1,
                                    double tol = 1e-10) {
  detail::Stopwatch timer;
  Space h = Space::heisenberg(tol);
  Rng rng(seed ^ 0x48u);
  auto rnd_point = [&] { return Point{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
                                      rng.uniform(-2.0, 2.0)}; };
  double worst_li = 0.0, worst_dil = 0.0;
  for (std::size_t s = 0; s < triples; ++s) {
    Point x = rnd_point(), y = rnd_point(), z = rnd_point();
    double d = h.distance(x, y);
    worst_li = std::max(worst_li, std::fabs(h.distance(h.translate(z, x), h.translate(z, y)) - d));
    for (double lam : {0.5, 2.0, 10.0}) {
      double dd = h.distance(h.dilate(x, lam), h.dilate(y, lam));
      worst_dil = std::max(worst_dil, std::fabs(dd - lam * d) / lam);
    }
  }
  double worst_vertical = 0.0;
  for (double c : {1e-2, 1.0, 1e2}) {
    double want = 2.0 * std::sqrt(std::numbers::pi * c);
    worst_vertical = std::max(
        worst_vertical, std::fabs(h.distance(Point{0, 0, 0}, Point{0, 0, c}) - want));
  }
  Point mid = h.geodesic_point(Point{0, 0, 0}, Point{0, 0, 1}, 0.5);
  double want_half = std::sqrt(std::numbers::pi);
  double worst_mid = std::max(std::fabs(h.distance(Point{0, 0, 0}, mid) - want_half),
                              std::fabs(h.distance(mid, Point{0, 0, 1}) - want_half));
  CheckResult out;
  out.name = "heisenberg";
  out.pass = worst_li <= 10.0 * tol && worst_dil <= 10.0 * tol && worst_vertical <= 1e-6 &&
             worst_mid <= 1e-6;
  out.details = json{{"triples", triples},
                     {"worst_left_invariance", worst_li},
                     {"worst_dilation", worst_dil},
                     {"worst_vertical_error", worst_vertical},
                     {"worst_midpoint_error", worst_mid},
                     {"tolerance", 10.0 * tol},
                     {"convention", "group law (a,b,c)(a',b',c') = (a+a', b+b', c+c'+(ab'-ba')/2)"}};
  out.seconds = timer.seconds();
  return out;
}

// --- 10. McShane extension ------------------------------------------------------

inline CheckResult mcshane_check(std::size_t instances = 100, std::uint64_t seed = 1) {
  detail::Stopwatch timer;
  Rng rng(seed ^ 0x4d63u);
  Space space = Space::euclidean(2, LpExponent::l2());
  double worst_excess = -std::numeric_limits<double>::infinity();
  bool restriction_exact = true;
  for (std::size_t s = 0; s < instances; ++s) {
    std::vector<Point> pts;
    for (std::size_t i = 0; i < 20; ++i)
      pts.push_back(Point{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)});
    PointCloud cloud(space, std::move(pts), 0);
    std::vector<double> f(20);
    for (std::size_t i = 1; i < 20; ++i) f[i] = rng.uniform(-1.0, 1.0);
    f[0] = 0.0;
    double L = lip_norm(cloud, f);
    if (s % 3 == 0) L *= 1.5;  // callers may pass larger constants

    std::vector<std::size_t> sub(20);
    for (std::size_t i = 0; i < 20; ++i) sub[i] = i;
    std::vector<Point> queries;
    for (std::size_t gx = 0; gx < 50; ++gx)
      for (std::size_t gy = 0; gy < 50; ++gy)
        queries.push_back(Point{double(gx) / 49.0, double(gy) / 49.0});
    for (const auto& p : cloud.points()) queries.push_back(p);
    std::vector<double> ext = mcshane_extend_batch(cloud, sub, f, L, queries);
    for (std::size_t i = 0; i < 20; ++i)
      if (ext[2500 + i] != f[i]) restriction_exact = false;
    worst_excess = std::max(worst_excess, detail::scan_lip_l2(queries, ext) - L);
  }
  CheckResult out;
  out.name = "mcshane";
  out.pass = restriction_exact && worst_excess <= 1e-9;
  out.details = json{{"instances", instances},
                     {"restriction_exact", restriction_exact},
                     {"worst_constant_excess", worst_excess}};
  out.seconds = timer.seconds();
  return out;
}

// --- The whole battery ---------------------------------------------------------

inline std::vector<CheckResult> run_verify_suite(std::uint64_t seed) {
  std::vector<CheckResult> out;
  out.push_back(power_lattice_check());
  out.push_back(square_lattice_check());
  out.push_back(kalton_check(100000, 1000, seed));
  out.push_back(kr_cross_check(1000, 10, 1000, seed));
  out.push_back(glue_check(100, seed));
  out.push_back(annuli_check(6, 1000, 10000, seed));
  out.push_back(extractor_check(seed));
  out.push_back(density_transfer_check(1000, seed));
  out.push_back(heisenberg_check(1000, seed));
  out.push_back(mcshane_check(100, seed));
  return out;
}

inline json verify_suite_to_json(const std::vector<CheckResult>& results) {
  json checks = json::array();
  bool all = true;
  for (const auto& r : results) {
    checks.push_back(json{{"name", r.name}, {"pass", r.pass}, {"details", r.details}});
    all = all && r.pass;
  }
  return json{{"all_pass", all}, {"checks", checks}};
}

}  // namespace liporos
