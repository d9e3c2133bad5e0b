#include <doctest.h>

#include <cmath>
#include <numbers>

#include "liporos/glue.hpp"
#include "liporos/kalton.hpp"
#include "liporos/kr.hpp"
#include "liporos/lipschitz.hpp"
#include "liporos/quotient.hpp"
#include "liporos/showcase.hpp"

using namespace liporos;

namespace {

PointCloud random_cloud(Rng& rng, std::size_t n) {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i)
    pts.push_back(Point{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)});
  return PointCloud(Space::euclidean(2, LpExponent::l2()), std::move(pts), 0);
}

std::vector<double> random_values(Rng& rng, std::size_t n) {
  std::vector<double> f(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) f[i] = rng.uniform(-1.0, 1.0);
  return f;
}

}  // namespace

// --- McShane -----------------------------------------------------------------

TEST_CASE("mcshane: restriction identity and the single-point formula") {
  Space s = Space::euclidean(2, LpExponent::l2());
  PointCloud cloud(s, {{0.0, 0.0}, {1.0, 0.0}, {0.0, 2.0}}, 0);
  std::vector<std::size_t> sub{0};
  std::vector<double> f{0.0};
  // M = {0}, f = 0: the extension is L * d(x, 0).
  CHECK(mcshane_extend(cloud, sub, f, 2.0, {3.0, 4.0}) == doctest::Approx(10.0));
  CHECK(mcshane_extend(cloud, sub, f, 2.0, {0.0, 0.0}) == 0.0);
  // Extension property on the subdomain, bit-exact.
  std::vector<std::size_t> sub2{0, 1, 2};
  std::vector<double> f2{0.0, 0.7, -1.3};
  double L = lip_norm(cloud, f2);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(mcshane_extend(cloud, sub2, f2, L, cloud.point(i)) == f2[i]);
  // Too small a constant is rejected with both values quoted.
  CHECK_THROWS_AS((void)mcshane_extend(cloud, sub2, f2, L / 2.0, {5.0, 5.0}), input_error);
}

TEST_CASE("mcshane: grid-measured constant never exceeds L") {
  Rng rng(101);
  PointCloud cloud = random_cloud(rng, 20);
  std::vector<double> f = random_values(rng, 20);
  double L = lip_norm(cloud, f);
  std::vector<std::size_t> sub(20);
  for (std::size_t i = 0; i < 20; ++i) sub[i] = i;
  std::vector<Point> queries;
  for (int gx = 0; gx < 50; ++gx)
    for (int gy = 0; gy < 50; ++gy) queries.push_back(Point{gx / 49.0, gy / 49.0});
  std::vector<double> ext = mcshane_extend_batch(cloud, sub, f, L, queries);
  double measured = 0.0;
  for (std::size_t i = 0; i < queries.size(); ++i)
    for (std::size_t j = i + 1; j < queries.size(); ++j) {
      double d = std::hypot(queries[i][0] - queries[j][0], queries[i][1] - queries[j][1]);
      measured = std::max(measured, std::fabs(ext[i] - ext[j]) / d);
    }
  CHECK(measured <= L + 1e-9);
}

TEST_CASE("mcshane_extend_all: exact on the subdomain, norm bounded by L") {
  Rng rng(211);
  PointCloud cloud = random_cloud(rng, 30);
  std::vector<std::size_t> sub{0, 3, 7, 11, 19, 26};
  for (int t = 0; t < 50; ++t) {
    std::vector<double> f(sub.size());
    for (std::size_t i = 1; i < sub.size(); ++i) f[i] = rng.uniform(-1.0, 1.0);
    SubMetric dom(cloud, sub, 0);
    double L = lip_norm(dom, f) * (t % 2 ? 1.0 : 1.25);
    std::vector<double> ext = mcshane_extend_all(cloud, sub, f, L);
    for (std::size_t a = 0; a < sub.size(); ++a) REQUIRE(ext[sub[a]] == f[a]);
    REQUIRE(lip_norm(cloud, ext) <= L + 1e-12);
  }
}

TEST_CASE("restriction contracts norms on a thousand random functions") {
  Rng rng(223);
  PointCloud cloud = random_cloud(rng, 12);
  std::vector<std::size_t> all(12);
  for (std::size_t i = 0; i < 12; ++i) all[i] = i;
  std::vector<std::vector<std::size_t>> block_ids = {{0, 1, 2, 3}, {0, 4, 5, 6, 7}, {0, 8, 9, 10, 11}};
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> f = random_values(rng, 12);
    double norm = lip_norm(cloud, f);
    for (const auto& blk : restrict_blocks(cloud, all, f, block_ids)) {
      SubMetric sub(cloud, blk.indices, 0);
      REQUIRE(lip_norm(sub, blk.values) <= norm + 1e-12);
    }
  }
}

TEST_CASE("mcshane is monotone in the extension constant") {
  Rng rng(103);
  PointCloud cloud = random_cloud(rng, 15);
  std::vector<double> f = random_values(rng, 15);
  double L = lip_norm(cloud, f);
  std::vector<std::size_t> sub(15);
  for (std::size_t i = 0; i < 15; ++i) sub[i] = i;
  for (int t = 0; t < 100; ++t) {
    Point q{rng.uniform(-0.5, 1.5), rng.uniform(-0.5, 1.5)};
    CHECK(mcshane_extend(cloud, sub, f, L, q) <= mcshane_extend(cloud, sub, f, 2.0 * L, q) + 1e-12);
  }
}

// --- Glue / restrict -----------------------------------------------------------

TEST_CASE("glue: one block is the identity") {
  Rng rng(107);
  PointCloud cloud = random_cloud(rng, 10);
  Block blk;
  for (std::size_t i = 0; i < 10; ++i) blk.indices.push_back(i);
  blk.values = random_values(rng, 10);
  GlueResult g = glue(cloud, {blk}, 0, std::numeric_limits<double>::infinity());
  CHECK(g.values == blk.values);
}

TEST_CASE("glue restores restrictions of a global function") {
  Rng rng(109);
  PointCloud cloud = random_cloud(rng, 21);
  std::vector<double> f = random_values(rng, 21);
  double norm = lip_norm(cloud, f);
  std::vector<std::size_t> all(21);
  for (std::size_t i = 0; i < 21; ++i) all[i] = i;
  std::vector<std::vector<std::size_t>> block_ids = {
      {0, 1, 2, 3, 4, 5}, {0, 6, 7, 8, 9, 10}, {0, 11, 12, 13, 14, 15}, {0, 16, 17, 18, 19, 20}};
  std::vector<Block> blocks = restrict_blocks(cloud, all, f, block_ids);
  // Restriction contracts norms.
  for (const auto& blk : blocks) {
    SubMetric sub(cloud, blk.indices, 0);
    CHECK(lip_norm(sub, blk.values) <= norm + 1e-12);
  }
  GlueResult g = glue(cloud, blocks, 0, 1e-6);  // any positive certificate
  REQUIRE(g.union_indices == all);
  for (std::size_t i = 0; i < 21; ++i) CHECK(g.values[i] == f[i]);
  CHECK(g.measured_lip == doctest::Approx(norm));
}

TEST_CASE("glue rejects overlaps, missing x0, bad certificates") {
  Rng rng(113);
  PointCloud cloud = random_cloud(rng, 8);
  Block a{{0, 1, 2}, {0.0, 0.1, 0.2}};
  Block b{{0, 2, 3}, {0.0, 0.5, 0.6}};  // overlaps a at 2
  CHECK_THROWS_AS((void)glue(cloud, {a, b}, 0, 0.5), input_error);
  Block c{{1, 2}, {0.1, 0.2}};  // no x0
  CHECK_THROWS_AS((void)glue(cloud, {c}, 0, 0.5), input_error);
  Block d{{0, 1}, {0.4, 0.1}};  // f(x0) != 0
  CHECK_THROWS_AS((void)glue(cloud, {d}, 0, 0.5), input_error);
  CHECK_THROWS_AS((void)glue(cloud, {a}, 0, 0.0), input_error);
}

TEST_CASE("glue norm bound on the power-lattice quotient blocks") {
  LatticeSpec spec;
  spec.rule = LatticeSpec::Powers{2.0};
  spec.truncation = 10;
  Lattice lat = build_lattice(spec);
  QuotientSpace q(lat.cloud, lat.boundary);
  std::vector<std::vector<std::size_t>> singles;
  for (std::size_t i = 1; i < q.size(); ++i) singles.push_back({i});
  SeparationCertificate cert = well_separation(q, singles, 0);
  REQUIRE(cert.lambda >= 0.2);
  Rng rng(127);
  std::vector<Block> blocks;
  for (std::size_t i = 1; i < q.size(); ++i) {
    double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    blocks.push_back(Block{{0, i}, {0.0, sign * q.distance(0, i)}});
  }
  GlueResult g = glue(q, blocks, 0, cert.lambda);
  CHECK(g.measured_lip <= 1.0 / cert.lambda + 1e-9);
  CHECK(g.measured_lip <= 5.0 + 1e-9);
}

// --- Towers ----------------------------------------------------------------------

TEST_CASE("tower restrict: full levels reproduce the norm; singletons flagged") {
  Rng rng(131);
  PointCloud cloud = random_cloud(rng, 16);
  std::vector<double> f = random_values(rng, 16);
  double norm = lip_norm(cloud, f);
  std::vector<std::size_t> all(16);
  for (std::size_t i = 0; i < 16; ++i) all[i] = i;
  std::vector<TowerLevel> tower{{all, 0}, {all, 0}, {{3}, 0}};
  // The singleton level's base is point 3; base distances must not increase,
  // so order levels with the singleton last only if closer to the base.
  // Simpler: singleton at the base itself.
  tower[2] = TowerLevel{{0}, 0};
  TowerRestriction tr = tower_restrict(cloud, f, tower);
  CHECK(tr.component_norms[0] == doctest::Approx(norm));
  CHECK(tr.running_max.back() == doctest::Approx(norm));
  REQUIRE(tr.degenerate_levels.size() == 1);
  CHECK(tr.degenerate_levels[0] == 2);
  CHECK(tr.component_norms[2] == 0.0);
  // s_N is nondecreasing and never exceeds the full norm.
  for (std::size_t n = 0; n < tr.running_max.size(); ++n) {
    CHECK(tr.running_max[n] <= norm + 1e-12);
    if (n > 0) CHECK(tr.running_max[n] >= tr.running_max[n - 1]);
  }
  CHECK_THROWS_AS((void)tower_restrict(cloud, f, std::vector<TowerLevel>{}), input_error);
}

TEST_CASE("tower limit: exact round trip when the last level is everything") {
  Rng rng(137);
  PointCloud cloud = random_cloud(rng, 14);
  std::vector<double> f = random_values(rng, 14);
  std::vector<std::size_t> all(14), half;
  for (std::size_t i = 0; i < 14; ++i) all[i] = i;
  for (std::size_t i = 0; i < 14; i += 2) half.push_back(i);
  std::vector<TowerLevel> tower{{half, 0}, {all, 0}};
  TowerRestriction tr = tower_restrict(cloud, f, tower);
  TowerLimit lim = tower_limit(cloud, tower, tr.components);
  for (std::size_t i = 0; i < 14; ++i) CHECK(lim.values[i] == doctest::Approx(f[i]).epsilon(1e-15));
  CHECK(lim.error_bound >= 0.0);
  // Constant-zero components give the zero function.
  std::vector<std::vector<double>> zeros{std::vector<double>(half.size(), 0.0),
                                         std::vector<double>(14, 0.0)};
  TowerLimit zl = tower_limit(cloud, tower, zeros);
  for (double v : zl.values) CHECK(v == 0.0);
}

TEST_CASE("tower limit error bound on grids: twice the covering radius") {
  // f = d(., 0) on the unit square corner grid; towers of pitch 2^-k.
  Space s = Space::euclidean(2, LpExponent::l2());
  std::vector<Point> pts;
  int fine = 16;  // 2^-4 grid
  for (int i = 0; i <= fine; ++i)
    for (int j = 0; j <= fine; ++j) pts.push_back(Point{double(i) / fine, double(j) / fine});
  PointCloud cloud(s, std::move(pts), 0);
  std::vector<double> f(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) f[i] = cloud.distance(i, 0);
  // Level k: the sub-grid of pitch 2^-k (k = 2, 3, 4). Base 0 is in every level.
  std::vector<TowerLevel> tower;
  for (int k = 2; k <= 4; ++k) {
    int step = fine >> k;  // index stride for pitch 2^-k
    std::vector<std::size_t> ids;
    for (int i = 0; i <= fine; i += step)
      for (int j = 0; j <= fine; j += step) ids.push_back(std::size_t(i) * (fine + 1) + j);
    tower.push_back(TowerLevel{ids, 0});
  }
  TowerRestriction tr = tower_restrict(cloud, f, tower);
  // s_N of the distance function is exactly 1 on the axis-aligned sub-grids.
  CHECK(tr.running_max.back() == doctest::Approx(1.0).epsilon(1e-12));
  TowerLimit lim = tower_limit(cloud, tower, tr.components);
  double sup_err = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i)
    sup_err = std::max(sup_err, std::fabs(lim.values[i] - f[i]));
  // Last level has pitch 2^-4 = full grid here, so the round trip is exact;
  // use the middle level alone for a genuine error bound check.
  std::vector<TowerLevel> coarse{tower[0]};
  std::vector<std::vector<double>> comp{tr.components[0]};
  TowerLimit lim2 = tower_limit(cloud, coarse, comp);
  double sup2 = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i)
    sup2 = std::max(sup2, std::fabs(lim2.values[i] - f[i]));
  // Covering radius of the 2^-2 sub-grid in the full grid (l2): half cell diag.
  CHECK(sup2 <= lim2.error_bound + 1e-12);
  CHECK(sup2 <= 2.0 * 0.25 + 1e-12);
  CHECK(sup_err <= 1e-12);
}

// --- Kalton ------------------------------------------------------------------------

TEST_CASE("kalton weights: branch values and the partition of unity") {
  CHECK(kalton_weight(0, 1.0) == 1.0);
  CHECK(kalton_weight(0, 1.5) == 0.5);
  CHECK(kalton_weight(1, 1.5) == 0.5);
  CHECK(kalton_weight(0, 0.25) == 0.0);  // outside [2^{-1}, 2^{1}]
  CHECK(kalton_weight(0, 4.0) == 0.0);
  CHECK(kalton_weight(3, 8.0) == 1.0);
  Rng rng(139);
  double worst = 0.0;
  for (int t = 0; t < 100000; ++t) {
    double d = rng.log_uniform(std::ldexp(1.0, -20), std::ldexp(1.0, 20));
    double sum = 0.0;
    int nonzero = 0;
    for (int n : kalton_active_layers(d)) {
      sum += kalton_weight(n, d);
      ++nonzero;
    }
    REQUIRE(nonzero >= 1);
    REQUIRE(nonzero <= 2);
    worst = std::max(worst, std::fabs(sum - 1.0));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("kalton decompose: single-layer molecule and annulus support") {
  Space s = Space::euclidean(2, LpExponent::l2());
  PointCloud cloud(s, {{0.0, 0.0}, {1.0, 0.0}}, 0);
  Molecule mu = make_molecule(cloud, {{1, 1.0}});
  KaltonDecomposition dec = kalton_decompose(cloud, mu);
  REQUIRE(dec.layers.size() == 1);
  CHECK(dec.layers[0].n == 0);
  REQUIRE(dec.layers[0].layer.support.size() == 1);
  CHECK(dec.layers[0].layer.support[0].weight == 1.0);
  CHECK(dec.layers[0].kr_norm == doctest::Approx(1.0));
  CHECK(dec.ratio == doctest::Approx(1.0));
  // Zero molecule: empty decomposition.
  Molecule zero = make_molecule(cloud, {});
  CHECK(kalton_decompose(cloud, zero).layers.empty());
}

TEST_CASE("kalton decompose: support in annuli, exact reconstruction, 45 bound") {
  Rng rng(149);
  for (int t = 0; t < 200; ++t) {
    std::size_t k = 1 + rng.index(12);
    std::vector<Point> pts{Point{0.0, 0.0}};
    for (std::size_t i = 0; i < k; ++i) {
      double r = rng.log_uniform(std::ldexp(1.0, -4), std::ldexp(1.0, 4));
      double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
      pts.push_back(Point{r * std::cos(th), r * std::sin(th)});
    }
    PointCloud cloud(Space::euclidean(2, LpExponent::l2()), std::move(pts), 0);
    std::vector<MoleculeTerm> terms;
    for (std::size_t i = 0; i < k; ++i) terms.push_back({i + 1, rng.uniform(-2.0, 2.0)});
    Molecule mu = make_molecule(cloud, std::move(terms));
    if (mu.empty()) continue;
    KaltonDecomposition dec = kalton_decompose(cloud, mu);
    double scale = 0.0;
    for (const auto& term : mu.support) scale = std::max(scale, std::fabs(term.weight));
    REQUIRE(kalton_reconstruction_error(cloud, mu, dec) <= 1e-12 * scale);
    REQUIRE(dec.ratio <= 45.0);
    for (const auto& layer : dec.layers) {
      double lo = std::ldexp(1.0, layer.n - 1), hi = std::ldexp(1.0, layer.n + 1);
      for (const auto& term : layer.layer.support) {
        double d = cloud.distance(term.point, 0);
        REQUIRE(d >= lo - 1e-15 * lo);
        REQUIRE(d <= hi + 1e-15 * hi);
      }
    }
  }
}

// --- KR norm -------------------------------------------------------------------------

TEST_CASE("kr_norm: evaluation functionals and differences") {
  Space s = Space::euclidean(2, LpExponent::l2());
  PointCloud cloud(s, {{0.0, 0.0}, {3.0, 4.0}, {-1.0, 0.0}}, 0);
  CHECK(kr_norm(cloud, make_molecule(cloud, {{1, 1.0}})) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(kr_norm(cloud, make_molecule(cloud, {{1, 1.0}, {2, -1.0}})) ==
        doctest::Approx(cloud.distance(1, 2)).epsilon(1e-12));
  CHECK(kr_norm(cloud, make_molecule(cloud, {})) == 0.0);
  // Base-point weights are dropped on construction.
  Molecule with_base = make_molecule(cloud, {{0, 3.0}, {1, 2.0}});
  CHECK(with_base.support.size() == 1);
  CHECK(kr_norm(cloud, with_base) == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("kr_norm: LP and flow routes agree on random molecules") {
  Rng rng(151);
  double worst = 0.0;
  for (int t = 0; t < 300; ++t) {
    std::size_t k = 1 + rng.index(8);
    std::vector<Point> pts{Point{0.0, 0.0}};
    for (std::size_t i = 0; i < k; ++i) {
      double r = rng.log_uniform(std::ldexp(1.0, -4), std::ldexp(1.0, 4));
      double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
      pts.push_back(Point{r * std::cos(th), r * std::sin(th)});
    }
    PointCloud cloud(Space::euclidean(2, LpExponent::l2()), std::move(pts), 0);
    std::vector<MoleculeTerm> terms;
    for (std::size_t i = 0; i < k; ++i) terms.push_back({i + 1, rng.uniform(-2.0, 2.0)});
    Molecule mu = make_molecule(cloud, std::move(terms));
    if (mu.empty()) continue;
    KrResult kr = kr_norm_detailed(cloud, mu);
    worst = std::max(worst, std::fabs(kr.lp_value - kr.flow_value));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("kr_norm: seminorm properties and duality consistency") {
  Rng rng(157);
  PointCloud cloud = random_cloud(rng, 9);
  for (int t = 0; t < 60; ++t) {
    std::vector<MoleculeTerm> ta, tb;
    for (std::size_t i = 1; i < 9; ++i) {
      if (rng.uniform() < 0.6) ta.push_back({i, rng.uniform(-1.0, 1.0)});
      if (rng.uniform() < 0.6) tb.push_back({i, rng.uniform(-1.0, 1.0)});
    }
    Molecule a = make_molecule(cloud, ta), b = make_molecule(cloud, tb);
    double na = kr_norm(cloud, a), nb = kr_norm(cloud, b);
    double alpha = rng.uniform(-3.0, 3.0);
    std::vector<MoleculeTerm> scaled;
    for (auto term : a.support) scaled.push_back({term.point, alpha * term.weight});
    CHECK(kr_norm(cloud, make_molecule(cloud, scaled)) ==
          doctest::Approx(std::fabs(alpha) * na).epsilon(1e-8));
    std::map<std::size_t, double> sum;
    for (auto term : a.support) sum[term.point] += term.weight;
    for (auto term : b.support) sum[term.point] += term.weight;
    std::vector<MoleculeTerm> merged;
    for (auto& [p, w] : sum) merged.push_back({p, w});
    CHECK(kr_norm(cloud, make_molecule(cloud, merged)) <= na + nb + 1e-8);
    // Duality: any 1-Lipschitz f vanishing at the base pairs below the norm.
    std::vector<double> f = random_values(rng, 9);
    double fn = lip_norm(cloud, f);
    if (fn > 0)
      for (double& v : f) v /= fn;
    double pairing = 0.0;
    for (auto term : a.support) pairing += term.weight * f[term.point];
    CHECK(pairing <= na + 1e-8);
  }
}

TEST_CASE("kr_norm handles colinear supports (triangle equality cases)") {
  // Points on a ray make d(i,j) + d(i,0) - d(j,0) hit zero up to rounding;
  // the LP must not reject those constraints.
  Space s = Space::euclidean(2, LpExponent::l2());
  PointCloud cloud(s, {{0.0, 0.0}, {0.1, 0.0}, {0.3, 0.0}, {0.7, 0.0}}, 0);
  Molecule diff = make_molecule(cloud, {{2, 1.0}, {1, -1.0}});
  CHECK(kr_norm(cloud, diff) == doctest::Approx(0.2).epsilon(1e-12));
  Molecule mix = make_molecule(cloud, {{1, 0.5}, {2, -1.25}, {3, 0.5}});
  KrResult kr = kr_norm_detailed(cloud, mix);
  CHECK(std::fabs(kr.lp_value - kr.flow_value) <= 1e-8);
  Rng rng(167);
  for (int t = 0; t < 200; ++t) {
    std::vector<Point> pts{Point{0.0, 0.0}};
    std::size_t k = 2 + rng.index(6);
    for (std::size_t i = 0; i < k; ++i) pts.push_back(Point{rng.uniform(0.01, 2.0), 0.0});
    std::vector<MoleculeTerm> terms;
    for (std::size_t i = 0; i < k; ++i) terms.push_back({i + 1, rng.uniform(-1.0, 1.0)});
    PointCloud line(s, std::move(pts), 0);
    Molecule mu = make_molecule(line, std::move(terms));
    if (mu.empty()) continue;
    KrResult r = kr_norm_detailed(line, mu);
    REQUIRE(std::fabs(r.lp_value - r.flow_value) <= 1e-8);
  }
}

TEST_CASE("kr_norm: the optimal LP potential certifies the value") {
  Rng rng(163);
  PointCloud cloud = random_cloud(rng, 7);
  std::vector<MoleculeTerm> terms;
  for (std::size_t i = 1; i < 7; ++i) terms.push_back({i, rng.uniform(-1.0, 1.0)});
  Molecule mu = make_molecule(cloud, terms);
  KrResult kr = kr_norm_detailed(cloud, mu);
  // The recovered potential is feasible (slopes <= 1 against all nodes)
  // and attains the LP value.
  double attained = 0.0;
  for (std::size_t i = 0; i < mu.support.size(); ++i)
    attained += mu.support[i].weight * kr.potentials[i];
  CHECK(attained == doctest::Approx(kr.lp_value).epsilon(1e-9));
  for (std::size_t i = 0; i < mu.support.size(); ++i) {
    CHECK(std::fabs(kr.potentials[i]) <=
          cloud.distance(mu.support[i].point, 0) + 1e-9);
    for (std::size_t j = i + 1; j < mu.support.size(); ++j)
      CHECK(std::fabs(kr.potentials[i] - kr.potentials[j]) <=
            cloud.distance(mu.support[i].point, mu.support[j].point) + 1e-9);
  }
}

TEST_CASE("kr_norm: solver disagreement raises an internal error") {
  Space s = Space::euclidean(2, LpExponent::l2());
  PointCloud cloud(s, {{0.0, 0.0}, {1.0, 0.0}}, 0);
  Molecule mu = make_molecule(cloud, {{1, 1.0}});
  CHECK_THROWS_AS((void)kr_norm_detailed(cloud, mu, 1e-3), internal_error);
}
