#include <doctest.h>

#include <cmath>

#include "liporos/cloud.hpp"
#include "liporos/lipschitz.hpp"
#include "liporos/quotient.hpp"
#include "liporos/showcase.hpp"

using namespace liporos;

namespace {

PointCloud random_cloud(Rng& rng, std::size_t n, double side = 1.0) {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i)
    pts.push_back(Point{rng.uniform(0.0, side), rng.uniform(0.0, side)});
  return PointCloud(Space::euclidean(2, LpExponent::l2()), std::move(pts), 0);
}

}  // namespace

TEST_CASE("cloud construction rejects duplicates and bad base") {
  Space s = Space::euclidean(2, LpExponent::l2());
  CHECK_THROWS_AS(PointCloud(s, {{0.0, 0.0}, {0.0, 0.0}}, 0), input_error);
  CHECK_THROWS_AS(PointCloud(s, {{0.0, 0.0}, {1.0, 0.0}}, 2), input_error);
  CHECK_THROWS_AS(PointCloud(s, {}, 0), input_error);
}

TEST_CASE("lip_norm on two-point clouds") {
  Space s = Space::euclidean(2, LpExponent::l2());
  PointCloud cloud(s, {{0.0, 0.0}, {3.0, 4.0}}, 0);
  // f(x) = d(x, 0) is 1-Lipschitz and tight on {0, x}.
  CHECK(lip_norm(cloud, std::vector<double>{0.0, 5.0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(lip_norm(cloud, std::vector<double>{0.0, -2.5}) == doctest::Approx(0.5).epsilon(1e-15));
  PointCloud single(s, {{0.0, 0.0}}, 0);
  CHECK_THROWS_AS((void)lip_norm(single, std::vector<double>{0.0}), input_error);
}

TEST_CASE("lip_norm of a distance function is 1") {
  Rng rng(5);
  PointCloud cloud = random_cloud(rng, 40);
  std::vector<double> f(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) f[i] = cloud.distance(i, 0);
  double norm = lip_norm(cloud, f);
  CHECK(norm <= 1.0 + 1e-12);
  CHECK(norm >= 0.99);  // some pair nearly aligned with the base realizes it
}

TEST_CASE("lip_norm seminorm properties") {
  Rng rng(17);
  PointCloud cloud = random_cloud(rng, 25);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> f(cloud.size()), g(cloud.size());
    for (std::size_t i = 1; i < cloud.size(); ++i) {
      f[i] = rng.uniform(-1, 1);
      g[i] = rng.uniform(-1, 1);
    }
    double a = rng.uniform(-3, 3);
    std::vector<double> af(f), fg(f);
    for (std::size_t i = 0; i < f.size(); ++i) {
      af[i] *= a;
      fg[i] += g[i];
    }
    CHECK(lip_norm(cloud, af) == doctest::Approx(std::fabs(a) * lip_norm(cloud, f)).epsilon(1e-12));
    CHECK(lip_norm(cloud, fg) <= lip_norm(cloud, f) + lip_norm(cloud, g) + 1e-12);
  }
  std::vector<double> zero(cloud.size(), 0.0);
  CHECK(lip_norm(cloud, zero) == 0.0);
}

TEST_CASE("rescaling invariance: dilation multiplies the norm exactly") {
  Rng rng(23);
  PointCloud cloud = random_cloud(rng, 30);
  std::vector<double> f(cloud.size());
  for (std::size_t i = 1; i < cloud.size(); ++i) f[i] = rng.uniform(-1, 1);
  const Space& s = cloud.space();
  for (double lam : {0.5, 2.0, 8.0}) {
    std::vector<Point> scaled;
    for (const auto& p : cloud.points()) scaled.push_back(s.dilate(p, lam));
    PointCloud dilated(s, std::move(scaled), 0);
    auto w0 = lip_norm_witness(cloud, f);
    auto w1 = lip_norm_witness(dilated, f);
    CHECK(w1.slope == doctest::Approx(w0.slope / lam).epsilon(1e-12));
    CHECK(w0.i == w1.i);
    CHECK(w0.j == w1.j);
  }
}

TEST_CASE("lip functions must vanish at the base point") {
  Space s = Space::euclidean(2, LpExponent::l2());
  PointCloud cloud(s, {{0.0, 0.0}, {1.0, 0.0}}, 0);
  CHECK_THROWS_AS((void)make_lip_function(cloud, {0.5, 1.0}), input_error);
  CHECK_THROWS_AS((void)make_lip_function(cloud, {0.0}), input_error);
  LipFunction f = make_lip_function(cloud, {0.0, 2.0});
  CHECK(lip_norm(cloud, f) == doctest::Approx(2.0));
}

TEST_CASE("rebase shifts values and preserves the norm") {
  Rng rng(29);
  PointCloud cloud = random_cloud(rng, 20);
  std::vector<double> f(cloud.size());
  for (std::size_t i = 1; i < cloud.size(); ++i) f[i] = rng.uniform(-1, 1);
  auto shifted = rebase_values(f, 7);
  CHECK(shifted[7] == 0.0);
  CHECK(lip_norm(cloud, shifted) == doctest::Approx(lip_norm(cloud, f)).epsilon(1e-15));
}

TEST_CASE("quotient metric formula and base class") {
  // Two points far apart, both at distance 1 from A: quotient distance 2.
  Space s = Space::euclidean(2, LpExponent::l2());
  PointCloud cloud(s, {{0.0, 0.0}, {0.0, 1.0}, {100.0, 0.0}, {100.0, 1.0}}, 0);
  QuotientSpace q(cloud, {0, 2});  // A = the two ground points
  CHECK(q.size() == 3);
  CHECK(q.base_index() == 0);
  CHECK(q.distance(1, 2) == doctest::Approx(2.0));  // min{100, 1+1}
  CHECK(q.distance(0, 1) == doctest::Approx(1.0));
  // Adjacent points keep their distance when it beats the detour through A.
  PointCloud cloud2(s, {{0.0, 0.0}, {5.0, 0.0}, {5.5, 0.0}}, 0);
  QuotientSpace q2(cloud2, {0});
  CHECK(q2.distance(1, 2) == doctest::Approx(0.5));
  CHECK_THROWS_AS(QuotientSpace(cloud2, {}), input_error);
  CHECK_THROWS_AS(QuotientSpace(cloud2, {0, 1, 2}), input_error);
}

TEST_CASE("quotient metric axioms exhaustively on a 200-point cloud") {
  Rng rng(31);
  PointCloud cloud = random_cloud(rng, 200);
  std::vector<std::size_t> subset;
  for (std::size_t i = 0; i < 40; ++i) subset.push_back(rng.index(200));
  // Construction verifies every triangle; reaching here is the assertion.
  QuotientSpace q(cloud, subset);
  for (std::size_t i = 0; i < q.size(); ++i) {
    CHECK(q.distance(i, i) == 0.0);
    for (std::size_t j = i + 1; j < q.size(); ++j) {
      CHECK(q.distance(i, j) == q.distance(j, i));
      CHECK(q.distance(i, j) > 0.0);
    }
  }
}

TEST_CASE("nearest point retraction: identity, ties, idempotence") {
  Space s = Space::euclidean(2, LpExponent::l2());
  PointCloud cloud(s, {{0.0, 0.0}, {2.0, 0.0}, {1.0, 0.0}, {1.0, 5.0}}, 0);
  Retraction r = nearest_point_retraction(cloud, {0, 1});
  CHECK(r.map[0] == 0);
  CHECK(r.map[1] == 1);
  CHECK(r.map[2] == 0);  // equidistant from 0 and 1: lowest index wins
  for (std::size_t i = 0; i < cloud.size(); ++i) CHECK(r.map[r.map[i]] == r.map[i]);
}

TEST_CASE("power lattice retraction is 5-Lipschitz at truncation 12") {
  LatticeSpec spec;
  spec.rule = LatticeSpec::Powers{2.0};
  spec.truncation = 12;
  spec.metric = LpExponent::l1();
  Lattice lat = build_lattice(spec);
  Retraction r = nearest_point_retraction(lat.cloud, lat.boundary);
  CHECK(r.lip_constant <= 5.0);
  // Frozen from the exhaustive pre-build scan.
  CHECK(r.lip_constant == doctest::Approx(3.998046875).epsilon(1e-12));
}
