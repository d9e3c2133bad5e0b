// Acceptance suite: one case per pinned criterion, each printing a pass/fail
// line with its measured runtime. Run via ctest (-R acceptance) or directly.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <regex>

#include "liporos/cli.hpp"
#include "liporos/verify.hpp"

using namespace liporos;

namespace {

constexpr std::uint64_t kSeed = 20250808;

void report_line(int criterion, const char* label, bool pass, double seconds,
                 const std::string& extra = {}) {
  std::printf("[criterion %2d] %s  %s (%.2fs)%s%s\n", criterion, pass ? "PASS" : "FAIL", label,
              seconds, extra.empty() ? "" : "  ", extra.c_str());
  std::fflush(stdout);
}

}  // namespace

TEST_CASE("criterion 1: power lattice constants 4, 5, 1/5 at N=12") {
  CheckResult r = power_lattice_check(12);
  report_line(1, "power lattice (exact, zero tolerance)", r.pass, r.seconds,
              "worst4=" + std::to_string(r.details["max_sum_over_distance"].get<double>()) +
                  " lip=" + std::to_string(r.details["retraction_lip"].get<double>()) +
                  " lambda=" + std::to_string(r.details["quotient_lambda"].get<double>()));
  CHECK(r.details["max_sum_over_distance"].get<double>() <= 4.0);
  CHECK(r.details["retraction_lip"].get<double>() <= 5.0);
  CHECK(r.details["quotient_lambda"].get<double>() >= 0.2);
  REQUIRE(r.pass);
  CHECK(r.seconds <= 10.0);
}

TEST_CASE("criterion 2: square lattice hole ratio <= 4/n + 2h/r") {
  CheckResult r = square_lattice_check({5, 10, 20}, 1.0 / 64.0);
  std::string ratios;
  for (const auto& rec : r.details["records"])
    ratios += std::to_string(rec["hole_ratio"].get<double>()) + " ";
  report_line(2, "square lattice witness balls", r.pass, r.seconds, "ratios=" + ratios);
  for (const auto& rec : r.details["records"])
    CHECK(rec["hole_ratio"].get<double>() <=
          4.0 / double(rec["n"].get<std::size_t>()) + 2.0 / 64.0);
  REQUIRE(r.pass);
  CHECK(r.seconds <= 60.0);
}

TEST_CASE("criterion 3: Kalton partition, reconstruction, 45-bound") {
  CheckResult r = kalton_check(100000, 1000, kSeed);
  report_line(3, "Kalton suite", r.pass, r.seconds,
              "max_ratio=" + std::to_string(r.details["max_layer_ratio"].get<double>()));
  CHECK(r.details["worst_partition_error"].get<double>() <= 1e-12);
  CHECK(r.details["worst_reconstruction_error"].get<double>() <= 1e-12);
  CHECK(r.details["max_layer_ratio"].get<double>() <= 45.0);
  REQUIRE(r.pass);
  CHECK(r.seconds <= 120.0);
}

TEST_CASE("criterion 4: KR solver cross-validation") {
  CheckResult r = kr_cross_check(1000, 10, 1000, kSeed);
  report_line(4, "KR norm LP vs min-cost flow", r.pass, r.seconds,
              "worst_gap=" + std::to_string(r.details["worst_lp_flow_gap"].get<double>()));
  CHECK(r.details["worst_lp_flow_gap"].get<double>() <= 1e-8);
  CHECK(r.details["worst_two_point_error"].get<double>() <= 1e-10);
  REQUIRE(r.pass);
  CHECK(r.seconds <= 60.0);
}

TEST_CASE("criterion 5: glue operator bound over certified families") {
  CheckResult r = glue_check(100, kSeed);
  report_line(5, "glue norm <= 1/lambda", r.pass, r.seconds,
              "worst_excess=" + std::to_string(r.details["worst_excess_over_bound"].get<double>()));
  CHECK(r.details["worst_excess_over_bound"].get<double>() <= 1e-9);
  CHECK(r.details["quotient_lambda"].get<double>() >= 0.2);
  REQUIRE(r.pass);
  CHECK(r.seconds <= 30.0);
}

TEST_CASE("criterion 6: annuli family separation 1/16") {
  CheckResult r = annuli_check(6, 1000, 10000, kSeed);
  report_line(6, "dyadic annuli", r.pass, r.seconds,
              "lambda=" + std::to_string(r.details["lambda"].get<double>()));
  CHECK(r.details["lambda"].get<double>() >= 1.0 / 16.0);
  CHECK(r.details["worst_sampled_ratio"].get<double>() >= r.details["lambda"].get<double>());
  REQUIRE(r.pass);
  CHECK(r.seconds <= 10.0);
}

TEST_CASE("criterion 7: extractor regimes reach 1/4 and 1/2") {
  CheckResult r = extractor_check(kSeed);
  report_line(7, "well-separated extractor", r.pass, r.seconds,
              "shrinking=" + std::to_string(r.details["shrinking"]["lambda"].get<double>()) +
                  " growing=" + std::to_string(r.details["growing"]["lambda"].get<double>()));
  CHECK(r.details["shrinking"]["lambda"].get<double>() >= 0.25);
  CHECK(r.details["growing"]["lambda"].get<double>() >= 0.5);
  CHECK(r.details["shrinking"]["sampled_min_ratio"].get<double>() >=
        r.details["shrinking"]["lambda"].get<double>());
  CHECK(r.details["growing"]["sampled_min_ratio"].get<double>() >=
        r.details["growing"]["lambda"].get<double>());
  REQUIRE(r.pass);
  CHECK(r.seconds <= 30.0);
}

TEST_CASE("criterion 8: density transfer never fails under its hypotheses") {
  CheckResult r = density_transfer_check(1000, kSeed);
  report_line(8, "geodesic density transfer", r.pass, r.seconds,
              "trials=" + std::to_string(r.details["trials"].get<std::size_t>()));
  CHECK(r.details["trials"].get<std::size_t>() == 1000);
  CHECK(r.details["failures"].get<std::size_t>() == 0);
  REQUIRE(r.pass);
  CHECK(r.seconds <= 60.0);
}

TEST_CASE("criterion 9: Heisenberg metric structure") {
  CheckResult r = heisenberg_check(1000, kSeed, 1e-10);
  report_line(9, "Carnot-Caratheodory solver", r.pass, r.seconds,
              "li=" + std::to_string(r.details["worst_left_invariance"].get<double>()) +
                  " dil=" + std::to_string(r.details["worst_dilation"].get<double>()));
  CHECK(r.details["worst_left_invariance"].get<double>() <= 1e-9);
  CHECK(r.details["worst_dilation"].get<double>() <= 1e-9);
  CHECK(r.details["worst_vertical_error"].get<double>() <= 1e-6);
  CHECK(r.details["worst_midpoint_error"].get<double>() <= 1e-6);
  REQUIRE(r.pass);
  CHECK(r.seconds <= 60.0);
}

TEST_CASE("criterion 10: McShane restriction identity and constant") {
  CheckResult r = mcshane_check(100, kSeed);
  report_line(10, "McShane extension", r.pass, r.seconds,
              "excess=" + std::to_string(r.details["worst_constant_excess"].get<double>()));
  CHECK(r.details["restriction_exact"].get<bool>());
  CHECK(r.details["worst_constant_excess"].get<double>() <= 1e-9);
  REQUIRE(r.pass);
  CHECK(r.seconds <= 30.0);
}

TEST_CASE("criterion 11: verify-suite determinism under a fixed seed") {
  namespace fs = std::filesystem;
  detail::Stopwatch timer;
  fs::path dir = fs::temp_directory_path() / "liporos_acceptance_det";
  fs::create_directories(dir);
  std::string a = (dir / "a.json").string(), b = (dir / "b.json").string();
  int rc1 = cli::run({"verify-suite", "--seed", "424242", "--out", a});
  int rc2 = cli::run({"verify-suite", "--seed", "424242", "--out", b});
  auto strip = [](std::string text) {
    static const std::regex ts("\"timestamp\": \"[^\"]*\"");
    return std::regex_replace(text, ts, "\"timestamp\": \"X\"");
  };
  bool same = strip(read_file(a)) == strip(read_file(b));
  bool pass = rc1 == 0 && rc2 == 0 && same;
  report_line(11, "verify-suite byte determinism", pass, timer.seconds());
  CHECK(rc1 == 0);
  CHECK(rc2 == 0);
  REQUIRE(same);
  std::error_code ec;
  fs::remove_all(dir, ec);
}
