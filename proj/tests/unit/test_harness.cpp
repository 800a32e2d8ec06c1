#include <doctest.h>

#include "holoquad/errors.hpp"
#include "holoquad/harness.hpp"
#include "oracles.hpp"

using namespace holoquad;
using oracle::cplx;

namespace {

const AffineSections kParallelogram{{0, 1, 0, 1}, {0, 0, 1, 1}, {}};
const AffineSections kTreeB{{0, -1, 0, 1}, {0, -1, -1, -2}, {}};
const AffineSections kTreeC{{-1, 0, 1, 0}, {-1, -1, -2, 0}, {}};

std::vector<double> sups(const SweepRecord& r) {
  std::vector<double> v(r.sup_ext.begin(), r.sup_ext.end());
  v.push_back(r.sup_int);
  v.push_back(r.sup_vertex);
  return v;
}

// membership from the region definitions, one predicate per open region
std::vector<std::string> regions_containing(const RegionDecomposition& R, cplx z) {
  const double d = R.delta, x = R.xi(), r = std::abs(z);
  std::vector<std::string> in;
  auto ext = [&](int k) { return "ext" + std::to_string(R.vertex_of[k]); };
  if (R.case_sign == 0) {
    if (r < d) in.push_back(ext(0));
    if (std::abs(z - x) < d) in.push_back(ext(1));
    if (std::abs(z - 1.0) < d) in.push_back(ext(2));
    if (r > 1 / d) in.push_back(ext(3));
    if (r > d && std::abs(z - x) > d && std::abs(z - 1.0) > d && r < 1 / d) in.push_back("remainder");
    return in;
  }
  const bool d0 = r < x * d, dx = std::abs(z - x) < x * d, d1 = std::abs(z - 1.0) < d, dinf = r > 1 / d;
  if (d0) in.push_back(ext(0));
  if (dx) in.push_back(ext(1));
  if (d1) in.push_back(ext(2));
  if (dinf) in.push_back(ext(3));
  if (r > x / d && r < d) in.push_back("int");
  if (r < x / d && !d0 && !dx) in.push_back("vertex_in");
  if (r > d && !d1 && !dinf) in.push_back("vertex_out");
  return in;
}

} // namespace

TEST_SUITE("harness") {

TEST_CASE("strip maps") {
  const double d = 0.2;
  CHECK(std::abs(phi_ext(0.0, d, 0, 0) - d) < 1e-16);
  for (double t : {-0.5, -2.0}) {
    const cplx w = phi_ext(0.0, d, t, 1);
    CHECK(std::abs(w - (-d * std::exp(M_PI * t))) < 1e-16);
  }
  CHECK(std::abs(phi_ext(INFINITY, d, 0, 0) - (-1 / d)) < 1e-15);
  CHECK(std::abs(phi_ext(0.3, d, -1, 0.5) - 0.3) < d);
  CHECK_THROWS_AS(phi_ext(0.0, d, 0.1, 0.5), DomainError);
  CHECK_THROWS_AS(phi_ext(0.0, d, -0.1, 1.5), DomainError);

  const double lx = std::log(1e-6);
  const StripBounds b = internal_strip(lx, d);
  CHECK_FALSE(b.empty());
  CHECK(std::abs(phi_int(-std::log(d) / M_PI, 1, b) - d) < 1e-15);
  CHECK(std::abs(phi_int(-(lx - std::log(d)) / M_PI, 1, b) - std::exp(lx) / d) < 1e-15 * std::exp(lx) / d);
  const cplx w = phi_int(0.5 * (b.lo + b.hi), 0, b);
  CHECK(w.real() < 0);
  CHECK(std::abs(w.imag()) < 1e-15 * std::abs(w));
  CHECK_THROWS_AS(phi_int(b.hi + 1, 0.5, b), DomainError);
  CHECK(internal_strip(std::log(0.5), d).empty());
}

TEST_CASE("regions cover the half plane once") {
  // disjoint disks need xi < delta^2 off the zero case, xi near 1/2 in it
  for (int cs : {-1, 0, 1})
    for (double lx : cs == 0 ? std::vector<double>{std::log(0.4), std::log(0.5)}
                             : std::vector<double>{std::log(1e-3), std::log(1e-12), -300.0}) {
      const RegionDecomposition R = make_regions(cs, cs < 0 ? 1 : 0, lx, cs == 0 ? 0.15 : 0.2);
      int boundary = 0;
      for (int k = 0; k < 10000; ++k) {
        // log-uniform radius so every scale is visited
        const double r = std::exp(oracle::uniform(std::min(lx, std::log(0.1)) - 3, 4));
        const cplx z = std::polar(r, oracle::uniform(0, M_PI));
        const std::string lab = R.region_of(z);
        const auto in = regions_containing(R, z);
        if (lab.empty()) {
          ++boundary;
          CHECK(in.size() <= 1);
          continue;
        }
        REQUIRE(in.size() == 1);
        CHECK(in[0] == lab);
      }
      CHECK(boundary < 10);
    }
}

TEST_CASE("vertex labels of the working chart") {
  const RegionDecomposition R0 = make_regions(1, 0, std::log(1e-4), 0.2);
  CHECK(R0.region_of(0.0) == "ext3");
  CHECK(R0.region_of(1e-4) == "ext4");
  CHECK(R0.region_of(1.0) == "ext1");
  CHECK(R0.region_of(cplx(0, 100)) == "ext2");
  const RegionDecomposition R1 = make_regions(-1, 1, std::log(1e-4), 0.2);
  CHECK(R1.region_of(0.0) == "ext4");
  CHECK(R1.region_of(cplx(0, 100)) == "ext3");
}

TEST_CASE("region decomposition from sections") {
  const RegionDecomposition R = region_decomposition(kTreeB, 0.01);
  CHECK(R.case_sign == 1);
  CHECK(R.delta == 0.2);
  CHECK_FALSE(R.strip.empty());
  const RegionDecomposition P = region_decomposition(kParallelogram, 0.01);
  CHECK(P.case_sign == 0);
  CHECK(P.delta == 0.15);
}

TEST_CASE("tree (b) sup errors shrink") {
  HarnessOptions opt;
  opt.delta = 0.2;
  const SweepRecord a = sup_error_report(kTreeB, 0.1, opt), b = sup_error_report(kTreeB, 0.01, opt);
  const auto sa = sups(a), sb = sups(b);
  for (std::size_t i = 0; i < sa.size(); ++i) {
    CHECK(sb[i] < sa[i]);
    CHECK(sb[i] >= 0);
  }
  CHECK(b.sup_int > 0);
  CHECK(std::isfinite(b.modulus));
}

TEST_CASE("parallelogram sup errors shrink") {
  const SweepRecord a = sup_error_report(kParallelogram, 0.1), b = sup_error_report(kParallelogram, 0.01);
  CHECK(a.sup_int == 0);
  for (int i = 0; i < 4; ++i) CHECK(b.sup_ext[i] < a.sup_ext[i]);
  CHECK(b.sup_vertex < a.sup_vertex);
}

TEST_CASE("sweeps and the internal edge length") {
  const std::vector<double> eps{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  const auto b = epsilon_sweep(kTreeB, eps);
  REQUIRE(b.size() == eps.size());
  for (std::size_t i = 1; i < b.size(); ++i) CHECK(b[i].log_z4 < b[i - 1].log_z4);
  CHECK(std::abs(b[2].l_estimate - 1) < 0.2);
  CHECK(std::abs(b[4].l_estimate - 1) < 0.05);

  const double lc = *build_tree(kTreeC).internal_length;
  const auto c = epsilon_sweep(kTreeC, eps);
  for (std::size_t i = 1; i < c.size(); ++i) CHECK(c[i].log1m_z4 < c[i - 1].log1m_z4);
  CHECK(std::abs(c[2].l_estimate / lc - 1) < 0.2);
  CHECK(std::abs(c[4].l_estimate / lc - 1) < 0.05);

  const auto p = epsilon_sweep(kParallelogram, eps);
  for (std::size_t i = 1; i < p.size(); ++i) CHECK(std::abs(p[i].z4 - 0.5) < std::abs(p[i - 1].z4 - 0.5));

  // tail of every sup sequence decreasing
  for (const auto* run : {&b, &c, &p}) {
    const auto s2 = sups((*run)[2]), s3 = sups((*run)[3]), s4 = sups((*run)[4]);
    for (std::size_t i = 0; i < s2.size(); ++i) {
      if (s2[i] == 0) continue;
      CHECK(s3[i] < s2[i]);
      CHECK(s4[i] < s3[i]);
    }
  }
}

TEST_CASE("threaded sweep matches the sequential one") {
  HarnessOptions opt;
  opt.threads = 3;
  const std::vector<double> eps{0.1, 0.05, 0.02};
  const auto a = epsilon_sweep(kTreeB, eps), b = epsilon_sweep(kTreeB, eps, opt);
  for (std::size_t i = 0; i < eps.size(); ++i) {
    CHECK(a[i].z4 == b[i].z4);
    CHECK(sups(a[i]) == sups(b[i]));
  }
}

TEST_CASE("rescaled evaluation near the small prevertex") {
  const SCQuadMap m = solve_prevertex(intersections(kTreeB, 0.05));
  REQUIRE(m.rotation() == 0);
  const double x = m.z4();
  for (cplx z : {cplx(0.3 * x, 0.2 * x), cplx(3 * x, x), cplx(30 * x, 5 * x)})
    CHECK(std::abs(m.evaluate(z) - m.evaluate_rescaled(z / x)) < 1e-8);
}

TEST_CASE("argument checks") {
  CHECK_THROWS_AS(epsilon_sweep(kTreeB, {0.1, 1e-7}), DomainError);
  CHECK_THROWS_AS(epsilon_sweep(kTreeB, {2.0}), DomainError);
  HarnessOptions opt;
  opt.delta = 0.7;
  CHECK_THROWS_AS(sup_error_report(kTreeB, 0.1, opt), DomainError);
  opt.delta = 0.0;
  CHECK_THROWS_AS(sup_error_report(kTreeB, 0.1, opt), DomainError);
  CHECK_THROWS_AS(boundary_collision_check(kTreeB, {0.1, 0.01}), DomainError);
}

TEST_CASE("grid doubling check") {
  HarnessOptions opt;
  opt.check_grid = true;
  const SweepRecord r = sup_error_report(kTreeB, 0.01, opt);
  CHECK_FALSE(r.grid_coarse);
}

TEST_CASE("boundary collision matches the tree shape") {
  std::vector<double> eps;
  for (int k = 0; k < 9; ++k) eps.push_back(std::pow(10.0, -1 - 2.0 * k / 8));
  const auto b = boundary_collision_check(kTreeB, eps);
  CHECK(b.target == "z3");
  CHECK(b.match);
  const auto c = boundary_collision_check(kTreeC, eps);
  CHECK(c.target == "z1");
  CHECK(c.match);
  const auto p = boundary_collision_check(kParallelogram, eps);
  CHECK(p.target == "1/2");
  CHECK(p.match);
}

} // TEST_SUITE
