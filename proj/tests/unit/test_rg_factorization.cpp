#include <doctest.h>

#include <random>

#include "bsmc/augment.hpp"
#include "bsmc/censor.hpp"
#include "bsmc/gth.hpp"
#include "bsmc/models.hpp"
#include "bsmc/rg_factorization.hpp"
#include "support/fixtures.hpp"

using namespace bsmc;

namespace {

BlockMatrix scalar_chain(const Eigen::MatrixXd& dense) {
  return BlockMatrix::from_dense(dense, std::vector<int>(static_cast<size_t>(dense.rows()), 1),
                                 std::vector<int>(static_cast<size_t>(dense.cols()), 1));
}

}  // namespace

TEST_CASE("single-level factorization is the pivot alone") {
  BlockMatrix p({2});
  Eigen::MatrixXd b(2, 2);
  b << 0.4, 0.6, 0.3, 0.7;
  p.set_block(0, 0, b);
  const rgfact::RGFactors f = rgfact::factorize(p);
  CHECK(f.r_upper.stored_blocks() == 0);
  CHECK(f.g_lower.stored_blocks() == 0);
  CHECK(f.phi[0] == b);
  CHECK(rgfact::residual(p, f) == 0.0);
}

TEST_CASE("symmetric two-level chain has unit R and G") {
  Eigen::MatrixXd dense(2, 2);
  dense << 0.5, 0.5, 0.5, 0.5;
  const BlockMatrix p = scalar_chain(dense);
  const rgfact::RGFactors f = rgfact::factorize(p);
  CHECK(f.r_upper.block(0, 1)(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f.g_lower.block(1, 0)(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f.phi[0](0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f.phi[1](0, 0) == 0.5);
  CHECK(rgfact::residual(p, f) <= 1e-15);

  const StationaryVector pi = rgfact::solve_by_factors(f);
  CHECK(pi.level(0)(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(pi.level(1)(0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("factors reproduce I - P and agree with GTH") {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 10; ++rep) {
    const BlockMatrix p = bsmc::testing::random_dense_chain(rng, 5, 3);
    const rgfact::RGFactors f = rgfact::factorize(p);
    CHECK(rgfact::residual(p, f) <= 1e-12);
    CHECK(f.r_upper.min_entry() >= 0.0);
    CHECK(f.g_lower.min_entry() >= 0.0);
    for (int i = 1; i < p.num_levels(); ++i) {
      for (int a = 0; a < p.row_phases(i); ++a) {
        double g_mass = 0.0;
        for (const BlockMatrix::Entry& e : f.g_lower.row(i)) g_mass += e.value.row(a).sum();
        CHECK(g_mass <= 1.0 + 1e-12);
      }
    }
    CHECK(rgfact::solve_by_factors(f).linf_distance(gth::solve(p)) <= 1e-12);
  }
}

TEST_CASE("zeroing R is detected by the residual") {
  std::mt19937_64 rng(43);
  BlockMatrix p = bsmc::testing::random_dense_chain(rng, 4, 2);
  while (p.num_levels() < 2) p = bsmc::testing::random_dense_chain(rng, 4, 2);
  rgfact::RGFactors f = rgfact::factorize(p);
  f.r_upper = BlockMatrix(p.row_phase_counts());
  CHECK(rgfact::residual(p, f) > 1e-6);
}

TEST_CASE("R and G are invariant under censoring") {
  std::mt19937_64 rng(45);
  BlockMatrix p = bsmc::testing::random_dense_chain(rng, 5, 3);
  while (p.num_levels() < 3) p = bsmc::testing::random_dense_chain(rng, 5, 3);
  const int N = p.num_levels() - 1;
  const rgfact::RGFactors full = rgfact::factorize(p);
  for (int n = 1; n < N; ++n) {
    const rgfact::RGFactors part = rgfact::factorize(censor::censor_prefix(p, n));
    for (int j = 1; j <= n; ++j)
      for (int i = 0; i < j; ++i) {
        CHECK((part.r_upper.block(i, j) - full.r_upper.block(i, j)).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((part.g_lower.block(j, i) - full.g_lower.block(j, i)).cwiseAbs().maxCoeff() <= 1e-12);
      }
  }
}

TEST_CASE("vacation model truncation: two-step RG solve equals GTH") {
  models::MxM1WvParams params;
  params.pmf_cutoff = 300;
  const mg1::MG1Spec spec = models::build_uniformized_spec(params);
  const BlockMatrix p = augment::natural_lbca(spec, 7);  // eight levels
  const rgfact::RGFactors f = rgfact::factorize(p);
  CHECK(rgfact::residual(p, f) <= 1e-12);
  CHECK(rgfact::solve_by_factors(f).linf_distance(gth::solve(p)) <= 1e-12);
}

TEST_CASE("level-0 identity from the truncated factor series") {
  // Phi_0 = B_0 + sum_k R_{0,k} (I - Phi_k) G_{k,0}, truncated where the R
  // mass falls below 1e-13; on a deep truncation of a down-drifting spec the
  // finite identity matches the infinite one to 1e-10.
  const mg1::MG1Spec spec = bsmc::testing::qbd_fixture(0);
  const BlockMatrix p = augment::natural_lbca(spec, 60);
  const rgfact::RGFactors f = rgfact::factorize(p);
  Eigen::MatrixXd sum = spec.boundary_diag;
  for (int k = 1; k <= 60; ++k) {
    const Eigen::MatrixXd* r = f.r_upper.find_block(0, k);
    if (r == nullptr || r->cwiseAbs().maxCoeff() < 1e-13) break;
    const Eigen::MatrixXd phi = f.phi[static_cast<size_t>(k)];
    sum += (*r) * (Eigen::MatrixXd::Identity(phi.rows(), phi.cols()) - phi) *
           f.g_lower.block(k, 0);
  }
  CHECK((sum - f.phi[0]).cwiseAbs().maxCoeff() <= 1e-10);
}
