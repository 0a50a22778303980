#include "doctest.h"

#include <random>

#include "spinchain/model.hpp"
#include "oracle.hpp"

using namespace spinchain;

TEST_CASE("bond terms follow the alternating pattern") {
  SUBCASE("N=2 has a single AF bond") {
    auto bonds = build_bond_terms({.n_sites = 2});
    REQUIRE(bonds.size() == 1);
    CHECK(bonds[0].kind == BondKind::AF);
    CHECK(bonds[0].left_site == 1);
    CHECK(bonds[0].right_site == 2);
  }
  SUBCASE("N=4 is AF,F,AF") {
    auto bonds = build_bond_terms({.n_sites = 4});
    REQUIRE(bonds.size() == 3);
    CHECK(bonds[0].kind == BondKind::AF);
    CHECK(bonds[1].kind == BondKind::F);
    CHECK(bonds[2].kind == BondKind::AF);
    for (size_t i = 0; i < bonds.size(); ++i) {
      CHECK(bonds[i].left_site == static_cast<int>(i + 1));
      CHECK(bonds[i].right_site == bonds[i].left_site + 1);
    }
  }
  SUBCASE("N=78 has 39 AF + 38 F bonds") {
    auto bonds = build_bond_terms({.n_sites = 78});
    REQUIRE(bonds.size() == 77);
    int af = 0, f = 0;
    for (const auto& b : bonds) (b.kind == BondKind::AF ? af : f)++;
    CHECK(af == 39);
    CHECK(f == 38);
  }
  SUBCASE("odd or too-small chains are rejected") {
    CHECK_THROWS_AS(build_bond_terms({.n_sites = 3}), std::invalid_argument);
    CHECK_THROWS_AS(build_bond_terms({.n_sites = 0}), std::invalid_argument);
  }
  SUBCASE("kind is AF iff left_site is odd") {
    for (const auto& b : build_bond_terms({.n_sites = 10}))
      CHECK((b.kind == BondKind::AF) == (b.left_site % 2 == 1));
  }
}

TEST_CASE("bond_matrix") {
  SUBCASE("isotropic Heisenberg has singlet-triplet splitting") {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(bond_matrix(1.0, 1.0));
    CHECK(es.eigenvalues()[0] == doctest::Approx(-0.75).epsilon(1e-14));
    for (int i = 1; i < 4; ++i)
      CHECK(es.eigenvalues()[i] == doctest::Approx(0.25).epsilon(1e-14));
  }
  SUBCASE("zero coupling gives the zero matrix") {
    CHECK(bond_matrix(0.0, 3.7).norm() == 0.0);
  }
  SUBCASE("XY point keeps only the flip element") {
    Eigen::Matrix4d m = bond_matrix(1.0, 0.0);
    CHECK(m(1, 2) == doctest::Approx(0.5));
    CHECK(m(2, 1) == doctest::Approx(0.5));
    CHECK(m.diagonal().norm() == 0.0);
  }
  SUBCASE("always symmetric") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int k = 0; k < 20; ++k) {
      Eigen::Matrix4d m = bond_matrix(dist(rng), dist(rng));
      CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("MPO contraction matches the Kronecker-assembled Hamiltonian") {
  SUBCASE("N=2 reduces to the single bond matrix") {
    ModelParams p{.n_sites = 2, .delta_af = 0.7};
    Eigen::MatrixXd dense = mpo_to_dense(build_mpo(p));
    CHECK((dense - bond_matrix(p.j_af, p.delta_af)).cwiseAbs().maxCoeff() < 1e-13);
  }
  SUBCASE("N=4 with paper defaults") {
    ModelParams p{.n_sites = 4, .delta_f = 1.0};
    Eigen::MatrixXd dense = mpo_to_dense(build_mpo(p));
    CHECK((dense - oracle::dense_hamiltonian(p)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("random parameters up to N=10") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int n : {2, 4, 6, 8, 10}) {
      ModelParams p{.n_sites = n,
                    .j_af = dist(rng),
                    .j_f = dist(rng),
                    .delta_af = dist(rng),
                    .delta_f = dist(rng)};
      Eigen::MatrixXd dense = mpo_to_dense(build_mpo(p));
      CHECK((dense - oracle::dense_hamiltonian(p)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  SUBCASE("bond dimension is 5") {
    auto mpo = build_mpo({.n_sites = 8});
    CHECK(mpo.bond_dimension == 5);
    CHECK(mpo.sites.front().left_dim == 1);
    CHECK(mpo.sites.back().right_dim == 1);
    for (int i = 0; i + 1 < 8; ++i) CHECK(mpo.sites[i].right_dim == 5);
  }
}

TEST_CASE("all-up product state sees only the Ising diagonal") {
  for (int n : {2, 6, 10}) {
    ModelParams p{.n_sites = n, .delta_f = 1.8};
    Eigen::MatrixXd dense = mpo_to_dense(build_mpo(p));
    const double expected =
        0.25 * (p.j_af * p.delta_af * (n / 2) + p.j_f * p.delta_f * (n / 2 - 1));
    CHECK(dense(0, 0) == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("Hamiltonian commutes with total Sz") {
  // H applied to a vector supported on one Sz sector stays in that sector
  ModelParams p{.n_sites = 8, .delta_f = 2.2};
  Eigen::MatrixXd h = oracle::dense_hamiltonian(p);
  Eigen::MatrixXd hm = mpo_to_dense(build_mpo(p));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const long dim = 1L << p.n_sites;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  for (long c = 0; c < dim; ++c)
    if (std::popcount(static_cast<unsigned long>(c)) == 4) v[c] = dist(rng);
  const Eigen::VectorXd hv = hm * v;
  for (long c = 0; c < dim; ++c)
    if (std::popcount(static_cast<unsigned long>(c)) != 4) CHECK(hv[c] == 0.0);
  CHECK((h * v - hv).cwiseAbs().maxCoeff() < 1e-12);
}
