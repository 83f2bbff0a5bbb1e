#include <cmath>

#include "doctest.h"
#include "generators.hpp"
#include "qswitch/errors.hpp"
#include "qswitch/hamiltonians.hpp"
#include "qswitch/units.hpp"

using namespace qswitch;
using Eigen::MatrixXcd;

namespace {

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c) out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

MatrixXcd kron(std::initializer_list<MatrixXcd> factors) {
  MatrixXcd out = MatrixXcd::Identity(1, 1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

MatrixXcd lower(int d) {
  MatrixXcd a = MatrixXcd::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

MatrixXcd I(int d) { return MatrixXcd::Identity(d, d); }

// sigma^- = |g><g|... written out by hand: |g> = 0, |e> = 1
MatrixXcd sminus() {
  MatrixXcd s = MatrixXcd::Zero(2, 2);
  s(0, 1) = 1.0;
  return s;
}

MatrixXcd sz() {
  MatrixXcd s = MatrixXcd::Zero(2, 2);
  s(0, 0) = -1.0;
  s(1, 1) = 1.0;
  return s;
}

struct TwoMode {
  ResonatorSpec a{"A", 5.19, 3, 0.0, ResonatorRole::storage};
  ResonatorSpec b{"B", 5.23, 3, 0.0, ResonatorRole::storage};
  SwitchSpec spec{"s", 2, 5.0, 0.019, 0.021, 0.0, 0.0, 0.0};
  LayoutPtr layout = make_layout({{"A", SubsystemKind::boson, 3},
                                  {"B", SubsystemKind::boson, 3},
                                  {"s.q1", SubsystemKind::qubit, 2},
                                  {"s.q2", SubsystemKind::qubit, 2}});
  SwitchPlacement sw = place_switch(spec, QubitCollection({"s.q1", "s.q2"}), a, b);
};

}  // namespace

TEST_CASE("dispersive coefficients") {
  // g = 19 MHz, Delta = -190 MHz on both sides: chi = g_ab = -1.9 MHz
  const auto c = dispersive_coefficients(0.019, 0.019, -0.19, -0.19);
  CHECK(std::abs(c.chi_a + 0.0019) < 1e-15);
  CHECK(std::abs(c.g_ab + 0.0019) < 1e-15);
  const auto d = dispersive_coefficients(0.018, 0.02, -0.18, -0.2);
  CHECK(std::abs(d.g_ab - 0.018 * 0.02 * (-0.38) / (2 * 0.18 * 0.2)) < 1e-15);
  CHECK_THROWS_AS(dispersive_coefficients(0.01, 0.01, 0.0, -0.1), ResonanceError);
}

TEST_CASE("dispersive hamiltonian matches a hand-built kronecker form") {
  TwoMode m;
  const Operator H = build_dispersive(m.layout, m.a, m.b, m.sw);
  const auto& c = m.sw.coeffs;
  const MatrixXcd a = kron({lower(3), I(3), I(2), I(2)});
  const MatrixXcd b = kron({I(3), lower(3), I(2), I(2)});
  const MatrixXcd s1 = kron({I(3), I(3), sminus(), I(2)});
  const MatrixXcd s2 = kron({I(3), I(3), I(2), sminus()});
  const MatrixXcd jz = kron({I(3), I(3), sz(), I(2)}) + kron({I(3), I(3), I(2), sz()});
  const MatrixXcd jm = s1 + s2;
  const MatrixXcd na = a.adjoint() * a, nb = b.adjoint() * b;
  const MatrixXcd id = I(36);
  MatrixXcd ref = m.a.omega_ghz * na + m.b.omega_ghz * nb;
  ref += (0.5 * m.spec.omega_q_ghz * id + c.chi_a * na + c.chi_b * nb) * jz;
  ref += c.g_ab * (a * b.adjoint() + a.adjoint() * b) * jz;
  ref += (c.chi_a + c.chi_b) * jm.adjoint() * jm;
  ref *= kTwoPi;
  CHECK((H.dense() - ref).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(H.is_hermitian());
}

TEST_CASE("exchange-coupled reference matches a hand-built form") {
  TwoMode m;
  m.spec.pair_coupling_ghz = 0.003;
  m.sw = place_switch(m.spec, QubitCollection({"s.q1", "s.q2"}), m.a, m.b);
  const ResonatorSpec res[] = {m.a, m.b};
  const SwitchPlacement sws[] = {m.sw};
  const Operator H = build_jc_reference(m.layout, res, sws);
  const MatrixXcd a = kron({lower(3), I(3), I(2), I(2)});
  const MatrixXcd b = kron({I(3), lower(3), I(2), I(2)});
  const MatrixXcd s1 = kron({I(3), I(3), sminus(), I(2)});
  const MatrixXcd s2 = kron({I(3), I(3), I(2), sminus()});
  MatrixXcd ref = m.a.omega_ghz * a.adjoint() * a + m.b.omega_ghz * b.adjoint() * b;
  for (const MatrixXcd& s : {s1, s2}) {
    const MatrixXcd z = s.adjoint() * s - s * s.adjoint();
    ref += 0.5 * m.spec.omega_q_ghz * z;
    ref += m.spec.g_a_ghz * (a * s.adjoint() + a.adjoint() * s);
    ref += m.spec.g_b_ghz * (b * s.adjoint() + b.adjoint() * s);
  }
  ref += 0.003 * (s1.adjoint() * s2 + s2.adjoint() * s1);
  ref *= kTwoPi;
  CHECK((H.dense() - ref).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("network and chain builders") {
  TwoMode m;
  const ResonatorSpec res[] = {m.a, m.b};
  const SwitchPlacement sws[] = {m.sw};
  const Operator chain = build_chain_dispersive(m.layout, res, sws);
  CHECK((chain - build_dispersive(m.layout, m.a, m.b, m.sw)).max_abs() < 1e-12);
  const ResonatorSpec reversed[] = {m.b, m.a};
  CHECK_NOTHROW(build_chain_dispersive(m.layout, reversed, sws));
  CHECK_THROWS_AS(build_dispersive(m.layout, m.b, m.a, m.sw), std::invalid_argument);
}

TEST_CASE("storage effective model") {
  const ResonatorSpec A{"A", 5.18, 3, 0.0, ResonatorRole::storage};
  const ResonatorSpec B{"B", 5.20, 2, 0.0, ResonatorRole::bus};
  const ResonatorSpec C{"C", 5.18, 3, 0.0, ResonatorRole::storage};
  auto L = make_layout({{"A", SubsystemKind::boson, 3},
                        {"B", SubsystemKind::boson, 2},
                        {"C", SubsystemKind::boson, 3},
                        {"x.q1", SubsystemKind::qubit, 2},
                        {"x.q2", SubsystemKind::qubit, 2},
                        {"y.q1", SubsystemKind::qubit, 2},
                        {"y.q2", SubsystemKind::qubit, 2}});
  const SwitchSpec sx{"x", 2, 5.0, 0.018, 0.02, 0, 0, 0}, sy{"y", 2, 5.0, 0.02, 0.018, 0, 0, 0};
  const SwitchPlacement sws[] = {place_switch(sx, QubitCollection({"x.q1", "x.q2"}), A, B),
                                 place_switch(sy, QubitCollection({"y.q1", "y.q2"}), B, C)};
  const ResonatorSpec res[] = {A, B, C};
  const Operator H = build_storage_effective(L, res, sws);
  CHECK(H.is_hermitian());
  // A <-> C matrix element on |1,0,0,gggg> -> |0,0,1,gggg>: 2 pi g1 g2 / Delta_sb * (-2)(-2)
  const int from[] = {1, 0, 0, 0, 0, 0, 0};
  const int to[] = {0, 0, 1, 0, 0, 0, 0};
  const double g1 = sws[0].coeffs.g_ab, g2 = sws[1].coeffs.g_ab;
  const cplx elem = H.element(L->compose(to), L->compose(from));
  CHECK(std::abs(elem - cplx(kTwoPi * 4.0 * g1 * g2 / (5.18 - 5.20))) < 1e-12);
  const ResonatorSpec bad[] = {A, C, B};
  CHECK_THROWS_AS(build_storage_effective(L, bad, sws), std::invalid_argument);
  const ResonatorSpec flat[] = {A, {"B", 5.18, 2, 0.0, ResonatorRole::bus}, C};
  CHECK_THROWS_AS(build_storage_effective(L, flat, sws), ResonanceError);
}

TEST_CASE("kerr model terms") {
  auto L = make_layout({{"A", SubsystemKind::boson, 3}, {"t", SubsystemKind::transmon, 3}});
  const ResonatorSpec res[] = {{"A", 5.0, 3, 0.0, ResonatorRole::storage}};
  const TransmonSpec tr[] = {{"t", 4.5, -0.3, 3, "A", "", -0.002, 0.0}};
  const Operator H = build_full_kerr(L, res, tr, {});
  // |1, 2>: 5 + 2*4.5 + (alpha/2)*2 + chi*2
  const int lv[] = {1, 2};
  const auto i = L->compose(lv);
  const double expect = kTwoPi * (5.0 + 9.0 - 0.3 - 0.004);
  CHECK(std::abs(H.element(i, i) - expect) < 1e-12);
}

TEST_CASE("distant coupling arithmetic") {
  const double g[] = {0.0038, 0.0038};
  CHECK(distant_coupling(g, -0.02, 3) == doctest::Approx(0.0038 * 0.0038 / -0.02).epsilon(1e-15));
  const double g3[] = {0.002, 0.003, 0.004};
  CHECK(distant_coupling(g3, 0.01, 4) == doctest::Approx(0.002 * 0.003 * 0.004 / 1e-4).epsilon(1e-14));
  CHECK_THROWS_AS(distant_coupling(g, 0.0, 3), ResonanceError);
  CHECK_THROWS_AS(distant_coupling(g, 0.1, 4), std::invalid_argument);
}
