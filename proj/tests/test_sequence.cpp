#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "triopf/sequence.hpp"

using namespace triopf;

namespace {
double cdist(Complex a, Complex b) { return std::abs(a - b); }
} // namespace

TEST_CASE("transformation matrix layout") {
    const Matrix3c A = fortescue_matrix();
    for (int j = 0; j < 3; ++j) {
        CHECK(A(0, j) == Complex{1.0, 0.0});
    }
    // a^2 = e^{j4pi/3}, checked against a direct cos/sin evaluation
    const Complex a2 = oracle::cexp(4.0 * kPi / 3.0);
    CHECK(cdist(A(1, 1), a2) < 1e-15);
    CHECK(A(1, 1).real() == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(A(1, 1).imag() == doctest::Approx(-0.8660254037844386).epsilon(1e-14));
    CHECK(cdist(A(1, 2), rotation_operator()) < 1e-15);
    CHECK(cdist(A(2, 1), rotation_operator()) < 1e-15);
}

TEST_CASE("matrix times inverse is identity") {
    const Matrix3c prod = fortescue_matrix() * fortescue_inverse();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const Complex want = i == j ? Complex{1.0, 0.0} : Complex{0.0, 0.0};
            CHECK(cdist(prod(i, j), want) < 1e-14);
        }
    }
}

TEST_CASE("equal sequence impedances collapse to scalar times identity") {
    const Complex z{1.0, 1.0};
    const Matrix3c zabc = sequence_to_phase({z, z, z});
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const Complex want = i == j ? z : Complex{0.0, 0.0};
            CHECK(cdist(zabc(i, j), want) < 1e-15);
        }
    }
}

TEST_CASE("distinct zero sequence against explicit matrix product") {
    const Complex z0{3.0, 3.0};
    const Complex z1{1.0, 1.0};
    const Matrix3c zabc = sequence_to_phase({z0, z1});
    const oracle::Mat3 ref = oracle::sequence_to_phase(z0, z1, z1);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            CHECK(cdist(zabc(i, j), ref[i][j]) < 1e-13);
        }
    }
    // closed form: diagonal (z0+2z1)/3, off-diagonal (z0-z1)/3
    CHECK(cdist(zabc(0, 0), (z0 + 2.0 * z1) / 3.0) < 1e-13);
    CHECK(cdist(zabc(0, 1), (z0 - z1) / 3.0) < 1e-13);
    CHECK(cdist(zabc(2, 0), (z0 - z1) / 3.0) < 1e-13);
}

TEST_CASE("phase matrix is symmetric when z1 equals z2") {
    const Matrix3c zabc = sequence_to_phase({Complex{0.3, 0.9}, Complex{0.1, 0.4}});
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            CHECK(cdist(zabc(i, j), zabc(j, i)) < 1e-12);
        }
    }
}

TEST_CASE("sequence round trip on random impedances") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int k = 0; k < 100; ++k) {
        const SequenceImpedance z{Complex{std::abs(dist(gen)), dist(gen)},
                                  Complex{std::abs(dist(gen)), dist(gen)},
                                  Complex{std::abs(dist(gen)), dist(gen)}};
        const SequenceImpedance back = phase_to_sequence(sequence_to_phase(z));
        CHECK(cdist(back.z0, z.z0) < 1e-12);
        CHECK(cdist(back.z1, z.z1) < 1e-12);
        CHECK(cdist(back.z2, z.z2) < 1e-12);
    }
}

TEST_CASE("sequence components of a balanced set") {
    const auto seq = sequence_components(slack_voltage(1.0));
    CHECK(std::abs(seq[0]) < 1e-15);
    CHECK(cdist(seq[1], Complex{1.0, 0.0}) < 1e-15);
    CHECK(std::abs(seq[2]) < 1e-15);
}

TEST_CASE("unbalance factor for a sagged phase") {
    // magnitudes 1, 1, 0.9 at nominal angles: |V1| = 2.9/3, |V2| = 0.1/3
    const Complex a = rotation_operator();
    const PhaseVoltage v{Complex{1.0, 0.0}, std::conj(a), 0.9 * a};
    CHECK(vuf(v) == doctest::Approx(0.1 / 2.9).epsilon(1e-12));
    CHECK(vuf(v) == doctest::Approx(0.034482758620689655).epsilon(1e-12));
}

TEST_CASE("unbalance factor is rotation invariant") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const PhaseVoltage base{Complex{1.02, 0.01}, Complex{-0.5, -0.9}, Complex{-0.49, 0.91}};
    const double ref = vuf(base);
    for (int k = 0; k < 20; ++k) {
        const Complex rot = oracle::cexp(dist(gen) * kPi);
        const PhaseVoltage v{rot * base[0], rot * base[1], rot * base[2]};
        CHECK(vuf(v) == doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("unbalance factor rejects vanishing positive sequence") {
    // a pure negative-sequence set: phases rotated the opposite way
    const Complex a = rotation_operator();
    const PhaseVoltage v{Complex{1.0, 0.0}, a, std::conj(a)};
    CHECK_THROWS_AS(vuf(v), DegenerateSequence);
}

TEST_CASE("balanced slack voltage") {
    const PhaseVoltage v = slack_voltage(1.0);
    CHECK(cdist(v[0], Complex{1.0, 0.0}) < 1e-15);
    CHECK(cdist(v[1], oracle::cexp(-2.0 * kPi / 3.0)) < 1e-15);
    CHECK(cdist(v[2], oracle::cexp(2.0 * kPi / 3.0)) < 1e-15);

    const PhaseVoltage w = slack_voltage(1.05);
    CHECK(w[1].real() == doctest::Approx(-0.525).epsilon(1e-12));
    CHECK(w[1].imag() == doctest::Approx(-0.909326673973661).epsilon(1e-12));

    for (double m : {0.5, 1.0, 1.05, 2.0}) {
        CHECK(vuf(slack_voltage(m)) < 1e-15);
    }
}
