#include "doctest.h"

#include <cmath>
#include <cstdint>

#include "uclab/pmf.hpp"
#include "uclab/rng.hpp"

using namespace uclab;

// Reference values computed independently at 50-digit precision.
static constexpr double kClassIEntropy = 2.9514016201112365;  // sum log2(i(i+1))/(i(i+1))
static constexpr double kSupSum = 1.6096287886827612;         // sum_n sup_k p_k(n)
static constexpr double kRBits = 0.6867280135105717;          // log2 of the above

TEST_SUITE("pmf") {

TEST_CASE("pointwise probabilities of the three families") {
    auto pI = Pmf::class_I(ClassISpec::zeros());
    CHECK(pI.prob(2) == doctest::Approx(0.5).epsilon(1e-15));  // block 1, mass 1/(1*2)
    CHECK(pI.prob(3) == 0.0);
    CHECK(pI.prob(4) == doctest::Approx(1.0 / 6).epsilon(1e-15));
    CHECK(pI.prob(1) == 0.0);

    auto pU = Pmf::class_U(2);
    CHECK(pU.prob(5) == doctest::Approx(1.0 / 64).epsilon(1e-15));
    CHECK(pU.prob(0) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(pU.prob(16) == doctest::Approx(1.0 / 64).epsilon(1e-15));
    CHECK(pU.prob(17) == 0.0);

    auto pB = Pmf::class_B(0.5, 1);
    CHECK(pB.prob(3) == 0.0);
    CHECK(pB.prob(1) == doctest::Approx(0.5));
    CHECK(pB.prob(4) == doctest::Approx(0.5));  // 2^2 + 1 - 1
}

TEST_CASE("class-B edge cases") {
    // eps = 1: n_eps = 1, all mass on 2^1 + j - 1
    auto p = Pmf::class_B(1.0, 1);
    CHECK(p.prob(2) == 1.0);
    CHECK(p.prob(1) == 0.0);
    CHECK(p.atoms().size() == 1);

    auto q = Pmf::class_B(0.3, 5);  // n_eps = 3, atom at 8 + 4
    CHECK(q.prob(12) == doctest::Approx(0.3));
    CHECK(q.atoms().size() == 2);
    CHECK(q.entropy_bits() == doctest::Approx(binary_entropy(0.3)).epsilon(1e-12));

    CHECK_THROWS_AS(Pmf::class_B(0.5, 5), DomainError);   // j > 2^2
    CHECK_THROWS_AS(Pmf::class_B(0.0, 1), DomainError);
    CHECK_THROWS_AS(Pmf::class_B(1.5, 1), DomainError);
}

TEST_CASE("from_atoms validation") {
    CHECK_THROWS_AS(Pmf::from_atoms({{1, 0.5}, {2, 0.4}}), DomainError);          // mass 0.9
    CHECK_THROWS_AS(Pmf::from_atoms({{1, 0.5}, {1, 0.5}}), DomainError);          // duplicate
    CHECK_THROWS_AS(Pmf::from_atoms({{1, -0.1}, {2, 1.1}}), DomainError);         // negative
    auto p = Pmf::from_atoms({{3, 0.25}, {1, 0.75}, {9, 0.0}});
    CHECK(p.atoms().size() == 2);  // zero atom dropped, sorted
    CHECK(p.atoms()[0].first == 1);
}

TEST_CASE("cdf convention on a two-point support") {
    auto p = Pmf::class_B(0.5, 1);  // support {1, 4}
    Cdf F = p.cdf();
    CHECK(F.eval(1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(F.eval(4) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(F.eval(2.5) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(F.eval(0.2) == 0.0);
    CHECK(F.eval(100) == 1.0);
    CHECK(F.eval(kInf) == 1.0);
    CHECK(F.inverse(0.75) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(F.inverse(0.5) == doctest::Approx(1.0));
    CHECK(F.inverse(1.0) == doctest::Approx(4.0));
    CHECK(F.inverse(0.0) == 0.0);
    CHECK_THROWS_AS(F.inverse(1.5), DomainError);
    CHECK_THROWS_AS(F.inverse(-0.1), DomainError);
    CHECK_THROWS_AS(F.eval(-1.0), DomainError);
}

TEST_CASE("infinite support inverse cdf hits infinity at 1") {
    CHECK(std::isinf(Pmf::class_I(ClassISpec::zeros()).cdf().inverse(1.0)));
    CHECK(std::isinf(Pmf::q_U().cdf().inverse(1.0)));
    CHECK(std::isinf(Pmf::harmonic_like().cdf().inverse(1.0)));
}

TEST_CASE("cdf/inverse round trip on achieved values") {
    auto check_roundtrip = [](const Pmf& p, std::size_t nruns) {
        Cdf F = p.cdf();
        double cum = 0.0;
        for (std::size_t i = 0; i < nruns; ++i) {
            auto r = p.run(i);
            if (!r || !r->enumerable()) break;
            cum = 1.0 - p.tail_mass_after(i);
            double x = F.inverse(cum);
            CHECK(F.eval(x) == doctest::Approx(cum).epsilon(1e-12));
        }
    };
    check_roundtrip(Pmf::class_B(0.3, 2), 2);
    check_roundtrip(Pmf::class_U(2), 2);
    check_roundtrip(Pmf::class_I(ClassISpec::seeded(11)), 12);
    check_roundtrip(Pmf::from_atoms({{2, 0.1}, {5, 0.2}, {6, 0.3}, {40, 0.4}}), 4);
}

TEST_CASE("class-U über q_U cdf walks its sup blocks") {
    auto q = Pmf::q_U();
    Cdf F = q.cdf();
    CHECK(F.eval(0) == doctest::Approx(0.5).epsilon(1e-15));
    // q(1) = q(2) = (1/2) / 2^{R+1}
    double q1 = std::exp2(-1.0 - (kRBits + 1.0));
    CHECK(q.prob(1) == doctest::Approx(q1).epsilon(1e-12));
    CHECK(F.eval(2) == doctest::Approx(0.5 + 2 * q1).epsilon(1e-12));
    CHECK(q.prob(3) == doctest::Approx(std::exp2(-4.0 - 2.0 - (kRBits + 1.0))).epsilon(1e-12));
}

TEST_CASE("entropy closed forms") {
    CHECK(Pmf::class_B(0.5, 1).entropy_bits() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(Pmf::class_U(2).entropy_bits() ==
          doctest::Approx(1.0 + binary_entropy(0.25)).epsilon(1e-15));
    CHECK(Pmf::class_U(1).entropy_bits() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(Pmf::class_I(ClassISpec::zeros()).entropy_bits() ==
          doctest::Approx(kClassIEntropy).epsilon(1e-12));
    CHECK(Pmf::harmonic_like().entropy_bits() ==
          doctest::Approx(kClassIEntropy).epsilon(1e-12));
    CHECK_THROWS_AS(Pmf::q_U().entropy_bits(), UnboundedEntropy);
}

TEST_CASE("class-U entropy identity vs direct enumeration, k <= 3") {
    for (std::uint64_t k = 1; k <= 3; ++k) {
        auto p = Pmf::class_U(k);
        double direct = 0.0;
        for (auto& [x, pr] : enumerate_support(p, 1 << 10)) direct += -pr * std::log2(pr);
        double kd = static_cast<double>(k);
        CHECK(direct == doctest::Approx(1.0 + binary_entropy(1.0 / (kd * kd))).epsilon(1e-12));
        CHECK(p.entropy_bits() == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("tail entropy") {
    auto pU2 = Pmf::class_U(2);
    // the 16 atoms of mass 1/64 ~ 0.0156 fall below 0.02 but not below 0.01
    CHECK(pU2.tail_entropy_bits(0.02) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(pU2.tail_entropy_bits(0.01) == 0.0);
    CHECK(pU2.tail_entropy_bits(1.0 / 64) == 0.0);  // threshold is strict
    CHECK(Pmf::class_B(0.5, 1).tail_entropy_bits(0.25) == 0.0);
    CHECK(Pmf::class_U(1).tail_entropy_bits(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    // closed form 1 + 2 log2(k)/k^2 once only the small atoms qualify
    for (std::uint64_t k = 2; k <= 50; ++k) {
        double kd = static_cast<double>(k);
        CHECK(Pmf::class_U(k).tail_entropy_bits(0.5) ==
              doctest::Approx(1.0 + 2.0 * std::log2(kd) / (kd * kd)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(Pmf::q_U().tail_entropy_bits(0.1), UnboundedEntropy);
    CHECK_THROWS_AS(pU2.tail_entropy_bits(0.0), DomainError);
}

TEST_CASE("tail entropy is nondecreasing in delta") {
    auto members = {Pmf::class_U(3), Pmf::class_B(0.2, 3),
                    Pmf::from_atoms({{1, 0.6}, {2, 0.3}, {3, 0.1}})};
    for (const auto& p : members) {
        double prev = 0.0;
        for (double d : {1e-6, 1e-4, 1e-2, 0.3, 0.7, 1.1}) {
            double t = p.tail_entropy_bits(d);
            CHECK(t >= prev - 1e-15);
            prev = t;
        }
    }
}

TEST_CASE("tail divergence against q_U matches enumeration and the paper bound") {
    auto qU = Pmf::q_U();
    CHECK(qU.q_U_sup_sum() == doctest::Approx(kSupSum).epsilon(1e-14));
    CHECK(qU.q_U_R_bits() == doctest::Approx(kRBits).epsilon(1e-13));
    CHECK(kRBits <= std::log2(kPiSqOver6));

    // full divergence: closed form vs independent per-atom enumeration
    for (std::uint64_t k = 1; k <= 3; ++k) {
        auto p = Pmf::class_U(k);
        double direct = 0.0;
        for (auto& [x, pr] : enumerate_support(p, 1 << 10))
            direct += pr * (std::log2(pr) - qU.log2_prob(x));
        CHECK(divergence_bits(p, qU) == doctest::Approx(direct).epsilon(1e-9));
        double kd = static_cast<double>(k);
        CHECK(divergence_bits(p, qU) <= 1.0 + (kRBits + 1.0) / (kd * kd) + 1e-12);
    }

    // restricted to just below the small-atom mass: bounded by (R+1)/m^2
    for (std::uint64_t m = 1; m <= 6; ++m) {
        double md = static_cast<double>(m);
        double delta = std::exp2(-(md * md) - 2.0 * std::log2(md)) * 0.999;
        double v = Pmf::class_U(m).tail_divergence_bits(qU, delta);
        CHECK(v == 0.0);  // own atoms sit at/above delta
        double v2 = Pmf::class_U(m + 1).tail_divergence_bits(qU, delta * 4.1 * (md + 1) *
                                                                      (md + 1) / (md * md));
        CHECK(v2 <= (kRBits + 1.0) / ((md + 1) * (md + 1)) + 1e-12);
    }

    CHECK(Pmf::class_U(5).tail_divergence_bits(Pmf::class_U(5), 1.0) == 0.0);
    auto pB = Pmf::class_B(0.5, 1);
    CHECK(pB.tail_divergence_bits(Pmf::uniform_range(1, 1).kind() == Pmf::Kind::Explicit
                                      ? Pmf::from_atoms({{1, 0.5}, {4, 0.5}})
                                      : pB,
                                  1.1) == doctest::Approx(0.0));
    // zero q mass under a tail atom signals infinite divergence
    CHECK(std::isinf(pB.tail_divergence_bits(Pmf::point_mass(1), 1.1)));
}

TEST_CASE("q_U is a proper distribution and sup values check out") {
    auto q = Pmf::q_U();
    CHECK(q.prob(0) == doctest::Approx(0.5));
    CHECK(q.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    // sup_k p_k(1) = 1/2 attained at k = 1
    double best = 0.0;
    for (std::uint64_t k = 1; k <= 20; ++k) best = std::max(best, Pmf::class_U(k).prob(1));
    CHECK(best == doctest::Approx(0.5));
    CHECK(kSupSum <= kPiSqOver6);
}

TEST_CASE("class-U total mass is exactly 1 in rational arithmetic, k <= 3") {
    for (std::uint64_t k = 1; k <= 3; ++k) {
        std::uint64_t den = k * k * (std::uint64_t{1} << (k * k));
        std::uint64_t num = 0;
        auto p = Pmf::class_U(k);
        for (auto& [x, pr] : enumerate_support(p, 1 << 10)) {
            // every atom is an exact multiple of 1/den
            double scaled = pr * static_cast<double>(den);
            std::uint64_t units = static_cast<std::uint64_t>(std::llround(scaled));
            CHECK(scaled == doctest::Approx(static_cast<double>(units)).epsilon(1e-12));
            num += units;
        }
        CHECK(num == den);
    }
}

TEST_CASE("class-I tails telescope to 1/k, not the printed 1/(k+1)") {
    auto p = Pmf::class_I(ClassISpec::seeded(3));
    for (std::size_t k = 1; k <= 12; ++k) {
        // mass at symbols >= 2^k == mass in blocks >= k == runs > k-2
        double closed = p.tail_mass_after(k - 2 + 1 - 1);  // run index k-2
        CHECK(closed == doctest::Approx(1.0 / static_cast<double>(k)).epsilon(1e-15));
        double partial = 0.0;
        for (std::size_t i = k - 1; i < 40; ++i) partial += p.run(i)->mass();
        partial += p.tail_mass_after(39);
        CHECK(partial == doctest::Approx(1.0 / static_cast<double>(k)).epsilon(1e-12));
    }
    CHECK(p.total_mass() == 1.0);
}

TEST_CASE("sampling: determinism, point mass, and U(2) frequencies") {
    auto pm = Pmf::class_B(1.0, 1);
    auto s = pm.sample_n(123, 3);
    CHECK(s == std::vector<Symbol>{2, 2, 2});

    auto pU = Pmf::class_U(2);
    auto a = pU.sample_n(42, 5);
    auto b = pU.sample_n(42, 5);
    CHECK(a == b);
    CHECK(a != pU.sample_n(43, 5));

    std::size_t zeros = 0;
    auto big = pU.sample_n(7, 100000);
    for (auto x : big) {
        CHECK(x <= 16);
        if (x == 0) ++zeros;
    }
    double freq = static_cast<double>(zeros) / static_cast<double>(big.size());
    CHECK(std::abs(freq - 0.75) < 0.01);
}

TEST_CASE("sampling matches pmf on a three-atom support") {
    auto p = Pmf::from_atoms({{1, 0.2}, {7, 0.5}, {9, 0.3}});
    std::size_t c1 = 0, c7 = 0, c9 = 0;
    for (auto x : p.sample_n(99, 50000)) {
        if (x == 1) ++c1;
        else if (x == 7) ++c7;
        else { CHECK(x == 9); ++c9; }
    }
    CHECK(std::abs(c1 / 50000.0 - 0.2) < 0.01);
    CHECK(std::abs(c7 / 50000.0 - 0.5) < 0.01);
}

TEST_CASE("tightness bound") {
    // 100 seeded family-I members: F^{-1}(1-gamma) <= 2^{floor(1/gamma)} - 1
    std::vector<Pmf> members;
    for (std::uint64_t s = 0; s < 100; ++s) members.push_back(Pmf::class_I(ClassISpec::seeded(s)));
    for (double gamma : {0.5, 0.25, 0.1}) {
        double bound = std::exp2(std::floor(1.0 / gamma)) - 1.0;
        CHECK(tightness_bound(members, gamma) <= bound);
    }

    CHECK(tightness_bound({Pmf::point_mass(7)}, 0.1) == doctest::Approx(7.0));

    std::vector<Pmf> us;
    for (std::uint64_t k = 1; k <= 10; ++k) us.push_back(Pmf::class_U(k));
    double t = tightness_bound(us, 0.3);
    CHECK(std::isfinite(t));
    CHECK(t == doctest::Approx(1.4).epsilon(1e-12));  // attained by k = 1
}

TEST_CASE("min over dyadic blocks") {
    auto h = Pmf::harmonic_like();
    for (std::uint32_t i : {1u, 5u, 20u}) {
        auto [off, lp] = h.min_in_block(i);
        CHECK(off == (std::uint64_t{1} << i) - 1);  // decreasing pmf: top of block
        Symbol x = (std::uint64_t{1} << i) + off;
        CHECK(lp == doctest::Approx(h.log2_prob(x)));
    }
    // closed form continues past the representable range and keeps shrinking
    CHECK(h.min_log2_in_block(100) == doctest::Approx(-2.0 * 101.0).epsilon(1e-12));
    CHECK(h.min_log2_in_block(1000) < h.min_log2_in_block(100));

    // uniform over T_1 = {2,3}: tie resolves to the smallest symbol
    auto u = Pmf::from_atoms({{2, 0.5}, {3, 0.5}});
    auto [off1, lp1] = u.min_in_block(1);
    CHECK(off1 == 0);
    CHECK(lp1 == doctest::Approx(-1.0));
    // a gap means probability zero at the smallest uncovered symbol
    auto g = Pmf::from_atoms({{2, 0.5}, {5, 0.5}});
    auto [off2, lp2] = g.min_in_block(1);
    CHECK(off2 == 1);  // symbol 3
    CHECK(lp2 == kNegInf);
}

TEST_CASE("series helpers agree with high-precision references") {
    CHECK(log_block_series_tail(0) == doctest::Approx(kClassIEntropy).epsilon(1e-13));
    CHECK(inv_square_tail(0) == doctest::Approx(kPiSqOver6).epsilon(1e-14));
    CHECK(inv_square_tail(10) == doctest::Approx(kPiSqOver6 - 1.5497677311665408).epsilon(1e-13));
}

}  // TEST_SUITE
