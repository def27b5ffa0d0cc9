#pragma once
// Distributions over the naturals. Covers explicit finite pmfs and the
// structured families the tool works with: the block-selector family I
// (one atom of mass 1/(i(i+1)) per dyadic block T_i), the two-point family
// B, the near-deterministic family U, its universal cover qU, and the
// harmonic-like pmf 1/(x(x+1)).
//
// Values are immutable after construction and cheap to copy (shared impl);
// safe to share across concurrent readers.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "uclab/errors.hpp"
#include "uclab/math_util.hpp"

namespace uclab {

using Symbol = std::uint64_t;

// Contiguous run of equal-probability support symbols, increasing symbol
// order. count == 0 marks a run too large to enumerate; log2_count is valid
// either way.
struct AtomRun {
    Symbol first = 0;
    std::uint64_t count = 0;
    double log2_count = 0.0;
    double log2_prob = kNegInf;  // per symbol

    bool enumerable() const { return count != 0; }
    double prob_each() const { return std::exp2(log2_prob); }
    double mass() const { return std::exp2(log2_count + log2_prob); }
};

// Selector for a family-I member: block i >= 1 contributes the atom
// 2^i + offset(i). Offsets are only materialized for i <= kMaxBlock;
// deeper evaluation is truncated by construction.
struct ClassISpec {
    enum class Tag { Zeros, List, Seeded, Custom };

    static constexpr std::uint32_t kMaxBlock = 62;

    Tag tag = Tag::Zeros;
    std::vector<std::uint64_t> list;  // Tag::List; block i -> list[i-1], 0 beyond
    std::uint64_t seed = 0;           // Tag::Seeded
    std::function<std::uint64_t(std::uint32_t)> custom;  // Tag::Custom

    static ClassISpec zeros();
    static ClassISpec from_offsets(std::vector<std::uint64_t> offsets);
    static ClassISpec seeded(std::uint64_t seed);
    static ClassISpec from_function(std::function<std::uint64_t(std::uint32_t)> fn);

    // Offset of the chosen atom in block i (1 <= i <= kMaxBlock).
    std::uint64_t offset(std::uint32_t i) const;
};

class Cdf;

class Pmf {
public:
    enum class Kind { Explicit, ClassI, ClassU, QU, Harmonic };

    // -- constructors -------------------------------------------------------
    // Atoms need not be sorted; zero-probability atoms are dropped; the mass
    // must total 1 within 1e-12.
    static Pmf from_atoms(std::vector<std::pair<Symbol, double>> atoms,
                          std::string label = "explicit");
    static Pmf point_mass(Symbol x);
    static Pmf uniform_range(Symbol lo, Symbol hi);  // inclusive
    static Pmf class_I(ClassISpec sel);
    static Pmf class_B(double eps, std::uint64_t j);
    static Pmf class_U(std::uint64_t k);
    static Pmf q_U();            // sup_k p_k(n) / 2^{R+1}, R certified numerically
    static Pmf harmonic_like();  // p(x) = 1/(x(x+1)), x >= 1

    Kind kind() const;
    const std::string& label() const;

    // -- pointwise ----------------------------------------------------------
    double prob(Symbol x) const;
    double log2_prob(Symbol x) const;  // -inf outside support

    // -- structure ----------------------------------------------------------
    bool finite_support() const;
    std::size_t run_count() const;                 // finite kinds only
    std::optional<AtomRun> run(std::size_t i) const;  // nullopt past the end
    double tail_mass_after(std::size_t i) const;   // mass in runs > i, closed form
    double total_mass() const;                     // closed form / compensated sum

    // -- functionals (bits) --------------------------------------------------
    double entropy_bits() const;  // throws UnboundedEntropy when divergent
    // sum over {x in support : p(x) < delta} of p(x) log2 1/p(x)
    double tail_entropy_bits(double delta) const;
    // sum over the same tail set of p(x) log2 p(x)/q(x); +inf if q vanishes
    // on a tail atom. delta = +inf gives the full divergence D(p||q).
    double tail_divergence_bits(const Pmf& q, double delta) const;

    // -- cdf / sampling ------------------------------------------------------
    Cdf cdf() const;
    Symbol sample(std::mt19937_64& g) const;  // discrete quantile of uniform01
    std::vector<Symbol> sample_n(std::uint64_t seed, std::size_t n) const;

    // Smallest-probability element of block T_i = [2^i, 2^{i+1}), ties to the
    // smallest symbol. Needs i <= 62.
    std::pair<Symbol, double> min_in_block(std::uint32_t i) const;
    // Same value but valid to arbitrary depth for kinds with closed form.
    double min_log2_in_block(std::uint32_t i) const;

    // -- family parameters ---------------------------------------------------
    bool is_class_B() const;
    double class_B_eps() const;
    std::uint64_t class_B_j() const;
    std::uint64_t class_U_k() const;       // Kind::ClassU
    const ClassISpec& selector() const;    // Kind::ClassI
    double q_U_R_bits() const;             // Kind::QU
    double q_U_sup_sum() const;            // Kind::QU
    const std::vector<std::pair<Symbol, double>>& atoms() const;  // Kind::Explicit

private:
    struct Impl;
    explicit Pmf(std::shared_ptr<const Impl> impl);
    std::shared_ptr<const Impl> impl_;
};

// Cumulative distribution per the interpolation convention used throughout:
// F is the usual cdf on support points, linear between consecutive support
// points, 0 left of the smallest one, and F(inf) = 1.
class Cdf {
public:
    explicit Cdf(Pmf p);

    double eval(double x) const;      // x >= 0 or +inf
    double inverse(double u) const;   // u in [0,1]; inverse(1) = +inf iff support infinite
    const Pmf& pmf() const { return pmf_; }

private:
    Pmf pmf_;
};

// D(p || q) in bits; +inf if q vanishes somewhere p does not.
double divergence_bits(const Pmf& p, const Pmf& q);

// Materialize a finite support as (symbol, probability) pairs in symbol order.
std::vector<std::pair<Symbol, double>> enumerate_support(const Pmf& p, std::size_t max_atoms);

// max over members of F^{-1}(1 - gamma); 0 < gamma < 1.
double tightness_bound(const std::vector<Pmf>& members, double gamma);

// Certified tail of the series sum_{i>m} log2(i(i+1))/(i(i+1)); the m = 0
// value is the entropy shared by family-I members and the harmonic-like pmf.
double log_block_series_tail(std::uint64_t m);

// sum_{j>J} 1/j^2 with error well under 1e-13.
double inv_square_tail(std::uint64_t J);

}  // namespace uclab
