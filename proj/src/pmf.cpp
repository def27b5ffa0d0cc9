#include "uclab/pmf.hpp"

#include <algorithm>
#include <cmath>

#include "uclab/rng.hpp"

namespace uclab {

namespace {

constexpr double kMassTol = 1e-12;
constexpr std::size_t kEnumGuard = 10'000'000;

// smallest k >= 1 with 2^{k^2} >= n
unsigned sup_block_of(Symbol n) {
    unsigned need = n <= 1 ? 0 : bit_width_u64(n - 1);  // ceil(log2 n)
    unsigned k = 1;
    while (k * k < need) ++k;
    return k;
}

}  // namespace

// ---------------------------------------------------------------------------
// ClassISpec

ClassISpec ClassISpec::zeros() { return ClassISpec{}; }

ClassISpec ClassISpec::from_offsets(std::vector<std::uint64_t> offsets) {
    ClassISpec s;
    s.tag = Tag::List;
    s.list = std::move(offsets);
    return s;
}

ClassISpec ClassISpec::seeded(std::uint64_t seed) {
    ClassISpec s;
    s.tag = Tag::Seeded;
    s.seed = seed;
    return s;
}

ClassISpec ClassISpec::from_function(std::function<std::uint64_t(std::uint32_t)> fn) {
    ClassISpec s;
    s.tag = Tag::Custom;
    s.custom = std::move(fn);
    return s;
}

std::uint64_t ClassISpec::offset(std::uint32_t i) const {
    if (i < 1 || i > kMaxBlock)
        throw ResourceError("ClassISpec::offset: block index " + std::to_string(i) +
                            " outside the representable range [1, 62]");
    std::uint64_t block = std::uint64_t{1} << i;
    std::uint64_t off = 0;
    switch (tag) {
        case Tag::Zeros: off = 0; break;
        case Tag::List: off = i <= list.size() ? list[i - 1] : 0; break;
        case Tag::Seeded: {
            std::uint64_t s = seed ^ (0x9E3779B97F4A7C15ull * i);
            off = splitmix64(s) & (block - 1);
            break;
        }
        case Tag::Custom: off = custom(i); break;
    }
    if (off >= block)
        throw DomainError("ClassISpec: offset " + std::to_string(off) +
                          " outside block " + std::to_string(i));
    return off;
}

// ---------------------------------------------------------------------------
// Series tails

double inv_square_tail(std::uint64_t J) {
    // direct terms up to 64, then the psi' asymptotic
    std::uint64_t a = J + 1;
    KahanSum s;
    while (a <= 64) {
        s.add(1.0 / (static_cast<double>(a) * static_cast<double>(a)));
        ++a;
    }
    double x = static_cast<double>(a);
    double t = 1.0 / x + 1.0 / (2 * x * x) + 1.0 / (6 * x * x * x) -
               1.0 / (30 * x * x * x * x * x) + 1.0 / (42 * std::pow(x, 7));
    return s.value() + t;
}

double log_block_series_tail(std::uint64_t m) {
    // sum_{i>m} log2(i(i+1)) / (i(i+1)); direct sum to M, Euler-Maclaurin past M.
    const std::uint64_t M = std::max<std::uint64_t>(m, std::uint64_t{1} << 20);
    KahanSum s;
    for (std::uint64_t i = m + 1; i <= M; ++i) {
        double di = static_cast<double>(i);
        s.add(std::log2(di * (di + 1.0)) / (di * (di + 1.0)));
    }
    // tail past M in nats, pieces per log(i(i+1)) = 2 log i + log(1+1/i) and
    // 1/(i(i+1)) = 1/i^2 - 1/i^3 + 1/(i^3(i+1))
    const double a = static_cast<double>(M + 1);
    const double la = std::log(a);
    // sum_{i>=a} ln i / i^2
    double p1 = (la + 1.0) / a + la / (2 * a * a) - (1.0 - 2 * la) / (12 * a * a * a);
    // sum_{i>=a} ln i / i^3
    double p2 = (2 * la + 1.0) / (4 * a * a) + la / (2 * a * a * a) -
                (1.0 - 3 * la) / (12 * a * a * a * a);
    // sum_{i>=a} ln i / (i^3 (i+1)) ~ integral of ln x / x^4
    double p3 = (3 * la + 1.0) / (9 * a * a * a);
    // sum_{i>=a} ln(1+1/i)/(i(i+1)) ~ sum 1/i^3 - (3/2) sum 1/i^4
    double s3 = 1.0 / (2 * a * a) + 1.0 / (2 * a * a * a) + 1.0 / (4 * a * a * a * a);
    double s4 = 1.0 / (3 * a * a * a) + 1.0 / (2 * a * a * a * a);
    double q = s3 - 1.5 * s4;
    double tail_nats = 2.0 * (p1 - p2 + p3) + q;
    return s.value() + tail_nats * kLog2E;
}

// ---------------------------------------------------------------------------
// Impl

struct Pmf::Impl {
    Kind kind = Kind::Explicit;
    std::string label;

    // Explicit
    std::vector<std::pair<Symbol, double>> atoms;  // sorted, positive mass
    std::vector<double> cum;                       // inclusive cumulative

    // class B metadata (atoms hold the distribution itself)
    bool is_B = false;
    double b_eps = 0.0;
    std::uint64_t b_j = 0;

    // class U
    std::uint64_t u_k = 0;

    // class I
    ClassISpec sel;

    // qU
    double qu_S = 0.0;
    double qu_R = 0.0;
};

Pmf::Pmf(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

Pmf Pmf::from_atoms(std::vector<std::pair<Symbol, double>> atoms, std::string label) {
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::Explicit;
    impl->label = std::move(label);
    std::sort(atoms.begin(), atoms.end());
    KahanSum total;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        auto [x, p] = atoms[i];
        if (p < 0.0 || p > 1.0 || !std::isfinite(p))
            throw DomainError("atom probability outside [0,1] at symbol " + std::to_string(x));
        if (i + 1 < atoms.size() && atoms[i + 1].first == x)
            throw DomainError("duplicate atom at symbol " + std::to_string(x));
        total.add(p);
        if (p > 0.0) impl->atoms.emplace_back(x, p);
    }
    if (std::abs(total.value() - 1.0) > kMassTol)
        throw DomainError("atom masses sum to " + std::to_string(total.value()) + ", not 1");
    impl->cum.reserve(impl->atoms.size());
    double c = 0.0;
    for (auto& [x, p] : impl->atoms) impl->cum.push_back(c += p);
    if (impl->atoms.empty()) throw DomainError("empty support");
    return Pmf(std::move(impl));
}

Pmf Pmf::point_mass(Symbol x) {
    return from_atoms({{x, 1.0}}, "point(" + std::to_string(x) + ")");
}

Pmf Pmf::uniform_range(Symbol lo, Symbol hi) {
    if (hi < lo) throw DomainError("uniform_range: hi < lo");
    std::uint64_t n = hi - lo + 1;
    if (n > 1'000'000) throw ResourceError("uniform_range: too many atoms");
    std::vector<std::pair<Symbol, double>> atoms;
    atoms.reserve(n);
    for (Symbol x = lo; x <= hi; ++x) atoms.emplace_back(x, 1.0 / static_cast<double>(n));
    return from_atoms(std::move(atoms),
                      "uniform[" + std::to_string(lo) + "," + std::to_string(hi) + "]");
}

Pmf Pmf::class_I(ClassISpec sel) {
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::ClassI;
    impl->sel = std::move(sel);
    switch (impl->sel.tag) {
        case ClassISpec::Tag::Zeros: impl->label = "I(zeros)"; break;
        case ClassISpec::Tag::List: impl->label = "I(list)"; break;
        case ClassISpec::Tag::Seeded:
            impl->label = "I(seed=" + std::to_string(impl->sel.seed) + ")";
            break;
        case ClassISpec::Tag::Custom: impl->label = "I(custom)"; break;
    }
    return Pmf(std::move(impl));
}

Pmf Pmf::class_B(double eps, std::uint64_t j) {
    if (!(eps > 0.0) || eps > 1.0) throw DomainError("class_B: eps must be in (0,1]");
    std::uint64_t n_eps = static_cast<std::uint64_t>(std::floor(1.0 / eps));
    if (n_eps > 62) throw ResourceError("class_B: eps too small, atom not representable");
    if (j < 1 || j > (std::uint64_t{1} << n_eps))
        throw DomainError("class_B: j must be in [1, 2^n_eps]");
    Symbol atom = (std::uint64_t{1} << n_eps) + j - 1;
    std::vector<std::pair<Symbol, double>> atoms;
    if (eps < 1.0) atoms.emplace_back(1, 1.0 - eps);
    atoms.emplace_back(atom, eps);
    Pmf p = from_atoms(std::move(atoms),
                       "B(eps=" + std::to_string(eps) + ",j=" + std::to_string(j) + ")");
    auto impl = std::make_shared<Impl>(*p.impl_);
    impl->is_B = true;
    impl->b_eps = eps;
    impl->b_j = j;
    return Pmf(std::move(impl));
}

Pmf Pmf::class_U(std::uint64_t k) {
    if (k < 1 || k > 1000) throw DomainError("class_U: k must be in [1, 1000]");
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::ClassU;
    impl->u_k = k;
    impl->label = "U(k=" + std::to_string(k) + ")";
    return Pmf(std::move(impl));
}

Pmf Pmf::q_U() {
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::QU;
    impl->label = "qU";
    // S = sum_{n>=1} sup_k p_k(n) = pi^2/6 - sum_{k>=2} 2^{1-2k}/k^2; the
    // dropped remainder past k=64 is below 2^{-129}.
    KahanSum corr;
    for (std::uint64_t k = 2; k <= 64; ++k)
        corr.add(std::exp2(1.0 - 2.0 * static_cast<double>(k)) /
                 (static_cast<double>(k) * static_cast<double>(k)));
    impl->qu_S = kPiSqOver6 - corr.value();
    impl->qu_R = std::log2(impl->qu_S);
    return Pmf(std::move(impl));
}

Pmf Pmf::harmonic_like() {
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::Harmonic;
    impl->label = "harmonic";
    return Pmf(std::move(impl));
}

Pmf::Kind Pmf::kind() const { return impl_->kind; }
const std::string& Pmf::label() const { return impl_->label; }

bool Pmf::is_class_B() const { return impl_->is_B; }
double Pmf::class_B_eps() const {
    if (!impl_->is_B) throw ModeError("not a class-B member");
    return impl_->b_eps;
}
std::uint64_t Pmf::class_B_j() const {
    if (!impl_->is_B) throw ModeError("not a class-B member");
    return impl_->b_j;
}
std::uint64_t Pmf::class_U_k() const {
    if (impl_->kind != Kind::ClassU) throw ModeError("not a class-U member");
    return impl_->u_k;
}
const ClassISpec& Pmf::selector() const {
    if (impl_->kind != Kind::ClassI) throw ModeError("not a class-I member");
    return impl_->sel;
}
double Pmf::q_U_R_bits() const {
    if (impl_->kind != Kind::QU) throw ModeError("not qU");
    return impl_->qu_R;
}
double Pmf::q_U_sup_sum() const {
    if (impl_->kind != Kind::QU) throw ModeError("not qU");
    return impl_->qu_S;
}
const std::vector<std::pair<Symbol, double>>& Pmf::atoms() const {
    if (impl_->kind != Kind::Explicit) throw ModeError("atoms(): not an explicit pmf");
    return impl_->atoms;
}

// ---------------------------------------------------------------------------
// Pointwise

double Pmf::log2_prob(Symbol x) const {
    switch (impl_->kind) {
        case Kind::Explicit: {
            auto it = std::lower_bound(impl_->atoms.begin(), impl_->atoms.end(),
                                       std::make_pair(x, 0.0));
            if (it != impl_->atoms.end() && it->first == x) return std::log2(it->second);
            return kNegInf;
        }
        case Kind::ClassI: {
            if (x < 2) return kNegInf;
            std::uint32_t i = bit_width_u64(x) - 1;  // x in [2^i, 2^{i+1})
            if (i > ClassISpec::kMaxBlock) return kNegInf;
            if (x == (std::uint64_t{1} << i) + impl_->sel.offset(i))
                return -std::log2(static_cast<double>(i) * (static_cast<double>(i) + 1.0));
            return kNegInf;
        }
        case Kind::ClassU: {
            double k = static_cast<double>(impl_->u_k);
            if (x == 0)
                return impl_->u_k == 1 ? kNegInf : std::log2(1.0 - 1.0 / (k * k));
            if (impl_->u_k <= 7 && x > (std::uint64_t{1} << (impl_->u_k * impl_->u_k)))
                return kNegInf;
            return -(k * k) - 2.0 * std::log2(k);
        }
        case Kind::QU: {
            if (x == 0) return -1.0;
            double j = static_cast<double>(sup_block_of(x));
            return -(j * j) - 2.0 * std::log2(j) - (impl_->qu_R + 1.0);
        }
        case Kind::Harmonic: {
            if (x < 1) return kNegInf;
            double d = static_cast<double>(x);
            return -(std::log2(d) + std::log2(d + 1.0));
        }
    }
    return kNegInf;
}

double Pmf::prob(Symbol x) const { return std::exp2(log2_prob(x)); }

// ---------------------------------------------------------------------------
// Runs

bool Pmf::finite_support() const {
    return impl_->kind == Kind::Explicit || impl_->kind == Kind::ClassU;
}

std::size_t Pmf::run_count() const {
    switch (impl_->kind) {
        case Kind::Explicit: return impl_->atoms.size();
        case Kind::ClassU: return impl_->u_k == 1 ? 1 : 2;
        default: throw ModeError("run_count: infinite support");
    }
}

std::optional<AtomRun> Pmf::run(std::size_t i) const {
    switch (impl_->kind) {
        case Kind::Explicit: {
            if (i >= impl_->atoms.size()) return std::nullopt;
            auto [x, p] = impl_->atoms[i];
            return AtomRun{x, 1, 0.0, std::log2(p)};
        }
        case Kind::ClassU: {
            std::uint64_t k = impl_->u_k;
            double kd = static_cast<double>(k);
            std::size_t small_idx = k == 1 ? 0 : 1;
            if (i == 0 && k >= 2)
                return AtomRun{0, 1, 0.0, std::log2(1.0 - 1.0 / (kd * kd))};
            if (i == small_idx) {
                double l2c = kd * kd;
                std::uint64_t cnt = k <= 7 ? (std::uint64_t{1} << (k * k)) : 0;
                return AtomRun{1, cnt, l2c, -(kd * kd) - 2.0 * std::log2(kd)};
            }
            return std::nullopt;
        }
        case Kind::ClassI: {
            std::uint32_t b = static_cast<std::uint32_t>(i) + 1;  // block index
            if (b > ClassISpec::kMaxBlock) return std::nullopt;
            Symbol x = (std::uint64_t{1} << b) + impl_->sel.offset(b);
            double bd = static_cast<double>(b);
            return AtomRun{x, 1, 0.0, -std::log2(bd * (bd + 1.0))};
        }
        case Kind::QU: {
            if (i == 0) return AtomRun{0, 1, 0.0, -1.0};
            std::uint64_t j = i;
            if (j > 8) return std::nullopt;  // first symbol would exceed 2^64
            double jd = static_cast<double>(j);
            double l2p = -(jd * jd) - 2.0 * std::log2(jd) - (impl_->qu_R + 1.0);
            if (j == 1) return AtomRun{1, 2, 1.0, l2p};
            Symbol first = (std::uint64_t{1} << ((j - 1) * (j - 1))) + 1;
            double l2c = jd * jd + std::log2(1.0 - std::exp2(-(2.0 * jd - 1.0)));
            std::uint64_t cnt = 0;
            if (j <= 7)
                cnt = (std::uint64_t{1} << (j * j)) - (std::uint64_t{1} << ((j - 1) * (j - 1)));
            return AtomRun{first, cnt, l2c, l2p};
        }
        case Kind::Harmonic: {
            Symbol x = static_cast<Symbol>(i) + 1;
            double d = static_cast<double>(x);
            return AtomRun{x, 1, 0.0, -(std::log2(d) + std::log2(d + 1.0))};
        }
    }
    return std::nullopt;
}

double Pmf::tail_mass_after(std::size_t i) const {
    switch (impl_->kind) {
        case Kind::Explicit: {
            if (i >= impl_->cum.size()) return 0.0;
            return impl_->cum.back() - impl_->cum[i];
        }
        case Kind::ClassU:
            if (impl_->u_k >= 2 && i == 0)
                return 1.0 / (static_cast<double>(impl_->u_k) * static_cast<double>(impl_->u_k));
            return 0.0;
        case Kind::ClassI:
            // runs > i are blocks > i+1
            return 1.0 / (static_cast<double>(i) + 2.0);
        case Kind::QU: {
            if (i == 0) return 0.5;
            KahanSum geo;
            for (std::uint64_t m = i + 1; m <= i + 64; ++m)
                geo.add(std::exp2(1.0 - 2.0 * static_cast<double>(m)) /
                        (static_cast<double>(m) * static_cast<double>(m)));
            return (inv_square_tail(i) - geo.value()) / (2.0 * impl_->qu_S);
        }
        case Kind::Harmonic:
            return 1.0 / (static_cast<double>(i) + 2.0);
    }
    return 0.0;
}

double Pmf::total_mass() const {
    switch (impl_->kind) {
        case Kind::Explicit: return impl_->cum.back();
        case Kind::ClassI: return 1.0;  // telescoping, exact
        case Kind::Harmonic: return 1.0;
        case Kind::ClassU: {
            double m = 0.0;
            for (std::size_t i = 0;; ++i) {
                auto r = run(i);
                if (!r) break;
                m += r->mass();
            }
            return m;
        }
        case Kind::QU:
            return 0.5 + tail_mass_after(0);
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Entropy and tail functionals

double Pmf::entropy_bits() const {
    switch (impl_->kind) {
        case Kind::Explicit: {
            KahanSum s;
            for (auto& [x, p] : impl_->atoms) s.add(-p * std::log2(p));
            return s.value();
        }
        case Kind::ClassU: {
            double k = static_cast<double>(impl_->u_k);
            return 1.0 + binary_entropy(1.0 / (k * k));
        }
        case Kind::ClassI:
        case Kind::Harmonic:
            return log_block_series_tail(0);
        case Kind::QU:
            throw UnboundedEntropy("entropy of qU diverges");
    }
    return 0.0;
}

namespace {

// largest i >= 0 with 1/(i(i+1)) >= delta (i = 0 when even block 1 is below)
std::uint64_t last_block_at_or_above(double delta) {
    if (delta <= 0.0) throw DomainError("delta must be positive");
    double guess = (std::sqrt(1.0 + 4.0 / delta) - 1.0) / 2.0;
    std::uint64_t i = guess < 1.0 ? 0 : static_cast<std::uint64_t>(guess);
    auto p_of = [](std::uint64_t b) {
        return 1.0 / (static_cast<double>(b) * (static_cast<double>(b) + 1.0));
    };
    while (i >= 1 && p_of(i) < delta) --i;
    while (p_of(i + 1) >= delta) ++i;
    return i;
}

}  // namespace

double Pmf::tail_entropy_bits(double delta) const {
    if (!(delta > 0.0)) throw DomainError("tail_entropy: delta must be > 0");
    switch (impl_->kind) {
        case Kind::Explicit: {
            KahanSum s;
            for (auto& [x, p] : impl_->atoms)
                if (p < delta) s.add(-p * std::log2(p));
            return s.value();
        }
        case Kind::ClassU: {
            double k = static_cast<double>(impl_->u_k);
            double t = 0.0;
            double l2p_small = -(k * k) - 2.0 * std::log2(k);
            if (std::exp2(l2p_small) < delta)
                t += 1.0 + 2.0 * std::log2(k) / (k * k);
            if (impl_->u_k >= 2) {
                double p0 = 1.0 - 1.0 / (k * k);
                if (p0 < delta) t += -p0 * std::log2(p0);
            }
            return t;
        }
        case Kind::ClassI:
        case Kind::Harmonic:
            return log_block_series_tail(last_block_at_or_above(delta));
        case Kind::QU:
            throw UnboundedEntropy("tail entropy of qU diverges for every delta > 0");
    }
    return 0.0;
}

double Pmf::tail_divergence_bits(const Pmf& q, double delta) const {
    if (!(delta > 0.0)) throw DomainError("tail_divergence: delta must be > 0");
    if (impl_ == q.impl_) return 0.0;
    switch (impl_->kind) {
        case Kind::Explicit: {
            KahanSum s;
            for (auto& [x, p] : impl_->atoms) {
                if (p >= delta) continue;
                double lq = q.log2_prob(x);
                if (lq == kNegInf) return kInf;
                s.add(p * (std::log2(p) - lq));
            }
            return s.value();
        }
        case Kind::ClassU: {
            std::uint64_t k = impl_->u_k;
            double kd = static_cast<double>(k);
            double out = 0.0;
            if (k >= 2) {
                double p0 = 1.0 - 1.0 / (kd * kd);
                if (p0 < delta) {
                    double lq = q.log2_prob(0);
                    if (lq == kNegInf) return kInf;
                    out += p0 * (std::log2(p0) - lq);
                }
            }
            double l2p_small = -(kd * kd) - 2.0 * std::log2(kd);
            if (std::exp2(l2p_small) < delta) {
                if (q.impl_->kind == Kind::QU) {
                    // decompose [1, 2^{k^2}] along qU's sup blocks
                    double R = q.impl_->qu_R;
                    KahanSum s;
                    for (std::uint64_t j = 1; j <= k; ++j) {
                        double jd = static_cast<double>(j);
                        double w;  // mass of p_k atoms inside qU block j
                        if (j == 1)
                            w = 2.0 * std::exp2(-(kd * kd)) / (kd * kd);
                        else
                            w = (std::exp2(jd * jd - kd * kd) -
                                 std::exp2((jd - 1) * (jd - 1) - kd * kd)) /
                                (kd * kd);
                        double bracket = (R + 1.0) + (jd * jd - kd * kd) +
                                         2.0 * (std::log2(jd) - std::log2(kd));
                        s.add(w * bracket);
                    }
                    out += s.value();
                } else if (k <= 4) {
                    double pe = std::exp2(l2p_small);
                    KahanSum s;
                    for (Symbol x = 1; x <= (std::uint64_t{1} << (k * k)); ++x) {
                        double lq = q.log2_prob(x);
                        if (lq == kNegInf) return kInf;
                        s.add(pe * (l2p_small - lq));
                    }
                    out += s.value();
                } else {
                    throw ResourceError(
                        "tail_divergence: class-U member too large to enumerate against this q");
                }
            }
            return out;
        }
        case Kind::ClassI: {
            std::uint64_t i0 = last_block_at_or_above(delta);
            KahanSum s;
            for (std::uint32_t b = static_cast<std::uint32_t>(i0) + 1;
                 b <= ClassISpec::kMaxBlock; ++b) {
                double bd = static_cast<double>(b);
                double p = 1.0 / (bd * (bd + 1.0));
                Symbol x = (std::uint64_t{1} << b) + impl_->sel.offset(b);
                double lq = q.log2_prob(x);
                if (lq == kNegInf) return kInf;
                s.add(p * (std::log2(p) - lq));
            }
            // blocks past 62 carry mass 1/63 whose q values are not representable
            throw ResourceError("tail_divergence over a class-I member is truncated at block 62; "
                                "partial value " + std::to_string(s.value()));
        }
        default:
            throw ModeError("tail_divergence: unsupported pmf kind on the p side");
    }
}

double divergence_bits(const Pmf& p, const Pmf& q) {
    return p.tail_divergence_bits(q, kInf);
}

// ---------------------------------------------------------------------------
// Cdf

Cdf Pmf::cdf() const { return Cdf(*this); }

Cdf::Cdf(Pmf p) : pmf_(std::move(p)) {}

double Cdf::eval(double x) const {
    if (std::isinf(x) && x > 0) return 1.0;
    if (!(x >= 0.0)) throw DomainError("cdf: x must be nonnegative");
    if (pmf_.kind() == Pmf::Kind::Harmonic) {
        if (x < 1.0) return 0.0;
        double xf = std::floor(x);
        double flo = 1.0 - 1.0 / (xf + 1.0);
        double fhi = 1.0 - 1.0 / (xf + 2.0);
        return flo + (x - xf) * (fhi - flo);
    }
    double cum_before = 0.0;
    double prev_sym = -1.0;  // last support symbol already passed (as real)
    for (std::size_t i = 0;; ++i) {
        auto r = pmf_.run(i);
        if (!r) {
            if (pmf_.finite_support()) return 1.0;  // x beyond the last atom
            throw ResourceError("cdf: x beyond the representable support region");
        }
        double a = static_cast<double>(r->first);
        double pe = r->prob_each();
        if (x < a) {
            // in the gap before this run: interpolate toward its first symbol
            if (prev_sym < 0.0) return 0.0;  // left of the smallest support point
            return cum_before + (x - prev_sym) / (a - prev_sym) * pe;
        }
        double cum_after = 1.0 - pmf_.tail_mass_after(i);
        bool inside;
        if (r->enumerable()) {
            double b = static_cast<double>(r->first + (r->count - 1));
            inside = x <= b;
            if (!inside) {
                prev_sym = b;
                cum_before = cum_after;
                continue;
            }
        } else {
            inside = true;  // non-enumerable runs cover the rest of the u64 range
        }
        double f = cum_before + (x - a + 1.0) * pe;
        return std::min(f, cum_after);
    }
}

double Cdf::inverse(double u) const {
    if (!(u >= 0.0) || u > 1.0) throw DomainError("inverse cdf: u must be in [0,1]");
    if (u == 0.0) return 0.0;
    if (u == 1.0 && !pmf_.finite_support()) return kInf;
    if (pmf_.kind() == Pmf::Kind::Harmonic) {
        // F(y) = 1 - 1/(y+1) on integers; find the segment containing u
        double y = std::floor(u / (1.0 - u));
        if (y < 1.0) return 1.0;  // jump at the first support point
        auto F = [](double t) { return 1.0 - 1.0 / (t + 1.0); };
        while (F(y) >= u) --y;
        while (F(y + 1.0) < u) ++y;
        if (y < 1.0) return 1.0;
        return y + (u - F(y)) / (F(y + 1.0) - F(y));
    }
    double cum_before = 0.0;
    double prev_sym = -1.0;
    for (std::size_t i = 0;; ++i) {
        auto r = pmf_.run(i);
        if (!r) {
            if (pmf_.finite_support()) {
                // u exceeded the accumulated total by rounding; clamp to the top
                auto last = pmf_.run(pmf_.run_count() - 1);
                return static_cast<double>(last->first + (last->count - 1));
            }
            throw ResourceError("inverse cdf: quantile beyond the representable support region");
        }
        double a = static_cast<double>(r->first);
        double pe = r->prob_each();
        double cum_after = 1.0 - pmf_.tail_mass_after(i);
        if (u <= cum_after) {
            if (u <= cum_before + pe) {
                // first symbol of the run: jump from the left, or gap segment
                if (prev_sym < 0.0) return a;
                return prev_sym + (u - cum_before) / pe * (a - prev_sym);
            }
            double pos = (u - cum_before) / pe;  // in (1, count]
            return a + pos - 1.0;
        }
        if (!r->enumerable())
            throw ResourceError("inverse cdf: quantile beyond the representable support region");
        prev_sym = static_cast<double>(r->first + (r->count - 1));
        cum_before = cum_after;
    }
}

// ---------------------------------------------------------------------------
// Sampling

Symbol Pmf::sample(std::mt19937_64& g) const {
    double u = uniform01(g);
    if (impl_->kind == Kind::Harmonic) {
        // smallest y with 1 - 1/(y+1) > u
        double y = std::floor(u / (1.0 - u));
        auto Fy = [](double t) { return 1.0 - 1.0 / (t + 1.0); };
        while (y >= 1.0 && Fy(y) > u) --y;
        while (Fy(y + 1.0) <= u) ++y;
        return static_cast<Symbol>(y + 1.0);
    }
    double cum_before = 0.0;
    for (std::size_t i = 0;; ++i) {
        auto r = run(i);
        if (!r) {
            if (finite_support()) {
                auto last = run(run_count() - 1);
                return last->first + (last->count - 1);
            }
            throw ResourceError("sample: quantile beyond the representable support region");
        }
        double cum_after = 1.0 - tail_mass_after(i);
        if (u < cum_after || (finite_support() && i + 1 == run_count())) {
            if (!r->enumerable())
                throw ResourceError("sample: run too large to index");
            double off = std::floor((u - cum_before) / r->prob_each());
            if (off < 0.0) off = 0.0;
            std::uint64_t o = static_cast<std::uint64_t>(off);
            if (o >= r->count) o = r->count - 1;
            return r->first + o;
        }
        cum_before = cum_after;
    }
}

std::vector<Symbol> Pmf::sample_n(std::uint64_t seed, std::size_t n) const {
    auto g = substream(seed, 0);
    std::vector<Symbol> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(sample(g));
    return out;
}

// ---------------------------------------------------------------------------
// Block minima (adversary support)

std::pair<Symbol, double> Pmf::min_in_block(std::uint32_t i) const {
    if (i > 62) throw ResourceError("min_in_block: block index above 62");
    Symbol lo = std::uint64_t{1} << i;
    Symbol hi = lo + (lo - 1);  // inclusive
    if (impl_->kind == Kind::Harmonic) {
        // strictly decreasing: the minimum sits at the top of the block
        return {hi - lo, log2_prob(hi)};
    }
    // walk runs intersecting [lo, hi]; a gap anywhere means probability zero
    Symbol cursor = lo;
    double best_lp = kInf;
    Symbol best_sym = lo;
    for (std::size_t r_idx = 0;; ++r_idx) {
        auto r = run(r_idx);
        if (!r) break;
        Symbol b;
        if (r->enumerable())
            b = r->first + (r->count - 1);
        else
            b = ~std::uint64_t{0};
        if (b < lo) continue;
        if (r->first > hi) break;
        if (r->first > cursor) return {cursor - lo, kNegInf};  // uncovered symbol
        Symbol seg_lo = std::max(r->first, lo);
        if (r->log2_prob < best_lp) {
            best_lp = r->log2_prob;
            best_sym = seg_lo;
        }
        Symbol seg_hi = std::min(b, hi);
        if (seg_hi == hi) return {best_sym - lo, best_lp};
        cursor = seg_hi + 1;
    }
    return {cursor - lo, kNegInf};  // support ended inside the block
}

double Pmf::min_log2_in_block(std::uint32_t i) const {
    if (i <= 62) return min_in_block(i).second;
    switch (impl_->kind) {
        case Kind::Harmonic: {
            double top_bits = static_cast<double>(i) + 1.0;
            double corr = std::log1p(-std::exp2(-top_bits)) * kLog2E;
            return -(2.0 * top_bits + corr);
        }
        case Kind::QU: {
            unsigned k = 1;
            while (static_cast<std::uint64_t>(k) * k < static_cast<std::uint64_t>(i) + 1) ++k;
            double kd = static_cast<double>(k);
            return -(kd * kd) - 2.0 * std::log2(kd) - (impl_->qu_R + 1.0);
        }
        case Kind::ClassU: {
            std::uint64_t ksq = impl_->u_k * impl_->u_k;
            if (static_cast<std::uint64_t>(i) >= ksq) return kNegInf;
            double kd = static_cast<double>(impl_->u_k);
            return -(kd * kd) - 2.0 * std::log2(kd);
        }
        case Kind::ClassI:
            return kNegInf;  // blocks have 2^i - 1 zero-probability elements
        default:
            throw ResourceError("min_log2_in_block: block index above 62 for an explicit pmf");
    }
}

// ---------------------------------------------------------------------------

double tightness_bound(const std::vector<Pmf>& members, double gamma) {
    if (!(gamma > 0.0) || !(gamma < 1.0)) throw DomainError("tightness: gamma must be in (0,1)");
    double best = 0.0;
    for (const auto& p : members) best = std::max(best, Cdf(p).inverse(1.0 - gamma));
    return best;
}

std::vector<std::pair<Symbol, double>> enumerate_support(const Pmf& p, std::size_t max_atoms) {
    if (!p.finite_support()) throw ModeError("enumerate_support: infinite support");
    std::vector<std::pair<Symbol, double>> out;
    for (std::size_t i = 0; i < p.run_count(); ++i) {
        auto r = p.run(i);
        if (!r->enumerable() || out.size() + r->count > max_atoms)
            throw ResourceError("enumerate_support: support larger than " +
                                std::to_string(max_atoms) + " atoms");
        double pe = r->prob_each();
        for (std::uint64_t k = 0; k < r->count; ++k) out.emplace_back(r->first + k, pe);
    }
    return out;
}

}  // namespace uclab
