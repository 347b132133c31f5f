#include <cmath>
#include <numbers>

#include <boost/math/special_functions/hypergeometric_1F1.hpp>
#include <gtest/gtest.h>

#include "fraccond/limits/limits.hpp"

using namespace fraccond;

namespace {

const std::vector<double> kDefaultS{0.6, 0.8, 0.9, 0.95};

double gauss(double x, double c = 0.0) { return std::exp(-0.5 * (x - c) * (x - c)); }

/// Decreasing, allowing one step that rises by at most 10% relative.
bool mostly_decreasing(const std::vector<double>& v) {
    int rises = 0;
    for (std::size_t k = 1; k < v.size(); ++k) {
        if (v[k] > v[k - 1]) {
            if (v[k] > 1.1 * v[k - 1]) return false;
            ++rises;
        }
    }
    return rises <= 1;
}

std::vector<double> gaps(const std::vector<LimitRow>& rows) {
    std::vector<double> g;
    for (const auto& r : rows) g.push_back(r.gap);
    return g;
}

RefinementSchedule coarse() {
    RefinementSchedule s;
    s.intervals_start = 256;
    s.intervals_max = 1024;
    return s;
}

} // namespace

TEST(GradNormSq, ConstantIsTailOnly) {
    const Grid g(4.0, 201, -1.0, 1.0);
    const FracParams fp(0.5);
    const NodeField c = NodeField::Constant(201, 2.0);
    EXPECT_EQ(grad_norm_sq(g, fp, c, TailTerm::exclude), 0.0);
    double tail = 0.0;
    for (Index i = 0; i < 201; ++i) tail += tail_weight(g, fp, i) * 4.0;
    EXPECT_NEAR(grad_norm_sq(g, fp, c), g.spacing() * tail, 1e-12 * g.spacing() * tail);
    EXPECT_FALSE(decays_at_edges(c));
}

TEST(GradNormSq, MatchesQuadraticFormOfLaplacian) {
    const Grid g(4.0, 300, -1.0, 1.0);
    const FracParams fp(0.7);
    const NodeField u = g.sample([](double x) { return std::sin(3.0 * x) * std::exp(-x * x); });
    const double via_matrix = g.spacing() * u.dot(assemble_laplacian(g, fp).apply(u));
    EXPECT_NEAR(grad_norm_sq(g, fp, u), via_matrix, 1e-12 * via_matrix);
}

TEST(GradNormSq, GaussianAtHalfOrder) {
    const Grid g(12.0, 4096, -1.0, 1.0);
    EXPECT_NEAR(grad_norm_sq(g, FracParams(0.5), g.sample([](double x) { return gauss(x); })), 1.0, 0.02);
}

TEST(GradNormSq, GaussianHConvergedMatchesGamma) {
    for (double s : {0.5, 0.9}) {
        const FracParams fp(s);
        const ConvergedValue cv = h_converged(
            [&](const Grid& g) {
                return std::pair{grad_norm_sq(g, fp, g.sample([](double x) { return gauss(x); })), 0.0};
            },
            s, RefinementSchedule{});
        EXPECT_TRUE(cv.converged);
        EXPECT_NEAR(cv.value, std::tgamma(s + 0.5), (s == 0.5 ? 0.02 : 0.03) * std::tgamma(s + 0.5)) << s;
    }
}

TEST(GradNormSq, QuadraticScaling) {
    const Grid g(6.0, 400, -1.0, 1.0);
    const FracParams fp(0.6);
    const NodeField u = g.sample([](double x) { return gauss(x, 0.4); });
    EXPECT_NEAR(grad_norm_sq(g, fp, 2.0 * u), 4.0 * grad_norm_sq(g, fp, u), 1e-12);
}

TEST(GradNormSq, FrozenGridVanishesAsOrderTendsToOne) {
    // with h fixed the normalizing constant C_{1,s} -> 0 wins; the local limit needs h -> 0 first
    const Grid g(8.0, 129, -1.0, 1.0);
    const NodeField u = g.sample([](double x) { return gauss(x); });
    double prev = INFINITY;
    for (double s : {0.9, 0.95, 0.98, 0.99}) {
        const double v = grad_norm_sq(g, FracParams(s), u);
        EXPECT_LT(v, prev);
        prev = v;
    }
    EXPECT_LT(prev, 0.5 * std::sqrt(std::numbers::pi) / 2.0);
}

TEST(CentralDifference, GaussianEnergy) {
    const Grid g(8.0, 4097, -1.0, 1.0);
    const NodeField u = g.sample([](double x) { return gauss(x); });
    EXPECT_NEAR(central_difference_energy(g, NodeField::Ones(g.size()), u, u), std::sqrt(std::numbers::pi) / 2.0, 1e-5);
}

TEST(LimitStudies, RejectInvalidOrders) {
    EXPECT_THROW(grad_limit_study([](double x) { return gauss(x); }, {}, coarse()), ValidationError);
    EXPECT_THROW(grad_limit_study([](double x) { return gauss(x); }, {0.8, 0.6}, coarse()), ValidationError);
    EXPECT_THROW(grad_limit_study([](double x) { return gauss(x); }, {0.5, 1.0}, coarse()), ValidationError);
    EXPECT_EQ(relative_gap(0.0, 0.0), 0.0);
    EXPECT_EQ(relative_gap(0.5, 0.0), 0.5);
}

TEST(GradLimitStudy, GaussianGapShrinks) {
    const LimitStudy st = grad_limit_study([](double x) { return gauss(x); }, kDefaultS);
    ASSERT_EQ(st.rows.size(), 4u);
    for (const auto& r : st.rows) EXPECT_NEAR(r.reference, std::sqrt(std::numbers::pi) / 2.0, 1e-3);
    EXPECT_LE(st.rows[2].gap, 0.10);
    EXPECT_TRUE(mostly_decreasing(gaps(st.rows)));
    EXPECT_TRUE(st.warnings.empty());
}

TEST(GradLimitStudy, ZeroFieldAndScaling) {
    const LimitStudy zero = grad_limit_study([](double) { return 0.0; }, {0.6, 0.9}, coarse());
    for (const auto& r : zero.rows) {
        EXPECT_EQ(r.discrete, 0.0);
        EXPECT_EQ(r.reference, 0.0);
        EXPECT_EQ(r.gap, 0.0);
    }
    const LimitStudy one = grad_limit_study([](double x) { return gauss(x); }, {0.7}, coarse());
    const LimitStudy two = grad_limit_study([](double x) { return 2.0 * gauss(x); }, {0.7}, coarse());
    EXPECT_NEAR(two.rows[0].discrete, 4.0 * one.rows[0].discrete, 1e-12);
    EXPECT_NEAR(two.rows[0].reference, 4.0 * one.rows[0].reference, 1e-12);
    const LimitStudy flat = grad_limit_study([](double) { return 1.0; }, {0.7}, coarse());
    EXPECT_FALSE(flat.warnings.empty());
}

TEST(BilinearLimitStudy, UnitGammaReducesToGradStudy) {
    auto u = [](double x) { return gauss(x); };
    const LimitStudy b = bilinear_limit_study(ConductivityProfile::constant(), u, u, {0.6, 0.9}, coarse());
    const LimitStudy g = grad_limit_study(u, {0.6, 0.9}, coarse());
    for (std::size_t k = 0; k < 2; ++k) {
        EXPECT_NEAR(b.rows[k].discrete, g.rows[k].discrete, 1e-10 * g.rows[k].discrete);
        EXPECT_NEAR(b.rows[k].reference, g.rows[k].reference, 1e-12);
    }
}

TEST(BilinearLimitStudy, ParityGivesZero) {
    const auto bump = ConductivityProfile::bump(0.3, 0.0, 1.0);
    const LimitStudy st = bilinear_limit_study(
        bump, [](double x) { return gauss(x); }, [](double x) { return x * gauss(x); }, {0.6, 0.9}, coarse());
    for (const auto& r : st.rows) {
        EXPECT_LE(std::abs(r.discrete), 1e-12);
        EXPECT_LE(std::abs(r.reference), 1e-12);
    }
}

TEST(BilinearLimitStudy, BumpGapAtHighOrder) {
    const auto bump = ConductivityProfile::bump(0.3, 0.0, 1.0);
    const LimitStudy st = bilinear_limit_study(
        bump, [](double x) { return gauss(x, -0.25); }, [](double x) { return gauss(x, 0.25); }, kDefaultS);
    EXPECT_LE(st.rows[2].gap, 0.15);
    EXPECT_TRUE(mostly_decreasing(gaps(st.rows)));
}

TEST(OperatorLimitCheck, UnitGammaApproachesWeakLaplacian) {
    const std::vector<double> s_list{0.6, 0.8, 0.95};
    const LimitStudy st = operator_limit_check(ConductivityProfile::constant(), [](double x) { return gauss(x); }, s_list);
    for (const auto& [label, phi] : default_test_panel()) {
        const auto rows = st.rows_labelled(label);
        ASSERT_EQ(rows.size(), 3u);
        const double c = std::sqrt(-2.0 * std::log(phi(0.0)));
        // <phi, (-Delta)^s u> = Gamma(s + 1/2) 1F1(s + 1/2; 1/2; -c^2/4) for unit Gaussians offset by c
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const double s = s_list[k];
            const double exact = std::tgamma(s + 0.5) * boost::math::hypergeometric_1F1(s + 0.5, 0.5, -0.25 * c * c);
            EXPECT_NEAR(rows[k].discrete, exact, 0.01 * std::max(std::abs(exact), 0.05)) << label << " s=" << s;
        }
        // s = 1 value of the same formula: int phi' u'
        const double local = std::sqrt(std::numbers::pi) / 2.0 * (1.0 - 0.5 * c * c) * std::exp(-0.25 * c * c);
        EXPECT_NEAR(rows.back().reference, local, 1e-4) << label;
    }
    // the test function centred near the mass of u: within 10% at s = 0.95
    EXPECT_LE(st.rows_labelled("phi(0.3)").back().gap, 0.10);
    EXPECT_TRUE(mostly_decreasing(gaps(st.rows_labelled("phi(0.3)"))));
}

TEST(OperatorLimitCheck, ZeroInputAndSign) {
    const LimitStudy zero = operator_limit_check(ConductivityProfile::constant(), [](double) { return 0.0; }, {0.7}, coarse());
    for (const auto& r : zero.rows) {
        EXPECT_EQ(r.discrete, 0.0);
        EXPECT_EQ(r.reference, 0.0);
    }
    const auto bump = ConductivityProfile::bump(0.4, 0.2, 1.0);
    const Grid g(8.0, 513, -4.0, 4.0);
    const Conductivity c = Conductivity::sample(g, bump);
    for (double s : {0.1, 0.5, 0.9, 0.99}) {
        for (double center : {-1.0, 0.3, 1.2}) {
            const NodeField p = g.sample([center](double x) { return gauss(x, center); });
            EXPECT_GE(g.spacing() * p.dot(conductivity_action(g, FracParams(s), c, p)), 0.0);
        }
    }
}

TEST(GradientDecay, ValuesShrinkTowardOne) {
    auto u = [](double x) { return gauss(x, 0.3); };
    auto phi = [](double x, double y) { return std::exp(-((x + 1.0) * (x + 1.0) + (y - 1.0) * (y - 1.0)) / 0.5); };
    const std::vector<double> v = gradient_distributional_decay(u, phi, kDefaultS);
    ASSERT_EQ(v.size(), 4u);
    for (std::size_t k = 1; k < v.size(); ++k) EXPECT_LT(std::abs(v[k]), std::abs(v[k - 1]));
    EXPECT_LE(std::abs(v.back()), 0.5 * std::abs(v.front()));
}

TEST(GradientDecay, SymmetryOfThePairing) {
    auto u = [](double x) { return gauss(x, 0.3); };
    auto phi = [](double x, double y) { return std::exp(-((x + 1.0) * (x + 1.0) + (y - 1.0) * (y - 1.0)) / 0.5); };
    auto swapped = [&](double x, double y) { return phi(y, x); };
    auto antisym = [&](double x, double y) { return phi(x, y) - phi(y, x); };
    const std::vector<double> s{0.6, 0.9};
    const auto a = gradient_distributional_decay(u, phi, s, 6.0, 256);
    const auto b = gradient_distributional_decay(u, swapped, s, 6.0, 256);
    const auto c = gradient_distributional_decay(u, antisym, s, 6.0, 256);
    const auto z = gradient_distributional_decay([](double) { return 0.0; }, phi, s, 6.0, 256);
    for (std::size_t k = 0; k < s.size(); ++k) {
        // the pair gradient is even in (x, y), so swapping phi changes nothing and the odd part pairs to 0
        EXPECT_NEAR(a[k], b[k], 1e-12 * std::abs(a[k]));
        EXPECT_LE(std::abs(c[k]), 1e-12 * std::abs(a[k]));
        EXPECT_EQ(z[k], 0.0);
    }
}

TEST(DnFormLimitStudy, RowsAreProducedAndApproachLocalForm) {
    RefinementSchedule sched;
    sched.half_width = 4.0;
    sched.intervals_start = 128;
    sched.intervals_max = 512;
    auto f = [](double x) { return gauss(x, -1.5); };
    auto g = [](double x) { return gauss(x, 1.5); };
    const LimitStudy st =
        dn_form_limit_study(ConductivityProfile::bump(0.3, 0.0, 0.4), -0.5, 0.5, f, g, {0.6, 0.9}, sched);
    ASSERT_EQ(st.rows.size(), 2u);
    for (const auto& r : st.rows) {
        EXPECT_TRUE(std::isfinite(r.discrete));
        EXPECT_TRUE(std::isfinite(r.reference));
        EXPECT_EQ(r.label, "dn-form");
    }
    EXPECT_LT(st.rows[1].gap, st.rows[0].gap);
}
