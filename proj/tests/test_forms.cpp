#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "derham/form.hpp"
#include "derham/numeric_form.hpp"

#include <cmath>
#include <random>

using namespace derham;

namespace {

Polynomial random_poly(std::mt19937& rng, std::size_t n_vars, unsigned max_deg = 3) {
    std::uniform_int_distribution<int> coeff(-3, 3);
    std::uniform_int_distribution<unsigned> n_terms(1, 4);
    std::uniform_int_distribution<unsigned> expo(0, max_deg);
    Polynomial p(n_vars);
    unsigned terms = n_terms(rng);
    for (unsigned i = 0; i < terms; ++i) {
        Monomial m(n_vars, 0);
        unsigned budget = max_deg;
        for (std::size_t v = 0; v < n_vars; ++v) {
            unsigned e = std::min(expo(rng), budget);
            m[v] = e;
            budget -= e;
        }
        p.add_term(m, Rational(coeff(rng)));
    }
    return p;
}

PolyForm random_form(std::mt19937& rng, std::size_t n, std::size_t k) {
    PolyForm omega(n, k);
    // Run over all increasing index sets via bitmask.
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
        if (rng() % 3 == 0) continue;  // keep some components empty
        IndexSet I;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) I.push_back(static_cast<int>(i) + 1);
        omega.add_component(I, random_poly(rng, n));
    }
    return omega;
}

PolyForm dx(std::size_t n, int i) { return PolyForm::d_coordinate(n, i); }

}  // namespace

TEST_CASE("wedge algebra") {
    PolyForm a = dx(3, 1), b = dx(3, 2), c = dx(3, 3);
    CHECK(wedge(a, b) == -wedge(b, a));
    CHECK(wedge(a, a).is_zero());

    PolyForm x_dy(3, 1);
    x_dy.add_component({2}, Polynomial::variable(3, 0));
    PolyForm expect(3, 2);
    expect.add_component({2, 3}, Polynomial::variable(3, 0));
    CHECK(wedge(x_dy, c) == expect);
}

TEST_CASE("exterior derivative basics") {
    // d(x^2) = 2x dx
    Polynomial x2 = Polynomial::variable(2, 0) * Polynomial::variable(2, 0);
    PolyForm d_x2 = exterior_derivative(PolyForm::scalar(x2));
    PolyForm expect(2, 1);
    expect.add_component({1}, Rational(2) * Polynomial::variable(2, 0));
    CHECK(d_x2 == expect);

    // d(x dy) = dx ^ dy
    PolyForm x_dy(2, 1);
    x_dy.add_component({2}, Polynomial::variable(2, 0));
    PolyForm dxdy(2, 2);
    dxdy.add_component({1, 2}, Polynomial(2, Rational(1)));
    CHECK(exterior_derivative(x_dy) == dxdy);
}

TEST_CASE("d compose d vanishes on random forms") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        std::size_t n = 2 + rng() % 3;  // up to 4
        std::size_t k = rng() % n;
        PolyForm xi = random_form(rng, n, k);
        CHECK(exterior_derivative(exterior_derivative(xi)).is_zero());
    }
}

TEST_CASE("pullback examples") {
    // phi = r_t(x) = t*x in R^2 (base 0): dx1 pulls back to t dx1 + x1 dt.
    PolyMap r = PolyMap::radial_contraction({Rational(0), Rational(0)});
    PolyForm pb = pullback(dx(2, 1), r);
    PolyForm expect(2, 1, true);
    expect.add_component({1}, Polynomial::variable(3, 2));
    expect.add_component({3}, Polynomial::variable(3, 0));
    CHECK(pb == expect);

    // Identity map.
    std::mt19937 rng(3);
    PolyForm f = PolyForm::scalar(random_poly(rng, 2));
    CHECK(pullback(f, PolyMap::identity(2)) == f);

    // (x,y) -> (x^2, y) on dx^dy gives 2x dx^dy.
    PolyMap sq;
    sq.source_dim = sq.target_dim = 2;
    sq.components = {Polynomial::variable(2, 0) * Polynomial::variable(2, 0),
                     Polynomial::variable(2, 1)};
    PolyForm dxdy(2, 2);
    dxdy.add_component({1, 2}, Polynomial(2, Rational(1)));
    PolyForm expect2(2, 2);
    expect2.add_component({1, 2}, Rational(2) * Polynomial::variable(2, 0));
    CHECK(pullback(dxdy, sq) == expect2);
}

TEST_CASE("pullback commutes with d") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 8; ++trial) {
        std::size_t n = 2 + rng() % 2;
        std::size_t k = rng() % n;
        PolyForm omega = random_form(rng, n, k);
        PolyMap phi;
        phi.source_dim = phi.target_dim = n;
        for (std::size_t j = 0; j < n; ++j) phi.components.push_back(random_poly(rng, n, 2));
        CHECK(pullback(exterior_derivative(omega), phi) ==
              exterior_derivative(pullback(omega, phi)));
    }
}

TEST_CASE("split_dt decomposition") {
    // t^2 dx^dy + t x dt^dy  in R^2 with parameter t (t is variable 3).
    Polynomial t = Polynomial::variable(3, 2);
    Polynomial x = Polynomial::variable(3, 0);
    PolyForm omega(2, 2, true);
    omega.add_component({1, 2}, t * t);
    omega.add_component({3, 2}, t * x);  // dt ^ dy, entered unsorted
    auto [w0, w1] = split_dt(omega);

    PolyForm e0(2, 2, true);
    e0.add_component({1, 2}, t * t);
    CHECK(w0 == e0);
    PolyForm e1(2, 1, true);
    e1.add_component({2}, t * x);
    CHECK(w1 == e1);

    // No dt terms.
    auto [a0, a1] = split_dt(e0);
    CHECK(a0 == e0);
    CHECK(a1.is_zero());

    // dt ^ dx -> (0, dx)
    PolyForm dtdx(1, 2, true);
    dtdx.add_component({2, 1}, Polynomial(2, Rational(1)));
    auto [b0, b1] = split_dt(dtdx);
    CHECK(b0.is_zero());
    PolyForm just_dx(1, 1, true);
    just_dx.add_component({1}, Polynomial(2, Rational(1)));
    CHECK(b1 == just_dx);
}

TEST_CASE("split_dt recombines") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 6; ++trial) {
        std::size_t n = 2 + rng() % 2;
        std::size_t k = 1 + rng() % n;
        // Random parameter form: random components over indices {1..n+1}.
        PolyForm omega(n, k, true);
        for (unsigned mask = 0; mask < (1u << (n + 1)); ++mask) {
            if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
            IndexSet I;
            for (std::size_t i = 0; i <= n; ++i)
                if (mask & (1u << i)) I.push_back(static_cast<int>(i) + 1);
            omega.add_component(I, random_poly(rng, n + 1, 2));
        }
        auto [w0, w1] = split_dt(omega);
        PolyForm dt_form(n, 1, true);
        dt_form.add_component({omega.dt_index()}, Polynomial(n + 1, Rational(1)));
        CHECK(w0 + wedge(dt_form, w1) == omega);
    }
}

TEST_CASE("radial homotopy closed forms") {
    std::vector<Rational> origin2{Rational(0), Rational(0)};

    // R(dx1) = x1
    PolyForm prim = radial_homotopy(dx(2, 1), origin2);
    CHECK(prim == PolyForm::scalar(Polynomial::variable(2, 0)));

    // R(dx^dy) = (x dy - y dx)/2
    PolyForm dxdy(2, 2);
    dxdy.add_component({1, 2}, Polynomial(2, Rational(1)));
    PolyForm expect(2, 1);
    expect.add_component({2}, Rational(1, 2) * Polynomial::variable(2, 0));
    expect.add_component({1}, Rational(-1, 2) * Polynomial::variable(2, 1));
    CHECK(radial_homotopy(dxdy, origin2) == expect);

    // R(2x dx) = x^2
    PolyForm two_x_dx(2, 1);
    two_x_dx.add_component({1}, Rational(2) * Polynomial::variable(2, 0));
    Polynomial x2 = Polynomial::variable(2, 0) * Polynomial::variable(2, 0);
    CHECK(radial_homotopy(two_x_dx, origin2) == PolyForm::scalar(x2));
}

TEST_CASE("homotopy identity, exact") {
    std::mt19937 rng(31);
    for (Rational eps : {Rational(0), Rational(1, 2)}) {
        for (int trial = 0; trial < 8; ++trial) {
            std::size_t n = 2 + rng() % 2;
            std::size_t k = rng() % (n + 1);
            PolyForm omega = random_form(rng, n, k);
            std::vector<Rational> base;
            std::uniform_int_distribution<int> b(-2, 2);
            for (std::size_t i = 0; i < n; ++i) base.push_back(Rational(b(rng)));

            PolyForm lhs = exterior_derivative(radial_homotopy(omega, base, eps)) +
                           radial_homotopy(exterior_derivative(omega), base, eps);
            PolyForm rhs = omega - pullback(omega, PolyMap::radial_contraction_at(base, eps));
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("closed forms get exact primitives") {
    std::mt19937 rng(41);
    for (int trial = 0; trial < 8; ++trial) {
        std::size_t n = 2 + rng() % 3;
        std::size_t k = rng() % n;
        PolyForm omega = exterior_derivative(random_form(rng, n, k));
        if (omega.is_zero()) continue;
        std::vector<Rational> base(n, Rational(0));
        CHECK(exterior_derivative(radial_homotopy(omega, base)) == omega);
    }
}

TEST_CASE("pointwise comass") {
    std::vector<double> p{0.3, -1.2};
    CHECK(pointwise_norm(dx(2, 1), p) == doctest::Approx(1.0));

    PolyForm two_dxdy(2, 2);
    two_dxdy.add_component({1, 2}, Polynomial(2, Rational(2)));
    CHECK(pointwise_norm(two_dxdy, p) == doctest::Approx(2.0));

    PolyForm diag = dx(2, 1) + dx(2, 2);
    CHECK(pointwise_norm(diag, p) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));

    // Sampled middle degree: |dx1^dx2| in R^3 equals 1; frames give a tight
    // lower bound.
    PolyForm mid(3, 2);
    mid.add_component({1, 2}, Polynomial(3, Rational(1)));
    double norm = pointwise_norm(mid, {0.0, 0.0, 0.0});
    CHECK(norm <= 1.0 + 1e-12);
    CHECK(norm >= 0.99);
}

TEST_CASE("line integrals") {
    const double pi = std::acos(-1.0);

    NumericForm winding;
    winding.n_vars = 2;
    winding.degree = 1;
    winding.evaluator = [](const std::vector<double>& x) {
        double r2 = x[0] * x[0] + x[1] * x[1];
        return std::map<IndexSet, double>{{{1}, -x[1] / r2}, {{2}, x[0] / r2}};
    };
    Curve circle;
    circle.point = [](double s) { return std::vector<double>{std::cos(s), std::sin(s)}; };
    circle.s0 = 0;
    circle.s1 = 2 * pi;
    CHECK(line_integral(winding, circle, 1e-10) == doctest::Approx(2 * pi).epsilon(1e-8));

    // Exact form over a closed loop integrates to zero: d(x^2 + y) has
    // components (2x, 1).
    Polynomial f = Polynomial::variable(2, 0) * Polynomial::variable(2, 0) +
                   Polynomial::variable(2, 1);
    NumericForm df = NumericForm::from_poly(exterior_derivative(PolyForm::scalar(f)));
    CHECK(line_integral(df, circle, 1e-10) == doctest::Approx(0.0).epsilon(1e-8));

    NumericForm zero;
    zero.n_vars = 2;
    zero.degree = 1;
    zero.evaluator = [](const std::vector<double>&) { return std::map<IndexSet, double>{}; };
    CHECK(line_integral(zero, circle) == doctest::Approx(0.0));
}

TEST_CASE("serialization round trip") {
    std::mt19937 rng(53);
    for (int trial = 0; trial < 6; ++trial) {
        std::size_t n = 2 + rng() % 3;
        std::size_t k = rng() % (n + 1);
        PolyForm omega = random_form(rng, n, k);
        std::string text = serialize_form(omega);
        CHECK(deserialize_form(text) == omega);
        CHECK(serialize_form(deserialize_form(text)) == text);
    }

    // Big coefficients survive.
    PolyForm big(1, 1);
    Rational huge = rational_pow(Rational(10), 30) / Rational(7);
    big.add_component({1}, Polynomial(1, huge));
    CHECK(deserialize_form(serialize_form(big)) == big);
}
