#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include <carpetdim/carpet.hpp>
#include <carpetdim/frontier.hpp>

using namespace carpetdim;

namespace {

const CarpetSpec kFig = CarpetSpec::from_fiber_counts(3, 8, {5, 2, 8});

// All (H(nu), E(nu)) pairs over the resolution-K lattice of row
// distributions, reduced to "best E with H >= threshold": sorted by H
// descending with a running max of E. z + query(z) underestimates psi(z)
// by the lattice gap only; feasibility (H >= z) is never relaxed.
struct LatticeOracle {
    std::vector<std::pair<double, double>> pts;  // (H desc, prefix-max E)

    LatticeOracle(const CarpetSpec& spec, int K) {
        const int R = spec.num_rows();
        std::vector<int> c(static_cast<std::size_t>(R), 0);
        auto rec = [&](auto&& self, int idx, int rem) -> void {
            if (idx == R - 1) {
                c[static_cast<std::size_t>(idx)] = rem;
                double hh = 0, ee = 0;
                for (int r = 0; r < R; ++r) {
                    if (c[static_cast<std::size_t>(r)] == 0) continue;
                    double nu = static_cast<double>(c[static_cast<std::size_t>(r)]) / K;
                    hh -= nu * std::log(nu);
                    ee += nu * spec.log_fiber(r);
                }
                pts.emplace_back(hh, ee);
                return;
            }
            for (int k = 0; k <= rem; ++k) {
                c[static_cast<std::size_t>(idx)] = k;
                self(self, idx + 1, rem - k);
            }
        };
        rec(rec, 0, K);
        std::sort(pts.begin(), pts.end(),
                  [](const auto& a, const auto& b) { return a.first > b.first; });
        double run = -1e300;
        for (auto& p : pts) {
            run = std::max(run, p.second);
            p.second = run;
        }
    }

    double psi(double z) const {
        // last index with H >= z; pts sorted by H descending. The 1e-12
        // slack only absorbs rounding in the uniform point's H at z = log R.
        std::size_t lo = 0, hi = pts.size();
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (pts[mid].first >= z - 1e-12)
                lo = mid + 1;
            else
                hi = mid;
        }
        REQUIRE(lo > 0);  // z <= log R and K divisible by R keep this nonempty
        return z + pts[lo - 1].second;
    }
};

}  // namespace

TEST_CASE("tilted rows at the landmark tilts") {
    auto rows1 = tilted_rows(kFig, 1.0);  // proportional to T_a
    CHECK(rows1[0] == doctest::Approx(5.0 / 15).epsilon(1e-13));
    CHECK(rows1[1] == doctest::Approx(2.0 / 15).epsilon(1e-13));
    auto rows0 = tilted_rows(kFig, 0.0);  // uniform
    CHECK(rows0[0] == doctest::Approx(1.0 / 3).epsilon(1e-13));
    auto rowsd = tilted_rows(kFig, 1.0 / kFig.tau());  // the p_d rows
    CHECK(rowsd[0] == doctest::Approx(0.34505186084088275462).epsilon(1e-12));
    CHECK(rowsd[2] == doctest::Approx(0.44230842648072616467).epsilon(1e-12));
}

TEST_CASE("psi endpoint identities and landmarks") {
    Frontier f(kFig);
    CHECK(f.z_lo() == doctest::Approx(0.97011578398693807147).epsilon(1e-13));
    CHECK(f.z_dim() == doctest::Approx(1.057167672764072754).epsilon(1e-13));
    CHECK(f.z_hi() == doctest::Approx(std::log(3.0)).epsilon(1e-14));
    CHECK(f.psi(f.z_hi()) == doctest::Approx(2.5592878335594035622).epsilon(1e-12));   // h(p_R)
    CHECK(f.psi(f.z_lo()) == doctest::Approx(2.708050201102210066).epsilon(1e-12));    // log D
    CHECK(f.psi(f.z_dim()) == doctest::Approx(2.6796523529344920174).epsilon(1e-12));  // h(p_d)

    double beta;
    REQUIRE(f.solve_beta(f.z_lo(), beta));
    CHECK(beta == doctest::Approx(1.0).epsilon(1e-10));
    REQUIRE(f.solve_beta(f.z_dim(), beta));
    CHECK(beta == doctest::Approx(1.0 / kFig.tau()).epsilon(1e-10));
    REQUIRE(f.solve_beta(f.z_hi(), beta));
    CHECK(beta == doctest::Approx(0.0));

    // frozen regression anchor at z = 1.03
    REQUIRE(f.solve_beta(1.03, beta));
    CHECK(beta == doctest::Approx(0.69604452810367069837).epsilon(1e-11));
    CHECK(f.psi(1.03) == doctest::Approx(2.6969477306971340723).epsilon(1e-12));

    CHECK_THROWS_AS(f.psi(-0.1), DomainError);
    CHECK_THROWS_AS(f.psi(f.z_hi() + 0.1), DomainError);
}

TEST_CASE("psi against the lattice oracle, R <= 3") {
    for (const auto& spec :
         {kFig, CarpetSpec::from_fiber_counts(2, 4, {2, 1}),
          CarpetSpec::from_fiber_counts(3, 9, {7, 3, 1})}) {
        Frontier f(spec);
        // resolution a multiple of R so the uniform distribution (the sole
        // feasible point at z = log R) sits on the lattice
        const int R = spec.num_rows();
        const int K = ((800 + R - 1) / R) * R;
        LatticeOracle oracle(spec, K);
        for (int i = 0; i <= 40; ++i) {
            double z = f.z_hi() * i / 40.0;
            double lo = oracle.psi(z);
            double exact = f.psi(z);
            CHECK(exact >= lo - 1e-9);        // lattice points are feasible
            CHECK(exact - lo <= 2e-3);        // lattice resolves the maximum
        }
    }
}

TEST_CASE("psi on the non-binding branch is linear with slope 1") {
    auto spec = CarpetSpec::from_fiber_counts(3, 9, {7, 3, 1});
    Frontier f(spec);
    // one row of maximal fiber count: branch below log(1) = 0 is empty, so
    // use a spec with two maximal rows to spread the branch out
    auto spec2 = CarpetSpec::from_fiber_counts(3, 9, {7, 7, 1});
    Frontier f2(spec2);
    double sharp2 = std::log(2.0);
    for (double z : {0.0, 0.2, 0.5, sharp2 * 0.99}) {
        CHECK(f2.psi(z) == doctest::Approx(z + std::log(7.0)).epsilon(1e-10));
        double beta;
        CHECK_FALSE(f2.solve_beta(z, beta));
    }
    CHECK(f.psi(0.0) == doctest::Approx(std::log(7.0)).epsilon(1e-10));
}

TEST_CASE("phi is the three-piece inverse") {
    Frontier f(kFig);
    const double logR = kFig.log_rows();
    const double logD = kFig.log_alphabet();
    const double h_pR = f.h_pR();
    // piece 1: identity up to log R
    for (double x : {0.0, 0.5, logR}) CHECK(f.phi(x) == doctest::Approx(x).epsilon(1e-12));
    // piece 2: flat at log R
    for (double x : {logR + 1e-3, 0.5 * (logR + h_pR), h_pR})
        CHECK(f.phi(x) == doctest::Approx(logR).epsilon(1e-10));
    // piece 3: inverse of psi on [h(p_R), log D]
    for (int i = 0; i <= 100; ++i) {
        double z = f.z_lo() + (f.z_hi() - f.z_lo()) * i / 100.0;
        CHECK(std::fabs(f.phi(f.psi(z)) - z) <= 1e-8);
    }
    // x(beta) = H + E is quadratically flat at beta = 1, so inverting a
    // double-rounded x near log D carries sqrt(ulp) ~ 1e-8 uncertainty in z;
    // no algorithm recovers z_lo tighter than that from x alone.
    CHECK(std::fabs(f.phi(logD) - f.z_lo()) <= 5e-8);
    CHECK_THROWS_AS(f.phi(-0.1), DomainError);
    CHECK_THROWS_AS(f.phi(logD + 0.1), DomainError);
}

TEST_CASE("psi and phi are concave") {
    for (const auto& spec : {kFig, CarpetSpec::from_fiber_counts(2, 4, {2, 1})}) {
        Frontier f(spec);
        const int G = 200;
        std::vector<double> zs(G + 1), ps(G + 1);
        for (int i = 0; i <= G; ++i) {
            zs[static_cast<std::size_t>(i)] = f.z_hi() * i / G;
            ps[static_cast<std::size_t>(i)] = f.psi(zs[static_cast<std::size_t>(i)]);
        }
        for (int i = 1; i < G; ++i) {
            double second = ps[static_cast<std::size_t>(i + 1)] - 2 * ps[static_cast<std::size_t>(i)] +
                            ps[static_cast<std::size_t>(i - 1)];
            CHECK(second <= 1e-9);
        }
        std::vector<double> xs(G + 1), qs(G + 1);
        for (int i = 0; i <= G; ++i) {
            xs[static_cast<std::size_t>(i)] = spec.log_alphabet() * i / G;
            qs[static_cast<std::size_t>(i)] = f.phi(xs[static_cast<std::size_t>(i)]);
        }
        for (int i = 1; i < G; ++i) {
            double second = qs[static_cast<std::size_t>(i + 1)] - 2 * qs[static_cast<std::size_t>(i)] +
                            qs[static_cast<std::size_t>(i - 1)];
            CHECK(second <= 1e-9);
        }
    }
}

TEST_CASE("lift produces the within-row-uniform frontier measure") {
    Frontier f(kFig);
    for (double z : {f.z_lo(), 1.0, f.z_dim(), 1.09, f.z_hi()}) {
        auto p = f.lift(kFig, z);
        CHECK(std::fabs(row_entropy(kFig, p) - z) <= 1e-10);
        CHECK(std::fabs(entropy(p) - f.psi(z)) <= 1e-10);
        for (int r = 0; r < kFig.num_rows(); ++r)
            for (int j = 1; j < kFig.fiber_count(r); ++j)
                CHECK(p[static_cast<std::size_t>(kFig.symbol_index(r, j))] ==
                      p[static_cast<std::size_t>(kFig.symbol_index(r, 0))]);
    }
    CHECK_THROWS_AS(f.lift(kFig, f.z_lo() - 1e-3), DomainError);
    CHECK_THROWS_AS(f.lift(kFig, f.z_hi() + 1e-3), DomainError);

    auto pt = frontier_point(kFig, 1.03);
    CHECK(pt.z == doctest::Approx(1.03));
    CHECK(pt.psi == doctest::Approx(2.6969477306971340723).epsilon(1e-12));
    double sum = 0;
    for (double r : pt.rows) sum += r;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("degenerate all-equal carpet: the frontier is a line") {
    auto t = CarpetSpec::full_torus(2, 4);
    Frontier f(t);
    CHECK(f.z_lo() == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(f.z_dim() == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(f.psi(0.0) == doctest::Approx(std::log(4.0)).epsilon(1e-13));
    CHECK(f.psi(std::log(2.0)) == doctest::Approx(std::log(8.0)).epsilon(1e-13));
    CHECK(f.phi(std::log(8.0)) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(f.phi(0.3) == doctest::Approx(0.3).epsilon(1e-12));
}
