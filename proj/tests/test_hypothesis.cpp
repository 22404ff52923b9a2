#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "test_util.hpp"
#include "tsecon/distributions.hpp"
#include "tsecon/hypothesis.hpp"
#include "tsecon/io.hpp"
#include "tsecon/pipeline.hpp"

using namespace tsecon;
using namespace tsecon::hypothesis;
using testutil::make_series;
using Catch::Approx;

namespace {

struct Fixture {
    TimeSeries dtech, dnontech, dvol_tech, dvol_nontech;
};

const Fixture& fixture() {
    static const Fixture fx = [] {
        const auto a = ingest::parse_quote_csv(testutil::data_path("ndxt.csv"));
        const auto b = ingest::parse_quote_csv(testutil::data_path("ndxx.csv"));
        const auto pair = ingest::align_and_clean(a, b);
        const VolatilitySpec spec{100};
        return Fixture{difference(pair.a, 1), difference(pair.b, 1),
                       difference(rolling_volatility(pair.a, spec), 1),
                       difference(rolling_volatility(pair.b, spec), 1)};
    }();
    return fx;
}

}  // namespace

TEST_CASE("mean_zero_ttest: antisymmetric series has t = 0, p = 1", "[hypothesis]") {
    const auto res = mean_zero_ttest(make_series({-2, -1, 0, 1, 2}));
    CHECK(res.statistic == 0.0);
    CHECK(res.p_value == 1.0);
    CHECK_FALSE(res.reject);
    CHECK(res.df == 4.0);
}

TEST_CASE("mean_zero_ttest: five-point closed form", "[hypothesis]") {
    // values 1..5: mean 3, sd sqrt(2.5), t = 3 / (sqrt(2.5)/sqrt(5)) = 4.24264
    const auto res = mean_zero_ttest(make_series({1, 2, 3, 4, 5}));
    CHECK(res.statistic == Approx(3.0 / std::sqrt(2.5 / 5.0)).margin(1e-12));
    CHECK(res.mean_estimate == Approx(3.0));
    CHECK(res.n == 5);
    // p from a direct numeric integration of the t density with 4 df
    const double upper = 0.5 - oracle::simpson(&oracle::t_density, 0.0, res.statistic, 4.0);
    CHECK(res.p_value == Approx(2.0 * upper).margin(1e-6));
}

TEST_CASE("mean_zero_ttest: errors", "[hypothesis]") {
    CHECK_THROWS_AS(mean_zero_ttest(make_series({1})), InsufficientData);
    CHECK_THROWS_AS(mean_zero_ttest(make_series({2, 2, 2, 2})), DegenerateSeries);
}

TEST_CASE("mean_zero_ttest: fixture full-sample level gap", "[hypothesis][fixture]") {
    const auto& fx = fixture();
    std::vector<double> gap(fx.dtech.size());
    for (std::size_t i = 0; i < gap.size(); ++i) gap[i] = fx.dtech[i] - fx.dnontech[i];
    const auto res = mean_zero_ttest(TimeSeries("gap", fx.dtech.dates(), std::move(gap)));
    CHECK(res.statistic == Approx(0.6951).margin(0.01));
    CHECK(res.p_value == Approx(0.487).margin(0.01));
    CHECK(res.n == 4273);
}

TEST_CASE("split_by_periods: covid boundary is inclusive on the start date", "[hypothesis]") {
    std::vector<Date> dates{Date::from_ymd(2020, 1, 17), Date::from_ymd(2020, 1, 20),
                            Date::from_ymd(2020, 1, 21)};
    const TimeSeries s("x", dates, {1.0, 2.0, 3.0});
    const auto slices = split_by_periods(s, ingest::default_periods());
    REQUIRE(slices.size() == 5);
    CHECK(slices[2].period.label == "Pre-covid");
    CHECK(slices[2].series.size() == 1);
    CHECK(slices[3].period.label == "Covid");
    CHECK(slices[3].series.size() == 2);
    CHECK(slices[3].series[0] == 2.0);  // 2020-01-20 falls in Covid

    CHECK(slices[0].empty);  // GFC has no observations here
    CHECK(slices[0].series.empty());
}

TEST_CASE("split_by_periods: two-halves split partitions every observation", "[hypothesis]") {
    const auto s = make_series(testutil::gaussian_noise(1000, 17));
    const Date cut = s.dates()[499];
    PeriodSet halves({{"first", s.dates().front(), cut},
                      {"second", cut + 1, s.dates().back()}});
    const auto slices = split_by_periods(s, halves);
    CHECK(slices[0].series.size() + slices[1].series.size() == s.size());
}

TEST_CASE("decoupling_table: identical series are flagged, not crashed", "[hypothesis]") {
    const auto s = make_series(testutil::gaussian_noise(300, 3));
    const PeriodSet full({{"all", s.dates().front(), s.dates().back()}});
    const auto rows = decoupling_table(s, s, full);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].status == EntryStatus::not_computable);
    CHECK_FALSE(rows[0].test.has_value());
}

TEST_CASE("decoupling_table: fixture pre-covid level decoupling", "[hypothesis][fixture]") {
    const auto& fx = fixture();
    const auto rows = decoupling_table(fx.dtech, fx.dnontech, ingest::default_periods());
    REQUIRE(rows.size() == 5);
    CHECK(rows[2].period.label == "Pre-covid");
    REQUIRE(rows[2].status == EntryStatus::ok);
    CHECK(rows[2].test->statistic == Approx(2.299).margin(0.05));
    CHECK(rows[2].test->p_value == Approx(0.023).margin(0.005));
    CHECK(rows[2].test->reject);
}

TEST_CASE("decoupling_table: fixture covid volatility decoupling", "[hypothesis][fixture]") {
    const auto& fx = fixture();
    const auto rows = decoupling_table(fx.dvol_tech, fx.dvol_nontech, ingest::default_periods());
    REQUIRE(rows.size() == 5);
    CHECK(rows[3].period.label == "Covid");
    REQUIRE(rows[3].status == EntryStatus::ok);
    CHECK(rows[3].test->statistic == Approx(3.674).margin(0.1));
    CHECK(rows[3].test->p_value == Approx(0.0003).margin(0.0005));
    CHECK(rows[4].period.label == "Post-Covid");
    REQUIRE(rows[4].status == EntryStatus::ok);
    CHECK(rows[4].test->statistic == Approx(-2.050).margin(0.1));
}

TEST_CASE("ols: exact small cases", "[hypothesis]") {
    // response equals the second design column
    std::vector<std::vector<double>> x{{1, 2.0}, {1, -1.0}, {1, 4.0}, {1, 0.5}};
    const auto fit1 = ols({2.0, -1.0, 4.0, 0.5}, x);
    CHECK(fit1.coefficients[0] == Approx(0.0).margin(1e-12));
    CHECK(fit1.coefficients[1] == Approx(1.0).margin(1e-12));
    CHECK(fit1.rss == Approx(0.0).margin(1e-18));

    // three points on a known line y = 2 + 3x
    const auto fit2 = ols({5.0, 8.0, 11.0}, {{1, 1.0}, {1, 2.0}, {1, 3.0}});
    CHECK(fit2.coefficients[0] == Approx(2.0).margin(1e-10));
    CHECK(fit2.coefficients[1] == Approx(3.0).margin(1e-10));

    CHECK_THROWS_AS(ols({1, 2, 3}, {{1, 2}, {1, 2}, {1, 2}}), SingularDesign);
}

TEST_CASE("ols: matches a normal-equations oracle on a random system", "[hypothesis]") {
    std::mt19937_64 gen(606);
    std::normal_distribution<double> n01(0.0, 1.0);
    std::vector<std::vector<double>> x(50, std::vector<double>(4));
    std::vector<double> y(50);
    for (auto& row : x) {
        row[0] = 1.0;
        for (std::size_t j = 1; j < 4; ++j) row[j] = n01(gen);
    }
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = 2.0 + 0.5 * x[i][1] - 1.5 * x[i][2] + 0.25 * x[i][3] + 0.1 * n01(gen);
    const auto fit = ols(y, x);
    const auto ref = oracle::normal_equations_ols(y, x);
    for (std::size_t j = 0; j < 4; ++j) CHECK(fit.coefficients[j] == Approx(ref[j]).margin(1e-8));

    // residuals orthogonal to every regressor column
    for (std::size_t j = 0; j < 4; ++j) {
        double dot = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) dot += fit.residuals[i] * x[i][j];
        CHECK(std::abs(dot) < 1e-6 * 50);
    }
}

TEST_CASE("leading_indicator_ftest: perfect lag-1 copy", "[hypothesis]") {
    const auto noise = testutil::gaussian_noise(500, 64);
    std::vector<double> target(noise.size(), 0.0);
    for (std::size_t t = 1; t < noise.size(); ++t) target[t] = noise[t - 1];
    const auto res = leading_indicator_ftest(make_series(target, "t"), make_series(noise, "l"), 3);
    CHECK(res.statistic > 1e6);
    CHECK(res.p_value < 1e-12);
    CHECK(res.df1 == 3);
    CHECK(res.df2 == 500 - 3 - 3 - 1);
}

TEST_CASE("leading_indicator_ftest: fixture degrees of freedom and significance",
          "[hypothesis][fixture]") {
    const auto& fx = fixture();
    const auto res = leading_indicator_ftest(fx.dnontech, fx.dtech, 10);
    CHECK(res.df1 == 10);
    CHECK(res.df2 == 4252);
    CHECK(res.p_value < 0.001);
    CHECK(res.statistic > 100.0);   // order 1e2..1e3
    CHECK(res.statistic < 10000.0);
}

TEST_CASE("leading_indicator_ftest: preconditions", "[hypothesis]") {
    const auto a = make_series(testutil::gaussian_noise(100, 1), "a");
    const auto b = make_series(testutil::gaussian_noise(100, 2), "b");
    CHECK_THROWS_AS(leading_indicator_ftest(a, b, 0), Error);
    CHECK_THROWS_AS(leading_indicator_ftest(a, make_series(testutil::gaussian_noise(90, 3)), 5),
                    AlignmentError);
}

TEST_CASE("granger: constructed one-way causality", "[hypothesis]") {
    std::mt19937_64 gen(1234);
    std::normal_distribution<double> n01(0.0, 1.0);
    const std::size_t n = 2000;
    std::vector<double> a(n), b(n);
    double prev_a = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        a[t] = n01(gen);
        b[t] = 0.5 * prev_a + n01(gen);
        prev_a = a[t];
    }
    const auto res = granger(make_series(a, "a"), make_series(b, "b"), 4);
    CHECK(res.a_to_b.p_value < 1e-10);
    CHECK(res.b_to_a.p_value > 0.001);  // no feedback channel
}

TEST_CASE("granger: fixture rejects in both directions", "[hypothesis][fixture]") {
    const auto& fx = fixture();
    const auto res = granger(fx.dtech, fx.dnontech, 10);
    CHECK(res.a_to_b.p_value < 0.01);
    CHECK(res.b_to_a.p_value < 0.01);
}

TEST_CASE("hypothesis properties: t statistic sign and scale invariance", "[hypothesis]") {
    auto values = testutil::gaussian_noise(400, 9);
    for (auto& v : values) v += 0.12;
    const auto base = mean_zero_ttest(make_series(values));
    CHECK((base.statistic > 0) == (base.mean_estimate > 0));

    for (double c : {0.001, 7.5, 1e4}) {
        std::vector<double> scaled(values);
        for (auto& v : scaled) v *= c;
        const auto res = mean_zero_ttest(make_series(scaled));
        CHECK(res.statistic == Approx(base.statistic).margin(1e-10));
        CHECK(res.p_value == Approx(base.p_value).margin(1e-10));
    }

    std::vector<double> negated(values);
    for (auto& v : negated) v = -v;
    CHECK(mean_zero_ttest(make_series(negated)).statistic == Approx(-base.statistic).margin(1e-10));
}

TEST_CASE("hypothesis properties: F statistic invariant under affine rescaling", "[hypothesis]") {
    const auto target = testutil::ar1(600, 0.3, 41);
    const auto leader = testutil::ar1(600, 0.5, 42);
    const auto base = leading_indicator_ftest(make_series(target, "t"), make_series(leader, "l"), 5);
    for (const auto [a1, b1, a2, b2] :
         {std::tuple<double, double, double, double>{3.0, 100.0, 0.5, -20.0},
          {-2.0, 0.0, 10.0, 3.0}}) {
        std::vector<double> t2(target.size()), l2(leader.size());
        for (std::size_t i = 0; i < target.size(); ++i) {
            t2[i] = a1 * target[i] + b1;
            l2[i] = a2 * leader[i] + b2;
        }
        const auto res = leading_indicator_ftest(make_series(t2, "t"), make_series(l2, "l"), 5);
        CHECK(res.statistic == Approx(base.statistic).margin(1e-8 * (1.0 + base.statistic)));
    }
}

TEST_CASE("hypothesis properties: partition bookkeeping uses every observation once",
          "[hypothesis]") {
    const auto dy = make_series(testutil::gaussian_noise(900, 55), "dy");
    const auto dx = make_series(testutil::gaussian_noise(900, 56), "dx");
    const Date lo = dy.dates().front();
    const PeriodSet parts({{"p1", lo, lo + 99},
                           {"p2", lo + 100, lo + 450},
                           {"p3", lo + 451, dy.dates().back()}});
    const auto rows = decoupling_table(dy, dx, parts);
    std::size_t total = 0;
    for (const auto& r : rows) total += r.n;
    CHECK(total == dy.size());
}

TEST_CASE("hypothesis properties: equal restricted and unrestricted RSS gives F = 0",
          "[hypothesis]") {
    const auto res = hypothesis::detail::f_from_rss(123.456, 123.456, 5, 100);
    CHECK(res.statistic == 0.0);
    CHECK(res.p_value == 1.0);
    // numerically tiny negative differences clamp rather than underflow
    const auto res2 = hypothesis::detail::f_from_rss(100.0, 100.0 + 1e-13, 5, 100);
    CHECK(res2.statistic == 0.0);
}

TEST_CASE("distributions: quantiles match published tables", "[hypothesis]") {
    // t(0.975, 10) = 2.228
    double lo = 0.0, hi = 10.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (dist::student_t_cdf(mid, 10.0) < 0.975 ? lo : hi) = mid;
    }
    CHECK(0.5 * (lo + hi) == Approx(2.228).margin(0.001));

    // independent numeric-integration oracle agrees
    CHECK(oracle::t_quantile_numeric(0.975, 10.0) == Approx(2.228).margin(0.002));

    // F(0.95, 10, 4252) = 1.835
    lo = 0.0;
    hi = 10.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (1.0 - dist::f_sf(mid, 10.0, 4252.0) < 0.95 ? lo : hi) = mid;
    }
    CHECK(0.5 * (lo + hi) == Approx(1.835).margin(0.005));
}
