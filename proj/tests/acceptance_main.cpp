// Acceptance suite: end-to-end checks against frozen tolerances, one
// pass/fail line per criterion. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "test_util.hpp"
#include "tsecon/tsecon.hpp"

using namespace tsecon;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

struct Criterion {
    std::string name;
    std::vector<std::string> issues;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    explicit Criterion(std::string n) : name(std::move(n)) {}

    void require(bool ok, const std::string& what) {
        if (!ok) issues.push_back(what);
    }

    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    }

    void finish(double budget_seconds = 0.0) {
        const double secs = elapsed();
        if (budget_seconds > 0.0 && secs > budget_seconds)
            issues.push_back("runtime " + std::to_string(secs) + "s exceeds budget " +
                             std::to_string(budget_seconds) + "s");
        if (issues.empty()) {
            std::printf("[PASS] %s (%.1fs)\n", name.c_str(), secs);
        } else {
            ++g_failures;
            std::printf("[FAIL] %s (%.1fs)\n", name.c_str(), secs);
            for (const auto& issue : issues) std::printf("       - %s\n", issue.c_str());
        }
        std::fflush(stdout);
    }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

bool near(double value, double target, double tol) { return std::abs(value - target) <= tol; }

// ---------------------------------------------------------------------------

void criterion1_dense_oracle() {
    Criterion c("criterion 1: innovations likelihood matches dense-covariance oracle");
    std::mt19937_64 gen(101);
    std::uniform_real_distribution<double> u(-0.88, 0.88);
    std::uniform_int_distribution<int> oid(0, 2);
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const int p = oid(gen), q = oid(gen);
        std::vector<double> pac_ar(p), pac_ma(q);
        for (auto& v : pac_ar) v = u(gen);
        for (auto& v : pac_ma) v = u(gen);
        arima::ArimaParams prm;
        prm.ar = arima::pacf_to_coeffs(pac_ar);
        const auto cc = arima::pacf_to_coeffs(pac_ma);
        prm.ma.resize(q);
        for (int j = 0; j < q; ++j) prm.ma[j] = -cc[j];
        prm.intercept = u(gen);
        prm.sigma2 = 0.3 + std::abs(u(gen));
        const auto s = arima::simulate({p, 0, q}, prm, 200, 9000 + rep);
        const double lib = arima::log_likelihood({p, 0, q}, prm, s);
        const double dense = oracle::dense_arma_loglik(prm, s.values());
        worst = std::max(worst, std::abs(lib - dense));
    }
    c.require(worst < 1e-6, "max |loglik difference| = " + fmt(worst) + " (limit 1e-6)");
    c.finish(30.0);
}

void criterion2_parameter_recovery() {
    Criterion c("criterion 2: ARMA(1,1) parameter recovery over 20 seeds");
    int good = 0;
    for (int seed = 0; seed < 20; ++seed) {
        const auto s = arima::simulate({1, 0, 1}, {{0.6}, {0.3}, 0.0, 1.0}, 4000, 7100 + seed);
        const auto f = arima::fit(s, {1, 0, 1});
        if (f.converged && std::abs(f.ar_coefficients[0] - 0.6) <= 0.08 &&
            std::abs(f.ma_coefficients[0] - 0.3) <= 0.08)
            ++good;
    }
    c.require(good >= 18, "recovered within +-0.08 in " + std::to_string(good) + "/20 seeds (need 18)");
    c.finish(60.0);
}

void criterion3_adf_size_power() {
    Criterion c("criterion 3: ADF size on random walks and power on AR(1)");
    const int seeds = 200;
    int size_rejections = 0, power_rejections = 0;
    for (int seed = 0; seed < seeds; ++seed) {
        const auto rw = testutil::random_walk(1000, 15000 + seed);
        if (unit_root::adf_test(TimeSeries::with_default_dates("rw", rw)).p_value < 0.05)
            ++size_rejections;
        const auto ar = testutil::ar1(1000, 0.5, 16000 + seed);
        if (unit_root::adf_test(TimeSeries::with_default_dates("ar", ar)).p_value < 0.05)
            ++power_rejections;
    }
    const double size = 100.0 * size_rejections / seeds;
    const double power = 100.0 * power_rejections / seeds;
    c.require(size >= 3.0 && size <= 8.0,
              "size at nominal 5%: " + fmt(size) + "% (want [3%, 8%])");
    c.require(power >= 95.0, "power vs AR(1) phi=0.5: " + fmt(power) + "% (want >= 95%)");
    c.finish(60.0);
}

void criterion4_adf_oracle() {
    Criterion c("criterion 4: ADF statistic matches explicit-design OLS oracle");
    std::mt19937_64 gen(404);
    std::uniform_int_distribution<std::size_t> len(80, 600);
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = len(gen);
        auto values = testutil::random_walk(n, 17000 + rep);
        const std::size_t k = unit_root::default_adf_lag(n);
        const auto lib = unit_root::detail::adf_regression(values, k);
        const auto ora = oracle::adf_normal_equations(values, k);
        worst = std::max(worst, std::abs(lib.statistic - ora.statistic));
    }
    c.require(worst < 1e-8, "max |statistic difference| = " + fmt(worst) + " (limit 1e-8)");
    c.finish(0.0);
}

struct PipelineRun {
    ingest::Report report;
    double seconds = 0.0;
};

const PipelineRun& fixture_pipeline() {
    static const PipelineRun run = [] {
        ingest::RunConfig cfg;
        cfg.tech_csv = testutil::data_path("ndxt.csv");
        cfg.nontech_csv = testutil::data_path("ndxx.csv");
        cfg.output_dir = (fs::temp_directory_path() / "tsecon_acceptance" / "run1").string();
        const auto t0 = std::chrono::steady_clock::now();
        ingest::Report rep = ingest::run_pipeline(cfg);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return PipelineRun{std::move(rep), secs};
    }();
    return run;
}

double table_value(const ingest::Table* t, const std::string& row_label, std::size_t col) {
    if (t == nullptr) return std::nan("");
    for (const auto& row : t->rows) {
        if (row.front().text == row_label) {
            if (col < row.size() && row[col].value) return *row[col].value;
            return std::nan("");
        }
    }
    return std::nan("");
}

void criterion5_paper_tables() {
    Criterion c("criterion 5: paper-table reproduction on the committed fixtures");
    const auto& run = fixture_pipeline();
    const auto& rep = run.report;
    c.require(rep.all_ok(), "pipeline reported stage failures");

    const auto* t4 = rep.find_table("table04_adf_levels");
    c.require(near(table_value(t4, "tech", 1), -2.11, 0.05),
              "ADF tech levels = " + fmt(table_value(t4, "tech", 1)) + " (want -2.11 +-0.05)");
    c.require(near(table_value(t4, "nontech", 1), -2.48, 0.05),
              "ADF nontech levels = " + fmt(table_value(t4, "nontech", 1)) + " (want -2.48 +-0.05)");

    const auto* t5 = rep.find_table("table05_adf_differenced");
    c.require(near(table_value(t5, "dtech", 1), -16.824, 0.2),
              "ADF dtech = " + fmt(table_value(t5, "dtech", 1)) + " (want -16.824 +-0.2)");
    c.require(near(table_value(t5, "dnontech", 1), -16.392, 0.2),
              "ADF dnontech = " + fmt(table_value(t5, "dnontech", 1)) + " (want -16.392 +-0.2)");
    c.require(table_value(t5, "dtech", 2) == 0.01 && table_value(t5, "dtech", 3) == 1.0,
              "differenced tech p-value must clamp at the 0.01 floor");
    c.require(table_value(t5, "dnontech", 2) == 0.01, "differenced nontech p-value must be 0.01");

    const auto* t3 = rep.find_table("table03_johansen");
    c.require(near(table_value(t3, "r = 0", 1), 3.6, 0.5),
              "johansen trace r=0 = " + fmt(table_value(t3, "r = 0", 1)) + " (want 3.6 +-0.5)");
    c.require(near(table_value(t3, "r <= 1", 1), 0.0, 0.2),
              "johansen trace r<=1 = " + fmt(table_value(t3, "r <= 1", 1)) + " (want 0.0 +-0.2)");
    const bool cv_exact = table_value(t3, "r <= 1", 2) == 6.50 && table_value(t3, "r <= 1", 3) == 8.18 &&
                          table_value(t3, "r <= 1", 4) == 11.65 && table_value(t3, "r = 0", 2) == 15.66 &&
                          table_value(t3, "r = 0", 3) == 17.95 && table_value(t3, "r = 0", 4) == 23.52;
    c.require(cv_exact, "johansen critical values must be byte-exact");

    const auto* t7 = rep.find_table("table07_level_ttest_full");
    c.require(near(table_value(t7, "Full sample", 4), 0.6951, 0.01),
              "full-sample level t = " + fmt(table_value(t7, "Full sample", 4)) +
                  " (want 0.6951 +-0.01)");
    c.require(near(table_value(t7, "Full sample", 5), 0.487, 0.01),
              "full-sample level p = " + fmt(table_value(t7, "Full sample", 5)) +
                  " (want 0.487 +-0.01)");

    const auto* t8 = rep.find_table("table08_level_decoupling");
    c.require(near(table_value(t8, "Pre-covid", 4), 2.299, 0.05),
              "Pre-covid level t = " + fmt(table_value(t8, "Pre-covid", 4)) + " (want 2.299 +-0.05)");

    const auto* t11 = rep.find_table("table11_vol_decoupling");
    c.require(near(table_value(t11, "Covid", 4), 3.674, 0.1),
              "Covid volatility t = " + fmt(table_value(t11, "Covid", 4)) + " (want 3.674 +-0.1)");
    c.require(near(table_value(t11, "Post-Covid", 4), -2.050, 0.1),
              "Post-Covid volatility t = " + fmt(table_value(t11, "Post-Covid", 4)) +
                  " (want -2.050 +-0.1)");

    c.require(rep.leading.present, "leading-indicator stage missing");
    c.require(rep.leading.tech_leads_nontech.df1 == 10 && rep.leading.tech_leads_nontech.df2 == 4252,
              "leading-indicator df = (" + std::to_string(rep.leading.tech_leads_nontech.df1) + ", " +
                  std::to_string(rep.leading.tech_leads_nontech.df2) + ") (want (10, 4252))");
    c.require(rep.leading.tech_leads_nontech.p_value < 0.001,
              "leading-indicator p = " + fmt(rep.leading.tech_leads_nontech.p_value) +
                  " (want < 0.001)");

    c.require(run.seconds < 120.0,
              "pipeline runtime " + fmt(run.seconds) + "s exceeds the 120s budget");
    c.finish(0.0);
}

void criterion6_auto_orders() {
    Criterion c("criterion 6: automatic order selection on the fixtures");
    const auto& rep = fixture_pipeline().report;

    const auto* t6 = rep.find_table("table06_arima_orders");
    const double d_tech = table_value(t6, "tech", 2);
    const double d_nontech = table_value(t6, "nontech", 2);
    c.require(d_tech == 1.0, "tech d = " + fmt(d_tech) + " (want exactly 1)");
    c.require(d_nontech == 1.0, "nontech d = " + fmt(d_nontech) + " (want exactly 1)");

    const double p_tech = table_value(t6, "tech", 1), q_tech = table_value(t6, "tech", 3);
    const double p_non = table_value(t6, "nontech", 1), q_non = table_value(t6, "nontech", 3);
    c.require(near(p_tech, 3, 1) && near(q_tech, 3, 1),
              "tech (p,q) = (" + fmt(p_tech) + "," + fmt(q_tech) + ") (want within +-1 of (3,3))");
    c.require(near(p_non, 2, 1) && near(q_non, 4, 1),
              "nontech (p,q) = (" + fmt(p_non) + "," + fmt(q_non) + ") (want within +-1 of (2,4))");

    const auto* t9 = rep.find_table("table09_vol_arima_orders");
    const double d_vt = table_value(t9, "vol_tech", 2), d_vn = table_value(t9, "vol_nontech", 2);
    c.require(d_vt == 1.0, "vol_tech d = " + fmt(d_vt) + " (want exactly 1)");
    c.require(d_vn == 1.0, "vol_nontech d = " + fmt(d_vn) + " (want exactly 1)");
    std::printf("       volatility (p,q) recorded: vol_tech=(%g,%g) vol_nontech=(%g,%g)\n",
                table_value(t9, "vol_tech", 1), table_value(t9, "vol_tech", 3),
                table_value(t9, "vol_nontech", 1), table_value(t9, "vol_nontech", 3));
    c.finish(0.0);
}

void criterion7_johansen_power() {
    Criterion c("criterion 7: johansen trace power and size");
    std::mt19937_64 gen(0);
    int power_hits = 0, size_hits = 0;
    for (int seed = 0; seed < 100; ++seed) {
        {
            std::mt19937_64 g(22000 + seed);
            std::normal_distribution<double> noise(0.0, 1.0);
            std::vector<double> a(2000), b(2000);
            double trend = 0.0;
            for (std::size_t t = 0; t < 2000; ++t) {
                trend += noise(g);
                a[t] = trend + 0.7 * noise(g);
                b[t] = trend + 0.7 * noise(g);
            }
            const auto res = unit_root::johansen_trace(TimeSeries::with_default_dates("a", a),
                                                       TimeSeries::with_default_dates("b", b));
            if (res.trace_statistics[0] > res.critical_values[0][2]) ++power_hits;  // 1% level
        }
        {
            const auto a = testutil::random_walk(2000, 23000 + seed);
            const auto b = testutil::random_walk(2000, 24000 + seed);
            const auto res = unit_root::johansen_trace(TimeSeries::with_default_dates("a", a),
                                                       TimeSeries::with_default_dates("b", b));
            if (res.trace_statistics[0] > res.critical_values[0][1]) ++size_hits;  // 5% level
        }
    }
    (void)gen;
    c.require(power_hits >= 95,
              "cointegrated pairs rejected r=0 at 1% in " + std::to_string(power_hits) + "/100");
    c.require(size_hits <= 10,
              "independent walks rejected at 5% in " + std::to_string(size_hits) + "/100 (limit 10)");
    c.finish(0.0);
}

void criterion8_ftest_size() {
    Criterion c("criterion 8: Monte-Carlo size of leading-indicator and Granger F tests");
    const int seeds = 500;
    int lead_rej = 0, granger_rej = 0;
    for (int seed = 0; seed < seeds; ++seed) {
        const auto a = TimeSeries::with_default_dates("a", testutil::gaussian_noise(400, 31000 + seed));
        const auto b = TimeSeries::with_default_dates("b", testutil::gaussian_noise(400, 32000 + seed));
        if (hypothesis::leading_indicator_ftest(a, b, 5).p_value < 0.05) ++lead_rej;
        if (hypothesis::granger(a, b, 5).a_to_b.p_value < 0.05) ++granger_rej;
    }
    const double lead_rate = 100.0 * lead_rej / seeds;
    const double granger_rate = 100.0 * granger_rej / seeds;
    c.require(lead_rate >= 3.0 && lead_rate <= 8.0,
              "leading-indicator rejection rate " + fmt(lead_rate) + "% (want [3%, 8%])");
    c.require(granger_rate >= 3.0 && granger_rate <= 8.0,
              "granger rejection rate " + fmt(granger_rate) + "% (want [3%, 8%])");
    c.finish(60.0);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion9_determinism() {
    Criterion c("criterion 9: byte-identical outputs across reruns");
    ingest::RunConfig cfg;
    cfg.tech_csv = testutil::data_path("ndxt.csv");
    cfg.nontech_csv = testutil::data_path("ndxx.csv");

    const fs::path base = fs::temp_directory_path() / "tsecon_acceptance";
    const fs::path out1 = base / "det1";
    const fs::path out2 = base / "det2";
    fs::remove_all(out1);
    fs::remove_all(out2);

    // reuse the cached first run for dir1, fresh pipeline for dir2
    ingest::emit_report(fixture_pipeline().report, out1.string());
    cfg.output_dir = out2.string();
    ingest::emit_report(ingest::run_pipeline(cfg), out2.string());

    c.require(slurp(out1 / "manifest.json") == slurp(out2 / "manifest.json"),
              "manifest.json differs between runs");
    std::size_t tables_checked = 0;
    for (const auto& entry : fs::directory_iterator(out1 / "tables")) {
        const auto name = entry.path().filename();
        if (slurp(entry.path()) != slurp(out2 / "tables" / name))
            c.require(false, "table differs: " + name.string());
        ++tables_checked;
    }
    c.require(tables_checked == 11, "expected 11 table CSVs, saw " + std::to_string(tables_checked));
    c.finish(0.0);
}

void criterion10_property_suites() {
    Criterion c("criterion 10: randomized property suites");
    std::mt19937_64 gen(55);
    std::size_t cases = 0;

    // difference / cumulative_sum round trip (300 cases)
    {
        std::uniform_real_distribution<double> u(-10.0, 10.0);
        std::uniform_int_distribution<std::size_t> len(2, 400);
        for (int rep = 0; rep < 300; ++rep, ++cases) {
            std::vector<double> z(len(gen));
            for (auto& v : z) v = u(gen);
            const auto d = difference(TimeSeries::with_default_dates("c", cumulative_sum(z)), 1);
            for (std::size_t i = 0; i < d.size(); ++i) {
                if (std::abs(d[i] - z[i + 1]) > 1e-12) {
                    c.require(false, "difference/cumsum round trip violated");
                    rep = 300;
                    break;
                }
            }
        }
    }

    // t-statistic scale invariance (200 cases)
    {
        std::uniform_real_distribution<double> scale(1e-3, 1e3);
        for (int rep = 0; rep < 200; ++rep, ++cases) {
            auto z = testutil::gaussian_noise(120, 41000 + rep);
            z[0] += 0.5;
            const auto base = hypothesis::mean_zero_ttest(TimeSeries::with_default_dates("z", z));
            const double cfac = scale(gen);
            for (auto& v : z) v *= cfac;
            const auto scaled = hypothesis::mean_zero_ttest(TimeSeries::with_default_dates("z", z));
            if (std::abs(base.statistic - scaled.statistic) > 1e-10) {
                c.require(false, "t-statistic scale invariance violated");
                break;
            }
        }
    }

    // F-statistic affine invariance (100 cases)
    {
        std::uniform_real_distribution<double> a(0.1, 5.0), b(-50.0, 50.0);
        for (int rep = 0; rep < 100; ++rep, ++cases) {
            const auto t = testutil::ar1(200, 0.3, 43000 + rep);
            const auto l = testutil::ar1(200, 0.4, 44000 + rep);
            const auto base = hypothesis::leading_indicator_ftest(
                TimeSeries::with_default_dates("t", t), TimeSeries::with_default_dates("l", l), 3);
            std::vector<double> t2(t.size()), l2(l.size());
            const double a1 = a(gen), b1 = b(gen), a2 = a(gen), b2 = b(gen);
            for (std::size_t i = 0; i < t.size(); ++i) {
                t2[i] = a1 * t[i] + b1;
                l2[i] = a2 * l[i] + b2;
            }
            const auto scaled = hypothesis::leading_indicator_ftest(
                TimeSeries::with_default_dates("t", t2), TimeSeries::with_default_dates("l", l2), 3);
            if (std::abs(base.statistic - scaled.statistic) > 1e-8 * (1.0 + base.statistic)) {
                c.require(false, "F-statistic affine invariance violated");
                break;
            }
        }
    }

    // ADF affine invariance (100 cases)
    {
        std::uniform_real_distribution<double> a(0.1, 20.0), b(-100.0, 100.0);
        for (int rep = 0; rep < 100; ++rep, ++cases) {
            auto z = testutil::random_walk(150, 45000 + rep);
            const auto base = unit_root::adf_test(TimeSeries::with_default_dates("z", z));
            const double a1 = a(gen), b1 = b(gen);
            for (auto& v : z) v = a1 * v + b1;
            const auto scaled = unit_root::adf_test(TimeSeries::with_default_dates("z", z));
            if (std::abs(base.statistic - scaled.statistic) > 1e-8) {
                c.require(false, "ADF affine invariance violated");
                break;
            }
        }
    }

    // correlogram bounds (200 cases)
    {
        std::student_t_distribution<double> heavy(3.0);
        std::uniform_int_distribution<std::size_t> len(30, 300);
        for (int rep = 0; rep < 200; ++rep, ++cases) {
            std::vector<double> z(len(gen));
            for (auto& v : z) v = heavy(gen);
            const auto s = TimeSeries::with_default_dates("z", z);
            const std::size_t max_lag = std::min<std::size_t>(15, z.size() / 2 - 1);
            bool ok = true;
            for (const double v : correlation::acf(s, max_lag).coefficients)
                ok = ok && v <= 1.0 + 1e-9 && v >= -1.0 - 1e-9;
            for (const double v : correlation::pacf(s, max_lag).coefficients)
                ok = ok && v <= 1.0 + 1e-9 && v >= -1.0 - 1e-9;
            if (!ok) {
                c.require(false, "correlogram bounds violated");
                break;
            }
        }
    }

    // decoupling partition bookkeeping (100 cases)
    {
        std::uniform_int_distribution<std::size_t> len(50, 500);
        for (int rep = 0; rep < 100; ++rep, ++cases) {
            const std::size_t n = len(gen);
            const auto dy = TimeSeries::with_default_dates("dy", testutil::gaussian_noise(n, 46000 + rep));
            const auto dx = TimeSeries::with_default_dates("dx", testutil::gaussian_noise(n, 47000 + rep));
            std::uniform_int_distribution<long> cut1(1, static_cast<long>(n) - 2);
            const long c1 = cut1(gen);
            const hypothesis::PeriodSet parts(
                {{"p1", dy.dates().front(), dy.dates().front() + (c1 - 1)},
                 {"p2", dy.dates().front() + c1, dy.dates().back()}});
            std::size_t total = 0;
            for (const auto& row : hypothesis::decoupling_table(dy, dx, parts)) total += row.n;
            if (total != n) {
                c.require(false, "partition bookkeeping violated");
                break;
            }
        }
    }

    c.require(cases >= 1000, "only " + std::to_string(cases) + " randomized cases ran");
    std::printf("       randomized cases executed: %zu\n", cases);
    c.finish(0.0);
}

}  // namespace

int main() {
    std::printf("tsecon acceptance suite (engine %s)\n", kEngineVersion);
    criterion1_dense_oracle();
    criterion2_parameter_recovery();
    criterion3_adf_size_power();
    criterion4_adf_oracle();
    criterion5_paper_tables();
    criterion6_auto_orders();
    criterion7_johansen_power();
    criterion8_ftest_size();
    criterion9_determinism();
    criterion10_property_suites();

    if (g_failures == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance criteria FAILED\n", g_failures);
    return 1;
}
