// Command-line front end: full pipeline runs plus direct access to the
// individual tests (adf, arima, volatility, decouple, lead).

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tsecon/tsecon.hpp"

namespace {

using namespace tsecon;

TimeSeries load_series(const std::string& path, const std::string& column) {
    const auto raw = ingest::parse_quote_csv(path, column);
    std::vector<Date> dates;
    std::vector<double> values;
    for (const auto& row : raw.rows) {
        if (!row.value) continue;
        dates.push_back(row.date);
        values.push_back(*row.value);
    }
    return TimeSeries(raw.name, std::move(dates), std::move(values));
}

std::pair<TimeSeries, TimeSeries> load_aligned(const std::string& path_a, const std::string& path_b,
                                               const std::string& column) {
    const auto a = ingest::parse_quote_csv(path_a, column);
    const auto b = ingest::parse_quote_csv(path_b, column);
    auto pair = ingest::align_and_clean(a, b);
    return {std::move(pair.a), std::move(pair.b)};
}

int cmd_run(const std::string& config_path, const ingest::RunConfig& overrides,
            const std::vector<bool>& has_override) {
    ingest::RunConfig cfg = ingest::RunConfig::from_file(config_path);
    // CLI flags override file values.
    if (has_override[0]) cfg.output_dir = overrides.output_dir;
    if (has_override[1]) cfg.volatility_window = overrides.volatility_window;
    if (has_override[2]) cfg.leading_lags = overrides.leading_lags;
    if (has_override[3]) cfg.significance = overrides.significance;
    if (has_override[4]) cfg.value_column = overrides.value_column;
    if (has_override[5]) cfg.emit_svg = overrides.emit_svg;

    const ingest::Report report = ingest::run_pipeline(cfg);
    ingest::emit_report(report, cfg.output_dir);

    for (const auto& s : report.stages) {
        const char* status = s.status == ingest::StageLog::Status::ok ? "ok"
                             : s.status == ingest::StageLog::Status::failed ? "FAILED"
                                                                            : "skipped";
        std::printf("%-18s %s%s%s\n", s.stage.c_str(), status, s.message.empty() ? "" : ": ",
                    s.message.c_str());
    }
    std::printf("report written to %s\n", cfg.output_dir.c_str());
    return report.all_ok() ? 0 : 1;
}

int cmd_adf(const std::string& csv, const std::string& column, std::optional<long> lags) {
    const TimeSeries s = load_series(csv, column);
    std::optional<std::size_t> k;
    if (lags) k = static_cast<std::size_t>(*lags);
    const auto res = unit_root::adf_test(s, k);
    std::printf("series: %s (n = %zu)\n", s.name().c_str(), s.size());
    std::printf("adf statistic: %.6g\n", res.statistic);
    std::printf("p-value: %s%.4g\n", res.p_clamped ? (res.p_value <= 0.011 ? "< " : "> ") : "",
                res.p_value);
    std::printf("lag order: %zu, effective n: %zu\n", res.lag_order, res.n_effective);
    return 0;
}

int cmd_arima(const std::string& csv, const std::string& column, const std::string& order_str,
              bool auto_select) {
    const TimeSeries s = load_series(csv, column);
    arima::ArimaOrder order;
    if (auto_select) {
        order = arima::auto_order(s);
        std::printf("selected order: ARIMA%s\n", order.to_string().c_str());
    } else {
        if (std::sscanf(order_str.c_str(), "%d,%d,%d", &order.p, &order.d, &order.q) != 3) {
            std::fprintf(stderr, "error: --order expects p,d,q\n");
            return 2;
        }
    }
    const auto fit = arima::fit(s, order);
    std::printf("ARIMA%s on %s (n = %zu)\n", order.to_string().c_str(), s.name().c_str(), s.size());
    for (std::size_t i = 0; i < fit.ar_coefficients.size(); ++i)
        std::printf("  ar%zu = %.6f\n", i + 1, fit.ar_coefficients[i]);
    for (std::size_t i = 0; i < fit.ma_coefficients.size(); ++i)
        std::printf("  ma%zu = %.6f\n", i + 1, fit.ma_coefficients[i]);
    if (order.d == 0) std::printf("  intercept = %.6f\n", fit.intercept);
    std::printf("  sigma2 = %.6g\n  log-likelihood = %.4f\n  aicc = %.4f\n", fit.sigma2,
                fit.log_likelihood, fit.aicc);
    std::printf("  converged = %s (%d iterations)\n", fit.converged ? "true" : "false",
                fit.iterations);
    return fit.converged ? 0 : 1;
}

int cmd_volatility(const std::string& csv, const std::string& column, std::size_t window) {
    const TimeSeries s = load_series(csv, column);
    const TimeSeries vol = rolling_volatility(s, VolatilitySpec{window});
    std::printf("date,volatility\n");
    for (std::size_t i = 0; i < vol.size(); ++i)
        std::printf("%s,%.10g\n", vol.dates()[i].to_string().c_str(), vol[i]);
    return 0;
}

int cmd_decouple(const std::string& csv_a, const std::string& csv_b, const std::string& column,
                 const std::string& periods_file, double level) {
    auto [a, b] = load_aligned(csv_a, csv_b, column);
    const TimeSeries da = difference(a, 1);
    const TimeSeries db = difference(b, 1);

    hypothesis::PeriodSet periods = ingest::default_periods();
    if (!periods_file.empty()) {
        std::ifstream in(periods_file);
        if (!in) throw IoError("decouple: cannot open '" + periods_file + "'");
        nlohmann::ordered_json j;
        in >> j;
        periods = ingest::RunConfig::periods_from_json(j);
    }

    std::printf("%-36s %10s %10s %8s\n", "period", "t", "p", "n");
    for (const auto& entry : hypothesis::decoupling_table(da, db, periods, level)) {
        if (entry.status == hypothesis::EntryStatus::ok) {
            std::printf("%-36s %10.4f %10.4g %8zu\n", entry.period.label.c_str(),
                        entry.test->statistic, entry.test->p_value, entry.n);
        } else {
            std::printf("%-36s %10s %10s %8zu\n", entry.period.label.c_str(),
                        entry.status == hypothesis::EntryStatus::empty_period ? "empty" : "n/a",
                        "-", entry.n);
        }
    }
    return 0;
}

int cmd_lead(const std::string& target_csv, const std::string& leader_csv,
             const std::string& column, std::size_t lags) {
    auto [target, leader] = load_aligned(target_csv, leader_csv, column);
    const TimeSeries dt = difference(target, 1);
    const TimeSeries dl = difference(leader, 1);
    const auto res = hypothesis::leading_indicator_ftest(dt, dl, lags);
    std::printf("leading-indicator F test: does %s lead %s?\n", leader.name().c_str(),
                target.name().c_str());
    std::printf("F(%zu, %zu) = %.6g\n", res.df1, res.df2, res.statistic);
    std::printf("p-value: %.6g\n", res.p_value);
    std::printf("rss restricted / unrestricted: %.10g / %.10g\n", res.restricted_rss,
                res.unrestricted_rss);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-series econometrics engine: stationarity, ARIMA, volatility and "
                 "decoupling analysis"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Run the full analysis pipeline from a JSON config");
    std::string config_path;
    run->add_option("config", config_path, "JSON config file")->required();
    ingest::RunConfig overrides;
    std::vector<bool> has_override(6, false);
    auto* o0 = run->add_option("--output-dir", overrides.output_dir, "Override output directory");
    auto* o1 = run->add_option("--window", overrides.volatility_window, "Override volatility window");
    auto* o2 = run->add_option("--lags", overrides.leading_lags, "Override leading-indicator lags");
    auto* o3 = run->add_option("--significance", overrides.significance, "Override test level");
    auto* o4 = run->add_option("--column", overrides.value_column, "Override value column");
    auto* o5 = run->add_flag("--svg", overrides.emit_svg, "Also emit SVG line charts");

    // adf
    auto* adf = app.add_subcommand("adf", "Augmented Dickey-Fuller unit-root test on one series");
    std::string adf_csv, adf_column = "Adj Close";
    long adf_lags = -1;
    adf->add_option("csv", adf_csv, "Quote CSV")->required();
    adf->add_option("--column", adf_column, "Value column (default: Adj Close)");
    adf->add_option("--lags", adf_lags, "Augmentation lag order (default: trunc((n-1)^(1/3)))");

    // arima
    auto* ar = app.add_subcommand("arima", "Fit an ARIMA model to one series");
    std::string ar_csv, ar_column = "Adj Close", ar_order;
    bool ar_auto = false;
    ar->add_option("csv", ar_csv, "Quote CSV")->required();
    ar->add_option("--column", ar_column, "Value column");
    auto* oopt = ar->add_option("--order", ar_order, "Order as p,d,q");
    auto* aopt = ar->add_flag("--auto", ar_auto, "Select the order automatically");
    oopt->excludes(aopt);

    // volatility
    auto* vol = app.add_subcommand("volatility", "Rolling volatility of one series (CSV to stdout)");
    std::string vol_csv, vol_column = "Adj Close";
    std::size_t vol_window = 0;
    vol->add_option("csv", vol_csv, "Quote CSV")->required();
    vol->add_option("--window", vol_window, "Window size in trading days")->required();
    vol->add_option("--column", vol_column, "Value column");

    // decouple
    auto* dec = app.add_subcommand("decouple", "Per-period decoupling t-tests on two series");
    std::string dec_a, dec_b, dec_column = "Adj Close", dec_periods;
    double dec_level = 0.05;
    dec->add_option("csv-a", dec_a, "First quote CSV")->required();
    dec->add_option("csv-b", dec_b, "Second quote CSV")->required();
    dec->add_option("--periods", dec_periods, "JSON file with period definitions");
    dec->add_option("--column", dec_column, "Value column");
    dec->add_option("--level", dec_level, "Significance level");

    // lead
    auto* lead = app.add_subcommand("lead", "Leading-indicator F test (leader's lags -> target)");
    std::string lead_target, lead_leader, lead_column = "Adj Close";
    std::size_t lead_lags = 10;
    lead->add_option("target-csv", lead_target, "Target series CSV")->required();
    lead->add_option("leader-csv", lead_leader, "Candidate leader CSV")->required();
    lead->add_option("--lags", lead_lags, "Number of lags")->required();
    lead->add_option("--column", lead_column, "Value column");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) {
            has_override = {o0->count() > 0, o1->count() > 0, o2->count() > 0,
                            o3->count() > 0, o4->count() > 0, o5->count() > 0};
            return cmd_run(config_path, overrides, has_override);
        }
        if (adf->parsed())
            return cmd_adf(adf_csv, adf_column,
                           adf_lags >= 0 ? std::optional<long>(adf_lags) : std::nullopt);
        if (ar->parsed()) {
            if (!ar_auto && ar_order.empty()) {
                std::fprintf(stderr, "error: arima needs --order p,d,q or --auto\n");
                return 2;
            }
            return cmd_arima(ar_csv, ar_column, ar_order, ar_auto);
        }
        if (vol->parsed()) return cmd_volatility(vol_csv, vol_column, vol_window);
        if (dec->parsed()) return cmd_decouple(dec_a, dec_b, dec_column, dec_periods, dec_level);
        if (lead->parsed()) return cmd_lead(lead_target, lead_leader, lead_column, lead_lags);
    } catch (const tsecon::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return 1;
    }
    return 2;
}
