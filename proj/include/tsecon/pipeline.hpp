#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tsecon/arima.hpp"
#include "tsecon/correlation.hpp"
#include "tsecon/errors.hpp"
#include "tsecon/hypothesis.hpp"
#include "tsecon/io.hpp"
#include "tsecon/series.hpp"
#include "tsecon/svg.hpp"
#include "tsecon/unit_root.hpp"
#include "tsecon/version.hpp"

namespace tsecon::ingest {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

inline hypothesis::PeriodSet default_periods() {
    using hypothesis::Period;
    return hypothesis::PeriodSet({
        Period{"Global Financial Crisis (GFC)", Date::from_ymd(2006, 3, 1), Date::from_ymd(2010, 2, 28)},
        Period{"Post-GFC", Date::from_ymd(2010, 3, 1), Date::from_ymd(2015, 2, 28)},
        Period{"Pre-covid", Date::from_ymd(2015, 3, 1), Date::from_ymd(2020, 1, 19)},
        Period{"Covid", Date::from_ymd(2020, 1, 20), Date::from_ymd(2022, 2, 28)},
        Period{"Post-Covid", Date::from_ymd(2022, 3, 1), Date::from_ymd(2023, 3, 31)},
    });
}

inline hypothesis::PeriodSet default_halves() {
    using hypothesis::Period;
    return hypothesis::PeriodSet({
        Period{"First Half", Date::from_ymd(2006, 3, 1), Date::from_ymd(2015, 2, 28)},
        Period{"Second Half", Date::from_ymd(2015, 3, 1), Date::from_ymd(2023, 3, 31)},
    });
}

struct RunConfig {
    std::string tech_csv;
    std::string nontech_csv;
    std::string value_column = "Adj Close";
    std::size_t volatility_window = 100;
    std::size_t leading_lags = 10;
    hypothesis::PeriodSet periods = default_periods();
    hypothesis::PeriodSet halves = default_halves();
    double significance = 0.05;
    std::string output_dir = "out";
    std::uint64_t seed = 1;
    bool emit_svg = false;

    void validate() const {
        if (tech_csv.empty() || nontech_csv.empty())
            throw Error("config: tech_csv and nontech_csv are required");
        if (volatility_window < 2) throw Error("config: volatility_window must be at least 2");
        if (leading_lags < 1) throw Error("config: leading_lags must be at least 1");
        if (!(significance > 0.0 && significance < 1.0))
            throw Error("config: significance must lie in (0,1)");
    }

    json to_json() const {
        auto periods_json = [](const hypothesis::PeriodSet& ps) {
            json arr = json::array();
            for (const auto& p : ps.periods())
                arr.push_back({{"label", p.label},
                               {"start", p.start.to_string()},
                               {"end", p.end.to_string()}});
            return arr;
        };
        return json{{"tech_csv", tech_csv},
                    {"nontech_csv", nontech_csv},
                    {"value_column", value_column},
                    {"volatility_window", volatility_window},
                    {"leading_lags", leading_lags},
                    {"significance", significance},
                    {"output_dir", output_dir},
                    {"seed", seed},
                    {"emit_svg", emit_svg},
                    {"periods", periods_json(periods)},
                    {"halves", periods_json(halves)}};
    }

    static hypothesis::PeriodSet periods_from_json(const json& arr) {
        std::vector<hypothesis::Period> out;
        for (const auto& item : arr) {
            const auto start = Date::parse(item.at("start").get<std::string>());
            const auto end = Date::parse(item.at("end").get<std::string>());
            if (!start || !end) throw Error("config: bad period date");
            out.push_back({item.at("label").get<std::string>(), *start, *end});
        }
        return hypothesis::PeriodSet(std::move(out));
    }

    static RunConfig from_json(const json& j) {
        RunConfig cfg;
        cfg.tech_csv = j.value("tech_csv", cfg.tech_csv);
        cfg.nontech_csv = j.value("nontech_csv", cfg.nontech_csv);
        cfg.value_column = j.value("value_column", cfg.value_column);
        cfg.volatility_window = j.value("volatility_window", cfg.volatility_window);
        cfg.leading_lags = j.value("leading_lags", cfg.leading_lags);
        cfg.significance = j.value("significance", cfg.significance);
        cfg.output_dir = j.value("output_dir", cfg.output_dir);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.emit_svg = j.value("emit_svg", cfg.emit_svg);
        if (j.contains("periods")) cfg.periods = periods_from_json(j.at("periods"));
        if (j.contains("halves")) cfg.halves = periods_from_json(j.at("halves"));
        return cfg;
    }

    static RunConfig from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("config: cannot open '" + path + "'");
        json j;
        try {
            in >> j;
        } catch (const std::exception& e) {
            throw Error("config: invalid JSON in '" + path + "': " + e.what());
        }
        return from_json(j);
    }
};

// ---------------------------------------------------------------------------
// Report structure
// ---------------------------------------------------------------------------

struct Provenance {
    std::string op;
    json args;
};

struct Cell {
    std::string text;                 // as displayed; empty means "format value"
    std::optional<double> value;      // numeric payload when present
    Provenance prov;

    static Cell label(std::string t) { return Cell{std::move(t), std::nullopt, {}}; }
    static Cell number(double v, Provenance p) { return Cell{"", v, std::move(p)}; }
    static Cell marked(std::string t, Provenance p) { return Cell{std::move(t), std::nullopt, std::move(p)}; }
};

struct Table {
    std::string id;     // also the CSV file stem
    std::string title;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::string> notes;
};

struct PlotData {
    std::string id;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;  // preformatted
};

struct StageLog {
    enum class Status { ok, failed, skipped };
    std::string stage;
    Status status = Status::ok;
    std::string message;
};

struct InputInfo {
    std::string path;
    std::string checksum;
    std::size_t rows = 0;
    std::size_t missing = 0;
};

struct LeadingSection {
    bool present = false;
    std::size_t lags = 0;
    hypothesis::FTestResult tech_leads_nontech;
    hypothesis::FTestResult nontech_leads_tech;
    hypothesis::GrangerResult granger;
};

struct Report {
    RunConfig config;
    std::vector<InputInfo> inputs;
    std::optional<CleaningLog> cleaning;
    std::vector<Table> tables;
    std::vector<PlotData> plots;
    LeadingSection leading;
    std::vector<StageLog> stages;

    bool all_ok() const {
        for (const auto& s : stages)
            if (s.status == StageLog::Status::failed) return false;
        return true;
    }

    const Table* find_table(const std::string& id) const {
        for (const auto& t : tables)
            if (t.id == id) return &t;
        return nullptr;
    }
};

// ---------------------------------------------------------------------------
// Helpers
// ---------------------------------------------------------------------------

namespace detail {

inline std::string fmt_num(double v, const char* spec = "%.10g") {
    if (v == 0.0) v = 0.0;  // normalize -0
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("checksum: cannot open '" + path + "'");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

namespace detail {

struct PipelineState {
    std::optional<TimeSeries> tech, nontech;      // aligned levels
    std::optional<TimeSeries> dtech, dnontech;    // first differences
    std::optional<TimeSeries> vol_tech, vol_nontech;
    std::optional<TimeSeries> dvol_tech, dvol_nontech;
};

inline Provenance prov(std::string op, json args) { return Provenance{std::move(op), std::move(args)}; }

inline Table summary_table(const std::string& id, const std::string& title, const TimeSeries& s,
                           const std::string& series_key) {
    const SummaryStats st = summarize(s);
    auto pr = [&](const char* field) {
        return prov("summarize", {{"series", series_key}, {"field", field}});
    };
    Table t;
    t.id = id;
    t.title = title;
    t.columns = {"statistic", "value"};
    t.rows = {
        {Cell::label("Minimum"), Cell::number(st.min, pr("min"))},
        {Cell::label("1st Quartile"), Cell::number(st.q1, pr("q1"))},
        {Cell::label("Median"), Cell::number(st.median, pr("median"))},
        {Cell::label("3rd Quartile"), Cell::number(st.q3, pr("q3"))},
        {Cell::label("Maximum"), Cell::number(st.max, pr("max"))},
        {Cell::label("Mean"), Cell::number(st.mean, pr("mean"))},
        {Cell::label("Standard Deviation"), Cell::number(st.sd, pr("sd"))},
        {Cell::label("Starting Value"), Cell::number(st.first_value, pr("first_value"))},
        {Cell::label("Latest Value"), Cell::number(st.last_value, pr("last_value"))},
        {Cell::label("Observations"), Cell::number(static_cast<double>(st.n), pr("n"))},
    };
    return t;
}

inline Table adf_table(const std::string& id, const std::string& title,
                       const std::vector<std::pair<std::string, const TimeSeries*>>& entries) {
    Table t;
    t.id = id;
    t.title = title;
    t.columns = {"series", "statistic", "p_value", "p_clamped", "lag_order", "n_effective"};
    for (const auto& [key, s] : entries) {
        const auto res = unit_root::adf_test(*s);
        auto pr = [&](const char* field) {
            return prov("adf_test", {{"series", key}, {"field", field}});
        };
        t.rows.push_back({Cell::label(key), Cell::number(res.statistic, pr("statistic")),
                          Cell::number(res.p_value, pr("p_value")),
                          Cell::number(res.p_clamped ? 1.0 : 0.0, pr("p_clamped")),
                          Cell::number(static_cast<double>(res.lag_order), pr("lag_order")),
                          Cell::number(static_cast<double>(res.n_effective), pr("n_effective"))});
    }
    t.notes.push_back("Null hypothesis: the series has a unit root. Regression includes a "
                      "constant and a linear trend. p-values interpolated in the embedded "
                      "Dickey-Fuller table and clamped to [0.01, 0.99]; a clamped floor value "
                      "reads as \"< 0.01\".");
    return t;
}

inline Table order_table(const std::string& id, const std::string& title,
                         const std::vector<std::pair<std::string, const TimeSeries*>>& entries) {
    Table t;
    t.id = id;
    t.title = title;
    t.columns = {"series", "ar_order", "i_order", "ma_order"};
    for (const auto& [key, s] : entries) {
        const auto order = arima::auto_order(*s);
        auto pr = [&](const char* field) {
            return prov("auto_order", {{"series", key}, {"field", field}});
        };
        t.rows.push_back({Cell::label(key), Cell::number(order.p, pr("p")),
                          Cell::number(order.d, pr("d")), Cell::number(order.q, pr("q"))});
    }
    return t;
}

inline Table decoupling_table_report(const std::string& id, const std::string& title,
                                     const std::string& dy_key, const std::string& dx_key,
                                     const TimeSeries& dy, const TimeSeries& dx,
                                     const std::vector<hypothesis::PeriodSet>& period_groups,
                                     double level) {
    Table t;
    t.id = id;
    t.title = title;
    t.columns = {"period", "start", "end", "n", "t_statistic", "p_value", "reject"};
    for (const auto& group : period_groups) {
        for (const auto& entry : hypothesis::decoupling_table(dy, dx, group, level)) {
            auto pr = [&](const char* field) {
                return prov("decoupling_table", {{"dy", dy_key},
                                                 {"dx", dx_key},
                                                 {"period", entry.period.label},
                                                 {"level", level},
                                                 {"field", field}});
            };
            std::vector<Cell> row{Cell::label(entry.period.label),
                                  Cell::label(entry.period.start.to_string()),
                                  Cell::label(entry.period.end.to_string()),
                                  Cell::number(static_cast<double>(entry.n), pr("n"))};
            if (entry.status == hypothesis::EntryStatus::ok) {
                row.push_back(Cell::number(entry.test->statistic, pr("statistic")));
                row.push_back(Cell::number(entry.test->p_value, pr("p_value")));
                row.push_back(Cell::number(entry.test->reject ? 1.0 : 0.0, pr("reject")));
            } else {
                const char* text = entry.status == hypothesis::EntryStatus::empty_period
                                       ? "EmptyPeriod"
                                       : "NotComputable";
                row.push_back(Cell::marked(text, pr("status")));
                row.push_back(Cell::marked(text, pr("status")));
                row.push_back(Cell::marked(text, pr("status")));
            }
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

inline PlotData correlogram_plot(const std::string& id, const TimeSeries& s, std::size_t max_lag) {
    const auto a = correlation::acf(s, max_lag);
    const auto p = correlation::pacf(s, max_lag);
    PlotData plot;
    plot.id = id;
    plot.columns = {"lag", "acf", "pacf", "band"};
    for (std::size_t i = 0; i < a.lags.size(); ++i) {
        const int lag = a.lags[i];
        std::string pacf_txt;
        if (lag >= 1) pacf_txt = fmt_num(p.coefficients[static_cast<std::size_t>(lag - 1)]);
        plot.rows.push_back({std::to_string(lag), fmt_num(a.coefficients[i]), pacf_txt,
                             fmt_num(a.confidence_band)});
    }
    return plot;
}

}  // namespace detail

/// Executes the full analysis recipe. Stage failures are recorded in the
/// report and dependent stages are skipped; the function itself only throws
/// on configuration errors.
inline Report run_pipeline(const RunConfig& config) {
    config.validate();

    Report rep;
    rep.config = config;
    detail::PipelineState st;

    auto run_stage = [&](const std::string& name, const std::function<void()>& body,
                         const std::vector<std::string>& needs = {}) {
        for (const auto& dep : needs) {
            for (const auto& log : rep.stages) {
                if (log.stage == dep && log.status != StageLog::Status::ok) {
                    rep.stages.push_back({name, StageLog::Status::skipped,
                                          "skipped: stage '" + dep + "' did not complete"});
                    return;
                }
            }
        }
        try {
            body();
            rep.stages.push_back({name, StageLog::Status::ok, ""});
        } catch (const std::exception& e) {
            rep.stages.push_back({name, StageLog::Status::failed, e.what()});
        }
    };

    run_stage("ingest", [&] {
        const auto raw_tech = parse_quote_csv(config.tech_csv, config.value_column);
        const auto raw_nontech = parse_quote_csv(config.nontech_csv, config.value_column);
        rep.inputs.push_back({config.tech_csv, detail::file_checksum(config.tech_csv),
                              raw_tech.rows.size(), raw_tech.missing_count()});
        rep.inputs.push_back({config.nontech_csv, detail::file_checksum(config.nontech_csv),
                              raw_nontech.rows.size(), raw_nontech.missing_count()});
        auto aligned = align_and_clean(raw_tech, raw_nontech);
        rep.cleaning = aligned.log;
        st.tech = aligned.a.renamed("tech");
        st.nontech = aligned.b.renamed("nontech");
        st.dtech = difference(*st.tech, 1).renamed("dtech");
        st.dnontech = difference(*st.nontech, 1).renamed("dnontech");
    });

    run_stage("summary", [&] {
        rep.tables.push_back(detail::summary_table(
            "table01_summary_tech", "Summary statistics of the tech index", *st.tech, "tech"));
        rep.tables.push_back(detail::summary_table("table02_summary_nontech",
                                                   "Summary statistics of the non-tech index",
                                                   *st.nontech, "nontech"));
    }, {"ingest"});

    run_stage("correlograms", [&] {
        const std::size_t lag = std::min<std::size_t>(1000, st.tech->size() / 2 - 1);
        rep.plots.push_back(detail::correlogram_plot("plot_acf_pacf_tech", *st.tech, lag));
        rep.plots.push_back(detail::correlogram_plot("plot_acf_pacf_nontech", *st.nontech, lag));

        const auto cc = correlation::ccf(*st.tech, *st.nontech, lag);
        PlotData ccp;
        ccp.id = "plot_ccf";
        ccp.columns = {"lag", "ccf", "band"};
        for (std::size_t i = 0; i < cc.lags.size(); ++i)
            ccp.rows.push_back({std::to_string(cc.lags[i]), detail::fmt_num(cc.coefficients[i]),
                                detail::fmt_num(cc.confidence_band)});
        rep.plots.push_back(std::move(ccp));

        PlotData lv;
        lv.id = "plot_levels";
        lv.columns = {"date", "tech", "nontech"};
        for (std::size_t i = 0; i < st.tech->size(); ++i)
            lv.rows.push_back({st.tech->dates()[i].to_string(), detail::fmt_num((*st.tech)[i]),
                               detail::fmt_num((*st.nontech)[i])});
        rep.plots.push_back(std::move(lv));
    }, {"ingest"});

    run_stage("johansen", [&] {
        const auto res = unit_root::johansen_trace(*st.tech, *st.nontech, 2);
        Table t;
        t.id = "table03_johansen";
        t.title = "Johansen trace cointegration test";
        t.columns = {"hypothesis", "test_statistic", "cv_10pct", "cv_5pct", "cv_1pct"};
        auto pr = [&](const char* field) {
            return detail::prov("johansen_trace",
                                {{"series", json::array({"tech", "nontech"})},
                                 {"lag_order", 2},
                                 {"field", field}});
        };
        t.rows.push_back({Cell::label("r <= 1"), Cell::number(res.trace_statistics[1], pr("trace_r1")),
                          Cell::number(res.critical_values[1][0], pr("cv_r1_10")),
                          Cell::number(res.critical_values[1][1], pr("cv_r1_5")),
                          Cell::number(res.critical_values[1][2], pr("cv_r1_1"))});
        t.rows.push_back({Cell::label("r = 0"), Cell::number(res.trace_statistics[0], pr("trace_r0")),
                          Cell::number(res.critical_values[0][0], pr("cv_r0_10")),
                          Cell::number(res.critical_values[0][1], pr("cv_r0_5")),
                          Cell::number(res.critical_values[0][2], pr("cv_r0_1"))});
        t.notes.push_back("Validity warning: the test is run on the level series before their "
                          "stationarity has been established, so a non-rejection here is not "
                          "conclusive on its own.");
        rep.tables.push_back(std::move(t));
    }, {"ingest"});

    run_stage("adf", [&] {
        rep.tables.push_back(detail::adf_table("table04_adf_levels", "ADF unit-root tests on levels",
                                               {{"tech", &*st.tech}, {"nontech", &*st.nontech}}));
        rep.tables.push_back(detail::adf_table("table05_adf_differenced",
                                               "ADF unit-root tests on first differences",
                                               {{"dtech", &*st.dtech}, {"dnontech", &*st.dnontech}}));
    }, {"ingest"});

    run_stage("arima_orders", [&] {
        rep.tables.push_back(detail::order_table(
            "table06_arima_orders", "ARIMA orders of the level and differenced series",
            {{"tech", &*st.tech},
             {"nontech", &*st.nontech},
             {"dtech", &*st.dtech},
             {"dnontech", &*st.dnontech}}));
    }, {"ingest"});

    run_stage("volatility", [&] {
        const VolatilitySpec spec{config.volatility_window, VolatilitySpec::ReturnKind::simple_percent};
        st.vol_tech = rolling_volatility(*st.tech, spec).renamed("vol_tech");
        st.vol_nontech = rolling_volatility(*st.nontech, spec).renamed("vol_nontech");
        st.dvol_tech = difference(*st.vol_tech, 1).renamed("dvol_tech");
        st.dvol_nontech = difference(*st.vol_nontech, 1).renamed("dvol_nontech");

        PlotData pv;
        pv.id = "plot_volatility";
        pv.columns = {"date", "vol_tech", "vol_nontech"};
        for (std::size_t i = 0; i < st.vol_tech->size(); ++i)
            pv.rows.push_back({st.vol_tech->dates()[i].to_string(),
                               detail::fmt_num((*st.vol_tech)[i]),
                               detail::fmt_num((*st.vol_nontech)[i])});
        rep.plots.push_back(std::move(pv));
    }, {"ingest"});

    run_stage("vol_arima_orders", [&] {
        rep.tables.push_back(detail::order_table("table09_vol_arima_orders",
                                                 "ARIMA orders of the volatility series",
                                                 {{"vol_tech", &*st.vol_tech},
                                                  {"vol_nontech", &*st.vol_nontech}}));
        rep.tables.push_back(detail::order_table(
            "table10_vol_diff_arima_orders",
            "ARIMA orders of the first-differenced volatility series",
            {{"dvol_tech", &*st.dvol_tech}, {"dvol_nontech", &*st.dvol_nontech}}));
    }, {"volatility"});

    run_stage("level_decoupling", [&] {
        const Date from = st.dtech->dates().front();
        const Date to = st.dtech->dates().back();
        const hypothesis::PeriodSet full({{"Full sample", from, to}});
        rep.tables.push_back(detail::decoupling_table_report(
            "table07_level_ttest_full",
            "Mean-zero t-test on the differenced level gap (full sample)", "dtech", "dnontech",
            *st.dtech, *st.dnontech, {full}, config.significance));
        rep.tables.push_back(detail::decoupling_table_report(
            "table08_level_decoupling", "Level decoupling tests by period", "dtech", "dnontech",
            *st.dtech, *st.dnontech, {config.periods, config.halves}, config.significance));
    }, {"ingest"});

    run_stage("vol_decoupling", [&] {
        const Date from = st.dvol_tech->dates().front();
        const Date to = st.dvol_tech->dates().back();
        const hypothesis::PeriodSet full({{"Full sample", from, to}});
        rep.tables.push_back(detail::decoupling_table_report(
            "table11_vol_decoupling", "Volatility decoupling tests", "dvol_tech", "dvol_nontech",
            *st.dvol_tech, *st.dvol_nontech, {full, config.periods, config.halves},
            config.significance));
    }, {"volatility"});

    run_stage("leading_indicator", [&] {
        rep.leading.present = true;
        rep.leading.lags = config.leading_lags;
        rep.leading.tech_leads_nontech =
            hypothesis::leading_indicator_ftest(*st.dnontech, *st.dtech, config.leading_lags);
        rep.leading.nontech_leads_tech =
            hypothesis::leading_indicator_ftest(*st.dtech, *st.dnontech, config.leading_lags);
        rep.leading.granger = hypothesis::granger(*st.dtech, *st.dnontech, config.leading_lags);
    }, {"ingest"});

    return rep;
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

namespace detail {

inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("emit_report: cannot write '" + tmp.string() + "'");
        out << contents;
        if (!out.good()) throw IoError("emit_report: write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("emit_report: rename failed for '" + path.string() + "': " + ec.message());
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

inline std::string table_to_csv(const Table& t) {
    std::string out;
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        if (c) out += ",";
        out += csv_escape(t.columns[c]);
    }
    out += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ",";
            out += csv_escape(row[c].value ? fmt_num(*row[c].value) : row[c].text);
        }
        out += "\n";
    }
    return out;
}

inline std::string cell_display(const Cell& cell) {
    if (!cell.value) return cell.text;
    return fmt_num(*cell.value, "%.6g");
}

inline std::string table_to_markdown(const Table& t) {
    std::string out = "### " + t.title + "\n\n";
    out += "|";
    for (const auto& c : t.columns) out += " " + c + " |";
    out += "\n|";
    for (std::size_t c = 0; c < t.columns.size(); ++c) out += " --- |";
    out += "\n";
    for (const auto& row : t.rows) {
        out += "|";
        for (const auto& cell : row) out += " " + cell_display(cell) + " |";
        out += "\n";
    }
    for (const auto& note : t.notes) out += "\n> " + note + "\n";
    out += "\n";
    return out;
}

inline std::string ftest_line(const std::string& label, const hypothesis::FTestResult& f) {
    std::string out = "- " + label + ": F(" + std::to_string(f.df1) + ", " + std::to_string(f.df2) +
                      ") = " + fmt_num(f.statistic, "%.6g") + ", p = ";
    out += f.p_value < 0.001 ? std::string("< 0.001") : fmt_num(f.p_value, "%.4g");
    out += "\n";
    return out;
}

inline std::string report_markdown(const Report& rep) {
    std::string md;
    md += "# Tech vs non-tech index analysis\n\n";
    md += "Engine: " + std::string(kEngineName) + " " + kEngineVersion + "\n\n";

    if (!rep.inputs.empty()) {
        md += "## Inputs\n\n| file | rows | missing | checksum |\n| --- | --- | --- | --- |\n";
        for (const auto& in : rep.inputs)
            md += "| " + in.path + " | " + std::to_string(in.rows) + " | " +
                  std::to_string(in.missing) + " | " + in.checksum + " |\n";
        md += "\n";
    }
    if (rep.cleaning) {
        const auto& c = *rep.cleaning;
        md += "## Cleaning log\n\n";
        md += "- rows in: " + std::to_string(c.rows_in_a) + " / " + std::to_string(c.rows_in_b) + "\n";
        md += "- unmatched dates dropped: " + std::to_string(c.unmatched_a) + " / " +
              std::to_string(c.unmatched_b) + "\n";
        md += "- missing-value dates dropped: " + std::to_string(c.missing_dropped_a) + " / " +
              std::to_string(c.missing_dropped_b) + "\n";
        md += "- aligned rows out: " + std::to_string(c.rows_out) + "\n\n";
    }

    md += "## Tables\n\n";
    for (const auto& t : rep.tables) md += table_to_markdown(t);

    if (rep.leading.present) {
        md += "### Leading-indicator tests (" + std::to_string(rep.leading.lags) + " lags)\n\n";
        md += ftest_line("tech leads non-tech (lags of dtech explain dnontech)",
                         rep.leading.tech_leads_nontech);
        md += ftest_line("non-tech leads tech (lags of dnontech explain dtech)",
                         rep.leading.nontech_leads_tech);
        md += ftest_line("Granger dtech -> dnontech", rep.leading.granger.a_to_b);
        md += ftest_line("Granger dnontech -> dtech", rep.leading.granger.b_to_a);
        md += "\n";
    }

    md += "## Stage log\n\n| stage | status | message |\n| --- | --- | --- |\n";
    for (const auto& s : rep.stages) {
        const char* status = s.status == StageLog::Status::ok ? "ok"
                             : s.status == StageLog::Status::failed ? "failed"
                                                                    : "skipped";
        md += "| " + s.stage + " | " + status + " | " + s.message + " |\n";
    }
    md += "\n";
    return md;
}

inline json cell_provenance_json(const Table& t) {
    json rows = json::array();
    for (const auto& row : t.rows) {
        json cells = json::array();
        for (const auto& cell : row) {
            if (cell.prov.op.empty()) continue;
            json c = {{"op", cell.prov.op}, {"args", cell.prov.args}};
            if (cell.value) c["value"] = *cell.value;
            else c["text"] = cell.text;
            cells.push_back(std::move(c));
        }
        rows.push_back(std::move(cells));
    }
    return rows;
}

}  // namespace detail

/// Writes report.md, tables/*.csv, plots/*.csv (+ optional SVG charts) and
/// manifest.json. Idempotent: identical report -> byte-identical files.
inline void emit_report(const Report& rep, const std::string& output_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(fs::path(output_dir) / "tables", ec);
    if (ec) throw IoError("emit_report: cannot create '" + output_dir + "/tables'");
    fs::create_directories(fs::path(output_dir) / "plots", ec);
    if (ec) throw IoError("emit_report: cannot create '" + output_dir + "/plots'");

    for (const auto& t : rep.tables)
        detail::write_file_atomic(fs::path(output_dir) / "tables" / (t.id + ".csv"),
                                  detail::table_to_csv(t));

    for (const auto& p : rep.plots) {
        std::string csv;
        for (std::size_t c = 0; c < p.columns.size(); ++c) {
            if (c) csv += ",";
            csv += p.columns[c];
        }
        csv += "\n";
        for (const auto& row : p.rows) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (c) csv += ",";
                csv += row[c];
            }
            csv += "\n";
        }
        detail::write_file_atomic(fs::path(output_dir) / "plots" / (p.id + ".csv"), csv);
    }

    if (rep.config.emit_svg) {
        for (const auto& p : rep.plots) {
            if (p.columns.size() < 2 || p.rows.empty()) continue;
            std::vector<svg::LineSeries> series;
            for (std::size_t c = 1; c < p.columns.size(); ++c) {
                svg::LineSeries s;
                s.label = p.columns[c];
                for (const auto& row : p.rows) {
                    if (row[c].empty()) continue;
                    s.values.push_back(std::strtod(row[c].c_str(), nullptr));
                }
                if (!s.values.empty()) series.push_back(std::move(s));
            }
            detail::write_file_atomic(fs::path(output_dir) / "plots" / (p.id + ".svg"),
                                      svg::line_chart(p.id, series));
        }
    }

    detail::write_file_atomic(fs::path(output_dir) / "report.md", detail::report_markdown(rep));

    json manifest;
    manifest["engine"] = {{"name", kEngineName}, {"version", kEngineVersion}};
    manifest["config"] = rep.config.to_json();
    json inputs = json::array();
    for (const auto& in : rep.inputs)
        inputs.push_back({{"path", in.path},
                          {"checksum", in.checksum},
                          {"rows", in.rows},
                          {"missing", in.missing}});
    manifest["inputs"] = inputs;
    if (rep.cleaning) {
        manifest["cleaning"] = {{"rows_in_tech", rep.cleaning->rows_in_a},
                                {"rows_in_nontech", rep.cleaning->rows_in_b},
                                {"unmatched_tech", rep.cleaning->unmatched_a},
                                {"unmatched_nontech", rep.cleaning->unmatched_b},
                                {"missing_dropped_tech", rep.cleaning->missing_dropped_a},
                                {"missing_dropped_nontech", rep.cleaning->missing_dropped_b},
                                {"rows_out", rep.cleaning->rows_out}};
    }
    json tables = json::array();
    for (const auto& t : rep.tables)
        tables.push_back({{"id", t.id},
                          {"title", t.title},
                          {"file", "tables/" + t.id + ".csv"},
                          {"provenance", detail::cell_provenance_json(t)}});
    manifest["tables"] = tables;
    json plots = json::array();
    for (const auto& p : rep.plots) plots.push_back("plots/" + p.id + ".csv");
    manifest["plots"] = plots;
    json stages = json::array();
    for (const auto& s : rep.stages) {
        const char* status = s.status == StageLog::Status::ok ? "ok"
                             : s.status == StageLog::Status::failed ? "failed"
                                                                    : "skipped";
        stages.push_back({{"stage", s.stage}, {"status", status}, {"message", s.message}});
    }
    manifest["stages"] = stages;
    if (rep.leading.present) {
        auto fj = [](const hypothesis::FTestResult& f) {
            return json{{"f", f.statistic}, {"df1", f.df1}, {"df2", f.df2}, {"p_value", f.p_value}};
        };
        manifest["leading_indicator"] = {
            {"lags", rep.leading.lags},
            {"tech_leads_nontech", fj(rep.leading.tech_leads_nontech)},
            {"nontech_leads_tech", fj(rep.leading.nontech_leads_tech)},
            {"granger_tech_to_nontech", fj(rep.leading.granger.a_to_b)},
            {"granger_nontech_to_tech", fj(rep.leading.granger.b_to_a)}};
    }

    detail::write_file_atomic(fs::path(output_dir) / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace tsecon::ingest
