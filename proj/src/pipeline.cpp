#include "amdcast/pipeline.hpp"

#include "amdcast/errors.hpp"
#include "amdcast/forecast.hpp"
#include "amdcast/io_util.hpp"
#include "amdcast/isolation_forest.hpp"
#include "amdcast/metrics.hpp"
#include "amdcast/rng.hpp"
#include "amdcast/stattests.hpp"
#include "amdcast/synth.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <ostream>

namespace amdcast {

namespace {

using nlohmann::json;

// Per-stage seed streams so the commands stay independent under one root.
constexpr std::uint64_t kAnomalyStream = 101;
constexpr std::uint64_t kInterpStream = 102;
constexpr std::uint64_t kTrainStream = 103;

void check_keys(const json& obj, const std::string& scope,
                std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
                return item.key() == k;
            }) == allowed.end()) {
            throw ConfigError("unknown config key '" +
                              (scope.empty() ? item.key() : scope + "." + item.key()) + "'");
        }
    }
}

void require_range(bool ok, const std::string& key, const std::string& requirement) {
    if (!ok) {
        throw ConfigError("config key '" + key + "' must be " + requirement);
    }
}

std::vector<std::size_t> size_list(const json& j, const std::string& key) {
    std::vector<std::size_t> out;
    for (const json& v : j) {
        const auto width = v.get<std::size_t>();
        require_range(width >= 1, key, "a list of widths >= 1");
        out.push_back(width);
    }
    return out;
}

std::filesystem::path out_path(const PipelineConfig& config, const char* name) {
    return std::filesystem::path(config.output_dir) / name;
}

void ensure_output_dir(const PipelineConfig& config) {
    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + config.output_dir + ": " +
                      ec.message());
    }
}

void require_input(const PipelineConfig& config) {
    if (config.input.empty()) {
        throw ConfigError("config key 'input' is required for this command");
    }
}

/// Writes the Train/Validation x {MSE, MAE, NSE} table (scaled space).
std::string metrics_table(const MetricReport& train_report, const MetricReport& val_report) {
    std::string csv = "split,parameter,mse,mae,nse\n";
    auto emit = [&csv](const char* split, const MetricReport& report) {
        for (const ParameterMetrics& row : report.per_parameter) {
            csv += std::string(split) + "," + row.name + "," + format_double(row.mse) + "," +
                   format_double(row.mae) + "," + format_double(row.nse) + "\n";
        }
        csv += std::string(split) + ",overall," + format_double(report.overall_mse) + "," +
               format_double(report.overall_mae) + "," + format_double(report.overall_nse) + "\n";
    };
    emit("train", train_report);
    emit("validation", val_report);
    return csv;
}

MetricReport report_over(const ModelSpec& spec, const ModelParams& params,
                         const WindowedDataset& ds, const std::vector<std::string>& names) {
    std::vector<std::vector<double>> observed(names.size());
    std::vector<std::vector<double>> simulated(names.size());
    for (const WindowSample& sample : ds.samples) {
        const std::vector<double> pred = model_forward(spec, params, sample);
        for (std::size_t c = 0; c < names.size(); ++c) {
            observed[c].push_back(sample.target[c]);
            simulated[c].push_back(pred[c]);
        }
    }
    return metric_report(names, observed, simulated);
}

} // namespace

PipelineConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }

    PipelineConfig config;
    try {
        check_keys(j, "", {"input", "output_dir", "seed", "anomaly", "interpolation", "model",
                           "split", "forecast"});
        if (j.contains("input")) config.input = j["input"].get<std::string>();
        if (j.contains("output_dir")) config.output_dir = j["output_dir"].get<std::string>();
        if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();

        if (j.contains("anomaly")) {
            const json& a = j["anomaly"];
            check_keys(a, "anomaly", {"contamination", "trees", "subsample"});
            if (a.contains("contamination"))
                config.anomaly.contamination = a["contamination"].get<double>();
            if (a.contains("trees")) config.anomaly.trees = a["trees"].get<std::size_t>();
            if (a.contains("subsample"))
                config.anomaly.subsample = a["subsample"].get<std::size_t>();
        }
        require_range(config.anomaly.contamination > 0.0 && config.anomaly.contamination <= 0.5,
                      "anomaly.contamination", "in (0, 0.5]");
        require_range(config.anomaly.trees >= 1, "anomaly.trees", ">= 1");
        require_range(config.anomaly.subsample >= 2, "anomaly.subsample", ">= 2");

        if (j.contains("interpolation")) {
            const json& i = j["interpolation"];
            check_keys(i, "interpolation",
                       {"split_fraction", "tree_count", "gbm_stages", "learning_rate",
                        "max_depth", "max_leaves", "min_leaf"});
            InterpolationConfig& ic = config.interpolation;
            if (i.contains("split_fraction")) ic.split_fraction = i["split_fraction"].get<double>();
            if (i.contains("tree_count")) ic.tree_count = i["tree_count"].get<std::size_t>();
            if (i.contains("gbm_stages")) ic.gbm_stages = i["gbm_stages"].get<std::size_t>();
            if (i.contains("learning_rate")) ic.learning_rate = i["learning_rate"].get<double>();
            if (i.contains("max_depth")) ic.max_depth = i["max_depth"].get<std::size_t>();
            if (i.contains("max_leaves")) ic.max_leaves = i["max_leaves"].get<std::size_t>();
            if (i.contains("min_leaf")) ic.min_leaf = i["min_leaf"].get<std::size_t>();
        }
        const InterpolationConfig& ic = config.interpolation;
        require_range(ic.split_fraction > 0.0 && ic.split_fraction < 1.0,
                      "interpolation.split_fraction", "in (0, 1)");
        require_range(ic.tree_count >= 1, "interpolation.tree_count", ">= 1");
        require_range(ic.gbm_stages >= 1, "interpolation.gbm_stages", ">= 1");
        require_range(ic.learning_rate > 0.0 && ic.learning_rate <= 1.0,
                      "interpolation.learning_rate", "in (0, 1]");
        require_range(ic.max_depth >= 1, "interpolation.max_depth", ">= 1");
        require_range(ic.max_leaves >= 2, "interpolation.max_leaves", ">= 2");
        require_range(ic.min_leaf >= 1, "interpolation.min_leaf", ">= 1");

        if (j.contains("model")) {
            const json& m = j["model"];
            check_keys(m, "model",
                       {"variant", "window", "epochs", "batch_size", "hidden", "head",
                        "fnn_hidden", "patience", "learning_rate"});
            ModelConfig& mc = config.model;
            if (m.contains("variant")) {
                try {
                    mc.variant = variant_from_string(m["variant"].get<std::string>());
                } catch (const ConfigError&) {
                    throw ConfigError("config key 'model.variant' must be one of fnn, lstm, "
                                      "encoder_decoder");
                }
            }
            if (m.contains("window")) mc.window = m["window"].get<std::size_t>();
            if (m.contains("epochs")) mc.epochs = m["epochs"].get<std::size_t>();
            if (m.contains("batch_size")) mc.batch_size = m["batch_size"].get<std::size_t>();
            if (m.contains("hidden")) mc.hidden = m["hidden"].get<std::size_t>();
            if (m.contains("head")) mc.head = size_list(m["head"], "model.head");
            if (m.contains("fnn_hidden"))
                mc.fnn_hidden = size_list(m["fnn_hidden"], "model.fnn_hidden");
            if (m.contains("patience")) mc.patience = m["patience"].get<std::size_t>();
            if (m.contains("learning_rate")) mc.learning_rate = m["learning_rate"].get<double>();
        }
        require_range(config.model.window >= 1 || config.model.variant == ModelVariant::Fnn,
                      "model.window", ">= 1 for recurrent variants");
        require_range(config.model.batch_size >= 1, "model.batch_size", ">= 1");
        require_range(config.model.hidden >= 1, "model.hidden", ">= 1");
        require_range(config.model.learning_rate > 0.0, "model.learning_rate", "> 0");

        if (j.contains("split")) {
            const json& s = j["split"];
            check_keys(s, "split", {"train_fraction"});
            if (s.contains("train_fraction"))
                config.train_fraction = s["train_fraction"].get<double>();
        }
        require_range(config.train_fraction > 0.0 && config.train_fraction < 1.0,
                      "split.train_fraction", "in (0, 1)");

        if (j.contains("forecast")) {
            const json& f = j["forecast"];
            check_keys(f, "forecast", {"horizon", "measured"});
            if (f.contains("horizon"))
                config.forecast.horizon = f["horizon"].get<std::size_t>();
            if (f.contains("measured"))
                config.forecast.measured = f["measured"].get<std::string>();
        }
    } catch (const json::exception& e) {
        throw ConfigError("config value has the wrong type: " + std::string(e.what()));
    }
    return config;
}

PipelineConfig load_config(const std::string& path) {
    return parse_config_text(read_file(path));
}

void cmd_inspect(const PipelineConfig& config, std::ostream& out) {
    require_input(config);
    ensure_output_dir(config);
    const TimeSeriesFrame frame = load_csv(config.input);

    std::string csv = "parameter,statistic,p_value,lags,verdict\n";
    for (std::size_t c = 0; c < frame.column_count(); ++c) {
        std::vector<double> series;
        for (double v : frame.values[c]) {
            if (!std::isnan(v)) series.push_back(v);
        }
        const bool constant =
            !series.empty() &&
            std::all_of(series.begin(), series.end(), [&](double v) { return v == series[0]; });
        if (constant) {
            out << frame.columns[c] << ": degenerate (constant)\n";
            csv += frame.columns[c] + ",,,,degenerate (constant)\n";
            continue;
        }
        const AdfResult adf = adf_test(series);
        const char* verdict = adf.stationary_at_5pct ? "stationary" : "non-stationary";
        out << frame.columns[c] << ": ADF " << format_double(adf.statistic)
            << " p=" << format_double(adf.p_value) << " lags=" << adf.lags_used << " -> "
            << verdict << "\n";
        csv += frame.columns[c] + "," + format_double(adf.statistic) + "," +
               format_double(adf.p_value) + "," + std::to_string(adf.lags_used) + "," + verdict +
               "\n";
    }
    write_file(out_path(config, "adf.csv").string(), csv);
    out << "wrote " << out_path(config, "adf.csv").string() << "\n";
}

void cmd_clean(const PipelineConfig& config, std::ostream& out) {
    require_input(config);
    ensure_output_dir(config);
    const TimeSeriesFrame frame = load_csv(config.input);
    const ScalerParams scaler = fit_scaler(frame, default_transforms(frame.columns));
    TimeSeriesFrame scaled = apply_scaler(scaler, frame);

    // Score only complete rows; rows already holding gaps go straight to
    // the interpolation stage.
    std::vector<std::vector<double>> points;
    std::vector<std::size_t> point_rows;
    for (std::size_t r = 0; r < scaled.row_count(); ++r) {
        std::vector<double> row = scaled.row(r);
        if (std::none_of(row.begin(), row.end(), [](double v) { return std::isnan(v); })) {
            points.push_back(std::move(row));
            point_rows.push_back(r);
        }
    }
    if (points.size() < 2) {
        throw DataError("clean: fewer than two complete rows to score");
    }

    const IsolationForestModel forest =
        build_forest(points, config.anomaly.trees, config.anomaly.subsample,
                     config.anomaly.contamination, mix_seed(config.seed, kAnomalyStream));
    const std::vector<std::size_t> flagged_local = detect(forest, points);

    std::vector<std::size_t> flagged;
    for (std::size_t k : flagged_local) flagged.push_back(point_rows[k]);

    std::string anomalies = "index,date\n";
    for (std::size_t r : flagged) {
        anomalies += std::to_string(r) + "," + frame.dates[r].to_iso() + "\n";
        for (std::size_t c = 0; c < scaled.column_count(); ++c) {
            scaled.values[c][r] = std::numeric_limits<double>::quiet_NaN();
        }
    }
    write_file(out_path(config, "anomalies.csv").string(), anomalies);
    out << "flagged " << flagged.size() << " of " << frame.row_count() << " rows as anomalous\n";

    const InterpolationResult interp =
        interpolate(scaled, config.interpolation, mix_seed(config.seed, kInterpStream));
    TimeSeriesFrame daily = invert_scaler(scaler, interp.daily);

    // Rows that survived anomaly screening keep their measured values
    // exactly (the scale/unscale round trip may wobble the last bit).
    const std::int64_t origin = daily.dates.front().epoch_days();
    for (std::size_t r = 0; r < frame.row_count(); ++r) {
        if (std::find(flagged.begin(), flagged.end(), r) != flagged.end()) continue;
        const auto day = static_cast<std::size_t>(frame.dates[r].epoch_days() - origin);
        for (std::size_t c = 0; c < frame.column_count(); ++c) {
            if (!frame.is_missing(r, c)) {
                daily.values[c][day] = frame.values[c][r];
            }
        }
    }
    write_csv(daily, out_path(config, "daily.csv").string());

    std::string table = "parameter,model,validation_mse_scaled,validation_mae_scaled,chosen\n";
    for (const ParameterPlan& plan : interp.plan.parameters) {
        for (const ModelScore& score : plan.ranking) {
            const bool chosen = std::find(plan.chosen.begin(), plan.chosen.end(), score.preset) !=
                                plan.chosen.end();
            table += plan.parameter + "," + to_string(score.preset) + "," +
                     format_double(score.validation_mse) + "," +
                     format_double(score.validation_mae) + "," + (chosen ? "1" : "0") + "\n";
        }
        out << plan.parameter << ": best " << to_string(plan.ranking.front().preset)
            << (plan.fixed_choice ? " (choice pinned)" : "") << "\n";
    }
    write_file(out_path(config, "interp_models.csv").string(), table);
    out << "wrote " << daily.row_count() << " daily rows to "
        << out_path(config, "daily.csv").string() << "\n";
}

void cmd_train(const PipelineConfig& config, std::ostream& out) {
    ensure_output_dir(config);
    const std::string daily_path = out_path(config, "daily.csv").string();
    if (!std::filesystem::exists(daily_path)) {
        throw DataError("daily.csv not found in " + config.output_dir +
                        "; run the clean command first");
    }
    const TimeSeriesFrame daily = load_csv(daily_path);
    const ScalerParams scaler = fit_scaler(daily, default_transforms(daily.columns));
    const TimeSeriesFrame scaled = apply_scaler(scaler, daily);
    const Matrix covariates = cyclic_encode(scaled.dates);
    const WindowedDataset dataset = make_windows(scaled, config.model.window, covariates);

    ModelSpec spec;
    spec.variant = config.model.variant;
    spec.window = config.model.window;
    spec.feature_count = scaled.column_count();
    spec.covariate_count = covariates.cols();
    spec.fnn_hidden = config.model.fnn_hidden;
    spec.hidden = config.model.hidden;
    spec.head = config.model.head;
    spec.output_count = scaled.column_count();

    const bool on_grid = config.model.window == 7 || config.model.window == 14 ||
                         config.model.window == 28 ||
                         (config.model.window == 0 && spec.variant == ModelVariant::Fnn);
    if (!on_grid) {
        out << "note: window " << config.model.window
            << " is off the reported grid; proceeding with it\n";
    }

    TrainConfig tc;
    tc.epochs = config.model.epochs > 0 ? config.model.epochs
                                        : preset_epochs(spec.variant, spec.window);
    tc.batch_size = config.model.batch_size;
    tc.train_fraction = config.train_fraction;
    tc.learning_rate = config.model.learning_rate;
    tc.patience = config.model.patience;
    tc.seed = mix_seed(config.seed, kTrainStream);

    out << "training " << to_string(spec.variant) << " window " << spec.window << " for "
        << tc.epochs << " epochs (" << dataset.size() << " samples)\n";
    auto [params, history] = train(spec, dataset, tc);

    std::string hist_csv = "epoch,train_mae,val_mae\n";
    for (std::size_t e = 0; e < history.train_loss.size(); ++e) {
        hist_csv += std::to_string(e + 1) + "," + format_double(history.train_loss[e]) + "," +
                    format_double(history.val_loss[e]) + "\n";
    }
    write_file(out_path(config, "history.csv").string(), hist_csv);

    const auto [train_set, val_set] = chrono_split(dataset, SplitSpec{config.train_fraction});
    const MetricReport train_report = report_over(spec, params, train_set, scaled.columns);
    const MetricReport val_report = report_over(spec, params, val_set, scaled.columns);
    write_file(out_path(config, "metrics.csv").string(),
               metrics_table(train_report, val_report));

    save_checkpoint(out_path(config, "model.json").string(),
                    Checkpoint{spec, std::move(params), scaler, config.seed});

    out << "best epoch " << history.best_epoch + 1 << " of " << history.train_loss.size()
        << ", validation MAE " << format_double(history.val_loss[history.best_epoch]) << "\n";
    out << "overall NSE (scaled): train " << format_double(train_report.overall_nse)
        << ", validation " << format_double(val_report.overall_nse) << "\n";
    out << "fit diagnosis: " << to_string(diagnose(history)) << "\n";
    out << "wrote " << out_path(config, "model.json").string() << "\n";
}

void cmd_forecast(const PipelineConfig& config, std::ostream& out) {
    const std::string ckpt_path = out_path(config, "model.json").string();
    if (!std::filesystem::exists(ckpt_path)) {
        throw DataError("model.json not found in " + config.output_dir +
                        "; run the train command first");
    }
    const std::string daily_path = out_path(config, "daily.csv").string();
    if (!std::filesystem::exists(daily_path)) {
        throw DataError("daily.csv not found in " + config.output_dir +
                        "; run the clean command first");
    }
    const Checkpoint ckpt = load_checkpoint(ckpt_path);
    const TimeSeriesFrame daily = load_csv(daily_path);
    const TimeSeriesFrame scaled = apply_scaler(ckpt.scaler, daily);
    if (scaled.row_count() < ckpt.spec.window) {
        throw DataError("history has fewer rows than the model window");
    }

    Matrix recent(ckpt.spec.window, scaled.column_count());
    const std::size_t first = scaled.row_count() - ckpt.spec.window;
    for (std::size_t t = 0; t < ckpt.spec.window; ++t) {
        for (std::size_t c = 0; c < scaled.column_count(); ++c) {
            recent(t, c) = scaled.values[c][first + t];
        }
    }

    std::vector<Date> future;
    for (std::size_t h = 1; h <= config.forecast.horizon; ++h) {
        future.push_back(daily.dates.back().plus_days(static_cast<std::int64_t>(h)));
    }
    const ForecastResult result = rollout(ckpt.spec, ckpt.params, ckpt.scaler, recent, future);

    const std::string report_dir = (std::filesystem::path(config.output_dir) / "forecast").string();
    if (!config.forecast.measured.empty() && !future.empty()) {
        const TimeSeriesFrame measured = load_csv(config.forecast.measured);
        const SparseEvaluation eval = evaluate_sparse(result, measured);
        emit_report(result, daily, &eval, &measured, report_dir);
        out << "evaluated " << eval.matched_dates.size() << " measured dates:\n";
        for (const SparseParameterError& row : eval.per_parameter) {
            out << "  " << row.name << ": MSE " << format_double(row.mse) << ", MAE "
                << format_double(row.mae) << "\n";
        }
    } else {
        emit_report(result, daily, nullptr, nullptr, report_dir);
    }
    out << "wrote " << result.dates.size() << " forecast rows to " << report_dir
        << "/forecast.csv\n";
}

void cmd_synth(const PipelineConfig& config, std::ostream& out) {
    const SynthFiles files = synthesize(config.output_dir, config.seed);
    out << "wrote " << files.weekly << " (83 weekly rows, " << files.planted.size()
        << " planted anomalies)\n";
    out << "wrote " << files.measured << ", " << files.truth_daily << ", "
        << files.truth_anomalies << "\n";
}

} // namespace amdcast
