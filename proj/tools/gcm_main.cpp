// gcm: batch pipeline for per-image global-consistency metrics.
//
// Subcommands mirror the pipeline stages: generate a phantom cohort,
// build evaluation sets, train referee/encoder models, evaluate metrics,
// and re-render report plots. Every stage echoes its merged configuration
// next to its artifacts so outputs are traceable to exact inputs.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "gcm/cohort_io.hpp"
#include "gcm/encoder.hpp"
#include "gcm/error.hpp"
#include "gcm/phantom.hpp"
#include "gcm/plot.hpp"
#include "gcm/referee.hpp"
#include "gcm/report.hpp"
#include "gcm/split.hpp"
#include "gcm/views.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

// Exit codes: 0 success, 2 configuration, 3 I/O, 4 numerical, 5 invalid input.
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumerical = 4;
constexpr int kExitInvalidInput = 5;

ordered_json load_config_file(const std::string& path) {
    if (path.empty()) return ordered_json::object();
    std::ifstream in(path);
    if (!in) throw gcm::io_error("cannot open config file: " + path);
    ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw gcm::config_error("malformed config file " + path + ": " + e.what());
    }
    if (!j.is_object()) throw gcm::config_error("config file must hold a JSON object: " + path);
    return j;
}

const ordered_json* section(const ordered_json& config, const char* name) {
    const auto it = config.find(name);
    if (it == config.end()) return nullptr;
    if (!it->is_object()) throw gcm::config_error(std::string("config section '") + name + "' must be an object");
    return &*it;
}

template <typename T>
void from_config(const ordered_json* sec, const char* key, T& value) {
    if (!sec) return;
    const auto it = sec->find(key);
    if (it == sec->end()) return;
    try {
        value = it->get<T>();
    } catch (const std::exception&) {
        throw gcm::config_error(std::string("config field '") + key + "' has the wrong type");
    }
}

void from_config_range(const ordered_json* sec, const char* key, std::pair<double, double>& value) {
    if (!sec) return;
    const auto it = sec->find(key);
    if (it == sec->end()) return;
    if (!it->is_array() || it->size() != 2) {
        throw gcm::config_error(std::string("config field '") + key + "' must be [min, max]");
    }
    value = {(*it)[0].get<double>(), (*it)[1].get<double>()};
}

void write_json(const ordered_json& j, const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw gcm::io_error("cannot open for writing: " + path.string());
    out << j.dump(2) << "\n";
    if (!out) throw gcm::io_error("write failed: " + path.string());
}

std::string json_digest(const ordered_json& j) { return gcm::string_digest(j.dump()); }

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw gcm::io_error("cannot create directory " + dir.string() + ": " + ec.message());
}

std::vector<gcm::SubjectRecord> load_split(const fs::path& cohort, gcm::Split split) {
    auto records = gcm::load_cohort(cohort);
    std::erase_if(records, [&](const gcm::SubjectRecord& r) { return r.split != split; });
    return records;
}

// ---------------------------------------------------------------------------
// generate

struct GenerateArgs {
    int n = 100;
    std::uint64_t seed = 0;
    std::string out;
    std::string config_file;
    gcm::PhantomConfig phantom;
    gcm::SplitFractions fractions;
    std::uint64_t split_seed = 1;
};

int cmd_generate(GenerateArgs& args, CLI::App& sub) {
    const ordered_json config = load_config_file(args.config_file);
    const ordered_json* phantom_sec = section(config, "phantom");
    const ordered_json* split_sec = section(config, "split");

    gcm::PhantomConfig& pc = args.phantom;
    if (!sub.count("--n")) from_config(phantom_sec, "n", args.n);
    if (!sub.count("--seed")) from_config(phantom_sec, "seed", args.seed);
    if (!sub.count("--height")) from_config(phantom_sec, "height", pc.height);
    if (!sub.count("--width")) from_config(phantom_sec, "width", pc.width);
    if (!sub.count("--noise")) from_config(phantom_sec, "noise_level", pc.noise_level);
    from_config_range(phantom_sec, "age_range", pc.age_range);
    from_config_range(phantom_sec, "bmi_range", pc.bmi_range);
    from_config_range(phantom_sec, "body_fat_range", pc.body_fat_range);
    from_config(split_sec, "train", args.fractions.train);
    from_config(split_sec, "val", args.fractions.val);
    from_config(split_sec, "test", args.fractions.test);
    from_config(split_sec, "seed", args.split_seed);
    pc.seed = args.seed;
    if (args.n < 1) throw gcm::config_error("generate: n must be >= 1");

    auto records = gcm::generate_cohort(args.n, pc);
    gcm::split_dataset(records, args.fractions, args.split_seed);

    const fs::path out_dir(args.out);
    ensure_dir(out_dir);
    gcm::save_cohort(out_dir, records);

    ordered_json merged;
    merged["phantom"] = ordered_json{{"n", args.n},
                                     {"height", pc.height},
                                     {"width", pc.width},
                                     {"age_range", {pc.age_range.first, pc.age_range.second}},
                                     {"bmi_range", {pc.bmi_range.first, pc.bmi_range.second}},
                                     {"body_fat_range", {pc.body_fat_range.first, pc.body_fat_range.second}},
                                     {"noise_level", pc.noise_level},
                                     {"seed", args.seed}};
    merged["split"] = ordered_json{{"train", args.fractions.train},
                                   {"val", args.fractions.val},
                                   {"test", args.fractions.test},
                                   {"seed", args.split_seed}};
    merged["digest"] = json_digest(merged);
    write_json(merged, out_dir / "config.json");

    std::cout << "cohort: " << records.size() << " subjects -> " << out_dir.string() << "\n"
              << "manifest digest: " << gcm::file_digest(out_dir / "manifest.csv") << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// build-eval

struct BuildEvalArgs {
    std::string cohort;
    std::uint64_t seed = 0;
    double band = 0.10;
    std::string out;
    std::string config_file;
};

int cmd_build_eval(BuildEvalArgs& args, CLI::App& sub) {
    const ordered_json config = load_config_file(args.config_file);
    const ordered_json* eval_sec = section(config, "evaluation");
    if (!sub.count("--seed")) from_config(eval_sec, "seed", args.seed);
    if (!sub.count("--band")) from_config(eval_sec, "band_fraction", args.band);

    const auto test_records = load_split(args.cohort, gcm::Split::test);
    if (test_records.size() < 4) {
        throw gcm::invalid_input_error("build-eval: test split has " +
                                       std::to_string(test_records.size()) + " records, need >= 4");
    }
    const auto sets = gcm::build_eval_sets(test_records, args.seed, args.band);

    const fs::path out_dir(args.out);
    ensure_dir(out_dir);
    gcm::save_eval_sets(out_dir, sets);

    ordered_json merged;
    merged["evaluation"] = ordered_json{{"seed", args.seed},
                                        {"band_fraction", args.band},
                                        {"cohort_manifest_digest",
                                         gcm::file_digest(fs::path(args.cohort) / "manifest.csv")}};
    merged["digest"] = json_digest(merged);
    write_json(merged, out_dir / "config.json");

    std::cout << "eval sets: reference=" << sets.reference.size()
              << " consistent=" << sets.consistent.size()
              << " inconsistent=" << sets.inconsistent.size() << " -> " << out_dir.string() << "\n"
              << "manifest digest: " << gcm::file_digest(out_dir / "manifest.csv") << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
    std::string target;
    std::string cohort;
    std::string out;
    std::string attribute;
    std::string side;
    std::string capacity = "tiny";
    int epochs = -1;
    std::uint64_t seed = 1;
    std::string config_file;
};

int cmd_train(TrainArgs& args, CLI::App& sub) {
    const ordered_json config = load_config_file(args.config_file);
    const fs::path models_root(args.out);
    const std::string cohort_digest = gcm::file_digest(fs::path(args.cohort) / "manifest.csv");

    if (args.target == "referee") {
        if (args.attribute.empty() || args.side.empty()) {
            throw gcm::config_error("train --target referee requires --attribute and --side");
        }
        gcm::Attribute attribute;
        gcm::Side side;
        try {
            attribute = gcm::attribute_from_string(args.attribute);
            side = gcm::side_from_string(args.side);
        } catch (const gcm::invalid_input_error& e) {
            throw gcm::config_error(e.what());
        }

        gcm::RefereeTrainConfig tc;
        const ordered_json* sec = section(config, "referee");
        from_config(sec, "epochs", tc.epochs);
        from_config(sec, "batch_size", tc.batch_size);
        from_config(sec, "learning_rate", tc.learning_rate);
        from_config(sec, "band_fraction", tc.band_fraction);
        if (sub.count("--epochs")) tc.epochs = args.epochs;
        if (sub.count("--seed") || !sec || !sec->contains("seed")) {
            tc.seed = args.seed;
        } else {
            from_config(sec, "seed", tc.seed);
        }
        if (sub.count("--capacity") || !sec || !sec->contains("capacity")) {
            tc.backbone_capacity = gcm::capacity_from_string(args.capacity);
        } else {
            std::string cap;
            from_config(sec, "capacity", cap);
            tc.backbone_capacity = gcm::capacity_from_string(cap);
        }

        const auto train_records = load_split(args.cohort, gcm::Split::train);
        if (train_records.empty()) throw gcm::invalid_input_error("train: cohort has no train split");

        const auto model = gcm::train_referee(train_records, attribute, side, tc);
        const fs::path dir = models_root / gcm::referee_dir_name(attribute, side);
        gcm::save_referee(model, dir);

        ordered_json merged;
        merged["referee"] = ordered_json{{"attribute", args.attribute},
                                         {"side", args.side},
                                         {"epochs", tc.epochs},
                                         {"batch_size", tc.batch_size},
                                         {"learning_rate", tc.learning_rate},
                                         {"capacity", gcm::to_string(tc.backbone_capacity)},
                                         {"seed", tc.seed},
                                         {"band_fraction", tc.band_fraction},
                                         {"cohort_manifest_digest", cohort_digest}};
        merged["digest"] = json_digest(merged);
        write_json(merged, dir / "stage_config.json");

        const auto val_records = load_split(args.cohort, gcm::Split::val);
        std::cout << "referee " << gcm::referee_dir_name(attribute, side) << " -> " << dir.string()
                  << "\n";
        if (!val_records.empty()) {
            const auto stats = gcm::validate_referee(model, val_records);
            std::cout << "validation MAE: " << stats.mean << " +/- " << stats.stddev << " over "
                      << stats.count << " subjects\n";
        }
        return 0;
    }

    if (args.target == "encoder") {
        gcm::ContrastiveTrainConfig tc;
        const ordered_json* sec = section(config, "encoder");
        from_config(sec, "epochs", tc.epochs);
        from_config(sec, "batch_size", tc.batch_size);
        from_config(sec, "temperature", tc.temperature);
        from_config(sec, "learning_rate", tc.learning_rate);
        from_config(sec, "band_fraction", tc.band_fraction);
        from_config(sec, "embed_from_projection", tc.embed_from_projection);
        if (sec && sec->contains("augmentations")) {
            tc.augmentations.clear();
            for (const auto& name : sec->at("augmentations")) {
                tc.augmentations.push_back(gcm::augmentation_from_string(name.get<std::string>()));
            }
        }
        if (sub.count("--epochs")) tc.epochs = args.epochs;
        if (sub.count("--seed") || !sec || !sec->contains("seed")) {
            tc.seed = args.seed;
        } else {
            from_config(sec, "seed", tc.seed);
        }
        if (sub.count("--capacity") || !sec || !sec->contains("capacity")) {
            tc.capacity = gcm::capacity_from_string(args.capacity);
        } else {
            std::string cap;
            from_config(sec, "capacity", cap);
            tc.capacity = gcm::capacity_from_string(cap);
        }

        const auto train_records = load_split(args.cohort, gcm::Split::train);
        const auto model = gcm::train_encoder(train_records, tc);
        const fs::path dir = models_root / "encoder";
        gcm::save_encoder(model, dir);

        ordered_json merged;
        ordered_json augs = ordered_json::array();
        for (auto a : tc.augmentations) augs.push_back(gcm::to_string(a));
        merged["encoder"] = ordered_json{{"epochs", tc.epochs},
                                         {"batch_size", tc.batch_size},
                                         {"temperature", tc.temperature},
                                         {"learning_rate", tc.learning_rate},
                                         {"capacity", gcm::to_string(tc.capacity)},
                                         {"seed", tc.seed},
                                         {"band_fraction", tc.band_fraction},
                                         {"embed_from_projection", tc.embed_from_projection},
                                         {"augmentations", augs},
                                         {"cohort_manifest_digest", cohort_digest}};
        merged["digest"] = json_digest(merged);
        write_json(merged, dir / "stage_config.json");

        std::cout << "encoder -> " << dir.string() << " (embedding_dim=" << model.embedding_dim
                  << ", final epoch loss " << model.final_epoch_loss << ")\n";
        return 0;
    }

    throw gcm::config_error("train: --target must be referee or encoder, got '" + args.target + "'");
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
    std::string cohort;
    std::string models;
    std::string out;
    std::uint64_t seed = 0;
    double band = 0.10;
    std::string config_file;
};

int cmd_evaluate(EvaluateArgs& args, CLI::App& sub) {
    const ordered_json config = load_config_file(args.config_file);
    const ordered_json* eval_sec = section(config, "evaluation");
    if (!sub.count("--seed")) from_config(eval_sec, "seed", args.seed);
    if (!sub.count("--band")) from_config(eval_sec, "band_fraction", args.band);

    // One pass over all seven expected model directories so the error names
    // every absent model at once.
    const fs::path models_root(args.models);
    std::vector<std::string> absent;
    for (gcm::Attribute a : gcm::kAllAttributes) {
        for (gcm::Side s : gcm::kAllSides) {
            const auto name = gcm::referee_dir_name(a, s);
            if (!fs::exists(models_root / name / "metadata.txt")) absent.push_back(name);
        }
    }
    if (!fs::exists(models_root / "encoder" / "metadata.txt")) absent.push_back("encoder");
    if (!absent.empty()) {
        std::string msg = "missing models under " + models_root.string() + ":";
        for (const auto& name : absent) msg += " " + name;
        throw gcm::config_error(msg);
    }
    const gcm::RefereeSet referees = gcm::RefereeSet::load(models_root);
    const gcm::EncoderModel encoder = gcm::load_encoder(models_root / "encoder");

    const auto test_records = load_split(args.cohort, gcm::Split::test);
    if (test_records.size() < 4) {
        throw gcm::invalid_input_error("evaluate: test split has " +
                                       std::to_string(test_records.size()) + " records, need >= 4");
    }
    const auto sets = gcm::build_eval_sets(test_records, args.seed, args.band);

    ordered_json merged;
    merged["evaluation"] = ordered_json{{"seed", args.seed},
                                        {"band_fraction", args.band},
                                        {"cohort_manifest_digest",
                                         gcm::file_digest(fs::path(args.cohort) / "manifest.csv")},
                                        {"encoder_config_digest", encoder.training_config_digest},
                                        {"fid_extractor", "contrastive-encoder"}};
    merged["digest"] = json_digest(merged);

    gcm::MetricReport report = gcm::evaluate_dataset(sets, referees, encoder);
    report.config_digest = merged["digest"].get<std::string>();

    const fs::path out_dir(args.out);
    ensure_dir(out_dir);
    gcm::write_report(report, out_dir / "report.json");
    write_json(merged, out_dir / "config.json");
    gcm::render_report_plots(report, out_dir / "attribute_errors.pgm", out_dir / "implicit_vs_explicit.pgm");

    std::cout << gcm::format_summary_table(report) << "report -> " << (out_dir / "report.json").string()
              << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// report

struct ReportArgs {
    std::string run;
    bool plots = false;
};

int cmd_report(ReportArgs& args) {
    fs::path report_path(args.run);
    if (fs::is_directory(report_path)) report_path /= "report.json";
    const gcm::MetricReport report = gcm::read_report(report_path);
    std::cout << gcm::format_summary_table(report);
    if (args.plots) {
        const fs::path dir = report_path.parent_path();
        gcm::render_report_plots(report, dir / "attribute_errors.pgm", dir / "implicit_vs_explicit.pgm");
        std::cout << "plots -> " << (dir / "attribute_errors.pgm").string() << ", "
                  << (dir / "implicit_vs_explicit.pgm").string() << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"per-image global consistency metrics for synthetic grayscale images"};
    app.require_subcommand(1);

    GenerateArgs gen;
    CLI::App* generate = app.add_subcommand("generate", "generate a phantom cohort");
    generate->add_option("--n", gen.n, "number of subjects");
    generate->add_option("--seed", gen.seed, "cohort seed");
    generate->add_option("--out", gen.out, "output cohort directory")->required();
    generate->add_option("--config", gen.config_file, "JSON config file");
    generate->add_option("--height", gen.phantom.height, "phantom height (pixels)");
    generate->add_option("--width", gen.phantom.width, "phantom width (pixels)");
    generate->add_option("--noise", gen.phantom.noise_level, "additive noise level");

    BuildEvalArgs be;
    CLI::App* build_eval = app.add_subcommand("build-eval", "build consistent/inconsistent/reference sets");
    build_eval->add_option("--cohort", be.cohort, "cohort directory")->required();
    build_eval->add_option("--seed", be.seed, "shuffle seed");
    build_eval->add_option("--band", be.band, "central band fraction to remove");
    build_eval->add_option("--out", be.out, "output directory")->required();
    build_eval->add_option("--config", be.config_file, "JSON config file");

    TrainArgs tr;
    CLI::App* train = app.add_subcommand("train", "train a referee or the contrastive encoder");
    train->add_option("--target", tr.target, "referee|encoder")->required();
    train->add_option("--cohort", tr.cohort, "cohort directory")->required();
    train->add_option("--out", tr.out, "models root directory")->required();
    train->add_option("--attribute", tr.attribute, "age|bmi|body_fat_pct (referee)");
    train->add_option("--side", tr.side, "superior|inferior (referee)");
    train->add_option("--capacity", tr.capacity, "tiny|small|paper-scale");
    train->add_option("--epochs", tr.epochs, "training epochs");
    train->add_option("--seed", tr.seed, "training seed");
    train->add_option("--config", tr.config_file, "JSON config file");

    EvaluateArgs ev;
    CLI::App* evaluate = app.add_subcommand("evaluate", "run the metric suite and write a report");
    evaluate->add_option("--cohort", ev.cohort, "cohort directory")->required();
    evaluate->add_option("--models", ev.models, "models root directory")->required();
    evaluate->add_option("--out", ev.out, "run output directory")->required();
    evaluate->add_option("--seed", ev.seed, "evaluation shuffle seed");
    evaluate->add_option("--band", ev.band, "central band fraction to remove");
    evaluate->add_option("--config", ev.config_file, "JSON config file");

    ReportArgs rp;
    CLI::App* report = app.add_subcommand("report", "print a stored report; optionally re-render plots");
    report->add_option("--run", rp.run, "run directory or report.json path")->required();
    report->add_flag("--plots", rp.plots, "re-render the figures");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (generate->parsed()) return cmd_generate(gen, *generate);
        if (build_eval->parsed()) return cmd_build_eval(be, *build_eval);
        if (train->parsed()) return cmd_train(tr, *train);
        if (evaluate->parsed()) return cmd_evaluate(ev, *evaluate);
        if (report->parsed()) return cmd_report(rp);
    } catch (const gcm::config_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const gcm::io_error& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const gcm::numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const gcm::invalid_input_error& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitInvalidInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
