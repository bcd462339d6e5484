#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "gcm/cohort_io.hpp"
#include "gcm/report.hpp"

using namespace gcm;
namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "gcm_cli_test";

int run(const std::string& args) {
    const std::string cmd = std::string(GCM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

struct CliFixture {
    CliFixture() {
        fs::remove_all(kWork);
        fs::create_directories(kWork);

        // Small split fractions so the micro cohort has >= 4 test records.
        std::ofstream cfg(kWork / "config.json");
        cfg << R"({
  "split": {"train": 0.5, "val": 0.2, "test": 0.3, "seed": 2},
  "referee": {"epochs": 3, "batch_size": 8, "learning_rate": 0.003},
  "encoder": {"epochs": 2, "batch_size": 8}
})";
    }
};

CliFixture& cli_fixture() {
    static CliFixture f;
    return f;
}

}  // namespace

TEST_CASE("generate is deterministic and writes a complete cohort") {
    cli_fixture();
    const auto dir_a = kWork / "cohort_a";
    const auto dir_b = kWork / "cohort_b";
    REQUIRE(run("generate --n 24 --seed 7 --height 64 --width 48 --out " + q(dir_a) + " --config " +
                q(kWork / "config.json")) == 0);
    REQUIRE(run("generate --n 24 --seed 7 --height 64 --width 48 --out " + q(dir_b) + " --config " +
                q(kWork / "config.json")) == 0);
    CHECK(file_digest(dir_a / "manifest.csv") == file_digest(dir_b / "manifest.csv"));

    const auto records = load_cohort(dir_a);
    CHECK(records.size() == 24);
    for (const auto& rec : records) {
        CHECK(fs::exists(dir_a / ("images/" + rec.id + ".pgm")));
    }
    CHECK(fs::exists(dir_a / "config.json"));
}

TEST_CASE("generate rejects an inverted range with a config error") {
    cli_fixture();
    std::ofstream bad(kWork / "bad.json");
    bad << R"({"phantom": {"age_range": [90, 20]}})";
    bad.close();
    CHECK(run("generate --n 4 --out " + q(kWork / "never") + " --config " + q(kWork / "bad.json")) ==
          2);
}

TEST_CASE("build-eval is deterministic and labels roles") {
    cli_fixture();
    const auto cohort = kWork / "cohort_a";
    const auto eval_a = kWork / "eval_a";
    const auto eval_b = kWork / "eval_b";
    REQUIRE(run("build-eval --cohort " + q(cohort) + " --seed 3 --out " + q(eval_a)) == 0);
    REQUIRE(run("build-eval --cohort " + q(cohort) + " --seed 3 --out " + q(eval_b)) == 0);
    CHECK(file_digest(eval_a / "manifest.csv") == file_digest(eval_b / "manifest.csv"));

    const auto sets = load_eval_sets(eval_a);
    CHECK(sets.reference.size() >= 3);
    CHECK(sets.consistent.size() >= 3);
    CHECK(sets.inconsistent.size() == sets.consistent.size());
}

TEST_CASE("train writes sidecars and is rerun-stable") {
    cli_fixture();
    const auto cohort = kWork / "cohort_a";
    const auto models = kWork / "models";
    const std::string common = " --cohort " + q(cohort) + " --out " + q(models) + " --config " +
                               q(kWork / "config.json") + " --seed 11";

    REQUIRE(run("train --target referee --attribute age --side superior" + common) == 0);
    const auto sidecar = models / "referee_age_superior" / "metadata.txt";
    REQUIRE(fs::exists(sidecar));
    {
        std::ifstream in(sidecar);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        CHECK(text.find("attribute=age") != std::string::npos);
        CHECK(text.find("side=superior") != std::string::npos);
    }
    const auto digest_before = file_digest(sidecar);
    REQUIRE(run("train --target referee --attribute age --side superior" + common) == 0);
    CHECK(file_digest(sidecar) == digest_before);

    // Referee target without attribute/side is a configuration error.
    CHECK(run("train --target referee --cohort " + q(cohort) + " --out " + q(models)) == 2);
    // Unknown target likewise.
    CHECK(run("train --target keras --cohort " + q(cohort) + " --out " + q(models)) == 2);
}

TEST_CASE("encoder training on a one-image cohort is an invalid-input failure") {
    cli_fixture();
    const auto tiny = kWork / "cohort_one";
    // All records land in train with these fractions; batch_size 8 > 1 image.
    REQUIRE(run("generate --n 1 --seed 1 --height 64 --width 48 --out " + q(tiny)) == 0);
    CHECK(run("train --target encoder --cohort " + q(tiny) + " --out " + q(kWork / "models_tiny") +
              " --config " + q(kWork / "config.json")) == 5);
}

TEST_CASE("evaluate requires every model and lists the missing ones") {
    cli_fixture();
    const auto cohort = kWork / "cohort_a";
    CHECK(run("evaluate --cohort " + q(cohort) + " --models " + q(kWork / "models_absent") +
              " --out " + q(kWork / "run_never")) == 2);
}

TEST_CASE("full micro pipeline: train all models, evaluate, report") {
    cli_fixture();
    const auto cohort = kWork / "cohort_a";
    const auto models = kWork / "models";
    const std::string common = " --cohort " + q(cohort) + " --out " + q(models) + " --config " +
                               q(kWork / "config.json") + " --seed 11";
    for (const char* attr : {"age", "bmi", "body_fat_pct"}) {
        for (const char* side : {"superior", "inferior"}) {
            REQUIRE(run(std::string("train --target referee --attribute ") + attr + " --side " +
                        side + common) == 0);
        }
    }
    REQUIRE(run("train --target encoder" + common) == 0);

    const auto run_dir = kWork / "run";
    REQUIRE(run("evaluate --cohort " + q(cohort) + " --models " + q(models) + " --seed 5 --out " +
                q(run_dir)) == 0);
    REQUIRE(fs::exists(run_dir / "report.json"));
    CHECK(fs::exists(run_dir / "config.json"));
    CHECK(fs::exists(run_dir / "attribute_errors.pgm"));
    CHECK(fs::exists(run_dir / "implicit_vs_explicit.pgm"));

    const auto report = read_report(run_dir / "report.json");
    CHECK_FALSE(report.config_digest.empty());
    CHECK(report.per_image.size() >= 6);

    // Rerun into a second directory: per-image rows must match exactly
    // (same models, same seeds, deterministic inference).
    const auto run_dir2 = kWork / "run2";
    REQUIRE(run("evaluate --cohort " + q(cohort) + " --models " + q(models) + " --seed 5 --out " +
                q(run_dir2)) == 0);
    CHECK(file_digest(run_dir / "report.json") == file_digest(run_dir2 / "report.json"));

    // report subcommand prints and re-renders plots.
    fs::remove(run_dir / "attribute_errors.pgm");
    REQUIRE(run("report --run " + q(run_dir) + " --plots") == 0);
    CHECK(fs::exists(run_dir / "attribute_errors.pgm"));
}
