#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "anonet/dataset.hpp"
#include "anonet/trainer.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli() {
    const char* path = std::getenv("ANONET_CLI");
    REQUIRE_MESSAGE(path != nullptr, "ANONET_CLI must point at the built binary");
    return path;
}

int run(const std::string& args) {
    const std::string cmd = cli() + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::path("/tmp") / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& rest) const { return (path / rest).string(); }
};

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    f << text;
}

const char* kTinyConfig = R"({
  "lambda": 0.0,
  "encoder_widths": [16, 8],
  "branch_widths": [8],
  "batch_size": 32,
  "pretrain_regular_epochs": 8,
  "pretrain_private_epochs": 5,
  "adversarial_blocks": 2,
  "attacker_epochs": 5,
  "dropout": 0.05,
  "seed": 3
})";

const char* kTinySynthSpec = R"({
  "y_alphabet": 3, "z_alphabet": 4, "dim": 12,
  "samples_per_pair": 40, "noise": 0.2, "seed": 5
})";

}  // namespace

TEST_CASE("prep is deterministic and writes a manifest") {
    TempDir dir("anonet_cli_prep");
    write_file(dir / "spec.json", kTinySynthSpec);
    const std::string base = "prep --mode synth --spec " + (dir / "spec.json") +
                             " --sizes 300,90,90 --seed 4 --out ";
    REQUIRE(run(base + (dir / "a")) == 0);
    REQUIRE(run(base + (dir / "b")) == 0);
    for (const char* f : {"train.txt", "val.txt", "test.txt"}) {
        CHECK(anonet::data::file_hash(dir / ("a/" + std::string(f))) ==
              anonet::data::file_hash(dir / ("b/" + std::string(f))));
    }
    CHECK(fs::exists(dir / "a/manifest.json"));
}

TEST_CASE("surrogate prep fills the requested split sizes") {
    TempDir dir("anonet_cli_surrogate");
    REQUIRE(run("prep --mode surrogate --writers 4 --samples-per-pair 6 --sizes 160,40,40 "
                "--seed 2 --out " +
                (dir / "d")) == 0);
    auto train = anonet::data::load_dataset(dir / "d/train.txt");
    CHECK(train.size() == 160);
    CHECK(train.feature_dim == 400);
    CHECK(train.z_alphabet == 4);
}

TEST_CASE("train writes byte-identical artifacts on rerun") {
    TempDir dir("anonet_cli_train");
    write_file(dir / "spec.json", kTinySynthSpec);
    write_file(dir / "cfg.json", kTinyConfig);
    REQUIRE(run("prep --mode synth --spec " + (dir / "spec.json") +
                " --sizes 300,90,90 --seed 4 --out " + (dir / "data")) == 0);

    const std::string train_cmd = "train --config " + (dir / "cfg.json") + " --data " +
                                  (dir / "data") + " --out ";
    REQUIRE(run(train_cmd + (dir / "r1")) == 0);
    REQUIRE(run(train_cmd + (dir / "r2")) == 0);
    CHECK(anonet::data::file_hash(dir / "r1/checkpoint.bin") ==
          anonet::data::file_hash(dir / "r2/checkpoint.bin"));
    CHECK(anonet::data::file_hash(dir / "r1/report.json") ==
          anonet::data::file_hash(dir / "r2/report.json"));
    CHECK(fs::exists(dir / "r1/manifest.json"));
}

TEST_CASE("attack and report run against a trained checkpoint") {
    TempDir dir("anonet_cli_attack");
    write_file(dir / "spec.json", kTinySynthSpec);
    write_file(dir / "cfg.json", kTinyConfig);
    REQUIRE(run("prep --mode synth --spec " + (dir / "spec.json") +
                " --sizes 300,90,90 --seed 4 --out " + (dir / "data")) == 0);
    REQUIRE(run("train --config " + (dir / "cfg.json") + " --data " + (dir / "data") +
                " --out " + (dir / "run")) == 0);

    CHECK(run("attack --checkpoint " + (dir / "run/checkpoint.bin") + " --data " + (dir / "data") +
              " --out " + (dir / "atk")) == 0);
    CHECK(fs::exists(dir / "atk/attack_report.json"));

    CHECK(run("report --checkpoint " + (dir / "run/checkpoint.bin") + " --data " + (dir / "data") +
              " --out " + (dir / "rep")) == 0);
    CHECK(fs::exists(dir / "rep/report.json"));
    CHECK(fs::exists(dir / "rep/report.csv"));
}

TEST_CASE("resume continues a sweep without redoing finished points") {
    TempDir dir("anonet_cli_sweep");
    write_file(dir / "spec.json", kTinySynthSpec);
    write_file(dir / "cfg.json", kTinyConfig);
    REQUIRE(run("prep --mode synth --spec " + (dir / "spec.json") +
                " --sizes 300,90,90 --seed 4 --out " + (dir / "data")) == 0);

    REQUIRE(run("sweep --config " + (dir / "cfg.json") + " --data " + (dir / "data") +
                " --lambdas 0 --out " + (dir / "sw")) == 0);
    std::size_t lines_before = 0;
    {
        std::ifstream in(dir / "sw/records.jsonl");
        std::string line;
        while (std::getline(in, line))
            if (!line.empty()) ++lines_before;
    }
    CHECK(lines_before == 1);

    REQUIRE(run("sweep --config " + (dir / "cfg.json") + " --data " + (dir / "data") +
                " --lambdas 0,0.5 --resume --out " + (dir / "sw")) == 0);
    std::vector<anonet::train::SweepRecord> records;
    {
        std::ifstream in(dir / "sw/records.jsonl");
        std::string line;
        while (std::getline(in, line))
            if (!line.empty()) records.push_back(anonet::train::SweepRecord::from_json_line(line));
    }
    REQUIRE(records.size() == 2);  // the finished lambda was skipped, not redone
    CHECK(records[0].lambda == 0.0);
    CHECK(records[1].lambda == 0.5);
}

TEST_CASE("bounds subcommand validates on a reduced model count") {
    CHECK(run("bounds --models 5 --seed 9") == 0);
}

TEST_CASE("exit codes distinguish config and data errors") {
    TempDir dir("anonet_cli_errors");
    write_file(dir / "bad.json", "{\"lambda\": -2}");
    write_file(dir / "unknown.json", "{\"lambdaz\": 1}");
    CHECK(run("train --config " + (dir / "bad.json") + " --data " + (dir / "nope")) == 2);
    CHECK(run("train --config " + (dir / "unknown.json") + " --data " + (dir / "nope")) == 2);

    write_file(dir / "cfg.json", kTinyConfig);
    CHECK(run("train --config " + (dir / "cfg.json") + " --data " + (dir / "missing")) == 3);
}

TEST_CASE("print-config emits a parseable full config") {
    const std::string out = "/tmp/anonet_cli_printcfg.json";
    const std::string cmd = cli() + " train --print-config > " + out + " 2>/dev/null";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    auto cfg = anonet::train::TrainConfig::from_json(ss.str());
    CHECK(cfg.lr_branch == 0.01);
    CHECK(cfg.encoder_widths == std::vector<std::size_t>{256, 256, 256, 256});
    fs::remove(out);
}
