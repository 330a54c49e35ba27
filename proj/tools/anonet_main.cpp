// Batch front-end: dataset preparation, training runs, lambda sweeps,
// attacker evaluation, bound validation. Emits CSV/JSON for external
// plotting.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "anonet/checkpoint.hpp"
#include "anonet/dataset.hpp"
#include "anonet/errors.hpp"
#include "anonet/infotheory.hpp"
#include "anonet/pendigits.hpp"
#include "anonet/synth.hpp"
#include "anonet/trainer.hpp"

namespace fs = std::filesystem;
using namespace anonet;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;
constexpr int kExitPartialSweep = 5;

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

fs::path resolve_out(const std::string& out, const std::string& fallback_name) {
    if (!out.empty()) return fs::path(out);
    const char* root = std::getenv("ANONET_OUTPUT_ROOT");
    return fs::path(root ? root : ".") / fallback_name;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw InputError("cannot open for writing: " + path.string());
    f << text;
    if (!f) throw InputError("write failed: " + path.string());
}

struct ManifestBuilder {
    nlohmann::ordered_json j;

    ManifestBuilder(const std::string& command, std::uint64_t seed) {
        j["command"] = command;
        j["seed"] = seed;
        j["started"] = iso_timestamp();
        j["inputs"] = nlohmann::ordered_json::object();
        j["outputs"] = nlohmann::ordered_json::array();
    }
    void input(const std::string& name, const fs::path& path) {
        j["inputs"][name] = {{"path", path.string()}, {"hash", data::file_hash(path.string())}};
    }
    void config(const nlohmann::ordered_json& cfg) { j["config"] = cfg; }
    void output(const fs::path& path) { j["outputs"].push_back(path.string()); }
    void write(const fs::path& dir) {
        j["finished"] = iso_timestamp();
        write_text(dir / "manifest.json", j.dump(2) + "\n");
    }
};

struct DataDir {
    data::Dataset train, val, test;
    std::string hash;  // combined hash of the three canonical files
};

DataDir load_data_dir(const fs::path& dir) {
    DataDir d;
    const auto train_p = dir / "train.txt", val_p = dir / "val.txt", test_p = dir / "test.txt";
    d.train = data::load_dataset(train_p.string());
    d.val = data::load_dataset(val_p.string());
    d.test = data::load_dataset(test_p.string());
    d.hash = data::file_hash(train_p.string()) + "-" + data::file_hash(val_p.string()) + "-" +
             data::file_hash(test_p.string());
    return d;
}

data::SynthSpec synth_spec_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("synth spec: invalid JSON: ") + e.what());
    }
    data::SynthSpec s;
    s.y_alphabet = j.value("y_alphabet", s.y_alphabet);
    s.z_alphabet = j.value("z_alphabet", s.z_alphabet);
    s.dim = j.value("dim", s.dim);
    s.samples_per_pair = j.value("samples_per_pair", s.samples_per_pair);
    s.y_strength = j.value("y_strength", s.y_strength);
    s.z_strength = j.value("z_strength", s.z_strength);
    s.entanglement_deg = j.value("entanglement_deg", s.entanglement_deg);
    s.noise = j.value("noise", s.noise);
    s.seed = j.value("seed", s.seed);
    return s;
}

std::string read_file(const fs::path& path) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

train::TrainConfig load_config(const std::string& path, const std::string& preset) {
    train::TrainConfig cfg =
        preset == "paper" ? train::TrainConfig::paper_preset() : train::TrainConfig{};
    if (!path.empty()) cfg = train::TrainConfig::from_json(read_file(path));
    return cfg;
}

struct CliOverrides {
    std::optional<double> lambda;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> schedule;

    void apply(train::TrainConfig& cfg) const {
        if (lambda) cfg.lambda = *lambda;
        if (seed) cfg.seed = *seed;
        if (schedule) cfg.schedule = train::schedule_from_string(*schedule);
        cfg.validate();
    }
};

// ---------------------------------------------------------------- prep ----

struct PrepArgs {
    std::string mode = "surrogate";  // unipen | surrogate | synth
    std::string input;
    std::string synth_spec;
    std::string out;
    std::size_t samples_per_writer = 0;
    std::size_t writers = 30;
    std::size_t samples_per_pair = 25;
    double style_strength = 1.0;
    double jitter = 0.01;
    std::vector<std::size_t> sizes{5494, 1000, 1000};
    std::uint64_t seed = 1;
};

int cmd_prep(const PrepArgs& args) {
    const fs::path out_dir = resolve_out(args.out, "prep");
    fs::create_directories(out_dir);
    ManifestBuilder manifest("prep", args.seed);

    data::Dataset pool;
    nlohmann::ordered_json cfg;
    cfg["mode"] = args.mode;
    cfg["sizes"] = args.sizes;
    if (args.mode == "unipen") {
        if (args.input.empty()) throw ConfigError("prep: --input required for unipen mode");
        manifest.input("trajectories", args.input);
        auto trajectories = data::load_unipen(args.input, args.samples_per_writer);
        std::size_t writers = 0;
        for (const auto& t : trajectories) writers = std::max(writers, t.writer + 1);
        pool = data::preprocess_all(trajectories, writers);
        cfg["samples_per_writer"] = args.samples_per_writer;
        std::cout << "parsed " << trajectories.size() << " trajectories from " << writers
                  << " writers\n";
    } else if (args.mode == "surrogate") {
        data::SurrogateSpec spec;
        spec.writers = args.writers;
        spec.samples_per_pair = args.samples_per_pair;
        spec.style_strength = args.style_strength;
        spec.jitter = args.jitter;
        spec.seed = args.seed;
        pool = data::preprocess_all(data::surrogate_pendigits(spec), spec.writers);
        cfg["writers"] = spec.writers;
        cfg["samples_per_pair"] = spec.samples_per_pair;
        cfg["style_strength"] = spec.style_strength;
        cfg["jitter"] = spec.jitter;
    } else if (args.mode == "synth") {
        if (args.synth_spec.empty()) throw ConfigError("prep: --spec required for synth mode");
        manifest.input("synth_spec", args.synth_spec);
        auto spec = synth_spec_from_json(read_file(args.synth_spec));
        pool = data::synth_generate(spec);
        cfg["synth_spec"] = nlohmann::ordered_json::parse(read_file(args.synth_spec));
    } else {
        throw ConfigError("prep: unknown mode " + args.mode);
    }
    if (args.sizes.size() != 3) throw ConfigError("prep: --sizes needs train,val,test");

    data::SplitSizes sizes{args.sizes[0], args.sizes[1], args.sizes[2]};
    if (sizes.train + sizes.val + sizes.test > pool.size()) {
        // Scale the requested shape down to the pool, keeping proportions.
        const double f = static_cast<double>(pool.size()) /
                         static_cast<double>(sizes.train + sizes.val + sizes.test);
        sizes.val = static_cast<std::size_t>(static_cast<double>(sizes.val) * f);
        sizes.test = static_cast<std::size_t>(static_cast<double>(sizes.test) * f);
        sizes.train = pool.size() - sizes.val - sizes.test;
        std::cout << "pool smaller than requested; using " << sizes.train << "/" << sizes.val
                  << "/" << sizes.test << "\n";
    }
    auto split = data::split(pool, sizes, args.seed);
    for (const auto& w : split.warnings) std::cerr << "warning: " << w << "\n";

    data::save_dataset(split.train, (out_dir / "train.txt").string());
    data::save_dataset(split.val, (out_dir / "val.txt").string());
    data::save_dataset(split.test, (out_dir / "test.txt").string());
    manifest.output(out_dir / "train.txt");
    manifest.output(out_dir / "val.txt");
    manifest.output(out_dir / "test.txt");
    manifest.config(cfg);
    manifest.write(out_dir);
    std::cout << "wrote " << split.train.size() << "/" << split.val.size() << "/"
              << split.test.size() << " samples to " << out_dir.string() << "\n";
    return kExitOk;
}

// --------------------------------------------------------------- train ----

int cmd_train(const std::string& config_path, const std::string& preset,
              const CliOverrides& overrides, const std::string& data_dir, const std::string& out,
              const std::string& resume) {
    const fs::path out_dir = resolve_out(out, "train");
    fs::create_directories(out_dir);

    // Config schema violations surface before any data work starts.
    train::TrainConfig cfg = load_config(config_path, preset);
    overrides.apply(cfg);
    auto data = load_data_dir(data_dir);

    std::optional<train::Trainer> trainer;
    if (!resume.empty()) {
        auto state = train::load_checkpoint(resume);
        trainer.emplace(std::move(state), data.train, data.val);
    } else {
        trainer.emplace(cfg, data.train, data.val);
    }

    ManifestBuilder manifest("train", trainer->state().config.seed);
    manifest.input("train", fs::path(data_dir) / "train.txt");
    manifest.input("val", fs::path(data_dir) / "val.txt");
    manifest.input("test", fs::path(data_dir) / "test.txt");
    manifest.config(nlohmann::ordered_json::parse(trainer->state().config.to_json()));

    const fs::path ckpt_path = out_dir / "checkpoint.bin";
    try {
        trainer->run_all();
    } catch (const NumericError& e) {
        // Divergence: persist the rolled-back last-good state.
        train::save_checkpoint(trainer->state(), ckpt_path.string());
        std::cerr << "numeric failure: " << e.what() << "\n"
                  << "last-good checkpoint: " << ckpt_path.string() << "\n";
        return kExitNumeric;
    }

    train::save_checkpoint(trainer->state(), ckpt_path.string());
    auto report = train::evaluate_trinet(trainer->net(), data.test, data.train.p_hat_z());
    write_text(out_dir / "report.json", report.to_json() + "\n");
    write_text(out_dir / "report.csv",
               eval::EvalReport::csv_header() + "\n" + report.to_csv_row() + "\n");

    manifest.output(ckpt_path);
    manifest.output(out_dir / "report.json");
    manifest.output(out_dir / "report.csv");
    manifest.write(out_dir);
    std::cout << "regular test accuracy " << report.regular.accuracy
              << ", private branch accuracy " << report.private_branch.accuracy << "\n"
              << "checkpoint: " << ckpt_path.string() << "\n";
    return kExitOk;
}

// --------------------------------------------------------------- sweep ----

int cmd_sweep(const std::string& config_path, const std::string& preset,
              const CliOverrides& overrides, const std::string& data_dir,
              std::vector<double> lambdas, const std::string& out, bool resume) {
    const fs::path out_dir = resolve_out(out, "sweep");
    fs::create_directories(out_dir);

    // The sweep config may carry the grid under "lambdas".
    train::TrainConfig cfg = preset == "paper" ? train::TrainConfig::paper_preset()
                                               : train::TrainConfig{};
    if (!config_path.empty()) {
        auto j = nlohmann::json::parse(read_file(config_path));
        if (j.contains("lambdas")) {
            if (lambdas.empty()) lambdas = j["lambdas"].get<std::vector<double>>();
            j.erase("lambdas");
        }
        cfg = train::TrainConfig::from_json(j.dump());
    }
    overrides.apply(cfg);
    if (lambdas.empty()) throw ConfigError("sweep: no lambda grid given");

    auto data = load_data_dir(data_dir);

    const fs::path jsonl_path = out_dir / "records.jsonl";
    const fs::path csv_path = out_dir / "records.csv";

    // Resume: skip lambdas already recorded without error.
    std::vector<double> done;
    if (resume && fs::exists(jsonl_path)) {
        std::ifstream in(jsonl_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto r = train::SweepRecord::from_json_line(line);
            if (r.error.empty()) done.push_back(r.lambda);
        }
    }
    const bool fresh = !resume || !fs::exists(csv_path);
    std::ofstream csv(csv_path, fresh ? std::ios::trunc : std::ios::app);
    std::ofstream jsonl(jsonl_path, fresh ? std::ios::trunc : std::ios::app);
    if (fresh) csv << train::SweepRecord::csv_header() << "\n";

    ManifestBuilder manifest("sweep", cfg.seed);
    manifest.input("train", fs::path(data_dir) / "train.txt");
    manifest.input("val", fs::path(data_dir) / "val.txt");
    manifest.input("test", fs::path(data_dir) / "test.txt");
    auto cfg_json = nlohmann::ordered_json::parse(cfg.to_json());
    cfg_json["lambdas"] = lambdas;
    manifest.config(cfg_json);

    auto result = train::lambda_sweep(
        data.train, data.val, data.test, cfg, lambdas, data.hash,
        [&](const train::SweepRecord& r) {
            csv << r.to_csv_row() << "\n" << std::flush;
            jsonl << r.to_json_line() << "\n" << std::flush;
            if (r.error.empty())
                std::cout << "lambda " << r.lambda << ": regular " << r.regular_acc_test
                          << ", attacker " << r.private_attacker_acc_test << ", bound "
                          << r.bound_lower_attacker << " (" << r.wall_time_s << " s)\n";
            else
                std::cerr << "lambda " << r.lambda << " failed: " << r.error << "\n";
        },
        [&](double lambda) {
            for (double d : done)
                if (d == lambda) {
                    std::cout << "lambda " << lambda << ": already recorded, skipping\n";
                    return true;
                }
            return false;
        });

    manifest.output(csv_path);
    manifest.output(jsonl_path);
    manifest.write(out_dir);
    return result.any_failed ? kExitPartialSweep : kExitOk;
}

// -------------------------------------------------------------- attack ----

int cmd_attack(const std::string& checkpoint_path, const std::string& data_dir,
               const std::string& out) {
    const fs::path out_dir = resolve_out(out, "attack");
    fs::create_directories(out_dir);

    auto state = train::load_checkpoint(checkpoint_path);
    auto data = load_data_dir(data_dir);

    ManifestBuilder manifest("attack", state.config.seed);
    manifest.input("checkpoint", checkpoint_path);
    manifest.input("train", fs::path(data_dir) / "train.txt");
    manifest.input("val", fs::path(data_dir) / "val.txt");
    manifest.input("test", fs::path(data_dir) / "test.txt");
    manifest.config(nlohmann::ordered_json::parse(state.config.to_json()));

    const Matrix repr_train = nn::evaluate(state.net.encoder, data.train.all_features());
    const Matrix repr_val = nn::evaluate(state.net.encoder, data.val.all_features());
    const Matrix repr_test = nn::evaluate(state.net.encoder, data.test.all_features());
    auto attacker = train::train_attacker(repr_train, data.train.all_z(), repr_val,
                                          data.val.all_z(), repr_test, data.test.all_z(),
                                          data.train.z_alphabet, state.config);

    auto report = train::evaluate_trinet(state.net, data.test, data.train.p_hat_z(),
                                         &attacker.test_predictions);
    write_text(out_dir / "attack_report.json", report.to_json() + "\n");
    manifest.output(out_dir / "attack_report.json");
    manifest.write(out_dir);
    std::cout << "attacker test accuracy " << attacker.test_accuracy << " (cross-entropy "
              << attacker.test_cross_entropy << " nats)\n"
              << "estimated attack-error floor "
              << info::private_error_lower_bound(attacker.test_cross_entropy,
                                                 data.train.z_alphabet)
              << "\n";
    return kExitOk;
}

// -------------------------------------------------------------- bounds ----

int cmd_bounds(std::size_t models, std::uint64_t seed, const std::string& out) {
    bool all_ok = true;
    nlohmann::ordered_json results = nlohmann::ordered_json::array();

    auto record = [&](const std::string& name, bool ok, const std::string& detail) {
        std::cout << (ok ? "[pass] " : "[FAIL] ") << name << ": " << detail << "\n";
        results.push_back({{"check", name}, {"ok", ok}, {"detail", detail}});
        all_ok = all_ok && ok;
    };

    // Distortion-rate lower bound on random discrete models.
    RngStream rng(seed);
    std::size_t violations = 0;
    double worst_margin = 1e9;
    for (std::size_t rep = 0; rep < models; ++rep) {
        const std::size_t nz = 2 + rng.index(5);
        const std::size_t nu = 2 + rng.index(5);
        auto model = info::random_model(nz, nu, rng);
        auto report = info::lemma1_check(model);
        worst_margin = std::min(worst_margin, report.misclassification - report.bound);
        if (!report.holds) ++violations;
    }
    {
        std::ostringstream os;
        os << models << " random models, " << violations << " violations, worst margin "
           << worst_margin;
        record("distortion-rate-lower-bound", violations == 0, os.str());
    }

    // g / g-inverse roundtrip and clamps.
    {
        double worst = 0.0;
        for (std::size_t z : {2ul, 10ul, 30ul}) {
            const double log_z = std::log(static_cast<double>(z));
            for (int k = 1; k < 1000; ++k) {
                const double t = log_z * static_cast<double>(k) / 1000.0;
                worst = std::max(worst, std::abs(info::g(info::g_inverse(t, z), z) - t));
            }
        }
        const bool clamps = info::g_inverse(-1.0, 30) == 0.0 &&
                            info::g_inverse(100.0, 30) == 1.0 - 1.0 / 30.0;
        std::ostringstream os;
        os << "worst roundtrip error " << worst << ", argument clamps "
           << (clamps ? "ok" : "broken");
        record("g-inverse-roundtrip", worst < 1e-8 && clamps, os.str());
    }

    // Blahut-Arimoto against the closed-form binary Hamming curve.
    {
        std::vector<double> p{0.5, 0.5};
        Matrix d(2, 2);
        d(0, 1) = 1.0;
        d(1, 0) = 1.0;
        const double target_d = 0.11;
        auto point = info::blahut_arimoto(p, d, std::log((1.0 - target_d) / target_d));
        auto h = [](double x) { return -x * std::log(x) - (1.0 - x) * std::log(1.0 - x); };
        const double analytic = std::log(2.0) - h(target_d);
        const double err = std::abs(point.rate - analytic) + std::abs(point.distortion - target_d);
        std::ostringstream os;
        os << "rate error " << std::abs(point.rate - analytic) << " at D=0.11";
        record("blahut-arimoto-binary-hamming", err < 1e-4, os.str());
    }

    // Exponential upper bound (Jensen) on random prediction sets.
    {
        RngStream jrng(seed + 1);
        bool ok = true;
        for (int rep = 0; rep < 1000 && ok; ++rep) {
            const std::size_t n = 1 + jrng.index(30);
            const std::size_t k = 2 + jrng.index(8);
            double soft_correct = 0.0, ce = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                std::vector<double> row(k);
                double sum = 0.0;
                for (auto& v : row) {
                    v = -std::log(jrng.uniform01() + 1e-300);
                    sum += v;
                }
                const std::size_t label = jrng.index(k);
                soft_correct += row[label] / sum;
                ce += -std::log(row[label] / sum);
            }
            soft_correct /= static_cast<double>(n);
            ce /= static_cast<double>(n);
            ok = (1.0 - soft_correct) <= info::misclassification_upper_bound(ce) + 1e-9;
        }
        record("exponential-upper-bound", ok, "1000 random prediction/label sets");
    }

    if (!out.empty()) {
        write_text(out, results.dump(2) + "\n");
        std::cout << "wrote " << out << "\n";
    }
    return all_ok ? kExitOk : kExitNumeric;
}

// -------------------------------------------------------------- report ----

int cmd_report(const std::string& checkpoint_path, const std::string& data_dir,
               const std::string& out) {
    const fs::path out_dir = resolve_out(out, "report");
    fs::create_directories(out_dir);

    auto state = train::load_checkpoint(checkpoint_path);
    auto data = load_data_dir(data_dir);
    auto report = train::evaluate_trinet(state.net, data.test, data.train.p_hat_z());

    ManifestBuilder manifest("report", state.config.seed);
    manifest.input("checkpoint", checkpoint_path);
    manifest.input("test", fs::path(data_dir) / "test.txt");
    manifest.config(nlohmann::ordered_json::parse(state.config.to_json()));
    write_text(out_dir / "report.json", report.to_json() + "\n");
    write_text(out_dir / "report.csv",
               eval::EvalReport::csv_header() + "\n" + report.to_csv_row() + "\n");
    manifest.output(out_dir / "report.json");
    manifest.output(out_dir / "report.csv");
    manifest.write(out_dir);
    std::cout << report.to_json() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adversarially anonymized representations: training and bound validation"};
    app.require_subcommand(1);

    PrepArgs prep;
    auto* prep_cmd = app.add_subcommand("prep", "build canonical train/val/test files");
    prep_cmd->add_option("--mode", prep.mode, "unipen | surrogate | synth");
    prep_cmd->add_option("--input", prep.input, "trajectory file (unipen mode)");
    prep_cmd->add_option("--spec", prep.synth_spec, "synth spec JSON (synth mode)");
    prep_cmd->add_option("--samples-per-writer", prep.samples_per_writer,
                         "group unmarked segments into writers of this size");
    prep_cmd->add_option("--writers", prep.writers, "surrogate writer count");
    prep_cmd->add_option("--samples-per-pair", prep.samples_per_pair,
                         "surrogate samples per (digit, writer)");
    prep_cmd->add_option("--style-strength", prep.style_strength, "surrogate writer style scale");
    prep_cmd->add_option("--jitter", prep.jitter, "surrogate per-sample jitter");
    prep_cmd->add_option("--sizes", prep.sizes, "train,val,test sizes")->delimiter(',');
    prep_cmd->add_option("--seed", prep.seed, "split/generation seed");
    prep_cmd->add_option("--out", prep.out, "output directory");

    std::string config_path, preset, data_dir, out, resume_ckpt, checkpoint_path;
    bool print_config = false, resume_sweep = false;
    CliOverrides overrides;
    std::vector<double> lambdas;
    std::size_t bound_models = 100;
    std::uint64_t bound_seed = 1;

    auto add_config_options = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "config JSON file");
        cmd->add_option("--preset", preset, "named preset: paper")
            ->check(CLI::IsMember({"", "paper"}));
        cmd->add_flag("--print-config", print_config, "print the effective config and exit");
        cmd->add_option("--lambda",
                        [&overrides](const std::vector<std::string>& v) {
                            overrides.lambda = std::stod(v[0]);
                            return true;
                        },
                        "override lambda");
        cmd->add_option("--seed",
                        [&overrides](const std::vector<std::string>& v) {
                            overrides.seed = std::stoull(v[0]);
                            return true;
                        },
                        "override seed");
        cmd->add_option("--schedule",
                        [&overrides](const std::vector<std::string>& v) {
                            overrides.schedule = v[0];
                            return true;
                        },
                        "override schedule: toggle | simultaneous");
    };

    auto* train_cmd = app.add_subcommand("train", "run the three-phase training procedure");
    add_config_options(train_cmd);
    train_cmd->add_option("--data", data_dir, "directory with train/val/test.txt");
    train_cmd->add_option("--out", out, "output directory");
    train_cmd->add_option("--resume", resume_ckpt, "checkpoint to continue from");

    auto* sweep_cmd = app.add_subcommand("sweep", "train across a lambda grid");
    add_config_options(sweep_cmd);
    sweep_cmd->add_option("--data", data_dir, "directory with train/val/test.txt");
    sweep_cmd->add_option("--lambdas", lambdas, "lambda grid")->delimiter(',');
    sweep_cmd->add_option("--out", out, "output directory");
    sweep_cmd->add_flag("--resume", resume_sweep, "skip lambdas already recorded");

    auto* attack_cmd =
        app.add_subcommand("attack", "retrain a dedicated attacker on a frozen encoder");
    attack_cmd->add_option("--checkpoint", checkpoint_path, "trained checkpoint")->required();
    attack_cmd->add_option("--data", data_dir, "directory with train/val/test.txt")->required();
    attack_cmd->add_option("--out", out, "output directory");

    auto* bounds_cmd = app.add_subcommand("bounds", "run the bound validation suites");
    bounds_cmd->add_option("--models", bound_models, "number of random discrete models");
    bounds_cmd->add_option("--seed", bound_seed, "model generator seed");
    bounds_cmd->add_option("--out", out, "JSON results file");

    auto* report_cmd = app.add_subcommand("report", "evaluate a checkpoint on the test split");
    report_cmd->add_option("--checkpoint", checkpoint_path, "trained checkpoint")->required();
    report_cmd->add_option("--data", data_dir, "directory with train/val/test.txt")->required();
    report_cmd->add_option("--out", out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (print_config) {
            train::TrainConfig cfg = load_config(config_path, preset);
            overrides.apply(cfg);
            std::cout << cfg.to_json() << "\n";
            return kExitOk;
        }
        if (prep_cmd->parsed()) return cmd_prep(prep);
        if (train_cmd->parsed()) {
            if (data_dir.empty()) throw ConfigError("train: --data is required");
            return cmd_train(config_path, preset, overrides, data_dir, out, resume_ckpt);
        }
        if (sweep_cmd->parsed()) {
            if (data_dir.empty()) throw ConfigError("sweep: --data is required");
            return cmd_sweep(config_path, preset, overrides, data_dir, lambdas, out, resume_sweep);
        }
        if (attack_cmd->parsed()) return cmd_attack(checkpoint_path, data_dir, out);
        if (bounds_cmd->parsed()) return cmd_bounds(bound_models, bound_seed, out);
        if (report_cmd->parsed()) return cmd_report(checkpoint_path, data_dir, out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitData;
    } catch (const InputError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
