#include "anonet/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>

#include "anonet/errors.hpp"

#include <json.hpp>

namespace anonet::train {

namespace {

constexpr char kMagic[] = "ANONET-CKPT v1\n";

static_assert(std::endian::native == std::endian::little,
              "checkpoint payload assumes a little-endian host");

nlohmann::ordered_json stack_spec(const nn::NetStack& stack) {
    nlohmann::ordered_json layers = nlohmann::ordered_json::array();
    for (const auto& l : stack.layers)
        layers.push_back({{"in", l.input_dim}, {"out", l.output_dim}, {"act", nn::to_string(l.activation)}});
    return layers;
}

nn::NetStack stack_from_spec(const nlohmann::json& layers) {
    nn::NetStack stack;
    for (const auto& l : layers) {
        nn::LayerSpec spec;
        spec.input_dim = l.at("in").get<std::size_t>();
        spec.output_dim = l.at("out").get<std::size_t>();
        spec.activation = nn::activation_from_string(l.at("act").get<std::string>());
        stack.layers.push_back(spec);
        nn::LayerParams p;
        p.weight = Matrix(spec.input_dim, spec.output_dim);
        p.bias = Matrix(1, spec.output_dim);
        stack.params.push_back(std::move(p));
    }
    return stack;
}

void collect(std::vector<const Matrix*>& list, const nn::NetStack& stack,
             const nn::OptimizerState& opt) {
    for (const auto& p : stack.params) {
        list.push_back(&p.weight);
        list.push_back(&p.bias);
    }
    for (const auto& v : opt.velocity) {
        list.push_back(&v.weight);
        list.push_back(&v.bias);
    }
}

void collect_mutable(std::vector<Matrix*>& list, nn::NetStack& stack, nn::OptimizerState& opt) {
    for (auto& p : stack.params) {
        list.push_back(&p.weight);
        list.push_back(&p.bias);
    }
    for (auto& v : opt.velocity) {
        list.push_back(&v.weight);
        list.push_back(&v.bias);
    }
}

}  // namespace

void save_checkpoint(const TrainerState& state, const std::string& path) {
    nlohmann::ordered_json header;
    header["format_version"] = 1;
    header["config"] = nlohmann::ordered_json::parse(state.config.to_json());
    header["phase"] = state.phase;
    header["progress"] = state.progress;
    header["has_best"] = state.has_best;
    header["best_val_loss"] =
        state.has_best && std::isfinite(state.best_val_loss) ? nlohmann::ordered_json(state.best_val_loss)
                                                             : nlohmann::ordered_json(nullptr);
    header["evals_since_best"] = state.evals_since_best;
    header["order_rng"] = state.order_rng;
    header["dropout_rng"] = state.dropout_rng;
    header["feature_dim"] = state.feature_dim;
    header["y_alphabet"] = state.y_alphabet;
    header["z_alphabet"] = state.z_alphabet;
    header["encoder"] = stack_spec(state.net.encoder);
    header["regular_branch"] = stack_spec(state.net.regular_branch);
    header["private_branch"] = stack_spec(state.net.private_branch);

    std::vector<const Matrix*> payload;
    collect(payload, state.net.encoder, state.opt_encoder);
    collect(payload, state.net.regular_branch, state.opt_regular);
    collect(payload, state.net.private_branch, state.opt_private);

    std::uint64_t doubles = 0;
    for (const Matrix* m : payload) doubles += m->size();
    header["payload_doubles"] = doubles;

    const std::string header_text = header.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("save_checkpoint: cannot open " + path);
    out.write(kMagic, sizeof(kMagic) - 1);
    const std::uint64_t header_len = header_text.size();
    out.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
    out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
    for (const Matrix* m : payload)
        out.write(reinterpret_cast<const char*>(m->data.data()),
                  static_cast<std::streamsize>(m->size() * sizeof(double)));
    if (!out) throw InputError("save_checkpoint: write failed for " + path);
}

TrainerState load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("load_checkpoint: cannot open " + path);

    char magic[sizeof(kMagic) - 1];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
        throw ParseError("load_checkpoint: bad magic", 1);

    std::uint64_t header_len = 0;
    in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
    if (!in || header_len > (1ull << 24)) throw ParseError("load_checkpoint: bad header length", 1);
    std::string header_text(header_len, '\0');
    in.read(header_text.data(), static_cast<std::streamsize>(header_len));
    if (!in) throw ParseError("load_checkpoint: truncated header", 1);

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(header_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("load_checkpoint: ") + e.what(), 1);
    }

    TrainerState state;
    state.config = TrainConfig::from_json(header.at("config").dump());
    state.phase = header.at("phase").get<std::size_t>();
    state.progress = header.at("progress").get<std::size_t>();
    state.has_best = header.at("has_best").get<bool>();
    state.best_val_loss = header.at("best_val_loss").is_null()
                              ? std::numeric_limits<double>::infinity()
                              : header.at("best_val_loss").get<double>();
    state.evals_since_best = header.at("evals_since_best").get<std::size_t>();
    state.order_rng = header.at("order_rng").get<std::string>();
    state.dropout_rng = header.at("dropout_rng").get<std::string>();
    state.feature_dim = header.at("feature_dim").get<std::size_t>();
    state.y_alphabet = header.at("y_alphabet").get<std::size_t>();
    state.z_alphabet = header.at("z_alphabet").get<std::size_t>();

    state.net.encoder = stack_from_spec(header.at("encoder"));
    state.net.regular_branch = stack_from_spec(header.at("regular_branch"));
    state.net.private_branch = stack_from_spec(header.at("private_branch"));
    state.opt_encoder = nn::OptimizerState::create(state.net.encoder, state.config.lr_encoder,
                                                   state.config.momentum);
    state.opt_regular = nn::OptimizerState::create(state.net.regular_branch, state.config.lr_branch,
                                                   state.config.momentum);
    state.opt_private = nn::OptimizerState::create(state.net.private_branch, state.config.lr_branch,
                                                   state.config.momentum);

    std::vector<Matrix*> payload;
    collect_mutable(payload, state.net.encoder, state.opt_encoder);
    collect_mutable(payload, state.net.regular_branch, state.opt_regular);
    collect_mutable(payload, state.net.private_branch, state.opt_private);

    std::uint64_t doubles = 0;
    for (Matrix* m : payload) doubles += m->size();
    if (doubles != header.at("payload_doubles").get<std::uint64_t>())
        throw ParseError("load_checkpoint: payload size mismatch", 1);

    for (Matrix* m : payload) {
        in.read(reinterpret_cast<char*>(m->data.data()),
                static_cast<std::streamsize>(m->size() * sizeof(double)));
        if (!in) throw ParseError("load_checkpoint: truncated payload", 1);
    }
    state.net.validate();
    return state;
}

}  // namespace anonet::train
