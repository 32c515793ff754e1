#include "ranndy/matrixio.h"

#include <bit>
#include <charconv>
#include <fstream>
#include <limits>

#include <json.hpp>

namespace ranndy {

//------------------------------------------------------------------------------
// Enums
//------------------------------------------------------------------------------
Activation activation_from_string(const std::string& name)
{
    if (name == "tanh")
        return Activation::Tanh;
    if (name == "relu")
        return Activation::Relu;
    if (name == "gaussian")
        return Activation::Gaussian;
    throw ConfigError("unknown activation '" + name + "' (expected tanh, relu or gaussian)");
}

std::string to_string(Activation activation)
{
    switch (activation) {
    case Activation::Tanh: return "tanh";
    case Activation::Relu: return "relu";
    case Activation::Gaussian: return "gaussian";
    }
    return "?";
}

SolverMode mode_from_string(const std::string& name)
{
    if (name == "self_adjoint")
        return SolverMode::SelfAdjoint;
    if (name == "non_self_adjoint")
        return SolverMode::NonSelfAdjoint;
    throw ConfigError("unknown mode '" + name + "' (expected self_adjoint or non_self_adjoint)");
}

std::string to_string(SolverMode mode)
{
    return mode == SolverMode::SelfAdjoint ? "self_adjoint" : "non_self_adjoint";
}

//------------------------------------------------------------------------------
// Validation
//------------------------------------------------------------------------------
void validate(const SnapshotData& data)
{
    if (data.X.rows() != data.Y.rows() || data.X.cols() != data.Y.cols())
        throw ConfigError("snapshot matrices X and Y must have identical shape");
    if (data.X.cols() < 2)
        throw ConfigError("snapshot data needs at least m = 2 column pairs");
    if (!data.X.allFinite() || !data.Y.allFinite())
        throw NumericError("snapshot data contains non-finite entries");
    if (!(data.lag > 0.0))
        throw ConfigError("lag time must be positive");
}

void validate(const RunConfig& config)
{
    if (config.layer_sizes.empty())
        throw ConfigError("layer_sizes must not be empty");
    for (int size : config.layer_sizes)
        if (size < 1)
            throw ConfigError("layer_sizes entries must be positive");

    const std::size_t expected = (config.activation == Activation::Gaussian ? 1u : 0u) + 2u;
    if (config.omega_init.size() != expected)
        throw ConfigError("omega_init needs " + std::to_string(expected) + " entries for activation '"
                          + to_string(config.activation) + "' (activation params, weight scale, bias scale)");
    for (double v : config.omega_init)
        if (!(v > 0.0) || !std::isfinite(v))
            throw ConfigError("omega_init entries must be strictly positive");

    if (!(config.learning_rate > 0.0))
        throw ConfigError("learning_rate must be positive");
    if (config.max_epochs < 1)
        throw ConfigError("max_epochs: at least one epoch required");
    if (!(config.rel_loss_tol > 0.0))
        throw ConfigError("rel_loss_tol must be positive");
    if (!(config.pinv_rel_tol > 0.0))
        throw ConfigError("pinv_rel_tol must be positive");
    if (config.n_outputs < 1)
        throw ConfigError("n_outputs must be positive");
    if (config.n_outputs > config.layer_sizes.back())
        throw ConfigError("n_outputs exceeds the dictionary size (last layer has "
                          + std::to_string(config.layer_sizes.back()) + " neurons)");
    if (config.trace_top_n < 0 || config.trace_top_n > config.layer_sizes.back())
        throw ConfigError("trace_top_n must lie in [0, last layer size]");
}

//------------------------------------------------------------------------------
// Run configuration (flat JSON)
//------------------------------------------------------------------------------
RunConfig parse_run_config(const std::string& json_text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object())
        throw ConfigError("config must be a flat JSON object");

    RunConfig config;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "seed")
                config.seed = value.get<std::uint64_t>();
            else if (key == "layer_sizes")
                config.layer_sizes = value.get<std::vector<int>>();
            else if (key == "activation")
                config.activation = activation_from_string(value.get<std::string>());
            else if (key == "omega_init")
                config.omega_init = value.get<std::vector<double>>();
            else if (key == "learning_rate")
                config.learning_rate = value.get<double>();
            else if (key == "max_epochs")
                config.max_epochs = value.get<int>();
            else if (key == "rel_loss_tol")
                config.rel_loss_tol = value.get<double>();
            else if (key == "pinv_rel_tol")
                config.pinv_rel_tol = value.get<double>();
            else if (key == "n_outputs")
                config.n_outputs = value.get<int>();
            else if (key == "mode")
                config.mode = mode_from_string(value.get<std::string>());
            else if (key == "trace_top_n")
                config.trace_top_n = value.get<int>();
            else
                throw ConfigError("unknown config key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config field has the wrong type: ") + e.what());
    }
    validate(config);
    return config;
}

RunConfig load_run_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config file: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_run_config(text);
}

std::string run_config_to_json(const RunConfig& config)
{
    nlohmann::json j;
    j["seed"] = config.seed;
    j["layer_sizes"] = config.layer_sizes;
    j["activation"] = to_string(config.activation);
    j["omega_init"] = config.omega_init;
    j["learning_rate"] = config.learning_rate;
    j["max_epochs"] = config.max_epochs;
    j["rel_loss_tol"] = config.rel_loss_tol;
    j["pinv_rel_tol"] = config.pinv_rel_tol;
    j["n_outputs"] = config.n_outputs;
    j["mode"] = to_string(config.mode);
    j["trace_top_n"] = config.trace_top_n;
    return j.dump(2);
}

//------------------------------------------------------------------------------
// Binary matrix format
//------------------------------------------------------------------------------
namespace {

constexpr char matrix_magic[4] = {'R', 'N', 'D', 'Y'};

void append_u64(std::string& out, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t parse_u64(const char* p)
{
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    return v;
}

} // namespace

void write_matrix(const Eigen::MatrixXd& M, const std::filesystem::path& path)
{
    const auto rows = static_cast<std::uint64_t>(M.rows());
    const auto cols = static_cast<std::uint64_t>(M.cols());

    std::string buf;
    buf.reserve(20 + 8 * M.size());
    buf.append(matrix_magic, 4);
    append_u64(buf, rows);
    append_u64(buf, cols);
    for (Eigen::Index r = 0; r < M.rows(); ++r)
        for (Eigen::Index c = 0; c < M.cols(); ++c)
            append_u64(buf, std::bit_cast<std::uint64_t>(M(r, c)));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open matrix file for writing: " + path.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out)
        throw IoError("write failed for matrix file: " + path.string());
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open matrix file: " + path.string());
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (buf.size() < 20 || std::string_view(buf.data(), 4) != std::string_view(matrix_magic, 4))
        throw IoError("not a RNDY matrix file: " + path.string());

    const std::uint64_t rows = parse_u64(buf.data() + 4);
    const std::uint64_t cols = parse_u64(buf.data() + 12);
    if (rows > 0 && cols > std::numeric_limits<std::uint64_t>::max() / 8 / rows)
        throw IoError("matrix dimensions overflow in: " + path.string());
    const std::uint64_t payload = rows * cols * 8;
    if (buf.size() != 20 + payload)
        throw IoError("truncated matrix file (expected " + std::to_string(20 + payload)
                      + " bytes, got " + std::to_string(buf.size()) + "): " + path.string());

    Eigen::MatrixXd M(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    const char* p = buf.data() + 20;
    for (Eigen::Index r = 0; r < M.rows(); ++r)
        for (Eigen::Index c = 0; c < M.cols(); ++c, p += 8)
            M(r, c) = std::bit_cast<double>(parse_u64(p));
    return M;
}

//------------------------------------------------------------------------------
// CSV export
//------------------------------------------------------------------------------
std::string format_double(double value)
{
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

void export_csv(const Eigen::MatrixXd& M, const std::filesystem::path& path)
{
    std::string buf;
    buf.reserve(static_cast<std::size_t>(M.size()) * 12 + 16);
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        for (Eigen::Index c = 0; c < M.cols(); ++c) {
            if (c > 0)
                buf.push_back(',');
            buf += format_double(M(r, c));
        }
        buf.push_back('\n');
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open CSV file for writing: " + path.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out)
        throw IoError("write failed for CSV file: " + path.string());
}

} // namespace ranndy
