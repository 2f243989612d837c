#include "scsc/run_config.hpp"

#include <charconv>
#include <fstream>

#include "scsc/error.hpp"

namespace scsc::io {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

template <class T>
T parse_value(const std::string& key, const std::string& text) {
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    std::from_chars_result res;
    if constexpr (std::is_floating_point_v<T>) {
        res = std::from_chars(first, last, value);
    } else {
        res = std::from_chars(first, last, value, 10);
    }
    if (res.ec != std::errc{} || res.ptr != last) {
        throw ConfigError("run config: invalid value '" + text + "' for key '" + key + "'");
    }
    return value;
}

} // namespace

net::ModelConfig RunConfig::model_config() const {
    net::ModelConfig c;
    c.pan_bands = pan_bands;
    c.ms_bands = ms_bands;
    c.filters = filters;
    c.kernel_size = kernel_size;
    c.blocks = blocks;
    return c;
}

void RunConfig::validate() const {
    model_config().validate();
    if (ratio < 1 || epochs < 1 || batch < 1 || rounds < 1) {
        throw ConfigError("run config: ratio, epochs, batch and rounds must be >= 1");
    }
    if (!(lr >= 0.0) || !(lambda >= 0.0)) {
        throw ConfigError("run config: lr and lambda must be >= 0");
    }
}

RunConfig RunConfig::parse(std::istream& in) {
    RunConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("run config: line " + std::to_string(lineno) +
                              " is not key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "k") {
            cfg.filters = parse_value<std::size_t>(key, value);
        } else if (key == "s") {
            cfg.kernel_size = parse_value<std::size_t>(key, value);
        } else if (key == "T") {
            cfg.blocks = parse_value<std::size_t>(key, value);
        } else if (key == "b") {
            cfg.pan_bands = parse_value<std::size_t>(key, value);
        } else if (key == "B") {
            cfg.ms_bands = parse_value<std::size_t>(key, value);
        } else if (key == "ratio") {
            cfg.ratio = parse_value<int>(key, value);
        } else if (key == "epochs") {
            cfg.epochs = parse_value<int>(key, value);
        } else if (key == "lr") {
            cfg.lr = parse_value<double>(key, value);
        } else if (key == "batch") {
            cfg.batch = parse_value<int>(key, value);
        } else if (key == "seed") {
            cfg.seed = parse_value<std::uint64_t>(key, value);
        } else if (key == "sigma") {
            cfg.sigma = parse_value<double>(key, value);
        } else if (key == "lambda") {
            cfg.lambda = parse_value<double>(key, value);
        } else if (key == "rounds") {
            cfg.rounds = parse_value<int>(key, value);
        } else {
            throw ConfigError("run config: unknown key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open run config '" + path + "'");
    return parse(in);
}

} // namespace scsc::io
