#include "eqf/sim/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <variant>

namespace eqf::sim {

std::string_view filterName(FilterKind kind) {
    switch (kind) {
        case FilterKind::Eqf: return "eqf";
        case FilterKind::EqfNoReset: return "eqf-noreset";
        case FilterKind::EqfConsistent: return "eqf-consistent";
        case FilterKind::Ekf: return "ekf";
    }
    return "unknown";
}

FilterKind parseFilterName(std::string_view name) {
    if (name == "eqf") return FilterKind::Eqf;
    if (name == "eqf-noreset") return FilterKind::EqfNoReset;
    if (name == "eqf-consistent") return FilterKind::EqfConsistent;
    if (name == "ekf") return FilterKind::Ekf;
    throw std::invalid_argument("unknown filter '" + std::string(name) + "'");
}

std::vector<FilterKind> parseFilterList(std::string_view list) {
    std::vector<FilterKind> out;
    std::size_t start = 0;
    while (start <= list.size()) {
        const std::size_t comma = list.find(',', start);
        const std::size_t end = comma == std::string_view::npos ? list.size() : comma;
        std::string_view item = list.substr(start, end - start);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        if (!item.empty()) out.push_back(parseFilterName(item));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw std::invalid_argument("empty filter list");
    return out;
}

int SimConfig::sampleCount() const { return static_cast<int>(std::llround(duration * sampleRate)); }

int SimConfig::substepsPerSample() const { return static_cast<int>(std::llround(sampleInterval() / truthStep)); }

double SimConfig::processNoisePositionValue() const {
    if (processNoisePosition >= 0.0) return processNoisePosition;
    const double t = sampleInterval();
    return gainSigmaAccel * gainSigmaAccel * t * t * t * t / 4.0;
}

double SimConfig::processNoiseVelocityValue() const {
    if (processNoiseVelocity >= 0.0) return processNoiseVelocity;
    const double t = sampleInterval();
    return gainSigmaAccel * gainSigmaAccel * t * t;
}

void SimConfig::validate() const {
    auto require = [](bool ok, const char* msg) {
        if (!ok) throw std::invalid_argument(msg);
    };
    require(duration > 0.0, "duration must be positive");
    require(sampleRate > 0.0, "sample_rate must be positive");
    require(truthStep > 0.0, "truth_step must be positive");
    require(substepsPerSample() >= 1 &&
                std::abs(substepsPerSample() * truthStep - sampleInterval()) <= 1e-9 * sampleInterval(),
            "truth_step must divide the sample interval");
    require(sigmaAccel >= 0.0 && sigmaBearingDeg >= 0.0 && sigmaRange >= 0.0 && sigmaP0 >= 0.0 && sigmaV0 >= 0.0,
            "noise standard deviations must be non-negative");
    require(processNoisePositionValue() > 0.0 && processNoiseVelocityValue() > 0.0,
            "process noise must be positive");
    require(gainSigmaBearingDeg > 0.0 && gainSigmaRange > 0.0, "measurement gains must be positive");
    require(priorSigmaP0 > 0.0 && priorSigmaV0 > 0.0, "prior standard deviations must be positive");
    require(chartRadius > 0.0, "chart_radius must be positive");
    require(runs >= 1, "runs must be at least 1");
    require(workers >= 0, "workers must be non-negative");
    require(!filters.empty(), "filters must not be empty");
    require(initialState.p.norm() > 0.0, "initial_position must be nonzero");
}

namespace {

using Value = std::variant<double, bool, std::string, std::vector<double>, std::vector<std::string>>;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

/// Drops a trailing comment, ignoring '#' inside double quotes.
std::string_view stripComment(std::string_view line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

double parseNumber(std::string_view s, int lineNo) {
    s = trim(s);
    std::string cleaned;
    for (char c : s)
        if (c != '_') cleaned.push_back(c);
    if (!cleaned.empty() && cleaned.front() == '+') cleaned.erase(0, 1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cleaned.data(), cleaned.data() + cleaned.size(), value);
    if (ec != std::errc() || ptr != cleaned.data() + cleaned.size() || cleaned.empty()) {
        throw std::invalid_argument("config line " + std::to_string(lineNo) + ": invalid number '" + std::string(s) + "'");
    }
    return value;
}

std::string parseString(std::string_view s, int lineNo) {
    s = trim(s);
    if (s.size() < 2 || s.front() != '"' || s.back() != '"') {
        throw std::invalid_argument("config line " + std::to_string(lineNo) + ": expected a quoted string");
    }
    return std::string(s.substr(1, s.size() - 2));
}

Value parseValue(std::string_view s, int lineNo) {
    s = trim(s);
    if (s.empty()) throw std::invalid_argument("config line " + std::to_string(lineNo) + ": missing value");
    if (s == "true") return true;
    if (s == "false") return false;
    if (s.front() == '"') return parseString(s, lineNo);
    if (s.front() == '[') {
        if (s.back() != ']') throw std::invalid_argument("config line " + std::to_string(lineNo) + ": unterminated array");
        const std::string_view body = trim(s.substr(1, s.size() - 2));
        std::vector<std::string_view> items;
        std::size_t start = 0;
        while (start < body.size()) {
            const std::size_t comma = body.find(',', start);
            const std::size_t end = comma == std::string_view::npos ? body.size() : comma;
            const std::string_view item = trim(body.substr(start, end - start));
            if (!item.empty()) items.push_back(item);
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (!items.empty() && items.front().front() == '"') {
            std::vector<std::string> out;
            for (auto item : items) out.push_back(parseString(item, lineNo));
            return out;
        }
        std::vector<double> out;
        for (auto item : items) out.push_back(parseNumber(item, lineNo));
        return out;
    }
    return parseNumber(s, lineNo);
}

template <typename T>
const T& expect(const Value& v, const std::string& key) {
    if (const T* p = std::get_if<T>(&v)) return *p;
    throw std::invalid_argument("config key '" + key + "' has the wrong type");
}

kinematics::Vector3 expectVector3(const Value& v, const std::string& key) {
    const auto& xs = expect<std::vector<double>>(v, key);
    if (xs.size() != 3) throw std::invalid_argument("config key '" + key + "' needs 3 numbers");
    return {xs[0], xs[1], xs[2]};
}

int expectInt(const Value& v, const std::string& key) {
    const double x = expect<double>(v, key);
    if (x != std::floor(x) || std::abs(x) > 1e9) throw std::invalid_argument("config key '" + key + "' must be an integer");
    return static_cast<int>(x);
}

}  // namespace

SimConfig parseConfig(std::string_view text) {
    SimConfig cfg;

    using Setter = std::function<void(const Value&, const std::string&)>;
    auto number = [](double& field) -> Setter {
        return [&field](const Value& v, const std::string& key) { field = expect<double>(v, key); };
    };
    const std::map<std::string, Setter> setters{
        {"duration", number(cfg.duration)},
        {"truth_step", number(cfg.truthStep)},
        {"sample_rate", number(cfg.sampleRate)},
        {"initial_position", [&](const Value& v, const std::string& k) { cfg.initialState.p = expectVector3(v, k); }},
        {"initial_velocity", [&](const Value& v, const std::string& k) { cfg.initialState.v = expectVector3(v, k); }},
        {"accel_profile",
         [&](const Value& v, const std::string& k) {
             const auto& name = expect<std::string>(v, k);
             if (name == "cosine") cfg.accelProfile = AccelProfile::Cosine;
             else if (name == "zero") cfg.accelProfile = AccelProfile::Zero;
             else throw std::invalid_argument("accel_profile must be \"cosine\" or \"zero\"");
         }},
        {"sigma_accel", number(cfg.sigmaAccel)},
        {"sigma_bearing_deg", number(cfg.sigmaBearingDeg)},
        {"sigma_range", number(cfg.sigmaRange)},
        {"sigma_p0", number(cfg.sigmaP0)},
        {"sigma_v0", number(cfg.sigmaV0)},
        {"gain_sigma_accel", number(cfg.gainSigmaAccel)},
        {"process_noise_position", number(cfg.processNoisePosition)},
        {"process_noise_velocity", number(cfg.processNoiseVelocity)},
        {"gain_sigma_bearing_deg", number(cfg.gainSigmaBearingDeg)},
        {"gain_sigma_range", number(cfg.gainSigmaRange)},
        {"prior_sigma_p0", number(cfg.priorSigmaP0)},
        {"prior_sigma_v0", number(cfg.priorSigmaV0)},
        {"chart_radius", number(cfg.chartRadius)},
        {"seed",
         [&](const Value& v, const std::string& k) {
             const double s = expect<double>(v, k);
             if (s < 0 || s != std::floor(s) || s > 9007199254740992.0) throw std::invalid_argument("seed must be a non-negative integer");
             cfg.seed = static_cast<std::uint64_t>(s);
         }},
        {"runs", [&](const Value& v, const std::string& k) { cfg.runs = expectInt(v, k); }},
        {"workers", [&](const Value& v, const std::string& k) { cfg.workers = expectInt(v, k); }},
        {"filters",
         [&](const Value& v, const std::string& k) {
             cfg.filters.clear();
             for (const auto& name : expect<std::vector<std::string>>(v, k)) cfg.filters.push_back(parseFilterName(name));
         }},
    };

    std::istringstream in{std::string(text)};
    std::string raw;
    int lineNo = 0;
    while (std::getline(in, raw)) {
        ++lineNo;
        const std::string_view line = trim(stripComment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            throw std::invalid_argument("config line " + std::to_string(lineNo) + ": tables are not supported");
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw std::invalid_argument("config line " + std::to_string(lineNo) + ": expected key = value");
        }
        const std::string key(trim(line.substr(0, eq)));
        const auto it = setters.find(key);
        if (it == setters.end()) throw std::invalid_argument("unknown config key '" + key + "'");
        it->second(parseValue(line.substr(eq + 1), lineNo), key);
    }
    cfg.validate();
    return cfg;
}

SimConfig loadConfig(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parseConfig(buf.str());
}

}  // namespace eqf::sim
