#include "ddk/cli/config.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ddk/error.hpp"
#include "ddk/tail_dependence.hpp"

namespace ddk::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InputError(std::string("config key '") + key + "': " + e.what());
    }
}

int seconds_of_day(const json& j, const char* key) {
    if (!j.contains(key)) throw InputError(std::string("session needs '") + key + "'");
    const auto text = j.at(key).get<std::string>();
    const auto s = parse_time_of_day(text);
    if (!s) throw InputError(std::string("session '") + key + "' is not HH:MM[:SS]: " + text);
    return *s;
}

ContractConfig parse_contract(const json& j, const fs::path& base) {
    ContractConfig c;
    c.label = get_or<std::string>(j, "label", "");
    if (c.label.empty()) throw InputError("every contract needs a label");
    if (!j.contains("session")) throw InputError("contract " + c.label + " needs a session");
    const auto& s = j.at("session");
    c.session.ath_start = seconds_of_day(s, "start");
    c.session.ath_end = seconds_of_day(s, "end");
    c.session.timezone_label = get_or<std::string>(s, "timezone", "");
    c.session.max_gap = get_or<int>(s, "max_gap", 300);
    c.session.validate();

    if (j.contains("columns")) {
        const auto& m = j.at("columns");
        c.columns.timestamp = get_or<std::string>(m, "timestamp", c.columns.timestamp);
        c.columns.price = get_or<std::string>(m, "price", c.columns.price);
        c.columns.bid = get_or<std::string>(m, "bid", c.columns.bid);
        c.columns.ask = get_or<std::string>(m, "ask", c.columns.ask);
        c.columns.volume = get_or<std::string>(m, "volume", c.columns.volume);
        c.columns.corrected = get_or<std::string>(m, "corrected", c.columns.corrected);
    }

    if (!j.contains("segments") || j.at("segments").empty())
        throw InputError("contract " + c.label + " lists no tick files");
    for (const auto& seg : j.at("segments")) {
        Segment s2;
        s2.path = base / get_or<std::string>(seg, "path", "");
        if (seg.contains("from")) {
            const auto text = seg.at("from").get<std::string>();
            s2.from = parse_date(text);
            if (!s2.from) throw InputError("contract " + c.label + ": bad roll date " + text);
        }
        c.segments.push_back(std::move(s2));
    }
    for (std::size_t i = 1; i < c.segments.size(); ++i) {
        if (!c.segments[i].from)
            throw InputError("contract " + c.label + ": segment " + std::to_string(i + 1) +
                             " needs a 'from' roll date");
        if (c.segments[i - 1].from && !(*c.segments[i - 1].from < *c.segments[i].from))
            throw InputError("contract " + c.label + ": roll dates must increase");
    }
    return c;
}

void require_file(const fs::path& p) {
    std::error_code ec;
    if (!fs::is_regular_file(p, ec)) throw InputError("input file not found: " + p.string());
}

}  // namespace

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw AnalysisError("SHA-256 failed");
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return out.str();
}

RunConfig load_config(const fs::path& path, const Overrides& overrides) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw InputError("config root must be an object");

    static const std::set<std::string> known{"contracts", "samples", "bar_width", "epsilon0",
                                             "epsilon_mode", "epsilon_fixed", "scan", "tests",
                                             "taildep", "nullsim", "seed", "workers", "out"};
    for (const auto& [key, _] : j.items())
        if (!known.contains(key)) throw InputError("unknown config key '" + key + "'");

    if (overrides.bar_width) j["bar_width"] = *overrides.bar_width;
    if (overrides.epsilon0) j["epsilon0"] = *overrides.epsilon0;
    if (overrides.p0) j["tests"]["p0"] = *overrides.p0;
    if (overrides.seed) j["seed"] = *overrides.seed;

    const fs::path base = path.parent_path();
    RunConfig cfg;
    try {
        if (j.contains("contracts"))
            for (const auto& c : j.at("contracts")) cfg.contracts.push_back(parse_contract(c, base));
        std::set<std::string> labels;
        for (const auto& c : cfg.contracts)
            if (!labels.insert(c.label).second) throw InputError("duplicate contract label " + c.label);

        if (j.contains("samples"))
            for (const auto& s : j.at("samples")) {
                SampleConfig sc{get_or<std::string>(s, "name", ""), base / get_or<std::string>(s, "path", "")};
                if (sc.name.empty()) throw InputError("every sample needs a name");
                if (!labels.insert(sc.name).second) throw InputError("duplicate sample name " + sc.name);
                cfg.samples.push_back(std::move(sc));
            }

        cfg.epsilon.bar_width = get_or<int>(j, "bar_width", 30);
        cfg.epsilon.epsilon0 = get_or<double>(j, "epsilon0", 1.0);
        const auto mode = get_or<std::string>(j, "epsilon_mode", "adaptive");
        if (mode == "adaptive") {
            cfg.epsilon.mode = EpsilonMode::adaptive;
        } else if (mode == "fixed") {
            cfg.epsilon.mode = EpsilonMode::fixed;
            cfg.epsilon.fixed_epsilon = get_or<double>(j, "epsilon_fixed", 0.0);
        } else {
            throw InputError("epsilon_mode must be 'adaptive' or 'fixed'");
        }
        cfg.epsilon.validate();

        const json scan = j.value("scan", json::object());
        cfg.scan.n_min = get_or<std::size_t>(scan, "n_min", 50);
        const auto policy = get_or<std::string>(scan, "candidates", "unique");
        if (policy == "unique") {
            cfg.scan.policy = CandidatePolicy::unique_values;
        } else if (policy == "grid") {
            cfg.scan.policy = CandidatePolicy::quantile_grid;
        } else {
            throw InputError("scan.candidates must be 'unique' or 'grid'");
        }
        cfg.scan.grid_size = get_or<std::size_t>(scan, "grid_size", 500);
        cfg.scan.validate();

        const json tests = j.value("tests", json::object());
        cfg.tests.p0 = get_or<double>(tests, "p0", 0.1);
        cfg.tests.tail_size = get_or<std::size_t>(tests, "tail_size", 200);
        cfg.tests.r_max = get_or<std::size_t>(tests, "r_max", 30);
        if (tests.contains("u_rank") && !tests.at("u_rank").is_string())
            cfg.tests.u_rank = get_or<std::size_t>(tests, "u_rank", 0);
        else if (tests.contains("u_rank") && tests.at("u_rank").get<std::string>() != "auto")
            throw InputError("tests.u_rank must be an integer or \"auto\"");
        if (!(cfg.tests.p0 > 0.0 && cfg.tests.p0 < 1.0)) throw InputError("p0 must lie in (0, 1)");
        if (cfg.tests.r_max < 1) throw InputError("tests.r_max must be at least 1");
        if (cfg.tests.tail_size < cfg.tests.r_max + 2)
            throw InputError("tests.tail_size must be at least r_max + 2");

        const json td = j.value("taildep", json::object());
        cfg.lambda_grid = get_or<std::vector<double>>(td, "grid", kDefaultLambdaGrid);
        for (double u : cfg.lambda_grid)
            if (!(u > 0.0 && u < 1.0)) throw InputError("taildep grid values must lie in (0, 1)");

        const json ns = j.value("nullsim", json::object());
        cfg.null_replicates = get_or<std::size_t>(ns, "replicates", 10);

        cfg.seed = get_or<std::uint64_t>(j, "seed", 0);
        cfg.workers = get_or<unsigned>(j, "workers", 1);
        cfg.out = base / get_or<std::string>(j, "out", "out");
    } catch (const json::exception& e) {
        throw InputError(std::string("config: ") + e.what());
    }
    if (overrides.workers) cfg.workers = *overrides.workers;
    if (overrides.out) cfg.out = *overrides.out;
    if (cfg.workers == 0) throw InputError("workers must be at least 1");

    for (const auto& c : cfg.contracts)
        for (const auto& s : c.segments) require_file(s.path);
    for (const auto& s : cfg.samples) require_file(s.path);

    json canonical = j;
    canonical.erase("out");
    canonical.erase("workers");
    cfg.hash = sha256_hex(canonical.dump());
    return cfg;
}

}  // namespace ddk::cli
