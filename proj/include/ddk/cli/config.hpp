#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ddk/events.hpp"
#include "ddk/market_data.hpp"
#include "ddk/powerlaw.hpp"

namespace ddk::cli {

// One contract month's tick file. `from` is its roll date: the segment
// supplies every day on or after it until the next segment's roll date.
struct Segment {
    std::filesystem::path path;
    std::optional<Date> from;
};

struct ContractConfig {
    std::string label;
    SessionSpec session;
    ColumnMap columns;
    std::vector<Segment> segments;
};

// A univariate (one column) or paired (two columns) sample analysed next to
// the event characteristics.
struct SampleConfig {
    std::string name;
    std::filesystem::path path;
};

struct TestSettings {
    double p0 = 0.1;
    std::size_t tail_size = 200;
    std::size_t r_max = 30;
    std::optional<std::size_t> u_rank;  // empty: automatic rank selection
};

struct RunConfig {
    std::vector<ContractConfig> contracts;
    std::vector<SampleConfig> samples;
    EpsilonConfig epsilon;
    ScanConfig scan;
    TestSettings tests;
    std::vector<double> lambda_grid;
    std::size_t null_replicates = 10;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    std::filesystem::path out = "out";

    // SHA-256 of the canonical form of every setting except `out` and
    // `workers`, neither of which changes any result.
    std::string hash;
};

struct Overrides {
    std::optional<std::filesystem::path> out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::optional<int> bar_width;
    std::optional<double> epsilon0;
    std::optional<double> p0;
};

// Reads a JSON config. Relative paths resolve against the config's directory.
// Throws InputError on unreadable files, malformed JSON, invalid settings, or
// referenced tick/sample files that do not exist.
RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides = {});

std::string sha256_hex(const std::string& data);

}  // namespace ddk::cli
