#include "ddk/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "ddk/cli/io.hpp"
#include "ddk/error.hpp"
#include "ddk/null_model.hpp"
#include "ddk/outlier_tests.hpp"
#include "ddk/random.hpp"
#include "ddk/tail_dependence.hpp"

namespace ddk::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr EventKind kKinds[] = {EventKind::drawdown, EventKind::drawup};
constexpr EventField kTailFields[] = {EventField::norm_ret, EventField::norm_speed};

template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    const auto count = std::min<std::size_t>(workers, n);
    for (std::size_t w = 0; w < count; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < n;) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    // lowest index first, so the reported failure does not depend on scheduling
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::string event_label(const std::string& contract, const Event& e) {
    std::string s = contract;
    if (!e.contract.empty() && e.contract != contract) s += "/" + e.contract;
    return s + " " + format_timestamp(e.start_time);
}

// A univariate sample analysed by fit, dk and utest; labels[i] says where
// values[i] came from.
struct Dataset {
    std::string name;
    std::vector<double> values;
    std::vector<std::string> labels;
};

struct PairedSample {
    std::string name;
    std::string x_name, y_name;
    std::vector<double> x, y;
};

struct SegmentData {
    std::string name;
    TickFile file;
    CleanResult clean;
    AggregateResult bars;
};

struct ContractData {
    const ContractConfig* config = nullptr;
    std::vector<SegmentData> segments;
    std::vector<BarSeries> days;
};

class Pipeline {
public:
    Pipeline(const RunConfig& cfg, std::ostream& log) : cfg_(cfg), log_(log) {
        prov_ = {DDK_VERSION, cfg.hash, cfg.seed, SeededGenerator::kAlgorithm};
    }

    void clean();
    void bars();
    void detect();
    void fit();
    void dk();
    void utest();
    void taildep();
    void nullsim();
    void manifest(const std::string& command);

    const std::vector<std::string>& files() const { return files_; }

private:
    const std::vector<ContractData>& contracts();
    const std::vector<EventSeries>& events();
    const std::vector<Dataset>& datasets();
    const std::vector<PairedSample>& paired_samples();
    void load_samples();

    json provenance() const {
        return {{"tool", "ddk"},
                {"version", prov_.version},
                {"config_hash", prov_.config_hash},
                {"seed", prov_.seed},
                {"generator", prov_.generator}};
    }
    std::string csv_head(const std::string& header) const { return provenance_comment(prov_) + header + "\n"; }
    void emit(const std::string& rel, const std::string& content) {
        write_file(cfg_.out / rel, content);
        files_.push_back(rel);
    }
    void emit_json(const std::string& rel, json body) {
        json doc;
        doc["provenance"] = provenance();
        for (auto& [k, v] : body.items()) doc[k] = std::move(v);
        emit(rel, doc.dump(2) + "\n");
    }

    const RunConfig& cfg_;
    std::ostream& log_;
    Provenance prov_;
    std::vector<std::string> files_;

    std::optional<std::vector<ContractData>> contracts_;
    std::optional<std::vector<EventSeries>> events_;
    std::optional<std::vector<Dataset>> datasets_;
    std::optional<std::vector<Dataset>> sample_sets_;
    std::optional<std::vector<PairedSample>> pairs_;
};

const std::vector<ContractData>& Pipeline::contracts() {
    if (contracts_) return *contracts_;
    std::vector<ContractData> out(cfg_.contracts.size());
    parallel_for(out.size(), cfg_.workers, [&](std::size_t ci) {
        const auto& cc = cfg_.contracts[ci];
        auto& cd = out[ci];
        cd.config = &cc;
        for (const auto& seg : cc.segments) {
            SegmentData sd;
            sd.name = seg.path.stem().string();
            sd.file = read_tick_file(seg.path, cc.columns);
            if (sd.file.ticks.empty() && !sd.file.errors.empty())
                throw AnalysisError("contract " + cc.label + ": no parsable rows in " + seg.path.string() +
                                    " (first error on line " + std::to_string(sd.file.errors.front().line) +
                                    ": " + sd.file.errors.front().message + ")");
            sd.clean = clean_ticks(sd.file.ticks, cc.session, sd.file.has_quotes);
            sd.bars = aggregate_bars(sd.clean.ticks, cfg_.epsilon.bar_width, cc.session, sd.name);
            cd.segments.push_back(std::move(sd));
        }
        std::vector<BarSeries> days;
        for (const auto& d : cd.segments.front().bars.days)
            if (!cc.segments.front().from || !(d.day < *cc.segments.front().from)) days.push_back(d);
        for (std::size_t s = 1; s < cd.segments.size(); ++s) {
            try {
                days = stitch_roll(days, cd.segments[s].bars.days, *cc.segments[s].from);
            } catch (const AnalysisError& e) {
                throw AnalysisError("contract " + cc.label + ": " + e.what());
            }
        }
        cd.days = std::move(days);
    });
    contracts_ = std::move(out);
    return *contracts_;
}

const std::vector<EventSeries>& Pipeline::events() {
    if (events_) return *events_;
    const auto& cs = contracts();
    std::vector<EventSeries> out(cs.size());
    parallel_for(cs.size(), cfg_.workers, [&](std::size_t i) {
        out[i] = detect_series(cs[i].config->label, cs[i].days, cfg_.epsilon);
    });
    events_ = std::move(out);
    return *events_;
}

void Pipeline::load_samples() {
    if (sample_sets_) return;
    sample_sets_.emplace();
    pairs_.emplace();
    for (const auto& s : cfg_.samples) {
        const auto table = read_numeric_csv(s.path);
        if (table.columns.size() == 1) {
            Dataset d{s.name, table.values[0], {}};
            for (std::size_t i = 0; i < d.values.size(); ++i) d.labels.push_back("row " + std::to_string(i + 1));
            sample_sets_->push_back(std::move(d));
        } else if (table.columns.size() == 2) {
            pairs_->push_back({s.name, table.columns[0], table.columns[1], table.values[0], table.values[1]});
        } else {
            throw InputError("sample " + s.name + " must have one or two columns");
        }
    }
}

const std::vector<Dataset>& Pipeline::datasets() {
    if (datasets_) return *datasets_;
    std::vector<Dataset> out;
    if (!cfg_.contracts.empty()) {
        const auto pooled = pool_events(events());
        for (auto kind : kKinds)
            for (auto field : kTailFields) {
                Dataset d;
                d.name = std::string(event_kind_name(kind)) + "." + event_field_name(field);
                for (const auto& e : pooled.of(kind)) {
                    d.values.push_back(field_value(e, field));
                    d.labels.push_back(event_label(e.contract, e));
                }
                out.push_back(std::move(d));
            }
    }
    load_samples();
    out.insert(out.end(), sample_sets_->begin(), sample_sets_->end());
    datasets_ = std::move(out);
    return *datasets_;
}

const std::vector<PairedSample>& Pipeline::paired_samples() {
    load_samples();
    return *pairs_;
}

json fit_json(const PowerLawFit& f) {
    return {{"x_m", f.x_m},       {"alpha", f.alpha}, {"alpha_se", f.alpha_se},
            {"n_tail", f.n_tail}, {"ks", f.ks},       {"ad", f.ad},
            {"distance", distance_name(f.distance_used)}, {"candidates", f.candidates_evaluated}};
}

json skipped(const std::string& reason) { return {{"status", "skipped"}, {"reason", reason}}; }

std::string rule_numeral(std::size_t i) {
    static const char* numerals[] = {"i", "ii", "iii", "iv", "v", "vi"};
    return numerals[i];
}

void Pipeline::clean() {
    for (const auto& cd : contracts()) {
        const auto& cc = *cd.config;
        for (const auto& sd : cd.segments) {
            const auto& cols = cc.columns;
            auto name = [](const std::string& s, const char* fallback) { return s.empty() ? std::string(fallback) : s; };
            std::string header = name(cols.timestamp, "timestamp") + "," + name(cols.price, "price");
            if (sd.file.has_quotes) header += "," + cols.bid + "," + cols.ask;
            header += "," + name(cols.volume, "volume") + "," + name(cols.corrected, "corrected");
            std::string csv = csv_head(header);
            for (const auto& t : sd.clean.ticks) {
                csv += format_timestamp(t.timestamp) + "," + format_number(t.price);
                if (sd.file.has_quotes) csv += "," + format_number(t.bid) + "," + format_number(t.ask);
                csv += "," + format_number(t.volume) + "," + (t.corrected ? "1" : "0") + "\n";
            }
            const std::string dir = "clean/" + cc.label + "/";
            emit(dir + sd.name + ".csv", csv);

            const auto& r = sd.clean.report;
            json rules = json::array();
            for (std::size_t i = 0; i < kCleanRuleCount; ++i)
                rules.push_back({{"rule", rule_numeral(i)},
                                 {"name", clean_rule_name(static_cast<CleanRule>(i))},
                                 {"applied", r.applied[i]},
                                 {"removed", r.removed[i]}});
            json errors = json::array();
            for (const auto& e : sd.file.errors) errors.push_back({{"line", e.line}, {"message", e.message}});
            json excluded = json::array();
            for (const auto& d : r.excluded_days) excluded.push_back(format_date(d));
            emit_json(dir + sd.name + ".report.json",
                      {{"contract", cc.label},
                       {"segment", sd.name},
                       {"session", {{"start_seconds", cc.session.ath_start},
                                    {"end_seconds", cc.session.ath_end},
                                    {"timezone", cc.session.timezone_label}}},
                       {"parse_errors", errors},
                       {"input_rows", r.input_rows},
                       {"rules", rules},
                       {"gap_days", {{"max_gap_seconds", cc.session.max_gap},
                                     {"excluded", excluded},
                                     {"rows_removed", r.removed_gap_days}}},
                       {"survivors", r.survivors},
                       {"passes", r.passes},
                       {"balanced", r.balanced()}});
            log_ << "clean: " << cc.label << "/" << sd.name << " kept " << r.survivors << " of " << r.input_rows
                 << " rows\n";
        }
    }
}

void Pipeline::bars() {
    for (const auto& cd : contracts()) {
        const auto& label = cd.config->label;
        std::string csv = csv_head("day,bar_index,time,close,return,source");
        for (const auto& d : cd.days)
            for (std::size_t i = 0; i < d.closes.size(); ++i) {
                csv += format_date(d.day) + "," + std::to_string(d.first_bar + static_cast<int>(i)) + "," +
                       format_timestamp(d.bar_time(i)) + "," + format_number(d.closes[i]) + "," +
                       (i == 0 ? std::string{} : format_number(d.returns[i - 1])) + "," + d.source + "\n";
            }
        emit("bars/" + label + ".csv", csv);
        json notices = json::array();
        for (const auto& sd : cd.segments)
            for (const auto& n : sd.bars.notices) notices.push_back(sd.name + ": " + n);
        emit_json("bars/" + label + ".json", {{"contract", label},
                                               {"bar_width_seconds", cfg_.epsilon.bar_width},
                                               {"days", cd.days.size()},
                                               {"notices", notices}});
        log_ << "bars: " << label << " " << cd.days.size() << " days\n";
    }
}

std::string event_rows(const std::string& label, const std::vector<Event>& events, bool normalizable_only) {
    std::string csv;
    for (const auto& e : events) {
        if (normalizable_only && !e.normalizable) continue;
        csv += label + "," + e.contract + "," + event_kind_name(e.kind) + "," + format_date(e.day) + "," +
               format_timestamp(e.start_time) + "," + std::to_string(e.k_start) + "," + std::to_string(e.k_end) +
               "," + format_number(e.duration) + "," + format_number(e.size) + "," + format_number(e.ret) + "," +
               format_number(e.norm_ret) + "," + format_number(e.speed) + "," + format_number(e.norm_speed) + "," +
               format_number(e.sigma_prev) + "," + (e.normalizable ? "1" : "0") + "\n";
    }
    return csv;
}

constexpr const char* kEventHeader =
    "contract,source,kind,day,start,k_start,k_end,duration,size,return,norm_return,speed,norm_speed,"
    "sigma_prev,normalizable";

void Pipeline::detect() {
    const auto& series = events();
    std::string pooled = csv_head(kEventHeader);
    std::string stats = csv_head("scope,kind,field,count,median,q90,max");
    auto add_stats = [&](const std::string& scope, const std::vector<Event>& evs, EventKind kind,
                         std::span<const EventField> fields) {
        for (auto field : fields) {
            const auto v = field_values(evs, kind, field);
            stats += scope + "," + event_kind_name(kind) + "," + event_field_name(field) + ",";
            if (v.empty()) {
                stats += "0,,,\n";
                continue;
            }
            const auto s = descriptive_stats(v);
            stats += std::to_string(s.count) + "," + format_number(s.median) + "," + format_number(s.q90) + "," +
                     format_number(s.max) + "\n";
        }
    };
    constexpr EventField per_contract[] = {EventField::duration, EventField::size, EventField::norm_ret,
                                           EventField::norm_speed};
    constexpr EventField across[] = {EventField::duration, EventField::norm_ret, EventField::norm_speed};
    for (const auto& s : series) {
        emit("events/" + s.contract + ".csv", csv_head(kEventHeader) + event_rows(s.contract, s.events, false));
        pooled += event_rows(s.contract, s.events, true);
        for (auto kind : kKinds) add_stats(s.contract, s.events, kind, per_contract);
        log_ << "detect: " << s.contract << " " << s.events.size() << " events\n";
    }
    const auto all = pool_events(series);
    for (auto kind : kKinds) add_stats("pooled", all.of(kind), kind, across);
    emit("events/pooled.csv", pooled);
    emit("events/stats.csv", stats);
}

// Empirical and fitted ccdf on a log-spaced grid, for plotting.
std::string ccdf_rows(std::vector<double> values, const std::optional<PowerLawFit>& fit) {
    std::string csv;
    std::sort(values.begin(), values.end());
    if (values.empty() || !(values.front() > 0.0)) return csv;
    const double lo = std::log(values.front()), hi = std::log(values.back());
    const int points = values.front() == values.back() ? 1 : 200;
    const double n = static_cast<double>(values.size());
    for (int k = 0; k < points; ++k) {
        const double x = points == 1 ? values.front() : std::exp(lo + (hi - lo) * k / (points - 1));
        const auto at_least = values.end() - std::lower_bound(values.begin(), values.end(), x);
        std::string fitted;
        if (fit && x >= fit->x_m)
            fitted = format_number(static_cast<double>(fit->n_tail) / n * std::pow(fit->x_m / x, fit->alpha));
        csv += format_number(x) + "," + format_number(static_cast<double>(at_least) / n) + "," + fitted + "\n";
    }
    return csv;
}

void Pipeline::fit() {
    json fits = json::array();
    for (const auto& d : datasets()) {
        json entry{{"dataset", d.name}, {"n", d.values.size()}};
        std::optional<PowerLawFit> ks;
        for (auto dist : {Distance::ks, Distance::ad}) {
            try {
                const auto f = scan_xmin(d.values, cfg_.scan, dist);
                entry[distance_name(dist)] = fit_json(f);
                if (dist == Distance::ks) ks = f;
            } catch (const AnalysisError& e) {
                entry[distance_name(dist)] = skipped(e.what());
            }
        }
        fits.push_back(std::move(entry));
        emit("fit/ccdf_" + d.name + ".csv", csv_head("x,ccdf,fitted_ccdf") + ccdf_rows(d.values, ks));
    }

    json composition = json::array();
    if (!cfg_.contracts.empty()) {
        // Tail threshold of single normalized returns, one per sign.
        const auto& cs = contracts();
        std::map<EventKind, std::vector<double>> per_return;
        for (const auto& cd : cs)
            for (std::size_t i = 1; i < cd.days.size(); ++i) {
                const double sigma = rms_volatility(cd.days[i - 1].returns);
                if (!(sigma > 0.0)) continue;
                for (double r : cd.days[i].returns) {
                    if (r < 0.0) per_return[EventKind::drawdown].push_back(-r / sigma);
                    if (r > 0.0) per_return[EventKind::drawup].push_back(r / sigma);
                }
            }
        std::string rows = csv_head("contract,source,kind,start,norm_return,threshold,n_tail_returns,contribution");
        const auto& series = events();
        for (auto kind : kKinds) {
            json entry{{"kind", event_kind_name(kind)}, {"n_returns", per_return[kind].size()}};
            PowerLawFit threshold;
            try {
                threshold = scan_xmin(per_return[kind], cfg_.scan, Distance::ks);
            } catch (const AnalysisError& e) {
                entry["returns_fit"] = skipped(e.what());
                composition.push_back(std::move(entry));
                continue;
            }
            entry["returns_fit"] = fit_json(threshold);
            std::size_t with_tail = 0, max_n = 0, c_above_one = 0;
            for (std::size_t ci = 0; ci < series.size(); ++ci) {
                std::map<Date, const BarSeries*> by_day;
                for (const auto& d : cs[ci].days) by_day[d.day] = &d;
                for (const auto& e : series[ci].events) {
                    if (e.kind != kind || !e.normalizable) continue;
                    const auto& day = *by_day.at(e.day);
                    const auto n = count_tail_returns(e, day, threshold.x_m);
                    const auto c = contribution_ratio(e, day, threshold.x_m);
                    if (n > 0) ++with_tail;
                    max_n = std::max(max_n, n);
                    if (c && *c >= 1.0) ++c_above_one;
                    rows += series[ci].contract + "," + e.contract + "," + event_kind_name(kind) + "," +
                            format_timestamp(e.start_time) + "," + format_number(e.norm_ret) + "," +
                            format_number(threshold.x_m) + "," + std::to_string(n) + "," + format_optional(c) + "\n";
                }
            }
            entry["events_with_tail_returns"] = with_tail;
            entry["max_tail_returns"] = max_n;
            entry["contribution_at_least_one"] = c_above_one;
            composition.push_back(std::move(entry));
        }
        emit("fit/composition.csv", rows);
    }
    emit_json("fit/fits.json", {{"n_min", cfg_.scan.n_min},
                                {"candidates", cfg_.scan.policy == CandidatePolicy::unique_values ? "unique" : "grid"},
                                {"fits", fits},
                                {"composition", composition}});
    log_ << "fit: " << datasets().size() << " datasets\n";
}

// The tail_size largest values mapped with x_m set to the next value below
// them, so every mapped value is strictly positive.
ExponentialTail top_tail(const Dataset& d, std::size_t tail_size) {
    std::vector<std::size_t> order(d.values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return d.values[a] > d.values[b]; });
    if (order.size() < 2) throw AnalysisError("dataset has fewer than two values");
    const std::size_t n = std::min(tail_size, order.size() - 1);
    const double x_m = d.values[order[n]];
    if (!(x_m > 0.0)) throw AnalysisError("tail bound is not positive");
    std::vector<double> top;
    for (std::size_t i = 0; i < n; ++i) top.push_back(d.values[order[i]]);
    auto tail = to_exponential(top, x_m);
    for (auto& idx : tail.source_index) idx = order[idx];
    return tail;
}

json outlier_json(const Dataset& d, const ExponentialTail& tail, std::size_t rank, double p) {
    const auto src = tail.source_index[rank - 1];
    return {{"rank", rank}, {"provenance", d.labels[src]}, {"x", d.values[src]}, {"y", tail.y[rank - 1]}, {"p", p}};
}

void Pipeline::dk() {
    json results = json::array();
    for (const auto& d : datasets()) {
        json entry{{"dataset", d.name}, {"n_sample", d.values.size()}};
        try {
            const auto tail = top_tail(d, cfg_.tests.tail_size);
            const auto orig = original_dk_test(tail, cfg_.tests.p0, cfg_.tests.r_max);
            const auto mod = modified_dk_test(tail, cfg_.tests.p0, cfg_.tests.r_max);
            entry["N"] = tail.size();
            entry["x_m"] = tail.x_m;
            json flagged = json::array();
            for (auto r : orig.flagged_ranks) flagged.push_back({{"r", r}, {"p", orig.p_values[r - 1]}});
            entry["original"] = {{"variant", "original"}, {"r", orig.r}, {"p_values", orig.p_values},
                                 {"flagged", flagged}};
            json outliers = json::array();
            for (std::size_t k = 1; k <= mod.r; ++k) outliers.push_back(outlier_json(d, tail, k, mod.p_values[k - 1]));
            entry["modified"] = {{"variant", "modified"},         {"r", mod.r},
                                 {"inconclusive", mod.inconclusive}, {"p_values", mod.p_values},
                                 {"outliers", outliers},           {"p_table", mod.p_table}};
        } catch (const AnalysisError& e) {
            entry.update(skipped(e.what()));
        }
        results.push_back(std::move(entry));
    }
    emit_json("dk/dk.json", {{"p0", cfg_.tests.p0},
                             {"tail_size", cfg_.tests.tail_size},
                             {"r_max", cfg_.tests.r_max},
                             {"results", results}});
    log_ << "dk: " << results.size() << " datasets\n";
}

void Pipeline::utest() {
    json results = json::array();
    for (const auto& d : datasets()) {
        json entry{{"dataset", d.name}, {"n_sample", d.values.size()}};
        try {
            const auto f = scan_xmin(d.values, cfg_.scan, Distance::ks);
            std::vector<double> above;
            std::vector<std::size_t> where;
            for (std::size_t i = 0; i < d.values.size(); ++i)
                if (d.values[i] >= f.x_m) {
                    above.push_back(d.values[i]);
                    where.push_back(i);
                }
            auto tail = to_exponential(above, f.x_m);
            for (auto& idx : tail.source_index) idx = where[idx];
            const auto res = cfg_.tests.u_rank
                                 ? u_test(tail, std::min(*cfg_.tests.u_rank, tail.size() - 2), cfg_.tests.p0)
                                 : u_test_auto(tail, cfg_.tests.p0, cfg_.tests.r_max);
            json outliers = json::array();
            for (auto k : res.outlier_ranks) outliers.push_back(outlier_json(d, tail, k, res.p_values[k - 1]));
            entry["x_m"] = f.x_m;
            entry["N"] = res.n;
            entry["r"] = res.r;
            entry["rank_mode"] = res.auto_rank ? "auto" : "fixed";
            entry["alpha_censored"] = res.alpha_censored;
            entry["p_values"] = res.p_values;
            entry["outliers"] = outliers;
        } catch (const AnalysisError& e) {
            entry.update(skipped(e.what()));
        }
        results.push_back(std::move(entry));
    }
    emit_json("utest/utest.json", {{"p0", cfg_.tests.p0}, {"results", results}});
    log_ << "utest: " << results.size() << " datasets\n";
}

void Pipeline::taildep() {
    std::string csv = provenance_comment(prov_) + "# quantile=order statistic of rank ceil(u*n), strict exceedance\n" +
                      "dataset,x,y,u,lambda,n_cond\n";
    auto add_curve = [&](const std::string& name, const std::string& xn, const std::string& yn,
                         const std::vector<double>& x, const std::vector<double>& y) {
        for (double u : cfg_.lambda_grid) {
            csv += name + "," + xn + "," + yn + "," + format_number(u) + ",";
            if (x.empty() || static_cast<double>(x.size()) * (1.0 - u) < 1.0 - 1e-9) {
                csv += ",0\n";
                continue;
            }
            const auto p = lambda_u(x, y, u);
            csv += format_optional(p.lambda) + "," + std::to_string(p.n_cond) + "\n";
        }
    };
    if (!cfg_.contracts.empty()) {
        const auto pooled = pool_events(events());
        constexpr std::pair<EventField, EventField> pairs[] = {{EventField::norm_speed, EventField::norm_ret},
                                                               {EventField::duration, EventField::norm_ret},
                                                               {EventField::norm_speed, EventField::duration}};
        for (auto kind : kKinds)
            for (const auto& [fx, fy] : pairs)
                add_curve(event_kind_name(kind), event_field_name(fx), event_field_name(fy),
                          pooled.values(kind, fx), pooled.values(kind, fy));
    }
    for (const auto& p : paired_samples()) add_curve(p.name, p.x_name, p.y_name, p.x, p.y);
    emit("taildep/lambda.csv", csv);
    log_ << "taildep: done\n";
}

void Pipeline::nullsim() {
    if (cfg_.contracts.empty()) return;
    const auto& cs = contracts();
    struct Row {
        std::string replicate, seed;
        std::vector<std::string> cells;
    };
    auto summarize = [&](const std::vector<EventSeries>& series, Row& row) {
        const auto pooled = pool_events(series);
        for (auto kind : kKinds) {
            const auto r = pooled.values(kind, EventField::norm_ret);
            const auto tau = pooled.values(kind, EventField::duration);
            std::string cell = std::string(event_kind_name(kind)) + "," + std::to_string(r.size()) + ",";
            if (r.empty()) {
                cell += ",,,,";
            } else {
                cell += format_number(*std::max_element(r.begin(), r.end())) + "," +
                        format_number(descriptive_stats(tau).median) + ",";
                try {
                    const auto f = scan_xmin(r, cfg_.scan, Distance::ks);
                    cell += format_number(f.x_m) + "," + format_number(f.alpha);
                } catch (const AnalysisError&) {
                    cell += ",";
                }
            }
            row.cells.push_back(std::move(cell));
        }
    };
    std::vector<Row> rows(cfg_.null_replicates + 1);
    rows[0].replicate = "observed";
    summarize(events(), rows[0]);
    parallel_for(cfg_.null_replicates, cfg_.workers, [&](std::size_t r) {
        auto& row = rows[r + 1];
        row.replicate = std::to_string(r);
        const std::uint64_t rep_seed = mix64(cfg_.seed + 0x9E3779B97F4A7C15ULL * (r + 1));
        row.seed = std::to_string(rep_seed);
        std::vector<EventSeries> series;
        for (std::size_t ci = 0; ci < cs.size(); ++ci) {
            const auto shuffled = reshuffle_series(cs[ci].days, mix64(rep_seed + ci));
            series.push_back(detect_series(cs[ci].config->label, shuffled, cfg_.epsilon));
        }
        summarize(series, row);
    });
    std::string csv = csv_head("replicate,replicate_seed,kind,events,max_norm_return,median_duration,x_m,alpha");
    for (const auto& row : rows)
        for (const auto& cell : row.cells) csv += row.replicate + "," + row.seed + "," + cell + "\n";
    emit("nullsim/summary.csv", csv);
    log_ << "nullsim: " << cfg_.null_replicates << " replicates\n";
}

void Pipeline::manifest(const std::string& command) {
    auto listed = files_;
    std::sort(listed.begin(), listed.end());
    json doc;
    doc["provenance"] = provenance();
    doc["command"] = command;
    doc["files"] = listed;
    write_file(cfg_.out / "manifest.json", doc.dump(2) + "\n");
}

}  // namespace

std::vector<std::string> run_command(const std::string& command, const RunConfig& config, std::ostream& log) {
    if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end())
        throw InputError("unknown command " + command);
    if (config.contracts.empty() && config.samples.empty()) {
        log << command << ": no contracts or samples configured, nothing to do\n";
        return {};
    }
    Pipeline p(config, log);
    const bool all = command == "run-all";
    if (all || command == "clean") p.clean();
    if (all || command == "bars") p.bars();
    if (all || command == "detect") p.detect();
    if (all || command == "fit") p.fit();
    if (all || command == "dk") p.dk();
    if (all || command == "utest") p.utest();
    if (all || command == "taildep") p.taildep();
    if (all || command == "nullsim") p.nullsim();
    p.manifest(command);
    auto files = p.files();
    files.push_back("manifest.json");
    std::sort(files.begin(), files.end());
    return files;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Epsilon-drawdown event detection and dragon-king outlier analysis", "ddk"};
    app.set_version_flag("--version", std::string(DDK_VERSION));
    app.require_subcommand(1);

    std::string config_path;
    Overrides ov;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    int dt = 0;
    double eps0 = 0, p0 = 0;
    std::string out_dir;
    for (const auto& name : kCommands) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON run configuration")->required();
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--seed", seed, "random seed (overrides config)");
        sub->add_option("--workers", workers, "parallel workers")->check(CLI::PositiveNumber);
        sub->add_option("--dt", dt, "bar width in seconds")->check(CLI::PositiveNumber);
        sub->add_option("--eps0", eps0, "epsilon multiplier of previous-day volatility")->check(CLI::PositiveNumber);
        sub->add_option("--p0", p0, "significance threshold")->check(CLI::Range(0.0, 1.0));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    auto* sub = app.get_subcommands().front();
    if (sub->count("--out")) ov.out = fs::path(out_dir);
    if (sub->count("--seed")) ov.seed = seed;
    if (sub->count("--workers")) ov.workers = workers;
    if (sub->count("--dt")) ov.bar_width = dt;
    if (sub->count("--eps0")) ov.epsilon0 = eps0;
    if (sub->count("--p0")) ov.p0 = p0;

    try {
        const auto cfg = load_config(config_path, ov);
        const auto files = run_command(sub->get_name(), cfg, err);
        for (const auto& f : files) out << (cfg.out / f).string() << "\n";
        return 0;
    } catch (const InputError& e) {
        err << "ddk: " << e.what() << "\n";
        return 2;
    } catch (const fs::filesystem_error& e) {
        err << "ddk: " << e.what() << "\n";
        return 2;
    } catch (const AnalysisError& e) {
        err << "ddk: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "ddk: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace ddk::cli
