#include "mnl/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include <boost/random/uniform_real_distribution.hpp>
#include <boost/version.hpp>
#include "json.hpp"

#include "mnl/oracle.hpp"

namespace mnl::bench {
namespace {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(s, &used);
    } catch (const std::exception&) {
        throw UsageError("cannot parse " + what + " '" + s + "' as a number");
    }
    if (used != s.size()) throw UsageError("trailing characters in " + what + " '" + s + "'");
    return x;
}

std::string join_items(const Assortment& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ';';
        out += std::to_string(s[i] + 1);
    }
    return out;
}

}  // namespace

void write_instance(std::ostream& os, const InstanceFile& file) {
    const auto& inst = file.inst;
    os << "n: " << inst.n << '\n' << "k: " << inst.k << '\n';
    os << "r:";
    for (double x : inst.r) os << ' ' << format_double(x);
    os << "\nv:";
    for (double x : inst.v) os << ' ' << format_double(x);
    os << "\nmeta:";
    for (const auto& [key, value] : file.meta) os << ' ' << key << '=' << value;
    os << '\n';
}

InstanceFile read_instance(std::istream& is) {
    InstanceFile file;
    bool have_n = false, have_k = false, have_r = false, have_v = false;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(is, line)) {
        ++line_number;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto colon = line.find(':');
        if (colon == std::string::npos)
            throw UsageError("instance line " + std::to_string(line_number) + ": missing ':'");
        const std::string key = trim(line.substr(0, colon));
        std::istringstream values(line.substr(colon + 1));
        std::vector<std::string> tokens;
        for (std::string tok; values >> tok;) tokens.push_back(tok);
        if (key == "n" || key == "k") {
            if (tokens.size() != 1)
                throw UsageError("instance line " + std::to_string(line_number) + ": expected one value");
            const double x = parse_double(tokens[0], key);
            (key == "n" ? file.inst.n : file.inst.k) = static_cast<int>(x);
            (key == "n" ? have_n : have_k) = true;
        } else if (key == "r" || key == "v") {
            auto& dst = key == "r" ? file.inst.r : file.inst.v;
            dst.clear();
            for (const auto& tok : tokens) dst.push_back(parse_double(tok, key));
            (key == "r" ? have_r : have_v) = true;
        } else if (key == "meta") {
            for (const auto& tok : tokens) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos)
                    throw UsageError("instance meta entry '" + tok + "' is not key=value");
                file.meta[tok.substr(0, eq)] = tok.substr(eq + 1);
            }
        } else {
            throw UsageError("instance line " + std::to_string(line_number) + ": unknown key '" + key + "'");
        }
    }
    if (!(have_n && have_k && have_r && have_v))
        throw UsageError("instance file must define n, k, r and v");
    try {
        file.inst.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return file;
}

void save_instance(const std::string& path, const InstanceFile& file) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_instance(os, file);
    if (!os) throw std::runtime_error("failed writing " + path);
}

InstanceFile load_instance(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open instance file " + path);
    return read_instance(is);
}

InstanceFile generate(const GenParams& params) {
    InstanceFile out;
    out.meta["family"] = params.family;
    out.meta["seed"] = std::to_string(params.seed);

    if (params.family == "lower-bound") {
        std::vector<double> gaps = params.gaps;
        if (gaps.size() == 1 && params.n - params.k > 1)
            gaps.assign(static_cast<std::size_t>(params.n - params.k), gaps[0]);
        try {
            out.inst = lower_bound_instance(params.n, params.k, gaps);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        std::string g;
        for (std::size_t i = 0; i < gaps.size(); ++i) g += (i ? "," : "") + format_double(gaps[i]);
        out.meta["gaps"] = g;
        return out;
    }

    if (params.n < 1 || params.k < 1 || params.k > params.n)
        throw UsageError("generator: need 1 <= k <= n");
    if (params.n > kBruteForceMaxItems)
        throw UsageError("generator: random families need n <= " +
                         std::to_string(kBruteForceMaxItems) + " for the uniqueness check");
    double v_lo = 0.0, v_hi = 1.0;
    if (params.family == "uniform") {
    } else if (params.family == "dense") {
        v_lo = 0.5;
    } else if (params.family == "sparse") {
        v_lo = 1.0 / (2.0 * params.k);
        v_hi = 1.0 / params.k;
    } else {
        throw UsageError("unknown family '" + params.family +
                         "' (expected uniform, dense, sparse or lower-bound)");
    }

    Rng rng = fork_stream(params.seed, 0);
    boost::random::uniform_real_distribution<double> unit(0.0, 1.0), param(v_lo, v_hi);
    constexpr int kMaxAttempts = 200000;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        Instance inst;
        inst.n = params.n;
        inst.k = params.k;
        for (int i = 0; i < params.n; ++i) {
            inst.r.push_back(unit(rng));
            inst.v.push_back(param(rng));
        }
        const GapVector gaps = suboptimality_gaps(inst);
        if (gaps.global_gap < kUniquenessMargin) continue;
        const double min_gap = *std::min_element(gaps.gaps.begin(), gaps.gaps.end());
        if (params.min_gap && min_gap < *params.min_gap) continue;
        if (params.max_min_gap && !(min_gap < *params.max_min_gap)) continue;
        out.inst = std::move(inst);
        out.meta["attempts"] = std::to_string(attempt + 1);
        if (params.min_gap) out.meta["min_gap"] = format_double(*params.min_gap);
        if (params.max_min_gap) out.meta["max_min_gap"] = format_double(*params.max_min_gap);
        return out;
    }
    throw UsageError("generator: no instance met the constraints in " +
                     std::to_string(kMaxAttempts) + " attempts");
}

Mode parse_mode(const std::string& s) {
    if (s == "pac") return Mode::pac;
    if (s == "pac-eps") return Mode::pac_eps;
    if (s == "regret") return Mode::regret;
    if (s == "oracle") return Mode::oracle;
    throw UsageError("unknown mode '" + s + "'");
}

std::string to_string(Mode m) {
    switch (m) {
        case Mode::pac: return "pac";
        case Mode::pac_eps: return "pac-eps";
        case Mode::regret: return "regret";
        case Mode::oracle: return "oracle";
    }
    return "?";
}

EstimatorKind parse_estimator(const std::string& s) {
    if (s == "naive") return EstimatorKind::naive;
    if (s == "reduced") return EstimatorKind::reduced;
    if (s == "adaptive") return EstimatorKind::adaptive;
    if (s == "reg") return EstimatorKind::reg;
    throw UsageError("unknown estimator '" + s + "'");
}

std::string to_string(EstimatorKind e) {
    switch (e) {
        case EstimatorKind::naive: return "naive";
        case EstimatorKind::reduced: return "reduced";
        case EstimatorKind::adaptive: return "adaptive";
        case EstimatorKind::reg: return "reg";
    }
    return "?";
}

std::string csv_header() {
    return "rep,seed,family,mode,estimator,steps,rough_steps,success,returned_size,returned_set,"
           "revenue_gap,regret,phases,status";
}

std::string csv_row(const ResultRow& row) {
    std::ostringstream os;
    os << row.rep << ',' << row.seed << ',' << row.family << ',' << row.mode << ','
       << row.estimator << ',' << row.steps << ',' << row.rough_steps << ','
       << (row.success ? 1 : 0) << ',' << row.returned_size << ',' << row.returned_set << ','
       << format_double(row.revenue_gap) << ',' << format_double(row.regret) << ','
       << row.phases << ',' << row.status;
    return os.str();
}

ResultRow parse_csv_row(const std::string& line, std::size_t line_number) {
    const auto f = split(line, ',');
    const auto fail = [&](const std::string& why) {
        return std::runtime_error("results row " + std::to_string(line_number) + ": " + why);
    };
    if (f.size() != 14) throw fail("expected 14 fields, found " + std::to_string(f.size()));
    ResultRow r;
    try {
        std::size_t used = 0;
        auto to_i64 = [&](const std::string& s) {
            const long long x = std::stoll(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return static_cast<std::int64_t>(x);
        };
        auto to_f = [&](const std::string& s) {
            const double x = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return x;
        };
        r.rep = static_cast<int>(to_i64(f[0]));
        r.seed = std::stoull(f[1]);
        r.family = f[2];
        r.mode = f[3];
        r.estimator = f[4];
        r.steps = to_i64(f[5]);
        r.rough_steps = to_i64(f[6]);
        r.success = to_i64(f[7]) != 0;
        r.returned_size = static_cast<int>(to_i64(f[8]));
        r.returned_set = f[9];
        r.revenue_gap = to_f(f[10]);
        r.regret = to_f(f[11]);
        r.phases = static_cast<int>(to_i64(f[12]));
        r.status = f[13];
    } catch (const std::exception& e) {
        throw fail(std::string("malformed field (") + e.what() + ")");
    }
    return r;
}

ResultRow run_replication(const ExperimentConfig& config, int rep,
                          std::vector<double>* regret_curve) {
    const Instance& inst = config.instance.inst;
    const auto opt = brute_force_optimum(inst);
    const std::int64_t horizon =
        config.mode == Mode::regret ? config.horizon : std::numeric_limits<std::int64_t>::max();
    Environment env(inst, fork_stream(config.seed, static_cast<std::uint64_t>(rep)), horizon);

    RunResult result;
    switch (config.mode) {
        case Mode::pac:
            switch (config.estimator) {
                case EstimatorKind::adaptive: result = pac_exact(env, config.delta); break;
                case EstimatorKind::naive: result = sar_mnl(env, config.delta, est_naive); break;
                case EstimatorKind::reduced: result = sar_mnl(env, config.delta, est_reduced); break;
                case EstimatorKind::reg: result = sar_mnl(env, config.delta, est_reg); break;
            }
            break;
        case Mode::pac_eps: result = pac_eps(env, config.delta, config.eps); break;
        case Mode::regret: result = regret_min(env, config.horizon); break;
        case Mode::oracle: throw UsageError("oracle mode has no replications");
    }

    ResultRow row;
    row.rep = rep;
    row.seed = stream_seed(config.seed, static_cast<std::uint64_t>(rep));
    const auto fam = config.instance.meta.find("family");
    row.family = fam == config.instance.meta.end() ? "file" : fam->second;
    row.mode = to_string(config.mode);
    row.estimator = config.mode == Mode::pac ? to_string(config.estimator)
                    : config.mode == Mode::regret ? "reg" : "adaptive";
    row.steps = result.steps;
    row.rough_steps = result.rough_steps;
    row.returned_size = static_cast<int>(result.returned.size());
    row.returned_set = join_items(result.returned);
    row.revenue_gap = opt.theta_star - revenue(inst, result.returned);
    row.regret = env.ledger().cum_regret;
    row.phases = result.phases;
    row.status = result.aborted ? "aborted" : result.horizon_reached ? "horizon" : "ok";
    row.success = config.mode == Mode::pac_eps ? row.revenue_gap <= config.eps
                                               : result.returned == opt.s_star;
    if (result.aborted) row.success = false;
    if (regret_curve) *regret_curve = env.ledger().curve(config.horizon);
    return row;
}

int worker_count(int requested) {
    if (requested > 0) return requested;
    if (const char* s = std::getenv("MNL_THREADS")) {
        const int x = std::atoi(s);
        if (x > 0) return x;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

ExperimentOutput run_experiment(const ExperimentConfig& config) {
    if (config.reps < 0) throw UsageError("reps must be nonnegative");
    ExperimentOutput out;
    out.rows.resize(static_cast<std::size_t>(config.reps));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (int rep = next++; rep < config.reps; rep = next++) {
            try {
                std::vector<double>* curve =
                    config.mode == Mode::regret && rep == 0 ? &out.regret_curve : nullptr;
                out.rows[static_cast<std::size_t>(rep)] = run_replication(config, rep, curve);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int workers = std::min(worker_count(config.threads), std::max(config.reps, 1));
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
    os << csv_header() << '\n';
    for (const auto& row : rows) os << csv_row(row) << '\n';
}

std::vector<ResultRow> read_results_csv(std::istream& is) {
    std::vector<ResultRow> rows;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(is, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_number == 1) {
            if (line != csv_header())
                throw std::runtime_error("results row 1: header does not match " +
                                         std::string(kCsvVersion));
            continue;
        }
        rows.push_back(parse_csv_row(line, line_number));
    }
    return rows;
}

std::string metadata_json(const ExperimentConfig& config, const std::string& timestamp) {
    nlohmann::ordered_json j;
    j["tool_version"] = kToolVersion;
    j["csv_version"] = kCsvVersion;
    j["csv_columns"] = split(csv_header(), ',');
    j["rng"] = std::string(kRngAlgorithm);
    j["master_seed"] = config.seed;
    j["mode"] = to_string(config.mode);
    j["estimator"] = to_string(config.estimator);
    j["delta"] = config.delta;
    j["eps"] = config.eps;
    j["horizon"] = config.horizon;
    j["reps"] = config.reps;
    j["instance_source"] = config.instance_source;
    j["instance"] = {{"n", config.instance.inst.n},
                     {"k", config.instance.inst.k},
                     {"r", config.instance.inst.r},
                     {"v", config.instance.inst.v},
                     {"meta", config.instance.meta}};
    j["schedule"] = {{"c0", ScheduleConstants::c0}, {"c2", ScheduleConstants::c2}};
    j["compiler"] = __VERSION__;
    j["boost"] = BOOST_LIB_VERSION;
    j["cplusplus"] = __cplusplus;
    j["timestamp"] = timestamp;
    return j.dump(2);
}

void print_oracle(std::ostream& os, const Instance& inst) {
    const auto opt = brute_force_optimum(inst);
    const auto gaps = suboptimality_gaps(inst);
    const auto u = advantage_scores(inst, opt.theta_star);
    os << "S*: " << opt.s_star.to_string() << '\n';
    os << "theta*: " << format_double(opt.theta_star) << '\n';
    os << "global_gap: " << format_double(gaps.global_gap) << '\n';
    os << "item,in_s_star,r,v,u,gap\n";
    for (int i = 0; i < inst.n; ++i)
        os << i + 1 << ',' << (opt.s_star.contains(i) ? 1 : 0) << ',' << format_double(inst.r[i])
           << ',' << format_double(inst.v[i]) << ',' << format_double(u[i]) << ','
           << format_double(gaps.gaps[i]) << '\n';
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    return values[lo] + (values[hi] - values[lo]) * (pos - static_cast<double>(lo));
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
    std::map<std::tuple<std::string, std::string, std::string>, std::vector<const ResultRow*>> groups;
    for (const auto& r : rows) groups[{r.family, r.mode, r.estimator}].push_back(&r);

    std::vector<SummaryRow> out;
    for (const auto& [key, members] : groups) {
        SummaryRow s;
        std::tie(s.family, s.mode, s.estimator) = key;
        s.count = members.size();
        std::vector<double> steps, regret, phases;
        double successes = 0.0;
        for (const auto* r : members) {
            steps.push_back(static_cast<double>(r->steps));
            regret.push_back(r->regret);
            phases.push_back(r->phases);
            successes += r->success ? 1.0 : 0.0;
        }
        const double n = static_cast<double>(members.size());
        s.success_rate = successes / n;
        for (double x : steps) s.mean_steps += x / n;
        for (double x : regret) s.mean_regret += x / n;
        s.median_steps = median(steps);
        s.p10_steps = quantile(steps, 0.1);
        s.p90_steps = quantile(steps, 0.9);
        s.median_regret = median(regret);
        s.median_phases = median(phases);
        out.push_back(s);
    }
    for (auto& s : out) {
        int rank = 1;
        for (const auto& other : out)
            if (other.family == s.family && other.mode == s.mode &&
                (other.median_steps < s.median_steps ||
                 (other.median_steps == s.median_steps && other.estimator < s.estimator)))
                ++rank;
        s.ordering = rank;
    }
    return out;
}

void write_summary(std::ostream& os, const std::vector<SummaryRow>& summary) {
    os << "family,mode,estimator,count,success_rate,mean_steps,median_steps,p10_steps,p90_steps,"
          "mean_regret,median_regret,median_phases,ordering\n";
    for (const auto& s : summary)
        os << s.family << ',' << s.mode << ',' << s.estimator << ',' << s.count << ','
           << format_double(s.success_rate) << ',' << format_double(s.mean_steps) << ','
           << format_double(s.median_steps) << ',' << format_double(s.p10_steps) << ','
           << format_double(s.p90_steps) << ',' << format_double(s.mean_regret) << ','
           << format_double(s.median_regret) << ',' << format_double(s.median_phases) << ','
           << s.ordering << '\n';
}

}  // namespace mnl::bench
