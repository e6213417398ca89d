#include "decent/sim/results.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <tuple>

#include <boost/math/distributions/students_t.hpp>

#include "decent/common/error.hpp"

namespace decent::sim {

const char* const trial_csv_header =
    "experiment,trial,param,value,sim_ms,wall_ms,dht_gets,dht_puts,appends,policy_decrypts,failures";
const char* const aggregate_csv_header =
    "experiment,param,value,trials,sim_ms_mean,sim_ms_ci_low,sim_ms_ci_high,dht_gets,dht_puts,appends,"
    "policy_decrypts,failures";

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string value_text(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

double mean_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

TrialRow make_row(std::string experiment, std::size_t trial, std::string param, double value, const Measurement& m) {
    TrialRow r;
    r.experiment = std::move(experiment);
    r.trial = trial;
    r.param = std::move(param);
    r.value = value;
    r.sim_ms = static_cast<double>(m.sim_us) / 1000.0;
    r.wall_ms = m.wall_ms;
    r.dht_gets = m.ops.dht_gets;
    r.dht_puts = m.ops.dht_puts;
    r.appends = m.ops.appends;
    r.policy_decrypts = m.ops.policy_decrypts;
    r.failures = m.ops.failures;
    return r;
}

Interval t_interval(const std::vector<double>& samples) {
    Interval out;
    out.mean = mean_of(samples);
    out.low = out.high = out.mean;
    const auto n = samples.size();
    if (n < 2) return out;
    double ss = 0;
    for (double s : samples) ss += (s - out.mean) * (s - out.mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    boost::math::students_t dist(static_cast<double>(n - 1));
    const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
    const double half = t * sd / std::sqrt(static_cast<double>(n));
    out.low = out.mean - half;
    out.high = out.mean + half;
    return out;
}

std::vector<Aggregate> aggregate(const std::vector<TrialRow>& rows) {
    std::vector<Aggregate> out;
    std::vector<std::vector<const TrialRow*>> members;
    std::map<std::tuple<std::string, std::string, double>, std::size_t> index;
    for (const auto& r : rows) {
        auto key = std::make_tuple(r.experiment, r.param, r.value);
        auto [it, fresh] = index.try_emplace(key, out.size());
        if (fresh) {
            out.push_back({r.experiment, r.param, r.value, 0, {}, 0, 0, 0, 0, 0});
            members.emplace_back();
        }
        members[it->second].push_back(&r);
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto& a = out[i];
        std::vector<double> sim, gets, puts, appends, decrypts, failures;
        for (const auto* r : members[i]) {
            sim.push_back(r->sim_ms);
            gets.push_back(static_cast<double>(r->dht_gets));
            puts.push_back(static_cast<double>(r->dht_puts));
            appends.push_back(static_cast<double>(r->appends));
            decrypts.push_back(static_cast<double>(r->policy_decrypts));
            failures.push_back(static_cast<double>(r->failures));
        }
        a.trials = members[i].size();
        a.sim_ms = t_interval(sim);
        a.dht_gets = mean_of(gets);
        a.dht_puts = mean_of(puts);
        a.appends = mean_of(appends);
        a.policy_decrypts = mean_of(decrypts);
        a.failures = mean_of(failures);
    }
    return out;
}

std::string trials_csv(const std::vector<TrialRow>& rows) {
    std::string out = std::string(trial_csv_header) + "\n";
    for (const auto& r : rows) {
        out += r.experiment + "," + std::to_string(r.trial) + "," + r.param + "," + value_text(r.value) + "," +
               num(r.sim_ms) + "," + num(r.wall_ms) + "," + std::to_string(r.dht_gets) + "," +
               std::to_string(r.dht_puts) + "," + std::to_string(r.appends) + "," + std::to_string(r.policy_decrypts) +
               "," + std::to_string(r.failures) + "\n";
    }
    return out;
}

std::string aggregates_csv(const std::vector<Aggregate>& aggregates) {
    std::string out = std::string(aggregate_csv_header) + "\n";
    for (const auto& a : aggregates) {
        out += a.experiment + "," + a.param + "," + value_text(a.value) + "," + std::to_string(a.trials) + "," +
               num(a.sim_ms.mean) + "," + num(a.sim_ms.low) + "," + num(a.sim_ms.high) + "," + num(a.dht_gets) + "," +
               num(a.dht_puts) + "," + num(a.appends) + "," + num(a.policy_decrypts) + "," + num(a.failures) + "\n";
    }
    return out;
}

void emit_results(const std::vector<TrialRow>& rows, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto write = [](const std::filesystem::path& p, const std::string& text) {
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        out << text;
        if (!out) throw Error(Errc::io_error, "cannot write " + p.string());
    };
    write(dir / "trials.csv", trials_csv(rows));
    write(dir / "aggregate.csv", aggregates_csv(aggregate(rows)));
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw Error(Errc::invalid_argument, "need at least two points");
    const double mx = mean_of(x), my = mean_of(y);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit f;
    f.slope = sxx == 0 ? 0 : sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r_squared = (sxx == 0 || syy == 0) ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

}  // namespace decent::sim
