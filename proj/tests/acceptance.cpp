// Acceptance gate: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes. Tolerances and limits are fixed here on purpose.

#include <Eigen/Cholesky>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "platoon/depth.hpp"
#include "platoon/harness/log.hpp"
#include "platoon/harness/metrics.hpp"
#include "platoon/harness/runner.hpp"
#include "platoon/harness/scenario.hpp"
#include "platoon/latch.hpp"
#include "platoon/tracker.hpp"

using namespace platoon;

namespace {

constexpr double kDepthRelTol = 1e-12;
constexpr double kKalmanTol = 1e-9;
constexpr double kSymTol = 1e-9;
constexpr double kPsdJitter = 1e-9;
constexpr double kMatchThreshold = 0.65;
constexpr int kRandomCases = 1000;
constexpr int kLatchFuzzSteps = 10000;
constexpr double kDesiredRange = 0.30;
constexpr double kRangeTol = 0.05;
constexpr Tick kConvergeWithin = 400;
constexpr Tick kHoldTicks = 200;
constexpr double kMinRange = 0.25;
constexpr int kStopLatency = 3;
constexpr int kPollPeriod = 2;
constexpr double kLimitAc1 = 1.0, kLimitAc23 = 5.0, kLimitScenario = 30.0;  // seconds

const std::filesystem::path kScenarios = PLATOON_SCENARIO_DIR;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& why)
    {
        if (!ok && pass) detail = why;
        pass = pass && ok;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

bool rel_close(double got, double want, double tol)
{
    return std::abs(got - want) <= tol * std::max(std::abs(want), 1e-300);
}

harness::Scenario scenario(const char* name)
{
    return harness::load_scenario(kScenarios / (std::string(name) + ".json"));
}

struct TimedRun {
    harness::RunResult result;
    double seconds;
};

TimedRun timed_run(const harness::Scenario& s, harness::TransportKind transport = harness::TransportKind::Sim)
{
    const auto t0 = std::chrono::steady_clock::now();
    harness::RunOptions opt;
    opt.transport = transport;
    auto r = harness::run(s, opt);
    return {std::move(r), seconds_since(t0)};
}

std::string csv(const harness::RunResult& r)
{
    std::ostringstream out;
    harness::write_log(out, r.header, r.rows);
    return out.str();
}

std::vector<const harness::LogRow*> rows_of(const harness::RunResult& r, const std::string& agent)
{
    std::vector<const harness::LogRow*> out;
    for (const auto& row : r.rows)
        if (row.agent == agent) out.push_back(&row);
    return out;
}

// AC1 -------------------------------------------------------------------------

Outcome depth_formulas()
{
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();

    perception::RelativeDepthMap ex;
    ex.width = ex.height = 2;
    ex.values = {1, 2, 3, 4};  // D11, D21 / D12, D22
    o.require(depth::bilinear_depth(ex, {0.25, 0.75}) == 2.75, "worked example is not 2.75");

    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> pos(1e-3, 1e3), frac(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < kRandomCases; ++i) {
        const double rel = pos(rng), ref_d = pos(rng), ref_rel = pos(rng);
        const double got = depth::calibrate(rel, {ref_d, ref_rel});
        const double want = oracle::calibrate(rel, ref_d, ref_rel);
        worst = std::max(worst, std::abs(got - want) / want);
        o.require(rel_close(got, want, kDepthRelTol), "calibrate differs from oracle");

        // Random map; the query lands anywhere with a full neighbourhood.
        const int w = 2 + static_cast<int>(rng() % 30), h = 2 + static_cast<int>(rng() % 30);
        perception::RelativeDepthMap m;
        m.width = w;
        m.height = h;
        for (int k = 0; k < w * h; ++k) m.values.push_back(pos(rng));
        const int x1 = static_cast<int>(rng() % (w - 1)), y1 = static_cast<int>(rng() % (h - 1));
        const double dx = std::min(frac(rng), 0.999999), dy = std::min(frac(rng), 0.999999);
        const double b = depth::bilinear_depth(m, {x1 + dx, y1 + dy});
        const double bw = oracle::bilinear(m.at(y1, x1), m.at(y1, x1 + 1), m.at(y1 + 1, x1),
                                           m.at(y1 + 1, x1 + 1), dx, dy);
        worst = std::max(worst, std::abs(b - bw) / bw);
        o.require(rel_close(b, bw, kDepthRelTol), "bilinear differs from oracle");
    }
    const double t = seconds_since(t0);
    o.require(t < kLimitAc1, "runtime " + fmt(t) + " s over the limit");
    if (o.pass)
        o.detail = "2x1000 random cases, worst rel err " + fmt(worst) + ", " + fmt(t) + " s";
    return o;
}

// AC2 -------------------------------------------------------------------------

template <int N>
Eigen::Matrix<double, N, N> random_spd(std::mt19937_64& rng, double scale, double floor)
{
    std::uniform_real_distribution<double> u(-1, 1);
    Eigen::Matrix<double, N, N> a;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) a(i, j) = u(rng);
    return scale * (a * a.transpose()) + floor * Eigen::Matrix<double, N, N>::Identity();
}

template <class M>
oracle::Mat to_oracle(const M& m)
{
    oracle::Mat out = oracle::zeros(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
    return out;
}

Outcome kalman_equivalence()
{
    using tracker::MeasMatrix;
    using tracker::StateMatrix;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> px(0, 640), vel(-20, 20), dt(0.01, 0.5), area(50, 5000),
        aspect(0.3, 3);
    double worst = 0.0;
    auto compare = [&](const tracker::KalmanState& k, const oracle::Kalman& ref, const char* what) {
        for (int i = 0; i < 7; ++i) {
            const double e = std::abs(k.mean(i) - ref.x[i]) / std::max(1.0, std::abs(ref.x[i]));
            worst = std::max(worst, e);
            o.require(e <= kKalmanTol, std::string(what) + " mean differs from oracle");
            for (int j = 0; j < 7; ++j) {
                const double c = std::abs(k.covariance(i, j) - ref.P[i][j]) /
                                 std::max(1.0, std::abs(ref.P[i][j]));
                worst = std::max(worst, c);
                o.require(c <= kKalmanTol, std::string(what) + " covariance differs from oracle");
            }
        }
        const StateMatrix& p = k.covariance;
        o.require((p - p.transpose()).cwiseAbs().maxCoeff() < kSymTol, "covariance not symmetric");
        const StateMatrix j = p + kPsdJitter * StateMatrix::Identity();
        o.require(Eigen::LLT<StateMatrix>(j).info() == Eigen::Success, "covariance not PSD");
    };

    for (int i = 0; i < kRandomCases; ++i) {
        tracker::KalmanState k;
        k.mean << px(rng), px(rng), area(rng), aspect(rng), vel(rng), vel(rng), vel(rng);
        k.covariance = random_spd<7>(rng, 10.0, 0.1);
        const StateMatrix q = random_spd<7>(rng, 0.5, 1e-3);
        const MeasMatrix r = random_spd<4>(rng, 2.0, 0.05);
        tracker::MeasVector z;
        z << px(rng), px(rng), area(rng), aspect(rng);
        const double step = dt(rng);

        oracle::Kalman ref{{}, to_oracle(k.covariance)};
        for (int s = 0; s < 7; ++s) ref.x.push_back(k.mean(s));

        k = tracker::kf_predict(k, step, q);
        ref = oracle::kalman_predict(ref, step, to_oracle(q));
        compare(k, ref, "predict");
        k = tracker::kf_update(k, z, r);
        ref = oracle::kalman_update(ref, {z(0), z(1), z(2), z(3)}, to_oracle(r));
        compare(k, ref, "update");
    }
    const double t = seconds_since(t0);
    o.require(t < kLimitAc23, "runtime " + fmt(t) + " s over the limit");
    if (o.pass) o.detail = "1000 random predict+update, worst err " + fmt(worst) + ", " + fmt(t) + " s";
    return o;
}

// AC3 -------------------------------------------------------------------------

Embedding near(const Embedding& c, double sim, std::mt19937_64& rng)
{
    // sim * c + sqrt(1 - sim^2) * u with u a random unit vector orthogonal to c.
    auto u = world::random_unit_embedding(c.size(), rng);
    double dot = 0;
    for (std::size_t k = 0; k < c.size(); ++k) dot += u[k] * c[k];
    double n = 0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        u[k] -= dot * c[k];
        n += u[k] * u[k];
    }
    Embedding out(c.size());
    for (std::size_t k = 0; k < c.size(); ++k)
        out[k] = sim * c[k] + std::sqrt(1 - sim * sim) * u[k] / std::sqrt(n);
    return out;
}

Outcome association_threshold()
{
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> around(0.55, 0.75);
    tracker::TrackerConfig cfg;
    o.require(cfg.match_threshold == kMatchThreshold, "default threshold is not 0.65");

    long instances = 0, matched_pairs = 0, rejected_above_floor = 0;
    for (std::size_t nt = 0; nt <= 4; ++nt) {
        for (std::size_t nd = 0; nd <= 4; ++nd) {
            for (int rep = 0; rep < 400; ++rep, ++instances) {
                const std::size_t dim = rep % 2 ? 3 : 8;
                const bool ties = rep % 4 == 0;
                std::vector<Embedding> pool;
                for (int k = 0; k < 3; ++k) pool.push_back(world::random_unit_embedding(dim, rng));

                std::vector<tracker::Track> tracks;
                std::vector<long long> ids;
                TrackId next = 1 + static_cast<TrackId>(rng() % 3);
                for (std::size_t t = 0; t < nt; ++t) {
                    tracker::Track tr;
                    tr.track_id = next;
                    next += 1 + static_cast<TrackId>(rng() % 3);
                    tr.feature_centroid =
                        ties ? pool[rng() % pool.size()] : world::random_unit_embedding(dim, rng);
                    tracks.push_back(tr);
                    ids.push_back(tr.track_id);
                }
                std::shuffle(tracks.begin(), tracks.end(), rng);
                ids.clear();
                for (const auto& tr : tracks) ids.push_back(tr.track_id);

                std::vector<perception::Detection> dets;
                for (std::size_t d = 0; d < nd; ++d) {
                    perception::Detection det;
                    if (ties) det.embedding = pool[rng() % pool.size()];
                    else if (nt > 0) det.embedding = near(tracks[rng() % nt].feature_centroid, around(rng), rng);
                    else det.embedding = world::random_unit_embedding(dim, rng);
                    dets.push_back(det);
                }

                oracle::Mat sim(nt, oracle::Vec(nd));
                for (std::size_t t = 0; t < nt; ++t)
                    for (std::size_t d = 0; d < nd; ++d)
                        sim[t][d] = oracle::cosine(tracks[t].feature_centroid, dets[d].embedding);
                std::vector<tracker::Match> want;
                for (auto [t, d] : oracle::greedy_matches(sim, ids, kMatchThreshold))
                    want.push_back({tracks[t].track_id, d});

                const auto got = tracker::associate(tracks, dets, cfg);
                o.require(got.matches == want, "greedy matcher differs from the arg-max oracle");
                for (const auto& m : got.matches) {
                    const auto t = static_cast<std::size_t>(
                        std::find(ids.begin(), ids.end(), m.track_id) - ids.begin());
                    o.require(sim[t][m.detection] >= kMatchThreshold, "pair below 0.65 matched");
                    ++matched_pairs;
                }
                for (std::size_t t = 0; t < nt; ++t)
                    for (std::size_t d = 0; d < nd; ++d)
                        if (sim[t][d] >= 0.55 && sim[t][d] < kMatchThreshold) ++rejected_above_floor;
            }
        }
    }
    // Just either side of the threshold.
    for (double s : {0.6499, 0.64999999, 0.65000001, 0.6501}) {
        tracker::Track tr;
        tr.track_id = 1;
        tr.feature_centroid = {1.0, 0.0};
        perception::Detection det;
        det.embedding = {s, std::sqrt(1 - s * s)};
        const auto got = tracker::associate(std::vector{tr}, std::vector{det}, cfg);
        o.require(got.matches.size() == (s >= kMatchThreshold ? 1u : 0u), "threshold boundary wrong");
    }
    const double t = seconds_since(t0);
    o.require(t < kLimitAc23, "runtime " + fmt(t) + " s over the limit");
    if (o.pass)
        o.detail = std::to_string(instances) + " instances up to 4x4, " + std::to_string(matched_pairs) +
                   " matches, " + std::to_string(rejected_above_floor) + " near-threshold pairs refused, " +
                   fmt(t) + " s";
    return o;
}

// AC4 -------------------------------------------------------------------------

Outcome id_stability(std::vector<TimedRun>& timings)
{
    Outcome o;
    const auto short_s = scenario("occlusion_short");
    const auto long_s = scenario("occlusion_long");
    const int max_age = short_s.tracker.max_age;

    auto occlusion_len = [](const harness::Scenario& s) {
        return s.occlusions.size() == 1 ? s.occlusions[0].end - s.occlusions[0].start : Tick{-1};
    };
    o.require(short_s.duration_ticks == 500, "short scenario is not 500 ticks");
    o.require(short_s.noise.detection.embedding_sigma == 0.05, "embedding noise is not 0.05");
    o.require(occlusion_len(short_s) == 10 && 10 < max_age, "short occlusion is not 10 ticks");
    o.require(occlusion_len(long_s) == max_age + 5, "long occlusion is not max_age + 5 ticks");
    o.require(long_s.noise.detection.embedding_sigma == 0.05, "embedding noise is not 0.05");

    timings.push_back(timed_run(short_s));
    const auto& rs = timings.back().result;
    const auto* fs = rs.metrics.follower("F1");
    o.require(fs && fs->id_switches == 0, "ID switches in the short occlusion run");
    o.require(fs && fs->tracks_created == 1 && fs->tracks_removed == 0,
              "short occlusion created or removed tracks");
    o.require(rs.ok(), "short occlusion run has invariant violations");

    timings.push_back(timed_run(long_s));
    const auto& rl = timings.back().result;
    const auto* fl = rl.metrics.follower("F1");
    o.require(fl && fl->tracks_removed == 1 && fl->tracks_created == 2,
              "long occlusion is not one removal and one new track");
    Tick removed_at = -1, recreated_at = -1;
    int created = 0;
    for (const auto* r : rows_of(rl, "F1")) {
        if (r->tracks_removed > 0 && removed_at < 0) removed_at = r->tick;
        created += r->tracks_created;
        if (created == 2 && recreated_at < 0) recreated_at = r->tick;
    }
    o.require(removed_at >= 0 && recreated_at > removed_at, "new track did not follow the removal");
    o.require(rl.ok(), "long occlusion run has invariant violations");
    if (o.pass)
        o.detail = "10-tick occlusion: 0 switches, 1 track; " + std::to_string(max_age + 5) +
                   "-tick occlusion: removed at tick " + std::to_string(removed_at) + ", new track at " +
                   std::to_string(recreated_at);
    return o;
}

// AC5 -------------------------------------------------------------------------

Outcome following(std::vector<TimedRun>& timings)
{
    Outcome o;
    const auto s = scenario("baseline_follow");
    const auto& lead = s.leader();
    const auto* f = s.find_agent("F1");
    o.require(lead.cruise_speed == 0.2, "leader speed is not 0.2 m/s");
    o.require(f && world::euclidean_range(lead.pose, f->pose) == 1.0, "follower is not 1.0 m behind");
    o.require(s.planner.desired_range == kDesiredRange, "desired range is not 0.30 m");

    timings.push_back(timed_run(s));
    const auto& r = timings.back().result;
    o.require(r.ok(), "run has invariant violations");
    // Independent of the summary metrics: recompute from the rows.
    std::optional<Tick> converged;
    double min_range = 1e9;
    Tick last = 0;
    for (const auto* row : rows_of(r, "F1")) {
        last = row->tick;
        if (!row->range_true) continue;
        min_range = std::min(min_range, *row->range_true);
        const bool inside = std::abs(*row->range_true - kDesiredRange) <= kRangeTol;
        if (inside && !converged) converged = row->tick;
        if (!inside) converged.reset();
    }
    o.require(converged.has_value() && *converged <= kConvergeWithin, "did not converge within 400 ticks");
    o.require(converged && last - *converged + 1 >= kHoldTicks, "did not hold the range for 200 ticks");
    o.require(min_range >= kMinRange, "range dropped below 0.25 m");
    const auto* m = r.metrics.follower("F1");
    o.require(m && m->convergence_tick == converged, "summary convergence tick disagrees with the rows");
    if (o.pass)
        o.detail = "converged at tick " + std::to_string(*converged) + ", held " +
                   std::to_string(last - *converged + 1) + " ticks, min range " + fmt(min_range) + " m";
    return o;
}

// AC6 -------------------------------------------------------------------------

Outcome stop_propagation(std::vector<TimedRun>& timings)
{
    Outcome o;
    const auto s = scenario("obstacle_stop");
    o.require(s.network.status_uplink.max_latency() == kStopLatency, "status link latency is not 3");
    o.require(s.network.poll_period == kPollPeriod, "poll period is not 2");
    const int bound = kStopLatency + kPollPeriod;

    timings.push_back(timed_run(s));
    const auto& r = timings.back().result;
    o.require(r.ok(), "run has invariant violations");
    o.require(!r.metrics.stop_latencies.empty(), "no STOP happened");

    std::string detail;
    for (const auto& sl : r.metrics.stop_latencies) {
        o.require(sl.latency && *sl.latency <= bound, sl.agent + " observed STOP too late");
        if (sl.latency) detail += sl.agent + "=" + std::to_string(*sl.latency) + " ";
    }

    for (const auto& a : s.agents) {
        if (a.role != world::Role::Follower) continue;
        const auto rows = rows_of(r, a.id);
        std::optional<TrackId> before, after;
        bool seen_stop = false;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto* row = rows[i];
            if (row->fleet_observed == "STOP") {
                if (!seen_stop && i + 1 < rows.size()) {
                    const auto* next = rows[i + 1];
                    o.require(next->cmd_linear == 0.0 && next->cmd_angular == 0.0,
                              a.id + " moved on the tick after observing STOP");
                }
                o.require(row->cmd_linear == 0.0 && row->cmd_angular == 0.0, a.id + " moved during STOP");
                seen_stop = true;
                continue;
            }
            if (row->plan != "follow") continue;
            if (!seen_stop) before = row->target_track;
            else if (!after) after = row->target_track;
        }
        o.require(seen_stop, a.id + " never observed STOP");
        o.require(before && after && before == after, a.id + " did not resume on the same track");
        if (before && after) detail += a.id + " track " + std::to_string(*before) + "->" + std::to_string(*after) + " ";
    }
    if (o.pass) o.detail = "bound " + std::to_string(bound) + " ticks; latencies " + detail;
    return o;
}

// AC7 -------------------------------------------------------------------------

Outcome latch_safety()
{
    using namespace latch;
    Outcome o;
    std::mt19937_64 rng(707);
    const FaultThresholds th;
    Latch l(th);

    harness::LogHeader header;
    header.scenario = "latch_fuzz";
    header.t_track = th.track_lost;
    header.t_fail = th.comms_lost;
    header.t_depth_fail = th.depth_invalid;
    std::vector<harness::LogRow> rows;

    // Flags flip rarely so both short glitches and sustained faults occur.
    TriggerConditions cond{true, true, true};
    int run_leader = 0, run_comms = 0, run_depth = 0;
    int engagements = 0, rejections = 0, failsafes = 0;
    for (Tick t = 0; t < kLatchFuzzSteps; ++t) {
        auto flip = [&](bool& f) {
            if (rng() % 100 < (f ? 3u : 8u)) f = !f;
        };
        flip(cond.leader_recognized);
        flip(cond.comms_healthy);
        flip(cond.depth_valid);
        run_leader = cond.leader_recognized ? 0 : run_leader + 1;
        run_comms = cond.comms_healthy ? 0 : run_comms + 1;
        run_depth = cond.depth_valid ? 0 : run_depth + 1;

        std::vector<LatchCommand> cmds;
        for (unsigned k = rng() % 3; k > 0 && rng() % 3 == 0; --k) {
            const auto origin = rng() % 2 ? CommandOrigin::Leader : CommandOrigin::Operator;
            cmds.push_back({rng() % 3 ? CommandVerb::Engage : CommandVerb::Disengage, origin, t,
                            origin == CommandOrigin::Leader ? "L" : "operator"});
        }
        const bool engage_cmd =
            std::any_of(cmds.begin(), cmds.end(), [](const auto& c) { return c.verb == CommandVerb::Engage; });

        const LatchMode before = l.state().mode;
        const auto res = l.step(cmds, cond, t);
        const LatchMode after = res.state.mode;

        const bool sustained = run_leader > th.track_lost || run_comms > th.comms_lost ||
                               run_depth > th.depth_invalid;
        if (after == LatchMode::Engaged && before == LatchMode::Disengaged) {
            ++engagements;
            o.require(engage_cmd && cond.all(), "engaged without command and valid triggers");
        }
        o.require(!(after == LatchMode::Engaged && sustained), "engaged while a fault is sustained");

        std::string events;
        for (const auto& e : res.events) {
            if (e.kind == LatchEventKind::EngageRejected) ++rejections;
            if (e.kind == LatchEventKind::Disengaged && e.reason.kind == ReasonKind::FailSafe) ++failsafes;
            if (!events.empty()) events += '|';
            events += std::string(to_string(e.kind)) + ":" + to_string(e.reason);
        }

        harness::LogRow row;
        row.tick = t;
        row.agent = "F1";
        row.role = "follower";
        row.latch = std::string(to_string(after));
        row.latch_reason = to_string(res.state.reason);
        row.latch_event = events;
        row.engage_cmd = engage_cmd ? 1 : 0;
        row.leader_recognized = cond.leader_recognized;
        row.comms_healthy = cond.comms_healthy;
        row.depth_valid = cond.depth_valid;
        row.plan = "idle";
        row.fleet_observed = row.fleet_server = "RUN";
        rows.push_back(row);
    }
    o.require(engagements > 50 && failsafes > 20 && rejections > 50, "fuzz did not exercise the latch");

    // The replay checker must agree on the same trace.
    const auto verdict = harness::check_log({header, rows});
    o.require(verdict.ok(), "log replay reports " + std::to_string(verdict.violations.size()) + " violations");
    if (o.pass)
        o.detail = std::to_string(kLatchFuzzSteps) + " steps: " + std::to_string(engagements) +
                   " engagements, " + std::to_string(rejections) + " rejections, " +
                   std::to_string(failsafes) + " fail-safes, replay clean";
    return o;
}

// AC8 -------------------------------------------------------------------------

std::vector<std::string> event_sequence(const harness::RunResult& r)
{
    std::vector<std::string> out;
    for (const auto& row : r.rows) {
        if (!row.is_follower()) continue;
        out.push_back(std::to_string(row.tick) + "," + row.agent + "," + row.plan + "," + row.latch + "," +
                      row.latch_reason + "," + row.latch_event + "," +
                      (row.target_track ? std::to_string(*row.target_track) : ""));
    }
    return out;
}

Outcome determinism(std::vector<TimedRun>& timings)
{
    Outcome o;
    int scenarios = 0, full_match = 0;
    double slowest = 0.0;
    for (const auto& entry : std::filesystem::directory_iterator(kScenarios)) {
        if (entry.path().extension() != ".json") continue;
        const auto s = harness::load_scenario(entry.path());
        const std::string name = s.name;
        auto a = timed_run(s);
        auto b = timed_run(s);
        auto h = timed_run(s, harness::TransportKind::Http);
        o.require(csv(a.result) == csv(b.result), name + ": equal seeds gave different CSV");
        o.require(event_sequence(a.result) == event_sequence(h.result),
                  name + ": sim and http event sequences differ");
        full_match += csv(a.result) == csv(h.result) ? 1 : 0;
        ++scenarios;
        for (auto* t : {&a, &b, &h}) slowest = std::max(slowest, t->seconds);
        timings.push_back(std::move(a));
    }
    for (const auto& t : timings) slowest = std::max(slowest, t.seconds);
    o.require(scenarios >= 5, "scenario directory incomplete");
    o.require(slowest < kLimitScenario, "a scenario run took " + fmt(slowest) + " s");
    if (o.pass)
        o.detail = std::to_string(scenarios) + " scenarios byte-identical on rerun; sim/http events equal (" +
                   std::to_string(full_match) + " also byte-identical); slowest run " + fmt(slowest) + " s";
    return o;
}

}  // namespace

int main()
{
    std::vector<TimedRun> timings;
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"AC1 depth formulas", depth_formulas},
        {"AC2 kalman equivalence", kalman_equivalence},
        {"AC3 association threshold", association_threshold},
        {"AC4 id stability", [&] { return id_stability(timings); }},
        {"AC5 30 cm following", [&] { return following(timings); }},
        {"AC6 stop propagation", [&] { return stop_propagation(timings); }},
        {"AC7 latch safety", latch_safety},
        {"AC8 determinism", [&] { return determinism(timings); }},
    };
    bool all = true;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        all = all && o.pass;
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
