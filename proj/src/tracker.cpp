#include "platoon/tracker.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <spdlog/spdlog.h>

#include "platoon/kernels.hpp"

namespace platoon::tracker {

std::string_view to_string(TrackEventKind v)
{
    switch (v) {
    case TrackEventKind::Created: return "created";
    case TrackEventKind::Updated: return "updated";
    case TrackEventKind::Removed: return "removed";
    }
    return "?";
}

TrackEventKind parse_track_event_kind(std::string_view text)
{
    if (text == "created") return TrackEventKind::Created;
    if (text == "updated") return TrackEventKind::Updated;
    if (text == "removed") return TrackEventKind::Removed;
    throw InvalidInput("unknown track event: " + std::string(text));
}

NoiseModel::NoiseModel()
{
    initial_covariance = StateMatrix::Zero();
    initial_covariance.diagonal() << 10.0, 10.0, 100.0, 1e-2, 1e4, 1e4, 1e4;
    process = StateMatrix::Zero();
    process.diagonal() << 1.0, 1.0, 1.0, 1e-6, 0.01, 0.01, 1e-4;
    measurement = MeasMatrix::Zero();
    measurement.diagonal() << 1.0, 1.0, 10.0, 1e-2;
}

MeasVector to_measurement(const perception::BBox& box)
{
    return MeasVector(box.x_c, box.y_c, box.s, box.a);
}

KalmanState kf_initiate(const perception::BBox& box, const NoiseModel& noise)
{
    KalmanState kf;
    kf.mean.setZero();
    kf.mean.head<4>() = to_measurement(box);
    kf.covariance = noise.initial_covariance;
    return kf;
}

KalmanState kf_predict(const KalmanState& kf, double dt, const StateMatrix& process_noise)
{
    if (!(dt > 0.0)) throw InvalidInput("kf_predict: dt must be positive");
    StateMatrix F = StateMatrix::Identity();
    F(kXc, kVx) = dt;
    F(kYc, kVy) = dt;
    F(kS, kVs) = dt;

    KalmanState out;
    out.mean = F * kf.mean;
    out.covariance = F * kf.covariance * F.transpose() + process_noise;
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
    return out;
}

KalmanState kf_update(const KalmanState& kf, const MeasVector& z, const MeasMatrix& measurement_noise)
{
    if (!z.allFinite()) throw InvalidInput("kf_update: non-finite measurement");
    if (!(z(2) > 0.0) || !(z(3) > 0.0)) throw InvalidInput("kf_update: s and a must be positive");

    // H selects the first four components, so H P = top rows of P.
    const Eigen::Matrix<double, 4, 7> HP = kf.covariance.topRows<4>();
    const MeasMatrix S = HP.leftCols<4>() + measurement_noise;
    const Eigen::LLT<MeasMatrix> llt(S);
    if (llt.info() != Eigen::Success) throw InvalidInput("kf_update: innovation covariance not SPD");
    // K = P H^T S^-1 = (S^-1 H P)^T
    const Eigen::Matrix<double, 7, 4> K = llt.solve(HP).transpose();

    KalmanState out;
    out.mean = kf.mean + K * (z - kf.mean.head<4>());

    // Joseph form keeps the posterior symmetric PSD.
    StateMatrix IKH = StateMatrix::Identity();
    IKH.leftCols<4>() -= K;
    out.covariance = IKH * kf.covariance * IKH.transpose() + K * measurement_noise * K.transpose();
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
    return out;
}

double cosine_similarity(std::span<const double> u, std::span<const double> v)
{
    if (u.size() != v.size()) throw InvalidInput("cosine_similarity: dimension mismatch");
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (!(nu > 0.0) || !(nv > 0.0)) throw InvalidInput("cosine_similarity: zero vector");
    return std::clamp(dot / std::sqrt(nu * nv), -1.0, 1.0);
}

Embedding update_feature_centroid(std::span<const double> old_centroid,
                                  std::span<const double> new_feature)
{
    if (old_centroid.size() != new_feature.size())
        throw InvalidInput("update_feature_centroid: dimension mismatch");
    Embedding mean(old_centroid.size());
    double norm = 0.0;
    for (std::size_t i = 0; i < mean.size(); ++i) {
        mean[i] = 0.5 * (old_centroid[i] + new_feature[i]);
        norm += mean[i] * mean[i];
    }
    norm = std::sqrt(norm);
    if (norm < 1e-12) {
        spdlog::warn("antipodal feature update; keeping previous centroid");
        return Embedding(old_centroid.begin(), old_centroid.end());
    }
    for (auto& x : mean) x /= norm;
    return mean;
}

perception::BBox Track::bbox(double s_floor) const
{
    return {kf.mean(kXc), kf.mean(kYc), std::max(kf.mean(kS), s_floor),
            std::max(kf.mean(kA), 1e-6)};
}

void TrackerConfig::validate() const
{
    if (!(match_threshold > 0.0 && match_threshold < 1.0))
        throw InvalidInput("tracker: match_threshold must lie in (0, 1)");
    if (max_age < 1) throw InvalidInput("tracker: max_age must be >= 1");
    if (!(dt > 0.0)) throw InvalidInput("tracker: dt must be positive");
    if (!(s_floor > 0.0)) throw InvalidInput("tracker: s_floor must be positive");
}

Association associate(std::span<const Track> tracks,
                      std::span<const perception::Detection> detections, const TrackerConfig& cfg)
{
    Association out;
    if (tracks.empty() || detections.empty()) {
        for (const auto& t : tracks) out.unmatched_tracks.push_back(t.track_id);
        for (std::size_t d = 0; d < detections.size(); ++d) out.unmatched_detections.push_back(d);
        return out;
    }

    const std::size_t dim = tracks.front().feature_centroid.size();
    std::vector<double> rows, cols;
    rows.reserve(tracks.size() * dim);
    cols.reserve(detections.size() * dim);
    for (const auto& t : tracks) {
        if (t.feature_centroid.size() != dim) throw InvalidInput("associate: dimension mismatch");
        rows.insert(rows.end(), t.feature_centroid.begin(), t.feature_centroid.end());
    }
    for (const auto& d : detections) {
        if (d.embedding.size() != dim) throw InvalidInput("associate: dimension mismatch");
        cols.insert(cols.end(), d.embedding.begin(), d.embedding.end());
    }
    std::vector<double> sim(tracks.size() * detections.size());
    kernels::parallel::similarity_matrix(rows, tracks.size(), cols, detections.size(), dim, sim);

    struct Candidate {
        double similarity;
        std::size_t track;
        std::size_t detection;
    };
    std::vector<Candidate> candidates;
    for (std::size_t t = 0; t < tracks.size(); ++t) {
        for (std::size_t d = 0; d < detections.size(); ++d) {
            const double s = sim[t * detections.size() + d];
            if (s >= cfg.match_threshold) candidates.push_back({s, t, d});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        if (tracks[a.track].track_id != tracks[b.track].track_id)
            return tracks[a.track].track_id < tracks[b.track].track_id;
        return a.detection < b.detection;
    });

    std::vector<bool> track_used(tracks.size(), false), det_used(detections.size(), false);
    for (const auto& c : candidates) {
        if (track_used[c.track] || det_used[c.detection]) continue;
        track_used[c.track] = det_used[c.detection] = true;
        out.matches.push_back({tracks[c.track].track_id, c.detection});
    }
    for (std::size_t t = 0; t < tracks.size(); ++t)
        if (!track_used[t]) out.unmatched_tracks.push_back(tracks[t].track_id);
    for (std::size_t d = 0; d < detections.size(); ++d)
        if (!det_used[d]) out.unmatched_detections.push_back(d);
    return out;
}

StepResult tracker_step(TrackerState state, std::span<const perception::Detection> detections,
                        const TrackerConfig& cfg)
{
    StepResult result;
    for (auto& t : state.tracks) t.kf = kf_predict(t.kf, cfg.dt, cfg.noise.process);

    result.association = associate(state.tracks, detections, cfg);

    std::vector<bool> matched(state.tracks.size(), false);
    for (const auto& m : result.association.matches) {
        auto it = std::find_if(state.tracks.begin(), state.tracks.end(),
                               [&](const Track& t) { return t.track_id == m.track_id; });
        const auto& det = detections[m.detection];
        it->kf = kf_update(it->kf, to_measurement(det.bbox), cfg.noise.measurement);
        it->feature_centroid = update_feature_centroid(it->feature_centroid, det.embedding);
        it->frames_since_update = 0;
        it->hits += 1;
        matched[static_cast<std::size_t>(it - state.tracks.begin())] = true;
    }
    for (std::size_t i = 0; i < state.tracks.size(); ++i) {
        if (matched[i]) result.events.push_back({TrackEventKind::Updated, state.tracks[i].track_id});
        else state.tracks[i].frames_since_update += 1;
    }

    std::erase_if(state.tracks, [&](const Track& t) {
        if (t.frames_since_update <= cfg.max_age) return false;
        result.events.push_back({TrackEventKind::Removed, t.track_id});
        return true;
    });

    for (std::size_t d : result.association.unmatched_detections) {
        const auto& det = detections[d];
        Track t;
        t.track_id = state.next_id++;
        t.kf = kf_initiate(det.bbox, cfg.noise);
        t.feature_centroid = det.embedding;
        t.class_label = det.class_label;
        t.frames_since_update = 0;
        t.hits = 1;
        result.events.push_back({TrackEventKind::Created, t.track_id});
        state.tracks.push_back(std::move(t));
    }

    result.state = std::move(state);
    return result;
}

Tracker::Tracker(TrackerConfig cfg) : cfg_(std::move(cfg))
{
    cfg_.validate();
}

const std::vector<TrackEvent>& Tracker::step(std::span<const perception::Detection> detections)
{
    auto result = tracker_step(std::move(state_), detections, cfg_);
    state_ = std::move(result.state);
    events_ = std::move(result.events);
    association_ = std::move(result.association);
    ++version_;
    return events_;
}

}  // namespace platoon::tracker
