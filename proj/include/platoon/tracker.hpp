#pragma once

// Appearance-based multi-object tracker: cosine-similarity association against
// per-track feature centroids, constant-velocity Kalman filter on
// (x_c, y_c, s, a, vx, vy, vs), and age-based removal.

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "platoon/common.hpp"
#include "platoon/perception.hpp"

namespace platoon::tracker {

using StateVector = Eigen::Matrix<double, 7, 1>;
using StateMatrix = Eigen::Matrix<double, 7, 7>;
using MeasVector = Eigen::Matrix<double, 4, 1>;
using MeasMatrix = Eigen::Matrix<double, 4, 4>;

// State layout.
enum StateIndex : int { kXc = 0, kYc, kS, kA, kVx, kVy, kVs };

struct KalmanState {
    StateVector mean = StateVector::Zero();
    StateMatrix covariance = StateMatrix::Identity();
};

struct NoiseModel {
    StateMatrix initial_covariance;  // P0
    StateMatrix process;             // Q
    MeasMatrix measurement;          // R

    NoiseModel();
};

KalmanState kf_initiate(const perception::BBox& box, const NoiseModel& noise);

// Constant-velocity prediction: x_c += vx dt, y_c += vy dt, s += vs dt; P' = F P F^T + Q.
KalmanState kf_predict(const KalmanState& kf, double dt, const StateMatrix& process_noise);

// Linear correction with H selecting (x_c, y_c, s, a). Throws InvalidInput on
// a non-finite measurement or non-positive s / a.
KalmanState kf_update(const KalmanState& kf, const MeasVector& z, const MeasMatrix& measurement_noise);

MeasVector to_measurement(const perception::BBox& box);

// u.v / (|u||v|). Throws InvalidInput on zero vectors or mismatched sizes.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

// normalize((old + new) / 2). Antipodal inputs keep `old` and log a warning.
Embedding update_feature_centroid(std::span<const double> old_centroid,
                                  std::span<const double> new_feature);

struct Track {
    TrackId track_id = 0;
    KalmanState kf;
    Embedding feature_centroid;
    perception::ClassLabel class_label = perception::ClassLabel::LeaderMarker;
    int frames_since_update = 0;
    int hits = 1;

    // Current bounding box estimate with the area kept above `s_floor`.
    perception::BBox bbox(double s_floor) const;
};

struct TrackerConfig {
    double match_threshold = 0.65;
    int max_age = 30;  // frames
    double dt = 0.05;  // s
    double s_floor = 1.0;
    NoiseModel noise;

    void validate() const;
};

struct Match {
    TrackId track_id;
    std::size_t detection;

    bool operator==(const Match&) const = default;
};

struct Association {
    std::vector<Match> matches;  // in the order they were accepted
    std::vector<TrackId> unmatched_tracks;
    std::vector<std::size_t> unmatched_detections;
};

// Greedy matching in descending similarity; pairs below the threshold are never
// matched; ties go to the lower track id, then the lower detection index.
Association associate(std::span<const Track> tracks,
                      std::span<const perception::Detection> detections, const TrackerConfig& cfg);

enum class TrackEventKind { Created, Updated, Removed };

std::string_view to_string(TrackEventKind v);
TrackEventKind parse_track_event_kind(std::string_view text);

struct TrackEvent {
    TrackEventKind kind;
    TrackId track_id;

    bool operator==(const TrackEvent&) const = default;
};

struct TrackerState {
    std::vector<Track> tracks;  // ascending track_id
    TrackId next_id = 1;
};

struct StepResult {
    TrackerState state;
    std::vector<TrackEvent> events;
    Association association;
};

// One frame: predict, associate, update matched, spawn unmatched detections,
// age unmatched tracks, drop tracks older than max_age.
StepResult tracker_step(TrackerState state, std::span<const perception::Detection> detections,
                        const TrackerConfig& cfg);

// Owns a TrackerState across frames.
class Tracker {
public:
    explicit Tracker(TrackerConfig cfg = {});

    const std::vector<TrackEvent>& step(std::span<const perception::Detection> detections);

    const std::vector<Track>& tracks() const { return state_.tracks; }
    const TrackerConfig& config() const { return cfg_; }
    const Association& last_association() const { return association_; }
    // Incremented on every step; identifies the tracker state a result came from.
    std::uint64_t version() const { return version_; }

private:
    TrackerConfig cfg_;
    TrackerState state_;
    std::vector<TrackEvent> events_;
    Association association_;
    std::uint64_t version_ = 0;
};

}  // namespace platoon::tracker
