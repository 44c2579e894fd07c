#include "platoon/harness/log.hpp"

#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace platoon::harness {

namespace {

constexpr std::string_view kMagic = "# platoon-log v1";

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(std::move(cur));
    return out;
}

template <class T>
T parse_number(const std::string& text, const std::string& what)
{
    T v{};
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || text.empty())
        throw InvalidInput("bad " + what + " '" + text + "'");
    return v;
}

template <class T>
std::optional<T> parse_optional(const std::string& text, const std::string& what)
{
    if (text.empty()) return std::nullopt;
    return parse_number<T>(text, what);
}

std::string opt_double(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

}  // namespace

std::string format_double(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw InvalidInput("format_double failed");
    return std::string(buf, ptr);
}

const std::vector<std::string>& log_columns()
{
    static const std::vector<std::string> cols{
        "tick",           "agent",          "role",           "x",
        "y",              "theta",          "imu_heading",    "v",
        "omega",          "latch",          "latch_reason",   "latch_event",
        "engage_cmd",     "leader_recognized", "comms_healthy", "depth_valid",
        "plan",           "target_track",   "obstacle_in_frame", "fleet_observed",
        "observed_version", "fleet_server", "server_version", "unresolved",
        "range_true",     "range_measured", "linear_dev",     "angular_dev",
        "cmd_linear",     "cmd_angular",    "tracks_created", "tracks_removed"};
    return cols;
}

void write_log(std::ostream& out, const LogHeader& h, const std::vector<LogRow>& rows)
{
    out << kMagic << " scenario=" << h.scenario << " seed=" << h.seed << " stop_bound=" << h.stop_bound
        << " t_track=" << h.t_track << " t_fail=" << h.t_fail << " t_depth_fail=" << h.t_depth_fail
        << " desired_range=" << format_double(h.desired_range) << '\n';
    const auto& cols = log_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const auto& r : rows) {
        out << r.tick << ',' << r.agent << ',' << r.role << ',' << format_double(r.x) << ','
            << format_double(r.y) << ',' << format_double(r.theta) << ','
            << format_double(r.imu_heading) << ',' << format_double(r.v) << ','
            << format_double(r.omega) << ',' << r.latch << ',' << r.latch_reason << ','
            << r.latch_event << ',' << r.engage_cmd << ',' << r.leader_recognized << ','
            << r.comms_healthy << ',' << r.depth_valid << ',' << r.plan << ','
            << (r.target_track ? std::to_string(*r.target_track) : "") << ',' << r.obstacle_in_frame
            << ',' << r.fleet_observed << ',' << r.observed_version << ',' << r.fleet_server << ','
            << r.server_version << ',' << r.unresolved << ',' << opt_double(r.range_true) << ','
            << opt_double(r.range_measured) << ',' << opt_double(r.linear_dev) << ','
            << opt_double(r.angular_dev) << ',' << format_double(r.cmd_linear) << ','
            << format_double(r.cmd_angular) << ',' << r.tracks_created << ',' << r.tracks_removed
            << '\n';
    }
}

ParsedLog read_log(std::istream& in)
{
    ParsedLog log;
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || !line.starts_with(kMagic))
        throw InvalidInput("line 1: not a platoon log");

    std::map<std::string, std::string> kv;
    {
        std::istringstream fields(line.substr(kMagic.size()));
        std::string tok;
        while (fields >> tok) {
            auto eq = tok.find('=');
            if (eq != std::string::npos) kv[tok.substr(0, eq)] = tok.substr(eq + 1);
        }
    }
    try {
        log.header.scenario = kv.at("scenario");
        log.header.seed = parse_number<std::uint64_t>(kv.at("seed"), "seed");
        log.header.stop_bound = parse_number<int>(kv.at("stop_bound"), "stop_bound");
        log.header.t_track = parse_number<int>(kv.at("t_track"), "t_track");
        log.header.t_fail = parse_number<int>(kv.at("t_fail"), "t_fail");
        log.header.t_depth_fail = parse_number<int>(kv.at("t_depth_fail"), "t_depth_fail");
        log.header.desired_range = parse_number<double>(kv.at("desired_range"), "desired_range");
    } catch (const std::out_of_range&) {
        throw InvalidInput("line 1: header is missing a field");
    } catch (const InvalidInput& e) {
        throw InvalidInput(std::string("line 1: ") + e.what());
    }

    ++line_no;
    if (!std::getline(in, line) || split(line, ',') != log_columns())
        throw InvalidInput("line 2: unexpected column header");

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto c = split(line, ',');
        if (c.size() != log_columns().size())
            throw InvalidInput("line " + std::to_string(line_no) + ": expected " +
                               std::to_string(log_columns().size()) + " cells");
        try {
            LogRow r;
            std::size_t i = 0;
            r.tick = parse_number<Tick>(c[i++], "tick");
            r.agent = c[i++];
            r.role = c[i++];
            r.x = parse_number<double>(c[i++], "x");
            r.y = parse_number<double>(c[i++], "y");
            r.theta = parse_number<double>(c[i++], "theta");
            r.imu_heading = parse_number<double>(c[i++], "imu_heading");
            r.v = parse_number<double>(c[i++], "v");
            r.omega = parse_number<double>(c[i++], "omega");
            r.latch = c[i++];
            r.latch_reason = c[i++];
            r.latch_event = c[i++];
            r.engage_cmd = parse_number<int>(c[i++], "engage_cmd");
            r.leader_recognized = parse_number<int>(c[i++], "leader_recognized");
            r.comms_healthy = parse_number<int>(c[i++], "comms_healthy");
            r.depth_valid = parse_number<int>(c[i++], "depth_valid");
            r.plan = c[i++];
            r.target_track = parse_optional<TrackId>(c[i++], "target_track");
            r.obstacle_in_frame = parse_number<int>(c[i++], "obstacle_in_frame");
            r.fleet_observed = c[i++];
            r.observed_version = parse_number<std::uint64_t>(c[i++], "observed_version");
            r.fleet_server = c[i++];
            r.server_version = parse_number<std::uint64_t>(c[i++], "server_version");
            r.unresolved = parse_number<int>(c[i++], "unresolved");
            r.range_true = parse_optional<double>(c[i++], "range_true");
            r.range_measured = parse_optional<double>(c[i++], "range_measured");
            r.linear_dev = parse_optional<double>(c[i++], "linear_dev");
            r.angular_dev = parse_optional<double>(c[i++], "angular_dev");
            r.cmd_linear = parse_number<double>(c[i++], "cmd_linear");
            r.cmd_angular = parse_number<double>(c[i++], "cmd_angular");
            r.tracks_created = parse_number<int>(c[i++], "tracks_created");
            r.tracks_removed = parse_number<int>(c[i++], "tracks_removed");
            log.rows.push_back(std::move(r));
        } catch (const InvalidInput& e) {
            throw InvalidInput("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return log;
}

}  // namespace platoon::harness
