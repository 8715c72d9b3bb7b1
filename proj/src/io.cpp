#include "semrheo/io.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "semrheo/errors.hpp"

namespace semrheo::io {

std::string format_double(double value)
{
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc()) {
        throw Error("failed to format number");
    }
    return std::string(buf.data(), ptr);
}

namespace {

std::vector<std::string_view> split_csv(std::string_view line)
{
    if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
    }
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    for (;;) {
        const std::size_t comma = line.find(',', pos);
        fields.push_back(line.substr(pos, comma == std::string_view::npos ? comma : comma - pos));
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
    return fields;
}

template <typename T>
T parse_field(std::string_view field, std::size_t line_no)
{
    T value{};
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw FormatError("bad CSV field '" + std::string(field) + "'", line_no);
    }
    return value;
}

} // namespace

void write_msd_csv(std::ostream& out, const MsdCurve& curve)
{
    out << "delay,msd,count\n";
    for (std::size_t i = 0; i < curve.size(); ++i) {
        out << curve.delays[i] << ',' << format_double(curve.values[i]) << ',' << curve.counts[i]
            << '\n';
    }
}

MsdCurve read_msd_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || split_csv(line) != std::vector<std::string_view>{"delay", "msd", "count"}) {
        throw FormatError("expected header 'delay,msd,count'", 1);
    }
    MsdCurve curve;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto f = split_csv(line);
        if (f.size() != 3) {
            throw FormatError("expected 3 fields", line_no);
        }
        curve.delays.push_back(parse_field<std::size_t>(f[0], line_no));
        curve.values.push_back(parse_field<double>(f[1], line_no));
        curve.counts.push_back(parse_field<std::size_t>(f[2], line_no));
    }
    return curve;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj)
{
    out << 't';
    for (Eigen::Index d = 0; d < traj.dims(); ++d) {
        out << ",x" << d;
    }
    out << '\n';
    for (Eigen::Index t = 0; t < traj.size(); ++t) {
        out << t;
        for (Eigen::Index d = 0; d < traj.dims(); ++d) {
            out << ',' << format_double(traj.points()(t, d));
        }
        out << '\n';
    }
}

Trajectory read_trajectory_csv(std::istream& in, Provenance provenance)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw FormatError("empty trajectory CSV");
    }
    const auto header = split_csv(line);
    if (header.size() < 2 || header[0] != "t") {
        throw FormatError("expected header 't,x0,...'", 1);
    }
    for (std::size_t d = 1; d < header.size(); ++d) {
        if (header[d] != "x" + std::to_string(d - 1)) {
            throw FormatError("unexpected column '" + std::string(header[d]) + "'", 1);
        }
    }
    const std::size_t dims = header.size() - 1;
    std::vector<double> values;
    std::size_t rows = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto f = split_csv(line);
        if (f.size() != dims + 1) {
            throw FormatError("expected " + std::to_string(dims + 1) + " fields", line_no);
        }
        if (parse_field<std::size_t>(f[0], line_no) != rows) {
            throw FormatError("time index out of sequence", line_no);
        }
        for (std::size_t d = 1; d < f.size(); ++d) {
            values.push_back(parse_field<double>(f[d], line_no));
        }
        ++rows;
    }
    if (rows == 0) {
        throw FormatError("trajectory CSV has no rows");
    }
    Trajectory::Matrix points(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dims));
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t d = 0; d < dims; ++d) {
            points(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(d)) = values[r * dims + d];
        }
    }
    return Trajectory(std::move(points), provenance);
}

void write_projection_csv(std::ostream& out, const Projection2D& proj)
{
    out << "idx,x,y\n";
    for (Eigen::Index i = 0; i < proj.coords.rows(); ++i) {
        out << i << ',' << format_double(proj.coords(i, 0)) << ','
            << format_double(proj.coords(i, 1)) << '\n';
    }
}

void write_walk_csv(std::ostream& out, const Walk& walk)
{
    out << "step,token\n";
    for (std::size_t t = 0; t < walk.path.size(); ++t) {
        out << t << ',' << walk.path[t].token << '\n';
    }
}

void write_expected_msd_csv(std::ostream& out, const std::vector<std::size_t>& delays,
                            const std::vector<double>& values)
{
    out << "delay,expected_msd\n";
    for (std::size_t i = 0; i < delays.size(); ++i) {
        out << delays[i] << ',' << format_double(values[i]) << '\n';
    }
}

namespace {

Json window_json(const FitWindow& w) { return Json::array({w.lo, w.hi}); }

template <typename T>
Json optional_json(const std::optional<T>& v)
{
    return v ? Json(*v) : Json(nullptr);
}

} // namespace

Json to_json(const PowerLawFit& fit)
{
    Json j;
    j["alpha"] = fit.alpha;
    j["log_amplitude"] = fit.log_amplitude;
    j["r2"] = fit.r2;
    j["window"] = window_json(fit.window);
    return j;
}

Json to_json(const DiffusionReport& report)
{
    Json j;
    j["fit"] = to_json(report.fit);
    Json segments = Json::array();
    for (const auto& s : report.segments) {
        Json seg;
        seg["window"] = window_json(s.window);
        seg["alpha"] = s.alpha;
        segments.push_back(std::move(seg));
    }
    j["segments"] = std::move(segments);
    j["regime"] = std::string(to_string(report.regime));
    j["plateau_level"] = optional_json(report.plateau_level);
    j["tail_exponent"] = optional_json(report.tail_exponent);
    return j;
}

Json to_json(const AbsorptionReport& report)
{
    Json j;
    j["absorbed"] = report.absorbed;
    j["onset_step"] = optional_json(report.onset_step);
    Json cluster = Json::array();
    for (const auto& t : report.cluster) {
        cluster.push_back(t.token);
    }
    j["cluster"] = std::move(cluster);
    j["window"] = report.window;
    j["distinct_threshold"] = report.distinct_threshold;
    return j;
}

Json to_json(const WalkParams& params)
{
    Json j;
    j["start"] = params.start.token;
    j["top_n"] = params.top_n;
    j["steps"] = params.steps;
    Json guides = Json::array();
    for (const auto& g : params.guides) {
        guides.push_back(g.token);
    }
    j["guides"] = std::move(guides);
    j["seed"] = params.seed;
    j["self_exclusion"] = params.self_exclusion;
    return j;
}

Json to_json(const Walk& walk, bool include_candidates)
{
    Json j;
    j["params"] = to_json(walk.params);
    Json path = Json::array();
    for (const auto& t : walk.path) {
        path.push_back(t.token);
    }
    j["path"] = std::move(path);
    if (include_candidates) {
        Json log = Json::array();
        for (const auto& step : walk.candidate_log) {
            Json candidates = Json::array();
            for (const auto& n : step) {
                candidates.push_back(Json{{"token", n.token.token}, {"score", n.score}});
            }
            log.push_back(std::move(candidates));
        }
        j["candidate_log"] = std::move(log);
    }
    return j;
}

Walk walk_from_json(const Json& j, const EmbeddingSet& set)
{
    try {
        Walk walk;
        const auto& p = j.at("params");
        walk.params.start = set.ref(p.at("start").get<std::string>());
        walk.params.top_n = p.at("top_n").get<std::size_t>();
        walk.params.steps = p.at("steps").get<std::size_t>();
        for (const auto& g : p.at("guides")) {
            walk.params.guides.push_back(set.ref(g.get<std::string>()));
        }
        walk.params.seed = p.at("seed").get<std::uint64_t>();
        walk.params.self_exclusion = p.at("self_exclusion").get<bool>();
        for (const auto& t : j.at("path")) {
            walk.path.push_back(set.ref(t.get<std::string>()));
        }
        if (walk.path.size() != walk.params.steps + 1) {
            throw FormatError("walk path length does not match steps + 1");
        }
        if (auto it = j.find("candidate_log"); it != j.end()) {
            for (const auto& step : *it) {
                std::vector<Neighbor> candidates;
                for (const auto& n : step) {
                    candidates.push_back(
                        Neighbor{set.ref(n.at("token").get<std::string>()), n.at("score").get<double>()});
                }
                walk.candidate_log.push_back(std::move(candidates));
            }
        }
        return walk;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("walk JSON: ") + e.what());
    }
}

void write_json(std::ostream& out, const Json& j)
{
    out << j.dump(2) << '\n';
}

} // namespace semrheo::io
