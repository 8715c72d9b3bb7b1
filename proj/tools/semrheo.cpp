// semrheo: similarity walks through embedding spaces and MSD analysis of
// walks, documents and synthetic reference trajectories.
//
// Exit codes: 0 success, 2 input/format error, 3 unknown token,
// 4 degenerate data (too short, constant, empty pool).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "semrheo/document.hpp"
#include "semrheo/embedding_store.hpp"
#include "semrheo/errors.hpp"
#include "semrheo/io.hpp"
#include "semrheo/msd.hpp"
#include "semrheo/projection.hpp"
#include "semrheo/synthetic.hpp"
#include "semrheo/walker.hpp"

namespace fs = std::filesystem;
using namespace semrheo;

namespace {

enum ExitCode : int { kOk = 0, kInputError = 2, kUnknownToken = 3, kDegenerate = 4 };

struct RunConfig {
    // convert
    std::string in_format = "word2vec";
    std::size_t glove_dims = 0;
    std::string in_path;
    std::string out_path;

    // shared
    std::string embeddings;
    std::string out_dir = ".";
    std::uint64_t seed = 0;

    // walks
    std::string start;
    std::vector<std::string> guides;
    std::size_t top_n = 10;
    std::size_t steps = 1000;
    bool no_self_exclusion = false;
    std::size_t ensemble = 1;
    std::size_t jobs = 1;
    std::size_t absorb_window = 50;
    std::size_t absorb_threshold = 0;  // 0: use top_n
    bool no_candidate_log = false;

    // analysis
    std::size_t window_lo = 0;
    std::size_t window_hi = 0;
    std::size_t max_breakpoints = 2;
    double tail_fraction = 0.1;
    bool normalize = false;

    // doc
    std::string text;
    std::string sentence_embeddings;
    std::string split = "naive_punct";

    // simulate
    std::string kind = "brownian";
    std::size_t dims = 2;
    double step_std = 1.0;
    std::vector<double> velocity;
    double theta = 0.05;
    double sigma = 1.0;
    double mu = 1.5;
    double x_min = 1.0;
    std::size_t max_delay = 0;
};

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot open '" + path.string() + "' for writing");
    }
    body(out);
    if (!out) {
        throw Error("write failed for '" + path.string() + "'");
    }
}

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

AnalysisOptions analysis_options(const RunConfig& cfg)
{
    AnalysisOptions opt;
    if (cfg.window_lo != 0 || cfg.window_hi != 0) {
        opt.window = FitWindow{cfg.window_lo == 0 ? 1 : cfg.window_lo, cfg.window_hi};
        if (opt.window->hi == 0) {
            throw InvalidArgument("--window-hi is required with --window-lo");
        }
    }
    opt.max_breakpoints = cfg.max_breakpoints;
    opt.tail_fraction = cfg.tail_fraction;
    return opt;
}

std::string suffixed(const std::string& stem, std::size_t ordinal, bool ensemble, const char* ext)
{
    if (!ensemble) {
        return stem + ext;
    }
    char buf[16];
    std::snprintf(buf, sizeof buf, "_%03zu", ordinal);
    return stem + buf + ext;
}

void write_projection(const fs::path& path, const Trajectory& traj)
{
    if (traj.size() < 3 || traj.dims() < 2) {
        std::cerr << "note: projection skipped (needs >= 3 points of dimension >= 2)\n";
        return;
    }
    const Projection2D proj = pca_2d(traj.points());
    write_file(path, [&](std::ostream& o) { io::write_projection_csv(o, proj); });
}

int cmd_convert(const RunConfig& cfg)
{
    std::ifstream in(cfg.in_path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open '" + cfg.in_path + "'");
    }
    EmbeddingSet set = cfg.in_format == "glove" ? load_glove_text(in, cfg.glove_dims)
                                                : load_word2vec_text(in);
    save_canonical_file(set, cfg.out_path);
    std::cout << set.size() << ' ' << set.dims() << '\n';
    return kOk;
}

int cmd_walk(const RunConfig& cfg, bool guided)
{
    const EmbeddingSet set = load_canonical_file(cfg.embeddings);
    WalkParams params;
    params.start = set.ref(cfg.start);
    for (const auto& g : cfg.guides) {
        params.guides.push_back(set.ref(g));
    }
    if (guided && params.guides.empty()) {
        throw InvalidArgument("guided walks need at least one --guide");
    }
    params.top_n = cfg.top_n;
    params.steps = cfg.steps;
    params.seed = cfg.seed;
    params.self_exclusion = !cfg.no_self_exclusion;
    if (cfg.ensemble < 1) {
        throw InvalidArgument("--ensemble must be >= 1");
    }

    const std::vector<Walk> walks = run_ensemble(set, params, cfg.ensemble, cfg.jobs);

    fs::create_directories(cfg.out_dir);
    const fs::path dir(cfg.out_dir);
    const bool many = walks.size() > 1;
    const AnalysisOptions opt = analysis_options(cfg);
    const std::size_t window = std::min(cfg.absorb_window, cfg.steps);
    const std::size_t threshold = cfg.absorb_threshold == 0 ? cfg.top_n : cfg.absorb_threshold;

    int rc = kOk;
    std::vector<MsdCurve> curves;
    for (std::size_t w = 0; w < walks.size(); ++w) {
        const Walk& walk = walks[w];
        write_file(dir / suffixed("walk", w, many, ".json"), [&](std::ostream& o) {
            io::write_json(o, io::to_json(walk, !cfg.no_candidate_log));
        });
        write_file(dir / suffixed("walk", w, many, ".csv"),
                   [&](std::ostream& o) { io::write_walk_csv(o, walk); });
        write_file(dir / suffixed("absorption", w, many, ".json"), [&](std::ostream& o) {
            io::write_json(o, io::to_json(detect_absorption(walk, window, threshold)));
        });

        const Trajectory traj = walk_trajectory(set, walk, cfg.normalize);
        const MsdCurve curve = msd(traj);
        write_file(dir / suffixed("msd", w, many, ".csv"),
                   [&](std::ostream& o) { io::write_msd_csv(o, curve); });
        curves.push_back(curve);

        io::Json report;
        try {
            report = io::to_json(analyze_trajectory(traj, opt).report);
        } catch (const InsufficientDataError& e) {
            report = io::Json{{"error", e.what()}};
            rc = kDegenerate;
        } catch (const DegenerateDataError& e) {
            report = io::Json{{"error", e.what()}};
            rc = kDegenerate;
        }
        write_file(dir / suffixed("report", w, many, ".json"),
                   [&](std::ostream& o) { io::write_json(o, report); });
        write_projection(dir / suffixed("projection", w, many, ".csv"), traj);
    }

    if (many) {
        MsdCurve mean = curves.front();
        for (std::size_t c = 1; c < curves.size(); ++c) {
            for (std::size_t i = 0; i < mean.size(); ++i) {
                mean.values[i] += curves[c].values[i];
            }
        }
        for (double& v : mean.values) {
            v /= static_cast<double>(curves.size());
        }
        write_file(dir / "msd_mean.csv", [&](std::ostream& o) { io::write_msd_csv(o, mean); });
    }
    return rc;
}

int cmd_doc(const RunConfig& cfg)
{
    fs::create_directories(cfg.out_dir);
    const fs::path dir(cfg.out_dir);

    std::optional<Trajectory> traj;
    if (!cfg.sentence_embeddings.empty()) {
        traj = load_sentence_embeddings(load_canonical_file(cfg.sentence_embeddings));
    } else {
        if (cfg.text.empty() || cfg.embeddings.empty()) {
            throw InvalidArgument("doc needs --text with --embeddings, or --sentences");
        }
        const EmbeddingSet words = load_canonical_file(cfg.embeddings);
        const SplitMode mode = cfg.split == "lines" ? SplitMode::lines : SplitMode::naive_punct;
        const SentenceSequence seq = split_sentences(read_text(cfg.text), mode, cfg.text);
        SentenceEmbedding emb = embed_sentences_avg(seq, words);
        io::Json summary;
        summary["source"] = seq.source;
        summary["n_split"] = seq.sentences.size();
        summary["n_used"] = emb.used.size();
        summary["n_dropped"] = emb.dropped.size();
        summary["dropped"] = emb.dropped;
        write_file(dir / "sentences.json", [&](std::ostream& o) { io::write_json(o, summary); });
        traj = std::move(emb.trajectory);
    }
    if (cfg.normalize) {
        Trajectory::Matrix p = traj->points();
        for (Eigen::Index i = 0; i < p.rows(); ++i) {
            const double n = p.row(i).norm();
            if (n == 0.0) {
                throw DegenerateVectorError("sentence vector " + std::to_string(i));
            }
            p.row(i) /= n;
        }
        traj = Trajectory(std::move(p), Provenance::document);
    }

    const TrajectoryAnalysis analysis = analyze_document(*traj, analysis_options(cfg));
    write_file(dir / "msd.csv", [&](std::ostream& o) { io::write_msd_csv(o, analysis.curve); });
    write_file(dir / "report.json",
               [&](std::ostream& o) { io::write_json(o, io::to_json(analysis.report)); });
    write_projection(dir / "projection.csv", *traj);
    return kOk;
}

int cmd_simulate(const RunConfig& cfg)
{
    synthetic::Spec spec;
    spec.dims = cfg.dims;
    spec.steps = cfg.steps;
    spec.seed = cfg.seed;
    if (cfg.kind == "brownian") {
        spec.params = synthetic::Brownian{cfg.step_std};
    } else if (cfg.kind == "ballistic") {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cfg.dims));
        if (cfg.velocity.empty()) {
            v[0] = 1.0;
        } else if (cfg.velocity.size() == cfg.dims) {
            v = Eigen::Map<const Eigen::VectorXd>(cfg.velocity.data(),
                                                  static_cast<Eigen::Index>(cfg.velocity.size()));
        } else {
            throw InvalidArgument("--velocity needs exactly --dims components");
        }
        spec.params = synthetic::Ballistic{v};
    } else if (cfg.kind == "ou") {
        spec.params = synthetic::OuConfined{cfg.theta, cfg.sigma};
    } else {
        spec.params = synthetic::Levy{cfg.mu, cfg.x_min};
    }

    const Trajectory traj = synthetic::generate(spec);
    const MsdCurve curve = msd(traj, cfg.max_delay);

    fs::create_directories(cfg.out_dir);
    const fs::path dir(cfg.out_dir);
    write_file(dir / "trajectory.csv", [&](std::ostream& o) { io::write_trajectory_csv(o, traj); });
    write_file(dir / "msd.csv", [&](std::ostream& o) { io::write_msd_csv(o, curve); });
    if (spec.kind() != synthetic::Kind::levy) {
        const auto expected = synthetic::expected_msd(spec, curve.delays);
        write_file(dir / "expected_msd.csv",
                   [&](std::ostream& o) { io::write_expected_msd_csv(o, curve.delays, expected); });
    } else {
        fs::remove(dir / "expected_msd.csv");
    }

    const AnalysisOptions opt = analysis_options(cfg);
    DiffusionReport report = analyze_curve(curve, opt);
    try {
        report.tail_exponent = tail_exponent(step_lengths(traj), opt.tail_fraction);
    } catch (const InsufficientDataError&) {
        report.tail_exponent.reset();
    }
    write_file(dir / "report.json", [&](std::ostream& o) { io::write_json(o, io::to_json(report)); });
    return kOk;
}

void add_analysis_flags(CLI::App* cmd, RunConfig& cfg)
{
    cmd->add_option("--window-lo", cfg.window_lo, "First delay of the fit window");
    cmd->add_option("--window-hi", cfg.window_hi, "Last delay of the fit window");
    cmd->add_option("--max-breakpoints", cfg.max_breakpoints, "Phase breakpoints to search (0-2)")
        ->check(CLI::Range(0, 2));
    cmd->add_option("--tail-fraction", cfg.tail_fraction, "Hill estimator tail fraction")
        ->check(CLI::Range(1e-9, 0.5));
}

void add_walk_flags(CLI::App* cmd, RunConfig& cfg)
{
    cmd->add_option("--embeddings,-e", cfg.embeddings, "Canonical embedding file")->required();
    cmd->add_option("--start,-s", cfg.start, "Start token")->required();
    cmd->add_option("--top-n,-n", cfg.top_n, "Candidate list size")->check(CLI::PositiveNumber);
    cmd->add_option("--steps,-k", cfg.steps, "Walk length")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", cfg.seed, "Seed of the first walk");
    cmd->add_option("--ensemble", cfg.ensemble, "Number of walks (seeds seed .. seed+ensemble-1)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--jobs,-j", cfg.jobs, "Concurrent walks")
        ->envname("SEMRHEO_JOBS")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--no-self-exclusion", cfg.no_self_exclusion,
                  "Let the current token appear among its own candidates");
    cmd->add_option("--absorb-window", cfg.absorb_window, "Absorption window (clamped to steps)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--absorb-threshold", cfg.absorb_threshold,
                    "Max distinct tokens per window for absorption (default: top-n)");
    cmd->add_flag("--no-candidate-log", cfg.no_candidate_log, "Omit candidate lists from walk JSON");
    cmd->add_flag("--normalize", cfg.normalize, "Unit-normalize vectors before the MSD");
    cmd->add_option("--out,-o", cfg.out_dir, "Output directory");
    add_analysis_flags(cmd, cfg);
}

int classify(const std::exception& e)
{
    if (dynamic_cast<const UnknownTokenError*>(&e) != nullptr) {
        return kUnknownToken;
    }
    if (dynamic_cast<const InsufficientDataError*>(&e) != nullptr
        || dynamic_cast<const DegenerateDataError*>(&e) != nullptr
        || dynamic_cast<const EmptyDocumentError*>(&e) != nullptr
        || dynamic_cast<const DegenerateVectorError*>(&e) != nullptr
        || dynamic_cast<const EmptyPoolError*>(&e) != nullptr) {
        return kDegenerate;
    }
    return kInputError;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Similarity walks and MSD analysis of embedding trajectories"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto* convert = app.add_subcommand("convert", "Convert word2vec/GloVe text to the canonical format");
    convert->add_option("--format,-f", cfg.in_format, "Input format")
        ->check(CLI::IsMember({"word2vec", "glove"}));
    convert->add_option("--dims", cfg.glove_dims, "Vector dimension (GloVe input)");
    convert->add_option("--in,-i", cfg.in_path, "Input text file")->required();
    convert->add_option("--out,-o", cfg.out_path, "Output canonical file")->required();

    auto* walk = app.add_subcommand("walk", "Free similarity walk(s)");
    add_walk_flags(walk, cfg);

    auto* guided = app.add_subcommand("guided", "Guided (tethered) similarity walk(s)");
    add_walk_flags(guided, cfg);
    guided->add_option("--guide,-g", cfg.guides, "Tether token (repeatable)")->required();

    auto* doc = app.add_subcommand("doc", "MSD analysis of a document's sentence trajectory");
    doc->add_option("--text,-t", cfg.text, "UTF-8 text file");
    doc->add_option("--embeddings,-e", cfg.embeddings, "Canonical word embedding file");
    doc->add_option("--sentences", cfg.sentence_embeddings,
                    "Canonical sentence-embedding file (tokens 0..N-1) instead of --text");
    doc->add_option("--split", cfg.split, "Sentence splitting rule")
        ->check(CLI::IsMember({"lines", "naive_punct"}));
    doc->add_flag("--normalize", cfg.normalize, "Unit-normalize sentence vectors before the MSD");
    doc->add_option("--out,-o", cfg.out_dir, "Output directory");
    add_analysis_flags(doc, cfg);

    auto* simulate = app.add_subcommand("simulate", "Reference trajectory with a known diffusion law");
    simulate->add_option("--kind", cfg.kind, "Process")
        ->check(CLI::IsMember({"brownian", "ballistic", "ou", "levy"}));
    simulate->add_option("--dims", cfg.dims, "Dimension")->check(CLI::PositiveNumber);
    simulate->add_option("--steps", cfg.steps, "Number of steps");
    simulate->add_option("--seed", cfg.seed, "Seed");
    simulate->add_option("--step-std", cfg.step_std, "Brownian per-axis step std");
    simulate->add_option("--velocity", cfg.velocity, "Ballistic velocity components");
    simulate->add_option("--theta", cfg.theta, "OU reversion rate");
    simulate->add_option("--sigma", cfg.sigma, "OU stationary std per axis");
    simulate->add_option("--mu", cfg.mu, "Levy tail exponent");
    simulate->add_option("--x-min", cfg.x_min, "Levy minimum step");
    simulate->add_option("--max-delay", cfg.max_delay, "Largest MSD delay (0: all)");
    simulate->add_option("--out,-o", cfg.out_dir, "Output directory");
    add_analysis_flags(simulate, cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInputError;
    }

    try {
        if (convert->parsed()) {
            return cmd_convert(cfg);
        }
        if (walk->parsed()) {
            return cmd_walk(cfg, false);
        }
        if (guided->parsed()) {
            return cmd_walk(cfg, true);
        }
        if (doc->parsed()) {
            return cmd_doc(cfg);
        }
        return cmd_simulate(cfg);
    } catch (const UnknownTokenError& e) {
        std::cerr << "semrheo: unknown token: " << e.token() << '\n';
        return kUnknownToken;
    } catch (const std::exception& e) {
        std::cerr << "semrheo: " << e.what() << '\n';
        return classify(e);
    }
}
