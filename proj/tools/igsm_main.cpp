// Command-line entry point: generate / curate / train / eval / sweep /
// twogap / report. Every run writes its resolved configuration next to its
// outputs; reruns with the same resolved configuration reproduce outputs
// byte-identically.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "igsm/checkpoint.hpp"
#include "igsm/curation.hpp"
#include "igsm/eval.hpp"
#include "igsm/generate.hpp"
#include "igsm/report.hpp"
#include "igsm/trainer.hpp"
#include "igsm/twogap.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct ConfigInvalid : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Key-value option set: command-line flags win over the --config file, which
// wins over defaults. Unknown config keys are rejected.
class Opts {
public:
    explicit Opts(CLI::App* app) : app_(app) {
        app_->add_option("--config", config_path_,
                         "key=value or JSON config file; flags override it");
    }

    void define(const std::string& key, const std::string& desc,
                const std::string& default_value = "", bool required = false) {
        auto& slot = cli_[key];
        app_->add_option("--" + key, slot, desc);
        defaults_[key] = default_value;
        if (required) required_.push_back(key);
    }

    // Merge defaults <- config file <- command line; called inside the handler.
    void resolve() {
        resolved_ = defaults_;
        if (!config_path_.empty()) {
            for (const auto& [k, v] : load_config_file(config_path_)) {
                if (!defaults_.count(k))
                    throw ConfigInvalid("unknown config key '" + k + "'");
                resolved_[k] = v;
            }
        }
        for (const auto& [k, v] : cli_)
            if (app_->count("--" + k) > 0) resolved_[k] = v;
        for (const auto& k : required_)
            if (resolved_[k].empty())
                throw ConfigInvalid("missing required option '--" + k + "'");
    }

    const std::string& str(const std::string& key) const { return resolved_.at(key); }
    bool has(const std::string& key) const { return !resolved_.at(key).empty(); }
    int integer(const std::string& key) const {
        try {
            return std::stoi(str(key));
        } catch (...) {
            throw ConfigInvalid("option '" + key + "' is not an integer: " + str(key));
        }
    }
    double real(const std::string& key) const {
        try {
            return std::stod(str(key));
        } catch (...) {
            throw ConfigInvalid("option '" + key + "' is not a number: " + str(key));
        }
    }
    bool flag(const std::string& key) const {
        const auto& v = str(key);
        if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
        if (v == "0" || v == "false" || v == "off" || v == "no") return false;
        throw ConfigInvalid("option '" + key + "' is not a boolean: " + v);
    }
    std::pair<int, int> range(const std::string& key) const {
        const auto& v = str(key);
        auto dots = v.find("..");
        if (dots == std::string::npos)
            throw ConfigInvalid("option '" + key + "' must look like lo..hi: " + v);
        try {
            return {std::stoi(v.substr(0, dots)), std::stoi(v.substr(dots + 2))};
        } catch (...) {
            throw ConfigInvalid("option '" + key + "' must look like lo..hi: " + v);
        }
    }
    template <class T>
    std::vector<T> list(const std::string& key) const {
        std::vector<T> out;
        std::istringstream in(str(key));
        std::string item;
        while (std::getline(in, item, ',')) {
            try {
                if constexpr (std::is_same_v<T, uint64_t>)
                    out.push_back(std::stoull(item));
                else
                    out.push_back(static_cast<T>(std::stoll(item)));
            } catch (...) {
                throw ConfigInvalid("option '" + key + "' has a bad list entry: " + item);
            }
        }
        if (out.empty()) throw ConfigInvalid("option '" + key + "' is an empty list");
        return out;
    }

    std::string resolved_text() const {
        std::ostringstream out;
        for (const auto& [k, v] : resolved_) out << k << '=' << v << '\n';
        return out.str();
    }
    void echo(const fs::path& dir) const {
        fs::create_directories(dir);
        std::ofstream(dir / "resolved-config.txt") << resolved_text();
    }
    void override_value(const std::string& key, const std::string& value) {
        if (!resolved_.count(key)) throw ConfigInvalid("unknown config key '" + key + "'");
        resolved_[key] = value;
    }

    static std::map<std::string, std::string> load_config_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigInvalid("cannot read config file " + path);
        std::stringstream buffer;
        buffer << in.rdbuf();
        std::string text = buffer.str();
        std::map<std::string, std::string> out;
        size_t first = text.find_first_not_of(" \t\r\n");
        if (first != std::string::npos && text[first] == '{') {
            auto j = json::parse(text);
            for (const auto& [k, v] : j.items())
                out[k] = v.is_string() ? v.get<std::string>() : v.dump();
            return out;
        }
        std::istringstream lines(text);
        std::string line;
        while (std::getline(lines, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            size_t start = line.find_first_not_of(" \t");
            if (start == std::string::npos || line[start] == '#') continue;
            size_t eq = line.find('=', start);
            if (eq == std::string::npos)
                throw ConfigInvalid("config line is not key=value: " + line);
            size_t key_end = line.find_last_not_of(" \t", eq - 1);
            size_t val_start = line.find_first_not_of(" \t", eq + 1);
            out[line.substr(start, key_end - start + 1)] =
                val_start == std::string::npos ? "" : line.substr(val_start);
        }
        return out;
    }

private:
    CLI::App* app_;
    std::string config_path_;
    std::map<std::string, std::string> cli_;
    std::map<std::string, std::string> defaults_;
    std::map<std::string, std::string> resolved_;
    std::vector<std::string> required_;
};

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

int env_workers() {
    const char* v = std::getenv("IGSM_WORKERS");
    if (!v) return 1;
    int n = std::atoi(v);
    return n > 0 ? n : 1;
}

void define_model_options(Opts& o) {
    o.define("layers", "transformer layers", "4");
    o.define("heads", "attention heads", "4");
    o.define("dim", "model width", "128");
    o.define("context", "context length in tokens", "1024");
    o.define("precision", "f32 or f64 (f64 is the reference mode)", "f32");
}

void define_train_options(Opts& o) {
    o.define("objective", "sft or dft", "sft");
    o.define("stage", "midtrain or finetune", "finetune");
    o.define("epochs", "training epochs", "3");
    o.define("batch", "batch size", "16");
    o.define("lr", "peak learning rate", "5e-5");
    o.define("schedule", "cosine or constant", "cosine");
    o.define("warmup", "warmup ratio", "0.03");
    o.define("mask-prompt", "loss only on cot and EOS", "true");
    o.define("seed", "run seed", "0");
}

igsm::nn::TrainRunConfig train_config_from(const Opts& o) {
    igsm::nn::TrainRunConfig tc;
    const auto objective = o.str("objective");
    if (objective == "sft")
        tc.objective = igsm::nn::Objective::SFT;
    else if (objective == "dft")
        tc.objective = igsm::nn::Objective::DFT;
    else
        throw ConfigInvalid("objective must be sft or dft");
    const auto stage = o.str("stage");
    if (stage == "midtrain")
        tc.stage = igsm::nn::Stage::Midtrain;
    else if (stage == "finetune")
        tc.stage = igsm::nn::Stage::Finetune;
    else
        throw ConfigInvalid("stage must be midtrain or finetune");
    tc.epochs = o.integer("epochs");
    tc.batch_size = o.integer("batch");
    tc.lr = o.real("lr");
    const auto schedule = o.str("schedule");
    if (schedule == "cosine")
        tc.schedule = igsm::nn::Schedule::Cosine;
    else if (schedule == "constant")
        tc.schedule = igsm::nn::Schedule::Constant;
    else
        throw ConfigInvalid("schedule must be cosine or constant");
    tc.warmup_ratio = o.real("warmup");
    tc.mask_prompt = o.flag("mask-prompt");
    tc.seed = static_cast<uint64_t>(std::stoull(o.str("seed")));
    tc.validate();
    return tc;
}

igsm::nn::TransformerConfig model_config_from(const Opts& o, int vocab_size) {
    igsm::nn::TransformerConfig cfg;
    cfg.vocab_size = vocab_size;
    cfg.n_layers = o.integer("layers");
    cfg.n_heads = o.integer("heads");
    cfg.d_model = o.integer("dim");
    cfg.context = o.integer("context");
    cfg.validate();
    return cfg;
}

// ---- subcommand handlers -------------------------------------------------

void cmd_generate(Opts& o) {
    o.resolve();
    auto [lo, hi] = o.range("ops");
    igsm::GenerateSpec spec{lo, hi, o.integer("per-op"),
                            static_cast<uint64_t>(std::stoull(o.str("seed"))),
                            o.integer("modulus")};
    const auto& vocab = igsm::default_vocabulary();
    igsm::Tokenizer tok(vocab, spec.modulus);
    auto corpus = igsm::generate_dataset(spec, vocab, tok);
    const fs::path out = o.str("out");
    fs::create_directories(out.parent_path().empty() ? "." : out.parent_path());
    igsm::write_jsonl(out.string(), corpus);
    o.echo(out.parent_path().empty() ? "." : out.parent_path());
    std::cout << "wrote " << corpus.size() << " instances to " << out << '\n';
}

void cmd_curate(Opts& o) {
    o.resolve();
    auto corpus = igsm::read_jsonl(o.str("in"));
    const std::string scheme_name = o.str("scheme");
    igsm::DifficultyScheme scheme;
    if (scheme_name == "op_count") {
        auto [lo, hi] = o.range("ops");
        scheme = igsm::op_count_scheme(lo, hi);
    } else if (scheme_name == "cot_length") {
        scheme = igsm::cot_length_scheme();
    } else if (scheme_name == "failure_rate") {
        scheme = igsm::failure_rate_scheme();
    } else {
        throw ConfigInvalid("scheme must be op_count, cot_length or failure_rate");
    }
    const auto seed = static_cast<uint64_t>(std::stoull(o.str("seed")));
    auto pools = igsm::stratified_pools(corpus, scheme, static_cast<size_t>(o.integer("pool-size")),
                                        seed);
    const fs::path dir = o.str("out-dir");
    fs::create_directories(dir);
    for (const auto& [bucket, pool] : pools.pools) {
        std::string name = scheme_name == "op_count"
                               ? "pool-op" + std::to_string(scheme.buckets[bucket].lo)
                               : "pool-b" + std::to_string(bucket);
        if (scheme_name == "op_count")
            name = "pool-op" + std::to_string(static_cast<int>(scheme.buckets[bucket].lo));
        igsm::write_jsonl((dir / (name + ".jsonl")).string(), pool);
    }
    write_file(dir / "manifest.json", igsm::curation_manifest_json(scheme, seed, pools));
    o.echo(dir);
    std::cout << "wrote " << pools.pools.size() << " pools to " << dir << '\n';
}

template <class T>
void run_train(Opts& o) {
    const auto& vocab = igsm::default_vocabulary();
    igsm::Tokenizer tok(vocab);
    auto corpus = igsm::read_jsonl(o.str("data"));
    auto tc = train_config_from(o);
    std::vector<igsm::Tokenizer::Encoded> data;
    data.reserve(corpus.size());
    for (const auto& inst : corpus) data.push_back(tok.tokenize_instance(inst, tc.mask_prompt));

    igsm::nn::ModelParams<T> model =
        o.has("base") ? igsm::nn::load_checkpoint<T>(o.str("base"))
                      : igsm::nn::init_params<T>(model_config_from(o, tok.vocab_size()),
                                                 tc.seed);
    const fs::path dir = o.str("out-dir");
    fs::create_directories(dir);
    tc.divergence_checkpoint = (dir / "diverged.ckpt").string();
    auto log = igsm::nn::train(model, tc, data);
    igsm::nn::save_checkpoint(model, (dir / "model.ckpt").string());
    write_file(dir / "log.csv", igsm::nn::train_log_csv(log));
    o.echo(dir);
    std::cout << "trained " << corpus.size() << " examples, final loss "
              << (log.empty() ? 0.0 : log.back().loss) << ", checkpoint in " << dir << '\n';
}

void cmd_train(Opts& o) {
    o.resolve();
    if (o.str("precision") == "f64")
        run_train<double>(o);
    else
        run_train<float>(o);
}

template <class T>
void run_eval(Opts& o) {
    const auto& vocab = igsm::default_vocabulary();
    igsm::Tokenizer tok(vocab);
    auto test = igsm::read_jsonl(o.str("test"));
    auto ckpts = [&] {
        std::vector<std::string> out;
        std::istringstream in(o.str("ckpt"));
        std::string item;
        while (std::getline(in, item, ',')) out.push_back(item);
        return out;
    }();
    std::vector<std::string> labels;
    if (o.has("labels")) {
        std::istringstream in(o.str("labels"));
        std::string item;
        while (std::getline(in, item, ',')) labels.push_back(item);
        if (labels.size() != ckpts.size())
            throw ConfigInvalid("labels count must match ckpt count");
    } else {
        for (const auto& c : ckpts) labels.push_back(fs::path(c).stem().string());
    }
    const fs::path dir = o.str("out-dir");
    fs::create_directories(dir);

    std::vector<igsm::nn::ModelParams<T>> models;
    models.reserve(ckpts.size());
    for (const auto& c : ckpts) models.push_back(igsm::nn::load_checkpoint<T>(c));
    std::vector<std::pair<std::string, const igsm::nn::ModelParams<T>*>> labeled;
    for (size_t i = 0; i < models.size(); ++i) labeled.emplace_back(labels[i], &models[i]);

    auto curves = igsm::nn::decomposed_report(labeled, test, tok);
    write_file(dir / "curves.csv", igsm::nn::curves_csv(curves));
    write_file(dir / "curves.svg", igsm::rep::curves_svg(curves));

    std::ostringstream agg;
    agg << "model_label,total,correct,aggregate_accuracy\n";
    agg.precision(17);
    for (size_t i = 0; i < models.size(); ++i) {
        auto r = igsm::nn::evaluate_model(models[i], test, tok);
        agg << labels[i] << ',' << r.total << ',' << r.total_correct << ','
            << r.aggregate() << '\n';
    }
    write_file(dir / "aggregate.csv", agg.str());
    o.echo(dir);
    std::cout << "evaluated " << models.size() << " model(s) on " << test.size()
              << " items; results in " << dir << '\n';
}

void cmd_eval(Opts& o) {
    o.resolve();
    if (o.str("precision") == "f64")
        run_eval<double>(o);
    else
        run_eval<float>(o);
}

template <class T>
void run_sweep_cmd(Opts& o) {
    const auto& vocab = igsm::default_vocabulary();
    igsm::Tokenizer tok(vocab);
    auto base = igsm::nn::load_checkpoint<T>(o.str("base"));
    auto test = igsm::read_jsonl(o.str("test"));

    igsm::nn::SweepConfig sc;
    sc.sizes = o.list<int>("sizes");
    sc.difficulties = o.list<int>("ops");
    sc.seeds = o.list<uint64_t>("seeds");
    sc.base_tag = o.has("base-tag") ? o.str("base-tag") : fs::path(o.str("base")).stem().string();
    sc.train = train_config_from(o);
    sc.n_workers = env_workers();
    sc.progress_every = 1;

    std::map<int, std::vector<igsm::ProblemInstance>> pools;
    const fs::path pool_dir = o.str("pools");
    for (int difficulty : sc.difficulties) {
        const fs::path p = pool_dir / ("pool-op" + std::to_string(difficulty) + ".jsonl");
        if (!fs::exists(p)) throw ConfigInvalid("missing pool file " + p.string());
        pools[difficulty] = igsm::read_jsonl(p.string());
    }

    const fs::path dir = o.str("out-dir");
    fs::create_directories(dir);
    std::map<std::string, std::vector<std::string>> subset_ids;
    auto grid = igsm::nn::run_sweep(base, sc, pools, test, tok, &subset_ids);
    write_file(dir / "grid.csv", igsm::nn::grid_csv(grid));

    ordered_json manifest;
    manifest["config"] = ordered_json::object();
    for (const auto& line : {"sizes", "ops", "seeds", "base", "base-tag", "test", "pools",
                             "objective", "stage", "epochs", "batch", "lr", "schedule",
                             "warmup", "mask-prompt", "seed", "precision", "out-dir"})
        manifest["config"][line] = o.str(line);
    manifest["base_tag"] = sc.base_tag;
    auto& subsets = manifest["subsets"] = ordered_json::object();
    for (const auto& [key, ids] : subset_ids) subsets[key] = ids;
    int failed = 0;
    auto& failures = manifest["failed_cells"] = ordered_json::array();
    for (const auto& c : grid.cells)
        if (c.failed) {
            ++failed;
            failures.push_back({{"size", c.size},
                                {"difficulty", c.difficulty},
                                {"seed", c.seed},
                                {"error", c.error}});
        }
    write_file(dir / "manifest.json", manifest.dump(2));
    o.echo(dir);
    std::cout << "sweep wrote " << grid.cells.size() << " cells (" << failed
              << " failed) to " << dir << '\n';
    if (failed > 0) std::exit(3);
}

void cmd_sweep(Opts& o) {
    o.resolve();
    if (o.has("from-manifest")) {
        std::ifstream in(o.str("from-manifest"));
        if (!in) throw ConfigInvalid("cannot read manifest " + o.str("from-manifest"));
        auto manifest = json::parse(in);
        for (const auto& [k, v] : manifest.at("config").items())
            if (k != "out-dir") o.override_value(k, v.get<std::string>());
    }
    if (o.str("precision") == "f64")
        run_sweep_cmd<double>(o);
    else
        run_sweep_cmd<float>(o);
}

template <class T>
void run_twogap(Opts& o) {
    const auto& vocab = igsm::default_vocabulary();
    igsm::Tokenizer tok(vocab);
    auto model = igsm::nn::load_checkpoint<T>(o.str("ckpt-train"));
    auto pre = igsm::nn::load_checkpoint<T>(o.str("ckpt-pre"));
    auto sample = igsm::read_jsonl(o.str("sample"));
    if (sample.empty()) throw ConfigInvalid("empty sample corpus");

    std::vector<double> losses;
    losses.reserve(sample.size());
    for (const auto& inst : sample)
        losses.push_back(igsm::nn::nll_score(model, tok.tokenize_instance(inst)));

    auto dist_from = [&](const std::string& path) {
        std::map<int, size_t> hist;
        for (const auto& inst : igsm::read_jsonl(path)) ++hist[inst.ops];
        return igsm::gap::DiscreteDistribution::from_histogram(hist);
    };
    auto q_train = dist_from(o.str("train-corpus"));
    auto p_test = dist_from(o.str("test-corpus"));

    const double C = o.has("clip") ? o.real("clip") : 2.0 * std::log(tok.vocab_size());
    auto report = igsm::gap::assemble_report(losses, model.squared_distance(pre), p_test,
                                             q_train, o.real("delta"), C, o.real("sigma"));
    const fs::path dir = o.str("out-dir");
    fs::create_directories(dir);
    write_file(dir / "report.json", igsm::gap::report_json(report));
    write_file(dir / "report.csv", igsm::gap::report_csv(report));
    o.echo(dir);
    std::cout << "two-gap report over n=" << report.n << " in " << dir << '\n';
}

void cmd_twogap(Opts& o) {
    o.resolve();
    if (o.str("precision") == "f64")
        run_twogap<double>(o);
    else
        run_twogap<float>(o);
}

void cmd_report(Opts& o) {
    o.resolve();
    if (!o.has("grid") && !o.has("curves"))
        throw ConfigInvalid("report needs --grid and/or --curves");
    const fs::path dir = o.str("out-dir");
    fs::create_directories(dir);
    if (o.has("grid")) {
        std::ifstream in(o.str("grid"));
        if (!in) throw igsm::rep::MalformedInput("cannot read " + o.str("grid"));
        std::stringstream buffer;
        buffer << in.rdbuf();
        auto grid = igsm::nn::grid_from_csv(buffer.str());
        if (o.has("base-tag")) grid.base_tag = o.str("base-tag");
        write_file(dir / "heatmap.csv", igsm::rep::heatmap_csv(grid));
        write_file(dir / "heatmap.svg", igsm::rep::heatmap_svg(grid));
        write_file(dir / "slices.csv", igsm::rep::slices_csv(grid));
        write_file(dir / "slices-by-size.svg", igsm::rep::slice_by_size_svg(grid));
        write_file(dir / "slices-by-difficulty.svg", igsm::rep::slice_by_difficulty_svg(grid));
        write_file(dir / "optimal.csv", igsm::rep::optimal_csv(grid));
        write_file(dir / "optimal.svg", igsm::rep::optimal_svg(grid));
    }
    if (o.has("curves")) {
        std::ifstream in(o.str("curves"));
        if (!in) throw igsm::rep::MalformedInput("cannot read " + o.str("curves"));
        igsm::nn::DecomposedCurves curves;
        std::string line;
        std::getline(in, line);
        if (line != "model_label,test_op,accuracy")
            throw igsm::rep::MalformedInput("unexpected curves header: " + line);
        std::map<std::string, size_t> index;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream row(line);
            std::string label, op, acc;
            std::getline(row, label, ',');
            std::getline(row, op, ',');
            std::getline(row, acc, ',');
            if (!index.count(label)) {
                index[label] = curves.curves.size();
                curves.curves.emplace_back(label, std::map<int, double>{});
            }
            curves.curves[index[label]].second[std::stoi(op)] = std::stod(acc);
        }
        write_file(dir / "curves.svg", igsm::rep::curves_svg(curves));
    }
    o.echo(dir);
    std::cout << "report written to " << dir << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"iGSM-mini: synthetic math data, difficulty curation, tiny-transformer "
                 "training and two-gap analytics"};
    app.require_subcommand(1);

    auto* generate = app.add_subcommand("generate", "generate a JSONL corpus");
    Opts go(generate);
    go.define("ops", "op range lo..hi", "2..8");
    go.define("per-op", "instances per op level", "2000");
    go.define("seed", "dataset seed", "0");
    go.define("modulus", "arithmetic modulus p", "23");
    go.define("out", "output JSONL path", "", true);
    generate->callback([&] { cmd_generate(go); });

    auto* curate = app.add_subcommand("curate", "stratify a corpus into difficulty pools");
    Opts co(curate);
    co.define("in", "input JSONL corpus", "", true);
    co.define("scheme", "op_count, cot_length or failure_rate", "op_count");
    co.define("ops", "op range lo..hi for the op_count scheme", "2..20");
    co.define("pool-size", "instances per bucket pool", "1000");
    co.define("seed", "curation seed", "0");
    co.define("out-dir", "output directory", "", true);
    curate->callback([&] { cmd_curate(co); });

    auto* train = app.add_subcommand("train", "train or fine-tune a model");
    Opts to(train);
    to.define("data", "training JSONL corpus", "", true);
    to.define("base", "starting checkpoint (omit to initialize fresh)");
    to.define("out-dir", "output directory", "", true);
    define_train_options(to);
    define_model_options(to);
    train->callback([&] { cmd_train(to); });

    auto* eval = app.add_subcommand("eval", "evaluate checkpoints on a test corpus");
    Opts eo(eval);
    eo.define("ckpt", "checkpoint path(s), comma-separated", "", true);
    eo.define("labels", "comma-separated labels matching --ckpt");
    eo.define("test", "test JSONL corpus", "", true);
    eo.define("out-dir", "output directory", "", true);
    eo.define("precision", "f32 or f64", "f32");
    eval->callback([&] { cmd_eval(eo); });

    auto* sweep = app.add_subcommand("sweep", "2-D size x difficulty fine-tuning sweep");
    Opts so(sweep);
    so.define("base", "base checkpoint", "", true);
    so.define("base-tag", "label for the base model");
    so.define("test", "test JSONL corpus", "", true);
    so.define("pools", "directory with pool-op{N}.jsonl files", "", true);
    so.define("sizes", "comma-separated training sizes", "500,2000,8000");
    so.define("ops", "comma-separated difficulties", "4,8,12,16");
    so.define("seeds", "comma-separated sweep seeds", "1,2,3");
    so.define("from-manifest", "rerun a sweep from its manifest.json");
    so.define("out-dir", "output directory", "", true);
    define_train_options(so);
    so.define("precision", "f32 or f64", "f32");
    sweep->callback([&] { cmd_sweep(so); });

    auto* twogap = app.add_subcommand("twogap", "assemble the two-gap bound report");
    Opts wo(twogap);
    wo.define("ckpt-train", "fine-tuned checkpoint", "", true);
    wo.define("ckpt-pre", "pre-adaptation checkpoint", "", true);
    wo.define("sample", "JSONL corpus for the empirical risk", "", true);
    wo.define("train-corpus", "JSONL corpus defining the training ops distribution", "", true);
    wo.define("test-corpus", "JSONL corpus defining the test ops distribution", "", true);
    wo.define("delta", "confidence parameter", "0.05");
    wo.define("clip", "loss bound C (default 2 ln |V|)");
    wo.define("sigma", "weight-proxy scale", "1.0");
    wo.define("precision", "f32 or f64", "f32");
    wo.define("out-dir", "output directory", "", true);
    twogap->callback([&] { cmd_twogap(wo); });

    auto* report = app.add_subcommand("report", "render SVG figures with sibling CSVs");
    Opts ro(report);
    ro.define("grid", "grid.csv from a sweep");
    ro.define("curves", "curves.csv from eval");
    ro.define("base-tag", "label override for figure titles");
    ro.define("out-dir", "output directory", "", true);
    report->callback([&] { cmd_report(ro); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const ConfigInvalid& e) {
        std::cerr << R"({"error":"ConfigInvalid","message":")" << e.what() << "\"}\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << R"({"error":")" << typeid(e).name() << R"(","message":")" << e.what()
                  << "\"}\n";
        return 1;
    }
    return 0;
}
