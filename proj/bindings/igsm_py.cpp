// Python bindings for the core operations: data generation and verification,
// tokenization, difficulty curation, tiny-model training/evaluation, and the
// two-gap bound arithmetic. Single-precision models only; the C++ CLI offers
// the f64 reference mode.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "igsm/curation.hpp"
#include "igsm/eval.hpp"
#include "igsm/generate.hpp"
#include "igsm/graph.hpp"
#include "igsm/infer.hpp"
#include "igsm/trainer.hpp"
#include "igsm/twogap.hpp"
#include "igsm/verify.hpp"

namespace py = pybind11;

namespace {

// Owns the vocabulary-bound tokenizer plus a float model; keeps the Python
// surface small while exposing every main operation end to end.
class Model {
public:
    Model(int n_layers, int n_heads, int d_model, int context, uint64_t seed)
        : tok_(igsm::default_vocabulary()) {
        igsm::nn::TransformerConfig cfg;
        cfg.vocab_size = tok_.vocab_size();
        cfg.n_layers = n_layers;
        cfg.n_heads = n_heads;
        cfg.d_model = d_model;
        cfg.context = context;
        cfg.validate();
        params_ = igsm::nn::init_params<float>(cfg, seed);
    }
    explicit Model(igsm::nn::ModelParams<float> params)
        : tok_(igsm::default_vocabulary()), params_(std::move(params)) {}

    std::vector<double> train(const std::vector<igsm::ProblemInstance>& data,
                              const std::string& objective, int epochs, int batch,
                              double lr, const std::string& schedule, double warmup,
                              bool mask_prompt, uint64_t seed) {
        igsm::nn::TrainRunConfig tc;
        tc.objective = objective == "dft" ? igsm::nn::Objective::DFT
                                          : igsm::nn::Objective::SFT;
        tc.epochs = epochs;
        tc.batch_size = batch;
        tc.lr = lr;
        tc.schedule = schedule == "constant" ? igsm::nn::Schedule::Constant
                                             : igsm::nn::Schedule::Cosine;
        tc.warmup_ratio = warmup;
        tc.mask_prompt = mask_prompt;
        tc.seed = seed;
        std::vector<igsm::Tokenizer::Encoded> encoded;
        encoded.reserve(data.size());
        for (const auto& inst : data)
            encoded.push_back(tok_.tokenize_instance(inst, mask_prompt));
        auto log = igsm::nn::train(params_, tc, encoded);
        std::vector<double> losses;
        losses.reserve(log.size());
        for (const auto& row : log) losses.push_back(row.loss);
        return losses;
    }

    py::dict evaluate(const std::vector<igsm::ProblemInstance>& test) const {
        auto r = igsm::nn::evaluate_model(params_, test, tok_);
        py::dict per_op;
        for (const auto& [op, n] : r.counts) {
            (void)n;
            per_op[py::int_(op)] = r.accuracy(op);
        }
        py::dict out;
        out["aggregate"] = r.aggregate();
        out["per_op"] = per_op;
        out["total"] = r.total;
        out["correct"] = r.total_correct;
        return out;
    }

    double nll(const igsm::ProblemInstance& inst) {
        return igsm::nn::nll_score(params_, tok_.tokenize_instance(inst));
    }

    std::string decode(const std::string& question, int max_new_tokens) const {
        std::vector<int> prompt;
        prompt.push_back(tok_.bos_id());
        for (int id : tok_.encode(question)) prompt.push_back(id);
        prompt.push_back(tok_.sep_id());
        auto out = igsm::nn::decode_greedy(params_, prompt, tok_.eos_id(), max_new_tokens);
        return tok_.decode(out.ids);
    }

    void save(const std::string& path) const { igsm::nn::save_checkpoint(params_, path); }
    static Model load(const std::string& path) {
        return Model(igsm::nn::load_checkpoint<float>(path));
    }

    double squared_distance(const Model& other) const {
        return params_.squared_distance(other.params_);
    }

private:
    igsm::Tokenizer tok_;
    igsm::nn::ModelParams<float> params_;
};

}  // namespace

PYBIND11_MODULE(_igsm, m) {
    m.doc() = "Synthetic-math data generation, difficulty curation, tiny-transformer "
              "training, and distribution-shift bound arithmetic.";

    py::class_<igsm::ProblemInstance>(m, "ProblemInstance")
        .def(py::init<>())
        .def_readwrite("id", &igsm::ProblemInstance::id)
        .def_readwrite("ops", &igsm::ProblemInstance::ops)
        .def_readwrite("edges", &igsm::ProblemInstance::edges)
        .def_readwrite("question", &igsm::ProblemInstance::question)
        .def_readwrite("cot", &igsm::ProblemInstance::cot)
        .def_readwrite("answer", &igsm::ProblemInstance::answer)
        .def_readwrite("cot_token_length", &igsm::ProblemInstance::cot_token_length)
        .def_readwrite("seed", &igsm::ProblemInstance::seed)
        .def("to_json_line", &igsm::ProblemInstance::to_json_line)
        .def_static("from_json_line", &igsm::ProblemInstance::from_json_line)
        .def("__repr__", [](const igsm::ProblemInstance& p) {
            return "<ProblemInstance id='" + p.id + "' ops=" + std::to_string(p.ops) + ">";
        });

    m.def("target_edges", &igsm::target_edges, py::arg("ops"),
          "Edge budget floor(ops*4/3)+1 for a given op count.");
    m.def("max_admissible_edges", &igsm::max_admissible_edges, py::arg("ops"));
    m.def(
        "generate_dataset",
        [](int ops_lo, int ops_hi, int per_op, uint64_t seed, int modulus) {
            igsm::GenerateSpec spec{ops_lo, ops_hi, per_op, seed, modulus};
            const auto& vocab = igsm::default_vocabulary();
            igsm::Tokenizer tok(vocab, modulus);
            return igsm::generate_dataset(spec, vocab, tok);
        },
        py::arg("ops_lo"), py::arg("ops_hi"), py::arg("per_op"), py::arg("seed") = 0,
        py::arg("modulus") = igsm::kDefaultModulus,
        "Deterministic dataset: per_op instances for each op level in [ops_lo, ops_hi].");
    m.def("verify_instance", &igsm::verify_instance, py::arg("instance"),
          py::arg("modulus") = igsm::kDefaultModulus,
          "Re-derive the chain of thought and answer from the question alone.");
    m.def("read_jsonl", &igsm::read_jsonl, py::arg("path"));
    m.def("write_jsonl", &igsm::write_jsonl, py::arg("path"), py::arg("instances"));

    py::class_<igsm::Tokenizer>(m, "Tokenizer")
        .def(py::init([]() { return igsm::Tokenizer(igsm::default_vocabulary()); }))
        .def("encode", &igsm::Tokenizer::encode)
        .def("decode", &igsm::Tokenizer::decode)
        .def("count_tokens", &igsm::Tokenizer::count_tokens)
        .def_property_readonly("vocab_size", &igsm::Tokenizer::vocab_size)
        .def("tokenize_instance",
             [](const igsm::Tokenizer& t, const igsm::ProblemInstance& inst,
                bool mask_prompt) {
                 auto e = t.tokenize_instance(inst, mask_prompt);
                 return py::make_tuple(e.ids, e.loss_mask);
             },
             py::arg("instance"), py::arg("mask_prompt") = true,
             "Returns (token ids, loss mask) for BOS+question+SEP+cot+EOS.");

    m.def(
        "nested_sample",
        [](const std::vector<igsm::ProblemInstance>& pool, std::vector<size_t> sizes,
           uint64_t seed) {
            igsm::SamplePlan plan{pool.size(), std::move(sizes), seed};
            return igsm::nested_sample(pool, plan);
        },
        py::arg("pool"), py::arg("sizes"), py::arg("seed"),
        "One seeded shuffle; returned subsets are prefixes, so they nest.");
    m.def("extract_answer", &igsm::nn::extract_answer, py::arg("completion"),
          py::arg("modulus") = igsm::kDefaultModulus,
          "Last 'Answer: v' with v in [0, modulus-1], else None.");

    py::class_<Model>(m, "Model")
        .def(py::init<int, int, int, int, uint64_t>(), py::arg("n_layers") = 2,
             py::arg("n_heads") = 2, py::arg("d_model") = 32, py::arg("context") = 256,
             py::arg("seed") = 0)
        .def("train", &Model::train, py::arg("data"), py::arg("objective") = "sft",
             py::arg("epochs") = 3, py::arg("batch") = 16, py::arg("lr") = 5e-5,
             py::arg("schedule") = "cosine", py::arg("warmup") = 0.03,
             py::arg("mask_prompt") = true, py::arg("seed") = 0,
             "Runs the training loop; returns the per-step loss curve.")
        .def("evaluate", &Model::evaluate, py::arg("test"))
        .def("nll", &Model::nll, py::arg("instance"))
        .def("decode", &Model::decode, py::arg("question"), py::arg("max_new_tokens") = 256)
        .def("save", &Model::save, py::arg("path"))
        .def_static("load", &Model::load, py::arg("path"))
        .def("squared_distance", &Model::squared_distance, py::arg("other"));

    py::class_<igsm::gap::DiscreteDistribution>(m, "DiscreteDistribution")
        .def_readonly("support", &igsm::gap::DiscreteDistribution::support)
        .def_readonly("probs", &igsm::gap::DiscreteDistribution::probs)
        .def_static("uniform", &igsm::gap::DiscreteDistribution::uniform, py::arg("lo"),
                    py::arg("hi"))
        .def_static("from_histogram", &igsm::gap::DiscreteDistribution::from_histogram,
                    py::arg("counts"));
    m.def("pac_bayes_term", &igsm::gap::pac_bayes_term, py::arg("kl"), py::arg("n"),
          py::arg("delta"), py::arg("C"));
    m.def("tv_distance", &igsm::gap::tv_distance, py::arg("p"), py::arg("q"));
    m.def("kl_distributions", &igsm::gap::kl_distributions, py::arg("p"), py::arg("q"));
    m.def("kl_weight_proxy", &igsm::gap::kl_weight_proxy,
          py::arg("squared_param_distance"), py::arg("sigma"));
}
