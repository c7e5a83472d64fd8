#include "envi/il/trained_model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "envi/core/error.hpp"
#include "envi/core/trajectory_io.hpp"
#include "envi/nn/serialization.hpp"

namespace envi::il {

ModelOracle::ModelOracle(const TrainedModel& model, bool sample)
    : head_(model.head),
      norm_(model.norm),
      history_length_(model.history_length),
      sample_(sample),
      features_(2 * model.history_length) {
  if (history_length_ == 0) throw ConfigError("model has no history length");
  if (head_.mean.input_dim() != 2 * history_length_) {
    throw ConfigError("model input dimension does not match its history length");
  }
}

State ModelOracle::step(const HistoryWindow& window) {
  if (window.length() != history_length_) {
    throw ConfigError("window length " + std::to_string(window.length()) +
                      " does not match model history length " +
                      std::to_string(history_length_));
  }
  window_features<float>(window, norm_, features_);
  double mean = head_.mean.forward(std::span<const float>(features_))(0);
  if (sample_) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    mean += static_cast<double>(head_.stddev()) * gauss(rng_);
  }
  return State{denormalize(mean, norm_.state)};
}

void save_model(const std::filesystem::path& path, const TrainedModel& model) {
  nlohmann::ordered_json j;
  j["format"] = "envi-model";
  j["version"] = 1;
  j["history_length"] = model.history_length;
  j["stochastic"] = model.stochastic;
  j["log_std"] = static_cast<double>(model.head.log_std);
  j["norm"] = {{"state", {model.norm.state.min, model.norm.state.max}},
               {"action", {model.norm.action.min, model.norm.action.max}}};
  j["network"] = nn::mlp_to_json(model.head.mean);
  j["training"] = {{"algorithm", std::string(to_string(model.provenance.algorithm))},
                   {"epochs", model.provenance.epochs},
                   {"seed", model.provenance.seed},
                   {"source_logs", model.provenance.source_logs},
                   {"aborted", model.trace.aborted},
                   {"reward_converged", model.trace.reward_converged}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump() << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    const auto j = nlohmann::json::parse(in);
    if (j.value("format", std::string()) != "envi-model") {
      throw ConfigError(path.string() + ": not a model file");
    }
    TrainedModel model{
        {nn::mlp_from_json<float>(j.at("network")),
         static_cast<float>(j.at("log_std").get<double>())},
        j.at("stochastic").get<bool>(),
        NormSpec{{j.at("norm").at("state").at(0).get<double>(),
                  j.at("norm").at("state").at(1).get<double>()},
                 {j.at("norm").at("action").at(0).get<double>(),
                  j.at("norm").at("action").at(1).get<double>()}},
        j.at("history_length").get<std::size_t>(),
        {},
        {}};
    model.norm.validate();
    const auto& t = j.at("training");
    model.provenance.algorithm = parse_algorithm(t.at("algorithm").get<std::string>());
    model.provenance.epochs = t.at("epochs").get<std::size_t>();
    model.provenance.seed = t.at("seed").get<std::uint64_t>();
    model.provenance.source_logs = t.at("source_logs").get<std::vector<std::size_t>>();
    model.trace.aborted = t.value("aborted", false);
    model.trace.reward_converged = t.value("reward_converged", true);
    if (model.head.mean.input_dim() != 2 * model.history_length ||
        model.head.mean.output_dim() != 1) {
      throw ConfigError(path.string() + ": network shape does not match history length");
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

namespace {

std::string cell(double v) { return std::isnan(v) ? std::string() : format_decimal(v); }

double parse_cell(const std::string& text) {
  return text.empty() ? kNotApplicable : parse_decimal(text);
}

}  // namespace

void write_trace_csv(const std::filesystem::path& path, const TrainingTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "epoch,loss_bc,loss_gail,loss_disc,mean_reward\n";
  for (const auto& r : trace.epochs) {
    out << r.epoch << ',' << cell(r.loss_bc) << ',' << cell(r.loss_gail) << ','
        << cell(r.loss_disc) << ',' << cell(r.mean_reward) << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<EpochRecord> read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "epoch,loss_bc,loss_gail,loss_disc,mean_reward") {
    throw ConfigError(path.string() + ": unexpected trace header");
  }
  std::vector<EpochRecord> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    while (fields.size() < 5) fields.emplace_back();
    rows.push_back({static_cast<std::size_t>(parse_decimal(fields[0])), parse_cell(fields[1]),
                    parse_cell(fields[2]), parse_cell(fields[3]), parse_cell(fields[4])});
  }
  return rows;
}

}  // namespace envi::il
