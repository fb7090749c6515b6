#include "pu/config.h"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pu {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::map<std::string, std::map<std::string, std::string>> build_defaults() {
  std::map<std::string, std::map<std::string, std::string>> d;

  d["train"] = {
      {"dataset", "synthetic2d"},      // synthetic1d | synthetic2d | mnist
      {"task_mean", "0"},              // synthetic override: class means +/-(m,..,m); 0 = preset
      {"task_sigma", "0"},             // synthetic override: shared stddev; 0 = preset
      {"task_pi", "0"},                // synthetic override: class prior; 0 = preset
      {"methods", "upu,nnpu"},         // subset of pn,upu,nnpu
      {"np", "100"},
      {"nu", "0"},                     // 0 -> dataset default (all training data for mnist)
      {"nn", "0"},                     // 0 -> (pi_n/2pi_p)^2 * np
      {"ntest", "10000"},              // synthetic test draw
      {"epochs", "100"},
      {"batches", "10"},
      {"loss", "sigmoid"},
      {"eval_loss", "zero_one"},
      {"optimizer", "adam"},
      {"step_size", "0"},              // 0 -> optimizer default
      {"adam_beta1", "0.9"},
      {"adam_beta2", "0.999"},
      {"optim_epsilon", "1e-8"},
      {"beta", "0"},
      {"gamma", "1"},
      {"arch", "auto"},                // auto -> d-100-1:relu, or any "d-..-1:act" string
      {"l2", "0.005"},
      {"seed", "1"},
      {"data_seed", "0"},              // 0 -> derived from seed
      {"pi_given_scale", "1"},
      {"dependent", "true"},           // mnist U sampling
      {"mnist_images", ""},
      {"mnist_labels", ""},
      {"mnist_test_images", ""},
      {"mnist_test_labels", ""},
      {"out", "run"},
      {"svg", "false"},
      {"dump_data", "false"},
      {"threads", "0"},
      {"exec", "parallel"},
  };

  d["study"] = {
      {"task", "synthetic1d"},
      {"check", ""},                   // comma list: unbiasedness, equivalence, mse
      {"sweep", ""},                   // "" or "sizes"
      {"loss", "sigmoid"},
      {"np", "50"},
      {"nu", "500"},
      {"reps", "10000"},
      {"g_scale", "1"},                // fixed classifier slope along the class axis
      {"g_bias", "0"},
      {"mse_bound_betas", "0.05,0.1,0.2"},  // multiples of pi_p
      {"grid", "5:500,10:1000,100:10000"},
      {"seed", "12345"},
      {"out", "study"},
      {"threads", "0"},
      {"exec", "parallel"},
  };

  // sweep-prior reuses the training keys, plus the prior grid
  d["sweep-prior"] = d["train"];
  d["sweep-prior"].erase("pi_given_scale");
  d["sweep-prior"]["grid"] = "0.8,0.9,1.0,1.1,1.2";
  d["sweep-prior"]["methods"] = "nnpu";
  d["sweep-prior"]["out"] = "sweep";

  d["mnist-prep"] = {
      {"images", ""},
      {"labels", ""},
      {"test_images", ""},
      {"test_labels", ""},
  };

  return d;
}

const std::map<std::string, std::map<std::string, std::string>>& all_defaults() {
  static const auto d = build_defaults();
  return d;
}

}  // namespace

const std::map<std::string, std::string>& RunConfig::defaults_for(const std::string& command) {
  const auto& d = all_defaults();
  const auto it = d.find(command);
  if (it == d.end()) throw std::invalid_argument("unknown command: " + command);
  return it->second;
}

RunConfig RunConfig::with_defaults(const std::string& command) {
  RunConfig cfg;
  cfg.command_ = command;
  cfg.values_ = defaults_for(command);
  return cfg;
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: " + path + ":" + std::to_string(lineno) +
                               ": expected key = value");
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!values_.count(key))
    throw std::invalid_argument("config: unknown key \"" + key + "\" for command " + command_);
  values_[key] = value;
}

bool RunConfig::has(const std::string& key) const { return values_.count(key) > 0; }

const std::string& RunConfig::get_str(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end())
    throw std::invalid_argument("config: unknown key \"" + key + "\"");
  return it->second;
}

long long RunConfig::get_int(const std::string& key) const {
  const std::string& v = get_str(key);
  std::size_t pos = 0;
  const long long out = std::stoll(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("config: " + key + " is not an integer: " + v);
  return out;
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
  const std::string& v = get_str(key);
  std::size_t pos = 0;
  const unsigned long long out = std::stoull(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("config: " + key + " is not an integer: " + v);
  return out;
}

double RunConfig::get_double(const std::string& key) const {
  const std::string& v = get_str(key);
  std::size_t pos = 0;
  const double out = std::stod(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("config: " + key + " is not a number: " + v);
  return out;
}

bool RunConfig::get_bool(const std::string& key) const {
  const std::string& v = get_str(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config: " + key + " is not a boolean: " + v);
}

std::vector<std::string> RunConfig::get_list(const std::string& key) const {
  std::vector<std::string> out;
  std::stringstream ss(get_str(key));
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

std::vector<double> RunConfig::get_double_list(const std::string& key) const {
  std::vector<double> out;
  for (const std::string& tok : get_list(key)) {
    std::size_t pos = 0;
    out.push_back(std::stod(tok, &pos));
    if (pos != tok.size())
      throw std::invalid_argument("config: " + key + " has a non-numeric entry: " + tok);
  }
  return out;
}

}  // namespace pu
